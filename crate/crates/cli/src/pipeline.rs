//! Pipeline orchestration: ingest → preprocess → consensus selection →
//! subset comparison. Pure functions from config + data to in-memory
//! results; file emission lives in [`crate::report`].

use std::collections::BTreeSet;
use std::path::Path;

use attrsel_core::consensus::{ForwardSelector, GaSelector, PanelOutcome};
use attrsel_core::dataset::{load_csv_with_stats, IngestStats};
use attrsel_core::eval::cross_validate_opts;
use attrsel_core::{
    compare_subsets, consensus_subset, filter_panel_table, make_folds, one_hot_encode,
    per_fold_select, standardize, tally_votes, ComparisonTable, ConfusionMatrix, Dataset, Error,
    FoldPlan, MetricsReport, Result, SearchTrace, SelectionRun, VoteTally,
};

use crate::config::{PipelineConfig, SelectionMethod};

/// Ingestion and preprocessing footprint, echoed into reports.
#[derive(Debug, Clone)]
pub struct DataSummary {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped: usize,
    pub n_attributes: usize,
    pub n_classes: usize,
    pub class_counts: Vec<usize>,
}

/// Phase one: one selection run and its consensus outcome.
#[derive(Debug, Clone)]
pub struct SelectionPhase {
    pub method: SelectionMethod,
    pub folds: usize,
    pub seed: u64,
    pub tally: VoteTally,
    pub selected: BTreeSet<usize>,
    /// Per-round picks, for the wrapper methods (empty for the filter panel).
    pub rounds: Vec<BTreeSet<usize>>,
    /// Per-round search traces, wrappers only.
    pub traces: Vec<SearchTrace>,
    /// Five-method vote detail, filter panel only.
    pub panel: Option<PanelOutcome>,
}

/// Everything a full `run` produces, before formatting.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub summary: DataSummary,
    pub attributes: Vec<(String, String)>,
    pub selection: SelectionPhase,
    pub comparison: ComparisonTable,
}

/// Load the configured CSV and apply preprocessing: optional global
/// standardization (constant columns handled per policy), then one-hot
/// expansion of nominal columns.
pub fn load_and_prepare(cfg: &PipelineConfig) -> Result<(Dataset, IngestStats)> {
    let schema = cfg.schema();
    let (d, stats) = load_csv_with_stats(Path::new(&cfg.data.path), &schema)?;
    let d = prepare(cfg, d)?;
    Ok((d, stats))
}

/// The preprocessing applied to any dataset entering the pipeline.
pub fn prepare(cfg: &PipelineConfig, d: Dataset) -> Result<Dataset> {
    let d = if cfg.preprocess.standardize {
        standardize(&d, cfg.preprocess.constant_columns)?.0
    } else {
        d
    };
    one_hot_encode(&d)
}

pub fn selection_plan(cfg: &PipelineConfig, d: &Dataset) -> Result<FoldPlan> {
    make_folds(
        d.labels(),
        cfg.selection.folds,
        cfg.selection.seed,
        cfg.selection.stratified,
    )
}

pub fn evaluation_plan(cfg: &PipelineConfig, d: &Dataset) -> Result<FoldPlan> {
    make_folds(
        d.labels(),
        cfg.evaluation.folds,
        cfg.evaluation.seed,
        cfg.evaluation.stratified,
    )
}

fn wrapper_phase(cfg: &PipelineConfig, run: SelectionRun) -> SelectionPhase {
    let tally = tally_votes(&run);
    let selected = consensus_subset(&tally, cfg.selection.consensus.fold_threshold);
    let rounds = run.rounds.iter().map(|r| r.selected.clone()).collect();
    let traces = run
        .rounds
        .into_iter()
        .filter_map(|r| r.trace)
        .collect();
    SelectionPhase {
        method: cfg.selection.method,
        folds: cfg.selection.folds,
        seed: cfg.selection.seed,
        tally,
        selected,
        rounds,
        traces,
        panel: None,
    }
}

/// Phase one. Every method votes over `folds` rounds, each round seeing the
/// data minus one fold; the consensus threshold decides the final subset.
pub fn select_phase(cfg: &PipelineConfig, d: &Dataset) -> Result<SelectionPhase> {
    let plan = selection_plan(cfg, d)?;
    match cfg.selection.method {
        SelectionMethod::Filters => {
            let panel = filter_panel_table(d, &plan, &cfg.selection.consensus, &cfg.binning())?;
            Ok(SelectionPhase {
                method: cfg.selection.method,
                folds: cfg.selection.folds,
                seed: cfg.selection.seed,
                tally: panel.tally.clone(),
                selected: panel.selected.clone(),
                rounds: Vec::new(),
                traces: Vec::new(),
                panel: Some(panel),
            })
        }
        SelectionMethod::Forward => {
            let selector = ForwardSelector {
                config: cfg.forward_config(),
            };
            Ok(wrapper_phase(cfg, per_fold_select(d, &selector, &plan)?))
        }
        SelectionMethod::Ga => {
            let selector = GaSelector {
                config: cfg.ga_config(),
            };
            Ok(wrapper_phase(cfg, per_fold_select(d, &selector, &plan)?))
        }
    }
}

/// Phase two: the consensus subset against the full attribute set, every
/// configured classifier, one shared fold plan. An empty consensus subset
/// degrades to evaluating the full set alone.
pub fn evaluate_phase(
    cfg: &PipelineConfig,
    d: &Dataset,
    selected: &BTreeSet<usize>,
) -> Result<ComparisonTable> {
    let plan = evaluation_plan(cfg, d)?;
    let full: BTreeSet<usize> = d.present_attributes().into_iter().collect();
    let mut subsets = Vec::new();
    if !selected.is_empty() {
        subsets.push(("selected".to_string(), selected.clone()));
    }
    subsets.push(("full".to_string(), full));
    compare_subsets(
        d,
        &subsets,
        &cfg.evaluation.classifiers,
        &plan,
        cfg.preprocess.fold_safe,
    )
}

/// Cross-validate one explicit subset; used by the `evaluate` subcommand.
pub fn evaluate_subset(
    cfg: &PipelineConfig,
    d: &Dataset,
    attrs: &BTreeSet<usize>,
) -> Result<Vec<(String, ConfusionMatrix, MetricsReport)>> {
    let plan = evaluation_plan(cfg, d)?;
    let view = d.restrict(attrs);
    if view.n_cols() == 0 {
        return Err(Error::Invalid("subset selects no columns".into()));
    }
    let mut out = Vec::new();
    for spec in &cfg.evaluation.classifiers {
        let o = cross_validate_opts(spec, &view, &plan, cfg.preprocess.fold_safe)?;
        out.push((spec.name(), o.confusion, o.metrics));
    }
    Ok(out)
}

fn summarize(stats: IngestStats, d: &Dataset) -> DataSummary {
    DataSummary {
        rows_read: stats.rows_read,
        rows_kept: stats.rows_kept,
        rows_dropped: stats.rows_dropped,
        n_attributes: d.present_attributes().len(),
        n_classes: d.n_classes(),
        class_counts: d.class_counts(),
    }
}

/// The full `run`: both phases over the configured data file.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let (d, stats) = load_and_prepare(cfg)?;
    run_pipeline_on(cfg, &d, stats)
}

/// [`run_pipeline`] on an already-prepared dataset (used by tests and by
/// `run` on synthetic data).
pub fn run_pipeline_on(
    cfg: &PipelineConfig,
    d: &Dataset,
    stats: IngestStats,
) -> Result<PipelineOutcome> {
    let selection = select_phase(cfg, d)?;
    let comparison = evaluate_phase(cfg, d, &selection.selected)?;
    let attributes = d
        .attributes()
        .iter()
        .map(|a| (a.name.clone(), a.group.name().to_string()))
        .collect();
    Ok(PipelineOutcome {
        summary: summarize(stats, d),
        attributes,
        selection,
        comparison,
    })
}
