//! `attrsel`: consensus attribute selection and classification over cohort
//! extracts, driven by one config file.
//!
//! Exit codes: 0 success, 1 usage, 2 data errors, 3 config errors.

use std::collections::BTreeSet;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use attrsel_cli::config::{Overrides, PipelineConfig};
use attrsel_cli::{pipeline, report};
use attrsel_core::table::{csv_record, fmt_float};
use attrsel_core::{
    rank_attributes, synth_generate, Dataset, Error, FilterMethod, IncomeClass, Result,
};

#[derive(Parser)]
#[command(
    name = "attrsel",
    version,
    about = "Consensus attribute selection and classification for cohort income data"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run selection and evaluation end to end, writing the report bundle.
    Run(PipelineArgs),
    /// Rank every attribute under all five filter methods (no folds).
    Rank(PipelineArgs),
    /// Run consensus selection only.
    Select(PipelineArgs),
    /// Cross-validate the classifiers on the full set or an explicit subset.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic benchmark table with planted signal.
    Synth(SynthArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Pipeline config file.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override the [selection] seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the selection method: filters, forward, or ga.
    #[arg(long)]
    method: Option<String>,
    /// Override both the selection and evaluation fold counts.
    #[arg(long)]
    folds: Option<usize>,
    /// Override the output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: PipelineArgs,
    /// Comma-separated attribute names; defaults to the full set.
    #[arg(long)]
    attrs: Option<String>,
    /// Also print pooled confusion matrices.
    #[arg(long)]
    confusion: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1500)]
    rows: usize,
    /// Attributes carrying class signal.
    #[arg(long, default_value_t = 5)]
    informative: usize,
    /// Label-independent attributes.
    #[arg(long, default_value_t = 25)]
    noise: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Where to write the CSV.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write a ready-to-run config pointing at the CSV.
    #[arg(long, value_name = "FILE")]
    config_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; only real usage mistakes are
            // failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Schema(_) => 3,
                _ => 2,
            })
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Rank(a) => cmd_rank(a),
        Cmd::Select(a) => cmd_select(a),
        Cmd::Evaluate(a) => cmd_evaluate(a),
        Cmd::Synth(a) => cmd_synth(a),
    }
}

fn load_config(a: &PipelineArgs) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(&a.config)?;
    cfg.apply_overrides(&Overrides {
        seed: a.seed,
        method: a.method.clone(),
        folds: a.folds,
        out: a.out.as_ref().map(|p| p.to_string_lossy().into_owned()),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Bold section headers on a terminal; plain text when piped or when
/// NO_COLOR is set.
fn heading(text: &str) -> String {
    if std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none() {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn cmd_run(a: PipelineArgs) -> Result<()> {
    let cfg = load_config(&a)?;
    let out = pipeline::run_pipeline(&cfg)?;
    let files = report::emit_run(&cfg, &out)?;

    let s = &out.summary;
    println!("{}", heading("Data"));
    println!(
        "  {} rows kept of {} read; {} attributes, {} classes",
        s.rows_kept, s.rows_read, s.n_attributes, s.n_classes
    );
    println!("{}", heading("Selection"));
    let names: Vec<&str> = out
        .selection
        .selected
        .iter()
        .map(|&i| out.attributes[i].0.as_str())
        .collect();
    println!(
        "  {} kept {} of {} attributes: {}",
        out.selection.method.name(),
        names.len(),
        out.attributes.len(),
        if names.is_empty() { "none".to_string() } else { names.join(", ") }
    );
    println!("{}", heading("Best configuration"));
    if let Some(best) = out.comparison.rows.iter().find(|r| r.rank == 1) {
        println!(
            "  {} ({} attrs) + {}: accuracy {}, F-measure {}",
            best.subset_name,
            best.subset_size,
            best.algorithm,
            fmt_float(best.accuracy),
            fmt_float(best.weighted_f1)
        );
    }
    println!("{}", heading("Files"));
    for f in files {
        println!("  {}", f.display());
    }
    Ok(())
}

fn cmd_rank(a: PipelineArgs) -> Result<()> {
    let cfg = load_config(&a)?;
    let (d, _) = pipeline::load_and_prepare(&cfg)?;
    let binning = cfg.binning();

    let mut merits: Vec<Vec<f64>> = Vec::new();
    let mut tops: Vec<(String, Vec<String>)> = Vec::new();
    for method in FilterMethod::ALL {
        let ranked = rank_attributes(&d, method, &binning)?;
        let mut col = vec![0.0; d.n_attributes()];
        for e in &ranked.entries {
            col[e.attr] = e.merit;
        }
        let top: Vec<String> = ranked
            .entries
            .iter()
            .take(5)
            .map(|e| d.attributes()[e.attr].name.clone())
            .collect();
        tops.push((method.name().to_string(), top));
        merits.push(col);
    }

    let mut csv = String::from("attribute,group");
    for method in FilterMethod::ALL {
        csv.push(',');
        csv.push_str(method.name());
    }
    csv.push('\n');
    for a in d.present_attributes() {
        let info = &d.attributes()[a];
        let mut fields = vec![info.name.clone(), info.group.name().to_string()];
        fields.extend(merits.iter().map(|col| fmt_float(col[a])));
        csv.push_str(&csv_record(&fields));
        csv.push('\n');
    }
    let dir = Path::new(&cfg.output.dir);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("ranks.csv");
    report::write_atomic(&path, &csv)?;

    println!("{}", heading("Top attributes per method"));
    for (method, top) in tops {
        println!("  {method}: {}", top.join(", "));
    }
    println!("{}", heading("Files"));
    println!("  {}", path.display());
    Ok(())
}

fn cmd_select(a: PipelineArgs) -> Result<()> {
    let cfg = load_config(&a)?;
    let (d, _) = pipeline::load_and_prepare(&cfg)?;
    let sel = pipeline::select_phase(&cfg, &d)?;
    let attributes: Vec<(String, String)> = d
        .attributes()
        .iter()
        .map(|i| (i.name.clone(), i.group.name().to_string()))
        .collect();

    let dir = Path::new(&cfg.output.dir);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![dir.join("selection.csv")];
    report::write_atomic(&files[0], &report::render_selection_csv(&sel, &attributes))?;
    if !sel.traces.is_empty() {
        let path = dir.join("trace.csv");
        report::write_atomic(&path, &report::render_trace_csv(&sel.traces))?;
        files.push(path);
    }

    let names: Vec<&str> = sel.selected.iter().map(|&i| attributes[i].0.as_str()).collect();
    println!("{}", heading("Selection"));
    println!(
        "  {} kept {} of {} attributes: {}",
        sel.method.name(),
        names.len(),
        attributes.len(),
        if names.is_empty() { "none".to_string() } else { names.join(", ") }
    );
    println!("{}", heading("Files"));
    for f in files {
        println!("  {}", f.display());
    }
    Ok(())
}

fn parse_attrs(d: &Dataset, list: &str) -> Result<BTreeSet<usize>> {
    let mut set = BTreeSet::new();
    for name in list.split(',') {
        let name = name.trim();
        let id = d
            .attributes()
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::Invalid(format!("no attribute named {name}")))?;
        set.insert(id);
    }
    Ok(set)
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let cfg = load_config(&a.common)?;
    let (d, _) = pipeline::load_and_prepare(&cfg)?;
    let (label, attrs) = match &a.attrs {
        Some(list) => ("subset", parse_attrs(&d, list)?),
        None => ("full", d.present_attributes().into_iter().collect()),
    };
    let plan = pipeline::evaluation_plan(&cfg, &d)?;
    let table = attrsel_core::compare_subsets(
        &d,
        &[(label.to_string(), attrs.clone())],
        &cfg.evaluation.classifiers,
        &plan,
        cfg.preprocess.fold_safe,
    )?;

    let dir = Path::new(&cfg.output.dir);
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("comparison.csv");
    report::write_atomic(&path, &table.to_csv())?;

    println!("{}", heading("Cross-validated metrics"));
    for r in &table.rows {
        println!(
            "  {}: accuracy {}, precision {}, recall {}, F-measure {}",
            r.algorithm,
            fmt_float(r.accuracy),
            fmt_float(r.weighted_precision),
            fmt_float(r.weighted_recall),
            fmt_float(r.weighted_f1)
        );
    }
    if a.confusion {
        println!("{}", heading("Pooled confusion matrices (rows = truth)"));
        for (name, cm, _) in pipeline::evaluate_subset(&cfg, &d, &attrs)? {
            println!("  {name}:");
            for (i, row) in cm.counts.iter().enumerate() {
                let label = IncomeClass::from_index(i)
                    .map(|c| c.label().to_string())
                    .unwrap_or_else(|| format!("class {i}"));
                let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
                println!("    {label:>8} {}", cells.join(" "));
            }
        }
    }
    println!("{}", heading("Files"));
    println!("  {}", path.display());
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let d = synth_generate(a.rows, a.informative, a.noise, a.classes, a.seed)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    report::write_atomic(&a.out, &d.to_csv_string())?;

    let planted: Vec<&str> = d
        .planted()
        .unwrap_or(&[])
        .iter()
        .map(|&i| d.attributes()[i].name.as_str())
        .collect();
    println!("{}", heading("Planted attributes"));
    println!("  {}", planted.join(", "));

    let mut files = vec![a.out.clone()];
    if let Some(cfg_path) = &a.config_out {
        let mut cfg = PipelineConfig::default();
        cfg.data.path = a.out.to_string_lossy().into_owned();
        for info in d.attributes() {
            cfg.data.columns.push(attrsel_cli::config::ColumnSpec {
                name: info.name.clone(),
                role: attrsel_core::ColumnRole::Numeric,
                group: info.group,
            });
        }
        cfg.data.columns.push(attrsel_cli::config::ColumnSpec {
            name: d.target_name().to_string(),
            role: attrsel_core::ColumnRole::Target,
            group: attrsel_core::AttributeGroup::Family,
        });
        report::write_atomic(cfg_path, &cfg.to_ini())?;
        files.push(cfg_path.clone());
    }
    println!("{}", heading("Files"));
    for f in files {
        println!("  {}", f.display());
    }
    Ok(())
}
