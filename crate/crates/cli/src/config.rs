//! Pipeline configuration: a line-oriented `key = value` file in `[section]`
//! groups, parsed strictly (unknown sections and keys are errors) and
//! serializable back to a canonical form, so parse → serialize → parse is a
//! fixed point.

use std::fmt::Write as _;
use std::path::Path;

use attrsel_core::{
    AttributeGroup, AttributeSchema, ClassifierSpec, ColumnRole, ConsensusConfig,
    ConstantColumnPolicy, Error, ForwardConfig, GaConfig, Result, SchemaColumn,
};
use attrsel_core::filters::{BinningSpec, BinningStrategy};

/// One declared file column: `column.<name> = <role>,<group>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
    pub group: AttributeGroup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSection {
    pub path: String,
    pub columns: Vec<ColumnSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessSection {
    /// Cell values treated as missing; rows containing one are dropped.
    pub missing: Vec<String>,
    pub standardize: bool,
    pub constant_columns: ConstantColumnPolicy,
    /// Restandardize inside each evaluation fold from training rows only.
    pub fold_safe: bool,
    /// Bins for discretizing numeric columns in the filter rankers.
    pub bins: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    Filters,
    Forward,
    Ga,
}

impl SelectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMethod::Filters => "filters",
            SelectionMethod::Forward => "forward",
            SelectionMethod::Ga => "ga",
        }
    }

    pub fn parse(s: &str) -> Result<SelectionMethod> {
        match s.trim().to_ascii_lowercase().as_str() {
            "filters" => Ok(SelectionMethod::Filters),
            "forward" => Ok(SelectionMethod::Forward),
            "ga" => Ok(SelectionMethod::Ga),
            other => Err(Error::Config(format!("unknown selection method: {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSection {
    pub method: SelectionMethod,
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
    pub consensus: ConsensusConfig,
    /// Folds of the wrapper fitness's inner cross-validation.
    pub inner_folds: usize,
    pub forward_min_improvement: f64,
    /// `usize::MAX` means unlimited (spelled `unlimited` in the file).
    pub forward_max_subset_size: usize,
    pub ga_population: usize,
    pub ga_generations: usize,
    pub ga_crossover: f64,
    pub ga_mutation: f64,
    pub ga_tournament: usize,
    pub ga_elitism: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSection {
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
    pub classifiers: Vec<ClassifierSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub dir: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub data: DataSection,
    pub preprocess: PreprocessSection,
    pub selection: SelectionSection,
    pub evaluation: EvaluationSection,
    pub output: OutputSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data: DataSection {
                path: String::new(),
                columns: Vec::new(),
            },
            preprocess: PreprocessSection {
                missing: AttributeSchema::default_missing_tokens()
                    .into_iter()
                    .collect(),
                standardize: true,
                constant_columns: ConstantColumnPolicy::Drop,
                fold_safe: false,
                bins: 10,
            },
            selection: SelectionSection {
                method: SelectionMethod::Filters,
                folds: 10,
                seed: 42,
                stratified: true,
                consensus: ConsensusConfig::default(),
                inner_folds: 5,
                forward_min_improvement: 1e-6,
                forward_max_subset_size: usize::MAX,
                ga_population: GaConfig::default().population_size,
                ga_generations: GaConfig::default().generations,
                ga_crossover: GaConfig::default().crossover_rate,
                ga_mutation: GaConfig::default().mutation_rate,
                ga_tournament: GaConfig::default().tournament_size,
                ga_elitism: GaConfig::default().elitism,
            },
            evaluation: EvaluationSection {
                folds: 10,
                seed: 43,
                stratified: true,
                classifiers: ClassifierSpec::default_panel(),
            },
            output: OutputSection { dir: "out".into() },
        }
    }
}

/// Command-line values that take precedence over config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub folds: Option<usize>,
    pub out: Option<String>,
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config(format!("{key} must be true or false, got {other}"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = {v}")))
}

fn fmt_subset_size(n: usize) -> String {
    if n == usize::MAX {
        "unlimited".to_string()
    } else {
        n.to_string()
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Parse config text over the defaults. Every key is optional; unknown
    /// sections or keys fail instead of being silently dropped.
    pub fn parse_str(text: &str) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                if !matches!(
                    section.as_str(),
                    "data" | "preprocess" | "selection" | "evaluation" | "output"
                ) {
                    return Err(Error::Config(format!(
                        "line {}: unknown section [{section}]",
                        lineno + 1
                    )));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply_key(&section, key, value).map_err(|e| {
                Error::Config(format!("line {}: {e}", lineno + 1))
            })?;
        }
        Ok(cfg)
    }

    fn apply_key(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        match section {
            "data" => match key {
                "path" => self.data.path = value.to_string(),
                _ => {
                    if let Some(col) = key.strip_prefix("column.") {
                        let (role, group) = value.split_once(',').ok_or_else(|| {
                            Error::Config(format!("column.{col} needs <role>,<group>"))
                        })?;
                        self.data.columns.push(ColumnSpec {
                            name: col.to_string(),
                            role: ColumnRole::parse(role)?,
                            group: AttributeGroup::parse(group)?,
                        });
                    } else {
                        return Err(Error::Config(format!("unknown key {key} in [data]")));
                    }
                }
            },
            "preprocess" => match key {
                "missing" => {
                    let mut tokens: Vec<String> =
                        value.split(',').map(str::to_string).collect();
                    tokens.sort();
                    tokens.dedup();
                    self.preprocess.missing = tokens;
                }
                "standardize" => self.preprocess.standardize = parse_bool(key, value)?,
                "constant_columns" => {
                    self.preprocess.constant_columns = match value {
                        "drop" => ConstantColumnPolicy::Drop,
                        "reject" => ConstantColumnPolicy::Reject,
                        other => {
                            return Err(Error::Config(format!(
                                "constant_columns must be drop or reject, got {other}"
                            )))
                        }
                    }
                }
                "fold_safe" => self.preprocess.fold_safe = parse_bool(key, value)?,
                "bins" => self.preprocess.bins = parse_num(key, value)?,
                _ => return Err(Error::Config(format!("unknown key {key} in [preprocess]"))),
            },
            "selection" => match key {
                "method" => self.selection.method = SelectionMethod::parse(value)?,
                "folds" => self.selection.folds = parse_num(key, value)?,
                "seed" => self.selection.seed = parse_num(key, value)?,
                "stratified" => self.selection.stratified = parse_bool(key, value)?,
                "fold_threshold" => self.selection.consensus.fold_threshold = parse_num(key, value)?,
                "method_threshold" => {
                    self.selection.consensus.method_threshold = parse_num(key, value)?
                }
                "filter_top_k" => self.selection.consensus.filter_top_k = parse_num(key, value)?,
                "inner_folds" => self.selection.inner_folds = parse_num(key, value)?,
                "forward.min_improvement" => {
                    self.selection.forward_min_improvement = parse_num(key, value)?
                }
                "forward.max_subset_size" => {
                    self.selection.forward_max_subset_size = if value == "unlimited" {
                        usize::MAX
                    } else {
                        parse_num(key, value)?
                    }
                }
                "ga.population" => self.selection.ga_population = parse_num(key, value)?,
                "ga.generations" => self.selection.ga_generations = parse_num(key, value)?,
                "ga.crossover" => self.selection.ga_crossover = parse_num(key, value)?,
                "ga.mutation" => self.selection.ga_mutation = parse_num(key, value)?,
                "ga.tournament" => self.selection.ga_tournament = parse_num(key, value)?,
                "ga.elitism" => self.selection.ga_elitism = parse_num(key, value)?,
                _ => return Err(Error::Config(format!("unknown key {key} in [selection]"))),
            },
            "evaluation" => match key {
                "folds" => self.evaluation.folds = parse_num(key, value)?,
                "seed" => self.evaluation.seed = parse_num(key, value)?,
                "stratified" => self.evaluation.stratified = parse_bool(key, value)?,
                "classifiers" => {
                    let specs: Result<Vec<ClassifierSpec>> =
                        value.split(',').map(ClassifierSpec::parse).collect();
                    self.evaluation.classifiers = specs?;
                }
                _ => return Err(Error::Config(format!("unknown key {key} in [evaluation]"))),
            },
            "output" => match key {
                "dir" => self.output.dir = value.to_string(),
                _ => return Err(Error::Config(format!("unknown key {key} in [output]"))),
            },
            "" => return Err(Error::Config(format!("key {key} appears before any [section]"))),
            _ => unreachable!("section names validated at the header line"),
        }
        Ok(())
    }

    /// Canonical serialization: fixed section and key order, every effective
    /// value written out. Floats use the shortest round-tripping decimal form.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[data]");
        let _ = writeln!(s, "path = {}", self.data.path);
        for c in &self.data.columns {
            let _ = writeln!(s, "column.{} = {},{}", c.name, c.role.name(), c.group.name());
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[preprocess]");
        let _ = writeln!(s, "missing = {}", self.preprocess.missing.join(","));
        let _ = writeln!(s, "standardize = {}", self.preprocess.standardize);
        let _ = writeln!(
            s,
            "constant_columns = {}",
            match self.preprocess.constant_columns {
                ConstantColumnPolicy::Drop => "drop",
                ConstantColumnPolicy::Reject => "reject",
            }
        );
        let _ = writeln!(s, "fold_safe = {}", self.preprocess.fold_safe);
        let _ = writeln!(s, "bins = {}", self.preprocess.bins);
        let _ = writeln!(s);
        let _ = writeln!(s, "[selection]");
        let sel = &self.selection;
        let _ = writeln!(s, "method = {}", sel.method.name());
        let _ = writeln!(s, "folds = {}", sel.folds);
        let _ = writeln!(s, "seed = {}", sel.seed);
        let _ = writeln!(s, "stratified = {}", sel.stratified);
        let _ = writeln!(s, "fold_threshold = {}", sel.consensus.fold_threshold);
        let _ = writeln!(s, "method_threshold = {}", sel.consensus.method_threshold);
        let _ = writeln!(s, "filter_top_k = {}", sel.consensus.filter_top_k);
        let _ = writeln!(s, "inner_folds = {}", sel.inner_folds);
        let _ = writeln!(s, "forward.min_improvement = {}", sel.forward_min_improvement);
        let _ = writeln!(
            s,
            "forward.max_subset_size = {}",
            fmt_subset_size(sel.forward_max_subset_size)
        );
        let _ = writeln!(s, "ga.population = {}", sel.ga_population);
        let _ = writeln!(s, "ga.generations = {}", sel.ga_generations);
        let _ = writeln!(s, "ga.crossover = {}", sel.ga_crossover);
        let _ = writeln!(s, "ga.mutation = {}", sel.ga_mutation);
        let _ = writeln!(s, "ga.tournament = {}", sel.ga_tournament);
        let _ = writeln!(s, "ga.elitism = {}", sel.ga_elitism);
        let _ = writeln!(s);
        let _ = writeln!(s, "[evaluation]");
        let ev = &self.evaluation;
        let _ = writeln!(s, "folds = {}", ev.folds);
        let _ = writeln!(s, "seed = {}", ev.seed);
        let _ = writeln!(s, "stratified = {}", ev.stratified);
        let names: Vec<String> = ev.classifiers.iter().map(|c| c.name()).collect();
        let _ = writeln!(s, "classifiers = {}", names.join(","));
        let _ = writeln!(s);
        let _ = writeln!(s, "[output]");
        let _ = writeln!(s, "dir = {}", self.output.dir);
        s
    }

    pub fn apply_overrides(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.selection.seed = seed;
        }
        if let Some(method) = &o.method {
            self.selection.method = SelectionMethod::parse(method)?;
        }
        if let Some(folds) = o.folds {
            self.selection.folds = folds;
            self.evaluation.folds = folds;
        }
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        Ok(())
    }

    /// Range checks that don't need the data. Column existence is checked
    /// against the file at ingestion.
    pub fn validate(&self) -> Result<()> {
        if self.data.path.is_empty() {
            return Err(Error::Config("[data] path is required".into()));
        }
        self.schema().validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.preprocess.bins < 2 {
            return Err(Error::Config("bins must be at least 2".into()));
        }
        if self.selection.folds < 2 {
            return Err(Error::Config("selection folds must be at least 2".into()));
        }
        if self.evaluation.folds < 2 {
            return Err(Error::Config("evaluation folds must be at least 2".into()));
        }
        if self.evaluation.classifiers.is_empty() {
            return Err(Error::Config("evaluation needs at least one classifier".into()));
        }
        self.selection.consensus.validate()?;
        if self.selection.inner_folds < 2 {
            return Err(Error::Config("inner_folds must be at least 2".into()));
        }
        if !self.selection.forward_min_improvement.is_finite()
            && self.selection.forward_min_improvement != f64::INFINITY
        {
            return Err(Error::Config("forward.min_improvement must not be NaN".into()));
        }
        if self.selection.ga_population < 2 {
            return Err(Error::Config("ga.population must be at least 2".into()));
        }
        if self.selection.ga_generations < 1 {
            return Err(Error::Config("ga.generations must be at least 1".into()));
        }
        for (key, rate) in [
            ("ga.crossover", self.selection.ga_crossover),
            ("ga.mutation", self.selection.ga_mutation),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{key} must be in [0, 1], got {rate}")));
            }
        }
        if self.selection.ga_tournament < 1 {
            return Err(Error::Config("ga.tournament must be at least 1".into()));
        }
        for spec in &self.evaluation.classifiers {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn schema(&self) -> AttributeSchema {
        AttributeSchema {
            columns: self
                .data
                .columns
                .iter()
                .map(|c| SchemaColumn {
                    name: c.name.clone(),
                    role: c.role,
                    group: c.group,
                })
                .collect(),
            missing_tokens: self.preprocess.missing.iter().cloned().collect(),
        }
    }

    pub fn binning(&self) -> BinningSpec {
        BinningSpec {
            n_bins: self.preprocess.bins,
            strategy: BinningStrategy::EqualFrequency,
        }
    }

    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            population_size: self.selection.ga_population,
            crossover_rate: self.selection.ga_crossover,
            mutation_rate: self.selection.ga_mutation,
            generations: self.selection.ga_generations,
            tournament_size: self.selection.ga_tournament,
            elitism: self.selection.ga_elitism,
            seed: self.selection.seed,
        }
    }

    pub fn forward_config(&self) -> ForwardConfig {
        ForwardConfig {
            min_improvement: self.selection.forward_min_improvement,
            max_subset_size: self.selection.forward_max_subset_size,
            inner_folds: self.selection.inner_folds,
            seed: self.selection.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# scorecard run
[data]
path = data/cohort.csv
column.UNITID = ignored,school
column.SAT_AVG = numeric,admissions
column.CONTROL = nominal,school
column.MD_EARN_WNE_P10 = target,family

[selection]
method = ga
seed = 7
ga.population = 100
ga.generations = 30

[output]
dir = results
";

    #[test]
    fn parse_fills_defaults_and_reads_overridden_keys() {
        let cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        assert_eq!(cfg.data.path, "data/cohort.csv");
        assert_eq!(cfg.data.columns.len(), 4);
        assert_eq!(cfg.data.columns[1].role, ColumnRole::Numeric);
        assert_eq!(cfg.selection.method, SelectionMethod::Ga);
        assert_eq!(cfg.selection.seed, 7);
        assert_eq!(cfg.selection.ga_population, 100);
        // Untouched keys keep their defaults.
        assert_eq!(cfg.selection.folds, 10);
        assert_eq!(cfg.selection.consensus.fold_threshold, 0.6);
        assert_eq!(cfg.evaluation.classifiers.len(), 5);
        assert_eq!(cfg.output.dir, "results");
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn parse_serialize_parse_is_identity() {
        let cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        let once = cfg.to_ini();
        let cfg2 = PipelineConfig::parse_str(&once).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(once, cfg2.to_ini());
    }

    #[test]
    fn unknown_keys_and_sections_fail() {
        assert!(PipelineConfig::parse_str("[selection]\npopulation = 5\n").is_err());
        assert!(PipelineConfig::parse_str("[mystery]\nx = 1\n").is_err());
        assert!(PipelineConfig::parse_str("[selection]\nmethod = annealing\n").is_err());
        assert!(PipelineConfig::parse_str("stray = 1\n").is_err());
        assert!(PipelineConfig::parse_str("[selection]\nno equals sign\n").is_err());
    }

    #[test]
    fn validation_rejects_out_of_range_parameters() {
        let mut cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        cfg.selection.ga_mutation = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        cfg.selection.folds = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        cfg.data.columns.retain(|c| c.role != ColumnRole::Target);
        assert!(cfg.validate().is_err());
        let mut cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        cfg.preprocess.bins = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        cfg.apply_overrides(&Overrides {
            seed: Some(99),
            method: Some("forward".into()),
            folds: Some(5),
            out: Some("elsewhere".into()),
        })
        .unwrap();
        assert_eq!(cfg.selection.seed, 99);
        assert_eq!(cfg.selection.method, SelectionMethod::Forward);
        assert_eq!(cfg.selection.folds, 5);
        assert_eq!(cfg.evaluation.folds, 5);
        assert_eq!(cfg.output.dir, "elsewhere");
        assert!(PipelineConfig::default()
            .apply_overrides(&Overrides {
                method: Some("annealing".into()),
                ..Overrides::default()
            })
            .is_err());
    }

    #[test]
    fn infinite_min_improvement_round_trips() {
        let mut cfg = PipelineConfig::parse_str(SAMPLE).unwrap();
        cfg.selection.forward_min_improvement = f64::INFINITY;
        let text = cfg.to_ini();
        assert!(text.contains("forward.min_improvement = inf"));
        let back = PipelineConfig::parse_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
