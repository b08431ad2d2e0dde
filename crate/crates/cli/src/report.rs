//! Deterministic report emission. Identical results must serialize to
//! identical bytes, so everything here uses fixed key order, one float
//! format (six significant digits for metrics, shortest round-trip form for
//! config echoes), and no timestamps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use attrsel_core::table::{csv_record, fmt_float};
use attrsel_core::{Error, Result, SearchTrace};

use crate::config::{PipelineConfig, SelectionMethod};
use crate::pipeline::{PipelineOutcome, SelectionPhase};

pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn jstr(s: &str) -> String {
    format!("\"{}\"", json_escape(s))
}

/// Config floats echo in their shortest round-tripping decimal form;
/// infinities become strings since JSON has no spelling for them.
fn jnum(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        jstr(&format!("{x}"))
    }
}

/// The vote table as CSV: votes descending, then average rank, then id.
/// Filter-panel votes are method counts; wrapper votes are round fractions.
pub fn render_selection_csv(sel: &SelectionPhase, attributes: &[(String, String)]) -> String {
    let tally = &sel.tally;
    let counts = sel.method == SelectionMethod::Filters;
    let mut s = String::from("attribute,group,votes,average_rank,selected\n");
    for a in vote_order(sel) {
        let (name, group) = &attributes[a];
        let votes = if counts {
            format!("{}", tally.votes[a] as usize)
        } else {
            fmt_float(tally.votes[a])
        };
        let rank = tally
            .average_rank
            .as_ref()
            .and_then(|r| r[a])
            .map(fmt_float)
            .unwrap_or_default();
        s.push_str(&csv_record(&[
            name.clone(),
            group.clone(),
            votes,
            rank,
            if sel.selected.contains(&a) { "yes" } else { "no" }.to_string(),
        ]));
        s.push('\n');
    }
    s
}

pub fn vote_order(sel: &SelectionPhase) -> Vec<usize> {
    let tally = &sel.tally;
    let rank_of = |a: usize| {
        tally
            .average_rank
            .as_ref()
            .and_then(|r| r[a])
            .unwrap_or(f64::INFINITY)
    };
    let mut order: Vec<usize> = (0..tally.votes.len()).collect();
    order.sort_by(|&a, &b| {
        tally.votes[b]
            .total_cmp(&tally.votes[a])
            .then(rank_of(a).total_cmp(&rank_of(b)))
            .then(a.cmp(&b))
    });
    order
}

/// Per-round search traces, concatenated with a leading round column.
pub fn render_trace_csv(traces: &[SearchTrace]) -> String {
    let mut s = String::from("round,step,subset_size,best_fitness,mean_fitness,best_bits\n");
    for (round, t) in traces.iter().enumerate() {
        for r in &t.records {
            let size = r.best_bits.iter().filter(|&&b| b).count();
            let bits: String = r
                .best_bits
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            s.push_str(&csv_record(&[
                round.to_string(),
                r.step.to_string(),
                size.to_string(),
                fmt_float(r.best_fitness),
                fmt_float(r.mean_fitness),
                bits,
            ]));
            s.push('\n');
        }
    }
    s
}

fn ids_json(ids: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<String> = ids.into_iter().map(|i| i.to_string()).collect();
    format!("[{}]", v.join(", "))
}

fn config_json(cfg: &PipelineConfig, indent: &str) -> String {
    let mut s = String::new();
    let p = &cfg.preprocess;
    let sel = &cfg.selection;
    let ev = &cfg.evaluation;
    let cols: Vec<String> = cfg
        .data
        .columns
        .iter()
        .map(|c| {
            format!(
                "{{\"name\": {}, \"role\": {}, \"group\": {}}}",
                jstr(&c.name),
                jstr(c.role.name()),
                jstr(c.group.name())
            )
        })
        .collect();
    let missing: Vec<String> = p.missing.iter().map(|m| jstr(m)).collect();
    let classifiers: Vec<String> = ev.classifiers.iter().map(|c| jstr(&c.name())).collect();
    let _ = write!(
        s,
        "{{\n\
         {i}  \"data\": {{\"path\": {path}, \"columns\": [{cols}]}},\n\
         {i}  \"preprocess\": {{\"missing\": [{missing}], \"standardize\": {std}, \
         \"constant_columns\": {cc}, \"fold_safe\": {fs}, \"bins\": {bins}}},\n\
         {i}  \"selection\": {{\"method\": {method}, \"folds\": {folds}, \"seed\": {seed}, \
         \"stratified\": {strat}, \"fold_threshold\": {ft}, \"method_threshold\": {mt}, \
         \"filter_top_k\": {topk}, \"inner_folds\": {inner}, \
         \"forward_min_improvement\": {fmi}, \"forward_max_subset_size\": {fmax}, \
         \"ga_population\": {gp}, \"ga_generations\": {gg}, \"ga_crossover\": {gc}, \
         \"ga_mutation\": {gm}, \"ga_tournament\": {gt}, \"ga_elitism\": {ge}}},\n\
         {i}  \"evaluation\": {{\"folds\": {ef}, \"seed\": {es}, \"stratified\": {est}, \
         \"classifiers\": [{classifiers}]}},\n\
         {i}  \"output\": {{\"dir\": {dir}}}\n\
         {i}}}",
        i = indent,
        path = jstr(&cfg.data.path),
        cols = cols.join(", "),
        missing = missing.join(", "),
        std = p.standardize,
        cc = jstr(match p.constant_columns {
            attrsel_core::ConstantColumnPolicy::Drop => "drop",
            attrsel_core::ConstantColumnPolicy::Reject => "reject",
        }),
        fs = p.fold_safe,
        bins = p.bins,
        method = jstr(sel.method.name()),
        folds = sel.folds,
        seed = sel.seed,
        strat = sel.stratified,
        ft = jnum(sel.consensus.fold_threshold),
        mt = sel.consensus.method_threshold,
        topk = sel.consensus.filter_top_k,
        inner = sel.inner_folds,
        fmi = jnum(sel.forward_min_improvement),
        fmax = if sel.forward_max_subset_size == usize::MAX {
            jstr("unlimited")
        } else {
            sel.forward_max_subset_size.to_string()
        },
        gp = sel.ga_population,
        gg = sel.ga_generations,
        gc = jnum(sel.ga_crossover),
        gm = jnum(sel.ga_mutation),
        gt = sel.ga_tournament,
        ge = sel.ga_elitism,
        ef = ev.folds,
        es = ev.seed,
        est = ev.stratified,
        classifiers = classifiers.join(", "),
        dir = jstr(&cfg.output.dir),
    );
    s
}

/// The complete machine-readable report: effective config, data footprint,
/// votes, per-round picks, and every comparison row.
pub fn render_report_json(cfg: &PipelineConfig, out: &PipelineOutcome) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"config\": {},", config_json(cfg, "  "));

    let d = &out.summary;
    let counts: Vec<String> = d.class_counts.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(
        s,
        "  \"data\": {{\"rows_read\": {}, \"rows_kept\": {}, \"rows_dropped\": {}, \
         \"attributes\": {}, \"classes\": {}, \"class_counts\": [{}]}},",
        d.rows_read,
        d.rows_kept,
        d.rows_dropped,
        d.n_attributes,
        d.n_classes,
        counts.join(", ")
    );

    let sel = &out.selection;
    let _ = writeln!(s, "  \"selection\": {{");
    let _ = writeln!(s, "    \"method\": {},", jstr(sel.method.name()));
    let _ = writeln!(s, "    \"folds\": {},", sel.folds);
    let _ = writeln!(s, "    \"seed\": {},", sel.seed);
    let names: Vec<String> = sel
        .selected
        .iter()
        .map(|&a| jstr(&out.attributes[a].0))
        .collect();
    let _ = writeln!(s, "    \"selected_ids\": {},", ids_json(sel.selected.iter().copied()));
    let _ = writeln!(s, "    \"selected\": [{}],", names.join(", "));
    let _ = writeln!(s, "    \"votes\": [");
    for (a, (name, group)) in out.attributes.iter().enumerate() {
        let rank = sel
            .tally
            .average_rank
            .as_ref()
            .and_then(|r| r[a])
            .map(fmt_float)
            .unwrap_or_else(|| "null".to_string());
        let _ = writeln!(
            s,
            "      {{\"id\": {a}, \"attribute\": {}, \"group\": {}, \"votes\": {}, \
             \"average_rank\": {rank}, \"selected\": {}}}{}",
            jstr(name),
            jstr(group),
            fmt_float(sel.tally.votes[a]),
            sel.selected.contains(&a),
            if a + 1 < out.attributes.len() { "," } else { "" }
        );
    }
    let _ = writeln!(s, "    ],");
    let rounds: Vec<String> = sel
        .rounds
        .iter()
        .map(|r| ids_json(r.iter().copied()))
        .collect();
    let _ = writeln!(s, "    \"rounds\": [{}],", rounds.join(", "));
    let methods: Vec<String> = sel
        .panel
        .as_ref()
        .map(|p| {
            p.methods
                .iter()
                .map(|m| {
                    let ids = m
                        .voted
                        .iter()
                        .enumerate()
                        .filter_map(|(i, &v)| v.then_some(i));
                    format!(
                        "{{\"method\": {}, \"voted_ids\": {}}}",
                        jstr(&m.method),
                        ids_json(ids)
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    let _ = writeln!(s, "    \"methods\": [{}]", methods.join(", "));
    let _ = writeln!(s, "  }},");

    let _ = writeln!(s, "  \"evaluation\": {{");
    let _ = writeln!(s, "    \"folds\": {},", cfg.evaluation.folds);
    let _ = writeln!(s, "    \"seed\": {},", cfg.evaluation.seed);
    let _ = writeln!(s, "    \"rows\": [");
    let n_rows = out.comparison.rows.len();
    for (i, r) in out.comparison.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "      {{\"subset\": {}, \"size\": {}, \"algorithm\": {}, \"accuracy\": {}, \
             \"weighted_precision\": {}, \"weighted_recall\": {}, \"weighted_f1\": {}, \
             \"rank\": {}}}{}",
            jstr(&r.subset_name),
            r.subset_size,
            jstr(&r.algorithm),
            fmt_float(r.accuracy),
            fmt_float(r.weighted_precision),
            fmt_float(r.weighted_recall),
            fmt_float(r.weighted_f1),
            r.rank,
            if i + 1 < n_rows { "," } else { "" }
        );
    }
    let _ = writeln!(s, "    ]");
    let _ = writeln!(s, "  }}");
    s.push_str("}\n");
    s
}

/// Human-readable summary mirroring the shapes of the selection vote table
/// and the subset-comparison table.
pub fn render_report_md(cfg: &PipelineConfig, out: &PipelineOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Attribute selection report");
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "Method: `{}` over {} rounds (seed {}).",
        out.selection.method.name(),
        out.selection.folds,
        out.selection.seed
    );
    let _ = writeln!(s);
    let d = &out.summary;
    let _ = writeln!(s, "## Data");
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "- rows: {} kept of {} read ({} dropped for missing values)",
        d.rows_kept, d.rows_read, d.rows_dropped
    );
    let _ = writeln!(s, "- attributes: {}", d.n_attributes);
    let counts: Vec<String> = d.class_counts.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "- class counts: {}", counts.join(" / "));
    let _ = writeln!(s);

    let _ = writeln!(s, "## Selection votes");
    let _ = writeln!(s);
    let ranked = out.selection.tally.average_rank.is_some();
    let counts = out.selection.method == SelectionMethod::Filters;
    if ranked {
        let _ = writeln!(s, "| Attribute | Votes | Average Rank |");
        let _ = writeln!(s, "|---|---|---|");
    } else {
        let _ = writeln!(s, "| Attribute | Votes |");
        let _ = writeln!(s, "|---|---|");
    }
    for a in vote_order(&out.selection) {
        let votes = if counts {
            format!("{}", out.selection.tally.votes[a] as usize)
        } else {
            fmt_float(out.selection.tally.votes[a])
        };
        if ranked {
            let rank = out
                .selection
                .tally
                .average_rank
                .as_ref()
                .and_then(|r| r[a])
                .map(fmt_float)
                .unwrap_or_default();
            let _ = writeln!(s, "| {} | {} | {} |", out.attributes[a].0, votes, rank);
        } else {
            let _ = writeln!(s, "| {} | {} |", out.attributes[a].0, votes);
        }
    }
    let _ = writeln!(s);
    let names: Vec<&str> = out
        .selection
        .selected
        .iter()
        .map(|&a| out.attributes[a].0.as_str())
        .collect();
    let _ = writeln!(
        s,
        "Selected ({} of {}): {}",
        names.len(),
        out.attributes.len(),
        if names.is_empty() { "none".to_string() } else { names.join(", ") }
    );
    let _ = writeln!(s);

    let _ = writeln!(
        s,
        "## Classification ({}-fold cross-validation, seed {})",
        cfg.evaluation.folds, cfg.evaluation.seed
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "| Subset | N | Algorithm | Accuracy | Precision | Recall | F-measure |"
    );
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    let mut rows: Vec<_> = out.comparison.rows.iter().collect();
    rows.sort_by_key(|r| r.rank);
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            r.subset_name,
            r.subset_size,
            r.algorithm,
            fmt_float(r.accuracy),
            fmt_float(r.weighted_precision),
            fmt_float(r.weighted_recall),
            fmt_float(r.weighted_f1)
        );
    }
    s
}

/// Write via a temp file in the same directory plus a rename, so a crash
/// never leaves a half-written report behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Render everything first, then write; an error before the first write
/// leaves the output directory untouched.
pub fn emit_run(cfg: &PipelineConfig, out: &PipelineOutcome) -> Result<Vec<PathBuf>> {
    if out.comparison.rows.is_empty() {
        return Err(Error::Invalid("no evaluation results to report".into()));
    }
    if out.attributes.is_empty() {
        return Err(Error::Invalid("no attributes to report".into()));
    }
    let dir = Path::new(&cfg.output.dir);
    let mut files: Vec<(PathBuf, String)> = vec![
        (
            dir.join("selection.csv"),
            render_selection_csv(&out.selection, &out.attributes),
        ),
        (dir.join("comparison.csv"), out.comparison.to_csv()),
        (dir.join("report.json"), render_report_json(cfg, out)),
        (dir.join("report.md"), render_report_md(cfg, out)),
    ];
    if !out.selection.traces.is_empty() {
        files.push((dir.join("trace.csv"), render_trace_csv(&out.selection.traces)));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (path, contents) in files {
        write_atomic(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}
