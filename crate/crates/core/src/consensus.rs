//! Consensus selection: run a selector once per round on the rows outside
//! each fold, tally how often every attribute was chosen, and keep the
//! attributes clearing the vote thresholds. The filter panel layers a second
//! vote across the five ranking methods.

use std::collections::BTreeSet;

use crate::dataset::{Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::filters::{rank_attributes, BinningSpec, FilterMethod, RankedList};
use crate::search::{forward_select, ga_select, ForwardConfig, GaConfig, SearchTrace};
use crate::seed::derive2;
use crate::table::{csv_record, fmt_float};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusConfig {
    /// Fraction of rounds that must pick an attribute before it counts.
    pub fold_threshold: f64,
    /// Methods (of the five rankers) that must agree in the filter panel.
    pub method_threshold: usize,
    /// How many top-ranked attributes a ranker "selects" each round.
    pub filter_top_k: usize,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        ConsensusConfig {
            fold_threshold: 0.6,
            method_threshold: 3,
            filter_top_k: 15,
        }
    }
}

impl ConsensusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fold_threshold > 0.0 && self.fold_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "fold_threshold must be in (0, 1], got {}",
                self.fold_threshold
            )));
        }
        if self.method_threshold < 1 || self.method_threshold > FilterMethod::ALL.len() {
            return Err(Error::Config(format!(
                "method_threshold must be between 1 and {}, got {}",
                FilterMethod::ALL.len(),
                self.method_threshold
            )));
        }
        if self.filter_top_k < 1 {
            return Err(Error::Config("filter_top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// What one round of selection produced.
#[derive(Debug, Clone)]
pub struct RoundSelection {
    pub selected: BTreeSet<usize>,
    /// Full ranking, for filter selectors.
    pub ranked: Option<RankedList>,
    /// Search history, for wrapper selectors.
    pub trace: Option<SearchTrace>,
}

/// A selection strategy that can run on one round's rows.
pub trait RoundSelector {
    fn name(&self) -> String;
    fn select_round(&self, d: &Dataset, round: usize) -> Result<RoundSelection>;
}

/// All rounds of one selector over one fold plan.
#[derive(Debug, Clone)]
pub struct SelectionRun {
    pub selector: String,
    pub k: usize,
    pub n_attributes: usize,
    pub rounds: Vec<RoundSelection>,
}

/// Run `selector` once per round; round `r` sees every row except fold `r`.
pub fn per_fold_select(
    d: &Dataset,
    selector: &dyn RoundSelector,
    plan: &FoldPlan,
) -> Result<SelectionRun> {
    if plan.n_rows() != d.n_rows() {
        return Err(Error::Invalid(format!(
            "fold plan covers {} rows, dataset has {}",
            plan.n_rows(),
            d.n_rows()
        )));
    }
    let mut rounds = Vec::with_capacity(plan.k);
    for r in 0..plan.k {
        let rows = plan.train_indices(r);
        if rows.is_empty() {
            return Err(Error::Invalid(format!("round {r} has no rows")));
        }
        let view = d.select_rows(&rows);
        let sel = selector
            .select_round(&view, r)
            .map_err(|e| Error::Invalid(format!("round {r} ({}): {e}", selector.name())))?;
        rounds.push(sel);
    }
    Ok(SelectionRun {
        selector: selector.name(),
        k: plan.k,
        n_attributes: d.n_attributes(),
        rounds,
    })
}

/// Vote totals per attribute id.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteTally {
    /// Rounds behind a selector tally; methods behind a panel tally.
    pub n_voters: usize,
    /// Selector tallies hold the fraction of rounds that picked the
    /// attribute; panel tallies hold the method count.
    pub votes: Vec<f64>,
    /// Mean rank per attribute (filter tallies only): averaged over rounds
    /// here, and over voting methods in a panel.
    pub average_rank: Option<Vec<Option<f64>>>,
}

/// Per attribute: fraction of rounds whose selected set contains it, plus
/// the fold-averaged rank when the selector ranked attributes.
pub fn tally_votes(run: &SelectionRun) -> VoteTally {
    let n = run.n_attributes;
    let k = run.rounds.len();
    let mut votes = vec![0.0; n];
    for round in &run.rounds {
        for &a in &round.selected {
            if a < n {
                votes[a] += 1.0;
            }
        }
    }
    for v in votes.iter_mut() {
        *v /= k as f64;
    }

    let all_ranked = !run.rounds.is_empty() && run.rounds.iter().all(|r| r.ranked.is_some());
    let average_rank = all_ranked.then(|| {
        let mut mean = vec![None; n];
        for (a, m) in mean.iter_mut().enumerate() {
            let mut sum = 0.0;
            let mut cnt = 0usize;
            for round in &run.rounds {
                if let Some(rank) = round.ranked.as_ref().unwrap().rank_of(a) {
                    sum += rank as f64;
                    cnt += 1;
                }
            }
            if cnt == k {
                *m = Some(sum / cnt as f64);
            }
        }
        mean
    });

    VoteTally {
        n_voters: k,
        votes,
        average_rank,
    }
}

/// Attribute ids whose votes reach `threshold`, inclusive.
pub fn consensus_subset(tally: &VoteTally, threshold: f64) -> BTreeSet<usize> {
    tally
        .votes
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= threshold)
        .map(|(a, _)| a)
        .collect()
}

/// One ranking method's verdict inside the filter panel.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodVote {
    pub method: String,
    /// Whether the method's per-round picks reached the fold threshold.
    pub voted: Vec<bool>,
    /// Fold-averaged rank per attribute under this method.
    pub fold_average_rank: Vec<Option<f64>>,
}

/// Combine per-method verdicts: an attribute survives with at least
/// `method_threshold` method votes, and its reported rank averages only the
/// ranks of the methods that voted for it.
pub fn aggregate_panel(
    methods: &[MethodVote],
    method_threshold: usize,
) -> Result<(BTreeSet<usize>, VoteTally)> {
    let n = methods
        .first()
        .map(|m| m.voted.len())
        .ok_or_else(|| Error::Invalid("panel needs at least one method".into()))?;
    for m in methods {
        if m.voted.len() != n || m.fold_average_rank.len() != n {
            return Err(Error::Invalid(format!(
                "method {} sized for a different attribute count",
                m.method
            )));
        }
    }
    let mut votes = vec![0.0; n];
    let mut average_rank = vec![None; n];
    for a in 0..n {
        let mut count = 0usize;
        let mut rank_sum = 0.0;
        let mut rank_cnt = 0usize;
        for m in methods {
            if m.voted[a] {
                count += 1;
                if let Some(r) = m.fold_average_rank[a] {
                    rank_sum += r;
                    rank_cnt += 1;
                }
            }
        }
        votes[a] = count as f64;
        if rank_cnt > 0 {
            average_rank[a] = Some(rank_sum / rank_cnt as f64);
        }
    }
    let tally = VoteTally {
        n_voters: methods.len(),
        votes,
        average_rank: Some(average_rank),
    };
    let selected = consensus_subset(&tally, method_threshold as f64);
    Ok((selected, tally))
}

/// The filter panel's full outcome.
#[derive(Debug, Clone)]
pub struct PanelOutcome {
    pub selected: BTreeSet<usize>,
    pub tally: VoteTally,
    pub methods: Vec<MethodVote>,
}

impl PanelOutcome {
    /// Rows: attribute, method votes, average rank — selected attributes
    /// first by vote count descending, then rank ascending.
    pub fn to_csv(&self, d: &Dataset) -> String {
        let mut out = String::from("attribute,group,votes,average_rank,selected\n");
        let mut order: Vec<usize> = (0..self.tally.votes.len()).collect();
        order.sort_by(|&a, &b| {
            self.tally.votes[b]
                .total_cmp(&self.tally.votes[a])
                .then_with(|| {
                    let ra = rank_or_inf(&self.tally, a);
                    let rb = rank_or_inf(&self.tally, b);
                    ra.total_cmp(&rb)
                })
                .then(a.cmp(&b))
        });
        for a in order {
            let info = &d.attributes()[a];
            let rank = match self.tally.average_rank.as_ref().and_then(|r| r[a]) {
                Some(r) => fmt_float(r),
                None => String::new(),
            };
            out.push_str(&csv_record(&[
                info.name.clone(),
                info.group.name().to_string(),
                format!("{}", self.tally.votes[a] as usize),
                rank,
                if self.selected.contains(&a) { "yes" } else { "no" }.to_string(),
            ]));
            out.push('\n');
        }
        out
    }
}

fn rank_or_inf(tally: &VoteTally, a: usize) -> f64 {
    tally
        .average_rank
        .as_ref()
        .and_then(|r| r[a])
        .unwrap_or(f64::INFINITY)
}

/// Ranks a round's attributes with one filter method and selects the top k.
#[derive(Debug, Clone)]
pub struct FilterSelector {
    pub method: FilterMethod,
    pub binning: BinningSpec,
    pub top_k: usize,
}

impl RoundSelector for FilterSelector {
    fn name(&self) -> String {
        self.method.name().to_string()
    }

    fn select_round(&self, d: &Dataset, _round: usize) -> Result<RoundSelection> {
        let ranked = rank_attributes(d, self.method, &self.binning)?;
        Ok(RoundSelection {
            selected: ranked.top_k(self.top_k),
            ranked: Some(ranked),
            trace: None,
        })
    }
}

const ROUND_SALT: u64 = 0x726f_756e;

/// Forward stepwise selection per round; each round derives its own seed.
#[derive(Debug, Clone)]
pub struct ForwardSelector {
    pub config: ForwardConfig,
}

impl RoundSelector for ForwardSelector {
    fn name(&self) -> String {
        "forward".to_string()
    }

    fn select_round(&self, d: &Dataset, round: usize) -> Result<RoundSelection> {
        let cfg = ForwardConfig {
            seed: derive2(self.config.seed, ROUND_SALT, round as u64),
            ..self.config
        };
        let (selected, trace) = forward_select(d, &cfg)?;
        Ok(RoundSelection {
            selected,
            ranked: None,
            trace: Some(trace),
        })
    }
}

/// GA selection per round; each round derives its own seed.
#[derive(Debug, Clone)]
pub struct GaSelector {
    pub config: GaConfig,
}

impl RoundSelector for GaSelector {
    fn name(&self) -> String {
        "ga".to_string()
    }

    fn select_round(&self, d: &Dataset, round: usize) -> Result<RoundSelection> {
        let cfg = GaConfig {
            seed: derive2(self.config.seed, ROUND_SALT, round as u64),
            ..self.config
        };
        let (selected, trace) = ga_select(d, &cfg)?;
        Ok(RoundSelection {
            selected,
            ranked: None,
            trace: Some(trace),
        })
    }
}

/// The two-level filter vote: five ranking methods each run over all rounds;
/// a method votes for the attributes it kept in enough rounds; attributes
/// voted by enough methods form the final set.
pub fn filter_panel_table(
    d: &Dataset,
    plan: &FoldPlan,
    cfg: &ConsensusConfig,
    binning: &BinningSpec,
) -> Result<PanelOutcome> {
    cfg.validate()?;
    let mut methods = Vec::with_capacity(FilterMethod::ALL.len());
    for method in FilterMethod::ALL {
        let selector = FilterSelector {
            method,
            binning: *binning,
            top_k: cfg.filter_top_k,
        };
        let run = per_fold_select(d, &selector, plan)?;
        let tally = tally_votes(&run);
        let voted = tally.votes.iter().map(|&v| v >= cfg.fold_threshold).collect();
        let fold_average_rank = tally
            .average_rank
            .expect("filter selectors rank every round");
        methods.push(MethodVote {
            method: selector.name(),
            voted,
            fold_average_rank,
        });
    }
    let (selected, tally) = aggregate_panel(&methods, cfg.method_threshold)?;
    Ok(PanelOutcome {
        selected,
        tally,
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{make_folds, synth_generate};

    struct FixedSelector(BTreeSet<usize>);

    impl RoundSelector for FixedSelector {
        fn name(&self) -> String {
            "fixed".to_string()
        }
        fn select_round(&self, _d: &Dataset, _round: usize) -> Result<RoundSelection> {
            Ok(RoundSelection {
                selected: self.0.clone(),
                ranked: None,
                trace: None,
            })
        }
    }

    /// Selects {round}, so attribute i is chosen in exactly one round.
    struct RoundEcho;

    impl RoundSelector for RoundEcho {
        fn name(&self) -> String {
            "echo".to_string()
        }
        fn select_round(&self, _d: &Dataset, round: usize) -> Result<RoundSelection> {
            Ok(RoundSelection {
                selected: [round].into_iter().collect(),
                ranked: None,
                trace: None,
            })
        }
    }

    fn tiny_plan(n_rows: usize, k: usize) -> (Dataset, FoldPlan) {
        let d = synth_generate(n_rows, 2, 8, 2, 77).unwrap();
        let plan = make_folds(d.labels(), k, 5, false).unwrap();
        (d, plan)
    }

    #[test]
    fn stub_selector_fills_every_round() {
        let (d, plan) = tiny_plan(40, 10);
        let sel = FixedSelector([3, 7].into_iter().collect());
        let run = per_fold_select(&d, &sel, &plan).unwrap();
        assert_eq!(run.rounds.len(), 10);
        for r in &run.rounds {
            assert_eq!(r.selected, [3, 7].into_iter().collect());
        }
        let tally = tally_votes(&run);
        assert_eq!(tally.votes[3], 1.0);
        assert_eq!(tally.votes[7], 1.0);
        assert_eq!(tally.votes[0], 0.0);
        assert_eq!(consensus_subset(&tally, 0.6), [3, 7].into_iter().collect());
    }

    #[test]
    fn vote_fractions_and_inclusive_threshold() {
        let (d, plan) = tiny_plan(40, 10);
        let run = per_fold_select(&d, &RoundEcho, &plan).unwrap();
        let tally = tally_votes(&run);
        // Each of attributes 0..10 picked exactly once: 10% apiece.
        for a in 0..10 {
            assert!((tally.votes[a] - 0.1).abs() < 1e-15);
        }
        assert_eq!(consensus_subset(&tally, 0.1).len(), 10, "0.1 is inclusive");
        assert!(consensus_subset(&tally, 0.11).is_empty());
    }

    #[test]
    fn six_of_ten_rounds_meets_the_default_threshold() {
        let n_attrs = 4;
        let mut rounds = Vec::new();
        for r in 0..10 {
            // Attribute 0 in 6 rounds, attribute 1 in 5, attribute 2 in 10.
            let mut s = BTreeSet::new();
            if r < 6 {
                s.insert(0);
            }
            if r < 5 {
                s.insert(1);
            }
            s.insert(2);
            rounds.push(RoundSelection {
                selected: s,
                ranked: None,
                trace: None,
            });
        }
        let run = SelectionRun {
            selector: "stub".into(),
            k: 10,
            n_attributes: n_attrs,
            rounds,
        };
        let tally = tally_votes(&run);
        assert_eq!(tally.votes, vec![0.6, 0.5, 1.0, 0.0]);
        let kept = consensus_subset(&tally, 0.6);
        assert_eq!(kept, [0, 2].into_iter().collect());
    }

    #[test]
    fn threshold_monotonicity() {
        let (d, plan) = tiny_plan(40, 10);
        let run = per_fold_select(&d, &RoundEcho, &plan).unwrap();
        let tally = tally_votes(&run);
        let loose = consensus_subset(&tally, 0.05);
        let tight = consensus_subset(&tally, 0.8);
        assert!(tight.is_subset(&loose));
    }

    #[test]
    fn panel_aggregation_counts_methods_and_averages_voting_ranks() {
        let m = |voted: Vec<bool>, ranks: Vec<Option<f64>>| MethodVote {
            method: "m".into(),
            voted,
            fold_average_rank: ranks,
        };
        // Attribute 0: voted by methods with ranks 2, 3, 4 → mean 3.0.
        // Attribute 1: voted by one method (rank 1), below threshold 3.
        let methods = vec![
            m(vec![true, true], vec![Some(2.0), Some(1.0)]),
            m(vec![true, false], vec![Some(3.0), Some(9.0)]),
            m(vec![true, false], vec![Some(4.0), Some(8.0)]),
            m(vec![false, false], vec![Some(11.0), Some(12.0)]),
            m(vec![false, false], vec![Some(13.0), Some(14.0)]),
        ];
        let (selected, tally) = aggregate_panel(&methods, 3).unwrap();
        assert_eq!(selected, [0].into_iter().collect());
        assert_eq!(tally.votes, vec![3.0, 1.0]);
        let ranks = tally.average_rank.unwrap();
        assert_eq!(ranks[0], Some(3.0));
        assert_eq!(ranks[1], Some(1.0), "only the voting method's rank counts");
    }

    #[test]
    fn panel_on_planted_data_keeps_the_planted_attributes() {
        let d = synth_generate(300, 3, 9, 3, 99).unwrap();
        let plan = make_folds(d.labels(), 10, 1, false).unwrap();
        let cfg = ConsensusConfig {
            filter_top_k: 3,
            ..ConsensusConfig::default()
        };
        let outcome = filter_panel_table(&d, &plan, &cfg, &BinningSpec::default()).unwrap();
        let planted: BTreeSet<usize> = d.planted().unwrap().iter().copied().collect();
        assert_eq!(
            outcome.selected, planted,
            "wide-separation planted attributes dominate every ranker"
        );
        for &a in &outcome.selected {
            assert!(outcome.tally.votes[a] >= cfg.method_threshold as f64);
        }
        let csv = outcome.to_csv(&d);
        assert!(csv.lines().count() == d.n_attributes() + 1);
    }

    #[test]
    fn round_error_carries_the_round_index() {
        struct Failing;
        impl RoundSelector for Failing {
            fn name(&self) -> String {
                "failing".into()
            }
            fn select_round(&self, _d: &Dataset, round: usize) -> Result<RoundSelection> {
                if round == 3 {
                    Err(Error::Data("boom".into()))
                } else {
                    Ok(RoundSelection {
                        selected: BTreeSet::new(),
                        ranked: None,
                        trace: None,
                    })
                }
            }
        }
        let (d, plan) = tiny_plan(40, 10);
        let err = per_fold_select(&d, &Failing, &plan).unwrap_err();
        assert!(err.to_string().contains("round 3"), "{err}");
    }
}
