//! Wrapper-style subset search: forward stepwise selection and a genetic
//! algorithm, both scored by cross-validated fitness over candidate subsets.

mod fitness;
mod forward;
mod ga;

pub use fitness::{subset_fitness, CvAccuracyFitness, FitnessConfig, SubsetFitness};
pub use forward::{forward_select, forward_select_with, ForwardConfig};
pub use ga::{
    ga_select, ga_select_with, mutate_bits, tournament_pick, two_point_crossover, Chromosome,
    GaConfig,
};

use std::collections::BTreeSet;

use crate::table::{csv_record, fmt_float};

/// One step of a search: the best subset seen so far and the score spread
/// of whatever the step evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub best_bits: Vec<bool>,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchTrace {
    pub records: Vec<TraceRecord>,
}

impl SearchTrace {
    pub fn push(&mut self, rec: TraceRecord) {
        self.records.push(rec);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,subset_size,best_fitness,mean_fitness,best_bits\n");
        for r in &self.records {
            let size = r.best_bits.iter().filter(|&&b| b).count();
            let bits: String = r
                .best_bits
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect();
            out.push_str(&csv_record(&[
                r.step.to_string(),
                size.to_string(),
                fmt_float(r.best_fitness),
                fmt_float(r.mean_fitness),
                bits,
            ]));
            out.push('\n');
        }
        out
    }
}

pub fn bits_to_set(bits: &[bool]) -> BTreeSet<usize> {
    bits.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

pub fn set_to_bits(set: &BTreeSet<usize>, n: usize) -> Vec<bool> {
    let mut bits = vec![false; n];
    for &i in set {
        if i < n {
            bits[i] = true;
        }
    }
    bits
}
