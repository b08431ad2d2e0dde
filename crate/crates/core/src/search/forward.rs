//! Forward stepwise selection: grow from the empty set, adding whichever
//! attribute raises fitness the most, until no addition clears the
//! improvement threshold.

use std::collections::BTreeSet;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::search::fitness::{CvAccuracyFitness, FitnessConfig, SubsetFitness};
use crate::search::{bits_to_set, SearchTrace, TraceRecord};
use crate::seed::derive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardConfig {
    /// Smallest fitness gain that justifies adding another attribute.
    pub min_improvement: f64,
    pub max_subset_size: usize,
    pub inner_folds: usize,
    pub seed: u64,
}

impl Default for ForwardConfig {
    fn default() -> Self {
        ForwardConfig {
            min_improvement: 1e-6,
            max_subset_size: usize::MAX,
            inner_folds: 5,
            seed: 0,
        }
    }
}

impl ForwardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_improvement >= 0.0) {
            return Err(Error::Config(format!(
                "min_improvement must be nonnegative, got {}",
                self.min_improvement
            )));
        }
        if self.inner_folds < 2 {
            return Err(Error::Config(format!(
                "inner_folds must be at least 2, got {}",
                self.inner_folds
            )));
        }
        Ok(())
    }
}

const FORWARD_FITNESS_SALT: u64 = 0x666f_7277;

/// Run the stepwise search against any fitness function over `n_bits`
/// candidates. Returns the final bit set and a trace holding the starting
/// point plus one record per accepted attribute.
pub fn forward_select_with<F: SubsetFitness + ?Sized>(
    cfg: &ForwardConfig,
    n_bits: usize,
    fitness: &F,
) -> Result<(Vec<bool>, SearchTrace)> {
    cfg.validate()?;
    if n_bits == 0 {
        return Err(Error::Invalid("no candidate attributes to search".into()));
    }
    let mut current = vec![false; n_bits];
    let mut current_fit = fitness.eval(&current);
    let mut trace = SearchTrace::default();
    trace.push(TraceRecord {
        step: 0,
        best_bits: current.clone(),
        best_fitness: current_fit,
        mean_fitness: current_fit,
    });

    let mut step = 0;
    let mut size = 0;
    while size < cfg.max_subset_size && size < n_bits {
        let mut best_j = 0;
        let mut best_fit = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut tried = 0usize;
        for j in 0..n_bits {
            if current[j] {
                continue;
            }
            current[j] = true;
            let f = fitness.eval(&current);
            current[j] = false;
            sum += f;
            tried += 1;
            // Strict comparison in ascending order keeps ties on the
            // lowest attribute.
            if f > best_fit {
                best_fit = f;
                best_j = j;
            }
        }
        if tried == 0 || !(best_fit - current_fit >= cfg.min_improvement) {
            break;
        }
        current[best_j] = true;
        current_fit = best_fit;
        size += 1;
        step += 1;
        trace.push(TraceRecord {
            step,
            best_bits: current.clone(),
            best_fitness: current_fit,
            mean_fitness: sum / tried as f64,
        });
    }
    Ok((current, trace))
}

/// Stepwise selection on a dataset, scored by cross-validated
/// logistic-regression accuracy. Returns selected attribute ids.
pub fn forward_select(d: &Dataset, cfg: &ForwardConfig) -> Result<(BTreeSet<usize>, SearchTrace)> {
    let fit_cfg = FitnessConfig {
        inner_folds: cfg.inner_folds,
        seed: derive(cfg.seed, FORWARD_FITNESS_SALT),
        ..FitnessConfig::default()
    };
    let fitness = CvAccuracyFitness::new(d, &fit_cfg)?;
    let (bits, trace) = forward_select_with(cfg, fitness.n_bits(), &fitness)?;
    let subset = bits_to_set(&bits)
        .into_iter()
        .map(|j| fitness.candidates()[j])
        .collect();
    Ok((subset, trace))
}
