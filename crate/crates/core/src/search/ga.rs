//! A simple generational genetic algorithm over attribute bit vectors:
//! tournament selection, two-point crossover, per-bit mutation, optional
//! elitism, best-ever tracking.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::search::fitness::{CvAccuracyFitness, FitnessConfig, SubsetFitness};
use crate::search::{bits_to_set, SearchTrace, TraceRecord};
use crate::seed::{derive, derive2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub generations: usize,
    pub tournament_size: usize,
    /// Number of best individuals copied unchanged into the next
    /// generation. The returned optimum does not depend on it: the best
    /// chromosome ever evaluated is tracked separately.
    pub elitism: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 500,
            crossover_rate: 0.6,
            mutation_rate: 0.03,
            generations: 60,
            tournament_size: 2,
            elitism: 0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population_size must be at least 2, got {}",
                self.population_size
            )));
        }
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if self.generations < 1 {
            return Err(Error::Config("generations must be at least 1".into()));
        }
        if self.tournament_size < 1 {
            return Err(Error::Config("tournament_size must be at least 1".into()));
        }
        if self.elitism >= self.population_size {
            return Err(Error::Config(format!(
                "elitism {} must be below the population size {}",
                self.elitism, self.population_size
            )));
        }
        Ok(())
    }
}

/// A candidate subset with its evaluated fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub bits: Vec<bool>,
    pub fitness: f64,
}

impl Chromosome {
    fn evaluated<F: SubsetFitness + ?Sized>(bits: Vec<bool>, fitness: &F) -> Chromosome {
        let f = fitness.eval(&bits);
        Chromosome { bits, fitness: f }
    }
}

/// Index of the tournament winner: sample `size` contestants uniformly with
/// replacement, return the fittest (fitness ties go to the earlier
/// population index).
pub fn tournament_pick(
    population: &[Chromosome],
    size: usize,
    rng: &mut impl Rng,
) -> Result<usize> {
    if population.is_empty() {
        return Err(Error::Invalid("tournament over an empty population".into()));
    }
    if size == 0 {
        return Err(Error::Invalid("tournament size must be at least 1".into()));
    }
    let mut best = rng.random_range(0..population.len());
    for _ in 1..size {
        let challenger = rng.random_range(0..population.len());
        let better = population[challenger].fitness > population[best].fitness
            || (population[challenger].fitness == population[best].fitness
                && challenger < best);
        if better {
            best = challenger;
        }
    }
    Ok(best)
}

/// Children swap the parents' segment `[cut1, cut2)`.
pub fn two_point_crossover(
    a: &[bool],
    b: &[bool],
    cut1: usize,
    cut2: usize,
) -> Result<(Vec<bool>, Vec<bool>)> {
    if a.len() != b.len() {
        return Err(Error::Invalid(format!(
            "parent lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if cut1 > cut2 || cut2 > a.len() {
        return Err(Error::Invalid(format!(
            "bad cut points ({cut1}, {cut2}) for length {}",
            a.len()
        )));
    }
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    c1[cut1..cut2].copy_from_slice(&b[cut1..cut2]);
    c2[cut1..cut2].copy_from_slice(&a[cut1..cut2]);
    Ok((c1, c2))
}

/// Flip each bit independently with probability `rate`.
pub fn mutate_bits(bits: &mut [bool], rate: f64, rng: &mut impl Rng) {
    assert!(
        (0.0..=1.0).contains(&rate),
        "mutation rate must be in [0, 1], got {rate}"
    );
    for b in bits.iter_mut() {
        if rng.random_bool(rate) {
            *b = !*b;
        }
    }
}

const GA_FITNESS_SALT: u64 = 0x6761_6669;

fn update_best(best: &mut Chromosome, pop: &[Chromosome]) {
    for c in pop {
        if c.fitness > best.fitness {
            *best = c.clone();
        }
    }
}

fn mean_fitness(pop: &[Chromosome]) -> f64 {
    pop.iter().map(|c| c.fitness).sum::<f64>() / pop.len() as f64
}

/// Run the GA against any fitness function over `n_bits` candidates.
///
/// The result is a pure function of `(cfg, n_bits, fitness)`: randomness for
/// the initial population derives from `(seed, 0, individual)` and for each
/// breeding pair from `(seed, generation, pair)`, so no evaluation order can
/// change the outcome.
pub fn ga_select_with<F: SubsetFitness + ?Sized>(
    cfg: &GaConfig,
    n_bits: usize,
    fitness: &F,
) -> Result<(Chromosome, SearchTrace)> {
    cfg.validate()?;
    if n_bits == 0 {
        return Err(Error::Invalid("no candidate attributes to search".into()));
    }

    let mut pop: Vec<Chromosome> = (0..cfg.population_size)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive2(cfg.seed, 0, i as u64));
            let bits = (0..n_bits).map(|_| rng.random_bool(0.5)).collect();
            Chromosome::evaluated(bits, fitness)
        })
        .collect();

    let mut best = pop[0].clone();
    update_best(&mut best, &pop);
    let mut trace = SearchTrace::default();
    trace.push(TraceRecord {
        step: 0,
        best_bits: best.bits.clone(),
        best_fitness: best.fitness,
        mean_fitness: mean_fitness(&pop),
    });

    for g in 1..=cfg.generations {
        let mut next: Vec<Chromosome> = Vec::with_capacity(cfg.population_size);
        if cfg.elitism > 0 {
            let mut order: Vec<usize> = (0..pop.len()).collect();
            order.sort_by(|&x, &y| {
                pop[y]
                    .fitness
                    .total_cmp(&pop[x].fitness)
                    .then(x.cmp(&y))
            });
            next.extend(order[..cfg.elitism].iter().map(|&i| pop[i].clone()));
        }
        let mut pair = 0u64;
        while next.len() < cfg.population_size {
            let mut rng = ChaCha8Rng::seed_from_u64(derive2(cfg.seed, g as u64, pair));
            pair += 1;
            let p1 = tournament_pick(&pop, cfg.tournament_size, &mut rng)?;
            let p2 = tournament_pick(&pop, cfg.tournament_size, &mut rng)?;
            let mut c1 = pop[p1].bits.clone();
            let mut c2 = pop[p2].bits.clone();
            if rng.random_bool(cfg.crossover_rate) {
                let a = rng.random_range(0..=n_bits);
                let b = rng.random_range(0..=n_bits);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                (c1, c2) = two_point_crossover(&c1, &c2, lo, hi)?;
            }
            mutate_bits(&mut c1, cfg.mutation_rate, &mut rng);
            mutate_bits(&mut c2, cfg.mutation_rate, &mut rng);
            next.push(Chromosome::evaluated(c1, fitness));
            if next.len() < cfg.population_size {
                next.push(Chromosome::evaluated(c2, fitness));
            }
        }
        pop = next;
        update_best(&mut best, &pop);
        trace.push(TraceRecord {
            step: g,
            best_bits: best.bits.clone(),
            best_fitness: best.fitness,
            mean_fitness: mean_fitness(&pop),
        });
    }
    Ok((best, trace))
}

/// GA subset selection on a dataset, scored by cross-validated
/// logistic-regression accuracy. Returns selected attribute ids.
pub fn ga_select(d: &Dataset, cfg: &GaConfig) -> Result<(BTreeSet<usize>, SearchTrace)> {
    let fitness = CvAccuracyFitness::new(
        d,
        &FitnessConfig::with_seed(derive(cfg.seed, GA_FITNESS_SALT)),
    )?;
    let (best, trace) = ga_select_with(cfg, fitness.n_bits(), &fitness)?;
    let subset = bits_to_set(&best.bits)
        .into_iter()
        .map(|j| fitness.candidates()[j])
        .collect();
    Ok((subset, trace))
}
