//! Two-phase attribute selection and classification for cohort income data.
//!
//! Phase one ranks and selects attributes with five filter scorers, a forward
//! stepwise wrapper, and a genetic-algorithm wrapper, then combines per-fold
//! results through a consensus vote. Phase two evaluates classifiers on the
//! surviving subset with stratified cross-validation and reports
//! support-weighted metrics.
//!
//! The public surface is re-exported here; submodules group the machinery:
//!
//! * [`dataset`]: schema, CSV ingestion, preprocessing, folds, synthetic data
//! * [`filters`]: OneR, ReliefF, chi-square, gain ratio, information gain
//! * [`search`]: subset fitness, forward selection, genetic search
//! * [`consensus`]: per-fold voting and the cross-method panel
//! * [`classify`]: the five classifiers behind a single `train`/`predict` API
//! * [`eval`]: confusion matrices, weighted metrics, cross-validated comparison

pub mod classify;
pub mod consensus;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod filters;
pub mod search;
pub mod seed;
pub mod table;

pub use classify::{train, ClassifierSpec, TrainedModel};
pub use consensus::{
    consensus_subset, filter_panel_table, per_fold_select, tally_votes, ConsensusConfig,
    RoundSelector, SelectionRun, VoteTally,
};
pub use dataset::{
    discretize_income, load_csv, make_folds, one_hot_encode, standardize, synth_generate,
    AttributeGroup, AttributeInfo, AttributeSchema, ColumnRole, ConstantColumnPolicy, Dataset,
    FoldPlan, IncomeClass, SchemaColumn, StandardizationParams,
};
pub use error::{Error, Result};
pub use eval::{
    compare_subsets, confusion_matrix, cross_validate, weighted_metrics, ComparisonTable,
    ConfusionMatrix, MetricsReport,
};
pub use filters::{
    bin_numeric, chi_square, gain_ratio, info_gain, oner_merit, rank_attributes, relief_weights,
    BinningSpec, FilterMethod, RankedList,
};
pub use search::{
    forward_select, forward_select_with, ga_select, ga_select_with, mutate_bits, subset_fitness,
    tournament_pick, two_point_crossover, Chromosome, CvAccuracyFitness, FitnessConfig,
    ForwardConfig, GaConfig, SearchTrace, SubsetFitness, TraceRecord,
};
