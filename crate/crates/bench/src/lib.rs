//! Shared fixtures for the criterion benches: datasets sized so a full
//! suite run stays in the minutes, not hours.

use attrsel_core::{synth_generate, Dataset};

/// Cohort-scale table: the size the selection pipeline is tuned for.
pub fn cohort_scale() -> Dataset {
    synth_generate(1500, 5, 25, 4, 9).expect("fixture generates")
}

/// Small table for search benches, where each fitness call already costs
/// five classifier trainings.
pub fn search_scale() -> Dataset {
    synth_generate(200, 3, 5, 4, 9).expect("fixture generates")
}
