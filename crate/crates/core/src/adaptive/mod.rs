//! Minimum, median and sorting whose fragility adapts to how presorted the
//! input is, measured by the number of runs or the number of inversions.
//!
//! Every operation treats its input sequence as given in input order and never
//! uses the ledger's id order for anything but tie-breaking.

mod inv;
mod median_runs;
mod runs;
mod sort_inv;
mod two_runs;

pub use inv::{extract_sorted_run, median_by_inv, min_by_inv, InversionExtract};
pub use median_runs::{median_by_runs, median_by_runs_traced, MedianRunsStep, MedianRunsTrace};
pub use runs::{count_inversions_oracle, count_runs, min_by_runs, runs_oracle, RunDecomposition};
pub use sort_inv::{sort_by_inv, sort_by_inv_traced, SortInvTrace};
pub use two_runs::median_two_runs;

pub mod phases {
    pub use super::median_runs::{
        PHASE_FINAL as RUNS_FINAL, PHASE_PARTITION as RUNS_PARTITION, PHASE_SCAN as RUNS_SCAN,
    };
    pub use super::sort_inv::{
        PHASE_EXTRACT as INV_EXTRACT, PHASE_MERGE as INV_MERGE, PHASE_SEARCH as INV_SEARCH,
    };
}

/// Zero-based rank of the lower median of `n` elements.
pub fn lower_median_rank(n: usize) -> usize {
    n.saturating_sub(1) / 2
}
