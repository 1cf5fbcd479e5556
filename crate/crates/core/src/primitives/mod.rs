//! Fragility-bounded building blocks shared by the search, selection and
//! adaptive modules.

mod merge;
mod network;
mod select;
mod tournament;

pub use merge::{exponential_merge, exponential_merge_checked};
pub use network::{batcher_depth, network_sort, run_schedule, small_median, ComparatorSchedule};
pub use select::mom_select;
pub(crate) use select::CUTOFF as MOM_CUTOFF;
pub(crate) use tournament::ceil_log2;
pub use tournament::tournament_min;
