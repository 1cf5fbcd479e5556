//! Comparison algorithms instrumented for fragile complexity: the number of
//! comparisons each individual input element takes part in.
//!
//! All algorithms take a [`Ledger`] and order elements only through it, so the
//! per-element counts it accumulates are the measured fragility.

pub mod error;
pub mod ledger;
pub mod primitives;

pub use error::{Error, Result};
pub use ledger::{ElementId, FragilityProfile, Ledger, RoleMap, RoleStats};
pub mod adaptive;
pub mod search;
pub mod selection;
