use thiserror::Error;

use crate::ledger::ElementId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("element {0} compared with itself")]
    SelfComparison(ElementId),
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("rank {k} out of range for {len} elements")]
    RankOutOfRange { k: usize, len: usize },
    #[error("merge input is not ascending at position {position}")]
    MergePreconditionViolated { position: usize },
    #[error("malformed comparator schedule: {0}")]
    ScheduleFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
