use thiserror::Error;

use crate::family::MAX_GROUND;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {element} out of range for ground size {n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("ground size {0} exceeds the {MAX_GROUND}-bit mask limit")]
    GroundTooLarge(usize),
    #[error("ground sizes differ: {0} vs {1}")]
    GroundMismatch(usize, usize),
    #[error("the two elements must be distinct")]
    EqualElements,
    #[error("set list is not strictly increasing")]
    UnsortedSet,
    #[error("duplicate set in family")]
    DuplicateSet,
    #[error("root {root} lies in its own stem")]
    RootInStem { root: usize },
    #[error("duplicate rule with root {root}")]
    DuplicateRule { root: usize },
    #[error("two rules share the root {0}")]
    SharedRoot(usize),
    #[error("rule with root {root} has an empty stem")]
    EmptyStem { root: usize },
    #[error("stem of the rule rooted at {root} is not a singleton")]
    NonSingletonStem { root: usize },
    #[error("not a partial order: {u} and {v} lie on a common cycle")]
    NotAPoset { u: usize, v: usize },
    #[error("functional graph is not connected")]
    NotConnected,
    #[error("element {0} is not the root of the component")]
    NotARoot(usize),
    #[error("element {0} lies in a singleton equivalence class")]
    SingletonClass(usize),
    #[error("partition does not match the map's equivalence classes")]
    PartitionMismatch,
    #[error("input is connected; nothing to split")]
    AlreadyConnected,
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
