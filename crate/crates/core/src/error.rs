use alloc::string::String;
use alloc::vec::Vec;

use crate::model::PersonId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("duplicate person id {0}")]
    DuplicatePerson(PersonId),

    #[error("person {0} appears in more than one group")]
    OverlappingGroups(PersonId),

    #[error("group of {0} member(s); groups need at least two")]
    GroupTooSmall(usize),

    #[error("person {0} is referenced by a group but not present in the scene")]
    UnknownPerson(PersonId),

    #[error("scene has {persons} persons; exhaustive search is limited to {limit}")]
    TooLarge { persons: usize, limit: usize },

    #[error("person {person} refers to label {label}, but only {labels} centre(s) exist")]
    DanglingLabel { person: usize, label: usize, labels: usize },

    #[error("arrangements overlap: {}", fmt_pairs(.0))]
    OverlappingArrangements(Vec<(usize, usize)>),
}

fn fmt_pairs(pairs: &[(usize, usize)]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (k, (a, b)) in pairs.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "#{a} and #{b}");
    }
    out
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
