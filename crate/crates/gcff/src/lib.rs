//! Files, reports, drawings and experiment drivers around [`gcff_core`].

use std::path::Path;

pub mod io;
pub mod orientation;
pub mod profile;
pub mod report;
pub mod stats;
pub mod svg;
pub mod tune;

pub use profile::Profile;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("frame `{frame}`: group member {person} is not in the frame")]
    DanglingMember { frame: String, person: u64 },
    #[error("frames present in only one input: {}", .0.join(", "))]
    UnmatchedFrames(Vec<String>),
    #[error("{0}")]
    InvalidInput(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Stream(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] gcff_core::Error),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
