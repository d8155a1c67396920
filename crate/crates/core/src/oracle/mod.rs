//! Exact model of the surface case `n = 1`.
//!
//! Level sets are disjoint unions of circles and intervals, the interval
//! endpoints forming `M`. Components carry named marks so that attachment
//! sites can be addressed; a build lists attachments by level and replays
//! them from `Σ₀`.

use thiserror::Error;

mod build;
mod certify;
mod state;

pub use build::{AttachKind, BuildMove, CobordismBuild, OmegaComponent, Site, Step};
pub use certify::{
    certify_all, certify_split, detect_closed_levels, reorder, ClosedLevel, OracleAuthority, Refusal, Reordered,
    SplitVerdict,
};
pub use state::{Component, Effect, OneManifoldState, Shape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("malformed build document: {0}")]
    Parse(String),
    #[error("no component carries the mark {0}")]
    UnknownMark(String),
    #[error("mark {0} already exists")]
    DuplicateMark(String),
    #[error("site mismatch: {0}")]
    SiteMismatch(String),
    #[error("twisted band: the surface would be non-orientable")]
    NonOrientable,
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("move {0}: {1}")]
    AtMove(usize, Box<OracleError>),
    #[error("unknown site: {0}")]
    UnknownSite(String),
    #[error("reordering failed: {0}")]
    Stuck(String),
}

impl OracleError {
    fn at_move(self, i: usize) -> Self {
        match self {
            OracleError::AtMove(..) => self,
            e => OracleError::AtMove(i, Box::new(e)),
        }
    }
}
