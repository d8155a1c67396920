//! Morse calculus for cobordisms of manifolds with boundary.
//!
//! A cobordism `(Ω, Y)` between `(Σ₀, M₀)` and `(Σ₁, M₁)` carrying a Morse
//! function is modelled symbolically by a [`model::MorseDatum`]. The
//! [`moves`] module rewrites such data (rearrangement, splitting interior
//! points to the boundary, cancellation) up to the normal form where the
//! cobordism is a stack of left and right product blocks. [`local`] holds
//! the numerical local models behind the splitting move, and [`oracle`] is
//! an exact brute-force model of the surface case `n = 1`.

pub mod cli;
pub mod homology;
pub mod level;
pub mod local;
pub mod model;
pub mod moves;
pub mod oracle;
pub mod table;
pub mod trace;

pub use level::Level;
pub use model::{CobordismFlags, CriticalPoint, MorseDatum, PointId, PointKind, Trajectory};
