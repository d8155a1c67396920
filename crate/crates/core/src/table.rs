//! Which pairs of critical points may be joined by a gradient trajectory.
//!
//! Under the Morse–Smale condition the stable manifold of `p1` and the
//! unstable manifold of `p2` meet transversally, separately in the interior
//! stratum (dimension `n+1`) and in the boundary stratum `Y` (dimension `n`).
//! A trajectory from `p2` up to `p1` can exist only if one of those
//! intersections has dimension at least one.
//!
//! [`admissible`] is the closed-form table; [`derive_admissible`] recomputes
//! every entry from [`stratified_dims`].

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::PointKind;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("n must be at least 1")]
    ZeroDimension,
    #[error("index {index} is not valid for a {kind:?} point when n = {n}")]
    InvalidIndex { kind: PointKind, index: u32, n: u32 },
}

/// Dimension of a piece of a stable or unstable manifold. `Empty` is a
/// separate symbol and never stands for a negative dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    Empty,
    Of(u32),
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Empty => f.write_str("empty"),
            Dim::Of(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StratifiedDims {
    pub dim_interior_stable: Dim,
    pub dim_y_stable: Dim,
    pub dim_interior_unstable: Dim,
    pub dim_y_unstable: Dim,
}

fn check(kind: PointKind, index: u32, n: u32) -> Result<(), TableError> {
    if n == 0 {
        return Err(TableError::ZeroDimension);
    }
    if !kind.index_range(n).contains(&index) {
        return Err(TableError::InvalidIndex { kind, index, n });
    }
    Ok(())
}

pub fn stratified_dims(kind: PointKind, k: u32, n: u32) -> Result<StratifiedDims, TableError> {
    check(kind, k, n)?;
    use Dim::*;
    Ok(match kind {
        PointKind::Interior => StratifiedDims {
            dim_interior_stable: Of(k),
            dim_y_stable: Empty,
            dim_interior_unstable: Of(n + 1 - k),
            dim_y_unstable: Empty,
        },
        // The unstable manifold sits inside Y and has dimension n+1-k there.
        PointKind::BoundaryStable => StratifiedDims {
            dim_interior_stable: Of(k),
            dim_y_stable: Of(k - 1),
            dim_interior_unstable: Empty,
            dim_y_unstable: Of(n + 1 - k),
        },
        PointKind::BoundaryUnstable => StratifiedDims {
            dim_interior_stable: Empty,
            dim_y_stable: Of(k),
            dim_interior_unstable: Of(n + 1 - k),
            dim_y_unstable: Of(n - k),
        },
    })
}

/// Closed-form table: `true` unless a trajectory from `p2` to `p1` is
/// excluded.
pub fn admissible(p1: (PointKind, u32), p2: (PointKind, u32), n: u32) -> Result<bool, TableError> {
    check(p1.0, p1.1, n)?;
    check(p2.0, p2.1, n)?;
    use PointKind::*;
    let (k, l) = (p1.1, p2.1);
    Ok(match (p1.0, p2.0) {
        (Interior, BoundaryStable) => false,
        (BoundaryUnstable, Interior) => false,
        // The one strict inequality: equal indices are allowed here.
        (BoundaryUnstable, BoundaryStable) => k >= l,
        _ => k > l,
    })
}

fn stratum_meets(a: Dim, b: Dim, stratum: u32) -> bool {
    match (a, b) {
        (Dim::Of(a), Dim::Of(b)) => a + b > stratum,
        _ => false,
    }
}

/// Admissibility recomputed from transversal intersection dimensions.
pub fn derive_admissible(p1: (PointKind, u32), p2: (PointKind, u32), n: u32) -> Result<bool, TableError> {
    let s = stratified_dims(p1.0, p1.1, n)?;
    let u = stratified_dims(p2.0, p2.1, n)?;
    Ok(stratum_meets(s.dim_interior_stable, u.dim_interior_unstable, n + 1)
        || stratum_meets(s.dim_y_stable, u.dim_y_unstable, n))
}

fn symbolic_stable(kind: PointKind) -> (&'static str, &'static str) {
    match kind {
        PointKind::Interior => ("k", "empty"),
        PointKind::BoundaryStable => ("k", "k-1"),
        PointKind::BoundaryUnstable => ("empty", "k"),
    }
}

fn symbolic_unstable(kind: PointKind) -> (&'static str, &'static str) {
    match kind {
        PointKind::Interior => ("n+1-l", "empty"),
        PointKind::BoundaryStable => ("empty", "n+1-l"),
        PointKind::BoundaryUnstable => ("n+1-l", "n-l"),
    }
}

/// Empty-condition column, read off [`admissible`] by probing indices.
fn symbolic_condition(p1: PointKind, p2: PointKind) -> &'static str {
    let n = 4;
    let mut never = true;
    let mut strict = true;
    let mut weak = true;
    for k in p1.index_range(n) {
        for l in p2.index_range(n) {
            let ok = admissible((p1, k), (p2, l), n).expect("valid indices");
            never &= !ok;
            strict &= ok == (k >= l);
            weak &= ok == (k > l);
        }
    }
    if never {
        "always"
    } else if weak {
        "k<=l"
    } else if strict {
        "k<l"
    } else {
        "?"
    }
}

/// Fixed-layout text rendering of the admissibility table. With `n` given,
/// each row is followed by its `k`×`l` matrix (`+` admissible, `.` empty).
pub fn render_table(n: Option<u32>) -> String {
    let mut out = String::new();
    let header = [
        "type of p1",
        "type of p2",
        "dimO Ws(p1)",
        "dimY Ws(p1)",
        "dimO Wu(p2)",
        "dimY Wu(p2)",
        "empty if",
    ];
    let line = |cells: &[&str]| -> String {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                s.push_str(" | ");
            }
            let _ = write!(s, "{c:<11}");
        }
        s.trim_end().to_string()
    };
    out.push_str(&line(&header));
    out.push('\n');
    out.push_str(&"-".repeat(line(&header).len()));
    out.push('\n');
    for p1 in PointKind::ALL {
        for p2 in PointKind::ALL {
            let (s_o, s_y) = symbolic_stable(p1);
            let (u_o, u_y) = symbolic_unstable(p2);
            let cond = symbolic_condition(p1, p2);
            out.push_str(&line(&[p1.label(), p2.label(), s_o, s_y, u_o, u_y, cond]));
            out.push('\n');
            if let Some(n) = n {
                for k in p1.index_range(n) {
                    let _ = write!(out, "    k={k:<2}");
                    for l in p2.index_range(n) {
                        let ok = admissible((p1, k), (p2, l), n).expect("valid indices");
                        let _ = write!(out, " l={l}:{}", if ok { '+' } else { '.' });
                    }
                    out.push('\n');
                }
            }
        }
    }
    out
}
