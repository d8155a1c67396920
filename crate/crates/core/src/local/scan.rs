//! Parameter scans: the `G_t` bifurcation and the gradient floor on `U₂₁`.

use rayon::prelude::*;
use serde::Serialize;

use super::bump::Bump;
use super::critical::{find_critical_points, CriticalScan, Domain, PointClass};
use super::models::{ModelD, ModelG, ScalarField};
use super::{LocalError, ModelParams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomotopyRow {
    pub t: f64,
    /// Effective coefficient `1 - t(1+δ)` of `y` on the `U₁` slice.
    pub a: f64,
    pub scan: CriticalScan,
}

impl HomotopyRow {
    pub fn interior(&self) -> usize {
        self.scan.count(PointClass::Interior)
    }

    pub fn boundary(&self) -> usize {
        self.scan.count(PointClass::BoundaryStable) + self.scan.count(PointClass::BoundaryUnstable)
    }

    pub fn degenerate(&self) -> usize {
        self.scan.count(PointClass::Degenerate)
    }
}

/// Window searched for critical points of the `U₁` slice.
pub fn homotopy_domain() -> Domain {
    Domain::new((0.0, 2.0), (-1.0, 1.0))
}

/// Critical inventory of `G_t = y³ - yx² + (1 - t(1+δ))y + ½` for each `t`.
pub fn homotopy_scan(delta: f64, t_values: &[f64], params: &ModelParams) -> Vec<HomotopyRow> {
    let domain = homotopy_domain();
    t_values
        .iter()
        .map(|&t| {
            let a = 1.0 - t * (1.0 + delta);
            HomotopyRow {
                t,
                a,
                scan: find_critical_points(&ModelD { a }, &domain, params),
            }
        })
        .collect()
}

/// Location of the passage from one interior point to two boundary points:
/// the first degenerate row if one was sampled, otherwise the midpoint of
/// the bracketing rows.
pub fn transition_estimate(rows: &[HomotopyRow]) -> Option<f64> {
    for (i, row) in rows.iter().enumerate() {
        if row.degenerate() > 0 {
            return Some(row.t);
        }
        if row.boundary() == 2 && i > 0 {
            let prev = &rows[i - 1];
            if prev.interior() == 1 && prev.boundary() == 0 {
                return Some(0.5 * (prev.t + row.t));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct U21Scan {
    pub eps: f64,
    pub delta: f64,
    pub step: f64,
    pub min_grad: f64,
    pub argmin: [f64; 2],
    pub points: usize,
    pub in_proven_regime: bool,
    /// Largest `∂G/∂y` on `U₂₁ ∩ {y = 0}`; negative when no critical point
    /// can sit there.
    pub max_gy_on_axis: f64,
}

#[derive(Clone, Copy)]
struct Acc {
    min: f64,
    at: (i64, i64),
    points: usize,
    gy_axis: f64,
}

impl Acc {
    fn empty() -> Self {
        Acc {
            min: f64::INFINITY,
            at: (i64::MAX, i64::MAX),
            points: 0,
            gy_axis: f64::NEG_INFINITY,
        }
    }

    fn merge(self, o: Acc) -> Acc {
        let pick = if (o.min, o.at) < (self.min, self.at) { o } else { self };
        Acc {
            min: pick.min,
            at: pick.at,
            points: self.points + o.points,
            gy_axis: self.gy_axis.max(o.gy_axis),
        }
    }
}

/// Minimum of `|∇G|` over the grid nodes of `U₂₁ = closure(U₂ ∖ U₁)`.
pub fn scan_u21(eps: f64, delta: f64, step: f64) -> Result<U21Scan, LocalError> {
    if !(eps > 0.0) || !(step > 0.0) {
        return Err(LocalError::RegionEmpty);
    }
    let bump = Bump::new(eps);
    let g = ModelG::new(delta, eps);
    let nx = ((3.0 + 2.0 * eps) / step).floor() as i64;
    let ny = (2.0 * eps / step).floor() as i64;
    let acc = (0..=nx)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * step;
            let mut acc = Acc::empty();
            for j in -ny..=ny {
                let y = j as f64 * step;
                if !bump.in_u21(x, y) {
                    continue;
                }
                let grad = g.gradient([x, y]);
                let norm = grad[0].hypot(grad[1]);
                acc.points += 1;
                if (norm, (i, j)) < (acc.min, acc.at) {
                    acc.min = norm;
                    acc.at = (i, j);
                }
                if j == 0 {
                    acc.gy_axis = acc.gy_axis.max(grad[1]);
                }
            }
            acc
        })
        .reduce(Acc::empty, Acc::merge);
    if acc.points == 0 {
        return Err(LocalError::RegionEmpty);
    }
    Ok(U21Scan {
        eps,
        delta,
        step,
        min_grad: acc.min,
        argmin: [acc.at.0 as f64 * step, acc.at.1 as f64 * step],
        points: acc.points,
        in_proven_regime: delta < ModelParams::delta_bound(eps),
        max_gy_on_axis: acc.gy_axis,
    })
}
