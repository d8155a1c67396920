//! Multi-seed Newton search and classification of critical points.

use rayon::prelude::*;
use serde::Serialize;

use super::models::ScalarField;
use super::{LocalError, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Domain {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Domain {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Domain { x, y }
    }

    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        p[0] >= self.x.0 - slack && p[0] <= self.x.1 + slack && p[1] >= self.y.0 - slack && p[1] <= self.y.1 + slack
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Interior,
    BoundaryStable,
    BoundaryUnstable,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifiedPoint {
    pub location: [f64; 2],
    pub kind: PointClass,
    pub index: Option<u32>,
    pub hessian_eigen_signs: Vec<i8>,
    pub on_boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalScan {
    pub points: Vec<ClassifiedPoint>,
    /// Seeds whose iteration diverged, stalled or left the domain.
    pub nonconverged: usize,
    pub seeds: usize,
}

impl CriticalScan {
    pub fn count(&self, kind: PointClass) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn eigen_sym2(h: [[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let half_diff = 0.5 * (h[0][0] - h[1][1]);
    let rad = half_diff.hypot(h[0][1]);
    [mean - rad, mean + rad]
}

fn newton(field: &dyn ScalarField, seed: [f64; 2], domain: &Domain, params: &ModelParams) -> Option<[f64; 2]> {
    let mut p = seed;
    let escape = 1.0 + (domain.x.1 - domain.x.0).max(domain.y.1 - domain.y.0);
    for _ in 0..200 {
        let g = field.gradient(p);
        let h = field.hessian(p);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        p = [p[0] - dx, p[1] - dy];
        if !domain.contains(p, escape) || !p[0].is_finite() || !p[1].is_finite() {
            return None;
        }
        if dx.hypot(dy) < params.newton_tol {
            return Some(p);
        }
    }
    None
}

/// Stable or unstable from the normal linearisation `∂ẋ/∂x = F_xx` at a
/// point of `{x = 0}`: attracting means the unstable manifold lies in the
/// boundary.
pub fn classify_boundary_point(
    field: &dyn ScalarField,
    p: [f64; 2],
    params: &ModelParams,
) -> Result<PointClass, LocalError> {
    let fxx = field.hessian(p)[0][0];
    if fxx.abs() < params.newton_tol {
        return Err(LocalError::DegenerateNormal(p[0], p[1]));
    }
    Ok(if fxx < 0.0 {
        PointClass::BoundaryStable
    } else {
        PointClass::BoundaryUnstable
    })
}

fn classify(field: &dyn ScalarField, p: [f64; 2], params: &ModelParams) -> ClassifiedPoint {
    let eig = eigen_sym2(field.hessian(p));
    let signs: Vec<i8> = eig
        .iter()
        .map(|e| {
            if *e < 0.0 {
                -1
            } else if *e > 0.0 {
                1
            } else {
                0
            }
        })
        .collect();
    let on_boundary = p[0] <= params.boundary_tol;
    let degenerate = eig.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min) < params.newton_tol.sqrt();
    let index = eig.iter().filter(|e| **e < 0.0).count() as u32;
    let kind = if degenerate {
        PointClass::Degenerate
    } else if on_boundary {
        classify_boundary_point(field, p, params).unwrap_or(PointClass::Degenerate)
    } else {
        PointClass::Interior
    };
    ClassifiedPoint {
        location: p,
        kind,
        index: (kind != PointClass::Degenerate).then_some(index),
        hessian_eigen_signs: signs,
        on_boundary,
    }
}

/// Newton iteration from every node of a `grid_step` grid over `domain`,
/// roots merged within `10·newton_tol` (degenerate roots, which Newton only
/// approaches linearly, within `√newton_tol`) and classified.
pub fn find_critical_points(field: &dyn ScalarField, domain: &Domain, params: &ModelParams) -> CriticalScan {
    let nx = ((domain.x.1 - domain.x.0) / params.grid_step).round() as i64;
    let ny = ((domain.y.1 - domain.y.0) / params.grid_step).round() as i64;
    let seeds: Vec<[f64; 2]> = (0..=nx)
        .flat_map(|i| {
            (0..=ny).map(move |j| {
                [
                    domain.x.0 + i as f64 * params.grid_step,
                    domain.y.0 + j as f64 * params.grid_step,
                ]
            })
        })
        .collect();
    let results: Vec<Option<[f64; 2]>> = seeds.par_iter().map(|s| newton(field, *s, domain, params)).collect();

    let mut nonconverged = 0;
    let mut points: Vec<ClassifiedPoint> = Vec::new();
    for r in results {
        let Some(mut p) = r else {
            nonconverged += 1;
            continue;
        };
        if p[0] < -params.boundary_tol || !domain.contains(p, params.boundary_tol) {
            continue;
        }
        if p[0] <= params.boundary_tol {
            p[0] = 0.0;
        }
        let c = classify(field, p, params);
        let radius = if c.kind == PointClass::Degenerate {
            params.newton_tol.sqrt()
        } else {
            10.0 * params.newton_tol
        };
        let dup = points.iter().any(|q| {
            let r = if q.kind == PointClass::Degenerate {
                params.newton_tol.sqrt()
            } else {
                radius
            };
            (q.location[0] - p[0]).hypot(q.location[1] - p[1]) < r
        });
        if !dup {
            points.push(c);
        }
    }
    points.sort_by(|a, b| {
        a.location[0]
            .total_cmp(&b.location[0])
            .then(b.location[1].total_cmp(&a.location[1]))
    });
    CriticalScan {
        points,
        nonconverged,
        seeds: seeds.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::models::ModelD;

    fn scan(a: f64) -> CriticalScan {
        find_critical_points(
            &ModelD { a },
            &Domain::new((0.0, 2.0), (-1.0, 1.0)),
            &ModelParams::default(),
        )
    }

    #[test]
    fn positive_a_gives_one_interior_saddle() {
        let s = scan(1.0);
        assert_eq!(s.points.len(), 1, "{s:?}");
        let p = &s.points[0];
        assert_eq!((p.kind, p.index), (PointClass::Interior, Some(1)));
        assert!((p.location[0] - 1.0).abs() < 1e-8 && p.location[1].abs() < 1e-8);
    }

    #[test]
    fn negative_a_gives_two_boundary_points() {
        let s = scan(-0.03);
        assert_eq!(s.points.len(), 2, "{s:?}");
        assert_eq!(s.points[0].kind, PointClass::BoundaryStable);
        assert!((s.points[0].location[1] - 0.1).abs() < 1e-8);
        assert_eq!(s.points[1].kind, PointClass::BoundaryUnstable);
        assert!((s.points[1].location[1] + 0.1).abs() < 1e-8);
        assert!(s.points.iter().all(|p| p.index == Some(1) && p.location[0] == 0.0));
    }

    #[test]
    fn zero_a_gives_one_degenerate_point() {
        let s = scan(0.0);
        assert_eq!(s.points.len(), 1, "{s:?}");
        assert_eq!(s.points[0].kind, PointClass::Degenerate);
        assert!(s.points[0].location[0].abs() < 1e-5 && s.points[0].location[1].abs() < 1e-5);
    }

    #[test]
    fn boundary_classification() {
        let d = ModelD { a: -0.03 };
        let p = ModelParams::default();
        assert_eq!(
            classify_boundary_point(&d, [0.0, 0.1], &p),
            Ok(PointClass::BoundaryStable)
        );
        assert_eq!(
            classify_boundary_point(&d, [0.0, -0.1], &p),
            Ok(PointClass::BoundaryUnstable)
        );
        assert!(matches!(
            classify_boundary_point(&ModelD { a: 0.0 }, [0.0, 0.0], &p),
            Err(LocalError::DegenerateNormal(..))
        ));
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(eigen_sym2([[0.0, -2.0], [-2.0, 0.0]]), [-2.0, 2.0]);
        assert_eq!(eigen_sym2([[1.0, 0.0], [0.0, 3.0]]), [1.0, 3.0]);
    }
}
