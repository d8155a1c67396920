//! Fixed-step RK4 integration of ascending gradient flows.

use serde::Serialize;

use super::critical::Domain;
use super::models::{ModelA, ModelB, ModelD, ModelG, ScalarField};
use super::{LocalError, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowField {
    GradD(ModelD),
    GradG(ModelG),
    /// `(3 ∂B/∂x, ∂B/∂y)`: the gradient of `B` in the metric where
    /// `(x/√3, y)` are orthonormal. `A` is constant along it.
    RescaledB,
}

impl FlowField {
    pub fn velocity(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            FlowField::GradD(d) => d.gradient(p),
            FlowField::GradG(g) => g.gradient(p),
            FlowField::RescaledB => {
                let g = ModelB.gradient(p);
                [3.0 * g[0], g[1]]
            }
        }
    }

    /// The function increasing along the flow.
    pub fn potential(&self, p: [f64; 2]) -> f64 {
        match self {
            FlowField::GradD(d) => d.value(p),
            FlowField::GradG(g) => g.value(p),
            FlowField::RescaledB => ModelB.value(p),
        }
    }

    /// The first integral, where one is known.
    pub fn first_integral(&self, p: [f64; 2]) -> Option<f64> {
        match self {
            FlowField::RescaledB => Some(ModelA.value(p)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TimeOut,
    LeftDomain,
    ConvergedToCritical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub f: f64,
    pub a: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowPath {
    pub samples: Vec<FlowSample>,
    pub reason: StopReason,
}

impl FlowPath {
    pub fn is_ascending(&self, tol_per_step: f64) -> bool {
        let tol = tol_per_step * self.samples.len() as f64;
        self.samples.windows(2).all(|w| w[1].f >= w[0].f - tol)
    }
}

fn rk4(field: &FlowField, p: [f64; 2], h: f64) -> [f64; 2] {
    let add = |p: [f64; 2], k: [f64; 2], s: f64| [p[0] + s * k[0], p[1] + s * k[1]];
    let k1 = field.velocity(p);
    let k2 = field.velocity(add(p, k1, h / 2.0));
    let k3 = field.velocity(add(p, k2, h / 2.0));
    let k4 = field.velocity(add(p, k3, h));
    [
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Advances by `h`, halving the step wherever a single RK4 step would make
/// the potential decrease.
fn advance(field: &FlowField, p: [f64; 2], h: f64, t: f64) -> Result<[f64; 2], LocalError> {
    let f0 = field.potential(p);
    let q = rk4(field, p, h);
    if field.potential(q) >= f0 - 1e-12 * (1.0 + f0.abs()) {
        return Ok(q);
    }
    if h / 2.0 < 1e-12 {
        return Err(LocalError::StepUnderflow(t));
    }
    let mid = advance(field, p, h / 2.0, t)?;
    advance(field, mid, h / 2.0, t + h / 2.0)
}

/// Integrates from `start` for time `t_end` with step `dt`, stopping early
/// on leaving `domain` or reaching a zero of the field.
pub fn flow(
    field: &FlowField,
    start: [f64; 2],
    t_end: f64,
    dt: f64,
    domain: &Domain,
    params: &ModelParams,
) -> Result<FlowPath, LocalError> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(LocalError::InvalidParams(
            "dt must be positive and T non-negative".into(),
        ));
    }
    let sample = |t: f64, p: [f64; 2]| FlowSample {
        t,
        x: p[0],
        y: p[1],
        f: field.potential(p),
        a: field.first_integral(p),
    };
    let mut p = start;
    let mut samples = vec![sample(0.0, p)];
    let steps = (t_end / dt).round() as u64;
    for i in 0..steps {
        let v = field.velocity(p);
        if v[0].hypot(v[1]) < params.newton_tol {
            return Ok(FlowPath {
                samples,
                reason: StopReason::ConvergedToCritical,
            });
        }
        let t = i as f64 * dt;
        let q = advance(field, p, dt, t)?;
        if !domain.contains(q, 0.0) {
            return Ok(FlowPath {
                samples,
                reason: StopReason::LeftDomain,
            });
        }
        p = q;
        samples.push(sample((i + 1) as f64 * dt, p));
    }
    let v = field.velocity(p);
    let reason = if v[0].hypot(v[1]) < params.newton_tol {
        StopReason::ConvergedToCritical
    } else {
        StopReason::TimeOut
    };
    Ok(FlowPath { samples, reason })
}

/// Domain used for the `A`/`B` experiments.
pub fn ab_domain() -> Domain {
    Domain::new((0.0, 4.0), (-3.0, 3.0))
}

/// Largest deviation of `A` from its starting value along the rescaled
/// `∇B` flow.
pub fn first_integral_drift(start: [f64; 2], t_end: f64, dt: f64, params: &ModelParams) -> Result<f64, LocalError> {
    let path = flow(&FlowField::RescaledB, start, t_end, dt, &ab_domain(), params)?;
    let a0 = ModelA.value(start);
    Ok(path
        .samples
        .iter()
        .map(|s| (s.a.expect("first integral") - a0).abs())
        .fold(0.0, f64::max))
}

/// `max |3 A_x B_x + A_y B_y|` over the samples.
pub fn orthogonality_residual(samples: &[[f64; 2]]) -> f64 {
    samples
        .iter()
        .map(|&p| {
            let ga = ModelA.gradient(p);
            let gb = ModelB.gradient(p);
            (3.0 * ga[0] * gb[0] + ga[1] * gb[1]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide() -> Domain {
        Domain::new((0.0, 4.0), (-3.0, 3.0))
    }

    #[test]
    fn gradient_flow_ascends() {
        let p = flow(
            &FlowField::GradD(ModelD { a: 1.0 }),
            [0.5, -0.5],
            1.0,
            1e-3,
            &wide(),
            &ModelParams::default(),
        )
        .unwrap();
        assert!(p.samples.len() > 10);
        assert!(p.samples.windows(2).all(|w| w[1].f > w[0].f));
    }

    #[test]
    fn boundary_start_stays_on_boundary() {
        let p = flow(
            &FlowField::GradD(ModelD { a: 1.0 }),
            [0.0, -0.5],
            1.0,
            1e-3,
            &wide(),
            &ModelParams::default(),
        )
        .unwrap();
        assert!(p.samples.iter().all(|s| s.x == 0.0));
    }

    #[test]
    fn start_at_critical_point() {
        let p = flow(
            &FlowField::GradD(ModelD { a: 1.0 }),
            [1.0, 0.0],
            1.0,
            1e-3,
            &wide(),
            &ModelParams::default(),
        )
        .unwrap();
        assert_eq!(p.reason, StopReason::ConvergedToCritical);
        assert_eq!(p.samples.len(), 1);
    }

    #[test]
    fn drift_examples() {
        let params = ModelParams::default();
        assert!(first_integral_drift([2.0, 0.5], 1.0, 1e-3, &params).unwrap() <= 1e-6);
        assert_eq!(first_integral_drift([2.0, 0.5], 0.0, 1e-3, &params).unwrap(), 0.0);
        let path = flow(&FlowField::RescaledB, [0.0, 1.0], 1.0, 1e-3, &ab_domain(), &params).unwrap();
        assert!(path.samples.iter().all(|s| s.x == 0.0));
        assert_eq!(first_integral_drift([0.0, 1.0], 1.0, 1e-3, &params).unwrap(), 0.0);
    }

    #[test]
    fn residual_at_branch_point() {
        assert_eq!(orthogonality_residual(&[[1.0, 0.0]]), 0.0);
    }
}
