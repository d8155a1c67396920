//! Numerical local models of the splitting construction.
//!
//! All models live on the half-plane `Z = {x >= 0}` whose boundary line
//! `{x = 0}` plays the role of `Y`. The family `D = y³ - yx² + ay` moves an
//! interior saddle onto the boundary as `a` crosses zero; `G` is the
//! deformed function built from `D` with a bump `s`; `A` and `B` are the real
//! and imaginary parts of a cubic in `x/√3 - iy`.

use thiserror::Error;

mod bump;
mod critical;
mod flow;
mod models;
mod scan;

pub use bump::{phi_cutoff, smoothstep, Bump, BumpBounds};
pub use critical::{
    classify_boundary_point, eigen_sym2, find_critical_points, ClassifiedPoint, CriticalScan, Domain, PointClass,
};
pub use flow::{
    ab_domain, first_integral_drift, flow, orthogonality_residual, FlowField, FlowPath, FlowSample, StopReason,
};
pub use models::{euclidean_pairing, model_ab, model_d, AbEval, ModelA, ModelB, ModelD, ModelG, ScalarField};
pub use scan::{homotopy_domain, homotopy_scan, scan_u21, transition_estimate, HomotopyRow, U21Scan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalError {
    #[error("Newton iteration did not converge from {0} seeds")]
    NonConvergence(usize),
    #[error("integrator step fell below 1e-12 at t = {0}")]
    StepUnderflow(f64),
    #[error("scan region is empty")]
    RegionEmpty,
    #[error("normal derivative vanishes at ({0}, {1}); boundary point cannot be classified")]
    DegenerateNormal(f64, f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub a: f64,
    pub delta: f64,
    pub eps: f64,
    pub eta: f64,
    pub grid_step: f64,
    pub dt: f64,
    pub newton_tol: f64,
    pub boundary_tol: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            a: 1.0,
            delta: 0.03,
            eps: 0.1,
            eta: 1.0,
            grid_step: 0.1,
            dt: 1e-3,
            newton_tol: 1e-10,
            boundary_tol: 1e-7,
        }
    }
}

impl ModelParams {
    /// Largest `δ` for which every bound used by the construction holds.
    pub fn delta_bound(eps: f64) -> f64 {
        eps * eps / 2.0
    }

    pub fn check_scales(&self) -> Result<(), LocalError> {
        if !(self.eps > 0.0 && self.eta > 0.0 && self.delta > 0.0) {
            return Err(LocalError::InvalidParams("eps, eta and delta must be positive".into()));
        }
        if self.eps > self.eta / 10.0 {
            return Err(LocalError::InvalidParams(format!(
                "eps = {} must not exceed eta/10 = {}",
                self.eps,
                self.eta / 10.0
            )));
        }
        Ok(())
    }

    pub fn in_proven_regime(&self) -> bool {
        self.delta < Self::delta_bound(self.eps)
    }
}
