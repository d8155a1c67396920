//! The bump `s` interpolating between `1` on `U₁` and `0` outside `U₂`.
//!
//! Let `ρ = |y|` for `x <= 3` and `ρ = r = √((x-3)² + y²)` for `x > 3`. The
//! bump is `s = 1 - q(τ)` with `τ = (ρ - ε)/(R - ε)` clamped to `[0, 1]`.
//! The outer radius is `R₁ = 2ε - ε²` along the strip and
//! `R = R₂ + (R₁ - R₂) sin²φ` around the cap, `R₂ = √(4ε² - ε³)`, so that
//! `s` vanishes exactly where it should and is `C¹` across `x = 3`.
//!
//! `q` is a ramp with smooth shoulders: its derivative rises along the
//! quintic smoothstep on `[0, w]`, stays flat, and falls back on
//! `[1 - w, 1]`. The flat slope `1/(1 - w)` keeps `|∂s/∂y|` under `2/ε`.

use rayon::prelude::*;

/// `6u⁵ - 15u⁴ + 10u³` on `[0, 1]`, clamped outside.
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (u * (6.0 * u - 15.0) + 10.0)
}

/// Antiderivative of [`smoothstep`] vanishing at 0.
fn smoothstep_integral(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u.powi(4) * (u * (u - 3.0) + 2.5)
}

/// Cutoff in `‖u‖²`: 1 at 0, 0 from `¾η²` on.
pub fn phi_cutoff(u2: f64, eta: f64) -> f64 {
    1.0 - smoothstep(u2 / (0.75 * eta * eta))
}

const SHOULDER: f64 = 0.1;

fn ramp(tau: f64) -> (f64, f64) {
    let w = SHOULDER;
    let c = 1.0 / (1.0 - w);
    if tau <= 0.0 {
        (0.0, 0.0)
    } else if tau >= 1.0 {
        (1.0, 0.0)
    } else if tau < w {
        (c * w * smoothstep_integral(tau / w), c * smoothstep(tau / w))
    } else if tau <= 1.0 - w {
        (c * (0.5 * w + tau - w), c)
    } else {
        let v = (1.0 - tau) / w;
        (c * ((1.0 - w) - w * smoothstep_integral(v)), c * smoothstep(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub eps: f64,
}

/// Extreme derivative values of the bump over a sampled `U₂₁`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BumpBounds {
    pub max_abs_sy_strip: f64,
    pub max_abs_sx_strip: f64,
    pub max_y_sy_strip: f64,
    pub max_abs_sr_cap: f64,
    pub max_abs_sphi_cap: f64,
}

impl BumpBounds {
    /// The strip and cap bounds: `|∂s/∂y|, |∂s/∂r| < 2/ε`, `|∂s/∂φ| < ε`,
    /// `∂s/∂x = 0` and `y ∂s/∂y <= 0` on the strip.
    pub fn holds(&self, eps: f64) -> bool {
        self.max_abs_sy_strip < 2.0 / eps
            && self.max_abs_sx_strip == 0.0
            && self.max_y_sy_strip <= 0.0
            && self.max_abs_sr_cap < 2.0 / eps
            && self.max_abs_sphi_cap < eps
    }
}

impl Bump {
    pub fn new(eps: f64) -> Self {
        Bump { eps }
    }

    pub fn r1(&self) -> f64 {
        2.0 * self.eps - self.eps * self.eps
    }

    pub fn r2(&self) -> f64 {
        (4.0 * self.eps * self.eps - self.eps.powi(3)).sqrt()
    }

    /// Distance-like coordinate: `|y|` on the strip, `r` on the cap.
    pub fn rho(&self, x: f64, y: f64) -> f64 {
        if x <= 3.0 {
            y.abs()
        } else {
            (x - 3.0).hypot(y)
        }
    }

    pub fn in_u1(&self, x: f64, y: f64) -> bool {
        self.rho(x, y) <= self.eps
    }

    pub fn in_u21(&self, x: f64, y: f64) -> bool {
        let r = self.rho(x, y);
        x >= 0.0 && r >= self.eps && r <= 2.0 * self.eps
    }

    /// `(s, ∂s/∂x, ∂s/∂y)`.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let eps = self.eps;
        if x <= 3.0 {
            let span = self.r1() - eps;
            let tau = (y.abs() - eps) / span;
            let (q, dq) = ramp(tau);
            let sy = if (0.0..1.0).contains(&tau) {
                -dq * y.signum() / span
            } else {
                0.0
            };
            return (1.0 - q, 0.0, sy);
        }
        let dx = x - 3.0;
        let r2 = dx * dx + y * y;
        let r = r2.sqrt();
        let d = self.r1() - self.r2();
        let big_r = self.r2() + d * y * y / r2;
        let span = big_r - eps;
        let tau = (r - eps) / span;
        let (q, dq) = ramp(tau);
        if !(0.0..1.0).contains(&tau) {
            return (1.0 - q, 0.0, 0.0);
        }
        let r4 = r2 * r2;
        let rx = dx / r;
        let ry = y / r;
        let big_rx = -2.0 * d * y * y * dx / r4;
        let big_ry = 2.0 * d * y * dx * dx / r4;
        let tx = (rx * span - (r - eps) * big_rx) / (span * span);
        let ty = (ry * span - (r - eps) * big_ry) / (span * span);
        (1.0 - q, -dq * tx, -dq * ty)
    }

    /// Samples `U₂₁` on a grid of the given step and records the derivative
    /// extremes in strip and cap coordinates.
    pub fn bounds(&self, step: f64) -> BumpBounds {
        let eps = self.eps;
        let nx = ((3.0 + 2.0 * eps) / step).floor() as i64;
        let ny = (2.0 * eps / step).floor() as i64;
        (0..=nx)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 * step;
                let mut b = BumpBounds {
                    max_abs_sy_strip: 0.0,
                    max_abs_sx_strip: 0.0,
                    max_y_sy_strip: f64::NEG_INFINITY,
                    max_abs_sr_cap: 0.0,
                    max_abs_sphi_cap: 0.0,
                };
                for j in -ny..=ny {
                    let y = j as f64 * step;
                    if !self.in_u21(x, y) {
                        continue;
                    }
                    let (_, sx, sy) = self.eval(x, y);
                    if x <= 3.0 {
                        b.max_abs_sy_strip = b.max_abs_sy_strip.max(sy.abs());
                        b.max_abs_sx_strip = b.max_abs_sx_strip.max(sx.abs());
                        b.max_y_sy_strip = b.max_y_sy_strip.max(y * sy);
                    } else {
                        let r = (x - 3.0).hypot(y);
                        let (c, s) = ((x - 3.0) / r, y / r);
                        let sr = sx * c + sy * s;
                        let sphi = -sx * r * s + sy * r * c;
                        b.max_abs_sr_cap = b.max_abs_sr_cap.max(sr.abs());
                        b.max_abs_sphi_cap = b.max_abs_sphi_cap.max(sphi.abs());
                    }
                }
                b
            })
            .reduce(
                || BumpBounds {
                    max_abs_sy_strip: 0.0,
                    max_abs_sx_strip: 0.0,
                    max_y_sy_strip: f64::NEG_INFINITY,
                    max_abs_sr_cap: 0.0,
                    max_abs_sphi_cap: 0.0,
                },
                |a, b| BumpBounds {
                    max_abs_sy_strip: a.max_abs_sy_strip.max(b.max_abs_sy_strip),
                    max_abs_sx_strip: a.max_abs_sx_strip.max(b.max_abs_sx_strip),
                    max_y_sy_strip: a.max_y_sy_strip.max(b.max_y_sy_strip),
                    max_abs_sr_cap: a.max_abs_sr_cap.max(b.max_abs_sr_cap),
                    max_abs_sphi_cap: a.max_abs_sphi_cap.max(b.max_abs_sphi_cap),
                },
            )
    }
}
