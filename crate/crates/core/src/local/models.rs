use super::bump::Bump;

/// A smooth function on the half-plane with analytic first derivatives.
pub trait ScalarField: Sync {
    fn value(&self, p: [f64; 2]) -> f64;
    fn gradient(&self, p: [f64; 2]) -> [f64; 2];

    /// Symmetric Hessian; central differences of the gradient by default.
    fn hessian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let h = 1e-6;
        let gxp = self.gradient([p[0] + h, p[1]]);
        let gxm = self.gradient([p[0] - h, p[1]]);
        let gyp = self.gradient([p[0], p[1] + h]);
        let gym = self.gradient([p[0], p[1] - h]);
        let fxx = (gxp[0] - gxm[0]) / (2.0 * h);
        let fyy = (gyp[1] - gym[1]) / (2.0 * h);
        let fxy = 0.5 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / (2.0 * h);
        [[fxx, fxy], [fxy, fyy]]
    }
}

/// `D(x, y) = y³ - yx² + ay`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelD {
    pub a: f64,
}

impl ScalarField for ModelD {
    fn value(&self, [x, y]: [f64; 2]) -> f64 {
        y * y * y - y * x * x + self.a * y
    }

    fn gradient(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        [-2.0 * x * y, 3.0 * y * y - x * x + self.a]
    }

    fn hessian(&self, [x, y]: [f64; 2]) -> [[f64; 2]; 2] {
        [[-2.0 * y, -2.0 * x], [-2.0 * x, 6.0 * y]]
    }
}

/// Value, gradient and Hessian of `D`.
pub fn model_d(x: f64, y: f64, a: f64) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let d = ModelD { a };
    (d.value([x, y]), d.gradient([x, y]), d.hessian([x, y]))
}

/// The deformed function on `U₂` at `u = 0`:
/// `G_t = y³ - yx² + y - t(δ+1) s y + ½`; `t = 1` is `G` itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelG {
    pub delta: f64,
    pub eps: f64,
    pub t: f64,
}

impl ModelG {
    pub fn new(delta: f64, eps: f64) -> Self {
        ModelG { delta, eps, t: 1.0 }
    }

    fn bump(&self) -> Bump {
        Bump::new(self.eps)
    }
}

impl ScalarField for ModelG {
    fn value(&self, [x, y]: [f64; 2]) -> f64 {
        let (s, _, _) = self.bump().eval(x, y);
        y * y * y - y * x * x + y - self.t * (self.delta + 1.0) * s * y + 0.5
    }

    fn gradient(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        let (s, sx, sy) = self.bump().eval(x, y);
        let c = self.t * (self.delta + 1.0);
        [-2.0 * x * y - c * sx * y, 3.0 * y * y - x * x + 1.0 - c * (s + sy * y)]
    }
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// `A = x³/(3√3) - √3xy² - x/√3 + 2/(3√3)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModelA;

/// `B = y³ - yx² + y`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModelB;

impl ScalarField for ModelA {
    fn value(&self, [x, y]: [f64; 2]) -> f64 {
        x * x * x / (3.0 * SQRT3) - SQRT3 * x * y * y - x / SQRT3 + 2.0 / (3.0 * SQRT3)
    }

    fn gradient(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        [x * x / SQRT3 - SQRT3 * y * y - 1.0 / SQRT3, -2.0 * SQRT3 * x * y]
    }

    fn hessian(&self, [x, y]: [f64; 2]) -> [[f64; 2]; 2] {
        [
            [2.0 * x / SQRT3, -2.0 * SQRT3 * y],
            [-2.0 * SQRT3 * y, -2.0 * SQRT3 * x],
        ]
    }
}

impl ScalarField for ModelB {
    fn value(&self, p: [f64; 2]) -> f64 {
        ModelD { a: 1.0 }.value(p)
    }

    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        ModelD { a: 1.0 }.gradient(p)
    }

    fn hessian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        ModelD { a: 1.0 }.hessian(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbEval {
    pub a: f64,
    pub b: f64,
    pub grad_a: [f64; 2],
    pub grad_b: [f64; 2],
}

pub fn model_ab(x: f64, y: f64) -> AbEval {
    AbEval {
        a: ModelA.value([x, y]),
        b: ModelB.value([x, y]),
        grad_a: ModelA.gradient([x, y]),
        grad_b: ModelB.gradient([x, y]),
    }
}

/// `⟨∇A, ∇B⟩` in the Euclidean metric; equals `(4/√3)·xy·(x² - 3y² - 1)`.
pub fn euclidean_pairing(x: f64, y: f64) -> f64 {
    let e = model_ab(x, y);
    e.grad_a[0] * e.grad_b[0] + e.grad_a[1] * e.grad_b[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_gradient(f: &dyn ScalarField, p: [f64; 2]) {
        let h = 1e-6;
        let g = f.gradient(p);
        let fx = (f.value([p[0] + h, p[1]]) - f.value([p[0] - h, p[1]])) / (2.0 * h);
        let fy = (f.value([p[0], p[1] + h]) - f.value([p[0], p[1] - h])) / (2.0 * h);
        for (a, b) in [(g[0], fx), (g[1], fy)] {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{p:?}: {a} vs {b}");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = ModelG::new(0.004, 0.1);
        for _ in 0..100 {
            let p = [rng.gen_range(0.0..4.0), rng.gen_range(-2.0..2.0)];
            check_gradient(&ModelD { a: 0.7 }, p);
            check_gradient(&ModelA, p);
            check_gradient(&ModelB, p);
            let q = [rng.gen_range(0.0..3.2), rng.gen_range(-0.2..0.2)];
            check_gradient(&g, q);
        }
    }

    #[test]
    fn d_examples() {
        let (v, g, _) = model_d(0.0, 0.0, 1.0);
        assert_eq!((v, g), (0.0, [0.0, 1.0]));
        let (_, g, h) = model_d(1.0, 0.0, 1.0);
        assert_eq!(g, [0.0, 0.0]);
        assert_eq!(h, [[0.0, -2.0], [-2.0, 0.0]]);
        let (_, g, _) = model_d(0.0, 0.1, -0.03);
        assert!(g[0] == 0.0 && g[1].abs() < 1e-15);
    }

    #[test]
    fn ab_examples() {
        let e = model_ab(1.0, 0.0);
        assert!(e.a.abs() < 1e-15 && e.b == 0.0);
        let e = model_ab(0.0, 0.5);
        assert_eq!(e.b, 0.125 + 0.5);
        assert_eq!(e.grad_b[0], 0.0);
        let e = model_ab(SQRT3, 0.0);
        assert!((e.a - 2.0 / (3.0 * SQRT3)).abs() < 1e-15 && e.b == 0.0);
    }

    #[test]
    fn boundary_line_is_invariant() {
        let g = ModelG::new(0.004, 0.1);
        for i in -50..=50 {
            let y = i as f64 * 0.01;
            assert_eq!(ModelD { a: 0.3 }.gradient([0.0, y])[0], 0.0);
            assert_eq!(ModelB.gradient([0.0, y])[0], 0.0);
            assert_eq!(g.gradient([0.0, y])[0], 0.0);
        }
    }

    #[test]
    fn g_equals_f_outside_u2_and_shifted_d_inside_u1() {
        let g = ModelG::new(0.004, 0.1);
        let p = [1.0, 0.5];
        assert_eq!(g.value(p), ModelD { a: 1.0 }.value(p) + 0.5);
        let q = [0.5, 0.05];
        assert!((g.value(q) - (ModelD { a: -0.004 }.value(q) + 0.5)).abs() < 1e-15);
    }
}
