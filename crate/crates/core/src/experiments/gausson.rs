//! Closed-form Gaussian solutions and the two-bump initial data.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::imex::{ExactSolution, Jet2};
use crate::mesh::Dim;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `u(x,t) = b exp(i(x·ζ - (a + |ζ|²)t) + (λ/2)|x - 2ζt|²)` with
/// `a = -λ(d - ln b²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gausson {
    dim: Dim,
    b: f64,
    zeta: [f64; 2],
    lambda: f64,
    a: f64,
}

impl Gausson {
    pub fn new(dim: Dim, b: f64, zeta: [f64; 2], lambda: f64) -> Result<Self> {
        if b == 0.0 || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("b = {b} must be nonzero")));
        }
        if !lambda.is_finite() || zeta.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("lambda and zeta must be finite".into()));
        }
        let zeta = match dim {
            Dim::One => [zeta[0], 0.0],
            Dim::Two => zeta,
        };
        let d = dim.as_usize() as f64;
        Ok(Gausson { dim, b, zeta, lambda, a: -lambda * (d - (b * b).ln()) })
    }

    /// `b = 1`, `ζ = 0`, `λ = -1`, the convergence-test solution.
    pub fn standard(dim: Dim) -> Self {
        Gausson::new(dim, 1.0, [0.0; 2], -1.0).expect("valid constants")
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn coords(&self, x: &[f64]) -> [f64; 2] {
        match self.dim {
            Dim::One => [x[0], 0.0],
            Dim::Two => [x[0], x[1]],
        }
    }

    fn zeta_sq(&self) -> f64 {
        self.zeta[0] * self.zeta[0] + self.zeta[1] * self.zeta[1]
    }

    /// `(u, ∇φ, φ_t)` where `u = b e^φ`.
    fn parts(&self, x: &[f64], t: f64) -> (Complex64, [Complex64; 2], Complex64) {
        let x = self.coords(x);
        let (z, l) = (self.zeta, self.lambda);
        let s = [x[0] - 2.0 * z[0] * t, x[1] - 2.0 * z[1] * t];
        let phi = I * (x[0] * z[0] + x[1] * z[1] - (self.a + self.zeta_sq()) * t)
            + 0.5 * l * (s[0] * s[0] + s[1] * s[1]);
        let u = self.b * phi.exp();
        let grad = [I * z[0] + l * s[0], I * z[1] + l * s[1]];
        let phi_t = -I * (self.a + self.zeta_sq()) - 2.0 * l * (z[0] * s[0] + z[1] * s[1]);
        (u, grad, phi_t)
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Complex64 {
        self.parts(x, t).0
    }

    pub fn gradient(&self, x: &[f64], t: f64) -> [Complex64; 2] {
        let (u, g, _) = self.parts(x, t);
        [g[0] * u, g[1] * u]
    }
}

impl ExactSolution for Gausson {
    fn value(&self, x: &[f64], t: f64) -> Complex64 {
        self.eval(x, t)
    }

    fn laplacian(&self, x: &[f64], t: f64) -> Option<Complex64> {
        let (u, g, _) = self.parts(x, t);
        let d = self.dim.as_usize() as f64;
        Some((self.lambda * d + g[0] * g[0] + g[1] * g[1]) * u)
    }

    fn u_t(&self, x: &[f64], t: f64) -> Option<Jet2> {
        let (u, g, pt) = self.parts(x, t);
        let l = self.lambda;
        let gt = [Complex64::from(-2.0 * l * self.zeta[0]), Complex64::from(-2.0 * l * self.zeta[1])];
        let first = [gt[0] + pt * g[0], gt[1] + pt * g[1]];
        let mut hessian = [[Complex64::default(); 2]; 2];
        let d = self.dim.as_usize();
        for j in 0..d {
            for k in 0..d {
                let delta = if j == k { l } else { 0.0 };
                hessian[j][k] = (gt[k] * g[j] + pt * delta + first[j] * g[k]) * u;
            }
        }
        Some(Jet2 { value: pt * u, grad: [first[0] * u, first[1] * u], hessian })
    }

    fn u_tt(&self, x: &[f64], t: f64) -> Option<Complex64> {
        let (u, _, pt) = self.parts(x, t);
        Some((4.0 * self.lambda * self.zeta_sq() + pt * pt) * u)
    }
}

/// `u₀(x) = Σ_k exp(-(a_k/2)(x - x_k)² + i ζ_k x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGausson {
    pub a: [f64; 2],
    pub zeta: [f64; 2],
    pub x: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoGaussonCase {
    /// Well separated, at rest.
    I,
    /// Close, at rest.
    Ii,
    /// Counter-moving.
    Iii,
}

impl std::str::FromStr for TwoGaussonCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(TwoGaussonCase::I),
            "ii" | "2" => Ok(TwoGaussonCase::Ii),
            "iii" | "3" => Ok(TwoGaussonCase::Iii),
            other => Err(Error::InvalidParameter(format!("unknown case {other:?}, expected i, ii or iii"))),
        }
    }
}

impl TwoGaussonCase {
    pub fn label(self) -> &'static str {
        match self {
            TwoGaussonCase::I => "i",
            TwoGaussonCase::Ii => "ii",
            TwoGaussonCase::Iii => "iii",
        }
    }
}

impl TwoGausson {
    pub fn new(a: [f64; 2], zeta: [f64; 2], x: [f64; 2]) -> Result<Self> {
        if !(a[0] > 0.0 && a[1] > 0.0) {
            return Err(Error::InvalidParameter(format!("widths {a:?} must be positive")));
        }
        Ok(TwoGausson { a, zeta, x })
    }

    pub fn case(case: TwoGaussonCase) -> Self {
        let (zeta, x) = match case {
            TwoGaussonCase::I => ([0.0, 0.0], [-5.0, 5.0]),
            TwoGaussonCase::Ii => ([0.0, 0.0], [-2.0, 2.0]),
            TwoGaussonCase::Iii => ([2.0, -2.0], [-30.0, 30.0]),
        };
        TwoGausson { a: [1.0, 1.0], zeta, x }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (0..2)
            .map(|k| {
                let s = x - self.x[k];
                Complex64::new(-0.5 * self.a[k] * s * s, self.zeta[k] * x).exp()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn standard_constants() {
        let g = Gausson::standard(Dim::One);
        assert_eq!(g.a(), 1.0);
        assert_eq!(g.eval(&[0.0], 0.0), c(1.0, 0.0));
        for t in [0.3, 1.0, 7.5] {
            let v = g.eval(&[0.0], t);
            assert!((v - c(t.cos(), -t.sin())).norm() < 1e-15);
        }
        assert_eq!(Gausson::standard(Dim::Two).a(), 2.0);
        let g = Gausson::new(Dim::One, 2.0, [0.0; 2], -1.0).unwrap();
        assert!((g.a() - (1.0 - 4f64.ln())).abs() < 1e-15);
        assert!(Gausson::new(Dim::One, 0.0, [0.0; 2], -1.0).is_err());
    }

    fn samples() -> Vec<(Gausson, Vec<f64>, f64)> {
        vec![
            (Gausson::standard(Dim::One), vec![0.3], 0.4),
            (Gausson::new(Dim::One, 1.3, [0.7, 0.0], -1.5).unwrap(), vec![-0.4], 0.25),
            (Gausson::new(Dim::Two, 0.8, [0.5, -0.3], -1.0).unwrap(), vec![0.2, -0.6], 0.3),
            (Gausson::new(Dim::Two, 1.0, [0.0, 0.0], -2.0).unwrap(), vec![-0.1, 0.5], 0.9),
        ]
    }

    fn fd_t(f: impl Fn(f64) -> Complex64, t: f64) -> Complex64 {
        let h = 1e-5;
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    fn fd_x(f: impl Fn(&[f64]) -> Complex64, x: &[f64], j: usize) -> Complex64 {
        let h = 1e-5;
        let (mut p, mut m) = (x.to_vec(), x.to_vec());
        p[j] += h;
        m[j] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    }

    #[test]
    fn satisfies_the_equation() {
        for (g, x, t) in samples() {
            let u = g.eval(&x, t);
            let lhs = I * g.u_t(&x, t).unwrap().value + g.laplacian(&x, t).unwrap();
            let rhs = g.lambda() * u * (u.norm_sqr()).ln();
            assert!((lhs - rhs).norm() < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (g, x, t) in samples() {
            let d = x.len();
            let ut = g.u_t(&x, t).unwrap();
            assert!((ut.value - fd_t(|s| g.eval(&x, s), t)).norm() < 1e-8);
            let utt = fd_t(|s| g.u_t(&x, s).unwrap().value, t);
            assert!((g.u_tt(&x, t).unwrap() - utt).norm() < 1e-8);
            let mut lap = Complex64::default();
            for j in 0..d {
                let grad_j = fd_x(|y| g.eval(y, t), &x, j);
                assert!((g.gradient(&x, t)[j] - grad_j).norm() < 1e-8);
                lap += fd_x(|y| g.gradient(y, t)[j], &x, j);
                assert!((ut.grad[j] - fd_x(|y| g.u_t(y, t).unwrap().value, &x, j)).norm() < 1e-8);
                for k in 0..d {
                    let h = fd_x(|y| g.u_t(y, t).unwrap().grad[j], &x, k);
                    assert!((ut.hessian[j][k] - h).norm() < 1e-7);
                }
            }
            assert!((g.laplacian(&x, t).unwrap() - lap).norm() < 1e-8);
        }
    }

    #[test]
    fn two_gausson_cases() {
        let u = TwoGausson::case(TwoGaussonCase::I);
        assert!((u.eval(5.0).norm() - 1.0).abs() < 1e-10);
        assert!((u.eval(0.0).norm() - 2.0 * (-12.5f64).exp()).abs() < 1e-15);
        let m = TwoGausson::case(TwoGaussonCase::Iii);
        assert!((m.eval(-30.0) - Complex64::from_polar(1.0, -60.0)).norm() < 1e-12);
        assert_eq!("II".parse::<TwoGaussonCase>().unwrap(), TwoGaussonCase::Ii);
        assert!("iv".parse::<TwoGaussonCase>().is_err());
        assert!(TwoGausson::new([1.0, 0.0], [0.0; 2], [0.0; 2]).is_err());
    }
}
