//! The logarithmic nonlinearity `f(z) = z ln|z|` (with `f(0) = 0`) and
//! executable forms of its continuity estimates.
//!
//! The `check_*` predicates evaluate an inequality in floating point and
//! return whether it held. They accept a small slack so that rounding in the
//! evaluation itself cannot produce a false counterexample; the slack is
//! stated on each predicate.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `z ln|z|`, exactly zero at `z = 0`.
#[inline]
pub fn log_f(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::default()
    } else {
        z * r.ln()
    }
}

/// Absolute slack used by [`check_lipschitz_bound`] and [`check_holder_bound`].
pub const ABS_SLACK: f64 = 1e-12;
/// Relative slack (in units of `|u - v|²`) used by [`check_imaginary_inequality`].
pub const REL_SLACK: f64 = 1e-12;

/// Floating-point error allowance for `f(u) - f(v)`: a few ulps of the
/// operands.
fn rounding_allowance(fu: Complex64, fv: Complex64) -> f64 {
    8.0 * f64::EPSILON * (fu.norm() + fv.norm())
}

/// Threshold `δ_α = exp(α / (α - 1))` below which `H_α` is increasing.
pub fn delta_alpha(alpha: f64) -> f64 {
    (alpha / (alpha - 1.0)).exp()
}

/// Hölder constant `H_α(x) = (2x)^{1-α} (|ln x| + 1)`, with `H_α(0) = 0`.
pub fn holder_constant(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (2.0 * x).powf(1.0 - alpha) * (x.ln().abs() + 1.0)
    }
}

/// `max_{ε ≤ y ≤ Λ} (|ln y| + 1)`; `|ln y|` is monotone on either side of 1 so
/// the maximum sits at an endpoint.
pub fn upsilon(epsilon: f64, lambda_inf: f64) -> f64 {
    epsilon.ln().abs().max(lambda_inf.ln().abs()) + 1.0
}

/// Parameters of the Hölder/Lipschitz split of `‖f(u) - f(v)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderParams {
    pub alpha: f64,
    pub epsilon: f64,
    pub delta_alpha: f64,
    pub h_alpha_eps: f64,
    /// `None` when `Λ_∞ ≤ ε` (the interval `[ε, Λ_∞]` is empty).
    pub upsilon: Option<f64>,
    pub lambda_inf: f64,
}

impl HolderParams {
    pub fn new(alpha: f64, epsilon: f64, lambda_inf: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1)")));
        }
        let delta = delta_alpha(alpha);
        if !(epsilon > 0.0 && epsilon <= delta) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} not in (0, {delta}]")));
        }
        if !(lambda_inf >= 0.0) {
            return Err(Error::InvalidParameter(format!("Lambda_inf = {lambda_inf} is negative")));
        }
        Ok(HolderParams {
            alpha,
            epsilon,
            delta_alpha: delta,
            h_alpha_eps: holder_constant(alpha, epsilon),
            upsilon: (lambda_inf > epsilon).then(|| upsilon(epsilon, lambda_inf)),
            lambda_inf,
        })
    }
}

/// `|f(u) - f(v)| ≤ (|ln y| + 1)|u - v|` with `y = max(|u|, |v|)`, up to
/// [`ABS_SLACK`].
pub fn check_lipschitz_bound(u: Complex64, v: Complex64) -> bool {
    let (fu, fv) = (log_f(u), log_f(v));
    let lhs = (fu - fv).norm();
    let y = u.norm().max(v.norm());
    if y == 0.0 {
        return lhs == 0.0;
    }
    let rhs = (y.ln().abs() + 1.0) * (u - v).norm();
    lhs <= rhs + ABS_SLACK + rounding_allowance(fu, fv)
}

/// `|f(u) - f(v)| ≤ H_α(ε)|u - v|^α` for `|u|, |v| ≤ ε ≤ δ_α`, up to
/// [`ABS_SLACK`]. Inputs outside the disk are an error, not a failure.
pub fn check_holder_bound(u: Complex64, v: Complex64, alpha: f64, epsilon: f64) -> Result<bool> {
    let p = HolderParams::new(alpha, epsilon, 0.0)?;
    for z in [u, v] {
        if z.norm() > epsilon {
            return Err(Error::OutsideHolderDisk { modulus: z.norm(), epsilon });
        }
    }
    let (fu, fv) = (log_f(u), log_f(v));
    let lhs = (fu - fv).norm();
    let rhs = p.h_alpha_eps * (u - v).norm().powf(alpha);
    Ok(lhs <= rhs + ABS_SLACK + rounding_allowance(fu, fv))
}

/// `|Im[(f(u) - f(v)) conj(u - v)]| ≤ |u - v|²`, up to `REL_SLACK · |u - v|²`
/// plus the rounding of the product.
pub fn check_imaginary_inequality(u: Complex64, v: Complex64) -> bool {
    let (fu, fv) = (log_f(u), log_f(v));
    let w = u - v;
    let lhs = ((fu - fv) * w.conj()).im.abs();
    let rhs = w.norm_sqr();
    lhs <= rhs * (1.0 + REL_SLACK) + rounding_allowance(fu, fv) * w.norm()
}

/// Which estimate [`l2_split_bound`] applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitCase {
    /// `Λ_∞ > ε`: Hölder part plus Lipschitz part.
    Mixed,
    /// `Λ_∞ ≤ ε`: Hölder part only.
    HolderOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitBound {
    pub case: SplitCase,
    /// `Σ w |f(u) - f(v)|²`
    pub lhs: f64,
    /// `H_α²(ε) Σ w |u - v|^{2α}`, plus `Υ² Σ w |u - v|²` in the mixed case.
    pub rhs: f64,
    pub params: HolderParams,
}

impl SplitBound {
    /// `lhs ≤ rhs` up to a relative slack.
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_slack) + ABS_SLACK * ABS_SLACK
    }
}

fn check_samples(u: &[Complex64], v: &[Complex64], w: &[f64]) -> Result<()> {
    if u.len() != v.len() || u.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: v.len().min(w.len()) });
    }
    if let Some(bad) = w.iter().find(|&&x| !(x >= 0.0)) {
        return Err(Error::InvalidParameter(format!("negative quadrature weight {bad}")));
    }
    Ok(())
}

/// Quadrature version of the `L²` bound for `f(u) - f(v)`, picking the case
/// from `Λ_∞ = max(max|u|, max|v|)`.
pub fn l2_split_bound(u: &[Complex64], v: &[Complex64], w: &[f64], alpha: f64, epsilon: f64) -> Result<SplitBound> {
    check_samples(u, v, w)?;
    let lambda_inf = u.iter().chain(v).map(|z| z.norm()).fold(0.0, f64::max);
    let params = HolderParams::new(alpha, epsilon, lambda_inf)?;
    let mut lhs = 0.0;
    let mut holder = 0.0;
    let mut lipschitz = 0.0;
    for ((&a, &b), &wk) in u.iter().zip(v).zip(w) {
        let d = (a - b).norm();
        lhs += wk * (log_f(a) - log_f(b)).norm_sqr();
        holder += wk * d.powf(2.0 * alpha);
        lipschitz += wk * d * d;
    }
    let h2 = params.h_alpha_eps * params.h_alpha_eps;
    let (case, rhs) = match params.upsilon {
        Some(ups) => (SplitCase::Mixed, h2 * holder + ups * ups * lipschitz),
        None => (SplitCase::HolderOnly, h2 * holder),
    };
    Ok(SplitBound { case, lhs, rhs, params })
}

/// Mixed-case bound only; rejects `Λ_∞ ≤ ε` instead of switching cases.
pub fn l2_split_bound_mixed(u: &[Complex64], v: &[Complex64], w: &[f64], alpha: f64, epsilon: f64) -> Result<SplitBound> {
    let b = l2_split_bound(u, v, w, alpha, epsilon)?;
    if b.case != SplitCase::Mixed {
        return Err(Error::InvalidParameter(format!(
            "Lambda_inf = {} does not exceed epsilon = {epsilon}",
            b.params.lambda_inf
        )));
    }
    Ok(b)
}

/// Lipschitz-only regime: when every sample has `|u|, |v| > ε`, returns
/// `(‖f(u) - f(v)‖, Υ(ε, Λ_∞) ‖u - v‖)` in the discrete norm.
pub fn lipschitz_regime_bound(u: &[Complex64], v: &[Complex64], w: &[f64], epsilon: f64) -> Result<(f64, f64)> {
    check_samples(u, v, w)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    if let Some(z) = u.iter().chain(v).find(|z| z.norm() <= epsilon) {
        return Err(Error::InvalidParameter(format!("|z| = {} is not above epsilon = {epsilon}", z.norm())));
    }
    let lambda_inf = u.iter().chain(v).map(|z| z.norm()).fold(0.0, f64::max);
    let ups = upsilon(epsilon, lambda_inf);
    let (mut lhs, mut diff) = (0.0, 0.0);
    for ((&a, &b), &wk) in u.iter().zip(v).zip(w) {
        lhs += wk * (log_f(a) - log_f(b)).norm_sqr();
        diff += wk * (a - b).norm_sqr();
    }
    Ok((lhs.sqrt(), ups * diff.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
        let r = radius * rng.gen::<f64>().sqrt();
        Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    }

    #[test]
    fn special_values() {
        assert_eq!(log_f(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(log_f(c(1.0, 0.0)), c(0.0, 0.0));
        assert_eq!(log_f(c(0.0, 1.0)), c(0.0, 0.0));
        assert!((log_f(c(E, 0.0)) - c(E, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn continuous_at_zero() {
        let mut prev = f64::INFINITY;
        for k in 1..=300 {
            let r = 10f64.powi(-k);
            let v = log_f(c(r, 0.0)).norm();
            assert!(v <= r * r.ln().abs() * (1.0 + 1e-15));
            if k > 1 {
                assert!(v < prev);
            }
            prev = v;
        }
        assert!(prev < 1e-296);
    }

    #[test]
    fn tiny_modulus_is_stable() {
        // |z| underflows if squared first
        let z = c(3e-300, 4e-300);
        let expected = z * (5e-300f64).ln();
        assert!((log_f(z) - expected).norm() <= 1e-15 * expected.norm());
    }

    #[test]
    fn delta_alpha_half_is_inverse_e() {
        assert!((delta_alpha(0.5) - (-1.0f64).exp()).abs() < 1e-16);
        let mut prev = 1.0;
        for k in 1..100 {
            let d = delta_alpha(k as f64 / 100.0);
            assert!(d < prev);
            prev = d;
        }
        assert!(delta_alpha(1.0 - 1e-9) < 1e-300);
    }

    #[test]
    fn holder_constant_at_threshold() {
        let h = holder_constant(0.5, (-1.0f64).exp());
        assert!((h - 2.0 * (2.0 / E).sqrt()).abs() < 1e-15);
        assert!((h - 1.7155).abs() < 1e-4);
    }

    #[test]
    fn holder_constant_unimodal() {
        for &alpha in &[0.2, 0.5, 0.8] {
            let d = delta_alpha(alpha);
            let below: Vec<f64> = (1..=200).map(|k| holder_constant(alpha, d * k as f64 / 200.0)).collect();
            assert!(below.windows(2).all(|w| w[0] < w[1]));
            let above: Vec<f64> = (0..200)
                .map(|k| holder_constant(alpha, d + (1.0 - d) * (k as f64 + 0.5) / 200.0))
                .collect();
            assert!(above.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn upsilon_is_endpoint_max() {
        for &(eps, lam) in &[(0.1, 0.5), (0.1, 3.0), (0.3, 20.0), (1e-5, 1.0)] {
            let brute = (0..=10_000)
                .map(|k| eps + (lam - eps) * k as f64 / 10_000.0)
                .map(|y: f64| y.ln().abs() + 1.0)
                .fold(0.0, f64::max);
            assert!((upsilon(eps, lam) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(HolderParams::new(0.0, 0.1, 1.0).is_err());
        assert!(HolderParams::new(1.0, 0.1, 1.0).is_err());
        assert!(HolderParams::new(0.5, 0.5, 1.0).is_err());
        assert!(HolderParams::new(0.5, 0.2, 0.1).unwrap().upsilon.is_none());
        assert!(HolderParams::new(0.5, 0.2, 0.3).unwrap().upsilon.is_some());
    }

    #[test]
    fn lipschitz_examples() {
        assert!(check_lipschitz_bound(c(0.0, 0.0), c(0.0, 0.0)));
        assert!(check_lipschitz_bound(c(1.0, 0.0), c(1.0 + 1e-6, 0.0)));
    }

    #[test]
    fn lipschitz_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let (u, v) = (in_disk(&mut rng, 10.0), in_disk(&mut rng, 10.0));
            assert!(check_lipschitz_bound(u, v), "{u} {v}");
        }
    }

    #[test]
    fn holder_random_pairs() {
        let eps = (-1.0f64).exp();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100_000 {
            let (u, v) = (in_disk(&mut rng, eps), in_disk(&mut rng, eps));
            assert!(check_holder_bound(u, v, 0.5, eps).unwrap(), "{u} {v}");
        }
    }

    #[test]
    fn holder_rejects_points_outside_disk() {
        let r = check_holder_bound(c(0.5, 0.0), c(0.0, 0.0), 0.5, 0.3);
        assert!(matches!(r, Err(Error::OutsideHolderDisk { .. })));
    }

    #[test]
    fn imaginary_examples() {
        let z = c(0.3, -2.0);
        let w = z - z;
        assert_eq!(((log_f(z) - log_f(z)) * w.conj()).im, 0.0);
        assert!(check_imaginary_inequality(z, z));
        assert!(check_imaginary_inequality(c(1.0, 0.0), c(0.0, 1.0)));
    }

    #[test]
    fn imaginary_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100_000 {
            let (u, v) = (in_disk(&mut rng, 1e3), in_disk(&mut rng, 1e3));
            assert!(check_imaginary_inequality(u, v), "{u} {v}");
        }
    }

    fn random_batch(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> (Vec<Complex64>, Vec<Complex64>, Vec<f64>) {
        let u = (0..n).map(|_| in_disk(rng, radius)).collect();
        let v = (0..n).map(|_| in_disk(rng, radius)).collect();
        let w = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        (u, v, w)
    }

    #[test]
    fn split_bound_identical_samples() {
        let u = vec![c(0.1, 0.2), c(2.0, -1.0)];
        let b = l2_split_bound(&u, &u, &[0.5, 0.5], 0.5, 0.2).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert!(b.holds(0.0));
    }

    #[test]
    fn split_bound_both_cases() {
        let eps = (-1.0f64).exp();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let (u, v, w) = random_batch(&mut rng, 50, eps);
            let b = l2_split_bound(&u, &v, &w, 0.5, eps).unwrap();
            assert_eq!(b.case, SplitCase::HolderOnly);
            assert!(b.holds(1e-12));
            assert!(l2_split_bound_mixed(&u, &v, &w, 0.5, eps).is_err());

            let (u, v, w) = random_batch(&mut rng, 50, 5.0);
            let b = l2_split_bound(&u, &v, &w, 0.5, eps).unwrap();
            assert_eq!(b.case, SplitCase::Mixed);
            assert!(b.holds(1e-12));
        }
    }

    #[test]
    fn split_bound_rejects_negative_weights() {
        let u = [c(0.1, 0.0)];
        assert!(l2_split_bound(&u, &u, &[-1.0], 0.5, 0.2).is_err());
    }

    #[test]
    fn lipschitz_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eps = 0.2;
        for _ in 0..200 {
            let mut draw = || loop {
                let z = in_disk(&mut rng, 4.0);
                if z.norm() > eps {
                    break z;
                }
            };
            let u: Vec<_> = (0..40).map(|_| draw()).collect();
            let v: Vec<_> = (0..40).map(|_| draw()).collect();
            let (lhs, rhs) = lipschitz_regime_bound(&u, &v, &[0.025; 40], eps).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
        assert!(lipschitz_regime_bound(&[c(0.1, 0.0)], &[c(1.0, 0.0)], &[1.0], eps).is_err());
    }
}
