//! Discrete nonlinear Grönwall bound for sequences with
//! `y(n) ≤ c₁ + c₂ Σ_{m<n} y(m)^α + c₃ Σ_{m<n} y(m)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallParams {
    c1: f64,
    c2: f64,
    c3: f64,
    alpha: f64,
}

impl GronwallParams {
    /// `c₁ > 0`, `c₂, c₃ ≥ 0`, `α ∈ (0, 1]`. Zero `c₂` or `c₃` evaluates the
    /// limiting form of the bound.
    pub fn new(c1: f64, c2: f64, c3: f64, alpha: f64) -> Result<Self> {
        if !(c1 > 0.0 && c1.is_finite()) {
            return Err(Error::InvalidParameter(format!("c1 = {c1} must be positive")));
        }
        if !(c2 >= 0.0 && c2.is_finite() && c3 >= 0.0 && c3.is_finite()) {
            return Err(Error::InvalidParameter(format!("c2 = {c2}, c3 = {c3} must be nonnegative")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1]")));
        }
        Ok(GronwallParams { c1, c2, c3, alpha })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `c₁^{α-1} c₂ + c₃`
    fn k(&self) -> f64 {
        self.c1.powf(self.alpha - 1.0) * self.c2 + self.c3
    }

    /// `β - 1 = α c₁^{α-1} c₂ + c₃`
    fn growth(&self) -> f64 {
        self.alpha * self.c1.powf(self.alpha - 1.0) * self.c2 + self.c3
    }

    /// Growth factor `β = 1 + α c₁^{α-1} c₂ + c₃`.
    pub fn beta(&self) -> f64 {
        1.0 + self.growth()
    }
}

/// Natural log of [`gronwall_bound`]; finite for any `n`.
pub fn ln_gronwall_bound(p: &GronwallParams, n: u64) -> f64 {
    let g = p.growth();
    if g == 0.0 || n == 0 {
        return p.c1.ln();
    }
    let k = p.k();
    let nl = n as f64 * g.ln_1p();
    let tail = if nl < 30.0 {
        (k / g * nl.exp_m1()).ln_1p()
    } else {
        // 1 + (K/g)(e^{nl} - 1) = (K/g) e^{nl} (1 + (g/K - 1) e^{-nl})
        (k / g).ln() + nl + ((g / k - 1.0) * (-nl).exp()).ln_1p()
    };
    p.c1.ln() + tail
}

/// `c₁ (1 + K (β^n - 1) / (β - 1))` with `K = c₁^{α-1} c₂ + c₃`.
/// Overflows to `+∞` only when the bound itself exceeds `f64::MAX`.
pub fn gronwall_bound(p: &GronwallParams, n: u64) -> f64 {
    let g = p.growth();
    if g == 0.0 || n == 0 {
        return p.c1;
    }
    let nl = n as f64 * g.ln_1p();
    if nl < 700.0 {
        p.c1 * (1.0 + p.k() / g * nl.exp_m1())
    } else {
        ln_gronwall_bound(p, n).exp()
    }
}

/// Natural log of [`gronwall_relaxed_bound`].
pub fn ln_gronwall_relaxed_bound(p: &GronwallParams, n: u64) -> f64 {
    let a = p.alpha;
    let nl = n as f64 * p.growth().ln_1p();
    // 1 - 1/α + β^n/α = (β^n/α)(1 + (α - 1) β^{-n})
    p.c1.ln() + nl - a.ln() + ((a - 1.0) * (-nl).exp()).ln_1p()
}

/// `c₁ (1 - 1/α + β^n / α)`; dominates [`gronwall_bound`].
pub fn gronwall_relaxed_bound(p: &GronwallParams, n: u64) -> f64 {
    let a = p.alpha;
    let nl = n as f64 * p.growth().ln_1p();
    if nl < 700.0 {
        p.c1 * (1.0 + nl.exp_m1() / a)
    } else {
        ln_gronwall_relaxed_bound(p, n).exp()
    }
}

/// The largest sequence satisfying the recurrence, i.e. with equality:
/// `ŷ(0) = c₁`, `ŷ(n) = c₁ + c₂ Σ_{m<n} ŷ(m)^α + c₃ Σ_{m<n} ŷ(m)`.
/// Returns `ŷ(0..=n_max)`.
pub fn maximal_sequence_oracle(p: &GronwallParams, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("oracle needs N >= 1".into()));
    }
    let mut y = Vec::with_capacity(n_max + 1);
    let (mut sum_pow, mut sum) = (0.0, 0.0);
    for n in 0..=n_max {
        let yn = p.c1 + p.c2 * sum_pow + p.c3 * sum;
        if !yn.is_finite() {
            return Err(Error::Overflow(n));
        }
        y.push(yn);
        sum_pow += yn.powf(p.alpha);
        sum += yn;
    }
    Ok(y)
}
