//! Seeded randomized checks of the pointwise and `L²` continuity estimates
//! for `f(z) = z ln|z|` and of the discrete Grönwall bound.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gronwall::{gronwall_bound, gronwall_relaxed_bound, maximal_sequence_oracle, GronwallParams};
use crate::nonlinearity::{
    check_holder_bound, check_imaginary_inequality, check_lipschitz_bound, delta_alpha, l2_split_bound,
    lipschitz_regime_bound, SplitCase,
};

pub const GENERATOR: &str = "ChaCha8Rng";
/// Hölder order and radius used by the suites.
pub const ALPHA: f64 = 0.5;
pub const SLACK: f64 = 1e-12;
const BATCH: usize = 8;
const GRONWALL_DRAWS: usize = 1000;
const GRONWALL_N: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// The first failing input, formatted for reproduction.
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome { name, samples: 0, violations: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, input: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.violations += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(input());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub seed: u64,
    pub n_samples: usize,
    pub checks: Vec<CheckOutcome>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "generator = {GENERATOR}");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "n_samples = {}", self.n_samples);
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{status} {} samples={} violations={}", c.name, c.samples, c.violations);
            if let Some(f) = &c.first_failure {
                let _ = writeln!(s, "  first failure: {f}");
            }
        }
        s
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("({:e}, {:e})", z.re, z.im)
}

fn fmt_vec(v: &[Complex64]) -> String {
    v.iter().map(|&z| fmt_c(z)).collect::<Vec<_>>().join(" ")
}

/// Modulus log-uniform on `[lo, hi]`, phase uniform.
fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = (rng.gen_range(lo.ln()..=hi.ln())).exp();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Pulls `z` inside the closed disk, allowing for rounding in the rescale.
fn clamp_to(z: Complex64, radius: f64) -> Complex64 {
    if z.norm() > radius {
        z * (radius / z.norm() * (1.0 - 4.0 * f64::EPSILON))
    } else {
        z
    }
}

/// A pair with moduli at most `radius`; a third of the draws are close
/// neighbours and a sixth use log-uniform moduli down to `1e-300`.
fn pair(rng: &mut ChaCha8Rng, radius: f64) -> (Complex64, Complex64) {
    let u = match rng.gen_range(0..6) {
        0 => log_uniform(rng, 1e-300, radius),
        _ => in_disk(rng, radius),
    };
    let v = match rng.gen_range(0..3) {
        0 => u + log_uniform(rng, 1e-12, 1e-1) * u.norm().max(1e-300),
        1 => log_uniform(rng, 1e-300, radius),
        _ => in_disk(rng, radius),
    };
    (clamp_to(u, radius), clamp_to(v, radius))
}

/// Pairs at the extreme low end of the double range, plus zero.
fn adversarial_pairs() -> Vec<(Complex64, Complex64)> {
    let tiny = 1e-300;
    let mut out = vec![
        (Complex64::new(tiny, 0.0), Complex64::default()),
        (Complex64::new(tiny, 0.0), Complex64::new(-tiny, 0.0)),
        (Complex64::new(0.0, tiny), Complex64::new(tiny, 0.0)),
        (Complex64::new(tiny, tiny), Complex64::new(tiny, -tiny)),
        (Complex64::new(f64::MIN_POSITIVE, 0.0), Complex64::new(0.0, f64::MIN_POSITIVE)),
        (Complex64::new(5e-324, 0.0), Complex64::default()),
        (Complex64::new(tiny, 0.0), Complex64::new(2.0 * tiny, 0.0)),
    ];
    for k in 0..16 {
        let theta = k as f64 * std::f64::consts::TAU / 16.0;
        out.push((Complex64::from_polar(tiny, theta), Complex64::from_polar(3.0 * tiny, -theta)));
    }
    out
}

fn pointwise_checks(rng: &mut ChaCha8Rng, n: usize, epsilon: f64) -> Result<Vec<CheckOutcome>> {
    let mut lip = CheckOutcome::new("lipschitz_pointwise");
    let mut hol = CheckOutcome::new("holder_pointwise");
    let mut ima = CheckOutcome::new("imaginary_part");
    for _ in 0..n {
        let (u, v) = pair(rng, 1e4);
        lip.record(check_lipschitz_bound(u, v), || format!("u={} v={}", fmt_c(u), fmt_c(v)));
        let (u, v) = pair(rng, 1e4);
        ima.record(check_imaginary_inequality(u, v), || format!("u={} v={}", fmt_c(u), fmt_c(v)));
        let (u, v) = pair(rng, epsilon);
        let ok = check_holder_bound(u, v, ALPHA, epsilon)?;
        hol.record(ok, || format!("u={} v={}", fmt_c(u), fmt_c(v)));
    }
    let mut adv = CheckOutcome::new("adversarial_tiny");
    for (u, v) in adversarial_pairs() {
        let ok = check_lipschitz_bound(u, v)
            && check_imaginary_inequality(u, v)
            && check_holder_bound(u, v, ALPHA, epsilon)?;
        adv.record(ok, || format!("u={} v={}", fmt_c(u), fmt_c(v)));
    }
    Ok(vec![lip, hol, ima, adv])
}

fn split_checks(rng: &mut ChaCha8Rng, n: usize, epsilon: f64) -> Result<Vec<CheckOutcome>> {
    let mut mixed = CheckOutcome::new("l2_split_mixed");
    let mut holder_only = CheckOutcome::new("l2_split_holder_only");
    let mut regime = CheckOutcome::new("l2_lipschitz_regime");
    let mut u = vec![Complex64::default(); BATCH];
    let mut v = vec![Complex64::default(); BATCH];
    let mut w = vec![0.0; BATCH];
    for _ in 0..n {
        // Mixed: samples on both sides of ε, forced Λ_∞ > ε.
        for k in 0..BATCH {
            (u[k], v[k]) = pair(rng, 10.0);
            w[k] = rng.gen_range(0.0..1.0);
        }
        u[0] = log_uniform(rng, 2.0 * epsilon, 10.0);
        let b = l2_split_bound(&u, &v, &w, ALPHA, epsilon)?;
        let ok = b.case == SplitCase::Mixed && b.holds(SLACK);
        mixed.record(ok, || format!("u=[{}] v=[{}] w={w:?}", fmt_vec(&u), fmt_vec(&v)));

        for k in 0..BATCH {
            (u[k], v[k]) = pair(rng, epsilon);
            w[k] = rng.gen_range(0.0..1.0);
        }
        let b = l2_split_bound(&u, &v, &w, ALPHA, epsilon)?;
        let ok = b.case == SplitCase::HolderOnly && b.holds(SLACK);
        holder_only.record(ok, || format!("u=[{}] v=[{}] w={w:?}", fmt_vec(&u), fmt_vec(&v)));

        for k in 0..BATCH {
            u[k] = log_uniform(rng, epsilon * (1.0 + 1e-9), 50.0);
            v[k] = log_uniform(rng, epsilon * (1.0 + 1e-9), 50.0);
            w[k] = rng.gen_range(0.0..1.0);
        }
        let (lhs, rhs) = lipschitz_regime_bound(&u, &v, &w, epsilon)?;
        let ok = lhs <= rhs * (1.0 + SLACK) + 1e-12;
        regime.record(ok, || format!("u=[{}] v=[{}] w={w:?}", fmt_vec(&u), fmt_vec(&v)));
    }
    Ok(vec![mixed, holder_only, regime])
}

fn gronwall_checks(rng: &mut ChaCha8Rng, draws: usize) -> Result<Vec<CheckOutcome>> {
    let mut chain = CheckOutcome::new("gronwall_chain");
    for _ in 0..draws {
        let p = GronwallParams::new(
            rng.gen_range(0.01..10.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..0.5),
            rng.gen_range(0.05..=1.0),
        )?;
        let y = maximal_sequence_oracle(&p, GRONWALL_N)?;
        let ok = y.iter().enumerate().all(|(n, &yn)| {
            let b = gronwall_bound(&p, n as u64);
            yn <= b * (1.0 + SLACK) && b <= gronwall_relaxed_bound(&p, n as u64) * (1.0 + SLACK)
        });
        chain.record(ok, || format!("{p:?}"));
    }
    Ok(vec![chain])
}

/// Runs every suite with `n_samples` draws each (Grönwall uses at most
/// 1000 parameter draws). Deterministic in `seed`.
pub fn verify_lemmas(seed: u64, n_samples: usize) -> Result<LemmaReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let epsilon = delta_alpha(ALPHA);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = pointwise_checks(&mut rng, n_samples, epsilon)?;
    checks.extend(split_checks(&mut rng, n_samples, epsilon)?);
    checks.extend(gronwall_checks(&mut rng, n_samples.min(GRONWALL_DRAWS))?);
    Ok(LemmaReport { seed, n_samples, checks })
}
