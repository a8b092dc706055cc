//! First-order IMEX time stepping for `i u_t + Δu = λ u ln|u|²`.
//!
//! Each step solves
//!
//! ```text
//! (i/τ) M uⁿ⁺¹ - S uⁿ⁺¹ = (i/τ) M uⁿ + 2λ F(uⁿ),   F_i = ∫ f(u_h) φ_i,  f(z) = z ln|z|
//! ```
//!
//! on the interior DOFs, with the Laplacian implicit and the logarithmic term
//! explicit. The system matrix depends only on the mesh and `τ`, so it is
//! factored once per solver.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::banded::{factor, BandedComplexMatrix, BandedRealMatrix, Factorization};
use crate::error::{Error, Result};
use crate::fem::{assemble_load_f_into, assemble_mass, assemble_stiffness, CoefficientVector, Degree, FeSpace};
use crate::mesh::Mesh;
use crate::nonlinearity::log_f;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Boundary trace `g(x, t)`.
pub type TraceFn = Arc<dyn Fn(&[f64], f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryMode {
    Homogeneous,
    /// Dirichlet data imposed nodally at `t_{n+1}` and eliminated to the
    /// right-hand side.
    ExactTrace(TraceFn),
}

impl fmt::Debug for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryMode::Homogeneous => write!(f, "Homogeneous"),
            BoundaryMode::ExactTrace(_) => write!(f, "ExactTrace(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub tau: f64,
    pub t_final: f64,
    pub lambda: f64,
    pub degree: Degree,
    pub boundary: BoundaryMode,
    /// Polynomial exactness of the quadrature; `None` picks the default for
    /// the mesh dimension and degree.
    pub quad_order: Option<usize>,
    /// Observables are recorded every this many steps (and at the last step).
    pub record_every: usize,
    /// Compute the relative residual of every linear solve.
    pub check_residual: bool,
}

impl SchemeConfig {
    pub fn new(tau: f64, t_final: f64, lambda: f64, degree: Degree) -> Self {
        SchemeConfig {
            tau,
            t_final,
            lambda,
            degree,
            boundary: BoundaryMode::Homogeneous,
            quad_order: None,
            record_every: 1,
            check_residual: false,
        }
    }

    pub fn with_boundary(mut self, boundary: BoundaryMode) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("tau = {} must be positive", self.tau)));
        }
        if !(self.t_final >= self.tau && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("T = {} must be at least tau = {}", self.t_final, self.tau)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        Ok(())
    }

    /// `N_t = floor(T / τ)`, treating quotients within rounding of an integer
    /// as that integer.
    pub fn n_steps(&self) -> usize {
        let q = self.t_final / self.tau;
        let r = q.round();
        if (q - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            q.floor() as usize
        }
    }

    /// True when `N_t τ` misses `T`.
    pub fn has_fractional_tail(&self) -> bool {
        let covered = self.n_steps() as f64 * self.tau;
        (covered - self.t_final).abs() > 1e-9 * self.t_final
    }

    /// Violations of `τ ≤ e⁻¹` and `h^{r+1} ≤ e⁻¹`, as messages.
    pub fn constraint_warnings(&self, h: f64) -> Vec<String> {
        let cap = (-1.0f64).exp();
        let mut out = Vec::new();
        if self.tau > cap {
            out.push(format!("tau = {} exceeds e^-1", self.tau));
        }
        let hr = h.powi(self.degree.order() as i32 + 1);
        if hr > cap {
            out.push(format!("h^(r+1) = {hr} exceeds e^-1"));
        }
        if self.has_fractional_tail() {
            out.push(format!(
                "N_t * tau = {} differs from T = {}; the fractional last step is not taken",
                self.n_steps() as f64 * self.tau,
                self.t_final
            ));
        }
        out
    }
}

/// Row-compressed copy of a banded matrix's nonzeros.
#[derive(Debug, Clone)]
struct SparseRows<T> {
    start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl SparseRows<f64> {
    fn from_banded(a: &BandedRealMatrix) -> Self {
        let mut start = vec![0];
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        for i in 0..a.n() {
            for j in a.row_range(i) {
                let v = a.get(i, j);
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            start.push(cols.len());
        }
        SparseRows { start, cols, vals }
    }

    fn row_dot(&self, i: usize, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::default();
        for k in self.start[i]..self.start[i + 1] {
            acc += x[self.cols[k]] * self.vals[k];
        }
        acc
    }
}

/// Observables sampled along a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// `∫ |u_h|²`
    pub mass: Vec<f64>,
    /// `‖∇u_h‖² + λ ∫ |u_h|² ln|u_h|²`
    pub energy: Vec<f64>,
    /// Maximum nodal modulus.
    pub linf: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: CoefficientVector,
    pub series: TimeSeries,
    pub steps: usize,
    /// Largest relative residual over all solves; `None` unless
    /// `check_residual` was set.
    pub max_residual: Option<f64>,
}

/// Mass and log-energy of `u`.
pub fn observables(space: &FeSpace, u: &CoefficientVector, lambda: f64) -> Result<(f64, f64)> {
    let mass = space.integrate(u, |_, v| v.norm_sqr())?;
    let log_term = space.integrate(u, |_, v| {
        let r = v.norm();
        if r == 0.0 {
            0.0
        } else {
            2.0 * r * r * r.ln()
        }
    })?;
    let energy = space.gradient_norm_sq(u)? + lambda * log_term;
    Ok((mass, energy))
}

/// Assembled and factored IMEX stepper for one `(mesh, degree, τ)`.
pub struct ImexSolver {
    space: FeSpace,
    cfg: SchemeConfig,
    mass: BandedRealMatrix,
    mass_rows: SparseRows<f64>,
    system: BandedComplexMatrix,
    factorization: Factorization,
    /// For each interior row, the system entries in boundary columns.
    coupling: Vec<Vec<(usize, Complex64)>>,
}

impl ImexSolver {
    pub fn new(mesh: Arc<Mesh>, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let space = match cfg.quad_order {
            Some(q) => FeSpace::with_quad_order(mesh, cfg.degree, q)?,
            None => FeSpace::new(mesh, cfg.degree)?,
        };
        if space.interior_dofs().is_empty() {
            return Err(Error::InvalidParameter("mesh has no interior degrees of freedom".into()));
        }
        let mass = assemble_mass(&space);
        let stiffness = assemble_stiffness(&space);
        let full = build_step_matrix(&mass, &stiffness, cfg.tau, None)?;
        let system = full.restrict(space.interior_dofs());
        let factorization = factor(&system)?;
        let coupling = space
            .interior_dofs()
            .iter()
            .map(|&i| {
                full.row_range(i)
                    .filter(|&j| space.is_boundary_dof(j))
                    .map(|j| (j, full.get(i, j)))
                    .filter(|(_, v)| *v != Complex64::default())
                    .collect()
            })
            .collect();
        Ok(ImexSolver {
            mass_rows: SparseRows::from_banded(&mass),
            space,
            cfg,
            mass,
            system,
            factorization,
            coupling,
        })
    }

    pub fn space(&self) -> &FeSpace {
        &self.space
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn mass_matrix(&self) -> &BandedRealMatrix {
        &self.mass
    }

    /// Interior system `(i/τ) M - S`.
    pub fn system_matrix(&self) -> &BandedComplexMatrix {
        &self.system
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    /// Nodal interpolant of `u₀`, the initial state of a run.
    pub fn initial_state(&self, u0: impl Fn(&[f64]) -> Complex64) -> CoefficientVector {
        crate::fem::interpolate(&self.space, u0)
    }

    fn boundary_value(&self, dof: usize, t: f64) -> Complex64 {
        match &self.cfg.boundary {
            BoundaryMode::Homogeneous => Complex64::default(),
            BoundaryMode::ExactTrace(g) => {
                let d = self.space.dim().as_usize();
                g(&self.space.dof_points()[dof][..d], t)
            }
        }
    }

    /// One step from `uⁿ` at `t_n` to `uⁿ⁺¹`.
    pub fn step(&self, state: &CoefficientVector, t_n: f64) -> Result<CoefficientVector> {
        self.space.check(state)?;
        let mut load = vec![Complex64::default(); self.space.n_dofs()];
        let (next, _) = self.step_inner(state, t_n, &mut load)?;
        Ok(next)
    }

    fn step_inner(
        &self,
        state: &CoefficientVector,
        t_n: f64,
        load: &mut [Complex64],
    ) -> Result<(CoefficientVector, Option<f64>)> {
        let u = state.values();
        let t_next = t_n + self.cfg.tau;
        let i_over_tau = I / self.cfg.tau;
        let two_lambda = 2.0 * self.cfg.lambda;
        assemble_load_f_into(&self.space, u, load);

        let mut next = CoefficientVector::zeros(&self.space);
        let values = next.values_mut();
        for &b in self.space.boundary_dofs() {
            values[b] = self.boundary_value(b, t_next);
        }
        let mut rhs: Vec<Complex64> = self
            .space
            .interior_dofs()
            .iter()
            .zip(&self.coupling)
            .map(|(&i, coupled)| {
                let mut r = i_over_tau * self.mass_rows.row_dot(i, u) + two_lambda * load[i];
                for &(j, a) in coupled {
                    r -= a * values[j];
                }
                r
            })
            .collect();
        let rhs_copy = self.cfg.check_residual.then(|| rhs.clone());
        self.factorization.solve_in_place(&mut rhs)?;
        let residual = match rhs_copy {
            Some(b) => Some(relative_residual(&self.system, &rhs, &b)?),
            None => None,
        };
        for (&i, v) in self.space.interior_dofs().iter().zip(rhs) {
            values[i] = v;
        }
        Ok((next, residual))
    }

    /// Advances `N_t` steps from `u0`, recording observables.
    pub fn run(&self, u0: &CoefficientVector) -> Result<RunOutput> {
        self.run_observed(u0, |_, _, _| {})
    }

    /// As [`run`](Self::run), calling `observer(n, t_n, uⁿ)` for every
    /// `n = 0..=N_t`.
    pub fn run_observed(
        &self,
        u0: &CoefficientVector,
        mut observer: impl FnMut(usize, f64, &CoefficientVector),
    ) -> Result<RunOutput> {
        self.space.check(u0)?;
        let n_steps = self.cfg.n_steps();
        let mut series = TimeSeries::default();
        let mut max_residual: Option<f64> = None;
        let mut load = vec![Complex64::default(); self.space.n_dofs()];
        let mut state = u0.clone();
        self.record(&mut series, 0.0, &state)?;
        observer(0, 0.0, &state);
        for n in 0..n_steps {
            let t_n = n as f64 * self.cfg.tau;
            let (next, res) = self.step_inner(&state, t_n, &mut load)?;
            if let Some(r) = res {
                max_residual = Some(max_residual.map_or(r, |m| m.max(r)));
            }
            state = next;
            let t = (n + 1) as f64 * self.cfg.tau;
            if (n + 1) % self.cfg.record_every == 0 || n + 1 == n_steps {
                self.record(&mut series, t, &state)?;
            }
            observer(n + 1, t, &state);
        }
        Ok(RunOutput { final_state: state, series, steps: n_steps, max_residual })
    }

    fn record(&self, series: &mut TimeSeries, t: f64, u: &CoefficientVector) -> Result<()> {
        let (mass, energy) = observables(&self.space, u, self.cfg.lambda)?;
        series.times.push(t);
        series.mass.push(mass);
        series.energy.push(energy);
        series.linf.push(u.max_modulus());
        Ok(())
    }
}

fn relative_residual(a: &BandedComplexMatrix, x: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let ax = a.matvec(x)?;
    let num: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    let den: f64 = b.iter().map(|q| q.norm_sqr()).sum();
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}

/// `(i/τ) M - S`, optionally restricted to `interior` DOFs.
pub fn build_step_matrix(
    mass: &BandedRealMatrix,
    stiffness: &BandedRealMatrix,
    tau: f64,
    interior: Option<&[usize]>,
) -> Result<BandedComplexMatrix> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be positive")));
    }
    if mass.n() != stiffness.n() {
        return Err(Error::DimensionMismatch { expected: mass.n(), got: stiffness.n() });
    }
    let bw = mass.bandwidth().max(stiffness.bandwidth());
    let mut a = BandedComplexMatrix::zeros(mass.n(), bw);
    for i in 0..mass.n() {
        for j in a.row_range(i) {
            let v = Complex64::new(-stiffness.get(i, j), mass.get(i, j) / tau);
            if v != Complex64::default() {
                a.set(i, j, v);
            }
        }
    }
    Ok(match interior {
        Some(keep) => a.restrict(keep),
        None => a,
    })
}

/// Convenience driver: interpolate `u₀` and run.
pub fn run(
    u0: impl Fn(&[f64]) -> Complex64,
    cfg: SchemeConfig,
    mesh: Arc<Mesh>,
) -> Result<(CoefficientVector, TimeSeries)> {
    let solver = ImexSolver::new(mesh, cfg)?;
    let start = solver.initial_state(u0);
    let out = solver.run(&start)?;
    Ok((out.final_state, out.series))
}

/// Value, gradient and Hessian of a complex field at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet2 {
    pub value: Complex64,
    pub grad: [Complex64; 2],
    pub hessian: [[Complex64; 2]; 2],
}

impl Jet2 {
    /// `|v|² + |∇v|² + Σ_jk |∂_jk v|²`, the pointwise `H²` density.
    pub fn h2_density(&self) -> f64 {
        self.value.norm_sqr()
            + self.grad.iter().map(|g| g.norm_sqr()).sum::<f64>()
            + self.hessian.iter().flatten().map(|h| h.norm_sqr()).sum::<f64>()
    }
}

/// A space-time field with optional analytic derivatives, used as the exact
/// solution in truncation diagnostics. Missing derivatives are reported as
/// errors by consumers.
pub trait ExactSolution: Sync {
    fn value(&self, x: &[f64], t: f64) -> Complex64;

    fn laplacian(&self, _x: &[f64], _t: f64) -> Option<Complex64> {
        None
    }

    /// `∂_t u` with its spatial gradient and Hessian.
    fn u_t(&self, _x: &[f64], _t: f64) -> Option<Jet2> {
        None
    }

    fn u_tt(&self, _x: &[f64], _t: f64) -> Option<Complex64> {
        None
    }
}

/// Per-step truncation errors against their a priori bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub tau: f64,
    /// `‖Tⁿ‖` for `n = 0..N_t`.
    pub norms: Vec<f64>,
    /// `sqrt((2/3) τ² sup‖u_tt‖² + 2 τ² sup‖u_t‖²_{H²})` per step.
    pub bounds: Vec<f64>,
}

impl TruncationReport {
    pub fn max_norm(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    /// Every step satisfies its bound.
    pub fn within_bound(&self) -> bool {
        self.norms.iter().zip(&self.bounds).all(|(n, b)| n <= b)
    }
}

/// Sub-samples per step used for the sup-norms over `[t_n, t_{n+1}]`.
pub const SUP_SAMPLES: usize = 8;

/// `‖Tⁿ‖ = ‖i(D_τ uⁿ - u_tⁿ) + Δ(uⁿ⁺¹ - uⁿ)‖` by quadrature on `space`, with
/// `u_t⁰ = i(Δu₀ - λ u₀ ln|u₀|²)` taken from the equation.
pub fn truncation_check(exact: &dyn ExactSolution, space: &FeSpace, cfg: &SchemeConfig) -> Result<TruncationReport> {
    cfg.validate()?;
    let d = space.dim().as_usize();
    let probe = space.dof_points()[0];
    let probe = &probe[..d];
    exact.laplacian(probe, 0.0).ok_or(Error::MissingDerivative("laplacian"))?;
    exact.u_t(probe, 0.0).ok_or(Error::MissingDerivative("u_t"))?;
    exact.u_tt(probe, 0.0).ok_or(Error::MissingDerivative("u_tt"))?;

    let tau = cfg.tau;
    let lambda = cfg.lambda;
    let n_el = space.mesh().n_elements();
    let integrate = |g: &dyn Fn(&[f64]) -> f64| {
        let mut total = 0.0;
        for e in 0..n_el {
            space.for_each_qp(e, |x, w, _| total += w * g(&x[..d]));
        }
        total
    };
    let lap = |x: &[f64], t: f64| exact.laplacian(x, t).expect("checked above");
    let u_t = |x: &[f64], t: f64, n: usize| {
        if n == 0 {
            let u0 = exact.value(x, 0.0);
            I * (lap(x, 0.0) - lambda * 2.0 * log_f(u0))
        } else {
            exact.u_t(x, t).expect("checked above").value
        }
    };

    let n_steps = cfg.n_steps();
    let mut norms = Vec::with_capacity(n_steps);
    let mut bounds = Vec::with_capacity(n_steps);
    for n in 0..n_steps {
        let (t0, t1) = (n as f64 * tau, (n + 1) as f64 * tau);
        let sq = integrate(&|x| {
            let du = (exact.value(x, t1) - exact.value(x, t0)) / tau;
            let tn = I * (du - u_t(x, t0, n)) + lap(x, t1) - lap(x, t0);
            tn.norm_sqr()
        });
        norms.push(sq.sqrt());

        let (mut sup_tt, mut sup_h2) = (0.0f64, 0.0f64);
        for k in 0..=SUP_SAMPLES {
            let t = t0 + tau * k as f64 / SUP_SAMPLES as f64;
            sup_tt = sup_tt.max(integrate(&|x| exact.u_tt(x, t).expect("checked above").norm_sqr()));
            sup_h2 = sup_h2.max(integrate(&|x| exact.u_t(x, t).expect("checked above").h2_density()));
        }
        bounds.push((2.0 / 3.0 * tau * tau * sup_tt + 2.0 * tau * tau * sup_h2).sqrt());
    }
    Ok(TruncationReport { tau, norms, bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_mass, assemble_stiffness, interpolate};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mesh_1d(n: usize) -> Arc<Mesh> {
        Arc::new(Mesh::uniform_interval(-1.0, 1.0, n).unwrap())
    }

    #[test]
    fn scalar_step_matrix() {
        let mut m = BandedRealMatrix::zeros(1, 0);
        let mut s = BandedRealMatrix::zeros(1, 0);
        m.set(0, 0, 0.3);
        s.set(0, 0, 2.0);
        let a = build_step_matrix(&m, &s, 0.1, None).unwrap();
        assert!((a.get(0, 0) - c(-2.0, 3.0)).norm() < 1e-15);
        let half = build_step_matrix(&m, &s, 0.05, None).unwrap();
        assert_eq!(half.get(0, 0).im, 2.0 * a.get(0, 0).im);
        assert_eq!(half.get(0, 0).re, a.get(0, 0).re);
        assert!(build_step_matrix(&m, &s, 0.0, None).is_err());
        assert!(build_step_matrix(&m, &BandedRealMatrix::zeros(2, 0), 0.1, None).is_err());
    }

    #[test]
    fn three_node_interior_system() {
        let mesh = Arc::new(Mesh::uniform_interval(-1.0, 1.0, 2).unwrap());
        let space = FeSpace::new(mesh.clone(), Degree::Linear).unwrap();
        let a = build_step_matrix(&assemble_mass(&space), &assemble_stiffness(&space), 1.0, Some(space.interior_dofs()))
            .unwrap();
        assert_eq!(a.n(), 1);
        assert!((a.get(0, 0) - c(-2.0, 4.0 / 6.0)).norm() < 1e-15);
    }

    #[test]
    fn one_step_linear_scalar_mode() {
        // 3-node mesh, λ = 0: u¹ = (i m/τ) u⁰ / (i m/τ - s)
        let tau = 0.1;
        let mesh = Arc::new(Mesh::uniform_interval(-1.0, 1.0, 2).unwrap());
        let cfg = SchemeConfig::new(tau, tau, 0.0, Degree::Linear);
        let solver = ImexSolver::new(mesh, cfg).unwrap();
        let u0 = solver.initial_state(|x| c(1.0 - x[0].abs(), 0.0));
        let u1 = solver.step(&u0, 0.0).unwrap();
        let (m, s) = (4.0 / 6.0, 2.0);
        let expected = c(0.0, m / tau) / c(-s, m / tau);
        assert!((u1.values()[1] - expected).norm() < 1e-14);
        assert_eq!(u1.values()[0], c(0.0, 0.0));
    }

    #[test]
    fn zero_is_a_fixed_point() {
        for lambda in [-1.0, 0.0, 3.0] {
            let cfg = SchemeConfig::new(0.01, 0.1, lambda, Degree::Quadratic);
            let solver = ImexSolver::new(mesh_1d(10), cfg).unwrap();
            let out = solver.run(&solver.initial_state(|_| c(0.0, 0.0))).unwrap();
            assert!(out.final_state.values().iter().all(|v| *v == c(0.0, 0.0)));
        }
    }

    #[test]
    fn single_step_run_matches_step() {
        let cfg = SchemeConfig::new(0.01, 0.01, -1.0, Degree::Linear);
        let solver = ImexSolver::new(mesh_1d(16), cfg).unwrap();
        let u0 = solver.initial_state(|x| c((-x[0] * x[0] / 2.0).exp() - (-0.5f64).exp(), 0.0));
        let out = solver.run(&u0).unwrap();
        assert_eq!(out.steps, 1);
        assert_eq!(out.final_state, solver.step(&u0, 0.0).unwrap());
        assert_eq!(out.series.times, vec![0.0, 0.01]);
    }

    #[test]
    fn linear_problem_dissipates_mass() {
        let u0 = |x: &[f64]| c((std::f64::consts::PI * x[0]).cos() * 0.0 + (1.0 - x[0] * x[0]), 0.0);
        let mut drifts = Vec::new();
        for tau in [0.02, 0.01, 0.005] {
            let cfg = SchemeConfig::new(tau, 0.4, 0.0, Degree::Linear);
            let (_, series) = run(u0, cfg, mesh_1d(32)).unwrap();
            assert!(series.mass.windows(2).all(|w| w[1] <= w[0]));
            drifts.push(series.mass[0] - series.mass.last().unwrap());
        }
        assert!(drifts[1] < drifts[0] && drifts[2] < drifts[1]);
    }

    #[test]
    fn observables_of_constants() {
        let space = FeSpace::new(Arc::new(Mesh::uniform_interval(0.0, 1.0, 8).unwrap()), Degree::Linear).unwrap();
        let zero = interpolate(&space, |_| c(0.0, 0.0));
        assert_eq!(observables(&space, &zero, -1.0).unwrap(), (0.0, 0.0));
        let one = interpolate(&space, |_| c(1.0, 0.0));
        let (mass, energy) = observables(&space, &one, 2.5).unwrap();
        assert!((mass - 1.0).abs() < 1e-14);
        assert!(energy.abs() < 1e-14);
    }

    #[test]
    fn gauge_covariance() {
        let theta = 0.7f64;
        let phase = Complex64::from_polar(1.0, theta);
        let cfg = SchemeConfig::new(0.01, 0.2, -1.0, Degree::Quadratic);
        let solver = ImexSolver::new(mesh_1d(12), cfg).unwrap();
        let u0 = solver.initial_state(|x| c(1.0 - x[0] * x[0], 0.3 * x[0] * (1.0 - x[0] * x[0])));
        let a = solver.run(&u0).unwrap().final_state;
        let b = solver.run(&u0.scaled(phase)).unwrap().final_state;
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x * phase - y).norm() < 1e-13);
        }
    }

    #[test]
    fn residuals_are_small() {
        let mut cfg = SchemeConfig::new(0.001, 0.05, -1.0, Degree::Linear);
        cfg.check_residual = true;
        let mesh = Arc::new(Mesh::structured_triangulation((-1.0, 1.0), (-1.0, 1.0), 10, 10).unwrap());
        let solver = ImexSolver::new(mesh, cfg).unwrap();
        let u0 = solver.initial_state(|x| c((1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]), 0.0));
        let out = solver.run(&u0).unwrap();
        assert!(out.max_residual.unwrap() < 1e-12);
    }

    #[test]
    fn factor_once_equals_refactor_every_step() {
        let tau = 0.002;
        let cfg = SchemeConfig::new(tau, 1000.0 * tau, -1.0, Degree::Linear);
        let solver = ImexSolver::new(mesh_1d(16), cfg.clone()).unwrap();
        let u0 = solver.initial_state(|x| c(1.0 - x[0] * x[0], 0.0));
        let reused = solver.run(&u0).unwrap().final_state;
        let mut state = u0.clone();
        for n in 0..1000 {
            let fresh = ImexSolver::new(mesh_1d(16), cfg.clone()).unwrap();
            let s = CoefficientVector::from_values(fresh.space(), state.into_values()).unwrap();
            state = fresh.step(&s, n as f64 * tau).unwrap();
        }
        assert_eq!(state.values(), reused.values());
    }

    #[test]
    fn config_validation_and_step_count() {
        assert!(SchemeConfig::new(0.0, 1.0, 0.0, Degree::Linear).validate().is_err());
        assert!(SchemeConfig::new(0.1, 0.05, 0.0, Degree::Linear).validate().is_err());
        let cfg = SchemeConfig::new(0.1 * 2f64.powi(-3), 1.0, -1.0, Degree::Linear);
        assert_eq!(cfg.n_steps(), 80);
        assert!(!cfg.has_fractional_tail());
        let cfg = SchemeConfig::new(0.3, 1.0, -1.0, Degree::Linear);
        assert_eq!(cfg.n_steps(), 3);
        assert!(cfg.has_fractional_tail());
        assert_eq!(cfg.constraint_warnings(0.1).len(), 1);
        let cfg = SchemeConfig::new(0.5, 1.0, -1.0, Degree::Linear);
        assert_eq!(cfg.constraint_warnings(0.9).len(), 2);
    }

    struct Stationary;

    impl ExactSolution for Stationary {
        fn value(&self, x: &[f64], _t: f64) -> Complex64 {
            c(x[0] * x[0], 0.0)
        }
        fn laplacian(&self, _x: &[f64], _t: f64) -> Option<Complex64> {
            Some(c(2.0, 0.0))
        }
        fn u_t(&self, _x: &[f64], _t: f64) -> Option<Jet2> {
            Some(Jet2::default())
        }
        fn u_tt(&self, _x: &[f64], _t: f64) -> Option<Complex64> {
            Some(c(0.0, 0.0))
        }
    }

    struct ValueOnly;

    impl ExactSolution for ValueOnly {
        fn value(&self, _x: &[f64], _t: f64) -> Complex64 {
            c(1.0, 0.0)
        }
    }

    #[test]
    fn truncation_of_time_independent_field_vanishes_after_first_step() {
        let space = FeSpace::new(mesh_1d(8), Degree::Linear).unwrap();
        // λ = 0 so the equation-derived u_t⁰ = iΔu₀ is what it is; check n ≥ 1.
        let cfg = SchemeConfig::new(0.1, 1.0, 0.0, Degree::Linear);
        let rep = truncation_check(&Stationary, &space, &cfg).unwrap();
        assert!(rep.norms[1..].iter().all(|&v| v == 0.0));
        assert_eq!(rep.norms.len(), 10);
    }

    #[test]
    fn truncation_needs_derivatives() {
        let space = FeSpace::new(mesh_1d(8), Degree::Linear).unwrap();
        let cfg = SchemeConfig::new(0.1, 1.0, 0.0, Degree::Linear);
        assert!(matches!(truncation_check(&ValueOnly, &space, &cfg), Err(Error::MissingDerivative(_))));
    }
}
