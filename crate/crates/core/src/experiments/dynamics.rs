//! Long-time runs with zero boundary data: two interacting Gaussons in 1D
//! and the four-lobe `tanh` profile in 2D.

use std::sync::Arc;

use num_complex::Complex64;

use super::gausson::TwoGausson;
use crate::error::{Error, Result};
use crate::fem::{CoefficientVector, Degree, FeSpace};
use crate::imex::{ImexSolver, SchemeConfig, TimeSeries};
use crate::mesh::{Dim, Mesh};

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub tau: f64,
    /// Element length (1D) or cell side (2D).
    pub h: f64,
    pub t_final: f64,
    pub lambda: f64,
    pub degree: Degree,
    /// Times at which the state is kept, rounded to the nearest step.
    pub snapshot_times: Vec<f64>,
    pub record_every: usize,
}

impl DynamicsConfig {
    /// `Ω = (-40, 40)`, `h = 0.05`, `τ = 1e-4`, `λ = -1`.
    pub fn two_gausson_default(t_final: f64) -> Self {
        DynamicsConfig {
            tau: 1e-4,
            h: 0.05,
            t_final,
            lambda: -1.0,
            degree: Degree::Linear,
            snapshot_times: (0..=4).map(|k| t_final * k as f64 / 4.0).collect(),
            record_every: 100,
        }
    }

    /// `Ω = (-10, 10)²`, `h = 0.1`, `τ = 1e-4`, `λ = -1`, snapshots at
    /// `0, 0.25, 0.5`.
    pub fn tanh_default() -> Self {
        DynamicsConfig {
            tau: 1e-4,
            h: 0.1,
            t_final: 0.5,
            lambda: -1.0,
            degree: Degree::Linear,
            snapshot_times: vec![0.0, 0.25, 0.5],
            record_every: 100,
        }
    }

    fn scheme(&self) -> SchemeConfig {
        SchemeConfig::new(self.tau, self.t_final, self.lambda, self.degree).with_record_every(self.record_every)
    }

    fn snapshot_steps(&self) -> Result<Vec<usize>> {
        let n_steps = self.scheme().n_steps();
        self.snapshot_times
            .iter()
            .map(|&t| {
                let n = (t / self.tau).round();
                if t < 0.0 || n as usize > n_steps {
                    Err(Error::InvalidParameter(format!("snapshot time {t} outside [0, {}]", self.t_final)))
                } else {
                    Ok(n as usize)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub state: CoefficientVector,
}

#[derive(Debug, Clone)]
pub struct DynamicsOutput {
    pub space: FeSpace,
    pub snapshots: Vec<Snapshot>,
    pub series: TimeSeries,
}

impl DynamicsOutput {
    /// The snapshot nearest to `t`.
    pub fn at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }
}

fn cells(length: f64, h: f64) -> Result<usize> {
    let q = length / h;
    let n = q.round();
    if !(h > 0.0) || n < 2.0 || (q - n).abs() > 1e-8 * n {
        return Err(Error::InvalidParameter(format!("h = {h} does not divide the domain length {length}")));
    }
    Ok(n as usize)
}

fn evolve(mesh: Mesh, cfg: &DynamicsConfig, u0: impl Fn(&[f64]) -> Complex64) -> Result<DynamicsOutput> {
    let solver = ImexSolver::new(Arc::new(mesh), cfg.scheme())?;
    let wanted = cfg.snapshot_steps()?;
    let start = solver.initial_state(u0);
    let mut snapshots = Vec::new();
    let out = solver.run_observed(&start, |n, t, u| {
        if wanted.contains(&n) {
            snapshots.push(Snapshot { t, state: u.clone() });
        }
    })?;
    Ok(DynamicsOutput { space: solver.space().clone(), snapshots, series: out.series })
}

/// Two Gaussons on `(-40, 40)` with zero boundary values.
pub fn dynamics_two_gausson(spec: &TwoGausson, cfg: &DynamicsConfig) -> Result<DynamicsOutput> {
    let mesh = Mesh::uniform_interval(-40.0, 40.0, cells(80.0, cfg.h)?)?;
    evolve(mesh, cfg, |x| spec.eval(x[0]))
}

/// `tanh(x) tanh(y) exp(-x² - y²)`
pub fn tanh_initial(x: &[f64]) -> Complex64 {
    Complex64::new(x[0].tanh() * x[1].tanh() * (-x[0] * x[0] - x[1] * x[1]).exp(), 0.0)
}

/// The `tanh` profile on `(-10, 10)²` with zero boundary values.
pub fn dynamics_2d_tanh(cfg: &DynamicsConfig) -> Result<DynamicsOutput> {
    let n = cells(20.0, cfg.h)?;
    let mesh = Mesh::structured_triangulation((-10.0, 10.0), (-10.0, 10.0), n, n)?;
    evolve(mesh, cfg, tanh_initial)
}

/// Strict interior local maxima of `|u|` along a 1D mesh whose value exceeds
/// `floor · max|u|`, as `(x, |u|)` sorted by `x`.
pub fn local_maxima_1d(space: &FeSpace, u: &CoefficientVector, floor: f64) -> Result<Vec<(f64, f64)>> {
    if space.dim() != Dim::One {
        return Err(Error::InvalidParameter("local maxima are tracked in 1D only".into()));
    }
    space.check(u)?;
    let mut pts: Vec<(f64, f64)> =
        space.dof_points().iter().zip(u.values()).map(|(p, v)| (p[0], v.norm())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let cut = floor * u.max_modulus();
    Ok(pts
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1 && w[1].1 > cut)
        .map(|w| w[1])
        .collect())
}

/// Centres of mass `∫ x|u|² / ∫|u|²` over `x < 0` and `x > 0`.
pub fn half_line_centres(space: &FeSpace, u: &CoefficientVector) -> Result<[f64; 2]> {
    let mut acc = [[0.0; 2]; 2];
    for e in 0..space.mesh().n_elements() {
        let dofs = space.element_dofs(e);
        space.for_each_qp(e, |x, w, phi| {
            let v: Complex64 = dofs.iter().zip(phi).map(|(&i, &p)| u.values()[i] * p).sum();
            let side = usize::from(x[0] > 0.0);
            acc[side][0] += w * x[0] * v.norm_sqr();
            acc[side][1] += w * v.norm_sqr();
        });
    }
    space.check(u)?;
    Ok([acc[0][0] / acc[0][1], acc[1][0] / acc[1][1]])
}

/// `max |u(x,y)| - |u(-x,y)|` over the nodes of a structured 2D P1 mesh.
pub fn reflection_asymmetry(space: &FeSpace, u: &CoefficientVector) -> Result<f64> {
    if space.dim() != Dim::Two || space.degree() != Degree::Linear {
        return Err(Error::InvalidParameter("reflection check needs a 2D linear space".into()));
    }
    space.check(u)?;
    let [nx, ny] = space.mesh().grid().cells;
    let v = u.values();
    let mut worst: f64 = 0.0;
    for j in 0..=ny {
        for i in 0..=nx {
            let a = v[j * (nx + 1) + i].norm();
            let b = v[j * (nx + 1) + (nx - i)].norm();
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
