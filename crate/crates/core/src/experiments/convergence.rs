//! Refinement studies against the Gausson on `(-1, 1)^d`.

use std::sync::Arc;

use rayon::prelude::*;

use super::gausson::Gausson;
use crate::error::{Error, Result};
use crate::fem::{error_norms, Degree};
use crate::imex::{BoundaryMode, ImexSolver, SchemeConfig};
use crate::mesh::{Dim, Mesh};

/// Parameter varied across the rows of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refined {
    Tau,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub tau: f64,
    /// Discrete `l²` error at the nodes.
    pub e2: f64,
    pub einf: f64,
    /// Continuous `L²` error by quadrature.
    pub big_l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slopes {
    pub e2: f64,
    pub einf: f64,
    pub big_l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub refined: Refined,
    /// Coarsest first.
    pub rows: Vec<ConvergenceRow>,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter("slope fit needs at least two points".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter("slope fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

impl ConvergenceTable {
    pub fn abscissae(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match self.refined {
                Refined::Tau => r.tau,
                Refined::H => r.h,
            })
            .collect()
    }

    pub fn slopes(&self) -> Result<Slopes> {
        let x = self.abscissae();
        let col = |f: fn(&ConvergenceRow) -> f64| self.rows.iter().map(f).collect::<Vec<_>>();
        Ok(Slopes {
            e2: fit_slope(&x, &col(|r| r.e2))?,
            einf: fit_slope(&x, &col(|r| r.einf))?,
            big_l2: fit_slope(&x, &col(|r| r.big_l2))?,
        })
    }

    /// `h,tau,e2,einf,L2` with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,tau,e2,einf,L2\n");
        for r in &self.rows {
            let cells = [r.h, r.tau, r.e2, r.einf, r.big_l2].map(super::output::fmt_real);
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Fixed parts of a Gausson refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudySetup {
    pub gausson: Gausson,
    pub degree: Degree,
    pub t_final: f64,
    /// The domain is `(lower, upper)^d`.
    pub lower: f64,
    pub upper: f64,
}

impl StudySetup {
    /// `(-1, 1)^d`, `T = 1`, standard Gausson.
    pub fn standard(dim: Dim, degree: Degree) -> Self {
        StudySetup { gausson: Gausson::standard(dim), degree, t_final: 1.0, lower: -1.0, upper: 1.0 }
    }

    pub fn with_t_final(mut self, t_final: f64) -> Self {
        self.t_final = t_final;
        self
    }

    /// Uniform mesh with element (1D) or cell (2D) side `h`.
    pub fn mesh(&self, h: f64) -> Result<Mesh> {
        let len = self.upper - self.lower;
        let q = len / h;
        let n = q.round();
        if !(h > 0.0) || n < 1.0 || (q - n).abs() > 1e-8 * n {
            return Err(Error::InvalidParameter(format!("h = {h} does not divide the domain length {len}")));
        }
        let n = n as usize;
        match self.gausson.dim() {
            Dim::One => Mesh::uniform_interval(self.lower, self.upper, n),
            Dim::Two => Mesh::structured_triangulation((self.lower, self.upper), (self.lower, self.upper), n, n),
        }
    }

    pub fn scheme(&self, tau: f64) -> SchemeConfig {
        let g = self.gausson;
        let cfg = SchemeConfig::new(tau, self.t_final, g.lambda(), self.degree)
            .with_boundary(BoundaryMode::ExactTrace(Arc::new(move |x, t| g.eval(x, t))));
        let steps = cfg.n_steps().max(1);
        cfg.with_record_every(steps)
    }

    /// Solves to `N_t τ` and measures the error there.
    pub fn run(&self, h: f64, tau: f64) -> Result<ConvergenceRow> {
        let mesh = Arc::new(self.mesh(h)?);
        let g = self.gausson;
        let solver = ImexSolver::new(mesh, self.scheme(tau))?;
        let u0 = solver.initial_state(|x| g.eval(x, 0.0));
        let out = solver.run(&u0)?;
        let t = out.steps as f64 * tau;
        let err = error_norms(solver.space(), &out.final_state, |x| g.eval(x, t))?;
        Ok(ConvergenceRow { h, tau, e2: err.l2, einf: err.linf, big_l2: err.big_l2 })
    }
}

fn collect(refined: Refined, pairs: Vec<(f64, f64)>, setup: &StudySetup) -> Result<ConvergenceTable> {
    let mut rows = pairs.into_par_iter().map(|(h, tau)| setup.run(h, tau)).collect::<Result<Vec<_>>>()?;
    match refined {
        Refined::Tau => rows.sort_by(|a, b| b.tau.total_cmp(&a.tau)),
        Refined::H => rows.sort_by(|a, b| b.h.total_cmp(&a.h)),
    }
    Ok(ConvergenceTable { refined, rows })
}

/// Fixed `h`, varying `τ`.
pub fn converge_time(setup: &StudySetup, h: f64, taus: &[f64]) -> Result<ConvergenceTable> {
    collect(Refined::Tau, taus.iter().map(|&t| (h, t)).collect(), setup)
}

/// Fixed `τ`, varying `h`.
pub fn converge_space(setup: &StudySetup, tau: f64, hs: &[f64]) -> Result<ConvergenceTable> {
    collect(Refined::H, hs.iter().map(|&h| (h, tau)).collect(), setup)
}

/// `τ = h²` for each `h`; the slope is reported against `h`.
pub fn converge_space_time(setup: &StudySetup, hs: &[f64]) -> Result<ConvergenceTable> {
    collect(Refined::H, hs.iter().map(|&h| (h, h * h)).collect(), setup)
}

/// `τ_j = base 2^{-j}`, `j = 1..=n`.
pub fn dyadic_taus(base: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|j| base * 0.5f64.powi(j as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        for p in [0.5, 1.0, 2.0, 3.3] {
            let x = dyadic_taus(0.1, 5);
            let y: Vec<f64> = x.iter().map(|t| 7.0 * t.powf(p)).collect();
            assert!((fit_slope(&x, &y).unwrap() - p).abs() < 1e-10);
        }
    }

    #[test]
    fn slope_rejects_degenerate_input() {
        assert!(fit_slope(&[1.0], &[1.0]).is_err());
        assert!(fit_slope(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(fit_slope(&[1.0, 2.0], &[0.0, 2.0]).is_err());
        assert!(fit_slope(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn linear_plane_wave_is_first_order_in_time() {
        let mut s = StudySetup::standard(Dim::One, Degree::Quadratic).with_t_final(0.5);
        s.gausson = Gausson::new(Dim::One, 1.0, [1.5, 0.0], 0.0).unwrap();
        let t = converge_time(&s, 1.0 / 32.0, &dyadic_taus(0.05, 4)).unwrap();
        let slope = t.slopes().unwrap().e2;
        assert!((slope - 1.0).abs() < 0.15, "{slope}");
    }

    #[test]
    fn mesh_sizes() {
        let s = StudySetup::standard(Dim::One, Degree::Quadratic);
        assert_eq!(s.mesh(1.0 / 3.0).unwrap().n_elements(), 6);
        assert!(s.mesh(0.3).is_err());
        let s2 = StudySetup::standard(Dim::Two, Degree::Linear);
        assert_eq!(s2.mesh(1.0 / 24.0).unwrap().grid().cells, [48, 48]);
    }

    #[test]
    fn doubled_taus_double_the_coarse_error() {
        let s = StudySetup::standard(Dim::One, Degree::Linear).with_t_final(0.2);
        let t = converge_time(&s, 1.0 / 16.0, &[0.02, 0.01, 0.005]).unwrap();
        assert_eq!(t.abscissae(), vec![0.02, 0.01, 0.005]);
        let slope = t.slopes().unwrap().e2;
        assert!(slope > 0.7 && slope < 1.3, "{slope}");
    }
}
