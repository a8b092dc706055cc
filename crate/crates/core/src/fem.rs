//! Continuous Lagrange finite elements on [`Mesh`]es: degree-1 and degree-2
//! elements in 1D, degree-1 triangles in 2D.
//!
//! Global numbering in 1D with quadratic elements interleaves vertices and
//! element midpoints left to right (vertex `i` is DOF `2i`, the midpoint of
//! element `e` is DOF `2e + 1`), which keeps the half-bandwidth at 2.

use std::sync::Arc;

use num_complex::Complex64;

use crate::banded::{factor, BandedComplexMatrix, BandedRealMatrix};
use crate::error::{Error, Result};
use crate::mesh::{Dim, Mesh, MeshId};
use crate::nonlinearity::log_f;
use crate::quadrature::QuadratureRule;

/// Polynomial degree of the Lagrange elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Linear,
    Quadratic,
}

impl Degree {
    pub fn order(self) -> usize {
        match self {
            Degree::Linear => 1,
            Degree::Quadratic => 2,
        }
    }

    pub fn from_order(r: usize) -> Result<Degree> {
        match r {
            1 => Ok(Degree::Linear),
            2 => Ok(Degree::Quadratic),
            _ => Err(Error::InvalidParameter(format!("element degree {r} must be 1 or 2"))),
        }
    }
}

/// Nodal coefficients of a finite-element function.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<Complex64>,
    mesh_id: MeshId,
    degree: Degree,
}

impl CoefficientVector {
    pub fn zeros(space: &FeSpace) -> Self {
        CoefficientVector {
            values: vec![Complex64::default(); space.n_dofs()],
            mesh_id: space.mesh.id(),
            degree: space.degree,
        }
    }

    pub fn from_values(space: &FeSpace, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.n_dofs() {
            return Err(Error::DimensionMismatch { expected: space.n_dofs(), got: values.len() });
        }
        Ok(CoefficientVector { values, mesh_id: space.mesh.id(), degree: space.degree })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Maximum nodal modulus.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Same function multiplied by a constant.
    pub fn scaled(&self, s: Complex64) -> Self {
        CoefficientVector {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }
}

/// Affine map from the reference element to element `e`.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    origin: [f64; 2],
    jac: [[f64; 2]; 2],
    /// Rows of `J^{-T}`.
    inv_t: [[f64; 2]; 2],
    det: f64,
}

impl Geometry {
    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * p[0] + self.jac[0][1] * p[1],
            self.origin[1] + self.jac[1][0] * p[0] + self.jac[1][1] * p[1],
        ]
    }

    fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

/// A mesh, an element degree, the induced DOF layout and a quadrature rule.
#[derive(Debug, Clone)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    degree: Degree,
    n_local: usize,
    elem_dofs: Vec<[usize; 3]>,
    dof_points: Vec<[f64; 2]>,
    is_boundary: Vec<bool>,
    boundary_dofs: Vec<usize>,
    interior_dofs: Vec<usize>,
    bandwidth: usize,
    quad: QuadratureRule,
    /// Reference basis values at each quadrature point.
    ref_values: Vec<[f64; 3]>,
    /// Reference basis gradients at each quadrature point.
    ref_grads: Vec<[[f64; 2]; 3]>,
}

impl FeSpace {
    /// Space with the default quadrature: `2r + 2` Gauss points per interval,
    /// the 7-point degree-5 rule on triangles.
    pub fn new(mesh: Arc<Mesh>, degree: Degree) -> Result<Self> {
        let order = Self::default_quad_order(mesh.dim(), degree);
        Self::with_quad_order(mesh, degree, order)
    }

    pub fn default_quad_order(dim: Dim, degree: Degree) -> usize {
        match dim {
            Dim::One => 4 * degree.order() + 3,
            Dim::Two => 5,
        }
    }

    pub fn with_quad_order(mesh: Arc<Mesh>, degree: Degree, quad_order: usize) -> Result<Self> {
        let r = degree.order();
        if r > mesh.degree_support() {
            return Err(Error::UnsupportedDegree {
                degree: r,
                dim: mesh.dim().as_usize(),
                max: mesh.degree_support(),
            });
        }
        let quad = QuadratureRule::with_order(mesh.dim(), quad_order)?;

        let n_el = mesh.n_elements();
        let (n_local, elem_dofs, dof_points, is_boundary) = match (mesh.dim(), degree) {
            (Dim::One, Degree::Quadratic) => {
                let n_dofs = 2 * n_el + 1;
                let mut pts = vec![[0.0; 2]; n_dofs];
                let mut bnd = vec![false; n_dofs];
                let mut dofs = Vec::with_capacity(n_el);
                for e in 0..n_el {
                    let v = mesh.element(e);
                    let (a, b) = (mesh.nodes()[v[0]][0], mesh.nodes()[v[1]][0]);
                    pts[2 * v[0]] = [a, 0.0];
                    pts[2 * v[1]] = [b, 0.0];
                    pts[2 * e + 1] = [0.5 * (a + b), 0.0];
                    bnd[2 * v[0]] = mesh.is_boundary(v[0]);
                    bnd[2 * v[1]] = mesh.is_boundary(v[1]);
                    dofs.push([2 * v[0], 2 * v[1], 2 * e + 1]);
                }
                (3, dofs, pts, bnd)
            }
            (dim, Degree::Linear) => {
                let nl = dim.as_usize() + 1;
                let dofs = (0..n_el)
                    .map(|e| {
                        let v = mesh.element(e);
                        let mut d = [usize::MAX; 3];
                        d[..nl].copy_from_slice(v);
                        d
                    })
                    .collect();
                let bnd = (0..mesh.n_nodes()).map(|i| mesh.is_boundary(i)).collect();
                (nl, dofs, mesh.nodes().to_vec(), bnd)
            }
            (Dim::Two, Degree::Quadratic) => unreachable!("rejected above"),
        };

        let bandwidth = elem_dofs
            .iter()
            .map(|d: &[usize; 3]| {
                let d = &d[..n_local];
                d.iter().max().unwrap() - d.iter().min().unwrap()
            })
            .max()
            .unwrap_or(0);
        let boundary_dofs = (0..is_boundary.len()).filter(|&i| is_boundary[i]).collect();
        let interior_dofs = (0..is_boundary.len()).filter(|&i| !is_boundary[i]).collect();

        let ref_values = quad.points().iter().map(|&p| ref_basis(mesh.dim(), degree, p).0).collect();
        let ref_grads = quad.points().iter().map(|&p| ref_basis(mesh.dim(), degree, p).1).collect();

        Ok(FeSpace {
            mesh,
            degree,
            n_local,
            elem_dofs,
            dof_points,
            is_boundary,
            boundary_dofs,
            interior_dofs,
            bandwidth,
            quad,
            ref_values,
            ref_grads,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn dim(&self) -> Dim {
        self.mesh.dim()
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_points.len()
    }

    /// Coordinates of the Lagrange node carrying each DOF.
    pub fn dof_points(&self) -> &[[f64; 2]] {
        &self.dof_points
    }

    pub fn element_dofs(&self, e: usize) -> &[usize] {
        &self.elem_dofs[e][..self.n_local]
    }

    pub fn is_boundary_dof(&self, i: usize) -> bool {
        self.is_boundary[i]
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior_dofs
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }

    /// Measure attached to one Lagrange node in the discrete `l²` norm: the
    /// node spacing `h / r` in 1D, the cell area in 2D.
    pub fn nodal_weight(&self) -> f64 {
        let [hx, hy] = self.mesh.grid().spacing();
        match self.dim() {
            Dim::One => hx / self.degree.order() as f64,
            Dim::Two => hx * hy,
        }
    }

    pub fn check(&self, u: &CoefficientVector) -> Result<()> {
        if u.mesh_id != self.mesh.id() || u.degree != self.degree || u.len() != self.n_dofs() {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn geometry(&self, e: usize) -> Geometry {
        let v = self.mesh.element(e);
        let p = |k: usize| self.mesh.nodes()[v[k]];
        match self.dim() {
            Dim::One => {
                let (a, b) = (p(0)[0], p(1)[0]);
                let h = b - a;
                Geometry {
                    origin: [a, 0.0],
                    jac: [[h, 0.0], [0.0, 0.0]],
                    inv_t: [[1.0 / h, 0.0], [0.0, 0.0]],
                    det: h,
                }
            }
            Dim::Two => {
                let (a, b, c) = (p(0), p(1), p(2));
                let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                let inv_t = [[jac[1][1] / det, -jac[1][0] / det], [-jac[0][1] / det, jac[0][0] / det]];
                Geometry { origin: a, jac, inv_t, det }
            }
        }
    }

    /// Calls `f(x, w, values)` at every quadrature point of element `e`, with
    /// `w` the physical weight and `values` the local basis values.
    pub fn for_each_qp(&self, e: usize, mut f: impl FnMut([f64; 2], f64, &[f64])) {
        let g = self.geometry(e);
        let scale = g.det.abs();
        for (q, (&p, &w)) in self.quad.points().iter().zip(self.quad.weights()).enumerate() {
            f(g.map(p), w * scale, &self.ref_values[q][..self.n_local]);
        }
    }

    /// As [`for_each_qp`](Self::for_each_qp), also passing physical basis gradients.
    pub fn for_each_qp_with_grads(&self, e: usize, mut f: impl FnMut([f64; 2], f64, &[f64], &[[f64; 2]])) {
        let g = self.geometry(e);
        let scale = g.det.abs();
        let mut grads = [[0.0; 2]; 3];
        for (q, (&p, &w)) in self.quad.points().iter().zip(self.quad.weights()).enumerate() {
            for (k, gr) in grads.iter_mut().enumerate().take(self.n_local) {
                *gr = g.grad(self.ref_grads[q][k]);
            }
            f(g.map(p), w * scale, &self.ref_values[q][..self.n_local], &grads[..self.n_local]);
        }
    }

    /// Value of the FE function `u` at each quadrature point of element `e`.
    fn local_value(&self, e: usize, u: &[Complex64], phi: &[f64]) -> Complex64 {
        self.element_dofs(e).iter().zip(phi).map(|(&d, &p)| u[d] * p).sum()
    }

    /// `∫_Ω F(x, u_h(x))` for the FE function `u`.
    pub fn integrate(&self, u: &CoefficientVector, mut integrand: impl FnMut([f64; 2], Complex64) -> f64) -> Result<f64> {
        self.check(u)?;
        let mut total = 0.0;
        for e in 0..self.mesh.n_elements() {
            self.for_each_qp(e, |x, w, phi| {
                total += w * integrand(x, self.local_value(e, &u.values, phi));
            });
        }
        Ok(total)
    }

    /// `‖∇u_h‖²_{L²}`.
    pub fn gradient_norm_sq(&self, u: &CoefficientVector) -> Result<f64> {
        self.check(u)?;
        let mut total = 0.0;
        for e in 0..self.mesh.n_elements() {
            let dofs = self.element_dofs(e);
            self.for_each_qp_with_grads(e, |_, w, _, grads| {
                let mut g = [Complex64::default(); 2];
                for (&d, gr) in dofs.iter().zip(grads) {
                    g[0] += u.values[d] * gr[0];
                    g[1] += u.values[d] * gr[1];
                }
                total += w * (g[0].norm_sqr() + g[1].norm_sqr());
            });
        }
        Ok(total)
    }
}

/// Basis values and reference gradients at reference point `p`.
fn ref_basis(dim: Dim, degree: Degree, p: [f64; 2]) -> ([f64; 3], [[f64; 2]; 3]) {
    let [s, t] = p;
    match (dim, degree) {
        (Dim::One, Degree::Linear) => ([1.0 - s, s, 0.0], [[-1.0, 0.0], [1.0, 0.0], [0.0; 2]]),
        (Dim::One, Degree::Quadratic) => (
            [(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)],
            [[4.0 * s - 3.0, 0.0], [4.0 * s - 1.0, 0.0], [4.0 - 8.0 * s, 0.0]],
        ),
        (Dim::Two, Degree::Linear) => ([1.0 - s - t, s, t], [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]),
        (Dim::Two, Degree::Quadratic) => unreachable!("quadratic triangles are not supported"),
    }
}

/// Mass matrix `M_ij = ∫ φ_i φ_j`.
pub fn assemble_mass(space: &FeSpace) -> BandedRealMatrix {
    let mut m = BandedRealMatrix::zeros(space.n_dofs(), space.bandwidth);
    for e in 0..space.mesh.n_elements() {
        let dofs = space.element_dofs(e);
        space.for_each_qp(e, |_, w, phi| {
            for (a, &i) in dofs.iter().enumerate() {
                for (b, &j) in dofs.iter().enumerate() {
                    m.add(i, j, w * phi[a] * phi[b]);
                }
            }
        });
    }
    m
}

/// Stiffness matrix `S_ij = ∫ ∇φ_i · ∇φ_j`, no boundary reduction.
pub fn assemble_stiffness(space: &FeSpace) -> BandedRealMatrix {
    let mut s = BandedRealMatrix::zeros(space.n_dofs(), space.bandwidth);
    for e in 0..space.mesh.n_elements() {
        let dofs = space.element_dofs(e);
        space.for_each_qp_with_grads(e, |_, w, _, grads| {
            for (a, &i) in dofs.iter().enumerate() {
                for (b, &j) in dofs.iter().enumerate() {
                    s.add(i, j, w * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]));
                }
            }
        });
    }
    s
}

/// Load vector `F_i = ∫ f(u_h) φ_i` with `f(z) = z ln|z|`, evaluated at the
/// quadrature points of the reconstructed FE function.
pub fn assemble_load_f(space: &FeSpace, u: &CoefficientVector) -> Result<Vec<Complex64>> {
    space.check(u)?;
    let mut load = vec![Complex64::default(); space.n_dofs()];
    assemble_load_f_into(space, &u.values, &mut load);
    Ok(load)
}

/// Allocation-free kernel of [`assemble_load_f`]; `load` is overwritten.
pub(crate) fn assemble_load_f_into(space: &FeSpace, u: &[Complex64], load: &mut [Complex64]) {
    load.iter_mut().for_each(|v| *v = Complex64::default());
    for e in 0..space.mesh.n_elements() {
        let dofs = space.element_dofs(e);
        space.for_each_qp(e, |_, w, phi| {
            let uq: Complex64 = dofs.iter().zip(phi).map(|(&d, &p)| u[d] * p).sum();
            let fq = log_f(uq) * w;
            for (&d, &p) in dofs.iter().zip(phi) {
                load[d] += fq * p;
            }
        });
    }
}

/// Nodal interpolant `I_h g`.
pub fn interpolate(space: &FeSpace, g: impl Fn(&[f64]) -> Complex64) -> CoefficientVector {
    let d = space.dim().as_usize();
    let values = space.dof_points.iter().map(|p| g(&p[..d])).collect();
    CoefficientVector { values, mesh_id: space.mesh.id(), degree: space.degree }
}

/// Ritz projection: `(∇R_h g, ∇φ) = (∇g, ∇φ)` for interior test functions,
/// with `R_h g = boundary` at boundary nodes.
pub fn ritz_project(
    space: &FeSpace,
    grad_g: impl Fn(&[f64]) -> [Complex64; 2],
    boundary: impl Fn(&[f64]) -> Complex64,
) -> Result<CoefficientVector> {
    if space.interior_dofs.is_empty() {
        return Err(Error::InvalidParameter("Ritz projection needs at least one interior DOF".into()));
    }
    let d = space.dim().as_usize();
    let mut rhs = vec![Complex64::default(); space.n_dofs()];
    for e in 0..space.mesh.n_elements() {
        let dofs = space.element_dofs(e);
        space.for_each_qp_with_grads(e, |x, w, _, grads| {
            let g = grad_g(&x[..d]);
            for (&i, gr) in dofs.iter().zip(grads) {
                rhs[i] += (g[0] * gr[0] + g[1] * gr[1]) * w;
            }
        });
    }
    let stiffness = assemble_stiffness(space);
    let mut values = vec![Complex64::default(); space.n_dofs()];
    for &b in &space.boundary_dofs {
        values[b] = boundary(&space.dof_points[b][..d]);
    }
    let mut reduced_rhs: Vec<Complex64> = space.interior_dofs.iter().map(|&i| rhs[i]).collect();
    for (k, &i) in space.interior_dofs.iter().enumerate() {
        for j in stiffness.row_range(i) {
            if space.is_boundary[j] {
                reduced_rhs[k] -= values[j] * stiffness.get(i, j);
            }
        }
    }
    let system: BandedComplexMatrix = stiffness.restrict(&space.interior_dofs).to_complex();
    let x = factor(&system)?.solve(&reduced_rhs)?;
    for (&i, v) in space.interior_dofs.iter().zip(x) {
        values[i] = v;
    }
    Ok(CoefficientVector { values, mesh_id: space.mesh.id(), degree: space.degree })
}

/// Discrete and continuous error measures against a pointwise exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `sqrt(w Σ_nodes |u_h - u|²)` with `w` the nodal weight.
    pub l2: f64,
    /// `max_nodes |u_h - u|`.
    pub linf: f64,
    /// `‖u_h - u‖_{L²(Ω)}` by quadrature.
    pub big_l2: f64,
}

pub fn error_norms(space: &FeSpace, u_h: &CoefficientVector, exact: impl Fn(&[f64]) -> Complex64) -> Result<ErrorNorms> {
    space.check(u_h)?;
    let d = space.dim().as_usize();
    let mut sum = 0.0;
    let mut linf: f64 = 0.0;
    for (p, v) in space.dof_points.iter().zip(&u_h.values) {
        let err = (v - exact(&p[..d])).norm();
        sum += err * err;
        linf = linf.max(err);
    }
    let l2 = (space.nodal_weight() * sum).sqrt();
    let big_l2 = space.integrate(u_h, |x, uh| (uh - exact(&x[..d])).norm_sqr())?.sqrt();
    Ok(ErrorNorms { l2, linf, big_l2 })
}

/// `‖∇(u_h - u)‖_{L²(Ω)}`.
pub fn h1_seminorm_error(
    space: &FeSpace,
    u_h: &CoefficientVector,
    grad_exact: impl Fn(&[f64]) -> [Complex64; 2],
) -> Result<f64> {
    space.check(u_h)?;
    let d = space.dim().as_usize();
    let mut total = 0.0;
    for e in 0..space.mesh.n_elements() {
        let dofs = space.element_dofs(e);
        space.for_each_qp_with_grads(e, |x, w, _, grads| {
            let mut g = grad_exact(&x[..d]);
            for (&i, gr) in dofs.iter().zip(grads) {
                g[0] -= u_h.values[i] * gr[0];
                g[1] -= u_h.values[i] * gr[1];
            }
            total += w * (g[0].norm_sqr() + g[1].norm_sqr());
        });
    }
    Ok(total.sqrt())
}
