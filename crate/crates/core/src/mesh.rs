//! Quasi-uniform meshes on intervals and rectangles.
//!
//! 1D meshes are uniform partitions of `(a, b)`. 2D meshes split every cell
//! of an `nx × ny` grid into two right triangles. The split diagonal is
//! chosen per cell so that the mesh is mirror-symmetric about both centre
//! lines of the rectangle: cells in the lower-left and upper-right quadrants
//! use the `/` diagonal, the other two quadrants use `\`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

static NEXT_MESH_ID: AtomicU64 = AtomicU64::new(1);

/// Identifier tying coefficient vectors to the mesh they were built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeshId(u64);

impl MeshId {
    fn fresh() -> Self {
        MeshId(NEXT_MESH_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// Spatial dimension of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Regular grid layout the mesh was generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridShape {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    /// Cells per direction; `cells[1] == 0` for 1D meshes.
    pub cells: [usize; 2],
}

impl GridShape {
    /// Cell side lengths. The second entry is 0 in 1D.
    pub fn spacing(&self) -> [f64; 2] {
        let hx = (self.upper[0] - self.lower[0]) / self.cells[0] as f64;
        let hy = if self.cells[1] == 0 {
            0.0
        } else {
            (self.upper[1] - self.lower[1]) / self.cells[1] as f64
        };
        [hx, hy]
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    id: MeshId,
    dim: Dim,
    nodes: Vec<[f64; 2]>,
    /// Vertex indices; the third entry is unused for 1D elements.
    elements: Vec<[usize; 3]>,
    boundary_nodes: BTreeSet<usize>,
    h: f64,
    grid: GridShape,
}

impl Mesh {
    /// Uniform partition of `(a, b)` into `n_elements` subintervals.
    pub fn uniform_interval(a: f64, b: f64, n_elements: usize) -> Result<Mesh> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidMesh(format!("interval ({a}, {b}) is empty")));
        }
        if n_elements == 0 {
            return Err(Error::InvalidMesh("need at least one element".into()));
        }
        let h = (b - a) / n_elements as f64;
        let nodes: Vec<[f64; 2]> = (0..=n_elements)
            .map(|i| {
                // pin the right endpoint exactly
                let x = if i == n_elements { b } else { a + i as f64 * h };
                [x, 0.0]
            })
            .collect();
        let elements = (0..n_elements).map(|e| [e, e + 1, usize::MAX]).collect();
        let boundary_nodes = [0, n_elements].into_iter().collect();
        Ok(Mesh {
            id: MeshId::fresh(),
            dim: Dim::One,
            nodes,
            elements,
            boundary_nodes,
            h,
            grid: GridShape {
                lower: [a, 0.0],
                upper: [b, 0.0],
                cells: [n_elements, 0],
            },
        })
    }

    /// Structured triangulation of `(x0, x1) × (y0, y1)` with `nx × ny` cells,
    /// two triangles per cell. Nodes are numbered row by row in `x`.
    pub fn structured_triangulation(
        x_range: (f64, f64),
        y_range: (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Mesh> {
        let (x0, x1) = x_range;
        let (y0, y1) = y_range;
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidMesh(format!(
                "rectangle ({x0}, {x1}) x ({y0}, {y1}) is degenerate"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidMesh("need at least one cell per direction".into()));
        }
        let hx = (x1 - x0) / nx as f64;
        let hy = (y1 - y0) / ny as f64;
        let coord = |i: usize, n: usize, lo: f64, hi: f64, step: f64| {
            if i == n {
                hi
            } else {
                lo + i as f64 * step
            }
        };
        let node = |i: usize, j: usize| j * (nx + 1) + i;

        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut boundary_nodes = BTreeSet::new();
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([coord(i, nx, x0, x1, hx), coord(j, ny, y0, y1, hy)]);
                if i == 0 || j == 0 || i == nx || j == ny {
                    boundary_nodes.insert(node(i, j));
                }
            }
        }

        // Doubled cell-centre offsets from the rectangle centre, kept in
        // integers so the quadrant test is exact.
        let mut elements = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let sx = 2 * i as i64 + 1 - nx as i64;
                let sy = 2 * j as i64 + 1 - ny as i64;
                let (sw, se, nw, ne) = (node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1));
                if sx * sy > 0 {
                    // '/' diagonal sw-ne
                    elements.push([sw, se, ne]);
                    elements.push([sw, ne, nw]);
                } else {
                    // '\' diagonal se-nw
                    elements.push([sw, se, nw]);
                    elements.push([se, ne, nw]);
                }
            }
        }

        Ok(Mesh {
            id: MeshId::fresh(),
            dim: Dim::Two,
            nodes,
            elements,
            boundary_nodes,
            h: hx.hypot(hy),
            grid: GridShape {
                lower: [x0, y0],
                upper: [x1, y1],
                cells: [nx, ny],
            },
        })
    }

    pub fn id(&self) -> MeshId {
        self.id
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Vertex indices of element `e` (2 in 1D, 3 in 2D).
    pub fn element(&self, e: usize) -> &[usize] {
        match self.dim {
            Dim::One => &self.elements[e][..2],
            Dim::Two => &self.elements[e][..3],
        }
    }

    pub fn boundary_nodes(&self) -> &BTreeSet<usize> {
        &self.boundary_nodes
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary_nodes.contains(&node)
    }

    /// Maximum element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Highest Lagrange degree the FE layer supports on this mesh.
    pub fn degree_support(&self) -> usize {
        match self.dim {
            Dim::One => 2,
            Dim::Two => 1,
        }
    }

    pub fn grid(&self) -> &GridShape {
        &self.grid
    }

    /// Measure of the meshed domain.
    pub fn domain_measure(&self) -> f64 {
        let g = &self.grid;
        match self.dim {
            Dim::One => g.upper[0] - g.lower[0],
            Dim::Two => (g.upper[0] - g.lower[0]) * (g.upper[1] - g.lower[1]),
        }
    }

    /// Length (1D) or area (2D) of element `e`.
    pub fn element_measure(&self, e: usize) -> f64 {
        let v = self.element(e);
        match self.dim {
            Dim::One => (self.nodes[v[1]][0] - self.nodes[v[0]][0]).abs(),
            Dim::Two => {
                let [a, b, c] = [self.nodes[v[0]], self.nodes[v[1]], self.nodes[v[2]]];
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
            }
        }
    }

    /// Largest vertex-to-vertex distance of element `e`.
    pub fn element_diameter(&self, e: usize) -> f64 {
        let v = self.element(e);
        let mut d: f64 = 0.0;
        for (k, &p) in v.iter().enumerate() {
            for &q in &v[k + 1..] {
                let (a, b) = (self.nodes[p], self.nodes[q]);
                d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        d
    }

    /// Plain-text listing: one `node <index> <coords>` line per node, then one
    /// `element <index> <vertices>` line per element.
    pub fn dump(&self) -> String {
        let d = self.dim.as_usize();
        let mut out = String::new();
        for (i, p) in self.nodes.iter().enumerate() {
            let _ = write!(out, "node {i}");
            for c in &p[..d] {
                let _ = write!(out, " {c:.17e}");
            }
            out.push('\n');
        }
        for e in 0..self.n_elements() {
            let _ = write!(out, "element {e}");
            for v in self.element(e) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn interval_with_two_elements() {
        let m = Mesh::uniform_interval(-1.0, 1.0, 2).unwrap();
        let xs: Vec<f64> = m.nodes().iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![-1.0, 0.0, 1.0]);
        assert_eq!(m.h(), 1.0);
        assert_eq!(m.boundary_nodes().iter().copied().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn interval_64_elements_has_h_two_to_minus_five() {
        let m = Mesh::uniform_interval(-1.0, 1.0, 64).unwrap();
        assert_eq!(m.h(), 2f64.powi(-5));
    }

    #[test]
    fn single_element_interval() {
        let m = Mesh::uniform_interval(0.0, 1.0, 1).unwrap();
        assert_eq!(m.n_elements(), 1);
        assert_eq!(m.n_nodes(), 2);
        assert_eq!(m.boundary_nodes().len(), 2);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(Mesh::uniform_interval(1.0, 1.0, 4).is_err());
        assert!(Mesh::uniform_interval(2.0, 1.0, 4).is_err());
        assert!(Mesh::uniform_interval(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn unit_square_single_cell() {
        let m = Mesh::structured_triangulation((0.0, 1.0), (0.0, 1.0), 1, 1).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.n_nodes(), 4);
        assert_eq!(m.boundary_nodes().len(), 4);
    }

    #[test]
    fn square_64_cells_h_is_cell_diagonal() {
        let m = Mesh::structured_triangulation((-1.0, 1.0), (-1.0, 1.0), 64, 64).unwrap();
        assert!((m.h() - 2f64.sqrt() / 32.0).abs() < 1e-15);
        let max_diam = (0..m.n_elements()).map(|e| m.element_diameter(e)).fold(0.0, f64::max);
        assert!((max_diam - m.h()).abs() < 1e-14);
    }

    #[test]
    fn large_square_cell_side_is_point_one() {
        let m = Mesh::structured_triangulation((-10.0, 10.0), (-10.0, 10.0), 200, 200).unwrap();
        let [hx, hy] = m.grid().spacing();
        assert!((hx - 0.1).abs() < 1e-15 && (hy - 0.1).abs() < 1e-15);
        assert_eq!(m.n_elements(), 2 * 200 * 200);
    }

    #[test]
    fn rejects_degenerate_rectangles() {
        assert!(Mesh::structured_triangulation((0.0, 0.0), (0.0, 1.0), 2, 2).is_err());
        assert!(Mesh::structured_triangulation((0.0, 1.0), (0.0, 1.0), 0, 2).is_err());
    }

    #[test]
    fn boundary_classification_2d() {
        let m = Mesh::structured_triangulation((0.0, 2.0), (0.0, 3.0), 4, 6).unwrap();
        for (i, p) in m.nodes().iter().enumerate() {
            let on_edge = p[0] == 0.0 || p[0] == 2.0 || p[1] == 0.0 || p[1] == 3.0;
            assert_eq!(on_edge, m.is_boundary(i), "node {i} at {p:?}");
        }
    }

    #[test]
    fn interior_edges_shared_by_two_triangles() {
        let m = Mesh::structured_triangulation((0.0, 1.0), (0.0, 1.0), 5, 4).unwrap();
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for e in 0..m.n_elements() {
            let v = m.element(e);
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for ((a, b), c) in count {
            let boundary_edge = m.is_boundary(a) && m.is_boundary(b) && {
                let (p, q) = (m.nodes()[a], m.nodes()[b]);
                (p[0] == q[0] && (p[0] == 0.0 || p[0] == 1.0))
                    || (p[1] == q[1] && (p[1] == 0.0 || p[1] == 1.0))
            };
            assert_eq!(c, if boundary_edge { 1 } else { 2 }, "edge ({a},{b})");
        }
    }

    #[test]
    fn triangulation_is_mirror_symmetric() {
        let (nx, ny) = (6, 4);
        let m = Mesh::structured_triangulation((-1.0, 1.0), (-1.0, 1.0), nx, ny).unwrap();
        let mirror = |v: usize| {
            let (i, j) = (v % (nx + 1), v / (nx + 1));
            j * (nx + 1) + (nx - i)
        };
        let canon = |t: &[usize]| {
            let mut s = [t[0], t[1], t[2]];
            s.sort();
            s
        };
        let all: BTreeSet<[usize; 3]> = (0..m.n_elements()).map(|e| canon(m.element(e))).collect();
        for t in &all {
            let r = canon(&[mirror(t[0]), mirror(t[1]), mirror(t[2])]);
            assert!(all.contains(&r));
        }
    }

    #[test]
    fn dump_lists_nodes_and_elements() {
        let m = Mesh::uniform_interval(0.0, 1.0, 2).unwrap();
        let text = m.dump();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(3).unwrap().starts_with("element 0 0 1"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn element_measures_tile_the_interval(a in -50.0f64..50.0, len in 1e-3f64..100.0, n in 1usize..300) {
                let m = Mesh::uniform_interval(a, a + len, n).unwrap();
                let total: f64 = (0..m.n_elements()).map(|e| m.element_measure(e)).sum();
                prop_assert!((total - m.domain_measure()).abs() <= 1e-12 * m.domain_measure());
                for e in 1..m.n_elements() {
                    prop_assert_eq!(m.element(e)[0], m.element(e - 1)[1]);
                }
            }

            #[test]
            fn element_measures_tile_the_rectangle(
                x0 in -10.0f64..10.0, lx in 0.1f64..20.0,
                y0 in -10.0f64..10.0, ly in 0.1f64..20.0,
                nx in 1usize..20, ny in 1usize..20,
            ) {
                let m = Mesh::structured_triangulation((x0, x0 + lx), (y0, y0 + ly), nx, ny).unwrap();
                let total: f64 = (0..m.n_elements()).map(|e| m.element_measure(e)).sum();
                prop_assert!((total - m.domain_measure()).abs() <= 1e-12 * m.domain_measure());
                for e in 0..m.n_elements() {
                    let v = m.element(e);
                    prop_assert!(v[0] != v[1] && v[1] != v[2] && v[0] != v[2]);
                    prop_assert!(v.iter().all(|&i| i < m.n_nodes()));
                }
            }
        }
    }
}
