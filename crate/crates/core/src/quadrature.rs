//! Quadrature on the reference elements: `[0, 1]` in 1D and the unit
//! triangle `{(s, t) : s, t ≥ 0, s + t ≤ 1}` in 2D.

use crate::error::{Error, Result};
use crate::mesh::Dim;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: Dim,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    order: usize,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule mapped to `[0, 1]`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Gauss-Legendre rule needs n >= 1".into()));
        }
        let (nodes, weights) = gauss_legendre_nodes(n);
        Ok(QuadratureRule {
            dim: Dim::One,
            points: nodes.iter().map(|&x| [0.5 * (x + 1.0), 0.0]).collect(),
            weights: weights.iter().map(|w| 0.5 * w).collect(),
            order: 2 * n - 1,
        })
    }

    /// Centroid rule, exact for degree 1.
    pub fn triangle_centroid() -> Self {
        QuadratureRule {
            dim: Dim::Two,
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            order: 1,
        }
    }

    /// Three interior points, exact for degree 2.
    pub fn triangle_three_point() -> Self {
        let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
        QuadratureRule {
            dim: Dim::Two,
            points: vec![[a, a], [b, a], [a, b]],
            weights: vec![1.0 / 6.0; 3],
            order: 2,
        }
    }

    /// Seven-point symmetric rule (Radon), exact for degree 5.
    pub fn triangle_seven_point() -> Self {
        let s15 = 15f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let b1 = (9.0 + 2.0 * s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let b2 = (9.0 - 2.0 * s15) / 21.0;
        let w0 = 9.0 / 80.0;
        let w1 = (155.0 - s15) / 2400.0;
        let w2 = (155.0 + s15) / 2400.0;
        QuadratureRule {
            dim: Dim::Two,
            points: vec![
                [1.0 / 3.0, 1.0 / 3.0],
                [a1, a1],
                [b1, a1],
                [a1, b1],
                [a2, a2],
                [b2, a2],
                [a2, b2],
            ],
            weights: vec![w0, w1, w1, w1, w2, w2, w2],
            order: 5,
        }
    }

    /// Cheapest available rule on the reference element of `dim` that is
    /// exact to polynomial degree `order`.
    pub fn with_order(dim: Dim, order: usize) -> Result<Self> {
        match dim {
            Dim::One => Self::gauss_legendre(order / 2 + 1),
            Dim::Two => match order {
                0 | 1 => Ok(Self::triangle_centroid()),
                2 => Ok(Self::triangle_three_point()),
                3..=5 => Ok(Self::triangle_seven_point()),
                _ => Err(Error::UnsupportedQuadrature(order)),
            },
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
