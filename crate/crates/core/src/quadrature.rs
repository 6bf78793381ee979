//! Gauss–Legendre rules on the unit interval and collapsed (conical
//! product) rules on the reference simplex.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 64;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::UnsupportedQuadratureOrder(n));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Newton on P_n starting from the Chebyshev-like guess
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            // map [-1, 1] -> [0, 1], ascending
            nodes[n - 1 - i] = 0.5 * (x + 1.0);
            weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        Ok(GaussLegendre { nodes, weights })
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .sum::<f64>()
            * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature rule on the reference simplex `{xi >= 0, sum xi <= 1}`.
/// Weights sum to the simplex volume `1/n!`.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Collapsed tensor rule with `order` Gauss points per direction; exact
    /// for polynomials of degree `2 order - 1 - (dim - 1)` or better.
    pub fn collapsed(dim: usize, order: usize) -> Result<Self> {
        let gl = GaussLegendre::new(order)?;
        let mut points = vec![Vec::new()];
        let mut weights = vec![1.0];
        // Duffy: xi_1 = u_1, xi_2 = u_2 (1 - u_1), ... with jacobian
        // prod (1 - u_1)^{dim-1} (1 - u_2)^{dim-2} ...
        for _ in 0..dim {
            let mut next_p = Vec::with_capacity(points.len() * order);
            let mut next_w = Vec::with_capacity(points.len() * order);
            for (p, w) in points.iter().zip(&weights) {
                let used: f64 = p.iter().sum();
                let remaining = 1.0 - used;
                for (&u, &gw) in gl.nodes.iter().zip(&gl.weights) {
                    let mut q = p.clone();
                    q.push(u * remaining);
                    next_p.push(q);
                    next_w.push(w * gw * remaining);
                }
            }
            points = next_p;
            weights = next_w;
        }
        Ok(SimplexRule {
            dim,
            points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
