//! Discrete norms over data sites.
//!
//! All sums run in site order. The pair sum of the `H^{1/2}` seminorm is
//! accumulated row by row: for each `i`, the partial sum over `j > i` in
//! ascending `j`, then the row partials in ascending `i`, and the total is
//! doubled to count both orientations of every pair.

use crate::error::{invalid, Error, Result};
use crate::geometry::Point;

/// Values attached to an ordered list of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub sites: Vec<Point>,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn new(sites: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} sites but {} values",
                sites.len(),
                values.len()
            )));
        }
        Ok(SampledField { sites, values })
    }

    pub fn from_fn(sites: Vec<Point>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = sites.iter().map(|p| f(p.coords())).collect();
        SampledField { sites, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same sites, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        SampledField::new(self.sites.clone(), values)
    }
}

/// `[(1/m) sum |v_j|^tau]^{1/tau}`, or `max |v_j|` for `tau = ∞`.
pub fn lp_of_values(values: &[f64], tau: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyField);
    }
    if tau.is_nan() || tau < 1.0 {
        return invalid(format!("exponent tau = {tau} must be >= 1"));
    }
    if tau.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let m = values.len() as f64;
    let s: f64 = if tau == 2.0 {
        values.iter().map(|v| v * v).sum()
    } else if tau == 1.0 {
        values.iter().map(|v| v.abs()).sum()
    } else {
        values.iter().map(|v| v.abs().powf(tau)).sum()
    };
    Ok((s / m).powf(1.0 / tau))
}

/// Discrete `L_tau` norm over the interior sites.
pub fn discrete_lp(field: &SampledField, tau: f64) -> Result<f64> {
    lp_of_values(&field.values, tau)
}

/// Discrete `L_2(∂Ω)` norm over the boundary sites.
pub fn discrete_l2_boundary(field: &SampledField) -> Result<f64> {
    lp_of_values(&field.values, 2.0)
}

/// Kernel `|z_i - z_j|^{-d}`, with fast paths for `d = 2, 3`.
#[inline]
pub(crate) fn pair_kernel(a: &[f64], b: &[f64], d: usize) -> f64 {
    let r2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    match d {
        2 => 1.0 / r2,
        3 => 1.0 / (r2 * r2.sqrt()),
        4 => 1.0 / (r2 * r2),
        _ => r2.powf(-(d as f64) / 2.0),
    }
}

/// `sum_{i != j} |v_i - v_j|^2 / |z_i - z_j|^d` over the given sites.
pub(crate) fn h12_pair_sum(sites: &[Point], values: &[f64], d: usize) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..sites.len() {
        let zi = sites[i].coords();
        let vi = values[i];
        let mut row = 0.0;
        for j in i + 1..sites.len() {
            let w = pair_kernel(zi, sites[j].coords(), d);
            if !w.is_finite() {
                return Err(Error::DuplicateSites(i, j));
            }
            let diff = vi - values[j];
            row += w * diff * diff;
        }
        total += row;
    }
    Ok(2.0 * total)
}

/// Discrete `H^{1/2}(∂Ω)` seminorm
/// `[(1/m̄^2) sum_{i != j} |g_i - g_j|^2 / |z_i - z_j|^d]^{1/2}`.
pub fn discrete_h12_semi(field: &SampledField, d: usize) -> Result<f64> {
    if field.len() < 2 {
        return invalid("the discrete H^1/2 seminorm needs at least two sites");
    }
    if let Some(p) = field.sites.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    let m = field.len() as f64;
    Ok((h12_pair_sum(&field.sites, &field.values, d)? / (m * m)).sqrt())
}

/// Discrete `H^{1/2}(∂Ω)` norm: boundary `L_2` plus seminorm.
pub fn discrete_h12_norm(field: &SampledField, d: usize) -> Result<f64> {
    Ok(discrete_l2_boundary(field)? + discrete_h12_semi(field, d)?)
}

/// `max_i (1/m̄) sum_{j != i} |z_i - z_j|^{-d}`, the row bound of the pair
/// kernel that a boundary weight `λ(m̄)` has to dominate.
pub fn kernel_row_max(sites: &[Point], d: usize) -> Result<f64> {
    if sites.len() < 2 {
        return invalid("need at least two sites");
    }
    let m = sites.len() as f64;
    let mut worst: f64 = 0.0;
    for i in 0..sites.len() {
        let mut row = 0.0;
        for j in 0..sites.len() {
            if i == j {
                continue;
            }
            let w = pair_kernel(sites[i].coords(), sites[j].coords(), d);
            if !w.is_finite() {
                return Err(Error::DuplicateSites(i.min(j), i.max(j)));
            }
            row += w;
        }
        worst = worst.max(row / m);
    }
    Ok(worst)
}
