//! Collocation losses for `-Δu = f`, `u = g`.
//!
//! Every loss is a function of two residual vectors: `Δv(x_i) + f_i` at the
//! interior sites and `v(z_i) - g_i` at the boundary sites.

use crate::error::{invalid, Error, Result};
use crate::geometry::{BoundaryGrid, Point, TensorGrid};
use crate::norms::{discrete_h12_semi, h12_pair_sum, lp_of_values, SampledField};

/// Anything that can report `v(p)` and `Δv(p)`.
pub trait FieldOracle {
    fn value(&self, p: &[f64]) -> f64;
    fn laplacian(&self, p: &[f64]) -> f64;

    fn values_at(&self, sites: &[Point]) -> Vec<f64> {
        sites.iter().map(|p| self.value(p.coords())).collect()
    }

    fn laplacians_at(&self, sites: &[Point]) -> Vec<f64> {
        sites.iter().map(|p| self.laplacian(p.coords())).collect()
    }
}

impl<T: FieldOracle + ?Sized> FieldOracle for &T {
    fn value(&self, p: &[f64]) -> f64 {
        (**self).value(p)
    }
    fn laplacian(&self, p: &[f64]) -> f64 {
        (**self).laplacian(p)
    }
    fn values_at(&self, sites: &[Point]) -> Vec<f64> {
        (**self).values_at(sites)
    }
    fn laplacians_at(&self, sites: &[Point]) -> Vec<f64> {
        (**self).laplacians_at(sites)
    }
}

/// Interior sites with right-hand side values `f_i` and boundary sites with
/// Dirichlet values `g_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationData {
    pub interior: SampledField,
    pub boundary: SampledField,
    pub d: usize,
}

impl CollocationData {
    pub fn new(interior: SampledField, boundary: SampledField, d: usize) -> Result<Self> {
        if interior.is_empty() || boundary.is_empty() {
            return Err(Error::EmptyField);
        }
        for p in interior.sites.iter().chain(&boundary.sites) {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
        }
        if let Some(p) = boundary.sites.iter().find(|p| !p.on_boundary()) {
            return Err(Error::OutsideAmbient(p.coords().to_vec()));
        }
        Ok(CollocationData {
            interior,
            boundary,
            d,
        })
    }

    /// Data on `G_{k,r}` and its boundary part.
    pub fn from_grids(
        grid: &TensorGrid,
        bgrid: &BoundaryGrid,
        f: impl Fn(&[f64]) -> f64,
        g: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let d = grid.spec().d;
        CollocationData::new(
            SampledField::from_fn(grid.points().to_vec(), f),
            SampledField::from_fn(bgrid.points().to_vec(), g),
            d,
        )
    }

    /// Uniform `n x ... x n` grid with spacing `1/(n-1)`; the interior set is
    /// every grid point and the boundary set is the subset on `∂Ω`.
    pub fn uniform(
        n: usize,
        d: usize,
        f: impl Fn(&[f64]) -> f64,
        g: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        if n < 2 {
            return invalid(format!("need at least 2 points per axis, got {n}"));
        }
        let sites = uniform_sites(n, d);
        let boundary: Vec<Point> = sites.iter().filter(|p| p.on_boundary()).cloned().collect();
        CollocationData::new(
            SampledField::from_fn(sites, f),
            SampledField::from_fn(boundary, g),
            d,
        )
    }

    pub fn m_tilde(&self) -> usize {
        self.interior.len()
    }

    pub fn m_bar(&self) -> usize {
        self.boundary.len()
    }

    /// Residuals of the candidate `v`.
    pub fn residuals(&self, v: &impl FieldOracle) -> SiteResiduals {
        let lap = v.laplacians_at(&self.interior.sites);
        let val = v.values_at(&self.boundary.sites);
        SiteResiduals {
            interior: lap.iter().zip(&self.interior.values).map(|(l, f)| l + f).collect(),
            boundary: val.iter().zip(&self.boundary.values).map(|(v, g)| v - g).collect(),
        }
    }
}

/// Lexicographic `n^d` grid of `[0,1]^d` with spacing `1/(n-1)`.
pub fn uniform_sites(n: usize, d: usize) -> Vec<Point> {
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = vec![0.0; d];
            for a in (0..d).rev() {
                c[a] = (idx % n) as f64 / (n - 1) as f64;
                idx /= n;
            }
            Point::from_vec(c)
        })
        .collect()
}

/// `Δv(x_i) + f_i` and `v(z_i) - g_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteResiduals {
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossVariant {
    /// `(1/m̃) Σ [Δv+f]² + (λ/m̄) Σ [v-g]²`.
    OriginalWeighted { lambda: f64 },
    /// `‖Δv+f‖*_{L_τ}² + |g-v|*_{H^{1/2}}² + ‖g-v‖*_{L_2}²`.
    ConsistentTau { tau: f64 },
    /// The unsquared loss `ℒ*`.
    LStar,
}

impl LossVariant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LossVariant::OriginalWeighted { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                invalid(format!("boundary weight λ = {lambda} must be positive"))
            }
            LossVariant::ConsistentTau { tau } if !(tau >= 1.0 && tau.is_finite()) => {
                invalid(format!("exponent τ = {tau} must be >= 1"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            LossVariant::OriginalWeighted { lambda } => format!("original(λ={lambda})"),
            LossVariant::ConsistentTau { tau } => format!("consistent(τ={tau})"),
            LossVariant::LStar => "lstar".into(),
        }
    }

    /// Loss value from precomputed residuals.
    pub fn evaluate(&self, res: &SiteResiduals, data: &CollocationData) -> Result<f64> {
        self.validate()?;
        match *self {
            LossVariant::OriginalWeighted { lambda } => {
                let dom = lp_of_values(&res.interior, 2.0)?;
                let bnd = lp_of_values(&res.boundary, 2.0)?;
                Ok(dom * dom + lambda * bnd * bnd)
            }
            LossVariant::ConsistentTau { tau } => {
                let dom = lp_of_values(&res.interior, tau)?;
                let semi = residual_semi(res, data)?;
                let bnd = lp_of_values(&res.boundary, 2.0)?;
                Ok(dom * dom + semi * semi + bnd * bnd)
            }
            LossVariant::LStar => {
                let m_tilde = data.m_tilde();
                let gamma = gamma_choice(data.d, m_tilde)?;
                let dom = lp_of_values(&res.interior, gamma)?;
                let semi = residual_semi(res, data)?;
                let bnd = lp_of_values(&res.boundary, 2.0)?;
                let factor = if data.d == 2 {
                    1.0 + (m_tilde as f64).ln()
                } else {
                    1.0
                };
                Ok(factor * dom + bnd + semi)
            }
        }
    }
}

fn residual_semi(res: &SiteResiduals, data: &CollocationData) -> Result<f64> {
    if res.boundary.len() < 2 {
        return invalid("the H^1/2 term needs at least two boundary sites");
    }
    let m = res.boundary.len() as f64;
    Ok((h12_pair_sum(&data.boundary.sites, &res.boundary, data.d)? / (m * m)).sqrt())
}

/// Exponent of the domain term: `2d/(d+2)` for `d >= 3`, `1 + 1/ln m̃` for
/// `d = 2`.
pub fn gamma_choice(d: usize, m_tilde: usize) -> Result<f64> {
    match d {
        0 | 1 => invalid(format!("dimension d = {d} must be >= 2")),
        2 if m_tilde < 3 => invalid(format!("m̃ = {m_tilde} must be >= 3 when d = 2")),
        2 => Ok(1.0 + 1.0 / (m_tilde as f64).ln()),
        _ => Ok(2.0 * d as f64 / (d as f64 + 2.0)),
    }
}

/// Boundary weight `λ(m̄) = m̄^{1/(d-1)}`.
pub fn lambda_weight(m_bar: usize, d: usize) -> Result<f64> {
    if m_bar == 0 {
        return invalid("m̄ must be >= 1");
    }
    if d < 2 {
        return invalid(format!("dimension d = {d} must be >= 2"));
    }
    Ok((m_bar as f64).powf(1.0 / (d as f64 - 1.0)))
}

pub fn loss_original(v: &impl FieldOracle, data: &CollocationData, lam: f64) -> Result<f64> {
    LossVariant::OriginalWeighted { lambda: lam }.evaluate(&data.residuals(v), data)
}

pub fn loss_consistent_tau(v: &impl FieldOracle, data: &CollocationData, tau: f64) -> Result<f64> {
    LossVariant::ConsistentTau { tau }.evaluate(&data.residuals(v), data)
}

pub fn loss_lstar(v: &impl FieldOracle, data: &CollocationData) -> Result<f64> {
    LossVariant::LStar.evaluate(&data.residuals(v), data)
}

/// The boundary residual as a field, for direct use with the norms module.
pub fn boundary_residual_field(v: &impl FieldOracle, data: &CollocationData) -> Result<SampledField> {
    let res = data.residuals(v);
    data.boundary.with_values(res.boundary)
}

/// `|g - v|*_{H^{1/2}}` on its own.
pub fn boundary_seminorm(v: &impl FieldOracle, data: &CollocationData) -> Result<f64> {
    discrete_h12_semi(&boundary_residual_field(v, data)?, data.d)
}
