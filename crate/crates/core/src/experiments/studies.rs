//! Interpolation convergence and discrete/continuous norm comparisons.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{boundary_grid, interior_grid, kuhn_tucker_mesh, Ambient};
use crate::interp::{
    boundary_interpolate, interpolate, quad_error_lp, quad_h12_seminorm, quad_norm_lp,
    reference_basis, sampled_sup_error,
};
use crate::norms::{discrete_h12_semi, lp_of_values, SampledField};
use crate::prng::CounterRng;
use crate::rates::{expected_rate, measure_rate, NormKind, RateQuery, SmoothnessClass};

/// Errors below this are treated as exact reproduction.
pub const EXACT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyNorm {
    Sup,
    L2,
}

impl FromStr for StudyNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" | "linf" | "inf" => Ok(StudyNorm::Sup),
            "l2" => Ok(StudyNorm::L2),
            _ => invalid(format!("unknown norm `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `sin(πx) sin(πy)`
    SinSin,
    /// `1 + x - 2y + 3xy + x² - y²`
    Quadratic,
}

impl TestFunction {
    pub fn eval(self, p: &[f64]) -> f64 {
        let (x, y) = (p[0], p[1]);
        match self {
            TestFunction::SinSin => (PI * x).sin() * (PI * y).sin(),
            TestFunction::Quadratic => 1.0 + x - 2.0 * y + 3.0 * x * y + x * x - y * y,
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sinsin" => Ok(TestFunction::SinSin),
            "quadratic" => Ok(TestFunction::Quadratic),
            _ => invalid(format!("unknown test function `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub errors: Vec<(u32, f64)>,
    /// fitted order in `2^{-k}`; `None` when every error is at rounding level
    pub slope: Option<f64>,
    /// theoretical order in `2^{-k}`
    pub expected: f64,
}

impl ConvergenceResult {
    pub fn exact(&self) -> bool {
        self.slope.is_none()
    }
}

impl fmt::Display for ConvergenceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in &self.errors {
            writeln!(f, "k={k} error={e:.6e}")?;
        }
        match self.slope {
            Some(s) => write!(f, "slope={s:.4} expected={:.4}", self.expected),
            None => write!(f, "exact (errors at rounding level)"),
        }
    }
}

/// Interpolates `test` on `G_{k,r}` in 2-D for each `k` and fits the order.
pub fn convergence_study(r: usize, norm: StudyNorm, ks: &[u32], test: TestFunction) -> Result<ConvergenceResult> {
    if ks.len() < 3 {
        return invalid(format!("need at least 3 levels, got {}", ks.len()));
    }
    let d = 2;
    let basis = reference_basis(r, d)?;
    let f = |p: &[f64]| test.eval(p);
    let mut errors = Vec::with_capacity(ks.len());
    for &k in ks {
        let grid = interior_grid(k, r, d)?;
        let mesh = Arc::new(kuhn_tucker_mesh(k, d, Ambient::Domain)?);
        let pp = interpolate(&grid.sample(f), &grid, &mesh, &basis)?;
        let err = match norm {
            StudyNorm::Sup => sampled_sup_error(&pp, f, 2 * r + 2),
            StudyNorm::L2 => quad_error_lp(&pp, f, 2.0, r + 4)?,
        };
        errors.push((k, err));
    }
    let slope = if errors.iter().all(|(_, e)| *e < EXACT_TOL) {
        None
    } else {
        Some(measure_rate(&errors)?)
    };
    let class = SmoothnessClass::new(r as f64, f64::INFINITY, f64::INFINITY, d)?;
    let kind = match norm {
        StudyNorm::Sup => NormKind::C,
        StudyNorm::L2 => NormKind::Lp(2.0),
    };
    let expected = expected_rate(&RateQuery { norm: kind, class })?.k_scale(d);
    Ok(ConvergenceResult {
        errors,
        slope,
        expected,
    })
}

/// Largest relative sup error of the interpolant over `samples` random
/// polynomials of degree `r - 1` in `d` variables.
pub fn projector_error(r: usize, k: u32, d: usize, samples: usize, seed: u64) -> Result<f64> {
    let basis = reference_basis(r, d)?;
    let grid = interior_grid(k, r, d)?;
    let mesh = Arc::new(kuhn_tucker_mesh(k, d, Ambient::Domain)?);
    let exps = crate::interp::multi_indices(d, r - 1);
    let rng = CounterRng::new(seed);
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let coeffs: Vec<f64> = (0..exps.len())
            .map(|i| rng.normal((s * exps.len() + i) as u64))
            .collect();
        let poly = |p: &[f64]| -> f64 {
            exps.iter()
                .zip(&coeffs)
                .map(|(a, c)| c * a.iter().zip(p).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
                .sum()
        };
        let pp = interpolate(&grid.sample(poly), &grid, &mesh, &basis)?;
        let err = sampled_sup_error(&pp, poly, r + 2);
        let scale = grid.points().iter().fold(0.0f64, |m, p| m.max(poly(p.coords()).abs()));
        worst = worst.max(err / scale.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Ratios of a discrete norm to its continuous counterpart across levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceBand {
    pub label: String,
    pub ratios: Vec<(u32, f64)>,
}

impl EquivalenceBand {
    pub fn min(&self) -> f64 {
        self.ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max / min` over all samples and levels.
    pub fn spread(&self) -> f64 {
        self.max() / self.min()
    }
}

impl fmt::Display for EquivalenceBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: min={:.4} max={:.4} spread={:.4}",
            self.label,
            self.min(),
            self.max(),
            self.spread()
        )
    }
}

/// For random piecewise-linear functions on `G_{k,2}` in 2-D, compares the
/// discrete `L_τ` norms of the nodal values with quadrature norms of the
/// interpolant, and the discrete `H^{1/2}` seminorm of boundary values with
/// the quadrature seminorm of the boundary interpolant.
pub fn norm_equivalence_study(
    ks: &[u32],
    samples: usize,
    taus: &[f64],
    seed: u64,
    h12_tol: f64,
) -> Result<Vec<EquivalenceBand>> {
    let d = 2;
    let r = 2;
    let basis = reference_basis(r, d)?;
    let bbasis = reference_basis(r, d - 1)?;
    let mut bands: Vec<EquivalenceBand> = taus
        .iter()
        .map(|t| EquivalenceBand {
            label: format!("L_{t}"),
            ratios: Vec::new(),
        })
        .collect();
    let mut h12 = EquivalenceBand {
        label: "H^1/2".into(),
        ratios: Vec::new(),
    };
    for &k in ks {
        let grid = interior_grid(k, r, d)?;
        let mesh = Arc::new(kuhn_tucker_mesh(k, d, Ambient::Domain)?);
        let bgrid = boundary_grid(k, r, d)?;
        let bmesh = Arc::new(kuhn_tucker_mesh(k, d, Ambient::Boundary)?);
        for s in 0..samples {
            let rng = CounterRng::new(seed.wrapping_add(1_000 * k as u64 + s as u64));
            let values: Vec<f64> = rng.normals(0).take(grid.len()).collect();
            let pp = interpolate(&values, &grid, &mesh, &basis)?;
            for (band, &tau) in bands.iter_mut().zip(taus) {
                let discrete = lp_of_values(&values, tau)?;
                let cont = quad_norm_lp(&pp, tau, 6)?;
                band.ratios.push((k, discrete / cont));
            }
            let bvalues: Vec<f64> = rng.normals(grid.len() as u64).take(bgrid.len()).collect();
            let bpp = boundary_interpolate(&bvalues, &bgrid, &bmesh, &bbasis)?;
            let field = SampledField::new(bgrid.points().to_vec(), bvalues)?;
            let discrete = discrete_h12_semi(&field, d)?;
            let cont = quad_h12_seminorm(&bpp, h12_tol)?;
            h12.ratios.push((k, discrete / cont));
        }
    }
    bands.push(h12);
    Ok(bands)
}
