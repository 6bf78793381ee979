//! Optimal-recovery exponents for Besov model classes and empirical slope
//! fitting.
//!
//! An exponent `α` means an error of order `m^{-α}` in the number of data
//! sites `m`. On a dyadic grid of level `k` there are `m ≍ 2^{kd}` interior
//! sites and `m ≍ 2^{k(d-1)}` boundary sites, so the same rate reads
//! `2^{-k α d}` (or `2^{-k α (d-1)}` on the boundary); see [`Rate::k_scale`].

use crate::error::{invalid, Result};

/// `B^s_q(L_p)` on a `d`-dimensional domain (or on the boundary of one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessClass {
    pub s: f64,
    /// `f64::INFINITY` for `p = ∞`
    pub p: f64,
    pub q: f64,
    pub d: usize,
}

impl SmoothnessClass {
    pub fn new(s: f64, p: f64, q: f64, d: usize) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return invalid(format!("smoothness s = {s} must be positive"));
        }
        if !(p > 0.0) || !(q > 0.0) {
            return invalid(format!("p = {p} and q = {q} must be positive"));
        }
        if d == 0 {
            return invalid("dimension must be >= 1");
        }
        Ok(SmoothnessClass { s, p, q, d })
    }

    fn inv_p(&self) -> f64 {
        1.0 / self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    C,
    Lp(f64),
    H1,
    HMinus1,
    /// `H^{1/2}(∂Ω)`; the class carries the boundary parameters `s̄, p̄`
    H12Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQuery {
    pub norm: NormKind,
    pub class: SmoothnessClass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    /// exponent in the number of sites
    pub exponent: f64,
    /// the bound carries an extra `log m` factor
    pub log_factor: bool,
    boundary: bool,
}

impl Rate {
    /// Exponent in `2^{-k}`.
    pub fn k_scale(&self, d: usize) -> f64 {
        let dim = if self.boundary { d - 1 } else { d };
        self.exponent * dim as f64
    }
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

pub fn expected_rate(query: &RateQuery) -> Result<Rate> {
    let c = query.class;
    let d = c.d as f64;
    let inv_p = c.inv_p();
    let boundary = matches!(query.norm, NormKind::H12Boundary);
    let dim = if boundary { d - 1.0 } else { d };
    if boundary && c.d < 2 {
        return invalid("boundary rates need d >= 2");
    }
    if c.s <= dim * inv_p {
        return invalid(format!(
            "class is not embedded in C: s = {} <= {dim}/p",
            c.s
        ));
    }
    if matches!(query.norm, NormKind::H1 | NormKind::H12Boundary) && c.p > 2.0 {
        return invalid(format!("p = {} must be <= 2 for this norm", c.p));
    }
    let rate = |exponent, log_factor| {
        Ok(Rate {
            exponent,
            log_factor,
            boundary,
        })
    };
    match query.norm {
        NormKind::C => rate(c.s / d - inv_p, false),
        NormKind::Lp(tau) => {
            if !(tau >= 1.0) {
                return invalid(format!("τ = {tau} must be >= 1"));
            }
            rate(c.s / d - pos(inv_p - 1.0 / tau), false)
        }
        NormKind::H1 => rate((c.s - 1.0) / d - (inv_p - 0.5), false),
        NormKind::HMinus1 => {
            let inv_delta = 0.5 + 1.0 / d;
            rate(c.s / d - pos(inv_p - inv_delta), c.d == 2 && c.p <= 1.0)
        }
        NormKind::H12Boundary => {
            rate((c.s - 1.0) / (d - 1.0) - d / (d - 1.0) * (inv_p - 0.5), false)
        }
    }
}

/// Rate for the solution from data classes for `f` and `g`: the smaller of
/// the `H^{-1}` rate of `f` and the boundary rate of `g`.
pub fn solution_rate(f_class: SmoothnessClass, g_class: SmoothnessClass) -> Result<Rate> {
    let a = expected_rate(&RateQuery {
        norm: NormKind::HMinus1,
        class: f_class,
    })?;
    let b = expected_rate(&RateQuery {
        norm: NormKind::H12Boundary,
        class: g_class,
    })?;
    Ok(if a.exponent <= b.exponent {
        a
    } else {
        Rate {
            log_factor: false,
            ..b
        }
    })
}

/// Least-squares slope of `log2(error)` against `-k`.
pub fn measure_rate(errors: &[(u32, f64)]) -> Result<f64> {
    if errors.len() < 3 {
        return invalid(format!("need at least 3 levels, got {}", errors.len()));
    }
    if let Some((k, e)) = errors.iter().find(|(_, e)| !(*e > 0.0 && e.is_finite())) {
        return invalid(format!("error {e} at level {k} must be positive"));
    }
    let n = errors.len() as f64;
    let xs: Vec<f64> = errors.iter().map(|(k, _)| -(*k as f64)).collect();
    let ys: Vec<f64> = errors.iter().map(|(_, e)| e.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return invalid("levels must not all coincide");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
