//! Residuals of a network on collocation data and their parameter
//! derivatives.
//!
//! Every quadratic loss here has the form
//! `Σ_i ω_i e_i² + e_bᵀ K e_b`, with interior residuals `e_i = Δv(x_i) + f_i`,
//! boundary residuals `e_b = v(z) - g` and a symmetric boundary form `K`.
//! The explicit residual vector stacks domain rows, then `H^{1/2}` pair rows
//! for `i < j`, then boundary `L_2` rows.

use faer::Mat;

use super::network::Network;
use crate::error::{Error, Result};
use crate::loss::{CollocationData, LossVariant, SiteResiduals};
use crate::norms::pair_kernel;

/// Floor on `|e_i|` inside the reweighting of non-quadratic domain terms.
pub const IRLS_FLOOR: f64 = 1e-8;

/// Residuals and their Jacobians at every collocation site.
#[derive(Debug, Clone)]
pub struct SiteLinearization {
    pub residuals: SiteResiduals,
    /// `m̃ x P`, row `i` is `∂(Δv(x_i))/∂θ`
    pub interior: Mat<f64>,
    /// `m̄ x P`, row `i` is `∂v(z_i)/∂θ`
    pub boundary: Mat<f64>,
}

pub fn linearize(net: &Network, data: &CollocationData) -> Result<SiteLinearization> {
    let np = net.params().len();
    let nch = net.arch().d_in + 2;
    let mut tape = net.new_tape();
    let mut lap_seed = vec![0.0; nch];
    lap_seed[nch - 1] = 1.0;
    let mut val_seed = vec![0.0; nch];
    val_seed[0] = 1.0;

    let mut rows = |field: &crate::norms::SampledField, seed: &[f64], lap: bool| -> Result<(Vec<f64>, Mat<f64>)> {
        let m = field.len();
        let mut buf = vec![0.0; m * np];
        let mut res = Vec::with_capacity(m);
        for (i, (p, target)) in field.sites.iter().zip(&field.values).enumerate() {
            net.forward(p.coords(), &mut tape)?;
            res.push(if lap {
                tape.laplacian() + target
            } else {
                tape.value() - target
            });
            net.backward(&tape, seed, &mut buf[i * np..(i + 1) * np]);
        }
        Ok((res, Mat::from_fn(m, np, |i, k| buf[i * np + k])))
    };
    let (interior_res, interior) = rows(&data.interior, &lap_seed, true)?;
    let (boundary_res, boundary) = rows(&data.boundary, &val_seed, false)?;
    Ok(SiteLinearization {
        residuals: SiteResiduals {
            interior: interior_res,
            boundary: boundary_res,
        },
        interior,
        boundary,
    })
}

/// Per-site domain weights and the boundary form of a quadratic variant,
/// frozen at the current residuals.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub domain_weights: Vec<f64>,
    /// diagonal of the boundary `L_2` part
    pub boundary_diag: Vec<f64>,
    /// `c_ij²` for `i < j`, row-major over the strict upper triangle; empty
    /// when the variant has no `H^{1/2}` term
    pub pair_weights: Vec<f64>,
}

impl QuadraticModel {
    pub fn new(variant: &LossVariant, data: &CollocationData, res: &SiteResiduals) -> Result<Self> {
        variant.validate()?;
        let m_tilde = data.m_tilde() as f64;
        let m_bar = data.m_bar();
        let mb = m_bar as f64;
        match *variant {
            LossVariant::LStar => Err(Error::NotSumOfSquares(variant.name())),
            LossVariant::OriginalWeighted { lambda } => Ok(QuadraticModel {
                domain_weights: vec![1.0 / m_tilde; data.m_tilde()],
                boundary_diag: vec![lambda / mb; m_bar],
                pair_weights: Vec::new(),
            }),
            LossVariant::ConsistentTau { tau } => {
                if m_bar < 2 {
                    return Err(Error::InvalidParameter(
                        "the H^1/2 term needs at least two boundary sites".into(),
                    ));
                }
                let domain_weights = domain_weights(&res.interior, tau);
                let sites = &data.boundary.sites;
                let mut pair_weights = Vec::with_capacity(m_bar * (m_bar - 1) / 2);
                for i in 0..m_bar {
                    for j in i + 1..m_bar {
                        let w = pair_kernel(sites[i].coords(), sites[j].coords(), data.d);
                        if !w.is_finite() {
                            return Err(Error::DuplicateSites(i, j));
                        }
                        pair_weights.push(2.0 * w / (mb * mb));
                    }
                }
                Ok(QuadraticModel {
                    domain_weights,
                    boundary_diag: vec![1.0 / mb; m_bar],
                    pair_weights,
                })
            }
        }
    }

    /// Dense boundary form `K`.
    pub fn boundary_form(&self) -> Mat<f64> {
        let m = self.boundary_diag.len();
        let mut k = Mat::<f64>::zeros(m, m);
        for i in 0..m {
            k[(i, i)] = self.boundary_diag[i];
        }
        let mut idx = 0;
        if !self.pair_weights.is_empty() {
            for i in 0..m {
                for j in i + 1..m {
                    let c = self.pair_weights[idx];
                    idx += 1;
                    k[(i, i)] += c;
                    k[(j, j)] += c;
                    k[(i, j)] -= c;
                    k[(j, i)] -= c;
                }
            }
        }
        k
    }

    /// `Σ ω_i e_i² + e_bᵀ K e_b`.
    pub fn value(&self, res: &SiteResiduals) -> f64 {
        self.explicit_residuals(res).iter().map(|r| r * r).sum()
    }

    /// Stacked residual vector whose squared norm is [`Self::value`].
    pub fn explicit_residuals(&self, res: &SiteResiduals) -> Vec<f64> {
        let mut r: Vec<f64> = res
            .interior
            .iter()
            .zip(&self.domain_weights)
            .map(|(e, w)| w.sqrt() * e)
            .collect();
        self.push_pairs(&res.boundary, &mut r, |a, b| a - b);
        r.extend(
            res.boundary
                .iter()
                .zip(&self.boundary_diag)
                .map(|(e, w)| w.sqrt() * e),
        );
        r
    }

    fn push_pairs<T>(&self, b: &[T], out: &mut Vec<T>, diff: impl Fn(&T, &T) -> T)
    where
        T: std::ops::Mul<f64, Output = T>,
    {
        if self.pair_weights.is_empty() {
            return;
        }
        let m = b.len();
        let mut idx = 0;
        for i in 0..m {
            for j in i + 1..m {
                out.push(diff(&b[i], &b[j]) * self.pair_weights[idx].sqrt());
                idx += 1;
            }
        }
    }
}

/// Domain weights `ω_i`. For `τ = 2` these are `1/m̃`; otherwise
/// `ω_i = A^{2/τ-1} max(|e_i|, floor)^{τ-2} / m̃` with `A = mean |e|^τ`, so
/// that `Σ ω_i e_i²` reproduces `‖e‖_τ²` and its gradient.
pub fn domain_weights(e: &[f64], tau: f64) -> Vec<f64> {
    let m = e.len() as f64;
    if tau == 2.0 {
        return vec![1.0 / m; e.len()];
    }
    let a = e.iter().map(|x| x.abs().powf(tau)).sum::<f64>() / m;
    if a == 0.0 {
        return vec![0.0; e.len()];
    }
    let scale = a.powf(2.0 / tau - 1.0) / m;
    e.iter()
        .map(|x| scale * x.abs().max(IRLS_FLOOR).powf(tau - 2.0))
        .collect()
}

/// Stacked residual vector `r` with `‖r‖² =` the variant's loss.
pub fn residual_vector(net: &Network, data: &CollocationData, variant: &LossVariant) -> Result<Vec<f64>> {
    let res = data.residuals(net);
    let model = QuadraticModel::new(variant, data, &res)?;
    Ok(model.explicit_residuals(&res))
}

/// Jacobian of [`residual_vector`] with respect to the flat parameters.
pub fn param_jacobian(net: &Network, data: &CollocationData, variant: &LossVariant) -> Result<Mat<f64>> {
    let lin = linearize(net, data)?;
    let model = QuadraticModel::new(variant, data, &lin.residuals)?;
    let np = net.params().len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, w) in model.domain_weights.iter().enumerate() {
        let s = w.sqrt();
        rows.push((0..np).map(|k| s * lin.interior[(i, k)]).collect());
    }
    let brows: Vec<Row> = (0..data.m_bar())
        .map(|i| Row((0..np).map(|k| lin.boundary[(i, k)]).collect()))
        .collect();
    let mut pairs = Vec::new();
    model.push_pairs(&brows, &mut pairs, |a, b| {
        Row(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect())
    });
    rows.extend(pairs.into_iter().map(|r| r.0));
    for (i, w) in model.boundary_diag.iter().enumerate() {
        let s = w.sqrt();
        rows.push(brows[i].0.iter().map(|x| s * x).collect());
    }
    Ok(Mat::from_fn(rows.len(), np, |i, k| rows[i][k]))
}

struct Row(Vec<f64>);

impl std::ops::Mul<f64> for Row {
    type Output = Row;
    fn mul(mut self, s: f64) -> Row {
        for x in &mut self.0 {
            *x *= s;
        }
        self
    }
}

/// Gauss–Newton normal equations `G δ = g` restricted to a column range.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    /// `Jᵀ J` of the stacked residual, without damping
    pub gram: Mat<f64>,
    /// `Jᵀ r`
    pub rhs: Vec<f64>,
    /// `‖r‖²`
    pub loss: f64,
}

/// Builds `JᵀJ` and `Jᵀr` from the site Jacobians without forming the pair
/// rows: `JᵀJ = J_intᵀ diag(ω) J_int + J_bᵀ K J_b`.
pub fn normal_equations(
    lin: &SiteLinearization,
    model: &QuadraticModel,
    columns: std::ops::Range<usize>,
) -> NormalEquations {
    let start = columns.start;
    let n = columns.len();
    let m_int = lin.interior.nrows();
    let m_bnd = lin.boundary.nrows();
    let ji = lin.interior.as_ref().subcols(start, n);
    let jb = lin.boundary.as_ref().subcols(start, n);

    let sqrt_w: Vec<f64> = model.domain_weights.iter().map(|w| w.sqrt()).collect();
    let js = Mat::<f64>::from_fn(m_int, n, |i, k| sqrt_w[i] * ji[(i, k)]);
    let k = model.boundary_form();
    let kjb = &k * jb;
    let gram = js.transpose() * &js + jb.transpose() * &kjb;

    let e = &lin.residuals.interior;
    let eb = &lin.residuals.boundary;
    let ke = Mat::<f64>::from_fn(m_bnd, 1, |i, _| (0..m_bnd).map(|j| k[(i, j)] * eb[j]).sum());
    let rhs = (0..n)
        .map(|c| {
            let dom: f64 = (0..m_int).map(|i| ji[(i, c)] * model.domain_weights[i] * e[i]).sum();
            let bnd: f64 = (0..m_bnd).map(|i| jb[(i, c)] * ke[(i, 0)]).sum();
            dom + bnd
        })
        .collect();
    let loss = model.value(&lin.residuals);
    NormalEquations { gram, rhs, loss }
}
