//! Energy natural gradient descent: Gauss–Newton directions from the Gram
//! matrix of the residual Jacobian, with a geometric line search.

use std::time::Instant;

use faer::{Mat, Side};

use crate::adnet::{linearize, normal_equations, Network, QuadraticModel};
use crate::error::{invalid, Error, Result};
use crate::loss::{CollocationData, LossVariant};

/// Which parameters the optimizer may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Trainable {
    #[default]
    All,
    /// Only the linear head; the hidden layers stay frozen.
    HeadOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub steps: usize,
    pub damping: f64,
    pub eta_max: f64,
    /// line-search grid is `eta_max * 2^-i` for `i = 0..=ls_depth`
    pub ls_depth: u32,
    pub eig_cutoff: f64,
    pub seed: u64,
    pub trainable: Trainable,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            steps: 500,
            damping: 1e-8,
            eta_max: 1.0,
            ls_depth: 30,
            eig_cutoff: 1e-10,
            seed: 0,
            trainable: Trainable::All,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return invalid("steps must be >= 1");
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) {
            return invalid(format!("damping {} must be finite and >= 0", self.damping));
        }
        if !(self.eta_max > 0.0 && self.eta_max.is_finite()) {
            return invalid(format!("eta_max {} must be positive", self.eta_max));
        }
        if !(0.0..1.0).contains(&self.eig_cutoff) {
            return invalid(format!("eig_cutoff {} must lie in [0, 1)", self.eig_cutoff));
        }
        Ok(())
    }

    pub fn step_sizes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.ls_depth).map(move |i| self.eta_max * 0.5f64.powi(i as i32))
    }
}

/// Pseudo-inverse of a symmetric positive semidefinite matrix through its
/// eigendecomposition, keeping eigenvalues above `cutoff * λ_max`.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    /// retained eigenvectors as columns
    pub basis: Mat<f64>,
    pub eigenvalues: Vec<f64>,
}

impl PseudoInverse {
    pub fn new(g: &Mat<f64>, cutoff: f64) -> Result<Self> {
        let n = g.nrows();
        let evd = g
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Singular(format!("eigendecomposition failed: {e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let lmax = (0..n).fold(0.0f64, |m, i| m.max(s[i]));
        let keep: Vec<usize> = (0..n)
            .filter(|&i| lmax > 0.0 && s[i] > cutoff * lmax)
            .collect();
        let basis = Mat::from_fn(n, keep.len(), |i, k| u[(i, keep[k])]);
        let eigenvalues = keep.iter().map(|&i| s[i]).collect();
        Ok(PseudoInverse { basis, eigenvalues })
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.basis.nrows();
        let mut out = vec![0.0; n];
        for (k, lam) in self.eigenvalues.iter().enumerate() {
            let col = self.basis.col(k);
            let c: f64 = (0..n).map(|i| col[i] * v[i]).sum::<f64>() / lam;
            for (o, i) in out.iter_mut().zip(0..n) {
                *o += c * col[i];
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub net: Network,
    pub eta: f64,
    pub loss: f64,
    /// no grid member decreased the loss; the smallest step was taken
    pub fallback: bool,
}

fn columns(net: &Network, trainable: Trainable) -> std::ops::Range<usize> {
    let n = net.params().len();
    match trainable {
        Trainable::All => 0..n,
        Trainable::HeadOnly => net.arch().head_offset()..n,
    }
}

fn loss_of(net: &Network, data: &CollocationData, variant: &LossVariant) -> Result<f64> {
    variant.evaluate(&data.residuals(net), data)
}

/// Gauss–Newton direction `δ = G⁺ Jᵀr` at `net`, plus the current loss.
pub fn engd_direction(
    net: &Network,
    data: &CollocationData,
    variant: &LossVariant,
    cfg: &TrainConfig,
) -> Result<(Vec<f64>, f64)> {
    let lin = linearize(net, data)?;
    let loss = variant.evaluate(&lin.residuals, data)?;
    let model = QuadraticModel::new(variant, data, &lin.residuals)?;
    let cols = columns(net, cfg.trainable);
    let mut ne = normal_equations(&lin, &model, cols);
    for i in 0..ne.gram.nrows() {
        ne.gram[(i, i)] += cfg.damping;
    }
    let pinv = PseudoInverse::new(&ne.gram, cfg.eig_cutoff)?;
    Ok((pinv.apply(&ne.rhs), loss))
}

/// One ENGD step. `step` is only used to label a divergence error.
pub fn engd_step(
    net: &Network,
    data: &CollocationData,
    variant: &LossVariant,
    cfg: &TrainConfig,
    step: usize,
) -> Result<StepOutcome> {
    cfg.validate()?;
    let (delta, loss0) = engd_direction(net, data, variant, cfg)?;
    if !loss0.is_finite() {
        return Err(Error::NonFinite { step });
    }
    let cols = columns(net, cfg.trainable);
    let candidate = |eta: f64| -> Result<Network> {
        let mut p = net.params().to_vec();
        for (pi, di) in p[cols.clone()].iter_mut().zip(&delta) {
            *pi -= eta * di;
        }
        net.with_params(p)
    };
    let mut best: Option<(f64, f64, Network)> = None;
    let mut last: Option<(f64, f64, Network)> = None;
    for eta in cfg.step_sizes() {
        let cand = candidate(eta)?;
        let l = loss_of(&cand, data, variant)?;
        // strict comparison keeps the larger η on ties
        if l < loss0 && best.as_ref().is_none_or(|b| l < b.1) {
            best = Some((eta, l, cand.clone()));
        }
        last = Some((eta, l, cand));
    }
    let (fallback, (eta, loss, net)) = match best {
        Some(b) => (false, b),
        None => (true, last.expect("line-search grid is never empty")),
    };
    if !loss.is_finite() {
        return Err(Error::NonFinite { step });
    }
    Ok(StepOutcome {
        net,
        eta,
        loss,
        fallback,
    })
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub initial_loss: f64,
    /// loss after each step
    pub loss_trace: Vec<f64>,
    pub step_sizes: Vec<f64>,
    /// steps at which the smallest-η fallback fired
    pub fallback_steps: Vec<usize>,
    pub final_net: Network,
    pub wall_time: f64,
}

pub fn train(
    net: &Network,
    data: &CollocationData,
    variant: &LossVariant,
    cfg: &TrainConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    let start = Instant::now();
    let initial_loss = loss_of(net, data, variant)?;
    let mut current = net.clone();
    let mut loss_trace = Vec::with_capacity(cfg.steps);
    let mut step_sizes = Vec::with_capacity(cfg.steps);
    let mut fallback_steps = Vec::new();
    for step in 0..cfg.steps {
        let out = engd_step(&current, data, variant, cfg, step)?;
        loss_trace.push(out.loss);
        step_sizes.push(out.eta);
        if out.fallback {
            fallback_steps.push(step);
        }
        current = out.net;
    }
    Ok(TrainReport {
        initial_loss,
        loss_trace,
        step_sizes,
        fallback_steps,
        final_net: current,
        wall_time: start.elapsed().as_secs_f64(),
    })
}
