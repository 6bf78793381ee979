//! Training runs over seeds and the rows they produce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::problems::{h1_relative_error, make_problem, ProblemId};
use crate::adnet::{init, Architecture, Network};
use crate::error::{invalid, Error, Result};
use crate::loss::{lambda_weight, CollocationData, LossVariant};
use crate::optim::{train, TrainConfig};

/// Domain exponent of the consistent loss in the benchmarks (the `d = 2`
/// logarithm is dropped there).
pub const BENCHMARK_GAMMA: f64 = 1.1;

/// Side length of the cell-centre grid for the `H¹` error.
pub const EVAL_POINTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LossKind {
    /// `λ = 1`
    Original,
    /// `λ = λ(m̄)`
    Weighted,
    /// consistent loss with `L_γ` on the domain
    ConsistentGamma,
    /// consistent loss with `L_2` on the domain
    ConsistentL2,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [
        LossKind::Original,
        LossKind::Weighted,
        LossKind::ConsistentGamma,
        LossKind::ConsistentL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Original => "original",
            LossKind::Weighted => "weighted",
            LossKind::ConsistentGamma => "consistent-gamma",
            LossKind::ConsistentL2 => "consistent-l2",
        }
    }

    pub fn variant(self, data: &CollocationData, gamma: f64) -> Result<LossVariant> {
        Ok(match self {
            LossKind::Original => LossVariant::OriginalWeighted { lambda: 1.0 },
            LossKind::Weighted => LossVariant::OriginalWeighted {
                lambda: lambda_weight(data.m_bar(), data.d)?,
            },
            LossKind::ConsistentGamma => LossVariant::ConsistentTau { tau: gamma },
            LossKind::ConsistentL2 => LossVariant::ConsistentTau { tau: 2.0 },
        })
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown loss `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemId,
    pub points_per_axis: usize,
    pub loss: LossKind,
    pub layers: usize,
    pub width: usize,
    pub seeds: Vec<u64>,
    pub gamma: f64,
    pub eval_points: usize,
    /// optimizer settings; `seed` is overwritten per run
    pub train: TrainConfig,
}

impl RunSpec {
    /// The benchmark setup for `problem` on an `n x n` grid.
    pub fn benchmark(problem: ProblemId, points_per_axis: usize, loss: LossKind) -> Self {
        let (layers, width, steps) = problem.setup();
        RunSpec {
            problem,
            points_per_axis,
            loss,
            layers,
            width,
            seeds: vec![1, 2, 3],
            gamma: BENCHMARK_GAMMA,
            eval_points: EVAL_POINTS,
            train: TrainConfig {
                steps,
                ..TrainConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return invalid("at least one seed is required");
        }
        if self.points_per_axis < 2 {
            return invalid(format!("need at least 2 points per axis, got {}", self.points_per_axis));
        }
        Architecture::new(2, self.layers, self.width)?;
        self.train.validate()
    }
}

/// One table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub m_tilde: usize,
    pub m_bar: usize,
    pub loss: String,
    pub seed: u64,
    pub rel_h1_error: f64,
    pub final_loss: f64,
    pub wall_s: f64,
}

/// A finished seed: its row, the trained network and the unsquared loss
/// `ℒ*` of that network.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub row: ResultRow,
    pub net: Network,
    pub lstar: f64,
    pub fallback_steps: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub runs: Vec<SeedRun>,
    /// seeds whose training failed, with the reason
    pub failures: Vec<(u64, Error)>,
}

impl ExperimentOutput {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.runs.iter().map(|r| r.row.clone()).collect()
    }

    pub fn best(&self) -> Option<&SeedRun> {
        self.runs
            .iter()
            .min_by(|a, b| a.row.rel_h1_error.total_cmp(&b.row.rel_h1_error))
    }
}

pub fn run_seed(spec: &RunSpec, data: &CollocationData, seed: u64) -> Result<SeedRun> {
    let problem = make_problem(spec.problem);
    let variant = spec.loss.variant(data, spec.gamma)?;
    let arch = Architecture::new(2, spec.layers, spec.width)?;
    let net = init(arch, seed);
    let cfg = TrainConfig {
        seed,
        ..spec.train
    };
    let report = train(&net, data, &variant, &cfg)?;
    let final_loss = *report.loss_trace.last().expect("at least one step");
    let rel = h1_relative_error(&report.final_net, &problem, spec.eval_points)?;
    let lstar = LossVariant::LStar.evaluate(&data.residuals(&report.final_net), data)?;
    Ok(SeedRun {
        row: ResultRow {
            m_tilde: data.m_tilde(),
            m_bar: data.m_bar(),
            loss: spec.loss.name().to_string(),
            seed,
            rel_h1_error: rel,
            final_loss,
            wall_s: report.wall_time,
        },
        net: report.final_net,
        lstar,
        fallback_steps: report.fallback_steps.len(),
    })
}

/// Trains one network per seed. A failing seed is recorded and the
/// remaining seeds still run.
pub fn run_experiment(spec: &RunSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let data = make_problem(spec.problem).collocation(spec.points_per_axis)?;
    let mut out = ExperimentOutput::default();
    for &seed in &spec.seeds {
        match run_seed(spec, &data, seed) {
            Ok(run) => out.runs.push(run),
            Err(e) => out.failures.push((seed, e)),
        }
    }
    Ok(out)
}

/// Fraction of same-spec seed pairs in which the smaller `ℒ*` also has the
/// smaller `H¹` error.
pub fn lstar_agreement(runs: &[SeedRun]) -> Option<f64> {
    let mut agree = 0usize;
    let mut total = 0usize;
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            if a.row.loss != b.row.loss || a.row.m_tilde != b.row.m_tilde {
                continue;
            }
            total += 1;
            if (a.lstar < b.lstar) == (a.row.rel_h1_error < b.row.rel_h1_error) {
                agree += 1;
            }
        }
    }
    (total > 0).then(|| agree as f64 / total as f64)
}
