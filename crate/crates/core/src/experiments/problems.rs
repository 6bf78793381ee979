//! The three Poisson benchmarks on the unit square.
//!
//! Each exact solution is written once over jets; `f = -Δu` and `g = u` are
//! derived from it rather than coded by hand.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::adnet::{Jet2, Network};
use crate::error::{Error, Result};
use crate::loss::{CollocationData, FieldOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemId {
    /// `e^x cos y`, harmonic
    Exp1,
    /// `e^{2(x+y)} cos(2π(y-x)) / (1 + 8x² + y²)`
    Exp2,
    /// `1000 x(1-x) y(1-y) ((x-½)² + (y-½)²)^{9/4}`, zero on the boundary
    Exp3,
}

impl ProblemId {
    pub const ALL: [ProblemId; 3] = [ProblemId::Exp1, ProblemId::Exp2, ProblemId::Exp3];

    pub fn number(self) -> u8 {
        match self {
            ProblemId::Exp1 => 1,
            ProblemId::Exp2 => 2,
            ProblemId::Exp3 => 3,
        }
    }

    /// Hidden layers, width and step count of the benchmark.
    pub fn setup(self) -> (usize, usize, usize) {
        match self {
            ProblemId::Exp1 => (3, 5, 500),
            ProblemId::Exp2 => (3, 10, 500),
            ProblemId::Exp3 => (3, 15, 1000),
        }
    }

    /// Collocation points per axis of the table rows.
    pub fn grid_sizes(self) -> [usize; 4] {
        match self {
            ProblemId::Exp1 | ProblemId::Exp2 => [5, 10, 15, 20],
            ProblemId::Exp3 => [10, 20, 30, 40],
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for ProblemId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches("exp") {
            "1" => Ok(ProblemId::Exp1),
            "2" => Ok(ProblemId::Exp2),
            "3" => Ok(ProblemId::Exp3),
            _ => Err(Error::InvalidParameter(format!("unknown experiment `{s}`"))),
        }
    }
}

fn exp1(v: &[Jet2]) -> Jet2 {
    v[0].exp() * v[1].cos()
}

fn exp2(v: &[Jet2]) -> Jet2 {
    let (x, y) = (v[0], v[1]);
    let num = ((x + y) * 2.0).exp() * ((y - x) * (2.0 * PI)).cos();
    num / (1.0 + x * x * 8.0 + y * y)
}

fn exp3(v: &[Jet2]) -> Jet2 {
    let (x, y) = (v[0], v[1]);
    let bump = x * (1.0 - x) * y * (1.0 - y) * 1000.0;
    let (dx, dy) = (x - 0.5, y - 0.5);
    bump * (dx * dx + dy * dy).powf(9.0 / 4.0)
}

/// Anything that reports a full jet at a point.
pub trait JetOracle {
    fn jet(&self, p: &[f64]) -> Jet2;
}

impl JetOracle for Network {
    fn jet(&self, p: &[f64]) -> Jet2 {
        self.eval_jet2(p).expect("point dimension matches the network input")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Problem {
    pub id: ProblemId,
    u: fn(&[Jet2]) -> Jet2,
}

pub fn make_problem(id: ProblemId) -> Problem {
    let u = match id {
        ProblemId::Exp1 => exp1,
        ProblemId::Exp2 => exp2,
        ProblemId::Exp3 => exp3,
    };
    Problem { id, u }
}

impl Problem {
    pub const DIM: usize = 2;

    pub fn u(&self, p: &[f64]) -> f64 {
        self.jet(p).value
    }

    /// Right-hand side `-Δu`.
    pub fn f(&self, p: &[f64]) -> f64 {
        -self.jet(p).lap
    }

    /// Dirichlet data, the trace of `u`.
    pub fn g(&self, p: &[f64]) -> f64 {
        self.u(p)
    }

    /// Uniform `n x n` collocation set: every grid point is an interior
    /// site and the `4n - 4` points on the edge are boundary sites.
    pub fn collocation(&self, n: usize) -> Result<CollocationData> {
        CollocationData::uniform(n, Self::DIM, |p| self.f(p), |p| self.g(p))
    }
}

impl JetOracle for Problem {
    fn jet(&self, p: &[f64]) -> Jet2 {
        let vars = Jet2::seed(p).expect("point dimension within jet capacity");
        (self.u)(&vars)
    }
}

impl FieldOracle for Problem {
    fn value(&self, p: &[f64]) -> f64 {
        self.u(p)
    }
    fn laplacian(&self, p: &[f64]) -> f64 {
        self.jet(p).lap
    }
}

/// `[Σ(|v-u|² + |∇v-∇u|²) / Σ(|u|² + |∇u|²)]^{1/2}` over the `n x n` grid of
/// cell centres.
pub fn h1_relative_error(v: &impl JetOracle, problem: &Problem, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let x = (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let p = [x, (j as f64 + 0.5) / n as f64];
            let a = v.jet(&p);
            let b = problem.jet(&p);
            let dv = a.value - b.value;
            num += dv * dv;
            den += b.value * b.value;
            for (ga, gb) in a.grad().iter().zip(b.grad()) {
                num += (ga - gb) * (ga - gb);
                den += gb * gb;
            }
        }
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter("exact solution vanishes on the evaluation grid".into()));
    }
    Ok((num / den).sqrt())
}
