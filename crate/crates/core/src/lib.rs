//! Collocation toolkit for the Poisson problem `-Δu = f` in `(0,1)^d`,
//! `u = g` on the boundary.
//!
//! The crate covers the whole pipeline from point data to a trained network:
//!
//! - [`geometry`]: tensor grids `G_{k,r}`, boundary grids and Kuhn–Tucker meshes.
//! - [`interp`]: Lagrange interpolants on those meshes and quadrature oracles.
//! - [`norms`]: discrete `L_τ`, boundary `L_2` and `H^{1/2}` norms over data sites.
//! - [`loss`]: the four collocation losses and their weights.
//! - [`adnet`]: second-order jets, the residual network and its parameter Jacobian.
//! - [`optim`]: energy natural gradient descent with a grid line search.
//! - [`rates`]: optimal-recovery exponents and empirical slope fitting.
//! - [`experiments`]: the three Poisson benchmarks, tables, plots and studies.

pub mod adnet;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interp;
pub mod loss;
pub mod norms;
pub mod optim;
pub mod prng;
pub mod quadrature;
pub mod rates;

pub use error::{Error, Result};
