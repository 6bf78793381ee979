//! Forward jets, the residual network and its parameter derivatives.

pub mod jacobian;
pub mod jet;
pub mod network;

pub use jacobian::{
    domain_weights, linearize, normal_equations, param_jacobian, residual_vector, NormalEquations,
    QuadraticModel, SiteLinearization,
};
pub use jet::{Jet2, JetField, MAX_DIM};
pub use network::{init, Architecture, Network, Tape};
