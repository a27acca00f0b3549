//! Loss-aware natural-gradient geometry for variational optimization.
//!
//! Modules, bottom-up:
//!
//! - [`numkit`]: symmetric solves, Sherman–Morrison, Hermitian eigen, seeded streams
//! - [`qsim`]: statevector ansatz, gapped Hamiltonians, adjoint gradients
//! - [`qgt`]: block-diagonal and full quantum geometric tensor, noise model
//! - [`metrics`]: loss-aware and conformal step-size algebra, LA-QGT tensors
//! - [`optim`]: quantum and classical optimizer update rules
//! - [`infogeo`]: normal-family information geometry and curvature checks
//! - [`fisher_mlp`]: small MLP task with block Fisher preconditioning
//! - [`bench`]: ensembles, convergence detection, tuning and statistics

pub mod bench;
pub mod error;
pub mod fisher_mlp;
pub mod infogeo;
pub mod metrics;
pub mod numkit;
pub mod optim;
pub mod qgt;
pub mod qsim;

pub use error::{Error, Result};
