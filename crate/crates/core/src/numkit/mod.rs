//! Dense linear algebra and random-stream primitives shared by every module.

mod matrix;
mod rng;
mod solve;

pub(crate) use matrix::check_finite;
pub use matrix::{cdot, dot, norm2, ComplexMatrix, RealMatrix, RealSymMatrix};
pub use rng::SplitRng;
pub use solve::{
    dense_solve, eigh, from_spectrum, rank1_correction, sherman_morrison_solve, solve_sym, SymFactor, ESCALATION_FLOOR,
    ESCALATION_STEPS, HERMITIAN_TOL,
};
