//! Minimum-norm solutions of consistent linear systems `Ax = b` over the
//! complex numbers by row orthonormalization.
//!
//! The rows of `A` are orthonormalized in place by a sequence of elementary
//! row operations (modified Gram-Schmidt order, zero rows retained). The same
//! operations are applied either to `b` ([`rop::rop_transform_rhs`]) or to an
//! identity matrix `M` ([`rop::rop_accumulate`]). From the transformed rows
//! `A'` everything else follows directly:
//!
//! * minimum-norm particular solution `x_p = (A')* b'`
//! * null-space projector `P = I - (A')* A'`
//! * `{1,2,4}` generalized inverse `G = (A')* M`
//!
//! [`online::OnlineSolver`] ingests rows one at a time and accrues `x_p` through
//! mutually orthogonal increments. [`verify`] holds the independent checks
//! (Penrose residuals, a Gaussian-elimination pseudoinverse oracle).

pub mod error;
pub mod numeric;
pub mod online;
pub mod rop;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::{
    conjugate_transpose, euclidean_norm, inner_product, matrix_product, ColumnVector,
    ComplexMatrix, C64,
};
pub use online::{Estimate, Increment, OnlineSolver};
pub use rop::{
    index_matrix, is_quasi_orthonormal, materialize_elementary_factors, rop_accumulate,
    rop_transform_rhs, Accumulated, IndexSet, QuasiOrthonormalRows, RhsTransform, RowOp, RowOpLog,
    DEFAULT_EPS_REL,
};
pub use solver::{
    consistency_check, generalized_inverse, homogeneous_solution, null_projector, null_space_basis,
    particular_solution, solve, solve_matrix_rhs, Consistency, MatrixSolveResult, SolveResult,
    Variation,
};
pub use verify::{
    minimum_norm_certificate, oracle_pseudoinverse, penrose_check, Condition, PenroseReport,
};
