//! Finite-dimensional realizations.
//!
//! An [`OperatorInstance`] fixes commuting matrices `D_1, ..., D_k`; the map
//! [`OperatorInstance::instantiate`] sends a polynomial to the matrix obtained
//! by substituting them. Exact kernels, affine solves and range tests on the
//! resulting matrices serve as the brute-force oracle for every identity the
//! polynomial side claims.

mod instance;
pub mod linalg;
mod matrix;
pub mod sample;

pub use instance::{make_truncated_derivative_instance, OperatorInstance, MAX_INSTANCE_DIMENSION};
pub use linalg::{
    determinant, inverse, kernel_basis, range_member, rank, solve_affine, AffineSolutionSet,
};
pub use matrix::{
    vec_add, vec_is_zero, vec_scale, vec_sub, vector_from_strings, vector_to_strings, zero_vector,
    Matrix, Vector,
};
