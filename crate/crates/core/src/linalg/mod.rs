//! Dense complex linear algebra.

mod eig;
mod funcs;
mod matrix;
mod svd;
mod tensor;

pub use eig::{herm_eig, HermitianEig};
pub(crate) use eig::herm_eig_trusted;
pub use funcs::{
    log_on_support, matrix_sqrt, psd_eig, rank_psd, trace_sqrt, unitary_generator, unitary_power,
    PSD_TOL,
};
pub use matrix::{ComplexMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use svd::{polar_isometry, singular_values, svd, trace_norm, SvdResult};
pub(crate) use svd::{orthonormalize, polar_from_svd};
pub use tensor::{
    apply_local, kron, kron_vec, partial_trace, partial_transpose, swap_operator, unvec, vec,
    Subsystem,
};
