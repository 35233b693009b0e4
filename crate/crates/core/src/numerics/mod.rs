//! Numeric kernels: dense complex linear algebra, quadrature, special
//! functions, statistics helpers and seeded samplers.

mod eig;
mod householder;
mod matrix;
mod qb;
mod quad;
mod random;
mod special;
pub mod stats;
mod svd;

pub use eig::{eig_hermitian, HermitianEigen, HERMITIAN_TOL};
pub use matrix::{ComplexMatrix, C64};
pub use qb::{randomized_qb, QbFactorization};
pub use quad::{integrate, Quadrature};
pub use random::{
    sample_gamma, sample_nakagami, sample_poisson, standard_complex_normal, uniform_phase, RngStream,
};
pub(crate) use random::NakagamiSampler;
pub use special::{
    erf, gamma_cdf, gamma_fn, gamma_pdf, ln_gamma, lower_incomplete_gamma_regularized, nakagami_cdf,
    standard_normal_cdf, upper_incomplete_gamma_regularized,
};
pub use svd::{svd, svd_with, SvdJob, SvdResult};
