//! Stochastic-geometry simulation and analysis of multi-RIS-assisted dual-hop
//! mmWave cells.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`] — complex SVD / eigensolver / randomized QB, adaptive
//!   quadrature, Gamma-family special functions, seeded samplers;
//! * [`geometry`] — PPP and Thomas-cluster deployments in a disk, 3GPP LoS
//!   probability and thinning;
//! * [`channel`] — system constants, path loss, sectored antenna gains,
//!   Nakagami-m channel matrices and interference;
//! * [`phasectl`] — RIS phase design (optimal, randomized-QB sub-optimal,
//!   quantized, random) and the MRT beamformer;
//! * [`linkselect`] — SINR evaluation and RIS–user association;
//! * [`mcsim`] — the Monte Carlo experiment engine;
//! * [`analytics`] — numerical evaluation of the coverage and rate expressions.
//!
//! ```
//! use multiris::numerics::{svd, ComplexMatrix};
//!
//! let a = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 4.0]]);
//! let s = svd(&a).unwrap().singular_values;
//! assert!((s[0] - 4.0).abs() < 1e-12 && (s[1] - 3.0).abs() < 1e-12);
//! ```

pub mod analytics;
pub mod channel;
mod error;
pub mod geometry;
pub mod linkselect;
pub mod mcsim;
pub mod numerics;
pub mod phasectl;

pub use error::{Error, Result};

/// The guide's chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/deployments.md")]
    mod deployments {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/phase-control.md")]
    mod phase_control {}
    #[doc = include_str!("../../../book/src/association.md")]
    mod association {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
}
