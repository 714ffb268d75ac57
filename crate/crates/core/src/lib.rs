//! Perfect-mirror XX spin chains.
//!
//! Design of one-particle spectra satisfying the mirror condition,
//! reconstruction of the unique mirror-symmetric chain carrying a given
//! spectrum, and exact free-fermion dynamics of the resulting chains:
//! transfer fidelities, `z`-`z` correlations and `x`-`x` string
//! correlations at any temperature. A brute-force spin-space solver
//! ([`ed_oracle`]) serves as an independent check for small chains.
//!
//! Numerical routines are generic over [`Real`] (`f32`, `f64`); the
//! aliases below fix `f64`, which is what the CLI and tests use.

pub mod dynamics;
pub mod ed_oracle;
pub mod error;
pub mod fit;
pub mod inverse_problem;
pub mod jacobi;
pub mod mirror_design;
pub mod scalar;
pub mod series;
pub mod string_correlators;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Chain = jacobi::SymmetricChain<f64>;
pub type Eigen = jacobi::EigenSystem<f64>;
pub type Spectrum = mirror_design::SpectrumSpec<f64>;
pub type Certificate = mirror_design::MirrorCertificate<f64>;
pub type Reconstruction = inverse_problem::ReconstructionReport<f64>;
pub type Series = series::CorrelationSeries<f64>;
pub type Thermal = dynamics::ThermalState<f64>;
