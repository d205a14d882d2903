//! Simulation and verification toolkit for the semicircle law of random
//! symmetric matrices with variance profiles and dependent entries.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: dense symmetric matrices, variance profiles, the Lindeberg
//!   ratio, variance-profile condition checks and entry truncation.
//! * [`ensembles`]: seeded generators (Gaussian, Rademacher, a dependent
//!   sign-coupled ensemble and the block counterexample profile).
//! * [`spectra`]: symmetric eigensolver, empirical spectral distributions,
//!   moments, Stieltjes transforms and Monte-Carlo averaged ESDs.
//! * [`semicircle`]: the closed-form limit law.
//! * [`metrics`]: Kolmogorov and Levy distances between distribution functions.
//! * [`interpolation`]: the path `Z(phi) = X cos phi + Y sin phi` and the
//!   Stieltjes-transform universality gap.
//! * [`graphs`]: canonical closed-walk graphs (restricted-growth strings),
//!   their three-way classification and exact Gaussian trace moments.
//!
//! Monte-Carlo loops run on rayon when the `parallel` feature is enabled
//! (the default); every result is merged in seed order, so output does not
//! depend on thread count.

pub mod ensembles;
mod error;
pub mod exec;
pub mod graphs;
pub mod interpolation;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod semicircle;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use ensembles::{EnsembleKind, EnsembleSpec};
pub use matrix::{SymmetricMatrix, VarianceProfile};
pub use semicircle::SemicircleLaw;
pub use spectra::{AveragedEsd, SpectralDistribution};
