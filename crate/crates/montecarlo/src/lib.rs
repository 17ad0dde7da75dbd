//! Brute-force check of the patch-potential noise model: random
//! Poisson–Voronoi tilings with independent cell potentials, measured
//! boundary correlation and field variance, and an Ornstein–Uhlenbeck
//! time-domain check that field and potential spectra factorize.
//!
//! Everything is a pure function of the specification and its seed. Work is
//! split into configurations with independent random streams and reduced in
//! index order, so the thread count never changes a result.

pub mod correlation;
pub mod ensemble;
pub mod error;
pub mod rng;
pub mod temporal;
pub mod tessellation;

pub use correlation::{fit_exponential, CorrelationEstimate, RadialProfile};
pub use ensemble::{
    boundary_correlation, field_variance, log_log_slope, predicted_variance, run_ensemble, EnsembleConfig,
    EnsembleReport, HeightEstimate, VarianceProfile,
};
pub use error::{Error, Result};
pub use temporal::{temporal_factorization_check, TemporalReport, TemporalSpec};
pub use tessellation::{generate_configuration, generate_tessellation, PatchTessellation, TessellationSpec};
