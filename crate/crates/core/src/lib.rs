//! Electric-field noise above a conductor whose surface potential is a
//! mosaic of randomly fluctuating, spatially correlated patches.
//!
//! The numerical core is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); the aliases at the crate root fix it to `f64`.
//!
//! * [`quantities`]: SI quantities, constants and the model parameters.
//! * [`kernel`]: half-space Laplace kernel and the periodic spectral propagator.
//! * [`spectrum`]: the noise spectral density, its asymptotes and cross-checks.
//! * [`experiments`]: published measurements, probe rate conversions, fits.

pub mod error;
pub mod experiments;
mod fft2;
pub mod hankel;
pub mod kernel;
pub mod quadrature;
pub mod quantities;
pub mod scalar;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Length = quantities::Length<f64>;
pub type AngularFrequency = quantities::AngularFrequency<f64>;
pub type FieldNoiseDensity = quantities::FieldNoiseDensity<f64>;
pub type NoiseAmplitude = quantities::NoiseAmplitude<f64>;
pub type PhysicalConstants = quantities::PhysicalConstants<f64>;
pub type SurfacePatchModel = quantities::SurfacePatchModel<f64>;
pub type KernelPoint = kernel::KernelPoint<f64>;
pub type BoundaryGrid = kernel::BoundaryGrid<f64>;
pub type FieldGrid = kernel::FieldGrid<f64>;
pub type ElectricField = kernel::ElectricField<f64>;
pub type BoundarySpectrum = kernel::BoundarySpectrum<f64>;
pub type NoiseCurve = spectrum::NoiseCurve<f64>;
pub type ScalingPoint = spectrum::ScalingPoint<f64>;
pub type ExperimentRecord = experiments::ExperimentRecord<f64>;
pub type IonSpecies = experiments::IonSpecies<f64>;
pub type CantileverProbe = experiments::CantileverProbe<f64>;
pub type FitResult = experiments::FitResult<f64>;

pub type Length32 = quantities::Length<f32>;
pub type SurfacePatchModel32 = quantities::SurfacePatchModel<f32>;
pub type BoundaryGrid32 = kernel::BoundaryGrid<f32>;
