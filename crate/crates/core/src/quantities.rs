//! Physical quantities shared by every module. All values are SI base units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn finite<T: Scalar>(field: &'static str, value: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { field, value: value.as_f64() })
    }
}

fn positive<T: Scalar>(field: &'static str, value: T) -> Result<T> {
    let value = finite(field, value)?;
    if value > T::zero() {
        Ok(value)
    } else {
        Err(Error::NonPositive { field, value: value.as_f64() })
    }
}

fn non_negative<T: Scalar>(field: &'static str, value: T) -> Result<T> {
    let value = finite(field, value)?;
    if value >= T::zero() {
        Ok(value)
    } else {
        Err(Error::Negative { field, value: value.as_f64() })
    }
}

macro_rules! quantity {
    ($(#[$doc:meta])* $name:ident, $check:ident, $field:literal) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
        #[serde(try_from = "f64", into = "f64", bound = "T: Scalar")]
        pub struct $name<T>(T);

        impl<T: Scalar> $name<T> {
            pub fn new(value: T) -> Result<Self> {
                $check($field, value).map(Self)
            }

            #[inline]
            pub fn get(self) -> T {
                self.0
            }
        }

        impl<T: Scalar> TryFrom<f64> for $name<T> {
            type Error = Error;

            fn try_from(value: f64) -> Result<Self> {
                Self::new(T::lit(value))
            }
        }

        impl<T: Scalar> From<$name<T>> for f64 {
            fn from(q: $name<T>) -> f64 {
                q.0.as_f64()
            }
        }
    };
}

quantity!(
    /// A distance or correlation length in meters; strictly positive.
    Length, positive, "length"
);
quantity!(
    /// Angular frequency in rad/s; strictly positive.
    AngularFrequency, positive, "angular frequency"
);
quantity!(
    /// Electric-field noise spectral density in V²·m⁻²·Hz⁻¹.
    FieldNoiseDensity, non_negative, "field noise density"
);
quantity!(
    /// The product N·S_V in V²·Hz⁻¹. N and S_V never appear separately.
    NoiseAmplitude, non_negative, "noise amplitude"
);

impl<T: Scalar> Length<T> {
    pub fn micrometers(um: T) -> Result<Self> {
        Self::new(um * T::lit(1e-6))
    }

    pub fn nanometers(nm: T) -> Result<Self> {
        Self::new(nm * T::lit(1e-9))
    }
}

impl<T: Scalar> AngularFrequency<T> {
    /// From an ordinary frequency f in Hz, ω = 2πf.
    pub fn from_hz(f: T) -> Result<Self> {
        Self::new(T::TAU() * f)
    }

    pub fn hz(self) -> T {
        self.0 / T::TAU()
    }
}

/// CODATA 2018 exact and recommended values.
pub mod codata {
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants<T> {
    /// C
    pub elementary_charge: T,
    /// J·s
    pub reduced_planck: T,
    /// J/K
    pub boltzmann: T,
    /// kg
    pub atomic_mass_unit: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn codata() -> Self {
        Self {
            elementary_charge: T::lit(codata::ELEMENTARY_CHARGE),
            reduced_planck: T::lit(codata::REDUCED_PLANCK),
            boltzmann: T::lit(codata::BOLTZMANN),
            atomic_mass_unit: T::lit(codata::ATOMIC_MASS_UNIT),
        }
    }
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata()
    }
}

/// Parameters of the patch-potential noise model.
///
/// `nsv` is N·S_V evaluated at the reference frequency `omega0`; the noise at
/// other frequencies follows `(omega0 / omega)^alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr", bound = "T: Scalar")]
pub struct SurfacePatchModel<T> {
    zeta: Length<T>,
    nsv: NoiseAmplitude<T>,
    omega0: AngularFrequency<T>,
    alpha: T,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    zeta_m: f64,
    nsv_v2_per_hz: f64,
    omega0_rad_s: f64,
    alpha: f64,
}

impl<T: Scalar> TryFrom<ModelRepr> for SurfacePatchModel<T> {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        SurfacePatchModel::with_exponent(
            Length::try_from(r.zeta_m)?,
            NoiseAmplitude::try_from(r.nsv_v2_per_hz)?,
            AngularFrequency::try_from(r.omega0_rad_s)?,
            T::lit(r.alpha),
        )
    }
}

impl<T: Scalar> From<SurfacePatchModel<T>> for ModelRepr {
    fn from(m: SurfacePatchModel<T>) -> Self {
        ModelRepr {
            zeta_m: m.zeta.into(),
            nsv_v2_per_hz: m.nsv.into(),
            omega0_rad_s: m.omega0.into(),
            alpha: m.alpha.as_f64(),
        }
    }
}

impl<T: Scalar> SurfacePatchModel<T> {
    /// Model with the room-temperature ω⁻¹ frequency law.
    pub fn new(zeta: Length<T>, nsv: NoiseAmplitude<T>, omega0: AngularFrequency<T>) -> Self {
        Self { zeta, nsv, omega0, alpha: T::one() }
    }

    pub fn with_exponent(
        zeta: Length<T>,
        nsv: NoiseAmplitude<T>,
        omega0: AngularFrequency<T>,
        alpha: T,
    ) -> Result<Self> {
        let alpha = non_negative("frequency exponent", alpha)?;
        Ok(Self { zeta, nsv, omega0, alpha })
    }

    pub fn zeta(&self) -> Length<T> {
        self.zeta
    }

    pub fn nsv(&self) -> NoiseAmplitude<T> {
        self.nsv
    }

    pub fn omega0(&self) -> AngularFrequency<T> {
        self.omega0
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// N·S_V at `omega`, rescaled from the reference frequency.
    pub fn nsv_at(&self, omega: AngularFrequency<T>) -> T {
        self.nsv.get() * (self.omega0.get() / omega.get()).powf(self.alpha)
    }
}

/// Builds a model from raw SI values, reporting which field is invalid.
pub fn validate_model<T: Scalar>(zeta_m: T, nsv: T, omega0: T) -> Result<SurfacePatchModel<T>> {
    let zeta = Length::new(zeta_m).map_err(|e| rename(e, "zeta"))?;
    let nsv = NoiseAmplitude::new(nsv).map_err(|e| rename(e, "nsv"))?;
    let omega0 = AngularFrequency::new(omega0).map_err(|e| rename(e, "omega0"))?;
    Ok(SurfacePatchModel::new(zeta, nsv, omega0))
}

fn rename(e: Error, field: &'static str) -> Error {
    match e {
        Error::NonFinite { value, .. } => Error::NonFinite { field, value },
        Error::NonPositive { value, .. } => Error::NonPositive { field, value },
        Error::Negative { value, .. } => Error::Negative { field, value },
        other => other,
    }
}
