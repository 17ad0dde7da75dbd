//! Field noise spectral density above a surface with exponentially
//! correlated patch potentials.
//!
//! With boundary correlation C(r) = e^(−r/ζ), the noise at height d is
//!
//! ```text
//! S_E(ω, d) = (N·S_V(ω) / ζ²) · s(d/ζ)
//! s(ρ)      = (2/ρ) ∫₀^∞ κ³ e^(−2κ) / (ρ² + κ²)^(3/2) dκ
//! ```
//!
//! which falls off as 1/ρ for ρ ≪ 1 and as 3/(4ρ⁴) for ρ ≫ 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::bessel_transform;
use crate::quadrature::{adaptive, laguerre_doubling, Tolerance};
use crate::quantities::{AngularFrequency, FieldNoiseDensity, Length, SurfacePatchModel};
use crate::scalar::Scalar;

/// Integrand of s(ρ) past κ = 40 is below 1e-16 of its peak for every ρ.
const KAPPA_CUTOFF: f64 = 40.0;
const LAGUERRE_START: usize = 8;
const LAGUERRE_MAX: usize = 128;
const LAGUERRE_AGREEMENT: f64 = 1e-10;
const BOUND_TOLERANCE: f64 = 1e-9;

/// Two-dimensional Fourier transform of an isotropic boundary correlation
/// function, as a function of |k|.
pub trait CorrelationSpectrum<T>: Sync {
    /// S(k) in m².
    fn density(&self, k: T) -> T;

    /// Wavenumbers where S changes character; used as quadrature breakpoints.
    fn features(&self) -> Vec<T>;
}

/// C(r) = e^(−r/ζ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialCorrelation<T> {
    pub zeta: Length<T>,
}

impl<T: Scalar> CorrelationSpectrum<T> for ExponentialCorrelation<T> {
    fn density(&self, k: T) -> T {
        s_zeta(k, self.zeta)
    }

    fn features(&self) -> Vec<T> {
        vec![T::one() / self.zeta.get()]
    }
}

/// S_ζ(k) = 2πζ² / (1 + ζ²k²)^(3/2).
pub fn s_zeta<T: Scalar>(k: T, zeta: Length<T>) -> T {
    let z = zeta.get();
    let zk = z * k;
    T::TAU() * z * z / (T::one() + zk * zk).powf(T::lit(1.5))
}

fn check_rho<T: Scalar>(rho: T) -> Result<()> {
    if rho > T::zero() && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("scaled distance d/ζ must be positive and finite, got {rho}")))
    }
}

/// ∫₀^∞ κ³ e^(−2κ) (ρ² + κ²)^(−p) dκ. Gauss–Laguerre in t = 2κ with order
/// doubling, falling back to adaptive Gauss–Kronrod when Laguerre stalls
/// (small ρ puts a near-kink at κ ≈ ρ).
fn moment<T: Scalar>(rho: T, power: T) -> Result<T> {
    let rho2 = rho * rho;
    let laguerre = laguerre_doubling(
        |t: T| {
            let kappa = t * T::lit(0.5);
            kappa * kappa * kappa * T::lit(0.5) / (rho2 + kappa * kappa).powf(power)
        },
        LAGUERRE_START,
        LAGUERRE_MAX,
        T::lit(LAGUERRE_AGREEMENT),
    );
    if let Some(est) = laguerre {
        return Ok(est.value);
    }
    let cutoff = T::lit(KAPPA_CUTOFF);
    let mut breaks = vec![T::zero()];
    if rho < cutoff {
        breaks.push(rho);
    }
    breaks.push(cutoff);
    let est = adaptive(
        |kappa: T| kappa * kappa * kappa * (-T::lit(2.0) * kappa).exp() / (rho2 + kappa * kappa).powf(power),
        &breaks,
        Tolerance::relative(T::lit(1e-12).max(T::epsilon() * T::lit(64.0))),
    )?;
    Ok(est.value)
}

/// The normalized noise s(ρ) = S_E·ζ²/(N·S_V) at ρ = d/ζ.
pub fn scaling_function<T: Scalar>(rho: T) -> Result<T> {
    check_rho(rho)?;
    Ok(T::lit(2.0) / rho * moment(rho, T::lit(1.5))?)
}

/// Logarithmic slope d ln s / d ln ρ, from the analytic derivative of the
/// integrand.
pub fn scaling_slope<T: Scalar>(rho: T) -> Result<T> {
    check_rho(rho)?;
    let ratio = moment(rho, T::lit(2.5))? / moment(rho, T::lit(1.5))?;
    Ok(-T::one() - T::lit(3.0) * rho * rho * ratio)
}

/// S_E(ω, d) = N·S_V(ω) · s(d/ζ) / ζ².
pub fn noise_density<T: Scalar>(
    model: &SurfacePatchModel<T>,
    d: Length<T>,
    omega: AngularFrequency<T>,
) -> Result<FieldNoiseDensity<T>> {
    let zeta = model.zeta().get();
    let s = scaling_function(d.get() / zeta)?;
    FieldNoiseDensity::new(model.nsv_at(omega) * s / (zeta * zeta))
}

/// Long-range form (3/4)·N·S_V·ζ²/d⁴, valid for d ≫ ζ.
pub fn asymptotic_long<T: Scalar>(
    model: &SurfacePatchModel<T>,
    d: Length<T>,
    omega: AngularFrequency<T>,
) -> FieldNoiseDensity<T> {
    let (z, d) = (model.zeta().get(), d.get());
    let d2 = d * d;
    FieldNoiseDensity::new(T::lit(0.75) * model.nsv_at(omega) * z * z / (d2 * d2))
        .expect("non-negative by construction")
}

/// Short-range form N·S_V/(d·ζ), valid for d ≪ ζ.
pub fn asymptotic_short<T: Scalar>(
    model: &SurfacePatchModel<T>,
    d: Length<T>,
    omega: AngularFrequency<T>,
) -> FieldNoiseDensity<T> {
    FieldNoiseDensity::new(model.nsv_at(omega) / (d.get() * model.zeta().get())).expect("non-negative by construction")
}

/// ρ where the two asymptotes cross: 3/(4ρ⁴) = 1/ρ.
pub fn asymptote_crossing<T: Scalar>() -> T {
    T::lit(0.75).cbrt()
}

/// S_E from the wavenumber form
/// S_E = (N·S_V / 2π²) ∫∫ S(k) k³ e^(−2dk) dk dθ, with the angular integral
/// done analytically. Used to cross-check [`noise_density`].
pub fn wavenumber_reference<T: Scalar>(
    model: &SurfacePatchModel<T>,
    d: Length<T>,
    omega: AngularFrequency<T>,
) -> Result<FieldNoiseDensity<T>> {
    let spectrum = ExponentialCorrelation { zeta: model.zeta() };
    FieldNoiseDensity::new(wavenumber_integral(model.nsv_at(omega), &spectrum, d)?)
}

/// The wavenumber integral for an arbitrary correlation spectrum.
pub fn wavenumber_integral<T: Scalar, S: CorrelationSpectrum<T> + ?Sized>(
    nsv: T,
    spectrum: &S,
    d: Length<T>,
) -> Result<T> {
    if nsv == T::zero() {
        return Ok(T::zero());
    }
    let d = d.get();
    let k_max = T::lit(KAPPA_CUTOFF) / d;
    let mut breaks: Vec<T> = spectrum.features().into_iter().filter(|&k| k > T::zero() && k < k_max).collect();
    breaks.push(T::lit(1.5) / d);
    breaks.push(T::zero());
    breaks.push(k_max);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breaks.dedup();
    let two = T::lit(2.0);
    let est = adaptive(
        |k: T| spectrum.density(k) * k * k * k * (-two * d * k).exp(),
        &breaks,
        Tolerance::relative(T::lit(1e-12).max(T::epsilon() * T::lit(64.0))),
    )?;
    // (1/2π²)·2π = 1/π from the angular integral.
    Ok(nsv * est.value / T::PI())
}

/// The two radial Bessel integrals behind the k³e^(−2dk) factor, at a = d·k:
///
/// ```text
/// H(a)  = 3 ∫₀^∞ u² (1+u²)^(−5/2) J₁(a u) du
/// Vt(a) =   ∫₀^∞ u (u²−2) (1+u²)^(−5/2) J₀(a u) du
/// ```
///
/// returned as the vector (H, Vt, H) matching the (x, y, z) components.
pub fn hankel_field_factors<T: Scalar>(k: T, d: Length<T>) -> Result<[T; 3]> {
    if !(k >= T::zero() && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be non-negative, got {k}")));
    }
    let a = d.get() * k;
    if a == T::zero() {
        // J₁(0) = 0 and ∫ u(u²−2)(1+u²)^(−5/2) du = 0.
        return Ok([T::zero(); 3]);
    }
    let tol = T::lit(1e-11).max(T::epsilon() * T::lit(256.0));
    let h = bessel_transform(|u: T| T::lit(3.0) * u * u / (T::one() + u * u).powf(T::lit(2.5)), 1, a, tol)?;
    let vt = bessel_transform(|u: T| u * (u * u - T::lit(2.0)) / (T::one() + u * u).powf(T::lit(2.5)), 0, a, tol)?;
    Ok([h, vt, h])
}

/// (ρ, s(ρ)) on the normalized curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint<T> {
    pub rho: T,
    pub s: T,
}

impl<T: Scalar> ScalingPoint<T> {
    pub fn evaluate(rho: T) -> Result<Self> {
        let s = scaling_function(rho)?;
        let point = Self { rho, s };
        if !point.within_asymptotic_bounds() {
            return Err(Error::Domain(format!("s({rho}) = {s} violates the asymptotic bounds")));
        }
        Ok(point)
    }

    /// 0 < s < min(1/ρ, 3/(4ρ⁴)), with relative slack for the contact limit.
    pub fn within_asymptotic_bounds(&self) -> bool {
        let rho4 = self.rho.powi(4);
        let bound = (T::one() / self.rho).min(T::lit(0.75) / rho4);
        self.s > T::zero() && self.s < bound * (T::one() + T::lit(BOUND_TOLERANCE))
    }
}

/// A sampled noise curve (d, S_E) with d increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurve<T> {
    points: Vec<(T, T)>,
    provenance: String,
}

impl<T: Scalar> NoiseCurve<T> {
    /// Requires d strictly increasing and S_E strictly decreasing (or
    /// identically zero).
    pub fn new(points: Vec<(T, T)>, provenance: impl Into<String>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Domain("curve distances must be strictly increasing".into()));
        }
        let all_zero = points.iter().all(|p| p.1 == T::zero());
        if !all_zero && points.windows(2).any(|w| !(w[1].1 < w[0].1)) {
            return Err(Error::Domain("curve noise values must be strictly decreasing".into()));
        }
        Ok(Self { points, provenance: provenance.into() })
    }

    /// (d in m, S_E in V²·m⁻²·Hz⁻¹).
    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n ≥ 2` logarithmically spaced values from `lo` to `hi`, endpoints exact.
pub fn log_space<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let ratio = (hi / lo).ln();
    let last = T::from_count(n - 1);
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => lo * (ratio * T::from_count(i) / last).exp(),
        })
        .collect()
}

fn check_range<T: Scalar>(lo: T, hi: T, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 sample points, got {n}")));
    }
    if !(lo > T::zero() && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("need 0 < min < max, got [{lo}, {hi}]")));
    }
    Ok(())
}

/// Samples S_E at `n` log-spaced heights in [d_min, d_max]. Points are
/// evaluated in parallel; output order is deterministic.
pub fn sample_curve<T: Scalar>(
    model: &SurfacePatchModel<T>,
    d_min: Length<T>,
    d_max: Length<T>,
    n: usize,
    omega: AngularFrequency<T>,
) -> Result<NoiseCurve<T>> {
    check_range(d_min.get(), d_max.get(), n)?;
    let points = log_space(d_min.get(), d_max.get(), n)
        .into_par_iter()
        .map(|d| {
            let s = noise_density(model, Length::new(d)?, omega)?;
            Ok((d, s.get()))
        })
        .collect::<Result<Vec<_>>>()?;
    let provenance = format!(
        "exponential patch model: zeta={} m, nsv={} V^2/Hz at omega0={} rad/s, alpha={}, omega={} rad/s",
        model.zeta().get(),
        model.nsv().get(),
        model.omega0().get(),
        model.alpha(),
        omega.get()
    );
    NoiseCurve::new(points, provenance)
}

/// The normalized curve s(ρ) at `n` log-spaced points in [ρ_min, ρ_max].
pub fn normalized_curve<T: Scalar>(rho_min: T, rho_max: T, n: usize) -> Result<Vec<ScalingPoint<T>>> {
    check_range(rho_min, rho_max, n)?;
    log_space(rho_min, rho_max, n).into_par_iter().map(ScalingPoint::evaluate).collect()
}
