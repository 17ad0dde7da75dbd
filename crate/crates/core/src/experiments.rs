//! Published field-noise measurements, frequency rescaling, probe rate
//! conversions and the two model fits (N·S_V from a short-range point, ζ
//! from long-range points).

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::{AngularFrequency, FieldNoiseDensity, Length, NoiseAmplitude, PhysicalConstants};
use crate::scalar::Scalar;
use crate::spectrum::scaling_function;

/// Reference frequency f₀ = ω₀/2π = 1 MHz for rescaled values.
pub const REFERENCE_FREQUENCY_HZ: f64 = 1e6;
/// Static patch size on gold, ζ₀ = 1 µm.
pub const DEFAULT_ZETA0_M: f64 = 1e-6;
/// Correlation-length band covering the ion-trap data, in units of ζ₀.
pub const ION_TRAP_BAND: (f64, f64) = (0.6, 4.5);
/// ζ values of the three reference curves, in units of ζ₀.
pub const REFERENCE_CURVES: [f64; 3] = [0.65, 1.6, 4.6];

/// Short-range records must satisfy d < ζ₀ / 10.
const SHORT_RANGE_RATIO: f64 = 0.1;
/// Long-range fits must satisfy ζ < d / 5.
const LONG_RANGE_RATIO: f64 = 0.2;
const BISECTION_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeKind {
    IonTrap,
    Cantilever,
}

impl std::str::FromStr for ProbeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "ion-trap" => Ok(Self::IonTrap),
            "cantilever" => Ok(Self::Cantilever),
            other => Err(format!("unknown probe kind {other:?} (expected ion-trap or cantilever)")),
        }
    }
}

impl std::fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::IonTrap => "ion-trap",
            Self::Cantilever => "cantilever",
        })
    }
}

/// One published measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord<T> {
    pub source: String,
    /// Records bracketing one measurement share a group id.
    pub group: Option<String>,
    pub kind: ProbeKind,
    pub d: Length<T>,
    /// f = ω/2π in Hz.
    pub frequency_hz: T,
    pub measured: FieldNoiseDensity<T>,
    /// S_E at f₀, by the ω^(−α) law.
    pub rescaled: FieldNoiseDensity<T>,
}

impl<T: Scalar> ExperimentRecord<T> {
    pub fn new(source: &str, kind: ProbeKind, d: T, frequency_hz: T, measured: T, alpha: T) -> Result<Self> {
        let d = Length::new(d)?;
        let f = AngularFrequency::from_hz(frequency_hz)?.hz();
        let measured = FieldNoiseDensity::new(measured)?;
        if measured.get() <= T::zero() {
            return Err(Error::NonPositive { field: "s_e_si", value: measured.get().as_f64() });
        }
        let rescaled = rescale(measured, f, T::lit(REFERENCE_FREQUENCY_HZ), alpha)?;
        Ok(Self { source: source.to_owned(), group: None, kind, d, frequency_hz: f, measured, rescaled })
    }

    fn grouped(mut self, group: &str) -> Self {
        self.group = Some(group.to_owned());
        self
    }
}

/// S_E(f₀) = S_E(f) · (f/f₀)^α.
pub fn rescale<T: Scalar>(s_e: FieldNoiseDensity<T>, f: T, f0: T, alpha: T) -> Result<FieldNoiseDensity<T>> {
    let f = AngularFrequency::from_hz(f)?.hz();
    let f0 = AngularFrequency::from_hz(f0)?.hz();
    FieldNoiseDensity::new(s_e.get() * (f / f0).powf(alpha))
}

/// A trapped ion of mass m and charge q at secular frequency ω.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IonSpecies<T> {
    pub mass_kg: T,
    pub charge_c: T,
    pub omega: AngularFrequency<T>,
}

impl<T: Scalar> IonSpecies<T> {
    pub fn new(mass_kg: T, charge_c: T, omega: AngularFrequency<T>) -> Result<Self> {
        if !(mass_kg > T::zero() && mass_kg.is_finite()) {
            return Err(Error::NonPositive { field: "mass", value: mass_kg.as_f64() });
        }
        if !(charge_c > T::zero() && charge_c.is_finite()) {
            return Err(Error::NonPositive { field: "charge", value: charge_c.as_f64() });
        }
        Ok(Self { mass_kg, charge_c, omega })
    }

    /// Singly charged ion of `mass_u` atomic mass units at secular frequency `f_hz`.
    pub fn singly_charged(mass_u: T, f_hz: T) -> Result<Self> {
        let c = PhysicalConstants::<T>::codata();
        Self::new(mass_u * c.atomic_mass_unit, c.elementary_charge, AngularFrequency::from_hz(f_hz)?)
    }

    fn coupling(&self) -> T {
        let hbar = PhysicalConstants::<T>::codata().reduced_planck;
        self.charge_c * self.charge_c / (T::lit(4.0) * self.mass_kg * hbar * self.omega.get())
    }
}

/// A cantilever tip with induced charge q = C·V at temperature T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CantileverProbe<T> {
    pub charge_c: T,
    pub temperature_k: T,
    /// Resonance ω_c; S_E is understood to be evaluated here.
    pub omega_c: AngularFrequency<T>,
}

impl<T: Scalar> CantileverProbe<T> {
    pub fn new(charge_c: T, temperature_k: T, omega_c: AngularFrequency<T>) -> Result<Self> {
        if !(charge_c >= T::zero() && charge_c.is_finite()) {
            return Err(Error::Negative { field: "induced charge", value: charge_c.as_f64() });
        }
        if !(temperature_k > T::zero() && temperature_k.is_finite()) {
            return Err(Error::NonPositive { field: "temperature", value: temperature_k.as_f64() });
        }
        Ok(Self { charge_c, temperature_k, omega_c })
    }
}

/// Γ = q²·S_E / (4 m ħ ω), in motional quanta per second.
pub fn heating_rate<T: Scalar>(s_e: FieldNoiseDensity<T>, ion: &IonSpecies<T>) -> T {
    ion.coupling() * s_e.get()
}

/// S_E = 4 m ħ ω Γ / q², the inverse of [`heating_rate`].
pub fn invert_heating<T: Scalar>(gamma: T, ion: &IonSpecies<T>) -> Result<FieldNoiseDensity<T>> {
    if !(gamma >= T::zero()) {
        return Err(Error::Negative { field: "heating rate", value: gamma.as_f64() });
    }
    FieldNoiseDensity::new(gamma / ion.coupling())
}

/// Γ = q²·S_E / (4 k_B T), in 1/s.
pub fn damping_rate<T: Scalar>(s_e: FieldNoiseDensity<T>, probe: &CantileverProbe<T>) -> T {
    let kb = PhysicalConstants::<T>::codata().boltzmann;
    probe.charge_c * probe.charge_c * s_e.get() / (T::lit(4.0) * kb * probe.temperature_k)
}

/// N·S_V(ω₀) = S_E(ω₀)·d·ζ₀ from a record in the short-range regime d < ζ₀/10.
pub fn fit_nsv<T: Scalar>(record: &ExperimentRecord<T>, zeta0: Length<T>) -> Result<NoiseAmplitude<T>> {
    let ratio = record.d.get() / zeta0.get();
    if ratio >= T::lit(SHORT_RANGE_RATIO) {
        return Err(Error::Regime(format!(
            "record {:?} has d/zeta0 = {ratio}, which is not in the short-range regime (< {SHORT_RANGE_RATIO})",
            record.source
        )));
    }
    NoiseAmplitude::new(record.rescaled.get() * record.d.get() * zeta0.get())
}

/// N·S_V from the full model S_E = N·S_V·s(d/ζ₀)/ζ₀² instead of its short-range limit.
pub fn fit_nsv_exact<T: Scalar>(record: &ExperimentRecord<T>, zeta0: Length<T>) -> Result<NoiseAmplitude<T>> {
    let z = zeta0.get();
    let s = scaling_function(record.d.get() / z)?;
    NoiseAmplitude::new(record.rescaled.get() * z * z / s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    /// Root found on the long-range branch with ζ < d/5.
    Ok,
    /// Root found, but ζ ≥ d/5 so the long-range reading is inconsistent.
    RegimeInconsistent,
    /// S_E exceeds every value the branch ζ ∈ (0, d) can produce.
    NoRoot,
}

/// Correlation length inferred from one record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaFit<T> {
    /// Fitted ζ in m; `None` when no root exists.
    pub zeta: Option<T>,
    /// Half-width of the final bisection bracket, in m.
    pub uncertainty: T,
    /// Long-range closed form ζ = √(4d⁴S_E/(3·N·S_V)), the bisection seed.
    pub closed_form: T,
    pub status: FitStatus,
}

/// Solves S_E(ω₀) = N·S_V·s(d/ζ)/ζ² for ζ on the branch ζ ∈ (0, d), where
/// the right-hand side increases monotonically with ζ.
pub fn fit_zeta<T: Scalar>(record: &ExperimentRecord<T>, nsv: NoiseAmplitude<T>) -> Result<ZetaFit<T>> {
    let d = record.d.get();
    let target = record.rescaled.get();
    let nsv = nsv.get();
    if !(nsv > T::zero()) {
        return Err(Error::NonPositive { field: "nsv", value: nsv.as_f64() });
    }
    let closed_form = (T::lit(4.0) * d.powi(4) * target / (T::lit(3.0) * nsv)).sqrt();
    if target == T::zero() {
        return Ok(ZetaFit { zeta: Some(T::zero()), uncertainty: T::zero(), closed_form, status: FitStatus::Ok });
    }
    let model = |zeta: T| -> Result<T> { Ok(nsv * scaling_function(d / zeta)? / (zeta * zeta)) };
    if model(d)? < target {
        return Ok(ZetaFit { zeta: None, uncertainty: T::zero(), closed_form, status: FitStatus::NoRoot });
    }
    // Bracket in log ζ around the closed-form seed, then bisect.
    let mut hi = closed_form.min(d);
    while model(hi)? < target {
        hi = (hi * T::lit(2.0)).min(d);
    }
    let mut lo = hi * T::lit(0.5);
    while model(lo)? > target {
        lo *= T::lit(0.5);
    }
    let tol = T::lit(BISECTION_TOLERANCE);
    while hi - lo > tol * lo {
        let mid = (lo * hi).sqrt();
        if model(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let zeta = (lo * hi).sqrt();
    let status = if zeta < d * T::lit(LONG_RANGE_RATIO) { FitStatus::Ok } else { FitStatus::RegimeInconsistent };
    Ok(ZetaFit { zeta: Some(zeta), uncertainty: (hi - lo) * T::lit(0.5), closed_form, status })
}

/// Per-record outcome of a dataset fit.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordFit<T> {
    pub record: ExperimentRecord<T>,
    pub zeta: ZetaFit<T>,
    /// Whether ζ/ζ₀ lies in the ion-trap band [0.6, 4.5].
    pub in_band: bool,
    /// log₁₀ of model over measured S_E at the fitted ζ.
    pub residual: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    pub zeta0: Length<T>,
    pub nsv: NoiseAmplitude<T>,
    /// Source of the short-range record used for N·S_V.
    pub nsv_source: String,
    pub records: Vec<RecordFit<T>>,
    /// Smallest and largest fitted ζ among ion-trap records with status Ok.
    pub band: Option<(T, T)>,
}

/// Fits N·S_V from the first short-range record and ζ for every ion-trap record.
pub fn fit_dataset<T: Scalar>(records: &[ExperimentRecord<T>], zeta0: Length<T>) -> Result<FitResult<T>> {
    if records.is_empty() {
        return Err(Error::Domain("dataset is empty".into()));
    }
    let short = records
        .iter()
        .find(|r| r.d.get() / zeta0.get() < T::lit(SHORT_RANGE_RATIO))
        .ok_or_else(|| Error::Regime("no record lies in the short-range regime d < zeta0/10".into()))?;
    let nsv = fit_nsv(short, zeta0)?;
    let (band_lo, band_hi) = (T::lit(ION_TRAP_BAND.0), T::lit(ION_TRAP_BAND.1));
    let mut fits = Vec::new();
    for record in records.iter().filter(|r| r.kind == ProbeKind::IonTrap) {
        let zeta = fit_zeta(record, nsv)?;
        let in_band = zeta.zeta.is_some_and(|z| {
            let r = z / zeta0.get();
            r >= band_lo && r <= band_hi
        });
        let residual = match zeta.zeta {
            Some(z) if z > T::zero() => {
                let model = nsv.get() * scaling_function(record.d.get() / z)? / (z * z);
                Some((model / record.rescaled.get()).log10())
            }
            _ => None,
        };
        fits.push(RecordFit { record: record.clone(), zeta, in_band, residual });
    }
    let band = fits.iter().filter(|f| f.zeta.status == FitStatus::Ok).filter_map(|f| f.zeta.zeta).fold(
        None,
        |acc: Option<(T, T)>, z| match acc {
            None => Some((z, z)),
            Some((lo, hi)) => Some((lo.min(z), hi.max(z))),
        },
    );
    Ok(FitResult { zeta0, nsv, nsv_source: short.source.clone(), records: fits, band })
}

/// The measurements tabulated for gold surfaces at room temperature. The
/// Labaziewicz bracket is stored as its two endpoints sharing a group id.
pub fn gold_measurements<T: Scalar>() -> Vec<ExperimentRecord<T>> {
    let one = T::one();
    let rec = |source: &str, kind, d_um: f64, f_mhz: f64, s_e: f64| {
        ExperimentRecord::new(source, kind, T::lit(d_um * 1e-6), T::lit(f_mhz * 1e6), T::lit(s_e), one)
            .expect("tabulated values are valid")
    };
    vec![
        rec("Stipe2001", ProbeKind::Cantilever, 0.02, 4e-3, 4.0),
        rec("Seidelin2006", ProbeKind::IonTrap, 40.0, 3.0, 9e-12),
        rec("Labaziewicz2008", ProbeKind::IonTrap, 75.0, 1.0, 0.3e-11).grouped("Labaziewicz2008"),
        rec("Labaziewicz2008", ProbeKind::IonTrap, 75.0, 1.0, 3e-11).grouped("Labaziewicz2008"),
        rec("Turchette2000", ProbeKind::IonTrap, 140.0, 10.0, 5e-12),
    ]
}

/// One CSV/JSON row: `source,kind,d_um,f_MHz,s_e_si`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub source: String,
    pub kind: String,
    pub d_um: f64,
    #[serde(rename = "f_MHz")]
    pub f_mhz: f64,
    pub s_e_si: f64,
}

impl From<&ExperimentRecord<f64>> for DatasetRow {
    fn from(r: &ExperimentRecord<f64>) -> Self {
        Self {
            source: r.source.clone(),
            kind: r.kind.to_string(),
            d_um: r.d.get() * 1e6,
            f_mhz: r.frequency_hz * 1e-6,
            s_e_si: r.measured.get(),
        }
    }
}

pub const DATASET_HEADER: [&str; 5] = ["source", "kind", "d_um", "f_MHz", "s_e_si"];

/// Reads a dataset CSV. Lines starting with `#` are comments; a file with no
/// data (empty, or comments only) is an empty dataset. Records repeated with
/// the same source, distance and frequency are grouped as a bracket.
pub fn read_dataset<R: Read>(reader: R, alpha: f64) -> Result<Vec<ExperimentRecord<f64>>> {
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text)?;
    if text.lines().all(|l| l.trim().is_empty() || l.trim_start().starts_with('#')) {
        return Ok(Vec::new());
    }
    let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = csv.headers().map_err(|e| Error::Dataset { line: 1, message: e.to_string() })?.clone();
    if headers.iter().collect::<Vec<_>>() != DATASET_HEADER {
        return Err(Error::Dataset {
            line: headers.position().map_or(1, |p| p.line()),
            message: format!(
                "expected header {:?}, found {:?}",
                DATASET_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out: Vec<ExperimentRecord<f64>> = Vec::new();
    for row in csv.records() {
        let row =
            row.map_err(|e| Error::Dataset { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = row.position().map_or(0, |p| p.line());
        let parsed: DatasetRow =
            row.deserialize(Some(&headers)).map_err(|e| Error::Dataset { line, message: e.to_string() })?;
        let kind: ProbeKind = parsed.kind.parse().map_err(|message| Error::Dataset { line, message })?;
        for (name, value) in [("d_um", parsed.d_um), ("f_MHz", parsed.f_mhz), ("s_e_si", parsed.s_e_si)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Dataset { line, message: format!("{name} must be positive, got {value}") });
            }
        }
        let record =
            ExperimentRecord::new(&parsed.source, kind, parsed.d_um * 1e-6, parsed.f_mhz * 1e6, parsed.s_e_si, alpha)
                .map_err(|e| Error::Dataset { line, message: e.to_string() })?;
        out.push(record);
    }
    let keys: Vec<_> = out.iter().map(|r| (r.source.clone(), r.d.get().to_bits(), r.frequency_hz.to_bits())).collect();
    for (i, r) in out.iter_mut().enumerate() {
        if keys.iter().filter(|k| **k == keys[i]).count() > 1 {
            r.group = Some(r.source.clone());
        }
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>, alpha: f64) -> Result<Vec<ExperimentRecord<f64>>> {
    read_dataset(std::fs::File::open(path)?, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fe(v: f64) -> FieldNoiseDensity<f64> {
        FieldNoiseDensity::new(v).unwrap()
    }

    #[test]
    fn rescale_table_rows() {
        assert_relative_eq!(rescale(fe(4.0), 4e3, 1e6, 1.0).unwrap().get(), 1.6e-2, max_relative = 1e-15);
        assert_relative_eq!(rescale(fe(5e-12), 10e6, 1e6, 1.0).unwrap().get(), 5e-11, max_relative = 1e-15);
        assert_eq!(rescale(fe(7e-12), 1e6, 1e6, 1.0).unwrap().get(), 7e-12);
    }

    #[test]
    fn heating_rate_of_calcium_ion() {
        let ion = IonSpecies::singly_charged(40.0, 1e6).unwrap();
        assert_eq!(heating_rate(fe(0.0), &ion), 0.0);
        // Independent arithmetic: e²·S/(4·40u·ħ·2π·1e6)
        let e = 1.602_176_634e-19_f64;
        let want =
            e * e * 5e-11 / (4.0 * 40.0 * 1.660_539_066_60e-27 * 1.054_571_817e-34 * std::f64::consts::TAU * 1e6);
        let gamma = heating_rate(fe(5e-11), &ion);
        assert_relative_eq!(gamma, want, max_relative = 1e-14);
        assert!((gamma - 7.29e3).abs() / 7.29e3 < 1e-3, "{gamma}");
        let heavy = IonSpecies::singly_charged(80.0, 1e6).unwrap();
        assert_relative_eq!(heating_rate(fe(5e-11), &heavy), gamma / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn heating_inversion() {
        let ion = IonSpecies::singly_charged(40.0, 1e6).unwrap();
        let gamma = heating_rate(fe(5e-11), &ion);
        assert_relative_eq!(invert_heating(gamma, &ion).unwrap().get(), 5e-11, max_relative = 1e-12);
        assert_eq!(invert_heating(0.0, &ion).unwrap().get(), 0.0);
        assert_relative_eq!(
            invert_heating(2.0 * gamma, &ion).unwrap().get(),
            2.0 * invert_heating(gamma, &ion).unwrap().get(),
            max_relative = 1e-15
        );
        assert!(invert_heating(-1.0, &ion).is_err());
    }

    #[test]
    fn cantilever_damping() {
        let e = 1.602_176_634e-19_f64;
        let w = AngularFrequency::from_hz(4e3).unwrap();
        let probe = CantileverProbe::new(1000.0 * e, 300.0, w).unwrap();
        assert_eq!(damping_rate(fe(0.0), &probe), 0.0);
        let gamma = damping_rate(fe(4.0), &probe);
        let want = (1000.0 * e).powi(2) * 4.0 / (4.0 * 1.380_649e-23 * 300.0);
        assert_relative_eq!(gamma, want, max_relative = 1e-14);
        assert!((gamma - 6.18e-12).abs() / 6.18e-12 < 5e-3, "{gamma}");
        let doubled = CantileverProbe::new(2000.0 * e, 300.0, w).unwrap();
        assert_relative_eq!(damping_rate(fe(4.0), &doubled), 4.0 * gamma, max_relative = 1e-14);
        assert!(CantileverProbe::new(e, 0.0, w).is_err());
    }

    #[test]
    fn nsv_from_cantilever_row() {
        let table = gold_measurements::<f64>();
        let zeta0 = Length::new(DEFAULT_ZETA0_M).unwrap();
        let nsv = fit_nsv(&table[0], zeta0).unwrap().get();
        assert_relative_eq!(nsv, 3.2e-16, max_relative = 1e-12);
        let err = fit_nsv(&table[1], zeta0).unwrap_err();
        assert!(err.to_string().contains("d/zeta0 = 40"), "{err}");
    }

    #[test]
    fn nsv_of_zero_noise_is_zero() {
        let mut r = gold_measurements::<f64>().remove(0);
        r.rescaled = fe(0.0);
        assert_eq!(fit_nsv(&r, Length::new(1e-6).unwrap()).unwrap().get(), 0.0);
    }

    #[test]
    fn zeta_fit_tends_to_zero_with_noise() {
        let nsv = NoiseAmplitude::new(3.2e-16).unwrap();
        let mut r = gold_measurements::<f64>().remove(1);
        let mut last = f64::INFINITY;
        for s in [1e-11, 1e-13, 1e-15, 1e-17] {
            r.rescaled = fe(s);
            let z = fit_zeta(&r, nsv).unwrap().zeta.unwrap();
            assert!(z < last);
            last = z;
        }
        assert!(last < 1e-8);
        r.rescaled = fe(0.0);
        assert_eq!(fit_zeta(&r, nsv).unwrap().zeta, Some(0.0));
    }

    #[test]
    fn zeta_fit_flags_missing_root() {
        let nsv = NoiseAmplitude::new(3.2e-16).unwrap();
        let mut r = gold_measurements::<f64>().remove(1);
        r.rescaled = fe(1.0);
        let fit = fit_zeta(&r, nsv).unwrap();
        assert_eq!(fit.status, FitStatus::NoRoot);
        assert!(fit.zeta.is_none());
    }

    #[test]
    fn zeta_fit_flags_regime_inconsistency() {
        let nsv = NoiseAmplitude::new(3.2e-16).unwrap();
        let mut r = gold_measurements::<f64>().remove(1);
        let d = r.d.get();
        // Noise produced by ζ = d/2 is on the branch but outside the long-range regime.
        r.rescaled = fe(3.2e-16 * scaling_function(2.0).unwrap() / (d * d / 4.0));
        let fit = fit_zeta(&r, nsv).unwrap();
        assert_eq!(fit.status, FitStatus::RegimeInconsistent);
        assert_relative_eq!(fit.zeta.unwrap(), d / 2.0, max_relative = 2e-6);
    }

    #[test]
    fn builtin_table_rows() {
        let t = gold_measurements::<f64>();
        assert_eq!(t.len(), 5);
        let rescaled: Vec<f64> = t.iter().map(|r| r.rescaled.get()).collect();
        for (got, want) in rescaled.iter().zip([1.6e-2, 2.7e-11, 0.3e-11, 3e-11, 5e-11]) {
            assert_relative_eq!(*got, want, max_relative = 1e-14);
        }
        assert_eq!(t[2].group.as_deref(), Some("Labaziewicz2008"));
        assert_eq!(t[2].group, t[3].group);
        assert!(t[1].group.is_none());
    }

    #[test]
    fn csv_parsing() {
        let text = "# gold surfaces\nsource,kind,d_um,f_MHz,s_e_si\nA,ion-trap,40,3,9e-12\n# bracket\nB,ion-trap,75,1,3e-12\nB,ion-trap,75,1,3e-11\n";
        let rows = read_dataset(text.as_bytes(), 1.0).unwrap();
        assert_eq!(rows.len(), 3);
        assert_relative_eq!(rows[0].rescaled.get(), 2.7e-11, max_relative = 1e-14);
        assert!(rows[0].group.is_none());
        assert_eq!(rows[1].group.as_deref(), Some("B"));
    }

    #[test]
    fn empty_dataset_is_not_an_error() {
        assert!(read_dataset("".as_bytes(), 1.0).unwrap().is_empty());
        assert!(read_dataset("# nothing\n\n".as_bytes(), 1.0).unwrap().is_empty());
    }

    #[test]
    fn non_positive_distance_names_the_line() {
        let text = "source,kind,d_um,f_MHz,s_e_si\nA,ion-trap,40,3,9e-12\nB,ion-trap,0,1,3e-12\n";
        let err = read_dataset(text.as_bytes(), 1.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3") && msg.contains("d_um"), "{msg}");
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let bad_header = "source,kind,d,f,s\nA,ion-trap,40,3,9e-12\n";
        assert!(read_dataset(bad_header.as_bytes(), 1.0).is_err());
        let bad_number = "source,kind,d_um,f_MHz,s_e_si\nA,ion-trap,forty,3,9e-12\n";
        assert!(read_dataset(bad_number.as_bytes(), 1.0).unwrap_err().to_string().contains("line 2"));
        let bad_kind = "source,kind,d_um,f_MHz,s_e_si\nA,paul-trap,40,3,9e-12\n";
        assert!(read_dataset(bad_kind.as_bytes(), 1.0).is_err());
    }
}
