//! Numerical integration: Gauss–Laguerre rules for exponentially weighted
//! half-line integrals and adaptive Gauss–Kronrod for everything else.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Outcome of an integration with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

/// n-point Gauss–Laguerre rule for ∫₀^∞ e^(−t) f(t) dt.
#[derive(Clone, Debug)]
pub struct GaussLaguerre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> GaussLaguerre<T> {
    /// Nodes are found in `f64` by Newton iteration on the three-term
    /// recurrence and then narrowed to `T`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Laguerre order must be positive");
        let (nodes, weights) = laguerre_rule(n);
        Self { nodes: nodes.into_iter().map(T::lit).collect(), weights: weights.into_iter().map(T::lit).collect() }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

fn laguerre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut x = vec![0.0_f64; n];
    let mut w = vec![0.0_f64; n];
    let mut z = 0.0_f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (p1 - p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    (x, w)
}

/// Integrates ∫₀^∞ e^(−t) f(t) dt, doubling the Laguerre order from `start`
/// until successive values agree to `rel_tol`. Returns `None` when `max_order`
/// is reached without agreement.
pub fn laguerre_doubling<T: Scalar, F: FnMut(T) -> T>(
    mut f: F,
    start: usize,
    max_order: usize,
    rel_tol: T,
) -> Option<Estimate<T>> {
    let mut n = start.max(2);
    let mut prev = GaussLaguerre::<T>::new(n).integrate(&mut f);
    let mut evaluations = n;
    while n * 2 <= max_order {
        n *= 2;
        let next = GaussLaguerre::<T>::new(n).integrate(&mut f);
        evaluations += n;
        let diff = (next - prev).abs();
        if diff <= rel_tol * next.abs() {
            return Some(Estimate { value: next, error: diff, evaluations });
        }
        prev = next;
    }
    None
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let sum = f(center - dx) + f(center + dx);
        kronrod += T::lit(WGK[j]) * sum;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Tolerances and limits for [`adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Tolerance<T> {
    pub fn relative(rel: T) -> Self {
        Self { abs: T::zero(), rel, max_intervals: 4000 }
    }

    pub fn with_abs(mut self, abs: T) -> Self {
        self.abs = abs;
        self
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over the
/// polyline `breakpoints` (at least two increasing points).
pub fn adaptive<T: Scalar, F: FnMut(T) -> T>(mut f: F, breakpoints: &[T], tol: Tolerance<T>) -> Result<Estimate<T>> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain("adaptive quadrature needs at least two breakpoints".into()));
    }
    let mut intervals: Vec<(T, T, T, T)> = Vec::new();
    for pair in breakpoints.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(b > a) {
            if b == a {
                continue;
            }
            return Err(Error::Domain("breakpoints must be increasing".into()));
        }
        let (v, e) = kronrod15(&mut f, a, b);
        intervals.push((a, b, v, e));
    }
    let mut evaluations = 15 * intervals.len();
    loop {
        let value = intervals.iter().fold(T::zero(), |s, iv| s + iv.2);
        let error = intervals.iter().fold(T::zero(), |s, iv| s + iv.3);
        let target = tol.abs.max(tol.rel * value.abs());
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        if error <= target {
            return Ok(Estimate { value, error, evaluations });
        }
        if intervals.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "{} subintervals exhausted; estimate {} with error {} (target {})",
                intervals.len(),
                value,
                error,
                target
            )));
        }
        let (worst, _) =
            intervals
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (a, b, _, e) = intervals[worst];
        let mid = (a + b) * T::lit(0.5);
        if !(mid > a && mid < b) {
            // Interval cannot be split further; accept if everything else is fine.
            if error - e <= target {
                return Ok(Estimate { value, error, evaluations });
            }
            return Err(Error::Quadrature(format!("interval [{a}, {b}] reached machine resolution")));
        }
        let (v1, e1) = kronrod15(&mut f, a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, b);
        evaluations += 30;
        intervals[worst] = (a, mid, v1, e1);
        intervals.push((mid, b, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_integrates_polynomials_exactly() {
        // ∫ e^-t t^k dt = k!
        let rule = GaussLaguerre::<f64>::new(8);
        let mut fact = 1.0;
        for k in 0..16 {
            if k > 0 {
                fact *= k as f64;
            }
            let v = rule.integrate(|t| t.powi(k));
            assert_relative_eq!(v, fact, max_relative = 1e-11);
        }
    }

    #[test]
    fn laguerre_weights_sum_to_one() {
        for n in [2, 16, 64, 128] {
            let rule = GaussLaguerre::<f64>::new(n);
            let total: f64 = rule.weights().iter().sum();
            assert_relative_eq!(total, 1.0, max_relative = 1e-11);
            assert!(rule.nodes().windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn laguerre_f32_rule_is_usable() {
        let rule = GaussLaguerre::<f32>::new(16);
        let v = rule.integrate(|t| t * t);
        assert!((v - 2.0).abs() < 1e-5);
    }

    #[test]
    fn doubling_reports_stall() {
        // |t - 1| has a kink, so successive orders never agree to 1e-14.
        assert!(laguerre_doubling(|t: f64| (t - 1.0).abs(), 4, 64, 1e-14).is_none());
        let est = laguerre_doubling(|t: f64| 1.0 / (1.0 + t * t), 4, 256, 1e-10).unwrap();
        // ∫ e^-t/(1+t²) = Ci(1) sin 1 + (π/2 − Si(1)) cos 1
        assert_relative_eq!(est.value, 0.621_449_624_235_813_4, max_relative = 1e-9);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = adaptive(|x: f64| x.sqrt().ln(), &[0.0, 1.0], Tolerance::relative(1e-10)).unwrap();
        assert_relative_eq!(est.value, -0.5, max_relative = 1e-9);
    }

    #[test]
    fn adaptive_uses_breakpoints() {
        let est = adaptive(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], Tolerance::relative(1e-13)).unwrap();
        assert_relative_eq!(est.value, 0.045 + 0.245, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let tol = Tolerance { abs: 0.0, rel: 1e-15, max_intervals: 8 };
        let err = adaptive(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], tol).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
    }
}
