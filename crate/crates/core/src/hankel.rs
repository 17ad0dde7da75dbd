//! Oscillatory Bessel-weighted integrals ∫₀^∞ f(u) J_n(a·u) du.
//!
//! The half-line is split at the zeros of J_n(a·u); each lobe is integrated
//! adaptively and the alternating tail of partial sums is accelerated by
//! repeated averaging (an Euler transformation).

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, Tolerance};
use crate::scalar::Scalar;
use crate::special::{bessel_j0, bessel_j1, bessel_zero};

const AVERAGING_DEPTH: usize = 12;
const MAX_LOBES: usize = 2000;

pub fn bessel_transform<T: Scalar, F: Fn(T) -> T>(f: F, order: u32, a: T, rel_tol: T) -> Result<T> {
    if order > 1 {
        return Err(Error::Domain(format!("Bessel order {order} is not supported")));
    }
    if !(a > T::zero() && a.is_finite()) {
        return Err(Error::Domain(format!("Bessel transform argument must be positive, got {a}")));
    }
    let bessel = |x: T| if order == 0 { bessel_j0(x) } else { bessel_j1(x) };
    let integrand = |u: T| f(u) * bessel(a * u);
    let lobe_rel = (rel_tol * T::lit(1e-2)).max(T::epsilon() * T::lit(64.0));

    let mut lower = T::zero();
    let mut partial = Vec::with_capacity(64);
    let mut sum = T::zero();
    let mut previous: Option<T> = None;
    for m in 1..=MAX_LOBES {
        let upper = bessel_zero::<T>(order, m) / a;
        // Late lobes only need to be accurate relative to the running sum.
        let floor = (sum.abs() * lobe_rel).max(T::min_positive_value());
        let lobe = adaptive(&integrand, &[lower, upper], Tolerance::relative(lobe_rel).with_abs(floor))?;
        sum += lobe.value;
        partial.push(sum);
        lower = upper;
        if partial.len() < AVERAGING_DEPTH + 4 {
            continue;
        }
        let estimate = euler_average(&partial[partial.len() - AVERAGING_DEPTH..]);
        if let Some(prev) = previous {
            let scale = estimate.abs().max(lobe.value.abs() * T::lit(1e-6));
            if (estimate - prev).abs() <= rel_tol * scale {
                return Ok(estimate);
            }
        }
        previous = Some(estimate);
    }
    Err(Error::Quadrature(format!(
        "Bessel transform of order {order} at a = {a} did not settle after {MAX_LOBES} lobes"
    )))
}

fn euler_average<T: Scalar>(sums: &[T]) -> T {
    let mut level = sums.to_vec();
    while level.len() > 1 {
        level = level.windows(2).map(|w| (w[0] + w[1]) * T::lit(0.5)).collect();
    }
    level[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lipschitz_integral() {
        // ∫ e^(−u) J0(a u) du = 1/√(1+a²)
        for a in [0.3, 1.0, 4.0] {
            let v = bessel_transform(|u: f64| (-u).exp(), 0, a, 1e-12).unwrap();
            assert_relative_eq!(v, 1.0 / (1.0 + a * a).sqrt(), max_relative = 1e-10);
        }
    }

    #[test]
    fn slowly_decaying_oscillatory_integral() {
        // ∫ J1(a u) du = 1/a, with no decay beyond the Bessel envelope.
        let v = bessel_transform(|_u: f64| 1.0, 1, 2.0, 1e-10).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-8);
        // ∫ u J0(a u)/(1+u²)^(3/2) du = e^(−a)
        let v = bessel_transform(|u: f64| u / (1.0 + u * u).powf(1.5), 0, 1.5, 1e-12).unwrap();
        assert_relative_eq!(v, (-1.5f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn rejects_non_positive_argument() {
        assert!(bessel_transform(|u: f64| u, 0, 0.0, 1e-8).is_err());
        assert!(bessel_transform(|u: f64| u, 2, 1.0, 1e-8).is_err());
    }
}
