//! Bessel functions of the first kind, orders 0 and 1, and their zeros.

use crate::scalar::Scalar;

const SERIES_LIMIT: f64 = 12.0;

fn series<T: Scalar>(x: T, order: u32) -> T {
    let q = x * x * T::lit(0.25);
    // Leading term: 1 for J0, x/2 for J1.
    let mut term = if order == 0 { T::one() } else { x * T::lit(0.5) };
    let mut sum = term;
    let order_t = T::from_count(order as usize);
    for k in 1..200 {
        let kf = T::from_count(k);
        term = -term * q / (kf * (kf + order_t));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() * T::lit(0.01) {
            break;
        }
    }
    sum
}

fn asymptotic<T: Scalar>(x: T, order: u32) -> T {
    let nu = T::from_count(order as usize);
    let mu = T::lit(4.0) * nu * nu;
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..60 {
        let odd = T::from_count(2 * k - 1);
        term = term * (mu - odd * odd) / (T::from_count(k) * eight_x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k / x^k alternates between Q and P with signs (+Q, −P, −Q, +P, ...)
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    let chi = x - (nu * T::lit(0.5) + T::lit(0.25)) * T::PI();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// J₀(x).
pub fn bessel_j0<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    if ax < T::lit(SERIES_LIMIT) {
        series(ax, 0)
    } else {
        asymptotic(ax, 0)
    }
}

/// J₁(x), odd in x.
pub fn bessel_j1<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    let v = if ax < T::lit(SERIES_LIMIT) { series(ax, 1) } else { asymptotic(ax, 1) };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// The m-th positive zero (m ≥ 1) of J₀ or J₁.
pub fn bessel_zero<T: Scalar>(order: u32, m: usize) -> T {
    assert!(order <= 1 && m >= 1);
    let mu = T::lit(4.0 * f64::from(order * order));
    let beta = (T::from_count(m) + T::lit(f64::from(order) * 0.5 - 0.25)) * T::PI();
    let eb = T::lit(8.0) * beta;
    let mut z = beta
        - (mu - T::one()) / eb
        - T::lit(4.0) * (mu - T::one()) * (T::lit(7.0) * mu - T::lit(31.0)) / (T::lit(3.0) * eb * eb * eb);
    for _ in 0..30 {
        let (f, df) = if order == 0 {
            (bessel_j0(z), -bessel_j1(z))
        } else {
            let j1 = bessel_j1(z);
            (j1, bessel_j0(z) - j1 / z)
        };
        let step = f / df;
        z -= step;
        if step.abs() <= T::epsilon() * T::lit(4.0) * z {
            break;
        }
    }
    z
}
