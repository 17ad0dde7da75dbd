//! Radially averaged two-point function of the boundary potential and its
//! exponential fit.

use patchnoise::{BoundaryGrid, BoundarySpectrum};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Radially averaged C(r) on bins one grid spacing wide.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// Mean offset length in each bin, m.
    pub radii: Vec<f64>,
    /// C(r), V².
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// Radial average of the circular autocorrelation of `boundary` out to `max_r`.
    pub fn measure(boundary: &BoundaryGrid, max_r: f64) -> Self {
        Self::from_spectrum(&BoundarySpectrum::new(boundary), boundary.spacing(), boundary.shape().0, max_r)
    }

    pub(crate) fn from_spectrum(spectrum: &BoundarySpectrum, h: f64, n: usize, max_r: f64) -> Self {
        let c = spectrum.autocorrelation();
        let bins = (max_r / h).floor() as usize + 1;
        let mut sum_r = vec![0.0; bins];
        let mut sum_c = vec![0.0; bins];
        let mut count = vec![0usize; bins];
        let offset = |i: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        for ix in 0..n {
            for iz in 0..n {
                let r = h * offset(ix).hypot(offset(iz));
                let bin = (r / h).round() as usize;
                if bin < bins && r <= max_r {
                    sum_r[bin] += r;
                    sum_c[bin] += c.at(ix, iz);
                    count[bin] += 1;
                }
            }
        }
        let (mut radii, mut values) = (Vec::new(), Vec::new());
        for b in 0..bins {
            if count[b] > 0 {
                radii.push(sum_r[b] / count[b] as f64);
                values.push(sum_c[b] / count[b] as f64);
            }
        }
        Self { radii, values }
    }

    /// Bin-wise mean of equally binned profiles.
    pub fn average(profiles: &[RadialProfile]) -> Option<Self> {
        let first = profiles.first()?;
        let mut out = first.clone();
        for p in &profiles[1..] {
            for (acc, v) in out.values.iter_mut().zip(&p.values) {
                *acc += v;
            }
        }
        let k = profiles.len() as f64;
        out.values.iter_mut().for_each(|v| *v /= k);
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Fitted ζ_eff in m; absent when the fit degenerates.
    pub zeta_eff: Option<f64>,
    /// RMS of C − C(0)·e^(−r/ζ_eff) over the fitted range, relative to C(0);
    /// infinite when the fit degenerates.
    pub residual: f64,
    /// Upper end of the fitted range, m.
    pub fit_range: f64,
}

impl CorrelationEstimate {
    pub fn c0(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Fits C(r) ≈ C(0)·e^(−r/ζ) for r ≤ `fit_range` by least squares in ζ
/// (golden-section search on ln ζ).
pub fn fit_exponential(profile: RadialProfile, fit_range: f64) -> CorrelationEstimate {
    let c0 = profile.values.first().copied().unwrap_or(0.0);
    let points: Vec<(f64, f64)> =
        profile.radii.iter().zip(&profile.values).filter(|(r, _)| **r <= fit_range).map(|(r, c)| (*r, *c)).collect();
    let degenerate = |profile: RadialProfile| CorrelationEstimate {
        radii: profile.radii,
        values: profile.values,
        zeta_eff: None,
        residual: f64::INFINITY,
        fit_range,
    };
    if !(c0 > 0.0) || points.len() < 3 {
        return degenerate(profile);
    }
    let r_first = points[1].0;
    let r_last = points.last().unwrap().0;
    let sse = |log_zeta: f64| {
        let zeta = log_zeta.exp();
        points.iter().map(|(r, c)| (c - c0 * (-r / zeta).exp()).powi(2)).sum::<f64>()
    };
    // Beyond 100 fit ranges the model is flat over the data; that is no decay.
    let (mut a, mut b) = ((r_first * 1e-2).ln(), (r_last * 1e2).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    while b - a > 1e-10 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sse(x2);
        }
    }
    let best = 0.5 * (a + b);
    if best >= (r_last * 1e2).ln() - 1e-6 {
        return degenerate(profile);
    }
    let residual = (sse(best) / points.len() as f64).sqrt() / c0;
    CorrelationEstimate {
        radii: profile.radii,
        values: profile.values,
        zeta_eff: Some(best.exp()),
        residual,
        fit_range,
    }
}

/// Default fit range 3/√λ, clipped to `max_r`.
pub fn default_fit_range(intensity: f64, max_r: f64) -> f64 {
    (3.0 / intensity.sqrt()).min(max_r)
}

pub(crate) fn check_max_r(max_r: f64, side: f64, spacing: f64) -> Result<()> {
    if !(max_r >= spacing && max_r <= side / 4.0) {
        return Err(invalid("max_r", format!("must lie in [{spacing:e}, L/4 = {:e}] m, got {max_r:e}", side / 4.0)));
    }
    Ok(())
}
