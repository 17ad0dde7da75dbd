//! Configuration averages of the boundary correlation and the field variance.

use patchnoise::spectrum::scaling_function;
use patchnoise::{BoundarySpectrum, Length};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{check_max_r, default_fit_range, fit_exponential, CorrelationEstimate, RadialProfile};
use crate::error::{invalid, Result};
use crate::tessellation::{generate_configuration, TessellationSpec};

/// Component order used by every variance array: Ex, Ey, Ez, |E|².
pub const COMPONENTS: [&str; 4] = ["x", "y", "z", "total"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HeightEstimate {
    Measured {
        height: f64,
        /// Ensemble mean of the spatial variance, (V/m)².
        variance: [f64; 4],
        /// Standard error of the mean across configurations; NaN for one
        /// configuration.
        std_error: [f64; 4],
    },
    /// Height outside [h, L/8], where the grid cannot represent the field.
    Unresolvable { height: f64, reason: String },
}

impl HeightEstimate {
    pub fn height(&self) -> f64 {
        match self {
            Self::Measured { height, .. } | Self::Unresolvable { height, .. } => *height,
        }
    }

    pub fn total(&self) -> Option<(f64, f64)> {
        match self {
            Self::Measured { variance, std_error, .. } => Some((variance[3], std_error[3])),
            Self::Unresolvable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    pub configs: usize,
    pub points: Vec<HeightEstimate>,
}

impl VarianceProfile {
    /// (d, Var |E|², standard error) for the resolvable heights.
    pub fn totals(&self) -> Vec<(f64, f64, f64)> {
        self.points.iter().filter_map(|p| p.total().map(|(v, e)| (p.height(), v, e))).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleConfig {
    pub spec: TessellationSpec,
    /// Nodes per side.
    pub grid: usize,
    pub heights: Vec<f64>,
    pub configs: usize,
    /// Largest correlation offset, m; `None` skips the correlation.
    pub max_r: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub spec: TessellationSpec,
    pub grid: usize,
    pub correlation: Option<CorrelationEstimate>,
    pub variance: VarianceProfile,
}

impl EnsembleReport {
    /// σ_V²·s(d/ζ_eff)/ζ_eff² at `d`, when ζ_eff was measured.
    pub fn prediction(&self, d: f64) -> Option<f64> {
        let zeta = self.correlation.as_ref()?.zeta_eff?;
        predicted_variance(self.spec.sigma, zeta, d).ok()
    }
}

/// σ_V²·s(d/ζ)/ζ²: the model's total field variance for a boundary of
/// variance σ_V² and correlation length ζ.
pub fn predicted_variance(sigma: f64, zeta: f64, d: f64) -> Result<f64> {
    Ok(sigma * sigma * scaling_function(d / zeta)? / (zeta * zeta))
}

struct Sample {
    variances: Vec<Option<[f64; 4]>>,
    profile: Option<RadialProfile>,
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleReport> {
    let EnsembleConfig { spec, grid, ref heights, configs, max_r } = *config;
    if configs == 0 {
        return Err(invalid("configs", "need at least one configuration"));
    }
    let h = spec.side / grid as f64;
    if let Some(r) = max_r {
        check_max_r(r, spec.side, h)?;
    }
    let band = (h, spec.side / 8.0);
    let resolvable: Vec<bool> = heights.iter().map(|&y| y >= band.0 && y <= band.1).collect();

    let samples = (0..configs as u64)
        .into_par_iter()
        .map(|index| -> Result<Sample> {
            let tessellation = generate_configuration(&spec, grid, index)?;
            let spectrum = BoundarySpectrum::new(&tessellation.boundary());
            let variances = heights
                .iter()
                .zip(&resolvable)
                .map(|(&y, &ok)| ok.then(|| spectrum.field_variances(Length::new(y).expect("positive height"))))
                .collect();
            let profile = max_r.map(|r| RadialProfile::from_spectrum(&spectrum, h, grid, r));
            Ok(Sample { variances, profile })
        })
        .collect::<Result<Vec<_>>>()?;

    let points = heights
        .iter()
        .enumerate()
        .map(|(j, &height)| {
            if !resolvable[j] {
                return HeightEstimate::Unresolvable {
                    height,
                    reason: format!("height must lie in [h, L/8] = [{:e}, {:e}] m", band.0, band.1),
                };
            }
            let per_config: Vec<[f64; 4]> = samples.iter().map(|s| s.variances[j].expect("resolvable")).collect();
            let (variance, std_error) = mean_and_error(&per_config);
            HeightEstimate::Measured { height, variance, std_error }
        })
        .collect();

    let correlation = max_r.map(|r| {
        let profiles: Vec<RadialProfile> = samples.into_iter().filter_map(|s| s.profile).collect();
        let mean = RadialProfile::average(&profiles).expect("at least one configuration");
        fit_exponential(mean, default_fit_range(spec.intensity, r))
    });

    Ok(EnsembleReport { spec, grid, correlation, variance: VarianceProfile { configs, points } })
}

/// Field variance at each height averaged over `configs` fresh tilings.
pub fn field_variance(
    spec: &TessellationSpec,
    grid: usize,
    heights: &[f64],
    configs: usize,
) -> Result<VarianceProfile> {
    let config = EnsembleConfig { spec: *spec, grid, heights: heights.to_vec(), configs, max_r: None };
    Ok(run_ensemble(&config)?.variance)
}

/// Ensemble boundary correlation out to `max_r` with its exponential fit.
pub fn boundary_correlation(
    spec: &TessellationSpec,
    grid: usize,
    max_r: f64,
    configs: usize,
) -> Result<CorrelationEstimate> {
    let config = EnsembleConfig { spec: *spec, grid, heights: Vec::new(), configs, max_r: Some(max_r) };
    Ok(run_ensemble(&config)?.correlation.expect("requested"))
}

fn mean_and_error(samples: &[[f64; 4]]) -> ([f64; 4], [f64; 4]) {
    let n = samples.len() as f64;
    let mut mean = [0.0; 4];
    for s in samples {
        for c in 0..4 {
            mean[c] += s[c];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut error = [f64::NAN; 4];
    if samples.len() > 1 {
        for c in 0..4 {
            let ss: f64 = samples.iter().map(|s| (s[c] - mean[c]).powi(2)).sum();
            error[c] = (ss / (n - 1.0) / n).sqrt();
        }
    }
    (mean, error)
}

/// Least-squares slope of ln v against ln d; `None` for fewer than two points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(d, v)| (d.ln(), v.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
