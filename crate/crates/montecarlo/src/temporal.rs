//! Time-dependent patches: every cell potential follows an independent
//! Ornstein–Uhlenbeck process and the field spectrum at probe points is
//! compared with the potential spectrum.

use std::f64::consts::TAU;

use patchnoise::kernel::field_at;
use patchnoise::{BoundaryGrid, Length};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{stream, TEMPORAL_STREAMS};
use crate::tessellation::PatchTessellation;

pub const MIN_STEPS: usize = 1 << 14;
/// Largest allowed ou_rate·dt.
pub const MAX_RATE_STEP: f64 = 0.1;
/// Analysis frequencies span one decade, rate·10^(−1/2) … rate·10^(1/2).
const ANALYSIS_POINTS: usize = 5;
/// Frequency bins averaged around each analysis frequency (±20%).
const BAND: f64 = 1.2;
/// Minimum Welch bins below the lowest analysis frequency.
const MIN_BINS: f64 = 8.0;
const PROBES_PER_SIDE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalSpec {
    /// Probe height d, m.
    pub height: f64,
    /// OU relaxation rate, 1/s; 0 freezes the potentials.
    pub ou_rate: f64,
    pub steps: usize,
    /// Time step, s.
    pub dt: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRatio {
    /// rad/s
    pub omega: f64,
    /// One-sided S_Ey averaged over probes, (V/m)²/Hz.
    pub s_e: f64,
    /// One-sided S_V averaged over cells, V²/Hz.
    pub s_v: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalReport {
    pub spec: TemporalSpec,
    pub probes: usize,
    /// Mean over probes of Σ_i g_i², the ratio S_E/S_V implied by the
    /// transfer weights.
    pub expected_ratio: f64,
    /// Empty when the potentials are frozen.
    pub ratios: Vec<SpectralRatio>,
    /// max |ratio/mean(ratio) − 1| over the analysis frequencies.
    pub flatness: Option<f64>,
    /// Correlation coefficient of the first two cells' traces and its
    /// expected standard deviation under independence.
    pub cross_correlation: Option<(f64, f64)>,
    /// Largest |E_y(probe, final step) − E_y(static)| relative to the largest
    /// static probe field.
    pub frozen_mismatch: f64,
}

/// Welch segment length for `steps` samples: the largest power of two not
/// above steps/8.
fn segment_length(steps: usize) -> usize {
    1usize << (steps / 8).max(2).ilog2()
}

pub fn temporal_factorization_check(t: &PatchTessellation, spec: TemporalSpec) -> Result<TemporalReport> {
    let TemporalSpec { height, ou_rate, steps, dt, seed } = spec;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    if !(ou_rate >= 0.0 && ou_rate * dt < MAX_RATE_STEP) {
        return Err(invalid("ou_rate", format!("need 0 <= rate*dt < {MAX_RATE_STEP}, got {}", ou_rate * dt)));
    }
    if steps < MIN_STEPS {
        return Err(invalid("steps", format!("need at least {MIN_STEPS}, got {steps}")));
    }
    let segment = segment_length(steps);
    let bin = TAU / (segment as f64 * dt);
    let targets: Vec<f64> = if ou_rate > 0.0 {
        (0..ANALYSIS_POINTS).map(|j| ou_rate * 10f64.powf(j as f64 / (ANALYSIS_POINTS - 1) as f64 - 0.5)).collect()
    } else {
        Vec::new()
    };
    if let Some(&lowest) = targets.first() {
        if lowest / BAND < MIN_BINS * bin {
            let needed_segment = MIN_BINS * BAND * TAU / (lowest * dt);
            let needed = 8 * (needed_segment.log2().ceil().exp2() as usize);
            return Err(invalid(
                "steps",
                format!(
                    "{steps} steps resolve only {bin:e} rad/s; need at least {needed} for omega = {lowest:e} rad/s"
                ),
            ));
        }
    }

    let n = t.grid_size();
    let height = Length::new(height)?;
    let static_field = field_at(&t.boundary(), height).ey;
    let response = impulse_response(n, t.spacing(), height);
    let stride = n / PROBES_PER_SIDE.min(n);
    let probes: Vec<(usize, usize)> =
        (0..n).step_by(stride).flat_map(|i| (0..n).step_by(stride).map(move |j| (i, j))).collect();
    let weights = transfer_weights(t, &response, &probes);
    let expected_ratio =
        weights.iter().map(|g| g.iter().map(|w| w * w).sum::<f64>()).sum::<f64>() / probes.len() as f64;

    let phi = (-ou_rate * dt).exp();
    let kick = (1.0 - phi * phi).sqrt();
    let sigma = t.spec().sigma;
    let traces: Vec<Vec<f64>> = t
        .potentials()
        .par_iter()
        .enumerate()
        .map(|(i, &v0)| {
            let mut rng = stream(seed, TEMPORAL_STREAMS + i as u64);
            let mut v = v0;
            let mut trace = Vec::with_capacity(steps);
            for _ in 0..steps {
                trace.push(v);
                let xi: f64 = StandardNormal.sample(&mut rng);
                v = phi * v + sigma * kick * xi;
            }
            trace
        })
        .collect();
    let fields: Vec<Vec<f64>> = weights
        .par_iter()
        .map(|g| {
            let mut e = vec![0.0; steps];
            for (w, trace) in g.iter().zip(&traces) {
                for (acc, v) in e.iter_mut().zip(trace) {
                    *acc += w * v;
                }
            }
            e
        })
        .collect();

    let scale = probes.iter().map(|&(i, j)| static_field.at(i, j).abs()).fold(0.0, f64::max);
    let frozen_mismatch =
        probes.iter().zip(&fields).map(|(&(i, j), e)| (e[steps - 1] - static_field.at(i, j)).abs()).fold(0.0, f64::max)
            / scale;

    let mut ratios = Vec::new();
    if !targets.is_empty() {
        let s_e = mean_psd(&fields, segment, dt);
        let s_v = mean_psd(&traces, segment, dt);
        for &omega in &targets {
            let bins = (0..s_e.len()).filter(|&k| {
                let w = k as f64 * bin;
                w >= omega / BAND && w <= omega * BAND
            });
            let (mut e, mut v, mut count) = (0.0, 0.0, 0usize);
            for k in bins {
                e += s_e[k];
                v += s_v[k];
                count += 1;
            }
            let (e, v) = (e / count as f64, v / count as f64);
            ratios.push(SpectralRatio { omega, s_e: e, s_v: v, ratio: e / v });
        }
    }
    let flatness = (!ratios.is_empty()).then(|| {
        let mean = ratios.iter().map(|r| r.ratio).sum::<f64>() / ratios.len() as f64;
        ratios.iter().map(|r| (r.ratio / mean - 1.0).abs()).fold(0.0, f64::max)
    });
    let cross_correlation = (traces.len() >= 2 && phi < 1.0).then(|| {
        let r = correlation_coefficient(&traces[0], &traces[1]);
        let sigma = ((1.0 + phi * phi) / ((1.0 - phi * phi) * steps as f64)).sqrt();
        (r, sigma)
    });

    Ok(TemporalReport {
        spec,
        probes: probes.len(),
        expected_ratio,
        ratios,
        flatness,
        cross_correlation,
        frozen_mismatch,
    })
}

/// E_y at every node from a unit potential on node (0, 0).
fn impulse_response(n: usize, spacing: f64, height: Length) -> BoundaryGrid {
    let mut values = vec![0.0; n * n];
    values[0] = 1.0;
    let delta = BoundaryGrid::new(n, n, spacing, values).expect("valid grid");
    field_at(&delta, height).ey
}

/// g[p][i]: E_y at probe p per volt on cell i.
fn transfer_weights(t: &PatchTessellation, response: &BoundaryGrid, probes: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let n = t.grid_size() as isize;
    probes
        .par_iter()
        .map(|&(pi, pj)| {
            let mut g = vec![0.0; t.cell_count()];
            for (q, &cell) in t.cell_ids().iter().enumerate() {
                let (qi, qj) = ((q as isize) / n, (q as isize) % n);
                g[cell as usize] += response.at_wrapped(pi as isize - qi, pj as isize - qj);
            }
            g
        })
        .collect()
}

/// One-sided Welch estimate (Hann window, 50% overlap) averaged over traces.
fn mean_psd(traces: &[Vec<f64>], segment: usize, dt: f64) -> Vec<f64> {
    let fft = FftPlanner::<f64>::new().plan_fft_forward(segment);
    let window: Vec<f64> = (0..segment).map(|i| 0.5 - 0.5 * (TAU * i as f64 / segment as f64).cos()).collect();
    let norm = 2.0 * dt / window.iter().map(|w| w * w).sum::<f64>();
    let half = segment / 2 + 1;
    let per_trace: Vec<Vec<f64>> = traces
        .par_iter()
        .map(|trace| {
            let mut psd = vec![0.0; half];
            let mut buffer = vec![Complex::new(0.0, 0.0); segment];
            let mut count = 0usize;
            let mut start = 0;
            while start + segment <= trace.len() {
                let chunk = &trace[start..start + segment];
                let mean = chunk.iter().sum::<f64>() / segment as f64;
                for ((b, &x), w) in buffer.iter_mut().zip(chunk).zip(&window) {
                    *b = Complex::new((x - mean) * w, 0.0);
                }
                fft.process(&mut buffer);
                for (p, b) in psd.iter_mut().zip(&buffer) {
                    *p += b.norm_sqr() * norm;
                }
                count += 1;
                start += segment / 2;
            }
            psd.iter_mut().for_each(|p| *p /= count as f64);
            psd
        })
        .collect();
    let mut mean = vec![0.0; half];
    for psd in &per_trace {
        for (m, p) in mean.iter_mut().zip(psd) {
            *m += p;
        }
    }
    mean.iter_mut().for_each(|m| *m /= per_trace.len() as f64);
    mean
}

fn correlation_coefficient(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}
