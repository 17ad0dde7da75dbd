use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

/// Row-major 2D FFT over an `nx × nz` array (z is the fast axis).
/// The inverse is unnormalized, as in rustfft.
#[derive(Clone)]
pub(crate) struct Fft2<T: Scalar> {
    nx: usize,
    nz: usize,
    rows_fwd: Arc<dyn Fft<T>>,
    rows_inv: Arc<dyn Fft<T>>,
    cols_fwd: Arc<dyn Fft<T>>,
    cols_inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> Fft2<T> {
    pub fn new(nx: usize, nz: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            nz,
            rows_fwd: planner.plan_fft_forward(nz),
            rows_inv: planner.plan_fft_inverse(nz),
            cols_fwd: planner.plan_fft_forward(nx),
            cols_inv: planner.plan_fft_inverse(nx),
        }
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.rows_fwd, &self.cols_fwd);
    }

    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.rows_inv, &self.cols_inv);
    }

    fn run(&self, data: &mut [Complex<T>], rows: &Arc<dyn Fft<T>>, cols: &Arc<dyn Fft<T>>) {
        let (nx, nz) = (self.nx, self.nz);
        assert_eq!(data.len(), nx * nz);
        rows.process(data);
        let mut transposed = vec![Complex::new(T::zero(), T::zero()); nx * nz];
        transpose(data, &mut transposed, nx, nz);
        cols.process(&mut transposed);
        transpose(&transposed, data, nz, nx);
    }
}

fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    const BLOCK: usize = 32;
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Angular wavenumbers of a length-`n` DFT with sample spacing `h`.
pub(crate) fn wavenumbers<T: Scalar>(n: usize, h: T) -> Vec<T> {
    let scale = T::TAU() / (T::from_count(n) * h);
    (0..n)
        .map(|i| {
            let signed = if i <= (n - 1) / 2 { i as f64 } else { i as f64 - n as f64 };
            T::lit(signed) * scale
        })
        .collect()
}
