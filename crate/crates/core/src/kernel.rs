//! The half-space Dirichlet problem for the Laplace equation.
//!
//! A boundary potential φ₀(x, z) on the plane y = 0 determines the potential
//! above it through the Poisson kernel K(x, y, z) = y / (x² + y² + z²)^(3/2):
//!
//! ```text
//! φ(x, y, z) = (1/2π) ∬ φ₀(u, v) K(u − x, y, v − z) du dv
//! ```
//!
//! In Fourier space this is multiplication by e^(−y|k|), which is what the
//! grid propagator does on a periodic (toroidal) grid.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft2::{wavenumbers, Fft2};
use crate::quantities::Length;
use crate::scalar::Scalar;

/// A point strictly above the boundary plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPoint<T> {
    pub x: T,
    y: T,
    pub z: T,
}

impl<T: Scalar> KernelPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::Domain(format!("kernel point ({x}, {y}, {z}) is not finite")));
        }
        if y <= T::zero() {
            return Err(Error::Domain(format!("kernel height must be positive, got y = {y}")));
        }
        Ok(Self { x, y, z })
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn scaled(self, factor: T) -> Result<Self> {
        Self::new(self.x * factor, self.y * factor, self.z * factor)
    }
}

/// K(x, y, z) = y / r³, in 1/m².
pub fn kernel<T: Scalar>(p: KernelPoint<T>) -> T {
    let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    p.y / (r2 * r2.sqrt())
}

/// ∇K = (−3xy, r² − 3y², −3zy) / r⁵, in 1/m³.
pub fn kernel_gradient<T: Scalar>(p: KernelPoint<T>) -> [T; 3] {
    let r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    let r5 = r2 * r2 * r2.sqrt();
    let three = T::lit(3.0);
    [-three * p.x * p.y / r5, (r2 - three * p.y * p.y) / r5, -three * p.z * p.y / r5]
}

/// Uniform sampling of a scalar on the (x, z) plane, row-major with z fastest.
/// Node (ix, iz) sits at (ix·spacing, iz·spacing); the grid is periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    nx: usize,
    nz: usize,
    spacing: T,
    values: Vec<T>,
}

/// Boundary potential φ₀ in volts.
pub type BoundaryGrid<T> = Grid<T>;
/// Potential (V) or one field component (V/m) at a fixed height.
pub type FieldGrid<T> = Grid<T>;

impl<T: Scalar> Grid<T> {
    pub fn new(nx: usize, nz: usize, spacing: T, values: Vec<T>) -> Result<Self> {
        if nx < 2 || nz < 2 {
            return Err(Error::Grid(format!("grid must be at least 2×2, got {nx}×{nz}")));
        }
        if !(spacing.is_finite() && spacing > T::zero()) {
            return Err(Error::Grid(format!("spacing must be positive, got {spacing}")));
        }
        if values.len() != nx * nz {
            return Err(Error::Grid(format!("expected {} samples, got {}", nx * nz, values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("sample ({}, {}) is not finite", i / nz, i % nz)));
        }
        Ok(Self { nx, nz, spacing, values })
    }

    pub fn from_fn(nx: usize, nz: usize, spacing: T, mut f: impl FnMut(T, T) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * nz);
        for ix in 0..nx {
            for iz in 0..nz {
                values.push(f(T::from_count(ix) * spacing, T::from_count(iz) * spacing));
            }
        }
        Self::new(nx, nz, spacing, values)
    }

    pub fn constant(nx: usize, nz: usize, spacing: T, value: T) -> Result<Self> {
        Self::new(nx, nz, spacing, vec![value; nx * nz])
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.nz)
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn extent(&self) -> (T, T) {
        (T::from_count(self.nx) * self.spacing, T::from_count(self.nz) * self.spacing)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iz: usize) -> T {
        self.values[ix * self.nz + iz]
    }

    /// Value at integer offsets from (ix, iz), wrapping periodically.
    pub fn at_wrapped(&self, ix: isize, iz: isize) -> T {
        let x = ix.rem_euclid(self.nx as isize) as usize;
        let z = iz.rem_euclid(self.nz as isize) as usize;
        self.at(x, z)
    }

    pub fn mean(&self) -> T {
        self.values.iter().fold(T::zero(), |s, &v| s + v) / T::from_count(self.values.len())
    }

    /// Population variance over all nodes.
    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.values.iter().fold(T::zero(), |s, &v| s + (v - mean) * (v - mean)) / T::from_count(self.values.len())
    }

    pub fn min_max(&self) -> (T, T) {
        self.values.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.nx == other.nx && self.nz == other.nz && self.spacing == other.spacing
    }

    /// Multiplies every node by `factor`.
    pub fn scale(mut self, factor: T) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self
    }
}

/// The three Cartesian components of E = −∇φ on one horizontal grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectricField<T> {
    pub ex: FieldGrid<T>,
    pub ey: FieldGrid<T>,
    pub ez: FieldGrid<T>,
}

impl<T: Scalar> ElectricField<T> {
    pub fn components(&self) -> [&FieldGrid<T>; 3] {
        [&self.ex, &self.ey, &self.ez]
    }

    /// Spatial variance of each component and of |E|².
    pub fn variances(&self) -> [T; 4] {
        let [x, y, z] = self.components().map(Grid::variance);
        [x, y, z, x + y + z]
    }
}

/// Fourier transform of a boundary potential, reusable for many heights.
#[derive(Clone)]
pub struct BoundarySpectrum<T: Scalar> {
    nx: usize,
    nz: usize,
    spacing: T,
    kx: Vec<T>,
    kz: Vec<T>,
    coefficients: Vec<Complex<T>>,
    plan: Fft2<T>,
}

impl<T: Scalar> BoundarySpectrum<T> {
    pub fn new(boundary: &BoundaryGrid<T>) -> Self {
        let (nx, nz) = boundary.shape();
        let plan = Fft2::new(nx, nz);
        let mut coefficients: Vec<_> = boundary.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
        plan.forward(&mut coefficients);
        Self {
            nx,
            nz,
            spacing: boundary.spacing(),
            kx: wavenumbers(nx, boundary.spacing()),
            kz: wavenumbers(nz, boundary.spacing()),
            coefficients,
            plan,
        }
    }

    /// Σ |φ̂(k)|² · weight(kx, kz, |k|) / (nx·nz)², i.e. the spatial mean of
    /// the field whose spectral multiplier squared is `weight`.
    pub fn weighted_power(&self, weight: impl Fn(T, T, T) -> T) -> T {
        let norm = T::from_count(self.nx * self.nz);
        let mut total = T::zero();
        for (ix, &kx) in self.kx.iter().enumerate() {
            for (iz, &kz) in self.kz.iter().enumerate() {
                let c = self.coefficients[ix * self.nz + iz];
                total += c.norm_sqr() * weight(kx, kz, (kx * kx + kz * kz).sqrt());
            }
        }
        total / (norm * norm)
    }

    /// Spatial variances of (Ex, Ey, Ez, |E|²) at `height` by Parseval's
    /// theorem; equal to `self.field(height).variances()` without the inverse
    /// transforms.
    pub fn field_variances(&self, height: Length<T>) -> [T; 4] {
        let y = height.get();
        let two = T::lit(2.0);
        let (nyq_x, nyq_z) = (nyquist(self.nx), nyquist(self.nz));
        let norm = T::from_count(self.nx * self.nz);
        let mut acc = [T::zero(); 3];
        for (ix, &kx) in self.kx.iter().enumerate() {
            for (iz, &kz) in self.kz.iter().enumerate() {
                let k2 = kx * kx + kz * kz;
                let p = self.coefficients[ix * self.nz + iz].norm_sqr() * (-two * y * k2.sqrt()).exp();
                if Some(ix) != nyq_x {
                    acc[0] += p * kx * kx;
                }
                acc[1] += p * k2;
                if Some(iz) != nyq_z {
                    acc[2] += p * kz * kz;
                }
            }
        }
        let [x, y, z] = acc.map(|a| a / (norm * norm));
        [x, y, z, x + y + z]
    }

    /// Circular autocorrelation (1/N)·Σ φ(u)·φ(u + r) for every grid offset
    /// r, in FFT ordering. The mean is not removed.
    pub fn autocorrelation(&self) -> FieldGrid<T> {
        let mut data: Vec<_> = self.coefficients.iter().map(|c| Complex::new(c.norm_sqr(), T::zero())).collect();
        self.plan.inverse(&mut data);
        let n = T::from_count(self.nx * self.nz);
        let values = data.into_iter().map(|c| c.re / (n * n)).collect();
        Grid { nx: self.nx, nz: self.nz, spacing: self.spacing, values }
    }

    /// Power spectrum |φ̂|² in FFT ordering, unnormalized.
    pub fn power(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    fn apply(&self, multiplier: impl Fn(usize, usize, T, T, T) -> Complex<T>) -> FieldGrid<T> {
        let mut data = self.coefficients.clone();
        for (ix, &kx) in self.kx.iter().enumerate() {
            for (iz, &kz) in self.kz.iter().enumerate() {
                let k = (kx * kx + kz * kz).sqrt();
                data[ix * self.nz + iz] = data[ix * self.nz + iz] * multiplier(ix, iz, kx, kz, k);
            }
        }
        self.plan.inverse(&mut data);
        let norm = T::one() / T::from_count(self.nx * self.nz);
        let values = data.into_iter().map(|c| c.re * norm).collect();
        Grid { nx: self.nx, nz: self.nz, spacing: self.spacing, values }
    }

    /// Potential at `height`: multiplier e^(−y|k|). The k = 0 mode (grid mean)
    /// passes through unchanged.
    pub fn potential(&self, height: Length<T>) -> FieldGrid<T> {
        let y = height.get();
        self.apply(|_, _, _, _, k| Complex::new((-y * k).exp(), T::zero()))
    }

    /// E = −∇φ at `height`. The odd x- and z-derivatives drop the Nyquist
    /// bin so that the result stays real.
    pub fn field(&self, height: Length<T>) -> ElectricField<T> {
        let y = height.get();
        let (nyq_x, nyq_z) = (nyquist(self.nx), nyquist(self.nz));
        let ex = self.apply(|ix, _, kx, _, k| {
            if Some(ix) == nyq_x {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::zero(), -kx * (-y * k).exp())
            }
        });
        let ey = self.apply(|_, _, _, _, k| Complex::new(k * (-y * k).exp(), T::zero()));
        let ez = self.apply(|_, iz, _, kz, k| {
            if Some(iz) == nyq_z {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::zero(), -kz * (-y * k).exp())
            }
        });
        ElectricField { ex, ey, ez }
    }
}

fn nyquist(n: usize) -> Option<usize> {
    (n % 2 == 0).then_some(n / 2)
}

/// Lifts a boundary potential to `height` through the spectral multiplier
/// e^(−y|k|) on the periodic grid.
pub fn propagate_potential<T: Scalar>(boundary: &BoundaryGrid<T>, height: Length<T>) -> FieldGrid<T> {
    BoundarySpectrum::new(boundary).potential(height)
}

/// Electric field E = −∇φ at `height` by spectral differentiation.
pub fn field_at<T: Scalar>(boundary: &BoundaryGrid<T>, height: Length<T>) -> ElectricField<T> {
    BoundarySpectrum::new(boundary).field(height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn point(x: f64, y: f64, z: f64) -> KernelPoint<f64> {
        KernelPoint::new(x, y, z).unwrap()
    }

    #[test]
    fn on_axis_kernel_is_inverse_square() {
        for y in [0.1, 1.0, 7.5] {
            assert_relative_eq!(kernel(point(0.0, y, 0.0)), 1.0 / (y * y), max_relative = 1e-15);
        }
    }

    #[test]
    fn kernel_rejects_surface_and_below() {
        assert!(KernelPoint::new(1.0, 0.0, 0.0).is_err());
        assert!(KernelPoint::new(1.0, -1.0, 0.0).is_err());
        assert!(KernelPoint::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn kernel_scales_as_inverse_square() {
        let p = point(1.0, 2.0, 1.0);
        let scaled = p.scaled(3.0).unwrap();
        assert_relative_eq!(kernel(scaled), kernel(p) / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn on_axis_gradient() {
        let y = 2.0;
        let g = kernel_gradient(point(0.0, y, 0.0));
        assert_eq!(g[0], 0.0);
        assert_eq!(g[2], 0.0);
        assert_relative_eq!(g[1], -2.0 / (y * y * y), max_relative = 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (x, y, z) = (0.3, 1.0, -0.7);
        let h = 1e-6;
        let g = kernel_gradient(point(x, y, z));
        let fd = [
            (kernel(point(x + h, y, z)) - kernel(point(x - h, y, z))) / (2.0 * h),
            (kernel(point(x, y + h, z)) - kernel(point(x, y - h, z))) / (2.0 * h),
            (kernel(point(x, y, z + h)) - kernel(point(x, y, z - h))) / (2.0 * h),
        ];
        for i in 0..3 {
            assert_relative_eq!(g[i], fd[i], max_relative = 1e-6);
        }
    }

    #[test]
    fn gradient_at_unit_height_has_polar_form() {
        let (u, phi) = (1.0_f64, std::f64::consts::FRAC_PI_4);
        let g = kernel_gradient(point(u * phi.cos(), 1.0, u * phi.sin()));
        let denom = (1.0 + u * u).powf(2.5);
        assert_relative_eq!(g[0], -3.0 * u * phi.cos() / denom, max_relative = 1e-14);
        assert_relative_eq!(g[1], (u * u - 2.0) / denom, max_relative = 1e-14);
        assert_relative_eq!(g[2], -3.0 * u * phi.sin() / denom, max_relative = 1e-14);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::new(1, 4, 1.0, vec![0.0; 4]).is_err());
        assert!(Grid::new(2, 2, 0.0, vec![0.0; 4]).is_err());
        assert!(Grid::new(2, 2, 1.0, vec![0.0; 3]).is_err());
        let err = Grid::new(2, 2, 1.0, vec![0.0, 1.0, f64::NAN, 0.0]).unwrap_err();
        assert!(err.to_string().contains("(1, 0)"), "{err}");
    }

    #[test]
    fn uniform_boundary_propagates_unchanged_with_no_field() {
        let b = Grid::constant(16, 16, 0.1, 2.5f64).unwrap();
        let h = Length::new(0.7).unwrap();
        let phi = propagate_potential(&b, h);
        assert!(phi.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        let e = field_at(&b, h);
        for c in e.components() {
            assert!(c.values().iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn single_mode_decays_exponentially() {
        let (n, h) = (64, 0.05);
        let l = n as f64 * h;
        let k = std::f64::consts::TAU / l * 8.0;
        let b = Grid::from_fn(n, n, h, |x, _| (k * x).cos()).unwrap();
        let y = 0.2;
        let phi = propagate_potential(&b, Length::new(y).unwrap());
        let amp = (-y * k).exp();
        for ix in 0..n {
            let want = amp * (k * ix as f64 * h).cos();
            assert!((phi.at(ix, 3) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_field_matches_analytic_derivative() {
        let (n, h) = (64, 0.05);
        let l = n as f64 * h;
        let k = std::f64::consts::TAU / l * 8.0;
        let v0 = 1.7;
        let b = Grid::from_fn(n, n, h, |x, _| v0 * (k * x).cos()).unwrap();
        let y = 0.2;
        let e = field_at(&b, Length::new(y).unwrap());
        let amp = v0 * k * (-y * k).exp();
        for ix in 0..n {
            let x = ix as f64 * h;
            // φ = V₀ e^(−ky) cos kx  ⇒  Ex = V₀ k e^(−ky) sin kx, Ey = V₀ k e^(−ky) cos kx
            assert_relative_eq!(e.ex.at(ix, 5), amp * (k * x).sin(), epsilon = 1e-10 * amp);
            assert_relative_eq!(e.ey.at(ix, 5), amp * (k * x).cos(), epsilon = 1e-10 * amp);
            assert!(e.ez.at(ix, 5).abs() < 1e-10 * amp);
        }
        // |E| = k e^(−ky) V₀ at every node; the rms of each component is amp/√2.
        assert_relative_eq!(e.ex.variance().sqrt(), amp / 2f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn propagator_composes_heights() {
        let b = Grid::from_fn(32, 32, 0.1, |x: f64, z: f64| (3.0 * x).sin() * (2.0 * z).cos() + (x * z).sin()).unwrap();
        let (y1, y2) = (Length::new(0.15).unwrap(), Length::new(0.35).unwrap());
        let two_step = propagate_potential(&propagate_potential(&b, y1), y2);
        let one_step = propagate_potential(&b, Length::new(0.5).unwrap());
        for (a, c) in two_step.values().iter().zip(one_step.values()) {
            assert!((a - c).abs() < 1e-13);
        }
    }

    #[test]
    fn parseval_variances_match_field_grids() {
        let b = Grid::from_fn(32, 16, 0.1, |x: f64, z: f64| (3.0 * x).sin() * (5.0 * z).cos() + (x * z).sin()).unwrap();
        let spectrum = BoundarySpectrum::new(&b);
        for y in [0.05, 0.3] {
            let h = Length::new(y).unwrap();
            let direct = spectrum.field(h).variances();
            let parseval = spectrum.field_variances(h);
            for (a, c) in direct.iter().zip(parseval) {
                assert_relative_eq!(*a, c, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn autocorrelation_at_zero_offset_is_mean_square() {
        let b = Grid::from_fn(16, 16, 0.1, |x: f64, z: f64| 0.3 + (7.0 * x).cos() * (2.0 * z).sin()).unwrap();
        let c = BoundarySpectrum::new(&b).autocorrelation();
        let mean_square = b.values().iter().map(|v| v * v).sum::<f64>() / 256.0;
        assert_relative_eq!(c.at(0, 0), mean_square, max_relative = 1e-12);
        let shifted = (0..16)
            .flat_map(|i| (0..16).map(move |j| (i, j)))
            .map(|(i, j)| b.at(i, j) * b.at_wrapped(i as isize + 3, j as isize - 2))
            .sum::<f64>()
            / 256.0;
        assert_relative_eq!(c.at(3, 14), shifted, max_relative = 1e-10);
    }

    #[test]
    fn works_in_single_precision() {
        let b = Grid::<f32>::from_fn(16, 16, 0.1, |x, _| (x * 2.0).cos()).unwrap();
        let e = field_at(&b, Length::new(0.2).unwrap());
        assert!(e.ey.values().iter().all(|v| v.is_finite()));
    }
}
