use std::f64::consts::{PI, TAU};

use patchnoise::kernel::{field_at, kernel, kernel_gradient, propagate_potential};
use patchnoise::quadrature::{adaptive, Tolerance};
use patchnoise::{BoundaryGrid, KernelPoint, Length};

fn k(x: f64, y: f64, z: f64) -> f64 {
    kernel(KernelPoint::new(x, y, z).unwrap())
}

#[test]
fn poisson_kernel_is_normalized() {
    // Polar quadrature on the disk r < R, analytic tail y/√(R²+y²) outside.
    let (y, r_max) = (1.0, 50.0);
    let tol = Tolerance::relative(1e-11);
    let radial = |theta: f64| {
        adaptive(|r: f64| r * k(r * theta.cos(), y, r * theta.sin()), &[0.0, y, 10.0 * y, r_max], tol).unwrap().value
    };
    let inner = adaptive(radial, &[0.0, PI, TAU], tol).unwrap().value / TAU;
    let tail = y / (r_max * r_max + y * y).sqrt();
    assert!((inner + tail - 1.0).abs() < 1e-6, "{}", inner + tail);
}

/// Integral of the kernel over the rectangle [x0, x1] × [z0, z1] seen from
/// height y above the origin: the solid angle of the rectangle.
fn rectangle_solid_angle(x0: f64, x1: f64, z0: f64, z1: f64, y: f64) -> f64 {
    let f = |u: f64, v: f64| (u * v / (y * (u * u + v * v + y * y).sqrt())).atan();
    f(x1, z1) - f(x0, z1) - f(x1, z0) + f(x0, z0)
}

#[test]
fn square_patch_matches_direct_convolution() {
    let (n, h) = (64usize, 1.0);
    let l = n as f64 * h;
    let a = 4.0 * h;
    let first = 30usize;
    let inside = |i: usize| (first..first + 4).contains(&i);
    let boundary = BoundaryGrid::from_fn(n, n, h, |x, z| {
        let (ix, iz) = ((x / h).round() as usize, (z / h).round() as usize);
        if inside(ix) && inside(iz) {
            1.0
        } else {
            0.0
        }
    })
    .unwrap();
    let phi = propagate_potential(&boundary, Length::new(a).unwrap());

    // Periodic images within |m| ≤ M, then the far field as a uniform sheet
    // of the same mean potential outside the image box.
    let images = 3i32;
    let mean = 16.0 / (n * n) as f64;
    let centre = (first as f64 + 1.5) * h;
    let half_box = (images as f64 + 0.5) * l;
    let direct = |ix: usize, iz: usize| {
        let (x, z) = (ix as f64 * h, iz as f64 * h);
        let mut sum = 0.0;
        for mx in -images..=images {
            for mz in -images..=images {
                for px in first..first + 4 {
                    for pz in first..first + 4 {
                        let sx = px as f64 * h + mx as f64 * l;
                        let sz = pz as f64 * h + mz as f64 * l;
                        sum += k(x - sx, a, z - sz) * h * h;
                    }
                }
            }
        }
        let near = rectangle_solid_angle(
            centre - half_box - x,
            centre + half_box - x,
            centre - half_box - z,
            centre + half_box - z,
            a,
        );
        sum / TAU + mean * (1.0 - near / TAU)
    };
    let mut worst: f64 = 0.0;
    for ix in (first - 8)..(first + 12) {
        for iz in (first - 8)..(first + 12) {
            let want = direct(ix, iz);
            worst = worst.max((phi.at(ix, iz) - want).abs() / want);
        }
    }
    assert!(worst < 1e-3, "worst relative error {worst}");
}

#[test]
fn field_matches_finite_differences_of_potential() {
    let (n, h) = (128usize, 0.05);
    let l = n as f64 * h;
    let bump = |x: f64, z: f64, cx: f64, cz: f64, w: f64| {
        let dx = (x - cx + l / 2.0).rem_euclid(l) - l / 2.0;
        let dz = (z - cz + l / 2.0).rem_euclid(l) - l / 2.0;
        (-(dx * dx + dz * dz) / (2.0 * w * w)).exp()
    };
    let b = BoundaryGrid::from_fn(n, n, h, |x, z| bump(x, z, 2.0, 3.0, 0.6) - 0.7 * bump(x, z, 4.5, 1.5, 0.8)).unwrap();
    let y = 0.3;
    let e = field_at(&b, Length::new(y).unwrap());

    let dy = 1e-4;
    let up = propagate_potential(&b, Length::new(y + dy).unwrap());
    let down = propagate_potential(&b, Length::new(y - dy).unwrap());
    let here = propagate_potential(&b, Length::new(y).unwrap());

    let scale = e.ey.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = [0.0f64; 3];
    for ix in 0..n {
        for iz in 0..n {
            let (i, j) = (ix as isize, iz as isize);
            // Fourth-order central differences on the grid.
            let d4 = |f: &dyn Fn(isize) -> f64| (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h);
            let ex = -d4(&|s| here.at_wrapped(i + s, j));
            let ez = -d4(&|s| here.at_wrapped(i, j + s));
            let ey = -(up.at(ix, iz) - down.at(ix, iz)) / (2.0 * dy);
            worst[0] = worst[0].max((e.ex.at(ix, iz) - ex).abs() / scale);
            worst[1] = worst[1].max((e.ey.at(ix, iz) - ey).abs() / scale);
            worst[2] = worst[2].max((e.ez.at(ix, iz) - ez).abs() / scale);
        }
    }
    assert!(worst.iter().all(|&w| w < 1e-4), "{worst:?}");
}

/// Σ h² f(x_i, z_j) w(k x_i) over a grid centred on the origin.
fn transform(n: usize, h: f64, k: f64, w: fn(f64) -> f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let coords: Vec<f64> = (0..n).map(|i| (i as f64 - (n / 2) as f64) * h).collect();
    let mut sum = 0.0;
    for &x in &coords {
        let weight = w(k * x);
        for &z in &coords {
            sum += f(x, z) * weight;
        }
    }
    sum * h * h
}

#[test]
fn kernel_transform_is_exponential_in_wavenumber() {
    let d = 1.0;
    let (n, h) = (1024usize, d / 16.0);
    let l = n as f64 * h;
    let grad = |x: f64, z: f64| kernel_gradient(KernelPoint::new(x, d, z).unwrap());
    for kd in [0.5, 1.0, 2.0, 5.0] {
        // Nearest lattice wavenumber keeps the truncated box periodic.
        let k = (kd / d * l / TAU).round() * TAU / l;
        let want = TAU * (-k * d).exp();
        let ft_k = transform(n, h, k, f64::cos, |x, z| kernel(KernelPoint::new(x, d, z).unwrap()));
        assert!((ft_k / want - 1.0).abs() < 1e-3, "kd={kd}: {ft_k} vs {want}");

        // ∂x K is odd in x, so only the sine part survives: −k·2π e^(−kd).
        let gx = transform(n, h, k, f64::sin, |x, z| grad(x, z)[0]);
        let gy = transform(n, h, k, f64::cos, |x, z| grad(x, z)[1]);
        let power = gx * gx + gy * gy;
        let expected = 2.0 * k * k * want * want;
        assert!((power / expected - 1.0).abs() < 1e-3, "kd={kd}: {power} vs {expected}");
    }
}
