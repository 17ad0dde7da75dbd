//! Periodic Poisson–Voronoi tilings of a square boundary with one Gaussian
//! potential per cell.

use patchnoise::BoundaryGrid;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::stream;

/// Nodes per mean seed spacing 1/√λ needed to resolve a cell.
pub const NODES_PER_CELL_WIDTH: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TessellationSpec {
    /// Side L of the periodic square, m.
    pub side: f64,
    /// Seed intensity λ, m⁻².
    pub intensity: f64,
    /// Standard deviation σ_V of the cell potentials, V.
    pub sigma: f64,
    pub seed: u64,
}

impl TessellationSpec {
    pub fn new(side: f64, intensity: f64, sigma: f64, seed: u64) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(invalid("side", format!("must be positive, got {side}")));
        }
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(invalid("intensity", format!("must be positive, got {intensity}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be non-negative, got {sigma}")));
        }
        Ok(Self { side, intensity, sigma, seed })
    }

    /// λ·L².
    pub fn expected_cells(&self) -> f64 {
        self.intensity * self.side * self.side
    }

    /// 1/√λ.
    pub fn cell_width(&self) -> f64 {
        self.intensity.sqrt().recip()
    }

    /// Smallest grid that resolves the cells.
    pub fn min_grid(&self) -> usize {
        (self.side / self.max_spacing() * (1.0 - 1e-12)).ceil() as usize
    }

    pub fn max_spacing(&self) -> f64 {
        self.cell_width() / NODES_PER_CELL_WIDTH
    }

    pub fn with_sigma(self, sigma: f64) -> Result<Self> {
        Self::new(self.side, self.intensity, sigma, self.seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatchTessellation {
    spec: TessellationSpec,
    n: usize,
    seeds: Vec<(f64, f64)>,
    cells: Vec<u32>,
    potentials: Vec<f64>,
}

impl PatchTessellation {
    pub fn spec(&self) -> &TessellationSpec {
        &self.spec
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spec.side / self.n as f64
    }

    pub fn seeds(&self) -> &[(f64, f64)] {
        &self.seeds
    }

    pub fn cell_count(&self) -> usize {
        self.seeds.len()
    }

    /// Cell index of every node, row-major with z fastest.
    pub fn cell_ids(&self) -> &[u32] {
        &self.cells
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    /// Area of each cell as (nodes in the cell)·h².
    pub fn cell_areas(&self) -> Vec<f64> {
        let h2 = self.spacing() * self.spacing();
        let mut counts = vec![0usize; self.cell_count()];
        for &c in &self.cells {
            counts[c as usize] += 1;
        }
        counts.into_iter().map(|c| c as f64 * h2).collect()
    }

    /// φ₀ = Σ V_i·χ_i sampled on the grid.
    pub fn boundary(&self) -> BoundaryGrid {
        self.boundary_with(&self.potentials)
    }

    /// The same tiling carrying other cell potentials.
    pub fn boundary_with(&self, potentials: &[f64]) -> BoundaryGrid {
        assert_eq!(potentials.len(), self.cell_count(), "one potential per cell");
        let values = self.cells.iter().map(|&c| potentials[c as usize]).collect();
        BoundaryGrid::new(self.n, self.n, self.spacing(), values).expect("finite potentials on a valid grid")
    }
}

/// Draws configuration 0 of `spec` on an `n × n` grid.
pub fn generate_tessellation(spec: &TessellationSpec, n: usize) -> Result<PatchTessellation> {
    generate_configuration(spec, n, 0)
}

/// Draws configuration `index`; each index has its own random stream.
pub fn generate_configuration(spec: &TessellationSpec, n: usize, index: u64) -> Result<PatchTessellation> {
    if n < 2 {
        return Err(invalid("grid", format!("need at least 2 nodes per side, got {n}")));
    }
    let spacing = spec.side / n as f64;
    if spacing > spec.max_spacing() * (1.0 + 1e-12) {
        return Err(Error::UnderResolved { spacing, required: spec.max_spacing(), min_nodes: spec.min_grid() });
    }
    let mut rng = stream(spec.seed, index);
    let poisson = Poisson::new(spec.expected_cells()).map_err(|e| invalid("intensity", format!("{e}")))?;
    // An empty draw would leave the surface undefined; keep one cell.
    let count = (poisson.sample(&mut rng) as usize).max(1);
    let seeds: Vec<(f64, f64)> =
        (0..count).map(|_| (rng.random::<f64>() * spec.side, rng.random::<f64>() * spec.side)).collect();
    let potentials: Vec<f64> = (0..count)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            spec.sigma * z
        })
        .collect();
    let cells = assign_cells(&seeds, spec.side, n);
    Ok(PatchTessellation { spec: *spec, n, seeds, cells, potentials })
}

/// Nearest seed of every node under the periodic metric, by bucket search.
fn assign_cells(seeds: &[(f64, f64)], side: f64, n: usize) -> Vec<u32> {
    let buckets = ((seeds.len() as f64).sqrt().floor() as usize).max(1);
    let width = side / buckets as f64;
    let bucket_of = |v: f64| ((v / width) as usize).min(buckets - 1);
    let mut table: Vec<Vec<u32>> = vec![Vec::new(); buckets * buckets];
    for (i, &(x, z)) in seeds.iter().enumerate() {
        table[bucket_of(x) * buckets + bucket_of(z)].push(i as u32);
    }
    let wrap = |d: f64| d - side * (d / side).round();
    let h = side / n as f64;
    let mut cells = vec![0u32; n * n];
    for ix in 0..n {
        let x = ix as f64 * h;
        let bx = bucket_of(x) as isize;
        for iz in 0..n {
            let z = iz as f64 * h;
            let bz = bucket_of(z) as isize;
            let mut best = (f64::INFINITY, 0u32);
            let visit = |best: &mut (f64, u32), cx: isize, cz: isize| {
                let (cx, cz) = (cx.rem_euclid(buckets as isize) as usize, cz.rem_euclid(buckets as isize) as usize);
                for &i in &table[cx * buckets + cz] {
                    let (sx, sz) = seeds[i as usize];
                    let (dx, dz) = (wrap(x - sx), wrap(z - sz));
                    let r2 = dx * dx + dz * dz;
                    if r2 < best.0 || (r2 == best.0 && i < best.1) {
                        *best = (r2, i);
                    }
                }
            };
            let mut ring = 0isize;
            loop {
                if 2 * ring + 1 >= buckets as isize {
                    for cx in 0..buckets as isize {
                        for cz in 0..buckets as isize {
                            visit(&mut best, cx, cz);
                        }
                    }
                    break;
                }
                if ring == 0 {
                    visit(&mut best, bx, bz);
                } else {
                    for t in -ring..=ring {
                        visit(&mut best, bx + t, bz - ring);
                        visit(&mut best, bx + t, bz + ring);
                    }
                    for t in (-ring + 1)..ring {
                        visit(&mut best, bx - ring, bz + t);
                        visit(&mut best, bx + ring, bz + t);
                    }
                }
                // Anything outside the searched rings is at least ring·width away.
                let reach = ring as f64 * width;
                if best.0 <= reach * reach {
                    break;
                }
                ring += 1;
            }
            cells[ix * n + iz] = best.1;
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(seeds: &[(f64, f64)], side: f64, n: usize) -> Vec<u32> {
        let wrap = |d: f64| d - side * (d / side).round();
        let h = side / n as f64;
        let mut out = Vec::with_capacity(n * n);
        for ix in 0..n {
            for iz in 0..n {
                let (x, z) = (ix as f64 * h, iz as f64 * h);
                let mut best = (f64::INFINITY, 0u32);
                for (i, &(sx, sz)) in seeds.iter().enumerate() {
                    let (dx, dz) = (wrap(x - sx), wrap(z - sz));
                    let r2 = dx * dx + dz * dz;
                    if r2 < best.0 {
                        best = (r2, i as u32);
                    }
                }
                out.push(best.1);
            }
        }
        out
    }

    #[test]
    fn bucket_search_matches_brute_force() {
        for (count, seed) in [(1, 1), (2, 2), (5, 3), (37, 4), (400, 5)] {
            let spec = TessellationSpec::new(1.0, count as f64, 1.0, seed).unwrap();
            let n = spec.min_grid().max(64);
            let t = generate_tessellation(&spec, n).unwrap();
            assert_eq!(t.cell_ids(), brute_force(t.seeds(), 1.0, n).as_slice(), "count {count}");
        }
    }

    #[test]
    fn rejects_coarse_grid_with_required_spacing() {
        let spec = TessellationSpec::new(1e-5, 1e12, 1.0, 0).unwrap();
        let err = generate_tessellation(&spec, 64).unwrap_err().to_string();
        assert!(err.contains("1.25e-7"), "{err}");
        assert!(err.contains("80 nodes"), "{err}");
        assert!(generate_tessellation(&spec, 80).is_ok());
    }

    #[test]
    fn rejects_invalid_spec() {
        assert!(TessellationSpec::new(0.0, 1.0, 1.0, 0).is_err());
        assert!(TessellationSpec::new(1.0, -1.0, 1.0, 0).is_err());
        assert!(TessellationSpec::new(1.0, 1.0, f64::NAN, 0).is_err());
    }

    #[test]
    fn cell_areas_cover_the_square() {
        let spec = TessellationSpec::new(2.0, 25.0, 1.0, 9).unwrap();
        let t = generate_tessellation(&spec, 128).unwrap();
        let total: f64 = t.cell_areas().iter().sum();
        assert!((total - 4.0).abs() < 1e-12);
    }
}
