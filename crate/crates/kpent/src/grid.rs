//! Probability densities on regular grids and their Rényi entropies.
//!
//! A [`DensityGrid`] stores one nonnegative mass per cell of a uniform
//! lattice; the density of a cell is `mass / spacing^dim`. All integrals in
//! the toolkit are exact sums under this piecewise-constant model, so
//! discretization error is attributable to the model alone, never to a
//! quadrature rule on top of it.

use crate::error::{Error, Result};
use crate::linalg::{eigen_symmetric, Mat};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Cap on total cell count (fits comfortably in addressable memory).
pub const MAX_CELLS: u64 = 1 << 31;

/// Tail cutoff for gridded analytic Gaussians: the grid spans eight
/// standard deviations each way, leaving truncated mass below 1e-14.
pub const GAUSSIAN_EXTENT_SIGMAS: f64 = 8.0;

/// Geometry of a regular lattice: `shape[k]` cells of edge `spacing` per
/// axis, with the lower corner of the box at `origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>) -> Result<Self> {
        let dim = origin.len();
        if dim < 1 || dim > 3 {
            return Err(Error::InvalidGridSpec(format!(
                "dim must be 1, 2 or 3, got {dim}"
            )));
        }
        if shape.len() != dim {
            return Err(Error::InvalidGridSpec(format!(
                "shape has {} entries for dim {dim}",
                shape.len()
            )));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::InvalidGridSpec(format!("spacing {spacing} not positive")));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::InvalidGridSpec("zero-length axis".into()));
        }
        if origin.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGridSpec("non-finite origin".into()));
        }
        let cells = shape.iter().try_fold(1u64, |acc, &n| {
            acc.checked_mul(n as u64).filter(|&c| c <= MAX_CELLS)
        });
        if cells.is_none() {
            return Err(Error::InvalidGridSpec(format!(
                "cell count exceeds {MAX_CELLS}"
            )));
        }
        Ok(GridSpec {
            dim,
            origin,
            spacing,
            shape,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.shape.iter().product()
    }

    /// Volume of one cell, `spacing^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn flat_to_multi(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim];
        for k in (0..self.dim).rev() {
            idx[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        idx
    }

    pub fn multi_to_flat(&self, idx: &[usize]) -> usize {
        let mut flat = 0usize;
        for k in 0..self.dim {
            flat = flat * self.shape[k] + idx[k];
        }
        flat
    }

    /// Center of the cell with the given multi-index.
    pub fn cell_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(&self.origin)
            .map(|(&i, &o)| o + (i as f64 + 0.5) * self.spacing)
            .collect()
    }

    pub fn cell_center_flat(&self, flat: usize) -> Vec<f64> {
        self.cell_center(&self.flat_to_multi(flat))
    }

    /// Multi-index of the cell containing `point`, or None if outside.
    pub fn locate(&self, point: &[f64]) -> Option<Vec<usize>> {
        if point.len() != self.dim {
            return None;
        }
        let mut idx = vec![0usize; self.dim];
        for k in 0..self.dim {
            let t = (point[k] - self.origin[k]) / self.spacing;
            if t < 0.0 || !t.is_finite() {
                return None;
            }
            let i = t.floor() as usize;
            if i >= self.shape[k] {
                return None;
            }
            idx[k] = i;
        }
        Some(idx)
    }

    /// Upper corner of the grid box.
    pub fn upper(&self) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.shape)
            .map(|(&o, &n)| o + n as f64 * self.spacing)
            .collect()
    }

    /// A spec that spans `[lo, hi]` per axis with the given cell counts,
    /// derived from a common spacing on axis 0.
    pub fn covering(lo: &[f64], hi: &[f64], cells: &[usize]) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != cells.len() {
            return Err(Error::InvalidGridSpec("covering: length mismatch".into()));
        }
        let spacing = (hi[0] - lo[0]) / cells[0] as f64;
        for k in 1..lo.len() {
            let s = (hi[k] - lo[k]) / cells[k] as f64;
            if ((s - spacing) / spacing).abs() > 1e-9 {
                return Err(Error::InvalidGridSpec(
                    "covering requires a uniform spacing across axes".into(),
                ));
            }
        }
        GridSpec::new(lo.to_vec(), spacing, cells.to_vec())
    }
}

/// Mean and second central moments of a grid density.
#[derive(Debug, Clone)]
pub struct CovarianceSummary {
    pub mean: Vec<f64>,
    pub cov: Mat,
}

impl CovarianceSummary {
    /// Validates symmetry (1e-12) and near-PSD spectrum (>= -1e-10).
    pub fn validate(&self) -> Result<()> {
        if !self.cov.symmetric_within(1e-12) {
            return Err(Error::DegenerateCovariance("not symmetric".into()));
        }
        let (w, _) = eigen_symmetric(&self.cov);
        if w.iter().any(|&x| x < -1e-10) {
            return Err(Error::DegenerateCovariance(format!(
                "negative eigenvalue {:?}",
                w
            )));
        }
        Ok(())
    }
}

/// Piecewise-constant probability density on a regular lattice.
///
/// Instances are immutable after construction and safe to share across
/// threads; every operation is a pure function of its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    spec: GridSpec,
    mass: Vec<f64>,
}

/// Kahan-compensated sum; keeps normalization residuals near machine
/// epsilon even on multi-million-cell grids.
fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

impl DensityGrid {
    /// Builds a grid by evaluating a density function at cell centers and
    /// normalizing. Negative values are a domain error.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(spec: GridSpec, f: F) -> Result<Self> {
        let n = spec.cell_count();
        let mut mass = vec![0.0f64; n];
        let vol = spec.cell_volume();
        for (flat, m) in mass.iter_mut().enumerate() {
            let x = spec.cell_center_flat(flat);
            let v = f(&x);
            if v < 0.0 || !v.is_finite() {
                return Err(Error::NegativeDensity {
                    index: flat,
                    value: v,
                });
            }
            *m = v * vol;
        }
        let mut grid = DensityGrid { spec, mass };
        grid.normalize()?;
        Ok(grid)
    }

    /// Builds a grid from empirical samples: each cell's mass is the
    /// fraction of samples landing in it. Samples outside the grid are
    /// dropped; if all fall outside, this is an empty-support error.
    pub fn from_samples(spec: GridSpec, samples: &[Vec<f64>]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("sample source must contain >= 1 point".into()));
        }
        let mut mass = vec![0.0f64; spec.cell_count()];
        let mut inside = 0u64;
        for s in samples {
            if let Some(idx) = spec.locate(s) {
                mass[spec.multi_to_flat(&idx)] += 1.0;
                inside += 1;
            }
        }
        if inside == 0 {
            return Err(Error::EmptySupport);
        }
        let mut grid = DensityGrid { spec, mass };
        grid.normalize()?;
        Ok(grid)
    }

    /// Builds a grid directly from per-cell masses (normalizing).
    pub fn from_masses(spec: GridSpec, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != spec.cell_count() {
            return Err(Error::InvalidGridSpec(format!(
                "{} masses for {} cells",
                mass.len(),
                spec.cell_count()
            )));
        }
        if let Some((i, &v)) = mass
            .iter()
            .enumerate()
            .find(|(_, &v)| v < 0.0 || !v.is_finite())
        {
            return Err(Error::NegativeDensity { index: i, value: v });
        }
        let mut grid = DensityGrid { spec, mass };
        grid.normalize()?;
        Ok(grid)
    }

    /// Masses taken verbatim, without renormalization; the caller
    /// guarantees they already sum to 1. Used where the exact multiset of
    /// values must survive (rearrangement).
    pub(crate) fn from_masses_unchecked(spec: GridSpec, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != spec.cell_count() {
            return Err(Error::InvalidGridSpec(format!(
                "{} masses for {} cells",
                mass.len(),
                spec.cell_count()
            )));
        }
        Ok(DensityGrid { spec, mass })
    }

    /// Gridded axis-aligned Gaussian spanning eight standard deviations per
    /// axis around the mean.
    pub fn gaussian(mean: &[f64], sigma: &[f64], cells_per_axis: usize) -> Result<Self> {
        let dim = mean.len();
        if sigma.len() != dim {
            return Err(Error::Domain("mean/sigma length mismatch".into()));
        }
        if sigma.iter().any(|&s| s <= 0.0) {
            return Err(Error::Domain("sigma must be positive".into()));
        }
        // One spacing across axes: size the box by the largest sigma.
        let smax = sigma.iter().cloned().fold(0.0f64, f64::max);
        let half = GAUSSIAN_EXTENT_SIGMAS * smax;
        let spacing = 2.0 * half / cells_per_axis as f64;
        let origin: Vec<f64> = mean.iter().map(|&m| m - half).collect();
        let spec = GridSpec::new(origin, spacing, vec![cells_per_axis; dim])?;
        let mean = mean.to_vec();
        let sigma = sigma.to_vec();
        DensityGrid::from_fn(spec, move |x| {
            let q: f64 = x
                .iter()
                .zip(&mean)
                .zip(&sigma)
                .map(|((&xi, &mi), &si)| {
                    let z = (xi - mi) / si;
                    z * z
                })
                .sum();
            (-0.5 * q).exp()
        })
    }

    /// Uniform density on the box `[lo, hi]`, gridded exactly (cells align
    /// with the box edges).
    pub fn uniform_box(lo: &[f64], hi: &[f64], cells_per_axis: usize) -> Result<Self> {
        let dim = lo.len();
        if hi.len() != dim {
            return Err(Error::Domain("lo/hi length mismatch".into()));
        }
        let spacing = (hi[0] - lo[0]) / cells_per_axis as f64;
        for k in 0..dim {
            let s = (hi[k] - lo[k]) / cells_per_axis as f64;
            if ((s - spacing) / spacing).abs() > 1e-12 {
                return Err(Error::Domain(
                    "uniform_box requires equal edge lengths (uniform spacing)".into(),
                ));
            }
        }
        let spec = GridSpec::new(lo.to_vec(), spacing, vec![cells_per_axis; dim])?;
        DensityGrid::from_fn(spec, |_| 1.0)
    }

    /// Product-Laplace density with scale `b` per axis, spanning
    /// `extent_scales * b` each way.
    pub fn laplace(dim: usize, b: f64, cells_per_axis: usize) -> Result<Self> {
        if b <= 0.0 {
            return Err(Error::Domain("Laplace scale must be positive".into()));
        }
        let half = 18.0 * b;
        let spacing = 2.0 * half / cells_per_axis as f64;
        let spec = GridSpec::new(vec![-half; dim], spacing, vec![cells_per_axis; dim])?;
        DensityGrid::from_fn(spec, move |x| {
            (-x.iter().map(|v| v.abs()).sum::<f64>() / b).exp()
        })
    }

    /// Radially symmetric log-concave density `exp(-(|x|/scale)^p)` with
    /// `p in [1, 2]`, gridded on a centered box.
    pub fn radial_exp(dim: usize, p: f64, scale: f64, cells_per_axis: usize) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) || scale <= 0.0 {
            return Err(Error::Domain("radial_exp requires p in [1,2], scale > 0".into()));
        }
        // exp(-r^p) at r = 40^(1/p) scales is below e^-40.
        let half = 40f64.powf(1.0 / p) * scale;
        let spacing = 2.0 * half / cells_per_axis as f64;
        let spec = GridSpec::new(vec![-half; dim], spacing, vec![cells_per_axis; dim])?;
        DensityGrid::from_fn(spec, move |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt() / scale;
            (-r.powf(p)).exp()
        })
    }

    /// Uniform density on the centered ball of the given radius (cell
    /// centers inside the ball get equal mass).
    pub fn uniform_ball(dim: usize, radius: f64, cells_per_axis: usize) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain("radius must be positive".into()));
        }
        let spacing = 2.0 * radius / cells_per_axis as f64;
        let spec = GridSpec::new(vec![-radius; dim], spacing, vec![cells_per_axis; dim])?;
        DensityGrid::from_fn(spec, move |x| {
            if x.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spec.spacing
    }

    pub fn total_mass(&self) -> f64 {
        kahan_sum(&self.mass)
    }

    pub fn max_mass(&self) -> f64 {
        self.mass.iter().cloned().fold(0.0, f64::max)
    }

    /// Number of cells carrying positive mass.
    pub fn support_cells(&self) -> usize {
        self.mass.iter().filter(|&&m| m > 0.0).count()
    }

    /// Rescales masses to total 1. Two passes keep the residual at machine
    /// epsilon rather than the single-division rounding floor.
    pub fn normalize(&mut self) -> Result<()> {
        for _ in 0..2 {
            let total = kahan_sum(&self.mass);
            if !total.is_finite() || total <= 0.0 {
                return Err(Error::EmptySupport);
            }
            if (total - 1.0).abs() <= f64::EPSILON {
                break;
            }
            self.mass.iter_mut().for_each(|m| *m /= total);
        }
        Ok(())
    }

    fn require_normalized(&self) -> Result<()> {
        let total = self.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total));
        }
        Ok(())
    }

    /// The same masses on a translated lattice.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim() {
            return Err(Error::Domain("offset length mismatch".into()));
        }
        let origin = self
            .spec
            .origin
            .iter()
            .zip(offset)
            .map(|(&o, &d)| o + d)
            .collect();
        Ok(DensityGrid {
            spec: GridSpec::new(origin, self.spec.spacing, self.spec.shape.clone())?,
            mass: self.mass.clone(),
        })
    }

    /// Rényi entropy of order `alpha` in nats.
    ///
    /// Orders 0, 1 and infinity use their own formulas (support volume,
    /// Shannon sum with `0 log 0 = 0`, and peak density); the order-1 branch
    /// is never approximated by the generic formula near 1, which would
    /// cancel catastrophically. Masses are accumulated in sorted order so
    /// the result depends only on the multiset of cell masses, not on the
    /// cell layout.
    pub fn renyi_entropy(&self, alpha: f64) -> Result<f64> {
        self.require_normalized()?;
        if alpha < 0.0 || alpha.is_nan() {
            return Err(Error::NegativeOrder(alpha));
        }
        let d_log_h = self.spec.dim as f64 * self.spec.spacing.ln();
        if alpha == 0.0 {
            let count = self.support_cells();
            if count == 0 {
                return Err(Error::EmptySupport);
            }
            return Ok((count as f64).ln() + d_log_h);
        }
        if alpha == f64::INFINITY {
            let peak = self.max_mass();
            if peak <= 0.0 {
                return Err(Error::EmptySupport);
            }
            return Ok(-peak.ln() + d_log_h);
        }
        let mut positive: Vec<f64> = self.mass.iter().cloned().filter(|&m| m > 0.0).collect();
        if positive.is_empty() {
            return Err(Error::EmptySupport);
        }
        positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if alpha == 1.0 {
            let s: f64 = positive.iter().map(|&m| m * m.ln()).sum();
            return Ok(-s + d_log_h);
        }
        let s: f64 = positive.iter().map(|&m| m.powf(alpha)).sum();
        Ok(s.ln() / (1.0 - alpha) + d_log_h)
    }

    /// Entropy power `exp(2 h_1 / dim)`.
    pub fn entropy_power(&self) -> Result<f64> {
        Ok((2.0 * self.renyi_entropy(1.0)? / self.spec.dim as f64).exp())
    }

    /// Mean and covariance of the cell-center distribution weighted by mass.
    pub fn covariance(&self) -> Result<CovarianceSummary> {
        self.require_normalized()?;
        let d = self.spec.dim;
        let mut mean = vec![0.0f64; d];
        for (flat, &m) in self.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let x = self.spec.cell_center_flat(flat);
            for k in 0..d {
                mean[k] += m * x[k];
            }
        }
        let mut cov = Mat::zeros(d);
        for (flat, &m) in self.mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let x = self.spec.cell_center_flat(flat);
            for i in 0..d {
                for j in i..d {
                    let v = cov.get(i, j) + m * (x[i] - mean[i]) * (x[j] - mean[j]);
                    cov.set(i, j, v);
                }
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                cov.set(j, i, cov.get(i, j));
            }
        }
        let summary = CovarianceSummary { mean, cov };
        summary.validate()?;
        Ok(summary)
    }

    /// 1-D log-concavity check: second differences of log-masses over the
    /// positive support must not exceed `tol`.
    pub fn is_log_concave_1d(&self, tol: f64) -> bool {
        if self.dim() != 1 {
            return false;
        }
        let logs: Vec<Option<f64>> = self
            .mass
            .iter()
            .map(|&m| if m > 0.0 { Some(m.ln()) } else { None })
            .collect();
        // Support must be an interval for log-concavity to make sense.
        let first = logs.iter().position(|v| v.is_some());
        let last = logs.iter().rposition(|v| v.is_some());
        let (Some(a), Some(b)) = (first, last) else {
            return false;
        };
        if logs[a..=b].iter().any(|v| v.is_none()) {
            return false;
        }
        logs[a..=b]
            .windows(3)
            .all(|w| w[0].unwrap() + w[2].unwrap() - 2.0 * w[1].unwrap() <= tol)
    }

    // ── serialization ────────────────────────────────────────────────

    /// Writes the flat binary container: little-endian header
    /// (u32 dim, f64 origin per axis, f64 spacing, u64 shape per axis)
    /// followed by the cell masses as f64 in row-major order.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.spec.dim as u32).to_le_bytes())?;
        for &o in &self.spec.origin {
            w.write_all(&o.to_le_bytes())?;
        }
        w.write_all(&self.spec.spacing.to_le_bytes())?;
        for &n in &self.spec.shape {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        for &m in &self.mass {
            w.write_all(&m.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)
            .map_err(|_| Error::GridFormat("truncated header".into()))?;
        let dim = u32::from_le_bytes(b4) as usize;
        if dim < 1 || dim > 3 {
            return Err(Error::GridFormat(format!("dim {dim} out of range")));
        }
        let mut origin = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut b8)
                .map_err(|_| Error::GridFormat("truncated origin".into()))?;
            origin.push(f64::from_le_bytes(b8));
        }
        r.read_exact(&mut b8)
            .map_err(|_| Error::GridFormat("truncated spacing".into()))?;
        let spacing = f64::from_le_bytes(b8);
        let mut shape = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut b8)
                .map_err(|_| Error::GridFormat("truncated shape".into()))?;
            let n = u64::from_le_bytes(b8);
            if n == 0 || n > MAX_CELLS {
                return Err(Error::GridFormat(format!("axis length {n} out of range")));
            }
            shape.push(n as usize);
        }
        let spec = GridSpec::new(origin, spacing, shape)
            .map_err(|e| Error::GridFormat(e.to_string()))?;
        let count = spec.cell_count();
        let mut mass = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut b8)
                .map_err(|_| Error::GridFormat("truncated payload".into()))?;
            mass.push(f64::from_le_bytes(b8));
        }
        let mut tail = [0u8; 1];
        if r.read(&mut tail)? != 0 {
            return Err(Error::GridFormat("trailing bytes after payload".into()));
        }
        Ok(DensityGrid { spec, mass })
    }

    /// Saves the binary container at `path` and a JSON sidecar with the
    /// same header fields at `path` + ".json".
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(file))?;
        let sidecar = serde_json::to_string_pretty(&self.spec)?;
        let mut json_path = path.as_os_str().to_owned();
        json_path.push(".json");
        std::fs::write(json_path, sidecar)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        DensityGrid::read_binary(std::io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF_LOG_2PIE: f64 = 1.4189385332046727;

    #[test]
    fn uniform_masses_are_equal() {
        // Constant function on [0,1] with 100 cells: each mass 0.01.
        let g = DensityGrid::uniform_box(&[0.0], &[1.0], 100).unwrap();
        for &m in g.masses() {
            assert!((m - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn point_sample_concentrates_mass() {
        let spec = GridSpec::new(vec![-1.0, -1.0], 0.5, vec![4, 4]).unwrap();
        let g = DensityGrid::from_samples(spec, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(g.support_cells(), 1);
        assert!((g.max_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sample_outside_bounds_is_empty_support() {
        let spec = GridSpec::new(vec![0.0], 1.0, vec![4]).unwrap();
        let err = DensityGrid::from_samples(spec, &[vec![100.0]]).unwrap_err();
        assert!(matches!(err, Error::EmptySupport));
    }

    #[test]
    fn negative_density_fn_rejected() {
        let spec = GridSpec::new(vec![0.0], 1.0, vec![4]).unwrap();
        let err = DensityGrid::from_fn(spec, |x| -x[0]).unwrap_err();
        assert!(matches!(err, Error::NegativeDensity { .. }));
    }

    #[test]
    fn gaussian_grid_normalizes_tightly() {
        // Quadrature oracle: the truncated Gaussian on +-8 sigma carries all
        // but ~1.2e-15 of the mass, so the normalized sum must hit 1.
        let g = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 12).unwrap();
        assert!((g.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn renyi_uniform_is_log_volume() {
        let g = DensityGrid::uniform_box(&[0.0], &[1.0], 128).unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
            assert!(g.renyi_entropy(alpha).unwrap().abs() < 1e-12, "alpha {alpha}");
        }
        let g2 = DensityGrid::uniform_box(&[0.0], &[2.0], 128).unwrap();
        assert!((g2.renyi_entropy(2.0).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn renyi_gaussian_matches_closed_form() {
        let g = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 12).unwrap();
        let h1 = g.renyi_entropy(1.0).unwrap();
        assert!((h1 - HALF_LOG_2PIE).abs() < 1e-4, "h1 {h1}");
    }

    #[test]
    fn renyi_disk_support_volume() {
        let g = DensityGrid::uniform_ball(2, 1.0, 256).unwrap();
        let h0 = g.renyi_entropy(0.0).unwrap();
        // Jagged boundary: support volume converges at O(spacing).
        assert!(
            (h0 - std::f64::consts::PI.ln()).abs() < 0.02,
            "h0 {h0} vs log pi"
        );
    }

    #[test]
    fn order_monotonicity_and_translation_invariance() {
        let g = DensityGrid::gaussian(&[0.3], &[0.8], 512).unwrap();
        let alphas = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0, f64::INFINITY];
        let hs: Vec<f64> = alphas
            .iter()
            .map(|&a| g.renyi_entropy(a).unwrap())
            .collect();
        for w in hs.windows(2) {
            assert!(w[0] >= w[1] - 1e-12, "{w:?}");
        }
        let shifted = g.translated(&[17.25]).unwrap();
        for (&a, &h) in alphas.iter().zip(&hs) {
            assert_eq!(shifted.renyi_entropy(a).unwrap().to_bits(), h.to_bits());
        }
    }

    #[test]
    fn entropy_power_values() {
        let u = DensityGrid::uniform_box(&[0.0], &[1.0], 256).unwrap();
        assert!((u.entropy_power().unwrap() - 1.0).abs() < 1e-12);
        let g1 = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 12).unwrap();
        let n1 = g1.entropy_power().unwrap();
        let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
        assert!((n1 - two_pi_e).abs() / two_pi_e < 1e-3, "N {n1}");
        let g2 = DensityGrid::gaussian(&[0.0, 0.0], &[1.0, 1.0], 512).unwrap();
        let n2 = g2.entropy_power().unwrap();
        assert!((n2 - two_pi_e).abs() / two_pi_e < 1e-3, "N {n2}");
    }

    #[test]
    fn covariance_point_mass_and_uniform() {
        let spec = GridSpec::new(vec![2.0, -2.0], 0.5, vec![8, 8]).unwrap();
        let g = DensityGrid::from_samples(spec, &[vec![3.0, -1.0]]).unwrap();
        let c = g.covariance().unwrap();
        // The point lands in a cell; mean is that cell's center.
        assert!((c.mean[0] - 3.25).abs() < 1e-12);
        assert!((c.mean[1] + 0.75).abs() < 1e-12);
        assert!(c.cov.max_abs() < 1e-15);

        let u = DensityGrid::uniform_box(&[0.0], &[1.0], 1000).unwrap();
        let cu = u.covariance().unwrap();
        assert!((cu.mean[0] - 0.5).abs() < 1e-12);
        // Moment oracle: discrete uniform over cell centers has variance
        // (1 - 1/n^2)/12; at n = 1000 that is within 1e-6 of 1/12.
        assert!((cu.cov.get(0, 0) - 1.0 / 12.0).abs() < 1e-6);
    }

    #[test]
    fn covariance_gaussian_2d_near_identity() {
        let g = DensityGrid::gaussian(&[0.0, 0.0], &[1.0, 1.0], 512).unwrap();
        let c = g.covariance().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((c.cov.get(i, j) - want).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn halving_spacing_moves_entropy_little() {
        let coarse = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 9).unwrap();
        let fine = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 10).unwrap();
        for alpha in [0.5, 1.0, 2.0] {
            let dh = (coarse.renyi_entropy(alpha).unwrap()
                - fine.renyi_entropy(alpha).unwrap())
            .abs();
            assert!(dh < coarse.spacing(), "alpha {alpha}: {dh}");
        }
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let g = DensityGrid::gaussian(&[0.5, -1.0], &[1.0, 2.0], 64).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        let back = DensityGrid::read_binary(buf.as_slice()).unwrap();
        assert_eq!(g.spec(), back.spec());
        assert_eq!(g.masses(), back.masses());
    }

    #[test]
    fn save_writes_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("density.grid");
        let g = DensityGrid::uniform_box(&[0.0], &[1.0], 16).unwrap();
        g.save(&path).unwrap();
        let loaded = DensityGrid::load(&path).unwrap();
        assert_eq!(g.masses(), loaded.masses());
        let sidecar = std::fs::read_to_string(path.with_extension("grid.json")).unwrap();
        let spec: GridSpec = serde_json::from_str(&sidecar).unwrap();
        assert_eq!(&spec, g.spec());
    }

    #[test]
    fn rejects_oversized_grids() {
        let err = GridSpec::new(vec![0.0, 0.0, 0.0], 1.0, vec![2048, 2048, 2048]).unwrap_err();
        assert!(matches!(err, Error::InvalidGridSpec(_)));
    }

    #[test]
    fn log_concavity_probe() {
        let g = DensityGrid::gaussian(&[0.0], &[1.0], 512).unwrap();
        assert!(g.is_log_concave_1d(1e-9));
        // A bimodal mixture is not log-concave.
        let spec = GridSpec::new(vec![-4.0], 8.0 / 512.0, vec![512]).unwrap();
        let bimodal = DensityGrid::from_fn(spec, |x| {
            let a = (-0.5 * (x[0] - 2.0) * (x[0] - 2.0) / 0.01).exp();
            let b = (-0.5 * (x[0] + 2.0) * (x[0] + 2.0) / 0.01).exp();
            a + b
        })
        .unwrap();
        assert!(!bimodal.is_log_concave_1d(1e-9));
    }
}
