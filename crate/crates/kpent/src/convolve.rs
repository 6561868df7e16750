//! Density of an independent sum `X + W` on grids.
//!
//! [`convolve_direct`] is the quadratic-time exact oracle;
//! [`convolve`] computes the same linear convolution through zero-padded
//! FFTs and must agree with the oracle to 1e-12 relative per cell. Both
//! return a grid on the Minkowski-sum index range with the origin shifted
//! so that cell centers land on sums of input cell centers.

use crate::error::{Error, Result};
use crate::grid::{DensityGrid, GridSpec};
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

/// Negative round-off produced by the FFT path is clamped to zero; if the
/// clamped total exceeds this, something real went wrong and we fail.
const CLAMP_LIMIT: f64 = 1e-10;

/// Cells below this mass are trimmed from the fast-path boundary.
const TRIM_EPS: f64 = 1e-16;

fn check_compatible(f: &DensityGrid, g: &DensityGrid) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::IncompatibleGrids(format!(
            "dim {} vs {}",
            f.dim(),
            g.dim()
        )));
    }
    let (hf, hg) = (f.spacing(), g.spacing());
    if ((hf - hg) / hf).abs() > 1e-12 {
        return Err(Error::IncompatibleGrids(format!("spacing {hf} vs {hg}")));
    }
    Ok(())
}

/// Index range of the output: per axis `nf + ng - 1` cells, with the origin
/// placed so that output cell `i + j` has center `center_f(i) + center_g(j)`.
fn output_spec(f: &DensityGrid, g: &DensityGrid) -> Result<GridSpec> {
    let h = f.spacing();
    let origin: Vec<f64> = f
        .spec()
        .origin
        .iter()
        .zip(&g.spec().origin)
        .map(|(&a, &b)| a + b + 0.5 * h)
        .collect();
    let shape: Vec<usize> = f
        .spec()
        .shape
        .iter()
        .zip(&g.spec().shape)
        .map(|(&a, &b)| a + b - 1)
        .collect();
    GridSpec::new(origin, h, shape)
}

/// Exact linear convolution by the defining double sum; O(n_f * n_g).
pub fn convolve_direct(f: &DensityGrid, g: &DensityGrid) -> Result<DensityGrid> {
    check_compatible(f, g)?;
    let spec = output_spec(f, g)?;
    let mut out = vec![0.0f64; spec.cell_count()];
    let fs = f.spec();
    let gs = g.spec();
    for (af, &mf) in f.masses().iter().enumerate() {
        if mf == 0.0 {
            continue;
        }
        let fi = fs.flat_to_multi(af);
        for (ag, &mg) in g.masses().iter().enumerate() {
            if mg == 0.0 {
                continue;
            }
            let gi = gs.flat_to_multi(ag);
            let oi: Vec<usize> = fi.iter().zip(&gi).map(|(&a, &b)| a + b).collect();
            out[spec.multi_to_flat(&oi)] += mf * mg;
        }
    }
    DensityGrid::from_masses(spec, out)
}

#[derive(Clone, Copy)]
struct SendPtr(*mut Complex<f64>);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

/// In-place complex FFT along `axis` of a row-major array with the given
/// shape. Lines are transformed independently (and in parallel); the result
/// does not depend on the worker count.
fn fft_axis(data: &mut [Complex<f64>], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let stride: usize = shape[axis + 1..].iter().product();
    let lines = data.len() / n;
    let line_starts: Vec<usize> = (0..lines)
        .map(|l| {
            let outer = l / stride;
            let inner = l % stride;
            outer * n * stride + inner
        })
        .collect();
    let data_ptr = SendPtr(data.as_mut_ptr());
    line_starts.par_iter().for_each_init(
        || vec![Complex::new(0.0, 0.0); n],
        |scratch, &start| {
            let ptr = data_ptr;
            // Lines are disjoint index sets, so the raw writes never alias.
            unsafe {
                for (k, s) in scratch.iter_mut().enumerate() {
                    *s = *ptr.0.add(start + k * stride);
                }
            }
            fft.process(scratch);
            unsafe {
                for (k, s) in scratch.iter().enumerate() {
                    *ptr.0.add(start + k * stride) = *s;
                }
            }
        },
    );
}

/// Fast linear convolution via zero-padded FFTs (no circular wraparound).
/// Boundary cells with mass below 1e-16 are trimmed before normalization.
pub fn convolve(f: &DensityGrid, g: &DensityGrid) -> Result<DensityGrid> {
    check_compatible(f, g)?;
    let spec = output_spec(f, g)?;
    let dim = f.dim();

    // Pad every axis to a power of two at least the linear size.
    let padded: Vec<usize> = spec.shape.iter().map(|&n| n.next_power_of_two()).collect();
    let total: usize = padded.iter().product();

    let embed = |grid: &DensityGrid| -> Vec<Complex<f64>> {
        let mut buf = vec![Complex::new(0.0, 0.0); total];
        let gs = grid.spec();
        for (flat, &m) in grid.masses().iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let idx = gs.flat_to_multi(flat);
            let mut p = 0usize;
            for k in 0..dim {
                p = p * padded[k] + idx[k];
            }
            buf[p] = Complex::new(m, 0.0);
        }
        buf
    };

    let mut a = embed(f);
    let mut b = embed(g);
    for axis in 0..dim {
        fft_axis(&mut a, &padded, axis, false);
        fft_axis(&mut b, &padded, axis, false);
    }
    a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| {
        *x *= *y;
    });
    for axis in 0..dim {
        fft_axis(&mut a, &padded, axis, true);
    }
    let scale = 1.0 / total as f64;

    // Extract the linear-convolution block, clamping negative round-off.
    let mut out = vec![0.0f64; spec.cell_count()];
    let mut clamped = 0.0f64;
    for (flat, slot) in out.iter_mut().enumerate() {
        let idx = spec.flat_to_multi(flat);
        let mut p = 0usize;
        for k in 0..dim {
            p = p * padded[k] + idx[k];
        }
        let v = a[p].re * scale;
        if v < 0.0 {
            clamped -= v;
        } else {
            *slot = v;
        }
    }
    if clamped >= CLAMP_LIMIT {
        return Err(Error::ClampExceeded(clamped));
    }

    // Trim the bounding box of cells at or above the trim threshold.
    let mut lo = vec![usize::MAX; dim];
    let mut hi = vec![0usize; dim];
    for (flat, &m) in out.iter().enumerate() {
        if m < TRIM_EPS {
            continue;
        }
        let idx = spec.flat_to_multi(flat);
        for k in 0..dim {
            lo[k] = lo[k].min(idx[k]);
            hi[k] = hi[k].max(idx[k]);
        }
    }
    if lo.iter().any(|&l| l == usize::MAX) {
        return Err(Error::EmptySupport);
    }
    let tshape: Vec<usize> = (0..dim).map(|k| hi[k] - lo[k] + 1).collect();
    let torigin: Vec<f64> = (0..dim)
        .map(|k| spec.origin[k] + lo[k] as f64 * spec.spacing)
        .collect();
    let tspec = GridSpec::new(torigin, spec.spacing, tshape)?;
    let mut tmass = vec![0.0f64; tspec.cell_count()];
    for (tflat, slot) in tmass.iter_mut().enumerate() {
        let tidx = tspec.flat_to_multi(tflat);
        let idx: Vec<usize> = (0..dim).map(|k| tidx[k] + lo[k]).collect();
        let m = out[spec.multi_to_flat(&idx)];
        *slot = if m >= TRIM_EPS { m } else { 0.0 };
    }
    DensityGrid::from_masses(tspec, tmass)
}

/// Largest per-cell deviation between two grids after aligning their index
/// ranges by origin offset; cells present in only one grid compare to 0.
pub fn max_cell_difference(a: &DensityGrid, b: &DensityGrid) -> Result<f64> {
    check_compatible(a, b)?;
    let h = a.spacing();
    let dim = a.dim();
    let offset: Vec<i64> = (0..dim)
        .map(|k| ((b.spec().origin[k] - a.spec().origin[k]) / h).round() as i64)
        .collect();
    let mut worst = 0.0f64;
    let lo: Vec<i64> = (0..dim).map(|k| 0i64.min(offset[k])).collect();
    let hi: Vec<i64> = (0..dim)
        .map(|k| (a.spec().shape[k] as i64).max(offset[k] + b.spec().shape[k] as i64))
        .collect();
    let mut idx = lo.clone();
    loop {
        let am = mass_at(a, &idx);
        let b_idx: Vec<i64> = idx.iter().zip(&offset).map(|(&i, &o)| i - o).collect();
        let bm = mass_at(b, &b_idx);
        worst = worst.max((am - bm).abs());
        // odometer increment over the union index box
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(worst);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < hi[k] {
                break;
            }
            idx[k] = lo[k];
        }
    }
}

fn mass_at(g: &DensityGrid, idx: &[i64]) -> f64 {
    let spec = g.spec();
    let mut flat = 0usize;
    for k in 0..spec.dim {
        if idx[k] < 0 || idx[k] >= spec.shape[k] as i64 {
            return 0.0;
        }
        flat = flat * spec.shape[k] + idx[k] as usize;
    }
    g.masses()[flat]
}
