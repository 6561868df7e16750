//! Randomized hypothesis-class instances for the verification suites.
//!
//! Every generator emits inputs that satisfy its theorem's hypotheses by
//! construction (a validity certificate travels in the family tag); the
//! contraction ensembles follow the documented menu of PSD-scaled
//! orthogonal maps and coordinate-wise monotone maps. None of this is
//! dictated by the inequalities themselves — it is the harness's own
//! sampling choice.

use crate::ballgeom::PointConfiguration;
use crate::contract::ContractionSpec;
use crate::error::{Error, Result};
use crate::grid::{DensityGrid, GridSpec};
use crate::linalg::Mat;
use crate::polygon::{convex_hull, ConvexPolygon};
use crate::rng::CounterRng;
use std::sync::Arc;

/// 1-D grids live on this centered half-width.
pub const BOX_1D: f64 = 9.0;
/// 2-D grids live on this centered half-width.
pub const BOX_2D: f64 = 5.0;

fn spec_1d(cells: usize) -> Result<GridSpec> {
    GridSpec::new(vec![-BOX_1D], 2.0 * BOX_1D / cells as f64, vec![cells])
}

fn spec_2d(cells: usize) -> Result<GridSpec> {
    GridSpec::new(
        vec![-BOX_2D, -BOX_2D],
        2.0 * BOX_2D / cells as f64,
        vec![cells; 2],
    )
}

/// Family menu for log-concave scalars.
const LC_FAMILIES: &[&str] = &["gaussian", "uniform", "laplace", "radial"];

/// One-dimensional log-concave density on the shared lattice. The family
/// can be forced by name; `bimodal` produces a deliberately invalid input
/// for hypothesis-rejection tests.
pub fn log_concave_1d(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    cells: usize,
    family: Option<&str>,
) -> Result<(DensityGrid, &'static str)> {
    let pick = family.map(str::to_owned).unwrap_or_else(|| {
        LC_FAMILIES[(rng.u64_at(trial, lane) % LC_FAMILIES.len() as u64) as usize].to_owned()
    });
    let spec = spec_1d(cells)?;
    let grid = match pick.as_str() {
        "gaussian" => {
            let sigma = rng.range_at(trial, lane + 1, 0.6, 1.5);
            let mean = rng.range_at(trial, lane + 2, -0.8, 0.8);
            (
                DensityGrid::from_fn(spec, move |x| {
                    (-0.5 * (x[0] - mean) * (x[0] - mean) / (sigma * sigma)).exp()
                })?,
                "gaussian",
            )
        }
        "uniform" => {
            let a = rng.range_at(trial, lane + 1, -1.5, 0.0);
            let w = rng.range_at(trial, lane + 2, 1.0, 2.5);
            (
                DensityGrid::from_fn(spec, move |x| {
                    if x[0] >= a && x[0] <= a + w {
                        1.0
                    } else {
                        0.0
                    }
                })?,
                "uniform",
            )
        }
        "laplace" => {
            let b = rng.range_at(trial, lane + 1, 0.5, 1.0);
            (
                DensityGrid::from_fn(spec, move |x| (-x[0].abs() / b).exp())?,
                "laplace",
            )
        }
        "radial" => {
            let p = rng.range_at(trial, lane + 1, 1.0, 2.0);
            let s = rng.range_at(trial, lane + 2, 0.7, 1.3);
            (
                DensityGrid::from_fn(spec, move |x| (-(x[0].abs() / s).powf(p)).exp())?,
                "radial",
            )
        }
        "bimodal" => {
            (
                DensityGrid::from_fn(spec, |x| {
                    (-2.0 * (x[0] - 2.0) * (x[0] - 2.0)).exp()
                        + (-2.0 * (x[0] + 2.0) * (x[0] + 2.0)).exp()
                })?,
                "bimodal",
            )
        }
        other => {
            return Err(Error::Config(format!(
                "unknown 1-D family {other:?}; known: gaussian, uniform, laplace, radial, bimodal"
            )))
        }
    };
    Ok(grid)
}

/// Radially symmetric unimodal density in 2-D.
pub fn radially_symmetric_2d(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    cells: usize,
) -> Result<(DensityGrid, &'static str)> {
    let spec = spec_2d(cells)?;
    match rng.u64_at(trial, lane) % 3 {
        0 => {
            let sigma = rng.range_at(trial, lane + 1, 0.6, 1.2);
            Ok((
                DensityGrid::from_fn(spec, move |x| {
                    (-0.5 * (x[0] * x[0] + x[1] * x[1]) / (sigma * sigma)).exp()
                })?,
                "gaussian",
            ))
        }
        1 => {
            let r = rng.range_at(trial, lane + 1, 0.8, 2.0);
            Ok((
                DensityGrid::from_fn(spec, move |x| {
                    if x[0] * x[0] + x[1] * x[1] <= r * r {
                        1.0
                    } else {
                        0.0
                    }
                })?,
                "uniform-ball",
            ))
        }
        _ => {
            let p = rng.range_at(trial, lane + 1, 1.0, 2.0);
            let s = rng.range_at(trial, lane + 2, 0.7, 1.2);
            Ok((
                DensityGrid::from_fn(spec, move |x| {
                    (-((x[0] * x[0] + x[1] * x[1]).sqrt() / s).powf(p)).exp()
                })?,
                "radial",
            ))
        }
    }
}

/// Unconditional log-concave density in 2-D: a product of symmetric 1-D
/// log-concave profiles.
pub fn unconditional_log_concave_2d(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    cells: usize,
) -> Result<(DensityGrid, &'static str)> {
    let spec = spec_2d(cells)?;
    let profile = |which: u64, scale: f64| -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        match which % 3 {
            0 => Arc::new(move |v: f64| (-0.5 * v * v / (scale * scale)).exp()),
            1 => Arc::new(move |v: f64| if v.abs() <= scale { 1.0 } else { 0.0 }),
            _ => Arc::new(move |v: f64| (-v.abs() / scale).exp()),
        }
    };
    let p0 = profile(
        rng.u64_at(trial, lane),
        rng.range_at(trial, lane + 1, 0.6, 1.4),
    );
    let p1 = profile(
        rng.u64_at(trial, lane + 2),
        rng.range_at(trial, lane + 3, 0.6, 1.4),
    );
    Ok((
        DensityGrid::from_fn(spec, move |x| p0(x[0]) * p1(x[1]))?,
        "product",
    ))
}

/// General log-concave density in 2-D (need not be symmetric): the
/// unconditional menu plus shifted Gaussians and uniform laws on random
/// convex polygons.
pub fn log_concave_2d(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    cells: usize,
    family: Option<&str>,
) -> Result<(DensityGrid, &'static str)> {
    let pick = match family {
        None => rng.u64_at(trial, lane) % 3,
        Some("gaussian") => 0,
        Some("polygon") => 1,
        Some("product") | Some("uniform") | Some("laplace") | Some("radial") => 2,
        Some("bimodal") => {
            let spec = spec_2d(cells)?;
            return Ok((
                DensityGrid::from_fn(spec, |x| {
                    (-2.0 * ((x[0] - 1.5) * (x[0] - 1.5) + x[1] * x[1])).exp()
                        + (-2.0 * ((x[0] + 1.5) * (x[0] + 1.5) + x[1] * x[1])).exp()
                })?,
                "bimodal",
            ));
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown 2-D family {other:?}; known: gaussian, polygon, product, bimodal"
            )))
        }
    };
    match pick {
        0 => {
            let spec = spec_2d(cells)?;
            let sx = rng.range_at(trial, lane + 1, 0.6, 1.3);
            let sy = rng.range_at(trial, lane + 2, 0.6, 1.3);
            let mx = rng.range_at(trial, lane + 3, -0.7, 0.7);
            let my = rng.range_at(trial, lane + 4, -0.7, 0.7);
            Ok((
                DensityGrid::from_fn(spec, move |x| {
                    let a = (x[0] - mx) / sx;
                    let b = (x[1] - my) / sy;
                    (-0.5 * (a * a + b * b)).exp()
                })?,
                "gaussian",
            ))
        }
        1 => {
            let poly = random_polygon(rng, trial, lane + 1, 6, 2.0)?;
            let spec = spec_2d(cells)?;
            Ok((
                DensityGrid::from_fn(spec, move |x| {
                    if poly.contains([x[0], x[1]]) {
                        1.0
                    } else {
                        0.0
                    }
                })?,
                "uniform-polygon",
            ))
        }
        _ => unconditional_log_concave_2d(rng, trial, lane + 1, cells),
    }
}

/// Orthogonal matrix from random Givens rotations (dims 1..=3).
pub fn random_orthogonal(rng: &CounterRng, trial: u64, lane: u64, dim: usize) -> Mat {
    let mut q = Mat::identity(dim);
    let mut lane = lane;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let th = rng.range_at(trial, lane, 0.0, std::f64::consts::TAU);
            lane += 1;
            let mut g = Mat::identity(dim);
            g.set(i, i, th.cos());
            g.set(j, j, th.cos());
            g.set(i, j, -th.sin());
            g.set(j, i, th.sin());
            q = q.matmul(&g);
        }
    }
    q
}

/// Affine contraction `Q1 D Q2 x + b` with singular values below `lip`.
pub fn random_affine_contraction(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    let q1 = random_orthogonal(rng, trial, lane, dim);
    let q2 = random_orthogonal(rng, trial, lane + 8, dim);
    let d: Vec<f64> = (0..dim)
        .map(|k| rng.range_at(trial, lane + 16 + k as u64, 0.3 * lip, lip))
        .collect();
    let a = q1.matmul(&Mat::diag(&d)).matmul(&q2);
    let b: Vec<f64> = (0..dim)
        .map(|k| rng.range_at(trial, lane + 24 + k as u64, -0.4, 0.4))
        .collect();
    ContractionSpec::affine(a, b)
}

/// Diagonal contraction with entries of either sign in `[0.2, lip]`.
pub fn random_diagonal_contraction(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    let scales: Vec<f64> = (0..dim)
        .map(|k| {
            let mag = rng.range_at(trial, lane + k as u64, 0.2, lip);
            let sign = if rng.u64_at(trial, lane + 8 + k as u64) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            mag * sign
        })
        .collect();
    ContractionSpec::diagonal(scales)
}

/// One monotone 1-Lipschitz scalar map `v -> a v + b tanh(c v) / c + s`
/// with `a + b <= cap`.
fn monotone_component(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    cap: f64,
) -> (Arc<dyn Fn(f64) -> f64 + Send + Sync>, f64) {
    let a = rng.range_at(trial, lane, 0.1 * cap, 0.7 * cap);
    let b = rng.range_at(trial, lane + 1, 0.0, cap - a);
    let c = rng.range_at(trial, lane + 2, 0.5, 2.0);
    let s = rng.range_at(trial, lane + 3, -0.3, 0.3);
    (
        Arc::new(move |v: f64| a * v + b * (c * v).tanh() / c + s),
        a + b,
    )
}

/// Strong contraction from independent monotone coordinate maps; the
/// declared constant is the analytic per-coordinate slope bound.
pub fn random_coordinatewise_contraction(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    let mut comps = Vec::with_capacity(dim);
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        let (c, slope) = monotone_component(rng, trial, lane + 8 * k as u64, lip);
        worst = worst.max(slope);
        comps.push(c);
    }
    ContractionSpec::coordinatewise(comps, Some(worst.min(1.0)))
}

/// Black-box contraction: rotation, coordinate-wise monotone squeeze,
/// rotation. The sandwich keeps the analytic Lipschitz certificate of the
/// middle layer.
pub fn random_sampled_contraction(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    let q1 = random_orthogonal(rng, trial, lane, dim);
    let q2 = random_orthogonal(rng, trial, lane + 4, dim);
    let mut comps = Vec::with_capacity(dim);
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        let (c, slope) = monotone_component(rng, trial, lane + 8 + 8 * k as u64, lip);
        worst = worst.max(slope);
        comps.push(c);
    }
    let map = move |x: &[f64]| -> Vec<f64> {
        let y = q1.apply(x);
        let z: Vec<f64> = y.iter().zip(&comps).map(|(&v, c)| c(v)).collect();
        q2.apply(&z)
    };
    ContractionSpec::sampled(dim, Arc::new(map), Some(worst.min(1.0)))
}

/// Gradient of a smooth convex potential
/// `phi(x) = s |x|^2 / 2 + sum_j c_j softplus(v_j . x)`, with the analytic
/// smoothness bound `s + sum_j c_j |v_j|^2 / 4 <= lip` declared.
pub fn random_gradient_convex(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    let s = rng.range_at(trial, lane, 0.2 * lip, 0.6 * lip);
    let terms = 2usize;
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(terms);
    let mut cs: Vec<f64> = Vec::with_capacity(terms);
    let mut hess = s;
    for j in 0..terms {
        let v: Vec<f64> = (0..dim)
            .map(|k| rng.range_at(trial, lane + 4 + (j * dim + k) as u64, -1.0, 1.0))
            .collect();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        let room = (lip - hess).max(0.0);
        let c = rng.range_at(trial, lane + 16 + j as u64, 0.0, room * 4.0 / norm2.max(1e-9));
        hess += c * norm2 / 4.0;
        vs.push(v);
        cs.push(c);
    }
    let declared = hess.min(1.0);
    let grad = move |x: &[f64]| -> Vec<f64> {
        let mut g: Vec<f64> = x.iter().map(|&v| s * v).collect();
        for (v, &c) in vs.iter().zip(&cs) {
            let dot: f64 = v.iter().zip(x).map(|(&a, &b)| a * b).sum();
            let sig = 1.0 / (1.0 + (-dot).exp());
            for k in 0..g.len() {
                g[k] += c * sig * v[k];
            }
        }
        g
    };
    ContractionSpec::gradient_convex(dim, Arc::new(grad), Some(declared))
}

/// Contraction menu used by stress suites: PSD-scaled orthogonal (affine),
/// diagonal, coordinate-wise monotone, sandwiched sampled, and
/// gradient-of-convex kinds in rotation.
pub fn random_contraction_any(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    match rng.u64_at(trial, lane + 99) % 5 {
        0 => random_affine_contraction(rng, trial, lane, dim, lip),
        1 => random_diagonal_contraction(rng, trial, lane, dim, lip),
        2 => random_coordinatewise_contraction(rng, trial, lane, dim, lip),
        3 => random_sampled_contraction(rng, trial, lane, dim, lip),
        _ => random_gradient_convex(rng, trial, lane, dim, lip),
    }
}

/// Convex polygon as the hull of `k` random points in a centered square.
pub fn random_polygon(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    k: usize,
    scale: f64,
) -> Result<ConvexPolygon> {
    for attempt in 0..16u64 {
        let pts: Vec<[f64; 2]> = (0..k)
            .map(|i| {
                [
                    rng.range_at(trial, lane + 64 * attempt + 2 * i as u64, -scale, scale),
                    rng.range_at(trial, lane + 64 * attempt + 2 * i as u64 + 1, -scale, scale),
                ]
            })
            .collect();
        if let Ok(p) = convex_hull(&pts) {
            return Ok(p);
        }
    }
    Err(Error::InvalidPolygon(
        "could not draw a nondegenerate polygon in 16 attempts".into(),
    ))
}

/// Unconditional (axis-symmetric) convex polygon: the hull of all four
/// sign flips of random points.
pub fn random_symmetric_polygon(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    k: usize,
    scale: f64,
) -> Result<ConvexPolygon> {
    let mut pts = Vec::with_capacity(4 * k);
    for i in 0..k {
        let x = rng.range_at(trial, lane + 2 * i as u64, 0.2, scale);
        let y = rng.range_at(trial, lane + 2 * i as u64 + 1, 0.2, scale);
        for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            pts.push([sx * x, sy * y]);
        }
    }
    convex_hull(&pts)
}

/// Random ball configuration: `k` centers in a centered box scaled so that
/// typical pairwise gaps are comparable to the radius.
pub fn random_point_configuration(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    k: usize,
    dim: usize,
    spread: f64,
    radius: f64,
) -> Result<PointConfiguration> {
    let centers: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..dim)
                .map(|c| rng.range_at(trial, lane + (i * dim + c) as u64, -spread, spread))
                .collect()
        })
        .collect();
    PointConfiguration::new(centers, radius)
}

/// Random PSD covariance with eigenvalues in `[lo, hi]`.
pub fn random_covariance(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lo: f64,
    hi: f64,
) -> Mat {
    let q = random_orthogonal(rng, trial, lane, dim);
    let evs: Vec<f64> = (0..dim)
        .map(|k| rng.range_at(trial, lane + 8 + k as u64, lo, hi))
        .collect();
    q.matmul(&Mat::diag(&evs)).matmul(&q.transpose())
}
