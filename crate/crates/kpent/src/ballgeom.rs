//! Volumes of unions and intersections of congruent balls, and the
//! contraction checks on them.
//!
//! Volumes come from hit-or-miss Monte Carlo with a counter-based sample
//! stream, so estimates are reproducible bit-for-bit for a given seed and
//! independent of the worker count. Checks compare the two configurations
//! on a shared uniform stream (common random numbers), which makes the
//! margin estimator far tighter than the individual volumes.

use crate::contract::{apply_map, ContractionSpec, MapKind};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Provenance};
use crate::rng::CounterRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `k` ball centers sharing one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
}

impl PointConfiguration {
    pub fn new(centers: Vec<Vec<f64>>, radius: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Domain("need k >= 1 centers".into()));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        let dim = centers[0].len();
        if dim < 1 || dim > 3 {
            return Err(Error::Domain(format!("dim must be 1..=3, got {dim}")));
        }
        for c in &centers {
            if c.len() != dim {
                return Err(Error::SizeMismatch("centers of mixed dimension".into()));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain("non-finite center".into()));
            }
        }
        Ok(PointConfiguration { centers, radius })
    }

    pub fn k(&self) -> usize {
        self.centers.len()
    }

    pub fn dim(&self) -> usize {
        self.centers[0].len()
    }

    /// JSON form `{"dim": d, "radius": r, "centers": [[..], ..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim(),
            "radius": self.radius,
            "centers": self.centers,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let radius = v
            .get("radius")
            .and_then(|r| r.as_f64())
            .ok_or_else(|| Error::Domain("missing radius".into()))?;
        let centers: Vec<Vec<f64>> = serde_json::from_value(
            v.get("centers")
                .cloned()
                .ok_or_else(|| Error::Domain("missing centers".into()))?,
        )?;
        let cfg = PointConfiguration::new(centers, radius)?;
        if let Some(d) = v.get("dim").and_then(|d| d.as_u64()) {
            if d as usize != cfg.dim() {
                return Err(Error::SizeMismatch(format!(
                    "declared dim {d} but centers have dim {}",
                    cfg.dim()
                )));
            }
        }
        Ok(cfg)
    }
}

/// Monte Carlo value with its uncertainty and reproduction coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Sampling parameters shared by the volume estimators and checks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McParams {
    pub samples: u64,
    pub seed: u64,
    /// Multiply samples by 10 while the margin is within its tolerance
    /// band, up to `max_samples`.
    pub escalate: bool,
    pub max_samples: u64,
}

impl Default for McParams {
    fn default() -> Self {
        McParams {
            samples: 1_000_000,
            seed: 0,
            escalate: true,
            max_samples: 100_000_000,
        }
    }
}

impl McParams {
    pub fn fixed(samples: u64, seed: u64) -> Self {
        McParams {
            samples,
            seed,
            escalate: false,
            max_samples: samples,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples < 10_000 {
            return Err(Error::Precondition(format!(
                "mc.samples must be >= 10^4, got {}",
                self.samples
            )));
        }
        Ok(())
    }
}

/// True iff every pairwise distance in `y` is at most the matching distance
/// in `x` plus 1e-12.
pub fn is_contractive_pair(x: &PointConfiguration, y: &PointConfiguration) -> Result<bool> {
    if x.k() != y.k() {
        return Err(Error::SizeMismatch(format!("k {} vs {}", x.k(), y.k())));
    }
    if x.dim() != y.dim() {
        return Err(Error::SizeMismatch(format!(
            "dim {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(&u, &v)| (u - v) * (u - v))
            .sum::<f64>()
            .sqrt()
    };
    for i in 0..x.k() {
        for j in (i + 1)..x.k() {
            if dist(&y.centers[i], &y.centers[j]) > dist(&x.centers[i], &x.centers[j]) + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| (b - a).max(0.0))
            .product()
    }

    fn point_from_unit(&self, u: &[f64]) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(u)
            .map(|((&a, &b), &t)| a + t * (b - a))
            .collect()
    }
}

/// Tight box around the union of all balls.
pub fn union_box(cfg: &PointConfiguration) -> BoundingBox {
    let d = cfg.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for c in &cfg.centers {
        for k in 0..d {
            lo[k] = lo[k].min(c[k] - cfg.radius);
            hi[k] = hi[k].max(c[k] + cfg.radius);
        }
    }
    BoundingBox { lo, hi }
}

/// Box around the first ball; any single ball contains the intersection.
pub fn first_ball_box(cfg: &PointConfiguration) -> BoundingBox {
    let c = &cfg.centers[0];
    BoundingBox {
        lo: c.iter().map(|&x| x - cfg.radius).collect(),
        hi: c.iter().map(|&x| x + cfg.radius).collect(),
    }
}

#[inline]
fn in_ball(point: &[f64], center: &[f64], r2: f64) -> bool {
    let mut s = 0.0;
    for (p, c) in point.iter().zip(center) {
        let d = p - c;
        s += d * d;
    }
    s <= r2
}

const CHUNK: u64 = 1 << 16;

/// Counts hits of `predicate` over `samples` box points drawn from the
/// shared unit stream; integer accumulation keeps the count independent of
/// the parallel schedule.
fn count_hits<F>(
    rng: &CounterRng,
    bbox: &BoundingBox,
    range: std::ops::Range<u64>,
    predicate: F,
) -> u64
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let dim = bbox.lo.len();
    let n_chunks = (range.end - range.start).div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = range.start + c * CHUNK;
            let hi = (lo + CHUNK).min(range.end);
            let mut hits = 0u64;
            let mut u = vec![0.0f64; dim];
            for i in lo..hi {
                for (k, slot) in u.iter_mut().enumerate() {
                    *slot = rng.f64_at(i, k as u64);
                }
                let p = bbox.point_from_unit(&u);
                if predicate(&p) {
                    hits += 1;
                }
            }
            hits
        })
        .sum()
}

fn estimate_from_hits(hits: u64, samples: u64, box_vol: f64, seed: u64) -> MCEstimate {
    let p = hits as f64 / samples as f64;
    let stderr = box_vol * (p * (1.0 - p) / (samples.saturating_sub(1).max(1)) as f64).sqrt();
    MCEstimate {
        value: box_vol * p,
        stderr,
        samples,
        seed,
    }
}

/// Volume of the union of the balls in `cfg` over a caller-supplied box
/// (which must contain the union). Sharing the box lets two estimates share
/// sample points exactly.
pub fn union_volume_in_box(
    cfg: &PointConfiguration,
    bbox: &BoundingBox,
    mc: &McParams,
) -> Result<MCEstimate> {
    mc.validate()?;
    let rng = CounterRng::new(mc.seed, 0xba11);
    let r2 = cfg.radius * cfg.radius;
    let centers = &cfg.centers;
    let hits = count_hits(&rng, bbox, 0..mc.samples, |p| {
        centers.iter().any(|c| in_ball(p, c, r2))
    });
    Ok(estimate_from_hits(hits, mc.samples, bbox.volume(), mc.seed))
}

/// Hit-or-miss volume of the union of the balls, sampled over the tight
/// bounding box; deterministic given the seed.
pub fn union_volume(cfg: &PointConfiguration, mc: &McParams) -> Result<MCEstimate> {
    union_volume_in_box(cfg, &union_box(cfg), mc)
}

/// Hit-or-miss volume of the intersection of the balls, sampled over the
/// box of the first ball.
pub fn intersection_volume(cfg: &PointConfiguration, mc: &McParams) -> Result<MCEstimate> {
    mc.validate()?;
    let bbox = first_ball_box(cfg);
    let rng = CounterRng::new(mc.seed, 0xba11);
    let r2 = cfg.radius * cfg.radius;
    let centers = &cfg.centers;
    let hits = count_hits(&rng, &bbox, 0..mc.samples, |p| {
        centers.iter().all(|c| in_ball(p, c, r2))
    });
    Ok(estimate_from_hits(hits, mc.samples, bbox.volume(), mc.seed))
}

/// Area of the intersection of two radius-`r` disks with centers `dist`
/// apart: `2 r^2 acos(dist / 2r) - (dist / 2) sqrt(4 r^2 - dist^2)`, and 0
/// once they separate.
pub fn lens_area(dist: f64, r: f64) -> f64 {
    if dist >= 2.0 * r {
        return 0.0;
    }
    let half = dist / (2.0 * r);
    2.0 * r * r * half.acos() - 0.5 * dist * (4.0 * r * r - dist * dist).sqrt()
}

/// Which side a check samples.
enum VolumeKind {
    Union,
    Intersection,
}

/// Shared-stream paired volume estimate of the X and Y = T(X)
/// configurations. Both sides consume the same unit hypercube stream.
fn paired_volumes(
    x: &PointConfiguration,
    y: &PointConfiguration,
    mc: &McParams,
    kind: VolumeKind,
) -> Result<(MCEstimate, MCEstimate)> {
    mc.validate()?;
    let rng = CounterRng::new(mc.seed, 0xba11);
    let r2 = x.radius * x.radius;
    let (box_x, box_y) = match kind {
        VolumeKind::Union => (union_box(x), union_box(y)),
        VolumeKind::Intersection => (first_ball_box(x), first_ball_box(y)),
    };
    let mut n = mc.samples;
    let mut hx = 0u64;
    let mut hy = 0u64;
    let mut done = 0u64;
    loop {
        let range = done..n;
        let (dx, dy) = rayon::join(
            || {
                count_hits(&rng, &box_x, range.clone(), |p| match kind {
                    VolumeKind::Union => x.centers.iter().any(|c| in_ball(p, c, r2)),
                    VolumeKind::Intersection => x.centers.iter().all(|c| in_ball(p, c, r2)),
                })
            },
            || {
                count_hits(&rng, &box_y, range.clone(), |p| match kind {
                    VolumeKind::Union => y.centers.iter().any(|c| in_ball(p, c, r2)),
                    VolumeKind::Intersection => y.centers.iter().all(|c| in_ball(p, c, r2)),
                })
            },
        );
        hx += dx;
        hy += dy;
        done = n;
        let ex = estimate_from_hits(hx, done, box_x.volume(), mc.seed);
        let ey = estimate_from_hits(hy, done, box_y.volume(), mc.seed);
        let margin = match kind {
            VolumeKind::Union => ex.value - ey.value,
            VolumeKind::Intersection => ey.value - ex.value,
        };
        let band = 3.0 * (ex.stderr + ey.stderr);
        if !mc.escalate || margin.abs() >= band || n >= mc.max_samples {
            return Ok((ex, ey));
        }
        n = (n * 10).min(mc.max_samples);
    }
}

fn verify_contractive(
    x: &PointConfiguration,
    t: &ContractionSpec,
    y: &PointConfiguration,
) -> Result<()> {
    // Affine and diagonal kinds are contractions by construction; probe the
    // realized pair for everything else.
    let analytic = matches!(t.kind, MapKind::Affine { .. } | MapKind::Diagonal { .. });
    if !analytic && !is_contractive_pair(x, y)? {
        return Err(Error::Precondition(
            "T(X) is not a contractive rearrangement of X".into(),
        ));
    }
    Ok(())
}

/// Checks that contracting the centers does not grow the union volume:
/// `Vol(union B(T(x_i), r)) <= Vol(union B(x_i, r))` within
/// `3 (stderr_lhs + stderr_rhs)`.
pub fn kp_union_check(
    x: &PointConfiguration,
    t: &ContractionSpec,
    mc: &McParams,
) -> Result<CheckReport> {
    let start = std::time::Instant::now();
    let y = PointConfiguration::new(apply_map(t, &x.centers)?, x.radius)?;
    verify_contractive(x, t, &y)?;
    let (ex, ey) = paired_volumes(x, &y, mc, VolumeKind::Union)?;
    let tolerance = 3.0 * (ex.stderr + ey.stderr);
    Ok(CheckReport::le_check(
        "KP-union",
        ey.value,
        ex.value,
        tolerance,
        Provenance::Mc,
        Provenance::Mc,
        mc.seed,
    )
    .with_geometry(x.k(), x.dim(), ex.stderr + ey.stderr, ex.samples)
    .with_runtime(start.elapsed().as_millis() as u64))
}

/// Checks that contracting the centers does not shrink the intersection:
/// `Vol(inter B(x_i, r)) <= Vol(inter B(T(x_i), r))` within the same
/// combined band.
pub fn kp_intersection_check(
    x: &PointConfiguration,
    t: &ContractionSpec,
    mc: &McParams,
) -> Result<CheckReport> {
    let start = std::time::Instant::now();
    let y = PointConfiguration::new(apply_map(t, &x.centers)?, x.radius)?;
    verify_contractive(x, t, &y)?;
    let (ex, ey) = paired_volumes(x, &y, mc, VolumeKind::Intersection)?;
    let tolerance = 3.0 * (ex.stderr + ey.stderr);
    Ok(CheckReport::le_check(
        "KP-intersection",
        ex.value,
        ey.value,
        tolerance,
        Provenance::Mc,
        Provenance::Mc,
        mc.seed,
    )
    .with_geometry(x.k(), x.dim(), ex.stderr + ey.stderr, ex.samples)
    .with_runtime(start.elapsed().as_millis() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use std::f64::consts::PI;

    fn disk_pair(dist: f64) -> PointConfiguration {
        PointConfiguration::new(vec![vec![0.0, 0.0], vec![dist, 0.0]], 1.0).unwrap()
    }

    #[test]
    fn contractive_pair_basics() {
        let x = disk_pair(2.0);
        assert!(is_contractive_pair(&x, &x).unwrap());
        let y = PointConfiguration::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap();
        assert!(is_contractive_pair(&x, &y).unwrap());
        let z = PointConfiguration::new(vec![vec![0.0, 0.0], vec![3.0, 0.0]], 1.0).unwrap();
        assert!(!is_contractive_pair(&x, &z).unwrap());
        // uniform scaling of all centers contracts
        let s = PointConfiguration::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], 1.0).unwrap();
        assert!(is_contractive_pair(&x, &s).unwrap());
    }

    #[test]
    fn single_disk_area() {
        let cfg = PointConfiguration::new(vec![vec![0.0, 0.0]], 1.0).unwrap();
        let mc = McParams::fixed(1_000_000, 42);
        let est = union_volume(&cfg, &mc).unwrap();
        assert!(
            (est.value - PI).abs() <= 3.0 * est.stderr,
            "pi estimate {} +- {}",
            est.value,
            est.stderr
        );
        let inter = intersection_volume(&cfg, &mc).unwrap();
        assert!((inter.value - PI).abs() <= 3.0 * inter.stderr);
    }

    #[test]
    fn disjoint_disks_add_up() {
        let cfg = disk_pair(4.0);
        let mc = McParams::fixed(1_000_000, 7);
        let est = union_volume(&cfg, &mc).unwrap();
        assert!((est.value - 2.0 * PI).abs() <= 3.0 * est.stderr);
        let inter = intersection_volume(&cfg, &mc).unwrap();
        assert!(inter.value <= 3.0 * inter.stderr, "disjoint intersection");
    }

    #[test]
    fn lens_formula_reference_values() {
        assert!((lens_area(0.0, 1.0) - PI).abs() < 1e-14);
        assert_eq!(lens_area(2.0, 1.0), 0.0);
        assert_eq!(lens_area(5.0, 1.0), 0.0);
        let want = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((lens_area(1.0, 1.0) - want).abs() < 1e-14);
    }

    #[test]
    fn overlapping_disks_match_lens_oracle() {
        let cfg = disk_pair(1.0);
        let mc = McParams::fixed(2_000_000, 11);
        let lens = lens_area(1.0, 1.0);
        let est = union_volume(&cfg, &mc).unwrap();
        let want_union = 2.0 * PI - lens;
        assert!(
            (est.value - want_union).abs() <= 3.0 * est.stderr,
            "union {} vs {want_union}",
            est.value
        );
        let inter = intersection_volume(&cfg, &mc).unwrap();
        assert!(
            (inter.value - lens).abs() <= 3.0 * inter.stderr,
            "intersection {} vs {lens}",
            inter.value
        );
        // Inclusion-exclusion: union + intersection = 2 pi r^2.
        let total = est.value + inter.value;
        assert!((total - 2.0 * PI).abs() <= 3.0 * (est.stderr + inter.stderr));
    }

    #[test]
    fn union_at_least_one_ball_and_intersection_at_most() {
        let cfg = PointConfiguration::new(
            vec![vec![0.0, 0.0], vec![0.7, 0.3], vec![-0.4, 0.5]],
            1.0,
        )
        .unwrap();
        let mc = McParams::fixed(500_000, 3);
        let u = union_volume(&cfg, &mc).unwrap();
        let i = intersection_volume(&cfg, &mc).unwrap();
        assert!(u.value >= PI - 3.0 * u.stderr);
        assert!(i.value <= PI + 3.0 * i.stderr);
    }

    #[test]
    fn seed_determinism_bit_for_bit() {
        let cfg = disk_pair(1.3);
        let mc = McParams::fixed(200_000, 123);
        let a = union_volume(&cfg, &mc).unwrap();
        let b = union_volume(&cfg, &mc).unwrap();
        assert_eq!(a, b);
        let c = union_volume(&cfg, &McParams::fixed(200_000, 124)).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn union_monotone_in_radius_with_shared_points() {
        let centers = vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![-0.5, 0.8]];
        let small = PointConfiguration::new(centers.clone(), 0.8).unwrap();
        let large = PointConfiguration::new(centers, 1.1).unwrap();
        // One box covers both radii, so the hit sets are nested pointwise.
        let bbox = union_box(&large);
        let mc = McParams::fixed(300_000, 9);
        let a = union_volume_in_box(&small, &bbox, &mc).unwrap();
        let b = union_volume_in_box(&large, &bbox, &mc).unwrap();
        assert!(a.value <= b.value);
    }

    #[test]
    fn kp_union_identity_margin_zero() {
        let x = PointConfiguration::new(
            vec![vec![0.0, 0.0], vec![1.5, 0.2], vec![0.4, -1.1]],
            1.0,
        )
        .unwrap();
        let t = ContractionSpec::identity(2);
        // The escalation band never resolves an exact tie; cap the budget.
        let mc = McParams {
            samples: 100_000,
            seed: 5,
            escalate: true,
            max_samples: 1_000_000,
        };
        let rep = kp_union_check(&x, &t, &mc).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.margin, 0.0, "identity margins are exactly zero under CRN");
        assert_eq!(rep.samples, Some(1_000_000), "escalation runs to its cap");
    }

    #[test]
    fn kp_checks_on_plane_contractions() {
        let rng = CounterRng::new(77, 0);
        let mc = McParams::fixed(400_000, 13);
        for trial in 0..10u64 {
            let k = 3 + (rng.u64_at(trial, 50) % 3) as usize;
            let centers: Vec<Vec<f64>> = (0..k)
                .map(|i| {
                    vec![
                        rng.range_at(trial, 2 * i as u64, -1.5, 1.5),
                        rng.range_at(trial, 2 * i as u64 + 1, -1.5, 1.5),
                    ]
                })
                .collect();
            let x = PointConfiguration::new(centers, 1.0).unwrap();
            let th = rng.range_at(trial, 40, 0.0, std::f64::consts::TAU);
            let s = rng.range_at(trial, 41, 0.3, 1.0);
            let rot = Mat::from_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]])
                .unwrap();
            let t = ContractionSpec::linear(rot.scale(s)).unwrap();
            let u = kp_union_check(&x, &t, &mc).unwrap();
            assert!(u.pass, "trial {trial}: union margin {}", u.margin);
            let i = kp_intersection_check(&x, &t, &mc).unwrap();
            assert!(i.pass, "trial {trial}: intersection margin {}", i.margin);
        }
    }

    #[test]
    fn lens_formula_against_high_resolution_mc() {
        // MC oracle cross-check of the closed form at 1e7 samples.
        let cfg = disk_pair(1.0);
        let mc = McParams::fixed(10_000_000, 404);
        let est = intersection_volume(&cfg, &mc).unwrap();
        let want = lens_area(1.0, 1.0);
        assert!(
            (est.value - want).abs() <= 3.0 * est.stderr,
            "{} vs {want} (se {})",
            est.value,
            est.stderr
        );
        assert!(est.stderr < 1e-3);
    }

    #[test]
    fn kp_union_three_dimensional_monotone_path_regime() {
        // A positive semi-definite linear contraction scales each
        // eigen-direction, so pairwise distances shrink monotonically along
        // the straight-line path: the regime where the union statement is
        // settled in every dimension.
        let rng = CounterRng::new(31, 7);
        let mc = McParams::fixed(300_000, 19);
        for trial in 0..5u64 {
            let centers: Vec<Vec<f64>> = (0..4)
                .map(|i| {
                    (0..3)
                        .map(|c| rng.range_at(trial, (i * 3 + c) as u64, -1.2, 1.2))
                        .collect()
                })
                .collect();
            let x = PointConfiguration::new(centers, 1.0).unwrap();
            // PSD contraction: Q diag(s) Q^T with 0 < s <= 1.
            let th = rng.range_at(trial, 20, 0.0, std::f64::consts::TAU);
            let g = {
                let mut m = Mat::identity(3);
                m.set(0, 0, th.cos());
                m.set(1, 1, th.cos());
                m.set(0, 1, -th.sin());
                m.set(1, 0, th.sin());
                m
            };
            let s: Vec<f64> = (0..3)
                .map(|k| rng.range_at(trial, 30 + k as u64, 0.4, 1.0))
                .collect();
            let a = g.matmul(&Mat::diag(&s)).matmul(&g.transpose());
            let t = ContractionSpec::linear(a).unwrap();
            let rep = kp_union_check(&x, &t, &mc).unwrap();
            assert!(rep.pass, "trial {trial}: margin {}", rep.margin);
            assert_eq!(rep.dim, Some(3));
        }
    }

    #[test]
    fn two_ball_intersection_reduces_to_distance_monotonicity() {
        // k = 2: the exact lens/cap value grows as centers approach, so the
        // check must pass for any contraction in any dimension.
        let x = disk_pair(1.4);
        let t = ContractionSpec::scaling(2, 0.6).unwrap();
        let rep = kp_intersection_check(&x, &t, &McParams::fixed(400_000, 21)).unwrap();
        assert!(rep.pass);
        // Exact oracle on both sides.
        let lhs = lens_area(1.4, 1.0);
        let rhs = lens_area(1.4 * 0.6, 1.0);
        assert!(rhs >= lhs);
        assert!((rep.lhs - lhs).abs() <= 3.0 * rep.stderr.unwrap());
        assert!((rep.rhs - rhs).abs() <= 3.0 * rep.stderr.unwrap());
    }

    #[test]
    fn contractivity_precondition_enforced() {
        let x = disk_pair(1.0);
        // A sampled map that expands distances must be rejected.
        let t = ContractionSpec::sampled(
            2,
            std::sync::Arc::new(|p: &[f64]| vec![2.0 * p[0], 2.0 * p[1]]),
            None,
        )
        .unwrap();
        assert!(matches!(
            kp_union_check(&x, &t, &McParams::fixed(10_000, 1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let cfg = disk_pair(0.8);
        let j = cfg.to_json();
        assert_eq!(j["dim"], 2);
        let back = PointConfiguration::from_json(&j).unwrap();
        assert_eq!(cfg, back);
    }
}
