//! Order-2 diversity of a law under the kernel `exp(-t * distance)`:
//! the reciprocal of the expected kernel between independent copies.
//!
//! As `t` grows, `C_d * D_t / t^d` converges to `exp(h_2)`, with
//! `C_d = d! * (unit-ball volume)`; the scaling check rides that limit on
//! grid densities, computing the kernel integral exactly over cell pairs
//! in 1-D and by Gauss-Legendre blocks in 2-D.

use crate::ballgeom::{MCEstimate, McParams};
use crate::contract::ContractionSpec;
use crate::error::{Error, Result};
use crate::grid::DensityGrid;
use crate::report::{CheckReport, Provenance};
use crate::rng::{chunked_sum, CounterRng};
use std::f64::consts::PI;

/// `C_d = d! * omega_d`: 2, 2 pi, 8 pi for d = 1, 2, 3.
pub fn scaling_constant(dim: usize) -> Result<f64> {
    match dim {
        1 => Ok(2.0),
        2 => Ok(2.0 * PI),
        3 => Ok(8.0 * PI),
        _ => Err(Error::Domain(format!("dim {dim} out of range"))),
    }
}

/// Exact order-2 diversity of a discrete law:
/// `(sum_ij w_i w_j exp(-t |p_i - p_j|))^-1`.
pub fn diversity2_discrete(weights: &[f64], points: &[Vec<f64>], t: f64) -> Result<f64> {
    if weights.len() != points.len() {
        return Err(Error::Domain(format!(
            "{} weights for {} points",
            weights.len(),
            points.len()
        )));
    }
    if weights.is_empty() {
        return Err(Error::Domain("empty support".into()));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("weights sum to {total}, not 1")));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(Error::Domain("negative weight".into()));
    }
    let mut kernel = 0.0;
    for (i, (&wi, pi)) in weights.iter().zip(points).enumerate() {
        for (&wj, pj) in weights[i + 1..].iter().zip(&points[i + 1..]) {
            let dist = pi
                .iter()
                .zip(pj)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            kernel += 2.0 * wi * wj * (-t * dist).exp();
        }
        kernel += wi * wi; // diagonal, exp(0)
    }
    Ok(1.0 / kernel)
}

/// A deterministic, counter-indexed sample source. Each draw may consume
/// lanes `[lane, lane + 256)` of the given index.
pub trait VectorSampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &CounterRng, index: u64, lane: u64) -> Vec<f64>;
    /// True when the law is invariant under `x -> -x` (needed as noise in
    /// the contraction check).
    fn sign_symmetric(&self) -> bool;
}

/// Lane stride reserved per draw.
pub const LANE_STRIDE: u64 = 256;

/// Discrete law over explicit points.
pub struct DiscreteSampler {
    pub points: Vec<Vec<f64>>,
    cdf: Vec<f64>,
}

impl DiscreteSampler {
    pub fn new(weights: &[f64], points: Vec<Vec<f64>>) -> Result<Self> {
        if weights.len() != points.len() || points.is_empty() {
            return Err(Error::Domain("weights/points mismatch".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Domain("weights must be a probability vector".into()));
        }
        let mut cdf = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w;
            cdf.push(acc);
        }
        Ok(DiscreteSampler { points, cdf })
    }
}

impl VectorSampler for DiscreteSampler {
    fn dim(&self) -> usize {
        self.points[0].len()
    }

    fn sample(&self, rng: &CounterRng, index: u64, lane: u64) -> Vec<f64> {
        let u = rng.f64_at(index, lane);
        let pos = self.cdf.partition_point(|&c| c < u);
        self.points[pos.min(self.points.len() - 1)].clone()
    }

    fn sign_symmetric(&self) -> bool {
        false
    }
}

/// Centered axis-aligned Gaussian.
pub struct GaussianSampler {
    pub sigma: Vec<f64>,
}

impl VectorSampler for GaussianSampler {
    fn dim(&self) -> usize {
        self.sigma.len()
    }

    fn sample(&self, rng: &CounterRng, index: u64, lane: u64) -> Vec<f64> {
        self.sigma
            .iter()
            .enumerate()
            .map(|(k, &s)| s * rng.normal_at(index, lane + 2 * k as u64))
            .collect()
    }

    fn sign_symmetric(&self) -> bool {
        true
    }
}

/// Uniform law on a centered ball.
pub struct UniformBallSampler {
    pub dim: usize,
    pub radius: f64,
}

impl VectorSampler for UniformBallSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &CounterRng, index: u64, lane: u64) -> Vec<f64> {
        rng.ball_point_at(index, lane, self.dim, self.radius)
    }

    fn sign_symmetric(&self) -> bool {
        true
    }
}

/// Monte Carlo order-2 diversity: reciprocal of the pair-averaged kernel,
/// with a delta-method standard error on the reciprocal.
pub fn diversity2_mc(sampler: &dyn VectorSampler, t: f64, mc: &McParams) -> Result<MCEstimate> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if mc.samples < 10_000 {
        return Err(Error::Precondition(format!(
            "mc.samples must be >= 10^4 pairs, got {}",
            mc.samples
        )));
    }
    let rng = CounterRng::new(mc.seed, 0xd1_7e);
    let n = mc.samples;
    let sum = chunked_sum(n, 1 << 14, |range| {
        range
            .map(|i| {
                let y = sampler.sample(&rng, i, 0);
                let y2 = sampler.sample(&rng, i, LANE_STRIDE);
                let dist = y
                    .iter()
                    .zip(&y2)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (-t * dist).exp()
            })
            .sum()
    });
    let sum_sq = chunked_sum(n, 1 << 14, |range| {
        range
            .map(|i| {
                let y = sampler.sample(&rng, i, 0);
                let y2 = sampler.sample(&rng, i, LANE_STRIDE);
                let dist = y
                    .iter()
                    .zip(&y2)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let k = (-t * dist).exp();
                k * k
            })
            .sum()
    });
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    let se_mean = (var / n as f64).sqrt();
    Ok(MCEstimate {
        value: 1.0 / mean,
        stderr: se_mean / (mean * mean),
        samples: n,
        seed: mc.seed,
    })
}

// ── exact kernel integrals over cell pairs ──────────────────────────

/// Integral of `exp(-t |x - y|)` for `x, y` ranging over two cells of edge
/// `h` whose centers sit `delta >= 0` apart on a line.
fn cell_kernel_1d(delta: f64, h: f64, t: f64) -> f64 {
    let th = t * h;
    if delta < 0.5 * h {
        // same cell: 2 (th - 1 + e^{-th}) / t^2, with a series branch since
        // the direct form cancels catastrophically for small th
        if th < 1e-4 {
            h * h * (1.0 - th / 3.0 + th * th / 12.0)
        } else {
            2.0 * (th - 1.0 + (-th).exp()) / (t * t)
        }
    } else {
        let e = (-t * (delta - h)).exp();
        let q = -(-th).exp_m1(); // 1 - e^{-th}, well conditioned
        e * q * q / (t * t)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integral of `exp(-t |u|) tent(u1 - d1) tent(u2 - d2) du` over the plane,
/// where `tent(s) = max(0, h - |s|)`: the exact kernel mass between two
/// cells of edge `h` at center offset `(d1, d2)`, by tensor quadrature
/// split at the tent apexes.
fn cell_kernel_2d(d1: f64, d2: f64, h: f64, t: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (xs, ws) = nodes;
    let m = xs.len();
    // per-axis quadrature points over [d - h, d + h], split at the apex
    let build = |d: f64| -> (Vec<f64>, Vec<f64>) {
        let mut pts = Vec::with_capacity(2 * m);
        let mut wts = Vec::with_capacity(2 * m);
        for (lo, hi) in [(d - h, d), (d, d + h)] {
            let c = 0.5 * (lo + hi);
            let r = 0.5 * (hi - lo);
            for j in 0..m {
                pts.push(c + r * xs[j]);
                wts.push(r * ws[j]);
            }
        }
        (pts, wts)
    };
    let (p1, w1) = build(d1);
    let (p2, w2) = build(d2);
    let tent = |s: f64, d: f64| (h - (s - d).abs()).max(0.0);
    let mut acc = 0.0;
    for (i, &u1) in p1.iter().enumerate() {
        let t1 = tent(u1, d1) * w1[i];
        if t1 == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (j, &u2) in p2.iter().enumerate() {
            let t2 = tent(u2, d2) * w2[j];
            if t2 == 0.0 {
                continue;
            }
            inner += t2 * (-t * (u1 * u1 + u2 * u2).sqrt()).exp();
        }
        acc += t1 * inner;
    }
    acc
}

/// Expected kernel `E exp(-t |Y - Y'|)` for independent copies of the grid
/// law, integrating the kernel exactly over every cell pair.
pub fn grid_kernel_expectation(f: &DensityGrid, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let h = f.spacing();
    let d = f.dim();
    let masses = f.masses();
    match d {
        1 => {
            let n = f.spec().shape[0];
            // cross-correlation by offset; far offsets underflow to zero
            let mut acc = 0.0;
            for offset in 0..n {
                let w = cell_kernel_1d(offset as f64 * h, h, t) / (h * h);
                if w == 0.0 || (offset > 0 && w < 1e-302) {
                    break;
                }
                let mut s = 0.0;
                for i in 0..(n - offset) {
                    s += masses[i] * masses[i + offset];
                }
                acc += if offset == 0 { w * s } else { 2.0 * w * s };
            }
            Ok(acc)
        }
        2 => {
            let (n0, n1) = (f.spec().shape[0], f.spec().shape[1]);
            // quadrature resolution follows the kernel decay across a cell
            let m = ((t * h).ceil() as usize).clamp(12, 120);
            let nodes = gauss_legendre(m);
            // cutoff: kernel underflows once t*(dist - h*sqrt(2)) > 700
            let cut = (700.0 / t + 1.5 * h) / h;
            let max_off = cut.ceil() as i64;
            let mut acc = 0.0;
            for o0 in -(max_off.min(n0 as i64 - 1))..=max_off.min(n0 as i64 - 1) {
                for o1 in -(max_off.min(n1 as i64 - 1))..=max_off.min(n1 as i64 - 1) {
                    let w = cell_kernel_2d(o0 as f64 * h, o1 as f64 * h, h, t, &nodes)
                        / (h * h * h * h);
                    if w == 0.0 {
                        continue;
                    }
                    let mut s = 0.0;
                    let i0_range = if o0 >= 0 { 0..(n0 as i64 - o0) } else { -o0..n0 as i64 };
                    for i0 in i0_range {
                        let j0 = i0 + o0;
                        let i1_range =
                            if o1 >= 0 { 0..(n1 as i64 - o1) } else { -o1..n1 as i64 };
                        for i1 in i1_range {
                            let j1 = i1 + o1;
                            s += masses[(i0 * n1 as i64 + i1) as usize]
                                * masses[(j0 * n1 as i64 + j1) as usize];
                        }
                    }
                    acc += w * s;
                }
            }
            Ok(acc)
        }
        _ => Err(Error::Domain("scaling kernel supports d <= 2".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRung {
    pub t: f64,
    /// `C_d * D_t / t^d`.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub enum ScalingVerdict {
    /// The ladder reached `t * spacing >= 50`; the gap is meaningful.
    Converged { last_relative_gap: f64 },
    /// Ladder too short for the asymptotic regime.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ScalingOutcome {
    pub rungs: Vec<ScalingRung>,
    /// `exp(h_2)` of the grid law.
    pub target: f64,
    pub monotone_trend: bool,
    pub verdict: ScalingVerdict,
    /// Present only for a conclusive ladder.
    pub report: Option<CheckReport>,
}

/// Relative band for the scaling-limit convergence check.
pub const SCALING_GAP_BAND: f64 = 0.05;

/// Follows `C_d D_t / t^d` along the ladder and compares the final rung to
/// `exp(h_2(f))` within five percent. A ladder whose top rung has
/// `t * spacing < 50` is inconclusive, not a failure.
pub fn scaling_limit_check(f: &DensityGrid, t_ladder: &[f64], seed: u64) -> Result<ScalingOutcome> {
    if t_ladder.is_empty() || t_ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("t_ladder must be strictly increasing".into()));
    }
    let d = f.dim();
    let c_d = scaling_constant(d)?;
    let target = f.renyi_entropy(2.0)?.exp();
    let mut rungs = Vec::with_capacity(t_ladder.len());
    for &t in t_ladder {
        let kernel = grid_kernel_expectation(f, t)?;
        let ratio = c_d / (kernel * t.powi(d as i32));
        rungs.push(ScalingRung { t, ratio });
    }
    let gaps: Vec<f64> = rungs
        .iter()
        .map(|r| (r.ratio - target).abs() / target)
        .collect();
    let half = gaps.len() / 2;
    let monotone_trend = gaps[half..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let conclusive = t_ladder.last().unwrap() * f.spacing() >= 50.0;
    let last_gap = *gaps.last().unwrap();
    let (verdict, report) = if conclusive {
        let rep = CheckReport::le_check(
            "T4.1-h2scaling",
            last_gap,
            SCALING_GAP_BAND,
            0.0,
            Provenance::Grid,
            Provenance::ClosedForm,
            seed,
        );
        (
            ScalingVerdict::Converged {
                last_relative_gap: last_gap,
            },
            Some(rep),
        )
    } else {
        (ScalingVerdict::Inconclusive, None)
    };
    Ok(ScalingOutcome {
        rungs,
        target,
        monotone_trend,
        verdict,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct H2ContractionOutcome {
    /// One row per `t` in the list.
    pub reports: Vec<CheckReport>,
    pub worst_margin: f64,
    /// `log D_id - log D_T` at the largest `t`: the implied `h_2` gap via
    /// the scaling route (informational).
    pub implied_h2_gap: f64,
}

/// Paired-sample check that contracting the discrete component can only
/// lower order-2 diversity of the sum: `D_t(T(X) + W) <= D_t(X + W)` for
/// every `t` in the list, at three combined standard errors.
pub fn check_h2_contraction(
    x: &DiscreteSampler,
    w: &dyn VectorSampler,
    t_map: &ContractionSpec,
    t_list: &[f64],
    mc: &McParams,
) -> Result<H2ContractionOutcome> {
    if !w.sign_symmetric() {
        return Err(Error::Precondition(
            "noise sampler must be symmetric under sign flips".into(),
        ));
    }
    if x.dim() != w.dim() || x.dim() != t_map.dim() {
        return Err(Error::SizeMismatch("X, W and T must share a dimension".into()));
    }
    if t_list.is_empty() || t_list.iter().any(|&t| t.is_nan() || t <= 0.0) {
        return Err(Error::Domain("t_list must contain positive values".into()));
    }
    if mc.samples < 10_000 {
        return Err(Error::Precondition(format!(
            "mc.samples must be >= 10^4 pairs, got {}",
            mc.samples
        )));
    }
    // Precompute mapped support once; draws then share indices across arms.
    let mapped: Vec<Vec<f64>> = x
        .points
        .iter()
        .map(|p| t_map.apply(p))
        .collect::<Result<_>>()?;
    let rng = CounterRng::new(mc.seed, 0x42_42);
    let n = mc.samples;
    let dim = x.dim();
    let mut reports = Vec::with_capacity(t_list.len());
    let mut worst = f64::INFINITY;
    let mut implied = 0.0;
    for &t in t_list {
        let stats = |arm_mapped: bool| -> (f64, f64) {
            let sum = chunked_sum(n, 1 << 14, |range| {
                range
                    .map(|i| {
                        let u1 = rng.f64_at(i, 0);
                        let u2 = rng.f64_at(i, 1);
                        let pick = |u: f64| x.cdf.partition_point(|&c| c < u).min(x.points.len() - 1);
                        let (a, b) = (pick(u1), pick(u2));
                        let xa: &[f64] = if arm_mapped { &mapped[a] } else { &x.points[a] };
                        let xb: &[f64] = if arm_mapped { &mapped[b] } else { &x.points[b] };
                        let wa = w.sample(&rng, i, 2 * LANE_STRIDE);
                        let wb = w.sample(&rng, i, 3 * LANE_STRIDE);
                        let dist = (0..dim)
                            .map(|k| {
                                let dxk = (xa[k] + wa[k]) - (xb[k] + wb[k]);
                                dxk * dxk
                            })
                            .sum::<f64>()
                            .sqrt();
                        (-t * dist).exp()
                    })
                    .sum()
            });
            let sum_sq = chunked_sum(n, 1 << 14, |range| {
                range
                    .map(|i| {
                        let u1 = rng.f64_at(i, 0);
                        let u2 = rng.f64_at(i, 1);
                        let pick = |u: f64| x.cdf.partition_point(|&c| c < u).min(x.points.len() - 1);
                        let (a, b) = (pick(u1), pick(u2));
                        let xa: &[f64] = if arm_mapped { &mapped[a] } else { &x.points[a] };
                        let xb: &[f64] = if arm_mapped { &mapped[b] } else { &x.points[b] };
                        let wa = w.sample(&rng, i, 2 * LANE_STRIDE);
                        let wb = w.sample(&rng, i, 3 * LANE_STRIDE);
                        let dist = (0..dim)
                            .map(|k| {
                                let dxk = (xa[k] + wa[k]) - (xb[k] + wb[k]);
                                dxk * dxk
                            })
                            .sum::<f64>()
                            .sqrt();
                        let kv = (-t * dist).exp();
                        kv * kv
                    })
                    .sum()
            });
            let mean = sum / n as f64;
            let var = (sum_sq / n as f64 - mean * mean).max(0.0);
            (mean, (var / n as f64).sqrt())
        };
        let (k_id, se_id) = stats(false);
        let (k_t, se_t) = stats(true);
        let d_id = 1.0 / k_id;
        let d_t = 1.0 / k_t;
        let se_did = se_id / (k_id * k_id);
        let se_dt = se_t / (k_t * k_t);
        let tol = 3.0 * (se_did + se_dt);
        let rep = CheckReport::le_check(
            "T4.2-h2contraction",
            d_t,
            d_id,
            tol,
            Provenance::Mc,
            Provenance::Mc,
            mc.seed,
        )
        .with_geometry(x.points.len(), dim, se_did + se_dt, n);
        worst = worst.min(rep.margin);
        implied = d_id.ln() - d_t.ln();
        reports.push(rep);
    }
    Ok(H2ContractionOutcome {
        reports,
        worst_margin: worst,
        implied_h2_gap: implied,
    })
}

/// Per-dimension Rényi comparison overhead from the order-2 result:
/// `sgn(2 - alpha) (log(alpha) / (alpha - 1) - log 2)`, with the inner term
/// continued by its limit 1 at `alpha = 1`. The caller multiplies by `d`.
pub fn renyi_gap_bound(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let inner = if (alpha - 1.0).abs() < 1e-4 {
        // log(a)/(a-1) = 1 - (a-1)/2 + (a-1)^2/3 - ...
        let e = alpha - 1.0;
        1.0 - e / 2.0 + e * e / 3.0
    } else {
        alpha.ln() / (alpha - 1.0)
    };
    Ok((2.0 - alpha).signum() * (inner - 2f64.ln()))
}
