//! Counter-based random numbers for reproducible, parallel Monte Carlo.
//!
//! Every draw is a pure function of `(seed, stream, index, lane)`, so a
//! sampling loop can be split across any number of workers in any order and
//! still produce the same values. There is no mutable generator state to
//! hand around or to re-seed per thread.

use std::f64::consts::PI;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const LANE_SALT: u64 = 0xd1b5_4a32_d192_ed03;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed counter generator. Cloning or sharing it is free; all methods
/// take `&self`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(seed ^ mix64(stream.wrapping_mul(GAMMA)));
        CounterRng { key }
    }

    /// Derive an independent stream, e.g. one per suite row.
    pub fn substream(&self, stream: u64) -> Self {
        CounterRng {
            key: mix64(self.key ^ mix64(stream.wrapping_mul(LANE_SALT))),
        }
    }

    #[inline]
    pub fn u64_at(&self, index: u64, lane: u64) -> u64 {
        let h = mix64(self.key ^ index.wrapping_mul(GAMMA));
        mix64(h ^ lane.wrapping_mul(LANE_SALT))
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn f64_at(&self, index: u64, lane: u64) -> f64 {
        (self.u64_at(index, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn range_at(&self, index: u64, lane: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.f64_at(index, lane)
    }

    /// Standard normal via Box-Muller; consumes lanes `lane` and `lane + 1`.
    #[inline]
    pub fn normal_at(&self, index: u64, lane: u64) -> f64 {
        // Guard u1 away from 0 so the log is finite.
        let u1 = (self.u64_at(index, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let u1 = u1.max(f64::MIN_POSITIVE);
        let u2 = self.f64_at(index, lane + 1);
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    /// Standard normal vector of length `dim`; consumes lanes
    /// `lane..lane + 2 * dim`.
    pub fn normal_vec_at(&self, index: u64, lane: u64, dim: usize) -> Vec<f64> {
        (0..dim)
            .map(|k| self.normal_at(index, lane + 2 * k as u64))
            .collect()
    }

    /// Uniform point in the box `[lo, hi)^dim`; consumes lanes
    /// `lane..lane + dim`.
    pub fn box_point_at(&self, index: u64, lane: u64, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        lo.iter()
            .zip(hi)
            .enumerate()
            .map(|(k, (&a, &b))| self.range_at(index, lane + k as u64, a, b))
            .collect()
    }

    /// Uniform point in the centered ball of the given radius (rejection
    /// from the bounding box; expected < 2 tries in d <= 3). Lane usage is
    /// bounded by `64 * dim` per index.
    pub fn ball_point_at(&self, index: u64, lane: u64, dim: usize, radius: f64) -> Vec<f64> {
        let mut l = lane;
        loop {
            let p: Vec<f64> = (0..dim)
                .map(|k| self.range_at(index, l + k as u64, -radius, radius))
                .collect();
            if p.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
                return p;
            }
            l += dim as u64;
        }
    }
}

/// Deterministic chunked reduction: applies `chunk_sum` to fixed-size index
/// chunks in parallel and adds the partial sums in chunk order, so the
/// result does not depend on the worker count.
pub fn chunked_sum<F>(total: u64, chunk: u64, chunk_sum: F) -> f64
where
    F: Fn(std::ops::Range<u64>) -> f64 + Sync,
{
    use rayon::prelude::*;
    let n_chunks = total.div_ceil(chunk);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            chunk_sum(lo..hi)
        })
        .collect();
    partials.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;

    #[test]
    fn draws_are_pure_functions_of_coordinates() {
        let a = CounterRng::new(42, 7);
        let b = CounterRng::new(42, 7);
        for i in 0..100 {
            assert_eq!(a.u64_at(i, 0), b.u64_at(i, 0));
            assert_eq!(a.f64_at(i, 3).to_bits(), b.f64_at(i, 3).to_bits());
        }
        let c = CounterRng::new(42, 8);
        assert_ne!(a.u64_at(5, 0), c.u64_at(5, 0));
    }

    #[test]
    fn parallel_order_does_not_change_values() {
        let rng = CounterRng::new(1, 0);
        let seq: Vec<u64> = (0..1000u64).map(|i| rng.u64_at(i, 0)).collect();
        let par: Vec<u64> = (0..1000u64)
            .into_par_iter()
            .map(|i| rng.u64_at(i, 0))
            .collect();
        assert_eq!(seq, par);
    }

    #[test]
    fn uniform_mean_is_half() {
        let rng = CounterRng::new(9, 1);
        let n = 200_000u64;
        let sum: f64 = (0..n).map(|i| rng.f64_at(i, 0)).sum();
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn normal_moments() {
        let rng = CounterRng::new(3, 2);
        let n = 200_000u64;
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in 0..n {
            let x = rng.normal_at(i, 0);
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn ball_points_stay_inside() {
        let rng = CounterRng::new(11, 4);
        for i in 0..2000 {
            let p = rng.ball_point_at(i, 0, 3, 2.5);
            let r2: f64 = p.iter().map(|x| x * x).sum();
            assert!(r2 <= 2.5 * 2.5 + 1e-12);
        }
    }

    #[test]
    fn chunked_sum_matches_sequential() {
        let rng = CounterRng::new(5, 5);
        let direct: f64 = (0..10_000u64).map(|i| rng.f64_at(i, 0)).sum::<f64>();
        // Same chunk size must give bit-identical results in parallel.
        let chunked = chunked_sum(10_000, 256, |r| r.map(|i| rng.f64_at(i, 0)).sum());
        let chunked2 = chunked_sum(10_000, 256, |r| r.map(|i| rng.f64_at(i, 0)).sum());
        assert_eq!(chunked.to_bits(), chunked2.to_bits());
        assert!((direct - chunked).abs() < 1e-9);
    }
}
