//! Convex polygons in the plane: intrinsic volumes, shadow systems,
//! Minkowski sums, and point queries.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Signed-area threshold below which a vertex triple counts as collinear.
/// Degenerate inputs are rejected, not repaired; silent repair would mask
/// generator bugs upstream.
const COLLINEAR_EPS: f64 = 1e-10;

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ConvexPolygon {
    /// Validates orientation (signed area > 0) and strict convexity; any
    /// consecutive triple with |cross product| below 1e-10 is rejected.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "{} vertices, need >= 3",
                vertices.len()
            )));
        }
        if vertices
            .iter()
            .any(|v| !v[0].is_finite() || !v[1].is_finite())
        {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c <= COLLINEAR_EPS {
                return Err(Error::InvalidPolygon(format!(
                    "vertex triple at {i} has cross product {c:.3e}; need counterclockwise, strictly convex input"
                )));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    /// Builds from a counterclockwise chain that may contain repeated or
    /// collinear points (as produced by chord constructions), dropping them.
    fn from_chain(mut chain: Vec<[f64; 2]>) -> Result<Self> {
        chain.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        if chain.len() > 1 {
            let first = chain[0];
            let last = *chain.last().unwrap();
            if (first[0] - last[0]).abs() < 1e-14 && (first[1] - last[1]).abs() < 1e-14 {
                chain.pop();
            }
        }
        // Scale-relative collinearity drop.
        let scale = chain
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
            .max(1.0);
        let eps = 1e-12 * scale * scale;
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(chain.len());
        for &p in &chain {
            while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= eps {
                out.pop();
            }
            out.push(p);
        }
        // Wrap-around cleanup.
        loop {
            let n = out.len();
            if n < 3 {
                return Err(Error::InvalidPolygon("chain collapsed to a segment".into()));
            }
            if cross(out[n - 2], out[n - 1], out[0]) <= eps {
                out.pop();
                continue;
            }
            if cross(out[n - 1], out[0], out[1]) <= eps {
                out.remove(0);
                continue;
            }
            break;
        }
        ConvexPolygon::new(out)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Shoelace area (positive for the counterclockwise invariant).
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let p = self.vertices[i];
                let q = self.vertices[(i + 1) % n];
                ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt()
            })
            .sum()
    }

    pub fn contains(&self, point: [f64; 2]) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], point) >= 0.0)
    }

    /// Euclidean distance from a point to the polygon (0 inside).
    pub fn distance(&self, point: [f64; 2]) -> f64 {
        if self.contains(point) {
            return 0.0;
        }
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let dx = q[0] - p[0];
            let dy = q[1] - p[1];
            let len2 = dx * dx + dy * dy;
            let t = (((point[0] - p[0]) * dx + (point[1] - p[1]) * dy) / len2).clamp(0.0, 1.0);
            let cx = p[0] + t * dx - point[0];
            let cy = p[1] + t * dy - point[1];
            best = best.min((cx * cx + cy * cy).sqrt());
        }
        best
    }

    /// Axis-aligned bounding box as (lo, hi).
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Applies an affine map to every vertex, restoring counterclockwise
    /// orientation if the map flips it. Degenerate (rank-deficient) images
    /// are rejected.
    pub fn map_affine(&self, a: &crate::linalg::Mat, shift: &[f64]) -> Result<ConvexPolygon> {
        let mut verts: Vec<[f64; 2]> = self
            .vertices
            .iter()
            .map(|v| {
                let y = a.apply(&[v[0], v[1]]);
                [y[0] + shift[0], y[1] + shift[1]]
            })
            .collect();
        if a.det() < 0.0 {
            verts.reverse();
        }
        ConvexPolygon::from_chain(verts)
    }
}

/// First three intrinsic volumes of a planar convex body:
/// `(1, perimeter / 2, area)`.
pub fn intrinsic_volumes_2d(k: &ConvexPolygon) -> (f64, f64, f64) {
    (1.0, 0.5 * k.perimeter(), k.area())
}

/// Area of the parallel body `K + r B` by the Steiner formula
/// `area + perimeter * r + pi * r^2`.
pub fn dilated_area(k: &ConvexPolygon, r: f64) -> f64 {
    k.area() + k.perimeter() * r + std::f64::consts::PI * r * r
}

/// Shadow-system deformation of `K` along the given axis.
///
/// Every chord of `K` in the axis direction at transverse coordinate `x`,
/// with endpoints `t1 <= t2`, is replaced by the centered chord of the same
/// length shifted to `lambda * (t1 + t2) / 2`. The result is convex and has
/// the same area; `lambda = 1` returns `K`, `lambda = -1` its reflection.
pub fn shadow_system(k: &ConvexPolygon, axis: usize, lambda: f64) -> Result<ConvexPolygon> {
    if axis > 1 {
        return Err(Error::Domain(format!("axis must be 0 or 1, got {axis}")));
    }
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda must lie in [-1, 1], got {lambda}")));
    }
    let t_axis = axis; // chord direction
    let s_axis = 1 - axis; // transverse direction

    let mut breaks: Vec<f64> = k.vertices().iter().map(|v| v[s_axis]).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    // Chord endpoints at a fixed transverse coordinate.
    let chord = |s: f64| -> (f64, f64) {
        let verts = k.vertices();
        let n = verts.len();
        let mut tmin = f64::INFINITY;
        let mut tmax = f64::NEG_INFINITY;
        for i in 0..n {
            let p = verts[i];
            let q = verts[(i + 1) % n];
            let (ps, qs) = (p[s_axis], q[s_axis]);
            if (ps - s).abs() == 0.0 {
                tmin = tmin.min(p[t_axis]);
                tmax = tmax.max(p[t_axis]);
            }
            if (ps < s && qs > s) || (qs < s && ps > s) {
                let t = p[t_axis] + (s - ps) * (q[t_axis] - p[t_axis]) / (qs - ps);
                tmin = tmin.min(t);
                tmax = tmax.max(t);
            }
        }
        (tmin, tmax)
    };

    let mut upper = Vec::with_capacity(breaks.len());
    let mut lower = Vec::with_capacity(breaks.len());
    for &s in &breaks {
        let (t1, t2) = chord(s);
        let half = 0.5 * (t2 - t1);
        let mid = lambda * 0.5 * (t1 + t2);
        let mut hi = [0.0; 2];
        let mut lo = [0.0; 2];
        hi[t_axis] = mid + half;
        hi[s_axis] = s;
        lo[t_axis] = mid - half;
        lo[s_axis] = s;
        upper.push(hi);
        lower.push(lo);
    }

    // Stitch the two monotone chains counterclockwise.
    let mut chain = Vec::with_capacity(2 * breaks.len());
    if axis == 0 {
        // chords along x: right boundary bottom-to-top, left top-to-bottom
        chain.extend(upper.iter().cloned());
        chain.extend(lower.iter().rev().cloned());
    } else {
        // chords along y: bottom boundary left-to-right, top right-to-left
        chain.extend(lower.iter().cloned());
        chain.extend(upper.iter().rev().cloned());
    }
    ConvexPolygon::from_chain(chain)
}

/// Minkowski sum of two convex polygons by merging edge vectors in angular
/// order.
pub fn minkowski_sum(a: &ConvexPolygon, b: &ConvexPolygon) -> Result<ConvexPolygon> {
    // Rotate each vertex cycle to start at the bottom-most (then left-most)
    // vertex so edge angles increase monotonically over [0, 2pi).
    let reorder = |p: &ConvexPolygon| -> Vec<[f64; 2]> {
        let verts = p.vertices();
        let start = verts
            .iter()
            .enumerate()
            .min_by(|(_, u), (_, v)| {
                (u[1], u[0]).partial_cmp(&(v[1], v[0])).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        let mut out = Vec::with_capacity(verts.len());
        for i in 0..verts.len() {
            out.push(verts[(start + i) % verts.len()]);
        }
        out
    };
    let va = reorder(a);
    let vb = reorder(b);
    let edges = |v: &[[f64; 2]]| -> Vec<[f64; 2]> {
        (0..v.len())
            .map(|i| {
                let p = v[i];
                let q = v[(i + 1) % v.len()];
                [q[0] - p[0], q[1] - p[1]]
            })
            .collect()
    };
    let ea = edges(&va);
    let eb = edges(&vb);
    let angle = |e: &[f64; 2]| -> f64 {
        let t = e[1].atan2(e[0]);
        if t < 0.0 {
            t + 2.0 * std::f64::consts::PI
        } else {
            t
        }
    };
    let mut merged = Vec::with_capacity(ea.len() + eb.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < ea.len() || j < eb.len() {
        let take_a = match (i < ea.len(), j < eb.len()) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => angle(&ea[i]) <= angle(&eb[j]),
            (false, false) => unreachable!(),
        };
        if take_a {
            merged.push(ea[i]);
            i += 1;
        } else {
            merged.push(eb[j]);
            j += 1;
        }
    }
    let mut chain = Vec::with_capacity(merged.len());
    let mut cur = [va[0][0] + vb[0][0], va[0][1] + vb[0][1]];
    chain.push(cur);
    for e in &merged[..merged.len() - 1] {
        cur = [cur[0] + e[0], cur[1] + e[1]];
        chain.push(cur);
    }
    ConvexPolygon::from_chain(chain)
}

/// Convex hull of a point set (Andrew monotone chain), counterclockwise.
pub fn convex_hull(points: &[[f64; 2]]) -> Result<ConvexPolygon> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::InvalidPolygon("hull needs >= 3 distinct points".into()));
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    ConvexPolygon::from_chain(lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::rng::CounterRng;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn triangle() -> ConvexPolygon {
        ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    fn random_polygon(rng: &CounterRng, trial: u64, k: usize) -> ConvexPolygon {
        loop {
            let pts: Vec<[f64; 2]> = (0..k)
                .map(|i| {
                    [
                        rng.range_at(trial * 64 + i as u64, 0, -2.0, 2.0),
                        rng.range_at(trial * 64 + i as u64, 1, -2.0, 2.0),
                    ]
                })
                .collect();
            if let Ok(p) = convex_hull(&pts) {
                return p;
            }
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        // clockwise
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        // collinear triple
        assert!(
            ConvexPolygon::new(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [0.5, 1.0]]).is_err()
        );
        // too few
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn intrinsic_volumes_of_reference_bodies() {
        let (v0, v1, v2) = intrinsic_volumes_2d(&unit_square());
        assert_eq!(v0, 1.0);
        assert!((v1 - 2.0).abs() < 1e-12);
        assert!((v2 - 1.0).abs() < 1e-12);

        let (t0, t1, t2) = intrinsic_volumes_2d(&triangle());
        assert_eq!(t0, 1.0);
        assert!((t1 - (2.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((t2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_volumes_scale_homogeneously() {
        let rng = CounterRng::new(31, 0);
        let half = Mat::diag(&[0.5, 0.5]);
        for trial in 0..20u64 {
            let k = random_polygon(&rng, trial, 7);
            let hk = k.map_affine(&half, &[0.0, 0.0]).unwrap();
            let (_, v1, v2) = intrinsic_volumes_2d(&k);
            let (_, w1, w2) = intrinsic_volumes_2d(&hk);
            assert!((w1 - 0.5 * v1).abs() < 1e-9);
            assert!((w2 - 0.25 * v2).abs() < 1e-9);
        }
    }

    #[test]
    fn intrinsic_volume_monotonicity_under_contractions() {
        let rng = CounterRng::new(32, 0);
        for trial in 0..50u64 {
            let k = random_polygon(&rng, trial, 6);
            // random linear contraction via scaled rotation composition
            let th1 = rng.range_at(trial, 10, 0.0, std::f64::consts::TAU);
            let th2 = rng.range_at(trial, 11, 0.0, std::f64::consts::TAU);
            let s1 = rng.range_at(trial, 12, 0.1, 1.0);
            let s2 = rng.range_at(trial, 13, 0.1, 1.0);
            let rot = |t: f64| {
                Mat::from_rows(&[vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]).unwrap()
            };
            let a = rot(th1).matmul(&Mat::diag(&[s1, s2])).matmul(&rot(th2));
            let ak = k.map_affine(&a, &[0.0, 0.0]).unwrap();
            let (_, v1, v2) = intrinsic_volumes_2d(&k);
            let (_, w1, w2) = intrinsic_volumes_2d(&ak);
            assert!(w1 <= v1 + 1e-9, "trial {trial}: V1 {w1} > {v1}");
            assert!(w2 <= v2 + 1e-9, "trial {trial}: V2 {w2} > {v2}");
        }
    }

    #[test]
    fn shadow_identity_and_reflection() {
        let k = triangle();
        for axis in [0usize, 1] {
            let same = shadow_system(&k, axis, 1.0).unwrap();
            assert_eq!(same.vertices().len(), 3);
            for v in k.vertices() {
                assert!(
                    same.vertices()
                        .iter()
                        .any(|w| (w[0] - v[0]).abs() < 1e-12 && (w[1] - v[1]).abs() < 1e-12),
                    "vertex {v:?} missing at lambda = 1"
                );
            }
            let refl = shadow_system(&k, axis, -1.0).unwrap();
            for v in k.vertices() {
                let mut m = *v;
                m[axis] = -m[axis];
                assert!(
                    refl.vertices()
                        .iter()
                        .any(|w| (w[0] - m[0]).abs() < 1e-12 && (w[1] - m[1]).abs() < 1e-12),
                    "reflected vertex {m:?} missing at lambda = -1"
                );
            }
        }
    }

    #[test]
    fn shadow_preserves_area() {
        let rng = CounterRng::new(33, 0);
        for trial in 0..50u64 {
            let k = random_polygon(&rng, trial, 8);
            let lambda = rng.range_at(trial, 20, -1.0, 1.0);
            let axis = (rng.u64_at(trial, 21) % 2) as usize;
            let s = shadow_system(&k, axis, lambda).unwrap();
            let rel = (s.area() - k.area()).abs() / k.area();
            assert!(rel < 1e-9, "trial {trial}: area drift {rel:.2e}");
        }
        // symmetrized triangle keeps its area
        let s = shadow_system(&triangle(), 0, 0.0).unwrap();
        assert!((s.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn minkowski_square_plus_square() {
        let s = unit_square();
        let sum = minkowski_sum(&s, &s).unwrap();
        assert!((sum.area() - 4.0).abs() < 1e-12);
        assert!((sum.perimeter() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn minkowski_area_formula_against_steiner_like_identity() {
        // For convex K and L = eps * square, area(K + L) >= area(K); also
        // symmetric in the arguments.
        let rng = CounterRng::new(34, 0);
        for trial in 0..20u64 {
            let a = random_polygon(&rng, trial * 2, 6);
            let b = random_polygon(&rng, trial * 2 + 1, 5);
            let ab = minkowski_sum(&a, &b).unwrap();
            let ba = minkowski_sum(&b, &a).unwrap();
            assert!((ab.area() - ba.area()).abs() < 1e-9);
            assert!(ab.area() >= a.area() + b.area() - 1e-9);
        }
    }

    #[test]
    fn distance_and_containment() {
        let s = unit_square();
        assert!(s.contains([0.5, 0.5]));
        assert!(s.contains([0.0, 0.0]));
        assert!(!s.contains([1.2, 0.5]));
        assert!((s.distance([0.5, 0.5]) - 0.0).abs() < 1e-15);
        assert!((s.distance([2.0, 0.5]) - 1.0).abs() < 1e-12);
        assert!((s.distance([2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dilated_area_matches_mc_oracle() {
        // Hit-or-miss oracle for the parallel body K + rB: a point is in
        // it iff its distance to K is at most r.
        let k = ConvexPolygon::new(vec![[0.0, 0.0], [2.0, 0.3], [1.5, 1.8], [0.2, 1.2]]).unwrap();
        let r = 0.8;
        let (lo, hi) = k.bounding_box();
        let (blo, bhi) = ([lo[0] - r, lo[1] - r], [hi[0] + r, hi[1] + r]);
        let box_vol = (bhi[0] - blo[0]) * (bhi[1] - blo[1]);
        let rng = CounterRng::new(71, 0);
        let n = 2_000_000u64;
        let mut hits = 0u64;
        for i in 0..n {
            let p = [
                rng.range_at(i, 0, blo[0], bhi[0]),
                rng.range_at(i, 1, blo[1], bhi[1]),
            ];
            if k.distance(p) <= r {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        let mc = box_vol * frac;
        let se = box_vol * (frac * (1.0 - frac) / n as f64).sqrt();
        let exact = dilated_area(&k, r);
        assert!(
            (mc - exact).abs() <= 3.0 * se,
            "MC {mc} vs Steiner {exact} (se {se})"
        );
    }

    #[test]
    fn dilated_area_matches_unit_disk_limit() {
        // A small triangle dilated by r = 1 is close to the unit disk:
        // area + perimeter * r + pi r^2 with both polygon terms tiny.
        let t = ConvexPolygon::new(vec![[0.0, 0.0], [1e-4, 0.0], [0.0, 1e-4]]).unwrap();
        let a = dilated_area(&t, 1.0);
        assert!((a - std::f64::consts::PI).abs() < 1e-3);
    }
}
