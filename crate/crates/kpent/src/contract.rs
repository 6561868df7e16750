//! Contraction maps of Euclidean space: representation, Lipschitz
//! estimation, and pushforwards of grid densities.
//!
//! Affine and diagonal kinds carry enough structure for exact Lipschitz
//! constants; coordinatewise, gradient-of-convex and black-box sampled
//! kinds are probed on seeded random pairs, which yields a lower bound,
//! never a certificate. Checks that need a certified constant must rely on
//! `declared_lip`.

use crate::error::{Error, Result};
use crate::grid::{DensityGrid, GridSpec};
use crate::linalg::{largest_singular_value, svd, Mat};
use crate::rng::CounterRng;
use std::sync::Arc;

/// Default sub-sampling depth for [`pushforward_grid`]; bias shrinks like
/// 1 / substeps.
pub const DEFAULT_SUBSTEPS: usize = 4;

/// Mass fraction allowed to fall outside the pushforward target.
pub const COVERAGE_LIMIT: f64 = 1e-6;

type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type VectorMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// The map itself. Function-bearing kinds are ephemeral: they cannot be
/// serialized and must be reconstructed by the caller.
#[derive(Clone)]
pub enum MapKind {
    /// `x -> A x + b`.
    Affine { matrix: Mat, shift: Vec<f64> },
    /// `x -> (scale_1 x_1, ..., scale_d x_d)`.
    Diagonal { scales: Vec<f64> },
    /// One 1-Lipschitz scalar map per coordinate (a strong contraction).
    Coordinatewise { components: Vec<ScalarMap> },
    /// Gradient of a smooth convex potential, supplied as the gradient.
    GradientConvex { dim: usize, gradient: VectorMap },
    /// Black-box point map.
    Sampled { dim: usize, map: VectorMap },
}

impl std::fmt::Debug for MapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapKind::Affine { matrix, shift } => f
                .debug_struct("Affine")
                .field("matrix", matrix)
                .field("shift", shift)
                .finish(),
            MapKind::Diagonal { scales } => {
                f.debug_struct("Diagonal").field("scales", scales).finish()
            }
            MapKind::Coordinatewise { components } => f
                .debug_struct("Coordinatewise")
                .field("components", &components.len())
                .finish(),
            MapKind::GradientConvex { dim, .. } => f
                .debug_struct("GradientConvex")
                .field("dim", dim)
                .finish(),
            MapKind::Sampled { dim, .. } => {
                f.debug_struct("Sampled").field("dim", dim).finish()
            }
        }
    }
}

/// A tagged contraction `T` with optional certified Lipschitz constant.
#[derive(Debug, Clone)]
pub struct ContractionSpec {
    pub kind: MapKind,
    pub declared_lip: Option<f64>,
}

fn check_declared(declared_lip: Option<f64>) -> Result<()> {
    if let Some(l) = declared_lip {
        if !(l > 0.0 && l <= 1.0) {
            return Err(Error::Domain(format!(
                "declared_lip must lie in (0, 1], got {l}"
            )));
        }
    }
    Ok(())
}

impl ContractionSpec {
    pub fn affine(matrix: Mat, shift: Vec<f64>) -> Result<Self> {
        if shift.len() != matrix.n {
            return Err(Error::Domain("shift length must match matrix dim".into()));
        }
        let sigma = largest_singular_value(&matrix)?;
        if sigma > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "affine map has operator norm {sigma} > 1"
            )));
        }
        Ok(ContractionSpec {
            kind: MapKind::Affine { matrix, shift },
            declared_lip: None,
        })
    }

    pub fn linear(matrix: Mat) -> Result<Self> {
        let d = matrix.n;
        Self::affine(matrix, vec![0.0; d])
    }

    pub fn identity(dim: usize) -> Self {
        ContractionSpec {
            kind: MapKind::Affine {
                matrix: Mat::identity(dim),
                shift: vec![0.0; dim],
            },
            declared_lip: Some(1.0),
        }
    }

    pub fn diagonal(scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() || scales.len() > 3 {
            return Err(Error::Domain("diagonal map needs 1..=3 scales".into()));
        }
        if scales.iter().any(|s| s.abs() > 1.0) {
            return Err(Error::Domain(format!(
                "diagonal entries must satisfy |scale| <= 1, got {scales:?}"
            )));
        }
        Ok(ContractionSpec {
            kind: MapKind::Diagonal { scales },
            declared_lip: None,
        })
    }

    /// Uniform scaling `x -> lambda x`.
    pub fn scaling(dim: usize, lambda: f64) -> Result<Self> {
        Self::diagonal(vec![lambda; dim])
    }

    pub fn coordinatewise(components: Vec<ScalarMap>, declared_lip: Option<f64>) -> Result<Self> {
        if components.is_empty() || components.len() > 3 {
            return Err(Error::Domain("coordinatewise map needs 1..=3 components".into()));
        }
        check_declared(declared_lip)?;
        Ok(ContractionSpec {
            kind: MapKind::Coordinatewise { components },
            declared_lip,
        })
    }

    pub fn gradient_convex(
        dim: usize,
        gradient: VectorMap,
        declared_lip: Option<f64>,
    ) -> Result<Self> {
        check_declared(declared_lip)?;
        Ok(ContractionSpec {
            kind: MapKind::GradientConvex { dim, gradient },
            declared_lip,
        })
    }

    pub fn sampled(dim: usize, map: VectorMap, declared_lip: Option<f64>) -> Result<Self> {
        check_declared(declared_lip)?;
        Ok(ContractionSpec {
            kind: MapKind::Sampled { dim, map },
            declared_lip,
        })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            MapKind::Affine { matrix, .. } => matrix.n,
            MapKind::Diagonal { scales } => scales.len(),
            MapKind::Coordinatewise { components } => components.len(),
            MapKind::GradientConvex { dim, .. } | MapKind::Sampled { dim, .. } => *dim,
        }
    }

    /// Evaluates `T(x)`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Domain(format!(
                "point has dim {}, map has dim {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(match &self.kind {
            MapKind::Affine { matrix, shift } => {
                let mut y = matrix.apply(x);
                for (yi, b) in y.iter_mut().zip(shift) {
                    *yi += b;
                }
                y
            }
            MapKind::Diagonal { scales } => {
                x.iter().zip(scales).map(|(&v, &s)| s * v).collect()
            }
            MapKind::Coordinatewise { components } => {
                x.iter().zip(components).map(|(&v, c)| c(v)).collect()
            }
            MapKind::GradientConvex { gradient, .. } => gradient(x),
            MapKind::Sampled { map, .. } => map(x),
        })
    }

    /// JSON form (kind tag + parameters). Function-bearing kinds are
    /// ephemeral and refuse to serialize.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        match &self.kind {
            MapKind::Affine { matrix, shift } => Ok(serde_json::json!({
                "kind": "affine",
                "matrix": matrix.to_rows(),
                "shift": shift,
                "declared_lip": self.declared_lip,
            })),
            MapKind::Diagonal { scales } => Ok(serde_json::json!({
                "kind": "diagonal",
                "scales": scales,
                "declared_lip": self.declared_lip,
            })),
            MapKind::Coordinatewise { .. } => Err(Error::EphemeralKind("coordinatewise")),
            MapKind::GradientConvex { .. } => Err(Error::EphemeralKind("gradient_convex")),
            MapKind::Sampled { .. } => Err(Error::EphemeralKind("sampled")),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Domain("missing kind tag".into()))?;
        let declared: Option<f64> = v.get("declared_lip").and_then(|d| d.as_f64());
        let mut spec = match kind {
            "affine" => {
                let rows: Vec<Vec<f64>> =
                    serde_json::from_value(v["matrix"].clone())?;
                let shift: Vec<f64> = serde_json::from_value(v["shift"].clone())?;
                ContractionSpec::affine(Mat::from_rows(&rows)?, shift)?
            }
            "diagonal" => {
                let scales: Vec<f64> = serde_json::from_value(v["scales"].clone())?;
                ContractionSpec::diagonal(scales)?
            }
            other => {
                return Err(Error::Domain(format!(
                    "kind {other:?} is not deserializable"
                )))
            }
        };
        check_declared(declared)?;
        spec.declared_lip = declared;
        Ok(spec)
    }
}

/// How a Lipschitz value was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LipschitzKind {
    /// Structural: singular value or diagonal maximum.
    Exact,
    /// Sampled supremum over probe pairs; a lower bound on the true
    /// constant.
    LowerBound { probes: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct LipschitzEstimate {
    pub value: f64,
    pub kind: LipschitzKind,
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub pairs: usize,
    pub seed: u64,
    /// Probe points are standard normals scaled by this factor.
    pub scale: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            pairs: 256,
            seed: 0x5eed,
            scale: 3.0,
        }
    }
}

/// Lipschitz constant of the map: exact for affine (power iteration on
/// `A^T A` to 1e-10) and diagonal kinds, probe-estimated otherwise.
pub fn lipschitz_constant(
    t: &ContractionSpec,
    probe: Option<ProbeConfig>,
) -> Result<LipschitzEstimate> {
    match &t.kind {
        MapKind::Affine { matrix, .. } => Ok(LipschitzEstimate {
            value: largest_singular_value(matrix)?,
            kind: LipschitzKind::Exact,
        }),
        MapKind::Diagonal { scales } => Ok(LipschitzEstimate {
            value: scales.iter().map(|s| s.abs()).fold(0.0, f64::max),
            kind: LipschitzKind::Exact,
        }),
        _ => {
            let cfg = probe.unwrap_or_default();
            if cfg.pairs < 2 {
                return Err(Error::LipschitzEstimation(format!(
                    "probe budget {} < 2",
                    cfg.pairs
                )));
            }
            let dim = t.dim();
            let rng = CounterRng::new(cfg.seed, 0x11b);
            let mut best = 0.0f64;
            let mut used = 0usize;
            for i in 0..cfg.pairs as u64 {
                let x: Vec<f64> = (0..dim)
                    .map(|k| cfg.scale * rng.normal_at(i, 2 * k as u64))
                    .collect();
                let y: Vec<f64> = (0..dim)
                    .map(|k| cfg.scale * rng.normal_at(i, 2 * (dim + k) as u64))
                    .collect();
                let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                if dist2 == 0.0 {
                    continue; // degenerate pair
                }
                let tx = t.apply(&x)?;
                let ty = t.apply(&y)?;
                let img2: f64 = tx.iter().zip(&ty).map(|(a, b)| (a - b) * (a - b)).sum();
                best = best.max((img2 / dist2).sqrt());
                used += 1;
            }
            if used == 0 {
                return Err(Error::LipschitzEstimation(
                    "all probe pairs were degenerate".into(),
                ));
            }
            Ok(LipschitzEstimate {
                value: best,
                kind: LipschitzKind::LowerBound { probes: used },
            })
        }
    }
}

/// The Lipschitz value a check should consume: the declared certificate
/// when present, otherwise the exact/probed constant.
pub fn effective_lip(t: &ContractionSpec, probe: Option<ProbeConfig>) -> Result<f64> {
    if let Some(l) = t.declared_lip {
        return Ok(l);
    }
    Ok(lipschitz_constant(t, probe)?.value)
}

/// Applies the map to a list of points.
pub fn apply_map(t: &ContractionSpec, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    points.iter().map(|p| t.apply(p)).collect()
}

/// Probe check of the strong-contraction property: every component must
/// contract against its own coordinate, `|T_i(x) - T_i(y)| <= |x_i - y_i|`.
pub fn probe_strong_contraction(t: &ContractionSpec, cfg: ProbeConfig) -> Result<bool> {
    let dim = t.dim();
    let rng = CounterRng::new(cfg.seed, 0x57f0);
    for i in 0..cfg.pairs as u64 {
        let x: Vec<f64> = (0..dim)
            .map(|k| cfg.scale * rng.normal_at(i, 2 * k as u64))
            .collect();
        let y: Vec<f64> = (0..dim)
            .map(|k| cfg.scale * rng.normal_at(i, 2 * (dim + k) as u64))
            .collect();
        let tx = t.apply(&x)?;
        let ty = t.apply(&y)?;
        for k in 0..dim {
            if (tx[k] - ty[k]).abs() > (x[k] - y[k]).abs() + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Probe check of plain contractivity, `|T(x) - T(y)| <= |x - y|`.
pub fn probe_contraction(t: &ContractionSpec, cfg: ProbeConfig) -> Result<bool> {
    let est = lipschitz_constant(t, Some(cfg))?;
    Ok(est.value <= 1.0 + 1e-9)
}

/// Pushes a grid density through `T` by splitting each source cell into
/// `substeps^dim` equal sub-masses at sub-cell centers, mapping each, and
/// binning into the target lattice. More than 1e-6 of lost mass is a
/// coverage error.
pub fn pushforward_grid(
    t: &ContractionSpec,
    f: &DensityGrid,
    target: &GridSpec,
    substeps: usize,
) -> Result<DensityGrid> {
    if substeps < 1 {
        return Err(Error::Domain("substeps must be >= 1".into()));
    }
    let dim = f.dim();
    if t.dim() != dim || target.dim != dim {
        return Err(Error::IncompatibleGrids(format!(
            "map dim {}, source dim {dim}, target dim {}",
            t.dim(),
            target.dim
        )));
    }
    let h = f.spacing();
    let sub = h / substeps as f64;
    let subcells = substeps.pow(dim as u32);
    let mut out = vec![0.0f64; target.cell_count()];
    let mut lost = 0.0f64;
    let mut sub_idx = vec![0usize; dim];
    let mut point = vec![0.0f64; dim];
    for (flat, &m) in f.masses().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let share = m / subcells as f64;
        let cell = f.spec().flat_to_multi(flat);
        sub_idx.iter_mut().for_each(|v| *v = 0);
        loop {
            for k in 0..dim {
                point[k] = f.spec().origin[k]
                    + cell[k] as f64 * h
                    + (sub_idx[k] as f64 + 0.5) * sub;
            }
            let image = t.apply(&point)?;
            match target.locate(&image) {
                Some(idx) => out[target.multi_to_flat(&idx)] += share,
                None => lost += share,
            }
            let mut k = dim;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                sub_idx[k] += 1;
                if sub_idx[k] < substeps {
                    break;
                }
                sub_idx[k] = 0;
            }
            if sub_idx.iter().all(|&v| v == 0) {
                break;
            }
        }
    }
    if lost > COVERAGE_LIMIT {
        return Err(Error::Coverage {
            lost,
            limit: COVERAGE_LIMIT,
        });
    }
    DensityGrid::from_masses(target.clone(), out)
}

/// Factorization `A = Q1 Λ Q2` with orthogonal `Q1, Q2` and nonnegative
/// diagonal `Λ` (a singular value decomposition), reconstruction within
/// 1e-10 in max norm.
pub fn polar_diagonal_factor(a: &Mat) -> Result<(Mat, Vec<f64>, Mat)> {
    let (u, s, vt) = svd(a)?;
    let recon = u.matmul(&Mat::diag(&s)).matmul(&vt);
    let mut err = 0.0f64;
    for i in 0..a.n {
        for j in 0..a.n {
            err = err.max((recon.get(i, j) - a.get(i, j)).abs());
        }
    }
    if err > 1e-10 {
        return Err(Error::NoConvergence(format!(
            "SVD reconstruction residual {err:.3e} exceeds 1e-10"
        )));
    }
    Ok((u, s, vt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot2(theta: f64) -> Mat {
        Mat::from_rows(&[
            vec![theta.cos(), -theta.sin()],
            vec![theta.sin(), theta.cos()],
        ])
        .unwrap()
    }

    #[test]
    fn lipschitz_exact_kinds() {
        let d = ContractionSpec::diagonal(vec![0.5, 1.0]).unwrap();
        let est = lipschitz_constant(&d, None).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.kind, LipschitzKind::Exact);

        let r = ContractionSpec::linear(rot2(30f64.to_radians())).unwrap();
        let est = lipschitz_constant(&r, None).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lipschitz_rank_one_matches_characteristic_polynomial() {
        let a = Mat::from_rows(&[vec![0.6, 0.0], vec![0.8, 0.0]]).unwrap();
        // Characteristic-polynomial oracle for A^T A = [[1,0],[0,0]]:
        // lambda^2 - tr lambda + det = 0 with tr = 1, det = 0.
        let tr = 1.0f64;
        let det = 0.0f64;
        let lam_max = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        let t = ContractionSpec::linear(a).unwrap();
        let est = lipschitz_constant(&t, None).unwrap();
        assert!((est.value - lam_max.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn lipschitz_probe_is_lower_bound() {
        let t = ContractionSpec::sampled(
            2,
            Arc::new(|x: &[f64]| vec![0.7 * x[0], 0.7 * x[1]]),
            None,
        )
        .unwrap();
        let est = lipschitz_constant(&t, Some(ProbeConfig::default())).unwrap();
        assert!(matches!(est.kind, LipschitzKind::LowerBound { probes } if probes > 0));
        assert!(est.value <= 0.7 + 1e-12);
        assert!(est.value > 0.69, "probe sup {} too loose", est.value);
    }

    #[test]
    fn apply_map_basics() {
        let id = ContractionSpec::identity(2);
        let pts = vec![vec![1.0, 2.0], vec![-0.5, 0.25]];
        assert_eq!(apply_map(&id, &pts).unwrap(), pts);

        let half = ContractionSpec::diagonal(vec![0.5, 0.5]).unwrap();
        assert_eq!(half.apply(&[2.0, 4.0]).unwrap(), vec![1.0, 2.0]);

        // gradient of |x|^2 / 4 is x / 2
        let g = ContractionSpec::gradient_convex(
            2,
            Arc::new(|x: &[f64]| x.iter().map(|v| v / 2.0).collect()),
            Some(0.5),
        )
        .unwrap();
        assert_eq!(g.apply(&[2.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn strong_contraction_probes() {
        let clamp = ContractionSpec::coordinatewise(
            vec![
                Arc::new(|x: f64| 2.0 * (x / 2.0).tanh()),
                Arc::new(|x: f64| 0.8 * x),
            ],
            Some(1.0),
        )
        .unwrap();
        assert!(probe_strong_contraction(&clamp, ProbeConfig::default()).unwrap());
        assert!(probe_contraction(&clamp, ProbeConfig::default()).unwrap());

        // A rotation is a contraction but not a strong one.
        let r = ContractionSpec::linear(rot2(1.0)).unwrap();
        assert!(!probe_strong_contraction(&r, ProbeConfig::default()).unwrap());
        assert!(probe_contraction(&r, ProbeConfig::default()).unwrap());
    }

    #[test]
    fn pushforward_identity_is_exact() {
        let f = DensityGrid::gaussian(&[0.0], &[1.0], 256).unwrap();
        let id = ContractionSpec::identity(1);
        let out = pushforward_grid(&id, &f, f.spec(), 1).unwrap();
        assert_eq!(out.masses(), f.masses());
    }

    #[test]
    fn pushforward_halves_support_of_cube() {
        let f = DensityGrid::uniform_box(&[0.0, 0.0], &[1.0, 1.0], 64).unwrap();
        let t = ContractionSpec::scaling(2, 0.5).unwrap();
        let out = pushforward_grid(&t, &f, f.spec(), 2).unwrap();
        let h0_in = f.renyi_entropy(0.0).unwrap();
        let h0_out = out.renyi_entropy(0.0).unwrap();
        let drop = h0_in - h0_out;
        let want = 2.0 * 2f64.ln();
        assert!((drop - want).abs() < 0.1, "h0 drop {drop} vs {want}");
        assert!((out.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pushforward_gaussian_scaling_entropy() {
        let f = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 12).unwrap();
        let t = ContractionSpec::scaling(1, 0.5).unwrap();
        let out = pushforward_grid(&t, &f, f.spec(), DEFAULT_SUBSTEPS).unwrap();
        let h = out.renyi_entropy(1.0).unwrap();
        // Closed-form oracle: h(N(0, 1/4)) = log(2 pi e / 4) / 2.
        let want = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 0.25).ln();
        assert!((h - want).abs() < 2e-3, "entropy {h} vs {want}");
    }

    #[test]
    fn pushforward_coverage_error() {
        let f = DensityGrid::uniform_box(&[0.0], &[1.0], 32).unwrap();
        // Shift far outside the target box.
        let t = ContractionSpec::affine(Mat::identity(1), vec![50.0]).unwrap();
        assert!(matches!(
            pushforward_grid(&t, &f, f.spec(), 1),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn pushforward_support_never_grows_much() {
        let rng = CounterRng::new(8, 3);
        let f = DensityGrid::uniform_box(&[-1.0, -1.0], &[1.0, 1.0], 48).unwrap();
        // Rotations push the square's corners past the source box, so bin
        // into a wider target at the same spacing.
        let target = GridSpec::new(vec![-1.5, -1.5], f.spacing(), vec![72, 72]).unwrap();
        for trial in 0..10u64 {
            let th = rng.range_at(trial, 0, 0.0, std::f64::consts::TAU);
            let s = rng.range_at(trial, 1, 0.4, 1.0);
            let a = rot2(th).matmul(&Mat::diag(&[s, s * 0.8]));
            let t = ContractionSpec::linear(a).unwrap();
            let out = pushforward_grid(&t, &f, &target, DEFAULT_SUBSTEPS).unwrap();
            let h0_in = f.renyi_entropy(0.0).unwrap();
            let h0_out = out.renyi_entropy(0.0).unwrap();
            assert!(
                h0_out <= h0_in + 2.0 * f.spacing(),
                "trial {trial}: support entropy grew {h0_in} -> {h0_out}"
            );
        }
    }

    #[test]
    fn composition_bound_for_affine() {
        let rng = CounterRng::new(12, 0);
        for trial in 0..30u64 {
            let mk = |salt: u64| {
                let th = rng.range_at(trial, salt, 0.0, std::f64::consts::TAU);
                let s1 = rng.range_at(trial, salt + 1, 0.2, 1.0);
                let s2 = rng.range_at(trial, salt + 2, 0.2, 1.0);
                rot2(th).matmul(&Mat::diag(&[s1, s2]))
            };
            let a1 = mk(0);
            let a2 = mk(10);
            let l1 = largest_singular_value(&a1).unwrap();
            let l2 = largest_singular_value(&a2).unwrap();
            let l12 = largest_singular_value(&a2.matmul(&a1)).unwrap();
            assert!(l12 <= l1 * l2 + 1e-8, "trial {trial}: {l12} > {l1}*{l2}");
        }
    }

    #[test]
    fn polar_diagonal_factor_cases() {
        let (q1, s, q2) = polar_diagonal_factor(&Mat::identity(2)).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);
        let recon = q1.matmul(&Mat::diag(&s)).matmul(&q2);
        assert!((recon.get(0, 0) - 1.0).abs() < 1e-12);

        let (_, s, _) = polar_diagonal_factor(&Mat::diag(&[0.3, 0.9])).unwrap();
        assert!((s[0] - 0.9).abs() < 1e-12);
        assert!((s[1] - 0.3).abs() < 1e-12);

        let rng = CounterRng::new(21, 0);
        for trial in 0..50u64 {
            let a = Mat::from_rows(&[
                vec![
                    rng.range_at(trial, 0, -0.6, 0.6),
                    rng.range_at(trial, 1, -0.6, 0.6),
                ],
                vec![
                    rng.range_at(trial, 2, -0.6, 0.6),
                    rng.range_at(trial, 3, -0.6, 0.6),
                ],
            ])
            .unwrap();
            let (_, s, _) = polar_diagonal_factor(&a).unwrap();
            assert!(s.iter().all(|&x| x <= 1.2 + 1e-12));
        }
    }

    #[test]
    fn serialization_round_trip_and_ephemeral() {
        let a = ContractionSpec::affine(rot2(0.5).scale(0.9), vec![0.1, -0.2]).unwrap();
        let j = a.to_json().unwrap();
        let back = ContractionSpec::from_json(&j).unwrap();
        assert_eq!(back.dim(), 2);
        let p = vec![0.3, 0.7];
        let ya = a.apply(&p).unwrap();
        let yb = back.apply(&p).unwrap();
        for (u, v) in ya.iter().zip(&yb) {
            assert!((u - v).abs() < 1e-15);
        }

        let s = ContractionSpec::sampled(1, Arc::new(|x: &[f64]| vec![x[0] * 0.5]), None).unwrap();
        assert!(matches!(s.to_json(), Err(Error::EphemeralKind("sampled"))));
    }
}
