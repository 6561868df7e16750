//! Closed-form Gaussian entropy algebra and entropy-power checks with
//! Gaussian noise.
//!
//! Gaussian-input paths are fully closed-form (no grids, no Monte Carlo),
//! which gives the checks machine-precision baselines; grid inputs run the
//! pushforward -> convolve -> entropy pipeline and carry the grid budget.

use crate::contract::{
    effective_lip, lipschitz_constant, pushforward_grid, ContractionSpec, LipschitzKind, MapKind,
    ProbeConfig,
};
use crate::convolve::convolve;
use crate::error::{Error, Result};
use crate::grid::{DensityGrid, GridSpec};
use crate::linalg::{eigen_symmetric, project_psd, sqrt_psd, Mat};
use crate::report::{CheckReport, Provenance};
use crate::rng::CounterRng;
use serde::{Deserialize, Serialize};

pub const LOG_2PIE: f64 = 2.837877066409345; // ln(2 pi e)
pub const TWO_PI_E: f64 = 17.07946844534713;

/// A Gaussian law `N(mean, cov)` with a positive semi-definite covariance.
#[derive(Debug, Clone)]
pub struct GaussianLaw {
    pub mean: Vec<f64>,
    pub cov: Mat,
}

impl GaussianLaw {
    pub fn new(mean: Vec<f64>, cov: Mat) -> Result<Self> {
        if mean.len() != cov.n {
            return Err(Error::Domain("mean/cov dimension mismatch".into()));
        }
        if !cov.symmetric_within(1e-12) {
            return Err(Error::DegenerateCovariance("cov not symmetric".into()));
        }
        let (w, _) = eigen_symmetric(&cov);
        if w.iter().any(|&x| x < -1e-10) {
            return Err(Error::DegenerateCovariance(format!(
                "negative eigenvalue in {w:?}"
            )));
        }
        Ok(GaussianLaw { mean, cov })
    }

    pub fn standard(dim: usize) -> Self {
        GaussianLaw {
            mean: vec![0.0; dim],
            cov: Mat::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "mean": self.mean, "cov": self.cov.to_rows() })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mean: Vec<f64> = serde_json::from_value(
            v.get("mean")
                .cloned()
                .ok_or_else(|| Error::Domain("missing mean".into()))?,
        )?;
        let rows: Vec<Vec<f64>> = serde_json::from_value(
            v.get("cov")
                .cloned()
                .ok_or_else(|| Error::Domain("missing cov".into()))?,
        )?;
        GaussianLaw::new(mean, Mat::from_rows(&rows)?)
    }
}

/// Shannon entropy of a nonsingular Gaussian:
/// `log det(cov) / 2 + (d / 2) log(2 pi e)`.
pub fn gaussian_entropy(g: &GaussianLaw) -> Result<f64> {
    let det = g.cov.det();
    if det <= 1e-300 {
        return Err(Error::DegenerateCovariance(format!(
            "determinant {det:.3e}; entropy is -infinity"
        )));
    }
    Ok(0.5 * det.ln() + 0.5 * g.dim() as f64 * LOG_2PIE)
}

/// Entropy power of a Gaussian, `2 pi e det(cov)^(1/d)`.
pub fn gaussian_entropy_power(g: &GaussianLaw) -> Result<f64> {
    let det = g.cov.det();
    if det < 0.0 {
        return Err(Error::DegenerateCovariance(format!("determinant {det:.3e}")));
    }
    Ok(TWO_PI_E * det.powf(1.0 / g.dim() as f64))
}

/// Per-dimension entropy gap to the moment-matched Gaussian:
/// `(h(Z_X) - h(X)) / d`, nonnegative up to the grid budget.
pub fn delta_gap(f: &DensityGrid) -> Result<f64> {
    let summary = f.covariance()?;
    let matched = GaussianLaw::new(summary.mean.clone(), project_psd(&summary.cov))?;
    let hz = gaussian_entropy(&matched)?;
    let hx = f.renyi_entropy(1.0)?;
    Ok((hz - hx) / f.dim() as f64)
}

/// Isotropic constant `(max density)^(1/d) * det(cov)^(1/(2d))`.
pub fn isotropic_constant(f: &DensityGrid) -> Result<f64> {
    let d = f.dim() as f64;
    let peak = f.max_mass() / f.spec().cell_volume();
    let cov = project_psd(&f.covariance()?.cov);
    let det = cov.det();
    if det <= 1e-300 {
        return Err(Error::DegenerateCovariance(format!("determinant {det:.3e}")));
    }
    Ok(peak.powf(1.0 / d) * det.powf(1.0 / (2.0 * d)))
}

/// An input law for the entropy-power checks: a grid density or an exact
/// Gaussian.
#[derive(Debug, Clone)]
pub enum InputLaw {
    Grid(DensityGrid),
    Gaussian(GaussianLaw),
}

impl InputLaw {
    pub fn dim(&self) -> usize {
        match self {
            InputLaw::Grid(f) => f.dim(),
            InputLaw::Gaussian(g) => g.dim(),
        }
    }
}

/// Gaussian density for a full covariance via its eigen-decomposition.
fn gaussian_density(mean: Vec<f64>, cov: &Mat) -> Result<impl Fn(&[f64]) -> f64> {
    let (w, v) = eigen_symmetric(cov);
    if w.iter().any(|&x| x <= 0.0) {
        return Err(Error::DegenerateCovariance(format!(
            "eigenvalues {w:?} not positive"
        )));
    }
    let n = cov.n;
    Ok(move |x: &[f64]| {
        let mut q = 0.0;
        for j in 0..n {
            let mut proj = 0.0;
            for i in 0..n {
                proj += v.get(i, j) * (x[i] - mean[i]);
            }
            q += proj * proj / w[j];
        }
        (-0.5 * q).exp()
    })
}

/// Grids `N(mean, cov)` at the given spacing, spanning eight standard
/// deviations of the widest eigen-direction per axis.
pub fn gaussian_grid_at_spacing(mean: &[f64], cov: &Mat, spacing: f64) -> Result<DensityGrid> {
    let (w, _) = eigen_symmetric(cov);
    let sigma_max = w[0].max(0.0).sqrt();
    if sigma_max <= 0.0 {
        return Err(Error::DegenerateCovariance("zero covariance".into()));
    }
    let half = crate::grid::GAUSSIAN_EXTENT_SIGMAS * sigma_max;
    let cells = (2.0 * half / spacing).ceil() as usize;
    let origin: Vec<f64> = mean.iter().map(|&m| m - 0.5 * cells as f64 * spacing).collect();
    let spec = GridSpec::new(origin, spacing, vec![cells; mean.len()])?;
    let density = gaussian_density(mean.to_vec(), cov)?;
    DensityGrid::from_fn(spec, density)
}

/// Standard normal grid at the given spacing.
pub fn standard_normal_grid(dim: usize, spacing: f64) -> Result<DensityGrid> {
    gaussian_grid_at_spacing(&vec![0.0; dim], &Mat::identity(dim), spacing)
}

/// Pushes a grid through `T`, sizing the target box from the image of the
/// support (padded by two cells).
pub fn pushforward_auto(
    t: &ContractionSpec,
    f: &DensityGrid,
    substeps: usize,
) -> Result<DensityGrid> {
    let dim = f.dim();
    let h = f.spacing();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for (flat, &m) in f.masses().iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let y = t.apply(&f.spec().cell_center_flat(flat))?;
        for k in 0..dim {
            lo[k] = lo[k].min(y[k]);
            hi[k] = hi[k].max(y[k]);
        }
    }
    if lo.iter().any(|v| !v.is_finite()) {
        return Err(Error::EmptySupport);
    }
    let shape: Vec<usize> = (0..dim)
        .map(|k| ((hi[k] - lo[k]) / h).ceil() as usize + 4)
        .collect();
    let origin: Vec<f64> = (0..dim).map(|k| lo[k] - 2.0 * h).collect();
    let target = GridSpec::new(origin, h, shape)?;
    pushforward_grid(t, f, &target, substeps)
}

/// Entropy power of `X + Z` for a grid `X`, convolving with a gridded
/// standard normal at matching spacing.
pub fn grid_entropy_power_plus_z(f: &DensityGrid) -> Result<f64> {
    let z = standard_normal_grid(f.dim(), f.spacing())?;
    convolve(f, &z)?.entropy_power()
}

/// Tolerance on an entropy-power expression whose entropies each carry an
/// additive budget of `eps` nats: `N e^(2 eps / d) - N ~ N * 2 eps / d`.
fn power_tolerance(eps: f64, dim: usize, magnitude: f64) -> f64 {
    magnitude * ((2.0 * eps / dim as f64).exp() - 1.0)
}

/// Vector entropy-power inequality with matrix interpolation `S`:
/// `N(X + S^(1/2) Z) >= det(I - S)^(1/d) N(X) + det(S)^(1/d) N(X + Z)`,
/// with `Z ~ N(0, Sigma)` and `S` commuting with `Sigma`.
pub fn check_vector_epi(
    x: &InputLaw,
    s: &Mat,
    sigma: &Mat,
    grid_eps: f64,
    seed: u64,
) -> Result<CheckReport> {
    let start = std::time::Instant::now();
    let d = x.dim();
    if s.n != d || sigma.n != d {
        return Err(Error::Domain("S / Sigma dimension mismatch".into()));
    }
    let (ws, _) = eigen_symmetric(s);
    if ws.iter().any(|&v| v < -1e-10 || v > 1.0 + 1e-10) {
        return Err(Error::Precondition(format!(
            "S and I - S must be PSD; eigenvalues {ws:?}"
        )));
    }
    let comm = s.matmul(sigma).add(&sigma.matmul(s).scale(-1.0)).max_abs();
    if comm > 1e-10 {
        return Err(Error::Precondition(format!(
            "S does not commute with Sigma (residual {comm:.3e})"
        )));
    }
    let dd = d as f64;
    let det_is = Mat::identity(d).add(&s.scale(-1.0)).det().max(0.0);
    let det_s = s.det().max(0.0);
    let sqrt_s = sqrt_psd(s);
    let noise_cov = sqrt_s.matmul(sigma).matmul(&sqrt_s);

    match x {
        InputLaw::Gaussian(g) => {
            let n_x = gaussian_entropy_power(g)?;
            let n_xz = gaussian_entropy_power(&GaussianLaw::new(
                g.mean.clone(),
                g.cov.add(sigma),
            )?)?;
            let lhs_power = gaussian_entropy_power(&GaussianLaw::new(
                g.mean.clone(),
                g.cov.add(&noise_cov),
            )?)?;
            let rhs = det_is.powf(1.0 / dd) * n_x + det_s.powf(1.0 / dd) * n_xz;
            Ok(CheckReport::le_check(
                "T3.0-vectorEPI",
                rhs,
                lhs_power,
                1e-9 * (1.0 + lhs_power.abs()),
                Provenance::ClosedForm,
                Provenance::ClosedForm,
                seed,
            )
            .with_runtime(start.elapsed().as_millis() as u64))
        }
        InputLaw::Grid(f) => {
            if d > 2 {
                return Err(Error::Domain("grid path supports d <= 2".into()));
            }
            let n_x = f.entropy_power()?;
            let z = gaussian_grid_at_spacing(&vec![0.0; d], sigma, f.spacing())?;
            let n_xz = convolve(f, &z)?.entropy_power()?;
            let lhs_power = if noise_cov.det() <= 1e-14 {
                // S ~ 0: no noise is added on the left side.
                n_x
            } else {
                let zs = gaussian_grid_at_spacing(&vec![0.0; d], &noise_cov, f.spacing())?;
                convolve(f, &zs)?.entropy_power()?
            };
            let rhs = det_is.powf(1.0 / dd) * n_x + det_s.powf(1.0 / dd) * n_xz;
            let tol = power_tolerance(grid_eps, d, lhs_power + rhs);
            Ok(CheckReport::le_check(
                "T3.0-vectorEPI",
                rhs,
                lhs_power,
                tol,
                Provenance::Grid,
                Provenance::Grid,
                seed,
            )
            .with_runtime(start.elapsed().as_millis() as u64))
        }
    }
}

/// Linear-contraction strengthening of the entropy power inequality with
/// standard Gaussian noise:
/// `N(X + Z) >= N(T(X) + Z) + (1 - Lip^2(T)) N(X)`.
pub fn check_linear_epi(
    x: &InputLaw,
    t: &ContractionSpec,
    grid_eps: f64,
    substeps: usize,
    seed: u64,
) -> Result<CheckReport> {
    let start = std::time::Instant::now();
    let d = x.dim();
    let (matrix, shift) = match &t.kind {
        MapKind::Affine { matrix, shift } => (*matrix, shift.clone()),
        MapKind::Diagonal { scales } => (Mat::diag(scales), vec![0.0; scales.len()]),
        _ => {
            return Err(Error::Precondition(
                "check_linear_epi requires an affine contraction".into(),
            ))
        }
    };
    if matrix.n != d {
        return Err(Error::Domain("map/input dimension mismatch".into()));
    }
    let est = lipschitz_constant(t, None)?;
    debug_assert_eq!(est.kind, LipschitzKind::Exact);
    let lip = est.value.min(1.0);

    match x {
        InputLaw::Gaussian(g) => {
            let n_x = gaussian_entropy_power(g)?;
            let n_xz = gaussian_entropy_power(&GaussianLaw::new(
                g.mean.clone(),
                g.cov.add(&Mat::identity(d)),
            )?)?;
            let tcov = matrix.matmul(&g.cov).matmul(&matrix.transpose());
            let mut tmean = matrix.apply(&g.mean);
            for (m, b) in tmean.iter_mut().zip(&shift) {
                *m += b;
            }
            let n_tz = gaussian_entropy_power(&GaussianLaw::new(
                tmean,
                project_psd(&tcov).add(&Mat::identity(d)),
            )?)?;
            let rhs = n_tz + (1.0 - lip * lip) * n_x;
            Ok(CheckReport::le_check(
                "T3.1-linearEPI",
                rhs,
                n_xz,
                1e-9 * (1.0 + n_xz.abs()),
                Provenance::ClosedForm,
                Provenance::ClosedForm,
                seed,
            )
            .with_runtime(start.elapsed().as_millis() as u64))
        }
        InputLaw::Grid(f) => {
            if d > 2 {
                return Err(Error::Domain("grid path supports d <= 2".into()));
            }
            let n_x = f.entropy_power()?;
            let n_xz = grid_entropy_power_plus_z(f)?;
            let tx = pushforward_auto(t, f, substeps)?;
            let n_tz = grid_entropy_power_plus_z(&tx)?;
            let rhs = n_tz + (1.0 - lip * lip) * n_x;
            let tol = power_tolerance(grid_eps, d, n_xz + rhs);
            Ok(CheckReport::le_check(
                "T3.1-linearEPI",
                rhs,
                n_xz,
                tol,
                Provenance::Grid,
                Provenance::Grid,
                seed,
            )
            .with_runtime(start.elapsed().as_millis() as u64))
        }
    }
}

/// Covariance of `T(G)` by Monte Carlo with paired seeds, batched for an
/// uncertainty estimate. Returns the full-sample PSD-projected covariance
/// and the per-batch bound values.
fn mc_pushforward_cov_bound(
    lambda: &[f64],
    t: &ContractionSpec,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    const BATCHES: u64 = 16;
    let d = lambda.len();
    let dd = d as f64;
    let rng = CounterRng::new(seed, 0x90a5);
    let per = (samples / BATCHES).max(1);
    let mut batch_bounds = Vec::with_capacity(BATCHES as usize);
    let mut total = vec![0.0f64; d];
    let mut total_sq = Mat::zeros(d);
    let mut count = 0.0f64;
    for b in 0..BATCHES {
        let mut mean = vec![0.0f64; d];
        let mut sq = Mat::zeros(d);
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(per as usize);
        for i in 0..per {
            let idx = b * per + i;
            let g: Vec<f64> = (0..d)
                .map(|k| lambda[k].sqrt() * rng.normal_at(idx, 2 * k as u64))
                .collect();
            let y = t.apply(&g)?;
            for k in 0..d {
                mean[k] += y[k];
            }
            pts.push(y);
        }
        for m in mean.iter_mut() {
            *m /= per as f64;
        }
        for y in &pts {
            for i in 0..d {
                for j in 0..d {
                    let v = sq.get(i, j) + (y[i] - mean[i]) * (y[j] - mean[j]);
                    sq.set(i, j, v);
                }
            }
        }
        let cov_b = project_psd(&sq.scale(1.0 / per as f64));
        let bound_b = TWO_PI_E
            * Mat::identity(d)
                .add(&cov_b)
                .det()
                .max(0.0)
                .powf(1.0 / dd);
        batch_bounds.push(bound_b);
        for k in 0..d {
            total[k] += mean[k] * per as f64;
        }
        for i in 0..d {
            for j in 0..d {
                let v = total_sq.get(i, j) + sq.get(i, j);
                total_sq.set(i, j, v);
            }
        }
        count += per as f64;
    }
    // Full-sample covariance around the overall mean, assembled from batch
    // pieces (within-batch scatter dominates; batch means are close).
    let full_cov = project_psd(&total_sq.scale(1.0 / count));
    let bound = TWO_PI_E
        * Mat::identity(d)
            .add(&full_cov)
            .det()
            .max(0.0)
            .powf(1.0 / dd);
    let mean_b = batch_bounds.iter().sum::<f64>() / BATCHES as f64;
    let var_b = batch_bounds
        .iter()
        .map(|&x| (x - mean_b) * (x - mean_b))
        .sum::<f64>()
        / (BATCHES - 1) as f64;
    let stderr = (var_b / BATCHES as f64).sqrt();
    Ok((bound, stderr))
}

/// Entropy-power contraction check for Gaussian inputs with diagonal
/// covariance `Lambda` and a strong contraction `T` (any contraction when
/// `Lambda` is isotropic), via the Gaussian-maximum-entropy bound:
/// the closed-form `N(G + Z)` must dominate
/// `2 pi e det(I + Sigma_T(G))^(1/d) + (1 - Lip^2) N(G)`.
///
/// Returns the report plus a reporting-only Monte Carlo estimate of
/// `h(T(G) + Z)` (not asserted against anything).
pub fn check_gaussian_strong(
    lambda: &[f64],
    t: &ContractionSpec,
    samples: u64,
    seed: u64,
) -> Result<(CheckReport, f64)> {
    let start = std::time::Instant::now();
    let d = lambda.len();
    if t.dim() != d {
        return Err(Error::Domain("map/input dimension mismatch".into()));
    }
    if lambda.iter().any(|&l| l < 0.0) {
        return Err(Error::Domain("Lambda must be PSD (nonnegative entries)".into()));
    }
    let isotropic = lambda
        .iter()
        .all(|&l| (l - lambda[0]).abs() <= 1e-12 * (1.0 + lambda[0].abs()));
    let strong = matches!(
        t.kind,
        MapKind::Coordinatewise { .. } | MapKind::Diagonal { .. }
    );
    if !strong && !isotropic {
        return Err(Error::Precondition(
            "T must be a strong (coordinatewise) contraction unless Lambda is isotropic".into(),
        ));
    }
    let dd = d as f64;
    let lip = effective_lip(t, Some(ProbeConfig { seed, ..ProbeConfig::default() }))?.min(1.0);
    let lhs_closed = TWO_PI_E
        * lambda
            .iter()
            .map(|&l| 1.0 + l)
            .product::<f64>()
            .powf(1.0 / dd);
    let n_g = TWO_PI_E * lambda.iter().product::<f64>().powf(1.0 / dd);
    let (bound, stderr) = mc_pushforward_cov_bound(lambda, t, samples, seed)?;
    let rhs_conservative = bound + (1.0 - lip * lip) * n_g;
    let report = CheckReport::le_check(
        "T3.2-gaussianStrong",
        rhs_conservative,
        lhs_closed,
        3.0 * stderr,
        Provenance::Mc,
        Provenance::ClosedForm,
        seed,
    )
    .with_geometry(1, d, stderr, samples)
    .with_runtime(start.elapsed().as_millis() as u64);

    // Reporting-only double MC of h(T(G) + Z): outer draws score their
    // density against an inner mixture of Gaussian kernels centered at
    // independent T(G) draws.
    let rng = CounterRng::new(seed, 0x0e27);
    let outer = 1500usize.min(samples as usize);
    let inner = 1500usize.min(samples as usize);
    let mut inner_pts: Vec<Vec<f64>> = Vec::with_capacity(inner);
    for i in 0..inner as u64 {
        let g: Vec<f64> = (0..d)
            .map(|k| lambda[k].sqrt() * rng.normal_at(i, 2 * k as u64))
            .collect();
        inner_pts.push(t.apply(&g)?);
    }
    let norm = (2.0 * std::f64::consts::PI).powf(-dd / 2.0);
    let mut h_sum = 0.0;
    for j in 0..outer as u64 {
        let g: Vec<f64> = (0..d)
            .map(|k| lambda[k].sqrt() * rng.normal_at(j, 100 + 2 * k as u64))
            .collect();
        let tg = t.apply(&g)?;
        let w: Vec<f64> = (0..d)
            .map(|k| tg[k] + rng.normal_at(j, 200 + 2 * k as u64))
            .collect();
        let mut dens = 0.0;
        for p in &inner_pts {
            let q: f64 = w.iter().zip(p).map(|(&a, &b)| (a - b) * (a - b)).sum();
            dens += (-0.5 * q).exp();
        }
        dens = dens * norm / inner as f64;
        h_sum -= dens.max(1e-300).ln();
    }
    let h_mc = h_sum / outer as f64;
    Ok((report, h_mc))
}

/// Isotropic log-concave check against Gaussian noise:
/// `N(X + Z) >= N(T(X) + Z) + (1 - (e^Delta Lip)^2) N(X)`, all three powers
/// from the grid pipeline, plus the small-Lipschitz corollary row when its
/// hypothesis is met.
pub fn check_isotropic_lc(
    f: &DensityGrid,
    t: &ContractionSpec,
    grid_eps: f64,
    substeps: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let start = std::time::Instant::now();
    let d = f.dim();
    if d > 2 {
        return Err(Error::Domain("grid path supports d <= 2".into()));
    }
    let cov = f.covariance()?.cov;
    let alpha = (0..d).map(|i| cov.get(i, i)).sum::<f64>() / d as f64;
    let mut iso_err = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let want = if i == j { alpha } else { 0.0 };
            iso_err = iso_err.max((cov.get(i, j) - want).abs());
        }
    }
    if iso_err > 1e-2 * alpha.max(1e-12) {
        return Err(Error::Precondition(format!(
            "input is not isotropic: covariance deviates by {iso_err:.3e} (alpha {alpha:.3e})"
        )));
    }
    let delta = delta_gap(f)?;
    let lip = effective_lip(t, Some(ProbeConfig { seed, ..ProbeConfig::default() }))?;
    let amplified = delta.exp() * lip;
    // Delta itself carries grid error, so the boundary case (identity map
    // on a gridded Gaussian) gets budget-sized slack.
    if amplified > 1.0 + 2.0 * grid_eps {
        return Err(Error::Precondition(format!(
            "e^Delta * Lip = {amplified:.4} > 1; the additive term is vacuous"
        )));
    }
    let n_x = f.entropy_power()?;
    let n_xz = grid_entropy_power_plus_z(f)?;
    let tx = pushforward_auto(t, f, substeps)?;
    let n_tz = grid_entropy_power_plus_z(&tx)?;
    let rhs = n_tz + (1.0 - amplified * amplified) * n_x;
    let tol = power_tolerance(grid_eps, d, n_xz + rhs);
    let mut reports = vec![CheckReport::le_check(
        "T3.3-isotropicLC",
        rhs,
        n_xz,
        tol,
        Provenance::Grid,
        Provenance::Grid,
        seed,
    )
    .with_runtime(start.elapsed().as_millis() as u64)];

    // Corollary: Lip(T) <= sqrt(e / (2 pi L_X^2)) forces plain entropy
    // monotonicity h(T(X) + Z) <= h(X + Z).
    let l_x = isotropic_constant(f)?;
    let threshold = (std::f64::consts::E / (2.0 * std::f64::consts::PI * l_x * l_x)).sqrt();
    if lip <= threshold {
        let h_lhs = tx_entropy_plus_z(&tx)?;
        let h_rhs = tx_entropy_plus_z(f)?;
        reports.push(
            CheckReport::le_check(
                "C3.1-lipThreshold",
                h_lhs,
                h_rhs,
                grid_eps,
                Provenance::Grid,
                Provenance::Grid,
                seed,
            )
            .with_runtime(start.elapsed().as_millis() as u64),
        );
    }
    Ok(reports)
}

fn tx_entropy_plus_z(f: &DensityGrid) -> Result<f64> {
    let z = standard_normal_grid(f.dim(), f.spacing())?;
    convolve(f, &z)?.renyi_entropy(1.0)
}

/// One flagged instance from a falsification stress run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StressFlag {
    pub trial: u64,
    pub margin: f64,
    pub budget: f64,
}

/// Outcome of a randomized stress run over the strengthened inequality
/// `N(X + Z) >= N(T(X) + Z) + (1 - Lip^2) N(X)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StressSummary {
    pub trials: u64,
    pub margins: Vec<f64>,
    /// Margins below `-5 * budget`: candidates for human review, not
    /// assertion failures.
    pub flags: Vec<StressFlag>,
}

/// Runs the strengthened inequality on randomized `(X, T)` pairs produced
/// by the two generators; flags any margin below five error budgets.
pub fn stress_open_question<FX, FT>(
    x_source: FX,
    t_source: FT,
    trials: u64,
    grid_eps: f64,
    substeps: usize,
) -> Result<StressSummary>
where
    FX: Fn(u64) -> Result<DensityGrid>,
    FT: Fn(u64) -> Result<ContractionSpec>,
{
    if trials < 1 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let mut margins = Vec::with_capacity(trials as usize);
    let mut flags = Vec::new();
    for trial in 0..trials {
        let f = x_source(trial)?;
        let t = t_source(trial)?;
        let lip = effective_lip(&t, Some(ProbeConfig::default()))?.min(1.0);
        let n_x = f.entropy_power()?;
        let n_xz = grid_entropy_power_plus_z(&f)?;
        let tx = pushforward_auto(&t, &f, substeps)?;
        let n_tz = grid_entropy_power_plus_z(&tx)?;
        let margin = n_xz - n_tz - (1.0 - lip * lip) * n_x;
        let budget = power_tolerance(grid_eps, f.dim(), n_xz + n_tz + n_x);
        if margin < -5.0 * budget {
            flags.push(StressFlag {
                trial,
                margin,
                budget,
            });
        }
        margins.push(margin);
    }
    Ok(StressSummary {
        trials,
        margins,
        flags,
    })
}
