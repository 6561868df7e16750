//! Theorem registry, suite orchestration, and falsification runs.
//!
//! Every named inequality gets exactly one registry entry; `verify` runs
//! its hypothesis class from config, `falsify` hammers the open
//! conjectures with randomized instances and logs candidates, `sweep`
//! repeats `verify` along one knob. Hypothesis validation is hard-fail: a
//! suite never runs a check on inputs outside its hypothesis class, since
//! a "failure" there would mean nothing.

pub mod config;
pub mod generators;

pub use config::Config;

use crate::ballgeom::{
    kp_intersection_check, kp_union_check, lens_area, union_box, McParams, PointConfiguration,
};
use crate::contract::{probe_contraction, ContractionSpec, ProbeConfig};
use crate::convolve::convolve;
use crate::diversity::{
    check_h2_contraction, renyi_gap_bound, scaling_limit_check, DiscreteSampler, GaussianSampler,
    ScalingVerdict, UniformBallSampler, VectorSampler,
};
use crate::error::{Error, Result};
use crate::gauss_epi::{
    check_gaussian_strong, check_isotropic_lc, check_linear_epi, check_vector_epi,
    grid_entropy_power_plus_z, pushforward_auto, GaussianLaw, InputLaw,
};
use crate::grid::DensityGrid;
use crate::linalg::Mat;
use crate::polygon::{dilated_area, intrinsic_volumes_2d, minkowski_sum};
use crate::rearrange::majorizes;
use crate::report::{CheckReport, Provenance};
use crate::rng::CounterRng;
use generators::*;
use rayon::prelude::*;

/// What a registry entry asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// A proved statement: verify must pass on its hypothesis class.
    Theorem,
    /// An open statement: a falsification target.
    Conjecture,
}

#[derive(Debug, Clone, Copy)]
pub struct TheoremEntry {
    pub id: &'static str,
    pub title: &'static str,
    pub kind: EntryKind,
}

/// The registry: one entry per packaged inequality.
pub const REGISTRY: &[TheoremEntry] = &[
    TheoremEntry {
        id: "KP-union",
        title: "contracting ball centers never grows the union volume",
        kind: EntryKind::Conjecture,
    },
    TheoremEntry {
        id: "KP-intersection",
        title: "contracting ball centers never shrinks the intersection volume",
        kind: EntryKind::Conjecture,
    },
    TheoremEntry {
        id: "C1.1-intenttrue",
        title: "renyi order 2..d+3 of discrete law plus ball noise falls under contraction",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "Q1-bigquestion",
        title: "h_alpha(T(X)+W) <= h_alpha(X+W) for symmetric log-concave noise",
        kind: EntryKind::Conjecture,
    },
    TheoremEntry {
        id: "T2.1-lambdaX",
        title: "scaling a log-concave summand majorizes the sum density",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T2.2-radsymunimod",
        title: "any contraction wins for radially symmetric unimodal X and W",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T2.3-diagT",
        title: "diagonal contractions win for log-concave X and unconditional W",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T2.4-strongT",
        title: "strong contractions win for unconditional log-concave X and W",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C2.1-convexKlinearT",
        title: "affine contractions shrink parallel volumes of convex bodies",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C2.2-affineT",
        title: "affine contractions win for log-concave X and radially symmetric W",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C2.3-intrinsic2d",
        title: "linear contractions reduce planar intrinsic volumes",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C2.4-unconditionalKL",
        title: "strong contractions shrink Minkowski sums of unconditional bodies",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C2.5-brenier",
        title: "gradient-of-convex contractions win for unconditional X, radial W",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T3.0-vectorEPI",
        title: "matrix-interpolated entropy power inequality",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T3.1-linearEPI",
        title: "N(X+Z) >= N(T(X)+Z) + (1-Lip^2) N(X) for linear T",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T3.2-gaussianStrong",
        title: "strong contractions of diagonal Gaussians via covariance bound",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T3.3-isotropicLC",
        title: "isotropic log-concave X with the e^Delta amplification",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C3.1-lipThreshold",
        title: "small-Lipschitz maps lose entropy against isotropic log-concave X",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "Q3-strengthenedEPI",
        title: "N(X+Z) >= N(T(X)+Z) + (1-Lip^2) N(X) for every contraction",
        kind: EntryKind::Conjecture,
    },
    TheoremEntry {
        id: "T4.1-h2scaling",
        title: "C_d D_t / t^d converges to exp(h_2)",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "T4.2-h2contraction",
        title: "order-2 diversity of the sum falls under contraction",
        kind: EntryKind::Theorem,
    },
    TheoremEntry {
        id: "C4.1-renyiGap",
        title: "all renyi orders compare after the order-2 result, up to 0.307 d",
        kind: EntryKind::Theorem,
    },
];

/// Built-in manifest the self-test checks the registry against: the ids
/// that must each have exactly one entry.
const MANIFEST: &[&str] = &[
    "KP-union",
    "KP-intersection",
    "C1.1-intenttrue",
    "Q1-bigquestion",
    "T2.1-lambdaX",
    "T2.2-radsymunimod",
    "T2.3-diagT",
    "T2.4-strongT",
    "C2.1-convexKlinearT",
    "C2.2-affineT",
    "C2.3-intrinsic2d",
    "C2.4-unconditionalKL",
    "C2.5-brenier",
    "T3.0-vectorEPI",
    "T3.1-linearEPI",
    "T3.2-gaussianStrong",
    "T3.3-isotropicLC",
    "C3.1-lipThreshold",
    "Q3-strengthenedEPI",
    "T4.1-h2scaling",
    "T4.2-h2contraction",
    "C4.1-renyiGap",
];

pub fn registry_entry(id: &str) -> Result<&'static TheoremEntry> {
    REGISTRY
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

/// Runs the per-instance closure in parallel with stable row order; each
/// instance sees its own deterministic sub-seed.
fn run_instances<F>(config: &Config, per_instance: F) -> Result<Vec<CheckReport>>
where
    F: Fn(u64, u64) -> Result<Vec<CheckReport>> + Sync,
{
    let results: Vec<Result<Vec<CheckReport>>> = (0..config.instances as u64)
        .into_par_iter()
        .map(|i| per_instance(i, config.sub_seed(i)))
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Majorization-form theorem rows: the stronger claim
/// `f_{X+W} maj-below f_{T(X)+W}` plus the per-order entropy conclusions.
fn majorization_rows(
    id: &str,
    x: &DensityGrid,
    w: &DensityGrid,
    t: &ContractionSpec,
    alphas: &[f64],
    eps: f64,
    substeps: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let f = convolve(x, w)?;
    let tx = pushforward_auto(t, x, substeps)?;
    let g = convolve(&tx, w)?;
    let verdict = majorizes(&g, &f, eps)?;
    let mut rows = vec![CheckReport::le_check(
        format!("{id}/maj"),
        verdict.worst_deficit,
        0.0,
        eps,
        Provenance::Grid,
        Provenance::Grid,
        seed,
    )];
    for &alpha in alphas {
        rows.push(CheckReport::le_check(
            format!("{id}/alpha{alpha}"),
            g.renyi_entropy(alpha)?,
            f.renyi_entropy(alpha)?,
            eps,
            Provenance::Grid,
            Provenance::Grid,
            seed,
        ));
    }
    Ok(rows)
}

fn require_dim(id: &str, got: usize, allowed: &[usize]) -> Result<()> {
    if !allowed.contains(&got) {
        return Err(Error::Config(format!(
            "{id} supports dim {allowed:?}, config has dim {got}"
        )));
    }
    Ok(())
}

fn reject_family(id: &str, family: Option<&str>, hypothesis: &str) -> Result<()> {
    if let Some(f) = family {
        if f == "bimodal" {
            return Err(Error::Hypothesis {
                theorem: id.into(),
                detail: format!("x_family {f:?} violates the hypothesis: {hypothesis}"),
            });
        }
    }
    Ok(())
}

fn lc_pair_1d(
    rng: &CounterRng,
    trial: u64,
    cells: usize,
    family: Option<&str>,
) -> Result<(DensityGrid, DensityGrid)> {
    let (x, _) = log_concave_1d(rng, trial, 0, cells, family)?;
    let (w, _) = log_concave_1d(rng, trial, 10, cells, None)?;
    Ok((x, w))
}

// ── per-theorem suites ───────────────────────────────────────────────

fn verify_lambda_x(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T2.1-lambdaX";
    require_dim(id, config.dim, &[1, 2])?;
    reject_family(id, config.x_family.as_deref(), "X must be log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x21);
        let lambda = config.lambdas[i as usize % config.lambdas.len()];
        if config.dim == 1 {
            let (x, w) = lc_pair_1d(&rng, i, config.grid_cells, config.x_family.as_deref())?;
            if !x.is_log_concave_1d(1e-9) {
                return Err(Error::Hypothesis {
                    theorem: id.into(),
                    detail: "generated X is not log-concave".into(),
                });
            }
            let t = ContractionSpec::scaling(1, lambda)?;
            majorization_rows(
                id,
                &x,
                &w,
                &t,
                &config.alphas,
                budget.eps(x.spacing()),
                config.substeps,
                seed,
            )
        } else {
            let (x, _) = log_concave_2d(&rng, i, 0, config.grid_cells_2d, None)?;
            let (w, _) = log_concave_2d(&rng, i, 20, config.grid_cells_2d, None)?;
            let t = ContractionSpec::scaling(2, lambda)?;
            majorization_rows(
                id,
                &x,
                &w,
                &t,
                &config.alphas,
                budget.eps(x.spacing()),
                config.substeps,
                seed,
            )
        }
    })
}

fn verify_radsym(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T2.2-radsymunimod";
    require_dim(id, config.dim, &[2])?;
    reject_family(id, config.x_family.as_deref(), "X must be radially symmetric unimodal")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x22);
        let (x, _) = radially_symmetric_2d(&rng, i, 0, config.grid_cells_2d)?;
        let (w, _) = radially_symmetric_2d(&rng, i, 10, config.grid_cells_2d)?;
        let t = random_sampled_contraction(&rng, i, 20, 2, config.lip)?;
        if !probe_contraction(&t, ProbeConfig { seed, ..ProbeConfig::default() })? {
            return Err(Error::Hypothesis {
                theorem: id.into(),
                detail: "generated map failed the contraction probe".into(),
            });
        }
        majorization_rows(
            id,
            &x,
            &w,
            &t,
            &config.alphas,
            budget.eps(x.spacing()),
            config.substeps,
            seed,
        )
    })
}

fn verify_diag(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T2.3-diagT";
    require_dim(id, config.dim, &[2])?;
    reject_family(id, config.x_family.as_deref(), "X must be log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x23);
        let (x, tag) = log_concave_2d(&rng, i, 0, config.grid_cells_2d, config.x_family.as_deref())?;
        if tag == "bimodal" {
            return Err(Error::Hypothesis {
                theorem: id.into(),
                detail: "X must be log-concave".into(),
            });
        }
        let (w, _) = unconditional_log_concave_2d(&rng, i, 20, config.grid_cells_2d)?;
        let t = random_diagonal_contraction(&rng, i, 30, 2, config.lip)?;
        majorization_rows(
            id,
            &x,
            &w,
            &t,
            &config.alphas,
            budget.eps(x.spacing()),
            config.substeps,
            seed,
        )
    })
}

fn verify_strong(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T2.4-strongT";
    require_dim(id, config.dim, &[2])?;
    reject_family(id, config.x_family.as_deref(), "X must be unconditional log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x24);
        let (x, _) = unconditional_log_concave_2d(&rng, i, 0, config.grid_cells_2d)?;
        let (w, _) = unconditional_log_concave_2d(&rng, i, 20, config.grid_cells_2d)?;
        let t = random_coordinatewise_contraction(&rng, i, 30, 2, config.lip)?;
        majorization_rows(
            id,
            &x,
            &w,
            &t,
            &config.alphas,
            budget.eps(x.spacing()),
            config.substeps,
            seed,
        )
    })
}

fn verify_affine_noise(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C2.2-affineT";
    require_dim(id, config.dim, &[2])?;
    reject_family(id, config.x_family.as_deref(), "X must be log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x2a);
        let (x, tag) = log_concave_2d(&rng, i, 0, config.grid_cells_2d, config.x_family.as_deref())?;
        if tag == "bimodal" {
            return Err(Error::Hypothesis {
                theorem: id.into(),
                detail: "X must be log-concave".into(),
            });
        }
        let (w, _) = radially_symmetric_2d(&rng, i, 20, config.grid_cells_2d)?;
        let t = random_affine_contraction(&rng, i, 30, 2, config.lip)?;
        majorization_rows(
            id,
            &x,
            &w,
            &t,
            &config.alphas,
            budget.eps(x.spacing()),
            config.substeps,
            seed,
        )
    })
}

fn verify_convex_k(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C2.1-convexKlinearT";
    require_dim(id, config.dim, &[2])?;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x2b);
        let k = random_polygon(&rng, i, 0, 7, 2.0)?;
        let t = random_affine_contraction(&rng, i, 20, 2, config.lip)?;
        let (matrix, shift) = match &t.kind {
            crate::contract::MapKind::Affine { matrix, shift } => (matrix, shift.clone()),
            _ => unreachable!(),
        };
        let tk = k.map_affine(matrix, &shift)?;
        Ok(vec![CheckReport::le_check(
            id,
            dilated_area(&tk, config.radius),
            dilated_area(&k, config.radius),
            1e-9,
            Provenance::ClosedForm,
            Provenance::ClosedForm,
            seed,
        )])
    })
}

fn verify_intrinsic(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C2.3-intrinsic2d";
    require_dim(id, config.dim, &[2])?;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x2c);
        let k = random_polygon(&rng, i, 0, 6, 2.0)?;
        let q1 = random_orthogonal(&rng, i, 20, 2);
        let q2 = random_orthogonal(&rng, i, 24, 2);
        let s1 = rng.range_at(i, 30, 0.2, config.lip);
        let s2 = rng.range_at(i, 31, 0.2, config.lip);
        let a = q1.matmul(&Mat::diag(&[s1, s2])).matmul(&q2);
        let ak = k.map_affine(&a, &[0.0, 0.0])?;
        let (_, v1, v2) = intrinsic_volumes_2d(&k);
        let (_, w1, w2) = intrinsic_volumes_2d(&ak);
        Ok(vec![
            CheckReport::le_check(
                format!("{id}/V1"),
                w1,
                v1,
                1e-9,
                Provenance::ClosedForm,
                Provenance::ClosedForm,
                seed,
            ),
            CheckReport::le_check(
                format!("{id}/V2"),
                w2,
                v2,
                1e-9,
                Provenance::ClosedForm,
                Provenance::ClosedForm,
                seed,
            ),
        ])
    })
}

fn verify_unconditional_kl(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C2.4-unconditionalKL";
    require_dim(id, config.dim, &[2])?;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x2d);
        let k = random_symmetric_polygon(&rng, i, 0, 4, 1.8)?;
        let l = random_symmetric_polygon(&rng, i, 20, 3, 1.2)?;
        // Diagonal maps are the polygon-exact slice of the strong class.
        let t = random_diagonal_contraction(&rng, i, 40, 2, config.lip)?;
        let scales = match &t.kind {
            crate::contract::MapKind::Diagonal { scales } => scales.clone(),
            _ => unreachable!(),
        };
        let tk = k.map_affine(&Mat::diag(&scales), &[0.0, 0.0])?;
        Ok(vec![CheckReport::le_check(
            id,
            minkowski_sum(&tk, &l)?.area(),
            minkowski_sum(&k, &l)?.area(),
            1e-9,
            Provenance::ClosedForm,
            Provenance::ClosedForm,
            seed,
        )])
    })
}

fn verify_brenier(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C2.5-brenier";
    require_dim(id, config.dim, &[2])?;
    reject_family(id, config.x_family.as_deref(), "X must be unconditional log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x2e);
        let (x, _) = unconditional_log_concave_2d(&rng, i, 0, config.grid_cells_2d)?;
        let (w, _) = radially_symmetric_2d(&rng, i, 20, config.grid_cells_2d)?;
        let t = random_gradient_convex(&rng, i, 30, 2, config.lip)?;
        majorization_rows(
            id,
            &x,
            &w,
            &t,
            &config.alphas,
            budget.eps(x.spacing()),
            config.substeps,
            seed,
        )
    })
}

fn verify_vector_epi(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T3.0-vectorEPI";
    require_dim(id, config.dim, &[1, 2, 3])?;
    let d = config.dim;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x30);
        let cov = random_covariance(&rng, i, 0, d, 0.4, 3.0);
        let x = InputLaw::Gaussian(GaussianLaw::new(vec![0.0; d], cov)?);
        // S and Sigma share an eigenbasis, so they commute.
        let q = random_orthogonal(&rng, i, 20, d);
        let s_ev: Vec<f64> = (0..d).map(|k| rng.range_at(i, 30 + k as u64, 0.0, 1.0)).collect();
        let sig_ev: Vec<f64> = (0..d).map(|k| rng.range_at(i, 40 + k as u64, 0.4, 2.0)).collect();
        let s = q.matmul(&Mat::diag(&s_ev)).matmul(&q.transpose());
        let sigma = q.matmul(&Mat::diag(&sig_ev)).matmul(&q.transpose());
        Ok(vec![check_vector_epi(&x, &s, &sigma, 0.0, seed)?])
    })
}

fn verify_linear_epi(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T3.1-linearEPI";
    require_dim(id, config.dim, &[1, 2, 3])?;
    let d = config.dim;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x31);
        let cov = random_covariance(&rng, i, 0, d, 0.3, 4.0);
        let x = InputLaw::Gaussian(GaussianLaw::new(vec![0.0; d], cov)?);
        let t = random_affine_contraction(&rng, i, 20, d, config.lip)?;
        Ok(vec![check_linear_epi(&x, &t, 0.0, config.substeps, seed)?])
    })
}

fn verify_gaussian_strong(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T3.2-gaussianStrong";
    require_dim(id, config.dim, &[1, 2, 3])?;
    let d = config.dim;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x32);
        if i % 3 == 2 {
            // isotropic branch admits any contraction
            let alpha = rng.range_at(i, 0, 0.4, 2.0);
            let t = random_affine_contraction(&rng, i, 10, d, config.lip)?;
            let (rep, _) = check_gaussian_strong(&vec![alpha; d], &t, config.samples, seed)?;
            Ok(vec![rep])
        } else {
            let lambda: Vec<f64> = (0..d)
                .map(|k| rng.range_at(i, k as u64, 0.3, 2.5))
                .collect();
            let t = random_coordinatewise_contraction(&rng, i, 10, d, config.lip)?;
            let (rep, _) = check_gaussian_strong(&lambda, &t, config.samples, seed)?;
            Ok(vec![rep])
        }
    })
}

/// Isotropic log-concave grid families.
fn isotropic_grid(rng: &CounterRng, trial: u64, lane: u64, config: &Config) -> Result<DensityGrid> {
    if config.dim == 1 {
        let (x, _) = log_concave_1d(rng, trial, lane, config.grid_cells, None)?;
        return Ok(x);
    }
    let cells = config.grid_cells_2d;
    match rng.u64_at(trial, lane) % 3 {
        0 => {
            let (x, _) = radially_symmetric_2d(rng, trial, lane + 1, cells)?;
            Ok(x)
        }
        1 => {
            let a = rng.range_at(trial, lane + 1, 0.8, 1.6);
            let spec = crate::grid::GridSpec::new(
                vec![-BOX_2D, -BOX_2D],
                2.0 * BOX_2D / cells as f64,
                vec![cells; 2],
            )?;
            DensityGrid::from_fn(spec, move |x| {
                if x[0].abs() <= a && x[1].abs() <= a {
                    1.0
                } else {
                    0.0
                }
            })
        }
        _ => {
            let s = rng.range_at(trial, lane + 1, 0.6, 1.1);
            let spec = crate::grid::GridSpec::new(
                vec![-BOX_2D, -BOX_2D],
                2.0 * BOX_2D / cells as f64,
                vec![cells; 2],
            )?;
            DensityGrid::from_fn(spec, move |x| {
                (-0.5 * (x[0] * x[0] + x[1] * x[1]) / (s * s)).exp()
            })
        }
    }
}

fn verify_isotropic_lc(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T3.3-isotropicLC";
    require_dim(id, config.dim, &[1, 2])?;
    reject_family(id, config.x_family.as_deref(), "X must be isotropic log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x33);
        let x = isotropic_grid(&rng, i, 0, config)?;
        let delta = crate::gauss_epi::delta_gap(&x)?;
        // keep e^Delta * Lip below 1 with margin
        let cap = (0.95 / delta.exp()).min(config.lip);
        let t = random_contraction_any(&rng, i, 10, config.dim, cap)?;
        check_isotropic_lc(&x, &t, budget.eps(x.spacing()), config.substeps, seed)
    })
}

fn verify_lip_threshold(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C3.1-lipThreshold";
    require_dim(id, config.dim, &[1, 2])?;
    let budget = config.budget();
    let rows = run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x34);
        let x = isotropic_grid(&rng, i, 0, config)?;
        let l_x = crate::gauss_epi::isotropic_constant(&x)?;
        let threshold =
            (std::f64::consts::E / (2.0 * std::f64::consts::PI * l_x * l_x)).sqrt();
        let delta = crate::gauss_epi::delta_gap(&x)?;
        let cap = threshold
            .min(0.95 / delta.exp())
            .min(config.lip)
            .max(0.05);
        let t = random_contraction_any(&rng, i, 10, config.dim, cap)?;
        check_isotropic_lc(&x, &t, budget.eps(x.spacing()), config.substeps, seed)
    })?;
    let filtered: Vec<CheckReport> = rows
        .into_iter()
        .filter(|r| r.theorem_id.starts_with("C3.1"))
        .collect();
    if filtered.is_empty() {
        return Err(Error::Config(
            "no instance met the small-Lipschitz hypothesis".into(),
        ));
    }
    Ok(filtered)
}

fn verify_h2_scaling(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T4.1-h2scaling";
    require_dim(id, config.dim, &[1, 2])?;
    let cells = if config.dim == 1 {
        config.grid_cells.min(2048)
    } else {
        config.grid_cells_2d.min(32)
    };
    let f = if config.dim == 1 {
        DensityGrid::uniform_box(&[0.0], &[1.0], cells)?
    } else {
        DensityGrid::uniform_ball(2, 1.0, cells)?
    };
    let ladder = if config.t_ladder.is_empty() {
        let top = 55.0 / f.spacing();
        vec![top / 1000.0, top / 100.0, top / 10.0, top / 3.0, top]
    } else {
        config.t_ladder.clone()
    };
    let outcome = scaling_limit_check(&f, &ladder, config.seed)?;
    match outcome.verdict {
        ScalingVerdict::Converged { .. } => Ok(vec![outcome.report.unwrap()]),
        ScalingVerdict::Inconclusive => Err(Error::Config(format!(
            "{id}: ladder too short; top rung needs t * spacing >= 50"
        ))),
    }
}

fn verify_h2_contraction(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "T4.2-h2contraction";
    require_dim(id, config.dim, &[1, 2, 3])?;
    let d = config.dim;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x42);
        let k = config.k.max(2);
        let points: Vec<Vec<f64>> = (0..k)
            .map(|p| {
                (0..d)
                    .map(|c| rng.range_at(i, (10 + p * d + c) as u64, -1.5, 1.5))
                    .collect()
            })
            .collect();
        let raw: Vec<f64> = (0..k)
            .map(|p| rng.range_at(i, (40 + p) as u64, 0.2, 1.0))
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let x = DiscreteSampler::new(&weights, points)?;
        let w: Box<dyn VectorSampler> = if i % 2 == 0 {
            Box::new(GaussianSampler {
                sigma: vec![1.0; d],
            })
        } else {
            Box::new(UniformBallSampler {
                dim: d,
                radius: 1.0,
            })
        };
        let t = random_affine_contraction(&rng, i, 60, d, config.lip)?;
        let out = check_h2_contraction(
            &x,
            w.as_ref(),
            &t,
            &config.t_list,
            &McParams::fixed(config.samples, seed),
        )?;
        let _ = id;
        Ok(out.reports)
    })
}

fn verify_renyi_gap(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C4.1-renyiGap";
    require_dim(id, config.dim, &[1, 2])?;
    reject_family(id, config.x_family.as_deref(), "X must be log-concave")?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x44);
        let (x, w, t): (DensityGrid, DensityGrid, ContractionSpec) = if config.dim == 1 {
            let (x, _) = log_concave_1d(&rng, i, 0, config.grid_cells, None)?;
            // centered symmetric log-concave noise
            let b = rng.range_at(i, 20, 0.6, 1.0);
            let spec = crate::grid::GridSpec::new(
                vec![-BOX_1D],
                2.0 * BOX_1D / config.grid_cells as f64,
                vec![config.grid_cells],
            )?;
            let w = DensityGrid::from_fn(spec, move |v| (-v[0].abs() / b).exp())?;
            let t = random_contraction_any(&rng, i, 30, 1, config.lip)?;
            (x, w, t)
        } else {
            let (x, _) = log_concave_2d(&rng, i, 0, config.grid_cells_2d, None)?;
            let (w, _) = radially_symmetric_2d(&rng, i, 20, config.grid_cells_2d)?;
            let t = random_contraction_any(&rng, i, 30, 2, config.lip)?;
            (x, w, t)
        };
        let f = convolve(&x, &w)?;
        let tx = pushforward_auto(&t, &x, config.substeps)?;
        let g = convolve(&tx, &w)?;
        let eps = budget.eps(x.spacing());
        let dd = config.dim as f64;
        let mut rows = Vec::new();
        for &alpha in &config.alphas {
            let bound = renyi_gap_bound(alpha)? * dd;
            rows.push(CheckReport::le_check(
                format!("{id}/alpha{alpha}"),
                g.renyi_entropy(alpha)?,
                f.renyi_entropy(alpha)? + bound,
                eps,
                Provenance::Grid,
                Provenance::Grid,
                seed,
            ));
        }
        Ok(rows)
    })
}

/// Exact order-2 entropy of a discrete law convolved with uniform ball
/// noise in the plane, via the pairwise lens areas.
fn h2_ball_mixture_exact(cfg: &PointConfiguration, weights: &[f64]) -> f64 {
    let v = std::f64::consts::PI * cfg.radius * cfg.radius;
    let mut int2 = 0.0;
    for (i, ci) in cfg.centers.iter().enumerate() {
        for (j, cj) in cfg.centers.iter().enumerate() {
            let dist = ci
                .iter()
                .zip(cj)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            int2 += weights[i] * weights[j] * lens_area(dist, cfg.radius);
        }
    }
    -(int2 / (v * v)).ln()
}

/// Monte Carlo `integral of f^alpha` for the ball-mixture density over its
/// union bounding box, with a batch stderr. Shares the unit stream with
/// the paired configuration through the seed.
fn mixture_power_integral(
    cfg: &PointConfiguration,
    weights: &[f64],
    alpha: u32,
    mc: &McParams,
) -> (f64, f64) {
    let bbox = union_box(cfg);
    let rng = CounterRng::new(mc.seed, 0xa1fa);
    let v = match cfg.dim() {
        2 => std::f64::consts::PI * cfg.radius * cfg.radius,
        3 => 4.0 / 3.0 * std::f64::consts::PI * cfg.radius.powi(3),
        _ => 2.0 * cfg.radius,
    };
    let r2 = cfg.radius * cfg.radius;
    let n = mc.samples;
    let dim = cfg.dim();
    let eval = |i: u64| -> f64 {
        let u: Vec<f64> = (0..dim).map(|k| rng.f64_at(i, k as u64)).collect();
        let p: Vec<f64> = bbox
            .lo
            .iter()
            .zip(&bbox.hi)
            .zip(&u)
            .map(|((&a, &b), &t)| a + t * (b - a))
            .collect();
        let mut dens = 0.0;
        for (c, &w) in cfg.centers.iter().zip(weights) {
            let d2: f64 = p.iter().zip(c).map(|(&x, &y)| (x - y) * (x - y)).sum();
            if d2 <= r2 {
                dens += w;
            }
        }
        (dens / v).powi(alpha as i32)
    };
    let sum = crate::rng::chunked_sum(n, 1 << 14, |range| range.map(eval).sum());
    let sum_sq = crate::rng::chunked_sum(n, 1 << 14, |range| range.map(|i| eval(i).powi(2)).sum());
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    let box_vol = bbox.volume();
    (mean * box_vol, box_vol * (var / n as f64).sqrt())
}

fn verify_intenttrue(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "C1.1-intenttrue";
    require_dim(id, config.dim, &[1, 2, 3])?;
    let d = config.dim;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x11);
        let x = random_point_configuration(&rng, i, 0, config.k, d, 1.5, config.radius)?;
        let raw: Vec<f64> = (0..config.k)
            .map(|p| rng.range_at(i, (40 + p) as u64, 0.2, 1.0))
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let t = random_affine_contraction(&rng, i, 60, d, config.lip)?;
        let y = PointConfiguration::new(crate::contract::apply_map(&t, &x.centers)?, x.radius)?;
        let mut rows = Vec::new();
        for &alpha in &config.alphas {
            if alpha < 2.0 || (alpha.round() - alpha).abs() > 1e-12 {
                continue; // the corollary covers integer orders from 2 up
            }
            if (alpha - 2.0).abs() < 1e-12 && d == 2 {
                rows.push(CheckReport::le_check(
                    format!("{id}/alpha2"),
                    h2_ball_mixture_exact(&y, &weights),
                    h2_ball_mixture_exact(&x, &weights),
                    1e-9,
                    Provenance::ClosedForm,
                    Provenance::ClosedForm,
                    seed,
                ));
            } else {
                let a = alpha.round() as u32;
                let mc = McParams::fixed(config.samples, seed);
                let (ix, se_x) = mixture_power_integral(&x, &weights, a, &mc);
                let (iy, se_y) = mixture_power_integral(&y, &weights, a, &mc);
                let denom = (a as f64 - 1.0).abs();
                let (hx, hy) = (ix.ln() / (1.0 - a as f64), iy.ln() / (1.0 - a as f64));
                let tol = 3.0 * (se_x / (ix * denom) + se_y / (iy * denom));
                rows.push(
                    CheckReport::le_check(
                        format!("{id}/alpha{a}"),
                        hy,
                        hx,
                        tol,
                        Provenance::Mc,
                        Provenance::Mc,
                        seed,
                    )
                    .with_geometry(config.k, d, se_x + se_y, config.samples),
                );
            }
        }
        if rows.is_empty() {
            return Err(Error::Config(format!(
                "{id}: no alpha in {:?} is an integer >= 2",
                config.alphas
            )));
        }
        Ok(rows)
    })
}

/// Contraction ensemble for the ball checks: PSD-scaled orthogonal maps
/// and coordinate-wise monotone (strong) maps, alternating.
fn kp_contraction(
    rng: &CounterRng,
    trial: u64,
    lane: u64,
    dim: usize,
    lip: f64,
) -> Result<ContractionSpec> {
    if trial % 2 == 0 {
        random_affine_contraction(rng, trial, lane, dim, lip)
    } else {
        random_coordinatewise_contraction(rng, trial, lane, dim, lip)
    }
}

fn verify_kp(config: &Config, union: bool) -> Result<Vec<CheckReport>> {
    let id = if union { "KP-union" } else { "KP-intersection" };
    require_dim(id, config.dim, &[1, 2, 3])?;
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x01);
        let k = 2 + (rng.u64_at(i, 0) % config.k.max(2) as u64) as usize;
        let spread = if union { 1.5 } else { 0.7 * config.radius };
        let x = random_point_configuration(&rng, i, 1, k, config.dim, spread, config.radius)?;
        let t = kp_contraction(&rng, i, 200, config.dim, config.lip)?;
        let mc = config.mc_with_seed(seed);
        let rep = if union {
            kp_union_check(&x, &t, &mc)?
        } else {
            kp_intersection_check(&x, &t, &mc)?
        };
        Ok(vec![rep])
    })
}

fn verify_q1(config: &Config) -> Result<Vec<CheckReport>> {
    // Expected-pass slice of the open question: log-concave X (covered by
    // the affine-noise result). The falsification run explores beyond it.
    let id = "Q1-bigquestion";
    require_dim(id, config.dim, &[1, 2])?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x91);
        if config.dim == 1 {
            let (x, _) = log_concave_1d(&rng, i, 0, config.grid_cells, None)?;
            let (w, _) = log_concave_1d(&rng, i, 10, config.grid_cells, Some("laplace"))?;
            let t = ContractionSpec::scaling(1, config.lip)?;
            majorization_rows(id, &x, &w, &t, &config.alphas, budget.eps(x.spacing()), config.substeps, seed)
        } else {
            let (x, _) = log_concave_2d(&rng, i, 0, config.grid_cells_2d, None)?;
            let (w, _) = radially_symmetric_2d(&rng, i, 20, config.grid_cells_2d)?;
            let t = random_affine_contraction(&rng, i, 30, 2, config.lip)?;
            majorization_rows(id, &x, &w, &t, &config.alphas, budget.eps(x.spacing()), config.substeps, seed)
        }
    })
}

fn verify_q3(config: &Config) -> Result<Vec<CheckReport>> {
    // Expected-pass slice: linear maps (the proved case).
    let id = "Q3-strengthenedEPI";
    require_dim(id, config.dim, &[1, 2])?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x93);
        let x = isotropic_grid(&rng, i, 0, config)?;
        let t = random_affine_contraction(&rng, i, 10, config.dim, config.lip)?;
        Ok(vec![q3_row(id, &x, &t, &budget, config.substeps, seed)?])
    })
}

/// One strengthened-EPI row on the grid pipeline.
fn q3_row(
    id: &str,
    x: &DensityGrid,
    t: &ContractionSpec,
    budget: &crate::budget::GridBudget,
    substeps: usize,
    seed: u64,
) -> Result<CheckReport> {
    let lip = crate::contract::effective_lip(t, Some(ProbeConfig { seed, ..ProbeConfig::default() }))?
        .min(1.0);
    let n_x = x.entropy_power()?;
    let n_xz = grid_entropy_power_plus_z(x)?;
    let tx = pushforward_auto(t, x, substeps)?;
    let n_tz = grid_entropy_power_plus_z(&tx)?;
    let eps = budget.eps(x.spacing());
    let d = x.dim() as f64;
    let tol = (n_xz + n_tz + n_x) * ((2.0 * eps / d).exp() - 1.0);
    Ok(CheckReport::le_check(
        id,
        n_tz + (1.0 - lip * lip) * n_x,
        n_xz,
        tol,
        Provenance::Grid,
        Provenance::Grid,
        seed,
    ))
}

/// Dispatches one registry id to its suite.
pub fn verify(id: &str, config: &Config) -> Result<Vec<CheckReport>> {
    registry_entry(id)?;
    match id {
        "KP-union" => verify_kp(config, true),
        "KP-intersection" => verify_kp(config, false),
        "C1.1-intenttrue" => verify_intenttrue(config),
        "Q1-bigquestion" => verify_q1(config),
        "T2.1-lambdaX" => verify_lambda_x(config),
        "T2.2-radsymunimod" => verify_radsym(config),
        "T2.3-diagT" => verify_diag(config),
        "T2.4-strongT" => verify_strong(config),
        "C2.1-convexKlinearT" => verify_convex_k(config),
        "C2.2-affineT" => verify_affine_noise(config),
        "C2.3-intrinsic2d" => verify_intrinsic(config),
        "C2.4-unconditionalKL" => verify_unconditional_kl(config),
        "C2.5-brenier" => verify_brenier(config),
        "T3.0-vectorEPI" => verify_vector_epi(config),
        "T3.1-linearEPI" => verify_linear_epi(config),
        "T3.2-gaussianStrong" => verify_gaussian_strong(config),
        "T3.3-isotropicLC" => verify_isotropic_lc(config),
        "C3.1-lipThreshold" => verify_lip_threshold(config),
        "Q3-strengthenedEPI" => verify_q3(config),
        "T4.1-h2scaling" => verify_h2_scaling(config),
        "T4.2-h2contraction" => verify_h2_contraction(config),
        "C4.1-renyiGap" => verify_renyi_gap(config),
        _ => Err(Error::UnknownTheorem(id.to_string())),
    }
}

/// Repeats `verify` along one knob; rows carry a `@param=value` suffix.
pub fn sweep(id: &str, param: &str, values: &[f64], config: &Config) -> Result<Vec<CheckReport>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    for &v in values {
        let mut cfg = config.clone();
        cfg.set_param(param, v)?;
        for mut r in verify(id, &cfg)? {
            r.theorem_id = format!("{}@{param}={v}", r.theorem_id);
            rows.push(r);
        }
    }
    Ok(rows)
}

/// A flagged falsification candidate.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FalsifyFlag {
    pub row_id: String,
    pub trial: u64,
    pub margin: f64,
    pub tolerance: f64,
    pub seed: u64,
    /// Path of the reproduction bundle, when an output directory is set.
    pub bundle: Option<String>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FalsifySummary {
    pub conjecture_id: String,
    pub trials: u64,
    pub rows: usize,
    pub flags: Vec<FalsifyFlag>,
}

/// Randomized stress run against a conjecture: every row whose margin
/// falls below `-5 * tolerance` becomes a candidate with a reproduction
/// bundle. Candidates are review material, not assertion failures.
pub fn falsify(id: &str, trials: u64, config: &Config) -> Result<FalsifySummary> {
    let entry = registry_entry(id)?;
    if entry.kind != EntryKind::Conjecture {
        return Err(Error::Config(format!(
            "{id} is a proved statement; falsify targets conjectures (KP-union, KP-intersection, Q1-bigquestion, Q3-strengthenedEPI)"
        )));
    }
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let mut cfg = config.clone();
    cfg.instances = trials as usize;
    cfg.escalate = false;
    let rows = match id {
        "KP-union" => verify_kp(&cfg, true)?,
        "KP-intersection" => verify_kp(&cfg, false)?,
        "Q1-bigquestion" => falsify_q1_rows(&cfg)?,
        "Q3-strengthenedEPI" => falsify_q3_rows(&cfg)?,
        _ => unreachable!(),
    };
    let mut flags = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.margin < -5.0 * r.tolerance {
            let bundle = write_bundle(id, &cfg, i as u64, r)?;
            flags.push(FalsifyFlag {
                row_id: r.theorem_id.clone(),
                trial: i as u64,
                margin: r.margin,
                tolerance: r.tolerance,
                seed: r.seed,
                bundle,
            });
        }
    }
    Ok(FalsifySummary {
        conjecture_id: id.to_string(),
        trials,
        rows: rows.len(),
        flags,
    })
}

/// The open question in its raw breadth: arbitrary X (mixtures included),
/// symmetric log-concave noise, any generated contraction, random order.
fn falsify_q1_rows(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "Q1-bigquestion";
    require_dim(id, config.dim, &[1, 2])?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x91);
        let alpha = [0.25, 0.5, 1.0, 2.0, 5.0][(rng.u64_at(i, 70) % 5) as usize];
        if config.dim == 1 {
            let family = if i % 3 == 0 { Some("bimodal") } else { None };
            let (x, _) = log_concave_1d(&rng, i, 0, config.grid_cells, family)?;
            let (w, _) = log_concave_1d(&rng, i, 10, config.grid_cells, Some("laplace"))?;
            let t = random_contraction_any(&rng, i, 30, 1, config.lip)?;
            majorization_rows(id, &x, &w, &t, &[alpha], budget.eps(x.spacing()), config.substeps, seed)
        } else {
            let family = if i % 3 == 0 { Some("bimodal") } else { None };
            let (x, _) = log_concave_2d(&rng, i, 0, config.grid_cells_2d, family)?;
            let (w, _) = radially_symmetric_2d(&rng, i, 20, config.grid_cells_2d)?;
            let t = random_contraction_any(&rng, i, 30, 2, config.lip)?;
            majorization_rows(id, &x, &w, &t, &[alpha], budget.eps(x.spacing()), config.substeps, seed)
        }
    })
}

fn falsify_q3_rows(config: &Config) -> Result<Vec<CheckReport>> {
    let id = "Q3-strengthenedEPI";
    require_dim(id, config.dim, &[1, 2])?;
    let budget = config.budget();
    run_instances(config, |i, seed| {
        let rng = CounterRng::new(seed, 0x93);
        let x = if config.dim == 1 {
            let family = if i % 3 == 0 { Some("bimodal") } else { None };
            log_concave_1d(&rng, i, 0, config.grid_cells, family)?.0
        } else {
            let family = if i % 3 == 0 { Some("bimodal") } else { None };
            log_concave_2d(&rng, i, 0, config.grid_cells_2d, family)?.0
        };
        let t = random_contraction_any(&rng, i, 10, config.dim, config.lip)?;
        Ok(vec![q3_row(id, &x, &t, &budget, config.substeps, seed)?])
    })
}

/// Reproduction bundle for a flagged row: seed, config, and the row itself.
fn write_bundle(id: &str, config: &Config, trial: u64, row: &CheckReport) -> Result<Option<String>> {
    let Some(dir) = &config.out_dir else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir)?;
    let path = std::path::Path::new(dir).join(format!(
        "flag-{}-trial{}-seed{}.json",
        id.replace('/', "_"),
        trial,
        row.seed
    ));
    let bundle = serde_json::json!({
        "conjecture": id,
        "trial": trial,
        "row": row,
        "config": config,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&bundle)?)?;
    Ok(Some(path.display().to_string()))
}

/// One self-test line.
#[derive(Debug, Clone)]
pub struct SelfTestLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Registry coverage against the built-in manifest, plus closed-form
/// anchors that must hold on any platform.
pub fn selftest() -> Vec<SelfTestLine> {
    let mut lines = Vec::new();
    let mut ids: Vec<&str> = REGISTRY.iter().map(|e| e.id).collect();
    let unique = {
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    };
    lines.push(SelfTestLine {
        name: "registry-unique".into(),
        pass: unique,
        detail: format!("{} entries", ids.len()),
    });
    ids.sort_unstable();
    let mut manifest: Vec<&str> = MANIFEST.to_vec();
    manifest.sort_unstable();
    lines.push(SelfTestLine {
        name: "registry-coverage".into(),
        pass: ids == manifest,
        detail: "every manifest id has exactly one registry entry".into(),
    });

    let anchor = |name: &str, got: f64, want: f64, tol: f64| SelfTestLine {
        name: name.into(),
        pass: (got - want).abs() <= tol,
        detail: format!("{got} vs {want}"),
    };
    lines.push(anchor(
        "renyi-gap-at-1",
        renyi_gap_bound(1.0).unwrap_or(f64::NAN),
        1.0 - 2f64.ln(),
        1e-12,
    ));
    lines.push(anchor(
        "lens-unit-disks",
        lens_area(1.0, 1.0),
        2.0 * std::f64::consts::PI / 3.0 - 3f64.sqrt() / 2.0,
        1e-14,
    ));
    lines.push(anchor(
        "scaling-constant-1d",
        crate::diversity::scaling_constant(1).unwrap_or(f64::NAN),
        2.0,
        0.0,
    ));
    lines.push(anchor(
        "scaling-constant-2d",
        crate::diversity::scaling_constant(2).unwrap_or(f64::NAN),
        2.0 * std::f64::consts::PI,
        1e-15,
    ));
    lines.push(anchor(
        "gaussian-entropy-1d",
        crate::gauss_epi::gaussian_entropy(&GaussianLaw::standard(1)).unwrap_or(f64::NAN),
        1.4189385332046727,
        1e-12,
    ));
    let budget = crate::budget::GridBudget::calibrated();
    lines.push(SelfTestLine {
        name: "budget-calibration".into(),
        pass: budget.constant.is_finite() && budget.constant >= 2.0,
        detail: format!("C = {:.4}", budget.constant),
    });
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> Config {
        Config {
            seed: 11,
            instances: 2,
            dim: 2,
            grid_cells: 512,
            grid_cells_2d: 48,
            substeps: 2,
            alphas: vec![0.5, 1.0, 2.0],
            lambdas: vec![0.5],
            t_list: vec![1.0],
            samples: 40_000,
            escalate: false,
            budget_constant: Some(4.0),
            ..Config::default()
        }
    }

    #[test]
    fn selftest_is_green() {
        for line in selftest() {
            assert!(line.pass, "{}: {}", line.name, line.detail);
        }
    }

    #[test]
    fn registry_lookup() {
        assert!(registry_entry("T2.1-lambdaX").is_ok());
        assert!(matches!(
            registry_entry("T9.9-nope"),
            Err(Error::UnknownTheorem(_))
        ));
    }

    #[test]
    fn lambda_x_small_suite_passes() {
        let mut cfg = small_config();
        cfg.dim = 1;
        let rows = verify("T2.1-lambdaX", &cfg).unwrap();
        assert_eq!(rows.len(), 2 * (1 + 3));
        for r in &rows {
            assert!(r.pass, "{}: margin {} tol {}", r.theorem_id, r.margin, r.tolerance);
        }
    }

    #[test]
    fn hypothesis_violation_is_hard_fail() {
        let mut cfg = small_config();
        cfg.dim = 1;
        cfg.x_family = Some("bimodal".into());
        assert!(matches!(
            verify("T2.1-lambdaX", &cfg),
            Err(Error::Hypothesis { .. })
        ));
        // and unsupported dimension is a config error naming the check
        let mut cfg3 = small_config();
        cfg3.dim = 3;
        assert!(matches!(
            verify("T2.2-radsymunimod", &cfg3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn closed_form_suites_pass() {
        let cfg = small_config();
        for id in ["C2.1-convexKlinearT", "C2.3-intrinsic2d", "C2.4-unconditionalKL", "T3.0-vectorEPI", "T3.1-linearEPI"] {
            let rows = verify(id, &cfg).unwrap();
            assert!(!rows.is_empty());
            for r in &rows {
                assert!(r.pass, "{id}: {} margin {}", r.theorem_id, r.margin);
            }
        }
    }

    #[test]
    fn kp_suites_pass_in_plane() {
        let mut cfg = small_config();
        cfg.samples = 50_000;
        for id in ["KP-union", "KP-intersection", "C1.1-intenttrue"] {
            let rows = verify(id, &cfg).unwrap();
            for r in &rows {
                assert!(r.pass, "{id}: {} margin {} tol {}", r.theorem_id, r.margin, r.tolerance);
            }
        }
    }

    #[test]
    fn sweep_appends_knob_suffix_and_identity_endpoint_is_tight() {
        let mut cfg = small_config();
        cfg.dim = 1;
        cfg.instances = 1;
        let rows = sweep("T2.1-lambdaX", "lambda", &[0.25, 0.75, 1.0], &cfg).unwrap();
        assert!(rows.iter().any(|r| r.theorem_id.ends_with("@lambda=0.25")));
        assert!(rows.iter().any(|r| r.theorem_id.ends_with("@lambda=0.75")));
        assert!(rows.iter().all(|r| r.pass));
        // At lambda = 1 the map is the identity: margins collapse to the
        // rebinning noise of the pushforward, far below the interior ones.
        let at = |suffix: &str| -> f64 {
            rows.iter()
                .filter(|r| r.theorem_id.contains("/alpha") && r.theorem_id.ends_with(suffix))
                .map(|r| r.margin.abs())
                .fold(0.0, f64::max)
        };
        assert!(at("@lambda=1") < 1e-2, "endpoint margin {}", at("@lambda=1"));
        assert!(at("@lambda=1") < 0.1 * at("@lambda=0.25"));
    }

    #[test]
    fn sweep_samples_shrinks_stderr_like_sqrt() {
        let mut cfg = small_config();
        cfg.instances = 1;
        cfg.k = 3;
        let rows = sweep(
            "KP-union",
            "samples",
            &[10_000.0, 100_000.0, 1_000_000.0],
            &cfg,
        )
        .unwrap();
        let ses: Vec<f64> = rows.iter().map(|r| r.stderr.unwrap()).collect();
        assert_eq!(ses.len(), 3);
        for w in ses.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (2.0..5.0).contains(&ratio),
                "stderr should shrink ~sqrt(10) per step, got ratio {ratio}"
            );
        }
    }

    #[test]
    fn falsify_rejects_theorems_and_runs_conjectures() {
        let cfg = small_config();
        assert!(matches!(
            falsify("T2.1-lambdaX", 2, &cfg),
            Err(Error::Config(_))
        ));
        let mut cfg = cfg;
        cfg.dim = 2;
        cfg.samples = 40_000;
        let summary = falsify("KP-union", 3, &cfg).unwrap();
        assert_eq!(summary.trials, 3);
        assert!(summary.flags.is_empty(), "unexpected flags: {:?}", summary.flags);
    }

    #[test]
    fn verify_reports_are_reproducible() {
        let mut cfg = small_config();
        cfg.dim = 1;
        let a = verify("T2.1-lambdaX", &cfg).unwrap();
        let b = verify("T2.1-lambdaX", &cfg).unwrap();
        let to_rows = |rs: &[CheckReport]| {
            rs.iter().map(|r| r.csv_row_stable()).collect::<Vec<_>>()
        };
        assert_eq!(to_rows(&a), to_rows(&b));
    }
}
