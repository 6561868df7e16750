//! Contraction maps: Lipschitz constants, factorization, pushforwards,
//! and the planar polygon machinery (shadow systems, intrinsic volumes).

use kpent::contract::{
    lipschitz_constant, polar_diagonal_factor, pushforward_grid, ContractionSpec, LipschitzKind,
    ProbeConfig,
};
use kpent::grid::DensityGrid;
use kpent::linalg::Mat;
use kpent::polygon::{intrinsic_volumes_2d, shadow_system, ConvexPolygon};
use std::sync::Arc;

fn main() -> kpent::Result<()> {
    // Exact constants for structured kinds.
    let diag = ContractionSpec::diagonal(vec![0.5, 1.0])?;
    let est = lipschitz_constant(&diag, None)?;
    println!("diagonal (0.5, 1.0): Lip = {} ({:?})", est.value, est.kind);

    let rot = Mat::from_rows(&[
        vec![0.5f64.cos(), -(0.5f64.sin())],
        vec![0.5f64.sin(), 0.5f64.cos()],
    ])?;
    let est = lipschitz_constant(&ContractionSpec::linear(rot.clone())?, None)?;
    println!("rotation:           Lip = {:.12}", est.value);

    // Probed lower bound for a black-box map.
    let soft = ContractionSpec::sampled(
        2,
        Arc::new(|x: &[f64]| vec![(x[0]).tanh(), 0.8 * x[1]]),
        Some(1.0),
    )?;
    let est = lipschitz_constant(&soft, Some(ProbeConfig::default()))?;
    match est.kind {
        LipschitzKind::LowerBound { probes } => {
            println!("sampled soft map:   Lip >= {:.4} ({} probe pairs)", est.value, probes)
        }
        LipschitzKind::Exact => unreachable!(),
    }

    // Factor an arbitrary matrix into rotation * diagonal * rotation.
    let a = rot.matmul(&Mat::diag(&[0.9, 0.3]));
    let (q1, s, q2) = polar_diagonal_factor(&a)?;
    let recon = q1.matmul(&Mat::diag(&s)).matmul(&q2);
    println!();
    println!("factor A = Q1 diag{s:?} Q2, residual {:.2e}", {
        let mut r: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((recon.get(i, j) - a.get(i, j)).abs());
            }
        }
        r
    });

    // Pushforward: halving a Gaussian halves its standard deviation.
    let g = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 12)?;
    let half = ContractionSpec::scaling(1, 0.5)?;
    let hg = pushforward_grid(&half, &g, g.spec(), 4)?;
    println!();
    println!(
        "pushforward variance: {:.5} (closed form 0.25)",
        hg.covariance()?.cov.get(0, 0)
    );
    println!(
        "pushforward entropy:  {:.5} (closed form {:.5})",
        hg.renyi_entropy(1.0)?,
        0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 0.25).ln()
    );

    // Shadow systems deform a polygon without changing its area.
    let k = ConvexPolygon::new(vec![[0.0, 0.0], [2.0, 0.3], [1.5, 1.8], [0.2, 1.2]])?;
    println!();
    println!("shadow system along axis 0 (area {:.4}):", k.area());
    for lambda in [1.0, 0.5, 0.0, -1.0] {
        let s = shadow_system(&k, 0, lambda)?;
        println!("  lambda {lambda:>4}: area {:.10}", s.area());
    }

    let (v0, v1, v2) = intrinsic_volumes_2d(&k);
    println!();
    println!("intrinsic volumes of K: V0 = {v0}, V1 = {v1:.4}, V2 = {v2:.4}");
    let ak = k.map_affine(&Mat::diag(&[0.5, 0.5]), &[0.0, 0.0])?;
    let (_, w1, w2) = intrinsic_volumes_2d(&ak);
    println!("after halving:          V1 = {w1:.4} (half), V2 = {w2:.4} (quarter)");
    Ok(())
}
