//! Order-2 diversity: exact discrete values, Monte Carlo agreement, the
//! scaling limit to exp(h_2), and the Rényi comparison constants.

use kpent::ballgeom::McParams;
use kpent::contract::ContractionSpec;
use kpent::diversity::{
    check_h2_contraction, diversity2_discrete, diversity2_mc, renyi_gap_bound,
    scaling_limit_check, DiscreteSampler, GaussianSampler, ScalingVerdict,
};
use kpent::grid::DensityGrid;

fn main() -> kpent::Result<()> {
    // Diversity of a three-point law grows from 1 toward 3 as t increases.
    let w = [0.25, 0.25, 0.5];
    let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 3.0]];
    println!("diversity of a 3-point law:");
    for t in [0.01, 0.1, 1.0, 10.0, 1000.0] {
        println!("  t = {t:>6}: D = {:.5}", diversity2_discrete(&w, &pts, t)?);
    }

    // Monte Carlo agrees with the exact double sum.
    let sampler = DiscreteSampler::new(&w, pts.clone())?;
    let est = diversity2_mc(&sampler, 1.0, &McParams::fixed(200_000, 3))?;
    println!();
    println!(
        "MC at t = 1: {:.5} +- {:.5} (exact {:.5})",
        est.value,
        est.stderr,
        diversity2_discrete(&w, &pts, 1.0)?
    );

    // Scaling limit: C_d D_t / t^d converges to exp(h_2).
    let f = DensityGrid::uniform_box(&[0.0], &[1.0], 1024)?;
    let top = 55.0 / f.spacing();
    let ladder = vec![top / 1000.0, top / 100.0, top / 10.0, top / 3.0, top];
    let out = scaling_limit_check(&f, &ladder, 0)?;
    println!();
    println!("scaling limit on uniform [0,1] (target exp(h_2) = {:.4}):", out.target);
    for r in &out.rungs {
        println!("  t = {:>9.1}: C_1 D_t / t = {:.5}", r.t, r.ratio);
    }
    if let ScalingVerdict::Converged { last_relative_gap } = out.verdict {
        println!("  converged, last relative gap {last_relative_gap:.4}");
    }

    // Contracting the discrete component can only lower the diversity of
    // the sum, at every kernel scale.
    let x = DiscreteSampler::new(
        &[0.5, 0.5],
        vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
    )?;
    let noise = GaussianSampler { sigma: vec![1.0, 1.0] };
    let t_map = ContractionSpec::scaling(2, 0.4)?;
    let out = check_h2_contraction(&x, &noise, &t_map, &[0.5, 1.0, 2.0, 5.0], &McParams::fixed(100_000, 5))?;
    println!();
    println!("contraction check (two points pulled together):");
    for r in &out.reports {
        println!(
            "  D(T(X)+W) = {:.5} <= D(X+W) = {:.5}  margin {:+.5}  pass {}",
            r.lhs, r.rhs, r.margin, r.pass
        );
    }
    println!("  implied h2 gap at the largest t: {:.5}", out.implied_h2_gap);

    // The constants behind the universal Rényi comparison.
    let b1 = renyi_gap_bound(1.0)?;
    println!();
    println!("renyi gap bound at alpha = 1: {b1:.6} per dimension");
    println!("entropy-power factor exp(2 b) = {:.4}", (2.0 * b1).exp());
    println!("bound at alpha = 2: {} (the order the theorem settles)", renyi_gap_bound(2.0)?);
    Ok(())
}
