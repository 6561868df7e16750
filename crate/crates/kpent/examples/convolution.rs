//! Densities of independent sums: the exact quadratic-time oracle against
//! the FFT fast path, plus an entropy-power inequality smoke test.

use kpent::convolve::{convolve, convolve_direct, max_cell_difference};
use kpent::grid::DensityGrid;

fn main() -> kpent::Result<()> {
    // Uniform [0,1] convolved with itself gives the triangle density.
    let u = DensityGrid::uniform_box(&[0.0], &[1.0], 512)?;
    let tri = convolve(&u, &u)?;
    let h = tri.spacing();
    println!("uniform * uniform:");
    println!("  peak density = {:.4} (triangle peaks at 1)", tri.max_mass() / h);
    println!("  total mass   = {:.15}", tri.total_mass());

    // The fast path must match the oracle to 1e-12 relative per cell.
    let direct = convolve_direct(&u, &u)?;
    let diff = max_cell_difference(&direct, &tri)?;
    println!(
        "  fast vs direct: max cell difference {:.3e} (scale {:.3e})",
        diff,
        direct.max_mass()
    );

    // Two standard Gaussians sum to a variance-2 Gaussian.
    let g = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 11)?;
    let sum = convolve(&g, &g)?;
    let var = sum.covariance()?.cov.get(0, 0);
    println!();
    println!("gaussian * gaussian: variance = {var:.5} (closed form 2)");

    // Entropy power inequality on the grid: N(X+Y) >= N(X) + N(Y).
    let laplace = {
        let h = g.spacing();
        let cells = (36.0 / h).ceil() as usize;
        let spec = kpent::GridSpec::new(vec![-18.0], h, vec![cells])?;
        DensityGrid::from_fn(spec, |x| (-x[0].abs()).exp())?
    };
    let mixed = convolve(&g, &laplace)?;
    let lhs = mixed.entropy_power()?;
    let rhs = g.entropy_power()? + laplace.entropy_power()?;
    println!();
    println!("EPI smoke: N(X+Y) = {lhs:.4} >= N(X) + N(Y) = {rhs:.4}");
    assert!(lhs >= rhs - 0.05);
    Ok(())
}
