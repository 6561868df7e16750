//! Rényi entropies and entropy powers of grid densities.
//!
//! Run with `cargo run --release --example entropy_basics`.

use kpent::grid::DensityGrid;

fn main() -> kpent::Result<()> {
    // A standard Gaussian on 4096 cells spanning eight standard deviations.
    let gauss = DensityGrid::gaussian(&[0.0], &[1.0], 1 << 12)?;
    let uniform = DensityGrid::uniform_box(&[0.0], &[1.0], 1 << 12)?;
    let laplace = DensityGrid::laplace(1, 1.0, 1 << 12)?;

    println!("Renyi entropy ladder (nats):");
    println!("{:>8} {:>12} {:>12} {:>12}", "alpha", "gaussian", "uniform", "laplace");
    for alpha in [0.0, 0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
        println!(
            "{:>8} {:>12.6} {:>12.6} {:>12.6}",
            format!("{alpha}"),
            gauss.renyi_entropy(alpha)?,
            uniform.renyi_entropy(alpha)?,
            laplace.renyi_entropy(alpha)?,
        );
    }

    // Closed forms to compare against.
    let half_log_2pie = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    println!();
    println!("closed-form h(N(0,1)) = {half_log_2pie:.6}");
    println!("grid        h(N(0,1)) = {:.6}", gauss.renyi_entropy(1.0)?);
    println!("closed-form h(Laplace) = {:.6}", 1.0 + 2f64.ln());
    println!("grid        h(Laplace) = {:.6}", laplace.renyi_entropy(1.0)?);

    println!();
    println!("entropy powers:");
    println!("  N(gaussian) = {:.4}  (2 pi e = {:.4})", gauss.entropy_power()?, 2.0 * std::f64::consts::PI * std::f64::consts::E);
    println!("  N(uniform)  = {:.4}", uniform.entropy_power()?);

    // Entropies depend only on the mass multiset: translating the lattice
    // changes nothing, bit for bit.
    let shifted = gauss.translated(&[42.0])?;
    assert_eq!(
        shifted.renyi_entropy(1.0)?.to_bits(),
        gauss.renyi_entropy(1.0)?.to_bits()
    );
    println!();
    println!("translation leaves every entropy bit-identical: ok");

    // Covariance and moments.
    let cov = gauss.covariance()?;
    println!("gaussian grid variance = {:.6}", cov.cov.get(0, 0));
    Ok(())
}
