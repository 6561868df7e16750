//! Discretization budget for grid-based checks.
//!
//! The inequalities under test are continuum statements; a grid computation
//! of either side carries an error that shrinks linearly with the spacing.
//! Every check therefore gets an additive budget `eps = C * spacing`, with
//! `C` fixed by a halving-spacing self-calibration at startup: measure how
//! much canonical pipelines move when the spacing halves, convert to a
//! per-spacing slope, and keep a safety factor. A floor of 2 guards the
//! regimes the calibration probes cannot see.

use crate::contract::{pushforward_grid, ContractionSpec};
use crate::convolve::convolve;
use crate::error::Result;
use crate::grid::DensityGrid;
use crate::rearrange::majorizes;
use std::sync::OnceLock;

const FLOOR: f64 = 2.0;
const SAFETY: f64 = 3.0;

/// Additive per-check budget, linear in the grid spacing.
#[derive(Debug, Clone, Copy)]
pub struct GridBudget {
    pub constant: f64,
}

impl GridBudget {
    pub fn with_constant(constant: f64) -> Self {
        GridBudget { constant }
    }

    /// Budget in nats (or mass units for majorization deficits) at the
    /// given spacing.
    pub fn eps(&self, spacing: f64) -> f64 {
        self.constant * spacing
    }

    /// Calibrated budget; the measurement runs once per process.
    pub fn calibrated() -> Self {
        static CONSTANT: OnceLock<f64> = OnceLock::new();
        let c = *CONSTANT.get_or_init(|| match measure_constant() {
            Ok(c) => c,
            Err(_) => FLOOR * SAFETY,
        });
        GridBudget { constant: c }
    }
}

/// Entropy drift of a convolution pipeline when the spacing halves, as a
/// per-spacing slope.
fn entropy_slope(cells: usize) -> Result<f64> {
    let coarse = pipeline_entropies(cells)?;
    let fine = pipeline_entropies(2 * cells)?;
    let h = 16.0 / cells as f64;
    let mut worst = 0.0f64;
    for (a, b) in coarse.iter().zip(&fine) {
        // err(h) - err(h/2) ~ C h / 2
        worst = worst.max(2.0 * (a - b).abs() / h);
    }
    Ok(worst)
}

fn pipeline_entropies(cells: usize) -> Result<Vec<f64>> {
    let x = DensityGrid::gaussian(&[0.0], &[1.0], cells)?;
    let t = ContractionSpec::scaling(1, 0.7)?;
    let tx = pushforward_grid(&t, &x, x.spec(), 4)?;
    let sum = convolve(&tx, &x)?;
    [0.5, 1.0, 2.0]
        .iter()
        .map(|&a| sum.renyi_entropy(a))
        .collect()
}

/// Worst positive majorization deficit on pairs where the order provably
/// holds, as a per-spacing slope. Probes 1-D and 2-D pipelines.
fn majorization_slope() -> Result<f64> {
    let mut worst = 0.0f64;
    // 1-D: scaling a Gaussian component of a sum concentrates it.
    {
        let cells = 1024;
        let x = DensityGrid::gaussian(&[0.0], &[1.0], cells)?;
        let w = DensityGrid::gaussian(&[0.0], &[1.0], cells)?;
        let t = ContractionSpec::scaling(1, 0.5)?;
        let tx = pushforward_grid(&t, &x, x.spec(), 4)?;
        let f = convolve(&x, &w)?;
        let g = convolve(&tx, &w)?;
        let v = majorizes(&g, &f, 0.0)?;
        worst = worst.max(v.worst_deficit / x.spacing());
    }
    // 2-D: uniform balls under a plain scaling.
    {
        let x = DensityGrid::uniform_ball(2, 1.0, 64)?;
        let w = DensityGrid::uniform_ball(2, 1.0, 64)?;
        let t = ContractionSpec::scaling(2, 0.6)?;
        let tx = pushforward_grid(&t, &x, x.spec(), 4)?;
        let f = convolve(&x, &w)?;
        let g = convolve(&tx, &w)?;
        let v = majorizes(&g, &f, 0.0)?;
        worst = worst.max(v.worst_deficit / x.spacing());
    }
    Ok(worst)
}

fn measure_constant() -> Result<f64> {
    let slope = entropy_slope(512)?.max(majorization_slope()?);
    Ok((SAFETY * slope).max(FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_is_deterministic_and_floored() {
        let a = GridBudget::calibrated();
        let b = GridBudget::calibrated();
        assert_eq!(a.constant.to_bits(), b.constant.to_bits());
        assert!(a.constant >= FLOOR);
        assert!(a.constant.is_finite());
    }

    #[test]
    fn budget_scales_with_spacing() {
        let b = GridBudget::with_constant(3.0);
        assert_eq!(b.eps(0.01), 0.03);
        assert!(b.eps(0.005) < b.eps(0.01));
    }
}
