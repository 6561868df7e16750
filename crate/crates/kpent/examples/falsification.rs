//! Stress the open conjectures with randomized instances. A margin below
//! five combined error budgets would be a reportable candidate — the runs
//! here are expected to produce none.

use kpent::contract::ContractionSpec;
use kpent::gauss_epi::stress_open_question;
use kpent::grid::DensityGrid;
use kpent::harness::{self, Config};
use kpent::rng::CounterRng;

fn main() -> kpent::Result<()> {
    let cfg = Config {
        seed: 99,
        grid_cells: 1024,
        grid_cells_2d: 64,
        samples: 50_000,
        escalate: false,
        ..Config::default()
    };

    for id in [
        "KP-union",
        "KP-intersection",
        "Q1-bigquestion",
        "Q3-strengthenedEPI",
    ] {
        let summary = harness::falsify(id, 20, &cfg)?;
        println!(
            "{:<20} trials {:>3}  rows {:>3}  flags {}",
            summary.conjecture_id,
            summary.trials,
            summary.rows,
            summary.flags.len()
        );
        for flag in &summary.flags {
            println!(
                "  CANDIDATE {} margin {:+.4e} (tolerance {:.2e}), seed {}",
                flag.row_id, flag.margin, flag.tolerance, flag.seed
            );
        }
    }

    // The strengthened inequality, driven directly with a custom ensemble.
    let rng = CounterRng::new(7, 0);
    let summary = stress_open_question(
        |trial| {
            let sigma = rng.range_at(trial, 0, 0.5, 1.5);
            DensityGrid::gaussian(&[0.0], &[sigma], 1024)
        },
        |trial| {
            let lam = rng.range_at(trial, 1, 0.1, 1.0);
            ContractionSpec::scaling(1, lam)
        },
        25,
        0.02,
        4,
    )?;
    println!();
    println!(
        "strengthened-EPI stress: {} trials, {} flags, margin range [{:.4}, {:.4}]",
        summary.trials,
        summary.flags.len(),
        summary.margins.iter().cloned().fold(f64::INFINITY, f64::min),
        summary.margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    Ok(())
}
