//! Run every registered check suite at a small budget and print a
//! one-line-per-suite summary, then a sweep over the scaling factor.

use kpent::harness::{self, Config, EntryKind, REGISTRY};

fn main() -> kpent::Result<()> {
    let cfg = Config {
        seed: 1,
        instances: 3,
        grid_cells: 1024,
        grid_cells_2d: 64,
        samples: 50_000,
        escalate: false,
        ..Config::default()
    };

    println!("{:<22} {:>5} {:>6} {:>12}", "suite", "rows", "pass", "worst margin");
    for entry in REGISTRY {
        // Conjectures run through `falsify`; this drives the verify path,
        // which covers them on their expected-pass regimes too.
        let rows = harness::verify(entry.id, &cfg)?;
        let worst = rows
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min);
        let ok = rows.iter().all(|r| r.pass);
        println!(
            "{:<22} {:>5} {:>6} {:>12.3e}  {}",
            entry.id,
            rows.len(),
            ok,
            worst,
            match entry.kind {
                EntryKind::Theorem => "",
                EntryKind::Conjecture => "(conjecture)",
            }
        );
    }

    println!();
    println!("sweep of the scaling factor on the lambda-x suite:");
    let mut sweep_cfg = cfg.clone();
    sweep_cfg.dim = 1;
    sweep_cfg.instances = 2;
    let rows = harness::sweep(
        "T2.1-lambdaX",
        "lambda",
        &[0.25, 0.5, 0.75, 1.0],
        &sweep_cfg,
    )?;
    for r in rows.iter().filter(|r| r.theorem_id.contains("/alpha1")) {
        println!("  {:<40} margin {:+.5}", r.theorem_id, r.margin);
    }

    println!();
    println!("self-test:");
    for line in harness::selftest() {
        println!("  {:<22} {}", line.name, if line.pass { "pass" } else { "FAIL" });
    }
    Ok(())
}
