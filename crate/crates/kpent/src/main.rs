//! `kpent`: command-line front end over the library. Parsing and printing
//! only; all computation lives in the library crate.

use clap::{Parser, Subcommand, ValueEnum};
use kpent::diversity::{diversity2_discrete, scaling_limit_check, ScalingVerdict};
use kpent::error::Error;
use kpent::grid::DensityGrid;
use kpent::harness::{self, Config};
use kpent::rearrange::{majorizes, rearrange};
use kpent::report::{self, CheckReport};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "kpent",
    version,
    about = "entropy, rearrangement, and ball-volume checks for contracted sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo samples (or pairs).
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Cells per axis for generated grids.
    #[arg(long, global = true, value_name = "CELLS")]
    grid: Option<usize>,
    /// Tolerance override: comparison tolerance for `majorize`, budget
    /// constant for grid suites.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// TOML config file; CLI flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rényi entropies of a grid density.
    Entropy {
        /// Binary grid file.
        #[arg(long, conflicts_with = "density")]
        input: Option<PathBuf>,
        /// Built-in density, e.g. gaussian:sigma=1 | uniform:a=0,b=1 |
        /// laplace:b=1 | ball:r=1,d=2 | radial:p=1.5,s=1.
        #[arg(long)]
        density: Option<String>,
        /// Orders to evaluate ("inf" allowed).
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2,inf")]
        alpha: Vec<String>,
        /// Also write the grid (binary + JSON sidecar).
        #[arg(long)]
        save_grid: Option<PathBuf>,
    },
    /// Convolve two grid densities (FFT fast path; --direct for the oracle).
    Convolve {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out_grid: PathBuf,
        #[arg(long)]
        direct: bool,
    },
    /// Symmetric decreasing rearrangement of a grid density.
    Rearrange {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_grid: PathBuf,
    },
    /// Majorization verdict: does g majorize f?
    Majorize {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Union / intersection volume checks on random ball configurations.
    KpCheck {
        #[arg(long, value_parser = ["union", "intersect"])]
        mode: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Entropy-power checks with Gaussian noise.
    EpiCheck {
        #[arg(long, value_parser = ["linear", "vector", "strong", "isotropic"])]
        which: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        instances: Option<usize>,
    },
    /// Order-2 diversity: exact values for a discrete law, or the scaling
    /// limit on a grid density.
    Diversity {
        /// Inline JSON {"weights":[...],"points":[[...],...]}.
        #[arg(long, conflicts_with = "density")]
        discrete: Option<String>,
        /// Built-in grid density for the scaling limit (see `entropy`).
        #[arg(long)]
        density: Option<String>,
        /// Kernel scales for the discrete evaluation.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,5")]
        t: Vec<f64>,
        /// Run the scaling-limit convergence check.
        #[arg(long)]
        scaling: bool,
    },
    /// Run one registered theorem suite.
    Verify { id: String },
    /// Repeat a suite along one knob (alpha, lambda, lip, t, k, d, samples).
    Sweep {
        id: String,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Randomized stress run against an open conjecture.
    Falsify {
        id: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Registry coverage and closed-form anchors.
    Selftest,
}

fn parse_density(spec: &str, cells: usize) -> Result<DensityGrid, Error> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = std::collections::HashMap::new();
    for kv in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("bad density parameter {kv:?}")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| Error::Config(format!("bad number in {kv:?}")))?;
        params.insert(k.to_string(), v);
    }
    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    match name {
        "gaussian" => {
            let d = get("d", 1.0) as usize;
            DensityGrid::gaussian(&vec![get("mean", 0.0); d], &vec![get("sigma", 1.0); d], cells)
        }
        "uniform" => {
            let a = get("a", 0.0);
            let b = get("b", 1.0);
            let d = get("d", 1.0) as usize;
            DensityGrid::uniform_box(&vec![a; d], &vec![b; d], cells)
        }
        "laplace" => DensityGrid::laplace(get("d", 1.0) as usize, get("b", 1.0), cells),
        "ball" => DensityGrid::uniform_ball(get("d", 2.0) as usize, get("r", 1.0), cells),
        "radial" => {
            DensityGrid::radial_exp(get("d", 2.0) as usize, get("p", 1.5), get("s", 1.0), cells)
        }
        other => Err(Error::Config(format!(
            "unknown density {other:?}; known: gaussian, uniform, laplace, ball, radial"
        ))),
    }
}

fn base_config(cli: &Cli) -> Result<Config, Error> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.samples {
        cfg.samples = n;
        cfg.max_samples = cfg.max_samples.max(n);
    }
    if let Some(g) = cli.grid {
        cfg.grid_cells = g;
        cfg.grid_cells_2d = g.min(256);
    }
    if let Some(t) = cli.tol {
        cfg.budget_constant = Some(t);
    }
    Ok(cfg)
}

fn emit_rows(cli: &Cli, rows: &[CheckReport], geometry: bool) -> Result<bool, Error> {
    let text = match cli.format {
        Format::Csv if geometry => report::to_csv_geometry(rows),
        Format::Csv => report::to_csv(rows),
        Format::Json => serde_json::to_string_pretty(rows)?,
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    let all = report::all_pass(rows);
    eprintln!(
        "{} rows, {}",
        rows.len(),
        if all { "all pass" } else { "FAILURES present" }
    );
    Ok(all)
}

fn pass_code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let cfg = base_config(cli)?;
    match &cli.command {
        Command::Entropy {
            input,
            density,
            alpha,
            save_grid,
        } => {
            let grid = match (input, density) {
                (Some(p), _) => {
                    let mut g = DensityGrid::load(p)?;
                    g.normalize()?;
                    g
                }
                (None, Some(spec)) => parse_density(spec, cfg.grid_cells)?,
                (None, None) => return Err(Error::Config("need --input or --density".into())),
            };
            if let Some(path) = save_grid {
                grid.save(path)?;
            }
            println!("alpha,entropy_nats");
            for a in alpha {
                let order = if a == "inf" {
                    f64::INFINITY
                } else {
                    a.parse()
                        .map_err(|_| Error::Config(format!("bad alpha {a:?}")))?
                };
                println!("{a},{}", grid.renyi_entropy(order)?);
            }
            println!("entropy_power,{}", grid.entropy_power()?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Convolve {
            a,
            b,
            out_grid,
            direct,
        } => {
            let mut fa = DensityGrid::load(a)?;
            fa.normalize()?;
            let mut fb = DensityGrid::load(b)?;
            fb.normalize()?;
            let c = if *direct {
                kpent::convolve::convolve_direct(&fa, &fb)?
            } else {
                kpent::convolve::convolve(&fa, &fb)?
            };
            c.save(out_grid)?;
            println!("cells,{}", c.spec().cell_count());
            println!("h1,{}", c.renyi_entropy(1.0)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Rearrange { input, out_grid } => {
            let mut f = DensityGrid::load(input)?;
            f.normalize()?;
            let r = rearrange(&f)?;
            r.save(out_grid)?;
            println!("support_cells,{}", r.support_cells());
            println!("h1,{}", r.renyi_entropy(1.0)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Majorize { f, g } => {
            let mut df = DensityGrid::load(f)?;
            df.normalize()?;
            let mut dg = DensityGrid::load(g)?;
            dg.normalize()?;
            let tol = cli.tol.unwrap_or(0.0);
            let v = majorizes(&dg, &df, tol)?;
            println!("holds,{}", v.holds);
            println!("worst_radius,{}", v.worst_radius);
            println!("worst_deficit,{}", v.worst_deficit);
            println!("tolerance,{}", v.tolerance_used);
            Ok(pass_code(v.holds))
        }
        Command::KpCheck {
            mode,
            k,
            d,
            radius,
            instances,
        } => {
            let mut cfg = cfg;
            if let Some(k) = k {
                cfg.k = *k;
            }
            if let Some(d) = d {
                cfg.dim = *d;
            }
            if let Some(r) = radius {
                cfg.radius = *r;
            }
            if let Some(n) = instances {
                cfg.instances = *n;
            }
            let id = if mode == "union" {
                "KP-union"
            } else {
                "KP-intersection"
            };
            let rows = harness::verify(id, &cfg)?;
            Ok(pass_code(emit_rows(cli, &rows, true)?))
        }
        Command::EpiCheck {
            which,
            d,
            instances,
        } => {
            let mut cfg = cfg;
            if let Some(d) = d {
                cfg.dim = *d;
            }
            if let Some(n) = instances {
                cfg.instances = *n;
            }
            let id = match which.as_str() {
                "linear" => "T3.1-linearEPI",
                "vector" => "T3.0-vectorEPI",
                "strong" => "T3.2-gaussianStrong",
                _ => "T3.3-isotropicLC",
            };
            let rows = harness::verify(id, &cfg)?;
            Ok(pass_code(emit_rows(cli, &rows, false)?))
        }
        Command::Diversity {
            discrete,
            density,
            t,
            scaling,
        } => {
            if let Some(json) = discrete {
                let v: serde_json::Value = serde_json::from_str(json)?;
                let weights: Vec<f64> = serde_json::from_value(
                    v.get("weights")
                        .cloned()
                        .ok_or_else(|| Error::Config("missing weights".into()))?,
                )?;
                let points: Vec<Vec<f64>> = serde_json::from_value(
                    v.get("points")
                        .cloned()
                        .ok_or_else(|| Error::Config("missing points".into()))?,
                )?;
                println!("t,diversity2");
                for &tv in t {
                    println!("{tv},{}", diversity2_discrete(&weights, &points, tv)?);
                }
                return Ok(ExitCode::SUCCESS);
            }
            if !*scaling {
                return Err(Error::Config("diversity needs --discrete or --scaling".into()));
            }
            let spec = density.as_deref().unwrap_or("uniform:a=0,b=1");
            let grid = parse_density(spec, cfg.grid_cells.min(2048))?;
            let top = 55.0 / grid.spacing();
            let ladder = if cfg.t_ladder.is_empty() {
                vec![top / 1000.0, top / 100.0, top / 10.0, top / 3.0, top]
            } else {
                cfg.t_ladder.clone()
            };
            let out = scaling_limit_check(&grid, &ladder, cfg.seed)?;
            println!("t,ratio,target");
            for r in &out.rungs {
                println!("{},{},{}", r.t, r.ratio, out.target);
            }
            match out.verdict {
                ScalingVerdict::Converged { last_relative_gap } => {
                    println!("verdict,converged");
                    println!("last_relative_gap,{last_relative_gap}");
                    println!("monotone_trend,{}", out.monotone_trend);
                    Ok(pass_code(out.report.map(|r| r.pass).unwrap_or(false)))
                }
                ScalingVerdict::Inconclusive => {
                    println!("verdict,inconclusive");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Verify { id } => {
            let rows = harness::verify(id, &cfg)?;
            let geometry = id.starts_with("KP-");
            Ok(pass_code(emit_rows(cli, &rows, geometry)?))
        }
        Command::Sweep { id, param, values } => {
            let rows = harness::sweep(id, param, values, &cfg)?;
            Ok(pass_code(emit_rows(cli, &rows, false)?))
        }
        Command::Falsify { id, trials } => {
            let summary = harness::falsify(id, *trials, &cfg)?;
            let text = serde_json::to_string_pretty(&summary)?;
            match &cli.out {
                Some(p) => std::fs::write(p, &text)?,
                None => println!("{text}"),
            }
            eprintln!(
                "{}: {} trials, {} rows, {} flags",
                summary.conjecture_id,
                summary.trials,
                summary.rows,
                summary.flags.len()
            );
            Ok(pass_code(summary.flags.is_empty()))
        }
        Command::Selftest => {
            let lines = harness::selftest();
            let mut ok = true;
            for l in &lines {
                println!(
                    "{},{},{}",
                    l.name,
                    if l.pass { "pass" } else { "FAIL" },
                    l.detail
                );
                ok &= l.pass;
            }
            Ok(pass_code(ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            // config and usage problems exit 2, per the exit-code contract
            ExitCode::from(2)
        }
    }
}
