//! Run configuration for verification suites, loadable from TOML.

use crate::ballgeom::McParams;
use crate::budget::GridBudget;
use crate::error::{Error, Result};
use crate::rng::mix64;
use serde::{Deserialize, Serialize};

/// Knobs shared by every suite. All fields have defaults, so a TOML config
/// may set any subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Master seed; each suite row derives its own sub-seed from it.
    pub seed: u64,
    /// Randomized instances per verify/falsify call.
    pub instances: usize,
    /// Ambient dimension for checks that support a choice (1 or 2 for grid
    /// pipelines, up to 3 for ball geometry).
    pub dim: usize,
    /// Cells per axis for 1-D grids.
    pub grid_cells: usize,
    /// Cells per axis for 2-D grids.
    pub grid_cells_2d: usize,
    /// Pushforward sub-sampling depth.
    pub substeps: usize,
    /// Rényi orders for entropy-comparison rows.
    pub alphas: Vec<f64>,
    /// Scaling factors for the lambda-x suite.
    pub lambdas: Vec<f64>,
    /// Kernel scales for diversity contraction checks.
    pub t_list: Vec<f64>,
    /// Ladder for the scaling-limit check; empty means auto-sized from the
    /// grid spacing so the top rung reaches `t * spacing >= 50`.
    pub t_ladder: Vec<f64>,
    /// Ball count for the geometry checks.
    pub k: usize,
    /// Common ball radius.
    pub radius: f64,
    /// Target Lipschitz scale for generated contractions (upper bound).
    pub lip: f64,
    /// Monte Carlo samples (or pairs, for diversity).
    pub samples: u64,
    /// Escalate sampling tenfold while the margin sits inside its band.
    pub escalate: bool,
    pub max_samples: u64,
    /// Fixed grid-budget constant; unset means self-calibrate at startup.
    pub budget_constant: Option<f64>,
    /// Force a named density family for X (`gaussian`, `uniform`,
    /// `laplace`, `radial`, `polygon`, `bimodal`); unset rotates through
    /// the family menu. `bimodal` is deliberately outside every log-concave
    /// hypothesis class and must be rejected by those suites.
    pub x_family: Option<String>,
    /// Directory for falsification reproduction bundles.
    pub out_dir: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 7,
            instances: 10,
            dim: 2,
            grid_cells: 2048,
            grid_cells_2d: 128,
            substeps: 4,
            alphas: vec![0.5, 1.0, 2.0],
            lambdas: vec![0.25, 0.5, 0.75],
            t_list: vec![0.5, 1.0, 2.0, 5.0],
            t_ladder: Vec::new(),
            k: 5,
            radius: 1.0,
            lip: 0.9,
            samples: 1_000_000,
            escalate: true,
            max_samples: 100_000_000,
            budget_constant: None,
            x_family: None,
            out_dir: None,
        }
    }
}

impl Config {
    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn mc(&self) -> McParams {
        McParams {
            samples: self.samples,
            seed: self.seed,
            escalate: self.escalate,
            max_samples: self.max_samples.max(self.samples),
        }
    }

    pub fn mc_with_seed(&self, seed: u64) -> McParams {
        McParams {
            seed,
            ..self.mc()
        }
    }

    pub fn budget(&self) -> GridBudget {
        match self.budget_constant {
            Some(c) => GridBudget::with_constant(c),
            None => GridBudget::calibrated(),
        }
    }

    /// Deterministic per-row seed derived from the master seed.
    pub fn sub_seed(&self, row: u64) -> u64 {
        mix64(self.seed ^ mix64(row.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
    }

    /// Applies one sweep knob. Values arrive as reals; integral knobs are
    /// rounded.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "alpha" => self.alphas = vec![value],
            "lambda" => self.lambdas = vec![value],
            "lip" => {
                if !(value > 0.0 && value <= 1.0) {
                    return Err(Error::Config(format!("lip must lie in (0,1], got {value}")));
                }
                self.lip = value;
            }
            "t" => self.t_list = vec![value],
            "k" => {
                if value < 1.0 {
                    return Err(Error::Config(format!("k must be >= 1, got {value}")));
                }
                self.k = value.round() as usize;
            }
            "d" => {
                let d = value.round() as usize;
                if !(1..=3).contains(&d) {
                    return Err(Error::Config(format!("d must be 1..=3, got {value}")));
                }
                self.dim = d;
            }
            "samples" => {
                if value < 10_000.0 {
                    return Err(Error::Config(format!(
                        "samples must be >= 10^4, got {value}"
                    )));
                }
                self.samples = value.round() as u64;
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter {other:?}; known: alpha, lambda, lip, t, k, d, samples"
                )))
            }
        }
        Ok(())
    }
}
