//! JSON run and sweep configurations.

use crate::error::{CliError, CliResult};
use choquard::{GridSpec, KernelPolicy, PotentialSpec, ProblemSpec, SolverConfig};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub dim: usize,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub n: usize,
    #[serde(rename = "potentialA")]
    pub potential_a: PotentialSpec,
    #[serde(rename = "potentialB")]
    pub potential_b: PotentialSpec,
    #[serde(default)]
    pub zero_mode_policy: KernelPolicy,
}

/// Which hypotheses the potentials must satisfy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Bounded potentials with a limit at infinity, `B` constant.
    #[serde(rename = "theorem-1.1")]
    BoundedLimit,
    /// Periodic (or constant) potentials.
    #[serde(rename = "theorem-1.2")]
    Periodic,
    #[default]
    #[serde(rename = "free")]
    Free,
}

/// Initial pair for `solve`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Identical centered Gaussians; keeps `u = v` in symmetric problems.
    #[default]
    Symmetric,
    /// Gaussians offset by `∓L/8` along the first axis.
    Offset,
    /// Seeded band-limited random pair.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitKind,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    P,
    Q,
    Alpha,
    /// Amplitude of `A`: `amplitude` for periodic, `well_depth` for
    /// bounded-limit potentials.
    Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base: RunConfig,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let cfg: Self = read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Mode restrictions, solver settings and the exponent window.
    pub fn validate(&self) -> CliResult<()> {
        let (a, b) = (&self.problem.potential_a, &self.problem.potential_b);
        match self.mode {
            Mode::BoundedLimit => {
                if !b.is_constant() {
                    return Err(CliError::Config(
                        "theorem-1.1 mode requires a constant potentialB".into(),
                    ));
                }
                if matches!(a, PotentialSpec::Periodic { .. }) {
                    return Err(CliError::Config(
                        "theorem-1.1 mode requires potentialA to be constant or bounded_limit"
                            .into(),
                    ));
                }
            }
            Mode::Periodic => {
                if [a, b]
                    .iter()
                    .any(|s| matches!(s, PotentialSpec::BoundedLimit { .. }))
                {
                    return Err(CliError::Config(
                        "theorem-1.2 mode requires constant or periodic potentials".into(),
                    ));
                }
            }
            Mode::Free => {}
        }
        self.solver.validate()?;
        let pr = &self.problem;
        choquard::energy::check_admissible(pr.dim, pr.alpha, pr.p, pr.q)?;
        Ok(())
    }

    pub fn build_problem(&self) -> CliResult<ProblemSpec> {
        let pr = &self.problem;
        let grid = GridSpec::new(pr.dim, pr.n, pr.length)?;
        Ok(ProblemSpec::from_specs(
            grid,
            pr.alpha,
            pr.p,
            pr.q,
            &pr.potential_a,
            &pr.potential_b,
            pr.zero_mode_policy,
        )?)
    }
}

impl SweepSpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let spec: Self = read_json(path)?;
        if spec.values.is_empty() {
            return Err(CliError::Config("sweep has no values".into()));
        }
        Ok(spec)
    }

    /// The base configuration with the swept parameter set to `value`.
    pub fn point(&self, value: f64) -> CliResult<RunConfig> {
        let mut cfg = self.base.clone();
        match self.axis {
            Axis::P => cfg.problem.p = value,
            Axis::Q => cfg.problem.q = value,
            Axis::Alpha => cfg.problem.alpha = value,
            Axis::Amplitude => match &mut cfg.problem.potential_a {
                PotentialSpec::Periodic { amplitude, .. } => *amplitude = value,
                PotentialSpec::BoundedLimit { well_depth, .. } => *well_depth = value,
                PotentialSpec::Constant { .. } => {
                    return Err(CliError::Config(
                        "amplitude sweep needs a non-constant potentialA".into(),
                    ))
                }
            },
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
