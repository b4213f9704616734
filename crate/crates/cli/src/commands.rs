//! `solve`, `verify` and `sweep`.

use crate::config::{InitKind, RunConfig, SweepSpec};
use crate::error::{CliError, CliResult};
use crate::output::{self, ResultSummary, SweepRow};
use choquard::grid::write_dump;
use choquard::nehari::{self, SolveResult};
use choquard::random::random_pair;
use choquard::verify;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub parallel: Option<usize>,
    pub quiet: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

fn solve_config(cfg: &RunConfig) -> CliResult<SolveResult> {
    let prob = cfg.build_problem()?;
    for w in prob
        .potential_a()
        .warnings()
        .iter()
        .chain(prob.potential_b().warnings())
    {
        eprintln!("warning: {w}");
    }
    let init = match cfg.init {
        InitKind::Symmetric => nehari::symmetric_init(prob.grid()),
        InitKind::Offset => nehari::default_init(prob.grid()),
        InitKind::Random => random_pair(prob.grid(), cfg.seed),
    };
    Ok(nehari::ground_state(&prob, &cfg.solver, Some(init))?)
}

pub const FIELDS_FILE: &str = "fields.chq1";
pub const RESULT_FILE: &str = "result.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const REPORT_FILE: &str = "verify.json";
pub const SWEEP_FILE: &str = "sweep.csv";

pub fn solve(path: &Path, ov: &Overrides) -> CliResult<()> {
    let mut cfg = RunConfig::load(path)?;
    ov.apply(&mut cfg);
    let res = solve_config(&cfg)?;
    let dir = &cfg.output_dir;
    output::write_atomic(&dir.join(FIELDS_FILE), |w| {
        write_dump(w, &[("u", &res.pair.u), ("v", &res.pair.v)]).map_err(std::io::Error::other)
    })?;
    let summary = ResultSummary::from(&res);
    output::write_json(&dir.join(RESULT_FILE), &summary)?;
    output::write_history(&dir.join(HISTORY_FILE), &res.history)?;
    ov.say(format!(
        "c0 = {:.12e}  iterations = {}  residual = {:.3e}  converged = {}",
        res.c0, res.iterations, summary.residual, res.converged
    ));
    if res.boundary_warning {
        eprintln!("warning: solution does not decay to the box boundary; enlarge L");
    }
    if !res.converged {
        return Err(CliError::Convergence(format!(
            "no convergence after {} iterations (residual {:.3e})",
            res.iterations, summary.residual
        )));
    }
    Ok(())
}

pub fn verify(path: &Path, ov: &Overrides) -> CliResult<()> {
    let mut cfg = RunConfig::load(path)?;
    ov.apply(&mut cfg);
    let prob = cfg.build_problem()?;
    let reports = verify::run_suite(&prob, &cfg.solver, cfg.seed);
    output::write_atomic(&cfg.output_dir.join(REPORT_FILE), |w| {
        writeln!(w, "{}", verify::reports_to_json(&reports))
    })?;
    ov.say(verify::render_table(&reports));
    let failed: Vec<_> = reports
        .iter()
        .filter(|r| r.failed())
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

enum PointOutcome {
    Solved(SolveResult),
    ConfigError(String),
    SolveError(String),
}

fn sweep_point(spec: &SweepSpec, value: f64) -> PointOutcome {
    match spec.point(value).and_then(|cfg| solve_config(&cfg)) {
        Ok(res) => PointOutcome::Solved(res),
        Err(CliError::Config(msg)) => PointOutcome::ConfigError(msg),
        Err(e) => PointOutcome::SolveError(e.to_string()),
    }
}

pub fn sweep(path: &Path, ov: &Overrides) -> CliResult<()> {
    let mut spec = SweepSpec::load(path)?;
    ov.apply(&mut spec.base);
    let outcomes: Vec<PointOutcome> = if ov.parallel.is_some_and(|k| k > 1) {
        spec.values
            .par_iter()
            .map(|&v| sweep_point(&spec, v))
            .collect()
    } else {
        spec.values.iter().map(|&v| sweep_point(&spec, v)).collect()
    };

    let mut rows = Vec::with_capacity(outcomes.len());
    let (mut config_errors, mut failures) = (0, 0);
    for (&value, outcome) in spec.values.iter().zip(&outcomes) {
        let row = match outcome {
            PointOutcome::Solved(res) => {
                if !res.converged {
                    failures += 1;
                }
                SweepRow {
                    value,
                    c0: res.c0,
                    converged: res.converged,
                    residual: res.relative_residual(),
                    asym: res.asymmetry(),
                }
            }
            PointOutcome::ConfigError(msg) => {
                config_errors += 1;
                eprintln!("{value}: config error: {msg}");
                SweepRow::failed(value)
            }
            PointOutcome::SolveError(msg) => {
                failures += 1;
                eprintln!("{value}: {msg}");
                SweepRow::failed(value)
            }
        };
        ov.say(format!(
            "{:<10} c0 = {:<22} converged = {:<5} asym = {}",
            row.value, row.c0, row.converged, row.asym
        ));
        rows.push(row);
    }
    output::write_sweep(&spec.base.output_dir.join(SWEEP_FILE), &rows)?;
    if config_errors > 0 {
        Err(CliError::Config(format!(
            "{config_errors} sweep point(s) are invalid"
        )))
    } else if failures > 0 {
        Err(CliError::Convergence(format!(
            "{failures} sweep point(s) did not converge"
        )))
    } else {
        Ok(())
    }
}
