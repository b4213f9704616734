//! Nehari projection and ground-state search.
//!
//! Every pair with `D(u,v) > 0` has a unique ray maximizer
//! `t̄ = (‖(u,v)‖² / 2D)^{1/(p+q−2)}` of `t ↦ 𝓘(tu, tv)`, and `(t̄u, t̄v)` lies
//! on the Nehari manifold. [`ground_state`] minimizes `𝓘` over that manifold
//! with a preconditioned projected gradient flow:
//!
//! 1. project the iterate onto the manifold,
//! 2. take the L²-gradient and precondition it with `(−Δ + c)^{−1}`,
//! 3. step, optionally fold into the positive cone with `|·|`,
//! 4. re-project and accept if the action decreased, else backtrack.
//!
//! The first trial step is `step0`; later ones use the Barzilai–Borwein
//! length in the preconditioner's metric, which keeps nearly flat directions
//! (weak potentials, slow drift of one component) from stalling the flow.

use crate::energy::{self, EnergyReport, Pair, ProblemSpec};
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Spectrum};
use crate::par;
use serde::{Deserialize, Serialize};

/// Boundary-shell to peak amplitude ratio above which a solution is flagged
/// as feeling the box.
pub const BOUNDARY_WARNING_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub step0: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Relative per-iteration action decrease below which the flow is
    /// considered stagnant.
    pub tol_energy: f64,
    /// Bound on `‖∇𝓘‖₂ / ‖(u,v)‖`.
    pub tol_residual: f64,
    pub max_iters: usize,
    pub enforce_positivity: bool,
    pub precondition_shift: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step0: 1.0,
            backtrack: 0.5,
            max_backtracks: 30,
            tol_energy: 1e-10,
            tol_residual: 1e-6,
            max_iters: 5000,
            enforce_positivity: true,
            precondition_shift: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        positive("step0", self.step0)?;
        positive("tol_energy", self.tol_energy)?;
        positive("tol_residual", self.tol_residual)?;
        positive("precondition_shift", self.precondition_shift)?;
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Domain(format!(
                "backtrack must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub action: f64,
    pub nehari: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub pair: Pair,
    /// Action at the final iterate, the estimate of the ground-state level.
    pub c0: f64,
    pub report: EnergyReport,
    pub iterations: usize,
    /// Accepted iterates, starting with the projected initial pair.
    pub history: Vec<HistoryEntry>,
    pub converged: bool,
    pub boundary_warning: bool,
}

impl SolveResult {
    pub fn relative_residual(&self) -> f64 {
        self.report.relative_residual()
    }

    /// `‖u − v‖₂ / ‖u‖₂`.
    pub fn asymmetry(&self) -> f64 {
        let diff = self
            .pair
            .u
            .zip_map(&self.pair.v, |a, b| a - b)
            .map(|d| d.l2_norm())
            .unwrap_or(f64::NAN);
        diff / self.pair.u.l2_norm()
    }

    /// Converts a non-converged result into [`Error::NoConvergence`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NoConvergence {
                iterations: self.iterations,
                residual: self.relative_residual(),
            })
        }
    }
}

/// `t̄ = (‖(u,v)‖² / 2D)^{1/(p+q−2)}`.
pub fn nehari_scale(norm_sq: f64, coupling: f64, degree: f64) -> Result<f64> {
    if !(coupling > 0.0) || !(norm_sq > 0.0) {
        return Err(Error::DegeneratePair {
            iteration: None,
            reason: format!("cannot project: norm² = {norm_sq:e}, coupling = {coupling:e}"),
        });
    }
    let t = (norm_sq / (2.0 * coupling)).powf(1.0 / (degree - 2.0));
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(Error::DegeneratePair {
            iteration: None,
            reason: format!("projection scale {t} is not finite"),
        })
    }
}

/// Scales a pair onto the Nehari manifold. Returns `(t̄, (t̄u, t̄v))`.
pub fn nehari_project(prob: &ProblemSpec, pair: &Pair) -> Result<(f64, Pair)> {
    if pair.u.max_abs() == 0.0 || pair.v.max_abs() == 0.0 {
        return Err(Error::DegeneratePair {
            iteration: None,
            reason: "a component vanishes".into(),
        });
    }
    let (norm_sq, d) = energy::energies(prob, pair)?;
    let t = nehari_scale(norm_sq, d, prob.degree())?;
    Ok((t, pair.scale(t)))
}

/// `(−Δ + c)^{−1}` applied to one field.
pub fn precondition_field(f: &Field, shift: f64) -> Field {
    let g = *f.grid();
    let symbol = par::collect(g.len(), |i| 1.0 / (g.wavenumber_sq(i) + shift));
    let mut s = Spectrum::forward(f);
    s.apply_symbol(&symbol);
    s.to_field()
}

/// `(−Δ + c)^{−1}` componentwise.
pub fn precondition(g: &Pair, shift: f64) -> Result<Pair> {
    if !(shift.is_finite() && shift > 0.0) {
        return Err(Error::Domain(format!(
            "preconditioner shift must be positive, got {shift}"
        )));
    }
    Ok(Pair {
        u: precondition_field(&g.u, shift),
        v: precondition_field(&g.v, shift),
    })
}

fn unit_gaussian(grid: &GridSpec, center: f64) -> Field {
    let width = grid.length() / 10.0;
    let f = Field::from_fn(*grid, |x| {
        let r2 = (x[0] - center).powi(2) + x[1] * x[1] + x[2] * x[2];
        (-r2 / (width * width)).exp()
    });
    f.scale(1.0 / f.l2_norm())
}

/// Two unit-L² Gaussians of width `L/10` centered at `∓L/8` on the first axis.
pub fn default_init(grid: &GridSpec) -> Pair {
    let shift = grid.length() / 8.0;
    Pair {
        u: unit_gaussian(grid, -shift),
        v: unit_gaussian(grid, shift),
    }
}

/// Identical centered unit-L² Gaussians of width `L/10`. Symmetric problems
/// (`p = q`, `A = B`) keep `u = v` exactly from this start.
pub fn symmetric_init(grid: &GridSpec) -> Pair {
    let bump = unit_gaussian(grid, 0.0);
    Pair {
        u: bump.clone(),
        v: bump,
    }
}

/// `⟨s, (−Δ + c) s⟩`: squared step length in the metric whose gradient is
/// the preconditioned one.
fn metric_norm_sq(s: &Pair, shift: f64) -> f64 {
    s.u.dirichlet_energy() + s.v.dirichlet_energy() + shift * (s.u.norm_sq() + s.v.norm_sq())
}

/// Barzilai–Borwein trial step, bounded to `step0 · [1e−4, 1e4]`.
fn bb_step(s: &Pair, y: &Pair, cfg: &SolverConfig) -> Result<f64> {
    let sy = s.inner_product(y)?;
    let step = metric_norm_sq(s, cfg.precondition_shift) / sy;
    Ok(if sy > 0.0 && step.is_finite() {
        step.clamp(1e-4 * cfg.step0, 1e4 * cfg.step0)
    } else {
        cfg.step0
    })
}

fn with_iteration(e: Error, it: usize) -> Error {
    match e {
        Error::DegeneratePair { reason, .. } => Error::DegeneratePair {
            iteration: Some(it),
            reason,
        },
        other => other,
    }
}

/// Minimizes `𝓘` over the Nehari manifold starting from `init`
/// ([`default_init`] when `None`).
pub fn ground_state(
    prob: &ProblemSpec,
    cfg: &SolverConfig,
    init: Option<Pair>,
) -> Result<SolveResult> {
    ground_state_observed(prob, cfg, init, |_, _| {})
}

/// [`ground_state`] calling `observer(iteration, pair)` after the initial
/// projection and after every accepted step.
pub fn ground_state_observed<F>(
    prob: &ProblemSpec,
    cfg: &SolverConfig,
    init: Option<Pair>,
    mut observer: F,
) -> Result<SolveResult>
where
    F: FnMut(usize, &Pair),
{
    cfg.validate()?;
    let init = init.unwrap_or_else(|| default_init(prob.grid()));
    prob.grid().check_same(init.grid())?;
    let init = if cfg.enforce_positivity {
        init.abs()
    } else {
        init
    };

    let (_, mut pair) = nehari_project(prob, &init).map_err(|e| with_iteration(e, 0))?;
    let (mut report, mut grad) = energy::evaluate(prob, &pair)?;
    let mut history = vec![HistoryEntry {
        iteration: 0,
        action: report.action,
        nehari: report.nehari,
        residual: report.relative_residual(),
    }];
    observer(0, &pair);

    let mut step = cfg.step0;
    let mut last_decrease = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        if report.relative_residual() <= cfg.tol_residual && last_decrease <= cfg.tol_energy {
            converged = true;
            break;
        }
        let direction = precondition(&grad, cfg.precondition_shift)?;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial = pair.axpy(-step, &direction)?;
            let trial = if cfg.enforce_positivity {
                trial.abs()
            } else {
                trial
            };
            // A collapsing trial step is rejected like an uphill one.
            if let Ok((_, projected)) = nehari_project(prob, &trial) {
                let (norm_sq, d) = energy::energies(prob, &projected)?;
                let action = 0.5 * norm_sq - 2.0 / prob.degree() * d;
                if action < report.action {
                    accepted = Some(projected);
                    break;
                }
            }
            step *= cfg.backtrack;
        }
        let Some(next) = accepted else {
            // Line search exhausted: no representable descent left.
            converged = report.relative_residual() <= cfg.tol_residual;
            break;
        };
        iterations += 1;
        let previous = report.action;
        let next_grad;
        (report, next_grad) =
            energy::evaluate(prob, &next).map_err(|e| with_iteration(e, iterations))?;
        step = bb_step(&next.axpy(-1.0, &pair)?, &next_grad.axpy(-1.0, &grad)?, cfg)?;
        grad = next_grad;
        pair = next;
        last_decrease = (previous - report.action) / report.action.abs().max(f64::MIN_POSITIVE);
        history.push(HistoryEntry {
            iteration: iterations,
            action: report.action,
            nehari: report.nehari,
            residual: report.relative_residual(),
        });
        observer(iterations, &pair);
    }
    if !converged && iterations >= cfg.max_iters {
        converged =
            report.relative_residual() <= cfg.tol_residual && last_decrease <= cfg.tol_energy;
    }

    let boundary_warning =
        pair.u.boundary_ratio().max(pair.v.boundary_ratio()) > BOUNDARY_WARNING_RATIO;
    Ok(SolveResult {
        c0: report.action,
        pair,
        report,
        iterations,
        history,
        converged,
        boundary_warning,
    })
}
