//! Named, reportable numerical checks of the identities and inequalities
//! behind the Nehari-manifold argument.
//!
//! Inequalities whose constants are not computable (Hardy–Littlewood–Sobolev,
//! Sobolev) are checked as scaling or ordering statements only.

use crate::energy::{self, Pair, ProblemSpec};
use crate::error::{Error, Result};
use crate::nehari::{self, SolveResult, SolverConfig};
use crate::potentials::{sample_potential, PotentialSpec};
use crate::random::{gaussian_bump, random_pair};
use crate::riesz::KernelPolicy;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const SEMIGROUP_TOL: f64 = 1e-12;
pub const CAUCHY_SCHWARZ_SLACK: f64 = 1e-10;
pub const HLS_TOL: f64 = 1e-10;
pub const NEHARI_IDENTITY_TOL: f64 = 1e-8;
pub const GRADIENT_TOL: f64 = 1e-5;
pub const GRADIENT_EPS: f64 = 1e-5;
pub const SHIFT_TOL: f64 = 1e-8;
/// `|𝓟| / ‖(u,v)‖²` above which a pair is treated as off the manifold.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Preconditions not met; the check neither passed nor failed.
    pub skipped: bool,
    pub measured: f64,
    pub threshold: f64,
    pub details: String,
}

impl CheckReport {
    /// Defect-style report: passes iff `measured <= threshold`.
    pub fn defect(name: &str, measured: f64, threshold: f64, details: String) -> Self {
        Self {
            name: name.into(),
            passed: measured <= threshold,
            skipped: false,
            measured,
            threshold,
            details,
        }
    }

    pub fn skip(name: &str, details: String) -> Self {
        Self {
            name: name.into(),
            passed: true,
            skipped: true,
            measured: 0.0,
            threshold: 0.0,
            details,
        }
    }

    pub fn failed(&self) -> bool {
        !self.skipped && !self.passed
    }
}

/// Relative semigroup defect `|D − ⟨I_{α/2}|u|^p, I_{α/2}|v|^q⟩| / |D|`,
/// always evaluated with the `Drop` policy.
pub fn check_semigroup(prob: &ProblemSpec, pair: &Pair) -> Result<CheckReport> {
    let drop = prob.with_policy(KernelPolicy::Drop)?;
    let d = energy::coupling(&drop, pair)?;
    let half = drop.riesz_half();
    let hu = half.apply(&drop.density_u(&pair.u))?;
    let hv = half.apply(&drop.density_v(&pair.v))?;
    let split = hu.inner_product(&hv)?;
    let measured = (d - split).abs() / d.abs().max(f64::MIN_POSITIVE);
    Ok(CheckReport::defect(
        "semigroup",
        measured,
        SEMIGROUP_TOL,
        format!("D = {d:.12e}, half-order product = {split:.12e}"),
    ))
}

/// `D(u,v)² ≤ (∫(I_α∗|u|^p)|u|^p)(∫(I_α∗|v|^q)|v|^q)`, `Drop` policy.
/// `measured` is the ratio of the two sides.
pub fn check_cauchy_schwarz(prob: &ProblemSpec, pair: &Pair) -> Result<CheckReport> {
    let drop = prob.with_policy(KernelPolicy::Drop)?;
    let op = drop.riesz();
    let du = drop.density_u(&pair.u);
    let dv = drop.density_v(&pair.v);
    let iu = op.apply(&du)?;
    let d = iu.inner_product(&dv)?;
    let duu = iu.inner_product(&du)?;
    let dvv = op.apply(&dv)?.inner_product(&dv)?;
    let rhs = duu * dvv;
    let measured = if rhs > 0.0 { d * d / rhs } else { 0.0 };
    Ok(CheckReport::defect(
        "cauchy_schwarz",
        measured,
        1.0 + CAUCHY_SCHWARZ_SLACK,
        format!("D² = {:.12e}, product = {rhs:.12e}", d * d),
    ))
}

/// `R(v) = ∫|I_α∗v|^{Ns/(N−αs)} / (∫|v|^s)^{N/(N−αs)}`.
pub fn hls_ratio(prob: &ProblemSpec, v: &crate::grid::Field, s: f64) -> Result<f64> {
    let n = prob.dim() as f64;
    let alpha = prob.alpha();
    if !(s > 1.0 && s < n / alpha) {
        return Err(Error::Domain(format!(
            "HLS exponent s = {s} outside (1, N/alpha) = (1, {})",
            n / alpha
        )));
    }
    let r = n * s / (n - alpha * s);
    let outer = n / (n - alpha * s);
    let iv = prob.riesz().apply(v)?;
    let num = iv.map(|x| x.abs().powf(r)).integrate();
    let den = v.map(|x| x.abs().powf(s)).integrate().powf(outer);
    Ok(num / den)
}

/// Scale invariance of the HLS quotient under `v → λv`, `λ ∈ {1/2, 3}`.
pub fn check_hls_scaling(
    prob: &ProblemSpec,
    v: &crate::grid::Field,
    s: f64,
) -> Result<CheckReport> {
    let base = hls_ratio(prob, v, s)?;
    let mut worst: f64 = 0.0;
    let mut details = format!("R(v) = {base:.12e}");
    for lambda in [0.5, 3.0] {
        let scaled = hls_ratio(prob, &v.scale(lambda), s)?;
        let dev = (scaled / base - 1.0).abs();
        if !dev.is_finite() {
            worst = f64::INFINITY;
        } else {
            worst = worst.max(dev);
        }
        let _ = write!(
            details,
            ", R({lambda}v)/R(v) - 1 = {:.3e}",
            scaled / base - 1.0
        );
    }
    Ok(CheckReport::defect("hls_scaling", worst, HLS_TOL, details))
}

/// Splitting defects `|D(u+w_d, v+z_d) − D(u,v) − D(w_d,z_d)|` where
/// `(w_d, z_d)` is `other` translated by `d` grid points along the first axis.
pub fn splitting_defects(
    prob: &ProblemSpec,
    base: &Pair,
    other: &Pair,
    separations: &[usize],
) -> Result<Vec<f64>> {
    let d_base = energy::coupling(prob, base)?;
    let mut offsets = vec![0i64; prob.dim()];
    separations
        .iter()
        .map(|&d| {
            offsets[0] = d as i64;
            let moved = other.shift(&offsets)?;
            let sum = base.axpy(1.0, &moved)?;
            let joint = energy::coupling(prob, &sum)?;
            let apart = energy::coupling(prob, &moved)?;
            Ok((joint - d_base - apart).abs())
        })
        .collect()
}

/// Splitting of the coupling for two identical Gaussian bumps: the defect
/// must strictly decrease across the given separations (grid points).
pub fn check_brezis_lieb(
    prob: &ProblemSpec,
    width: f64,
    separations: &[usize],
) -> Result<CheckReport> {
    let g = prob.grid();
    if !(width > 0.0 && width <= g.length() / 20.0) {
        return Err(Error::Domain(format!(
            "bump width {width} must lie in (0, L/20 = {}]",
            g.length() / 20.0
        )));
    }
    if separations.len() < 2 || separations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "separations must be strictly increasing".into(),
        ));
    }
    if separations
        .iter()
        .any(|&d| d as f64 * g.spacing() > 0.5 * g.length())
    {
        return Err(Error::Domain("separations must not exceed L/2".into()));
    }
    let bump = gaussian_bump(g, &vec![0.0; g.dim()], width);
    let pair = Pair {
        u: bump.clone(),
        v: bump,
    };
    let defects = splitting_defects(prob, &pair, &pair, separations)?;
    let measured = defects.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let mut details = String::from("defects:");
    for (d, e) in separations.iter().zip(&defects) {
        let _ = write!(details, " d={:.4}:{e:.6e}", *d as f64 * g.spacing());
    }
    Ok(CheckReport {
        name: "brezis_lieb".into(),
        passed: measured < 1.0,
        skipped: false,
        measured,
        threshold: 1.0,
        details,
    })
}

/// `|𝓘 − (p+q−2)/(2(p+q)) ‖(u,v)‖²| / 𝓘` for a pair on the manifold;
/// skipped when `|𝓟| > ON_MANIFOLD_TOL · ‖(u,v)‖²`.
pub fn check_nehari_identity_pair(
    prob: &ProblemSpec,
    pair: &Pair,
    threshold: f64,
) -> Result<CheckReport> {
    let (norm_sq, d) = energy::energies(prob, pair)?;
    let nehari = norm_sq - 2.0 * d;
    if !(norm_sq > 0.0) || nehari.abs() > ON_MANIFOLD_TOL * norm_sq {
        return Ok(CheckReport::skip(
            "nehari_identity",
            format!("pair is off the Nehari manifold (P = {nehari:.3e}, norm² = {norm_sq:.3e})"),
        ));
    }
    let action = 0.5 * norm_sq - 2.0 / prob.degree() * d;
    let identity = prob.nehari_factor() * norm_sq;
    let measured = (action - identity).abs() / action.abs();
    Ok(CheckReport::defect(
        "nehari_identity",
        measured,
        threshold,
        format!("I = {action:.12e}, factor·norm² = {identity:.12e}"),
    ))
}

/// Nehari energy identity at a converged solution.
pub fn check_nehari_identity(prob: &ProblemSpec, result: &SolveResult) -> Result<CheckReport> {
    if !result.converged {
        return Ok(CheckReport::skip(
            "nehari_identity",
            "solve did not converge".into(),
        ));
    }
    check_nehari_identity_pair(prob, &result.pair, NEHARI_IDENTITY_TOL)
}

/// Central difference `(𝓘(w+εφ) − 𝓘(w−εφ)) / 2ε` against `⟨∇𝓘(w), φ⟩`.
pub fn check_gradient(
    prob: &ProblemSpec,
    pair: &Pair,
    direction: &Pair,
    eps: f64,
) -> Result<CheckReport> {
    let grad = energy::gradient(prob, pair)?;
    let analytic = grad.inner_product(direction)?;
    let plus = energy::fiber_value(prob, &pair.axpy(eps, direction)?, 1.0)?;
    let minus = energy::fiber_value(prob, &pair.axpy(-eps, direction)?, 1.0)?;
    let fd = (plus - minus) / (2.0 * eps);
    let measured = (fd - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE);
    Ok(CheckReport::defect(
        "gradient_fd",
        measured,
        GRADIENT_TOL,
        format!("analytic = {analytic:.12e}, central difference = {fd:.12e}"),
    ))
}

/// Both solves of a potential comparison and the resulting report.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub low: SolveResult,
    pub high: SolveResult,
    pub report: CheckReport,
}

impl Comparison {
    /// `c₀(low) < c₀(high)` without slack.
    pub fn strict(&self) -> bool {
        self.low.c0 < self.high.c0
    }
}

/// Solves `prob_low` and `prob_high` (which must differ only by `A_low ≤
/// A_high`) and checks `c₀(low) ≤ c₀(high) + 10·tol_residual·‖solution‖²`.
pub fn compare_levels(
    prob_low: &ProblemSpec,
    prob_high: &ProblemSpec,
    cfg: &SolverConfig,
) -> Result<Comparison> {
    prob_low.grid().check_same(prob_high.grid())?;
    if prob_low.p() != prob_high.p()
        || prob_low.q() != prob_high.q()
        || prob_low.alpha() != prob_high.alpha()
    {
        return Err(Error::Domain(
            "comparison problems must share exponents".into(),
        ));
    }
    if prob_low.potential_b().field() != prob_high.potential_b().field() {
        return Err(Error::Domain("comparison problems must share B".into()));
    }
    let (a_low, a_high) = (
        prob_low.potential_a().field().values(),
        prob_high.potential_a().field().values(),
    );
    if a_low.iter().zip(a_high).any(|(l, h)| l > h) {
        return Err(Error::Domain("A_high must dominate A_low pointwise".into()));
    }
    let low = nehari::ground_state(prob_low, cfg, None)?;
    let high = nehari::ground_state(prob_high, cfg, None)?;
    let slack = 10.0 * cfg.tol_residual * low.report.norm_sq.max(high.report.norm_sq);
    let measured = low.c0 - high.c0;
    let mut report = CheckReport::defect(
        "potential_comparison",
        measured,
        slack,
        format!(
            "c0(low) = {:.12e}, c0(high) = {:.12e}, converged = ({}, {})",
            low.c0, high.c0, low.converged, high.converged
        ),
    );
    if !(low.converged && high.converged) {
        report.passed = false;
    }
    Ok(Comparison { low, high, report })
}

pub fn check_comparison(
    prob_low: &ProblemSpec,
    prob_high: &ProblemSpec,
    cfg: &SolverConfig,
) -> Result<CheckReport> {
    compare_levels(prob_low, prob_high, cfg).map(|c| c.report)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest nontrivial lattice shift per axis that leaves both potentials
/// invariant, or `None` if one of them is not grid-periodic.
pub fn invariant_shift(prob: &ProblemSpec) -> Option<Vec<i64>> {
    let pa = prob.potential_a().lattice_period()?;
    let pb = prob.potential_b().lattice_period()?;
    let n = prob.grid().n();
    Some(
        pa.iter()
            .zip(&pb)
            .map(|(&a, &b)| {
                let l = a / gcd(a, b) * b;
                // Move by at least an eighth of the box so the check is not vacuous.
                let target = (n / 8).max(1);
                (l * target.div_ceil(l)).min(n) as i64
            })
            .collect(),
    )
}

/// Solves from the default initial pair and from its lattice translate.
pub fn shift_invariance(
    prob: &ProblemSpec,
    cfg: &SolverConfig,
) -> Result<(CheckReport, Option<(SolveResult, SolveResult)>)> {
    let Some(offsets) = invariant_shift(prob) else {
        return Ok((
            CheckReport::skip(
                "shift_invariance",
                "potentials are not lattice periodic".into(),
            ),
            None,
        ));
    };
    let init = nehari::default_init(prob.grid());
    let a = nehari::ground_state(prob, cfg, Some(init.clone()))?;
    let b = nehari::ground_state(prob, cfg, Some(init.shift(&offsets)?))?;
    let measured = (a.c0 - b.c0).abs() / a.c0.abs();
    let mut report = CheckReport::defect(
        "shift_invariance",
        measured,
        SHIFT_TOL,
        format!("shift {offsets:?}: c0 = {:.14e} vs {:.14e}", a.c0, b.c0),
    );
    if !(a.converged && b.converged) {
        report.passed = false;
    }
    Ok((report, Some((a, b))))
}

pub fn check_shift_invariance(prob: &ProblemSpec, cfg: &SolverConfig) -> Result<CheckReport> {
    shift_invariance(prob, cfg).map(|(r, _)| r)
}

fn report_or_error(name: &str, r: Result<CheckReport>) -> CheckReport {
    r.unwrap_or_else(|e| CheckReport {
        name: name.into(),
        passed: false,
        skipped: false,
        measured: f64::INFINITY,
        threshold: 0.0,
        details: format!("error: {e}"),
    })
}

/// Names of the checks run by [`run_suite`], in order.
pub const SUITE: [&str; 10] = [
    "semigroup",
    "cauchy_schwarz",
    "hls_scaling",
    "brezis_lieb",
    "nehari_projection",
    "gradient_fd",
    "nehari_identity",
    "ground_state_level",
    "potential_comparison",
    "shift_invariance",
];

/// Runs every registered check on `prob`. Random inputs derive from `seed`.
/// Failures are returned as reports, never as errors.
pub fn run_suite(prob: &ProblemSpec, cfg: &SolverConfig, seed: u64) -> Vec<CheckReport> {
    let g = *prob.grid();
    let pair = random_pair(&g, seed);
    let direction = random_pair(&g, seed.wrapping_add(1));
    let mut reports = Vec::with_capacity(SUITE.len());

    reports.push(report_or_error(SUITE[0], check_semigroup(prob, &pair)));
    reports.push(report_or_error(SUITE[1], check_cauchy_schwarz(prob, &pair)));
    let s = 0.5 * (1.0 + prob.dim() as f64 / prob.alpha());
    reports.push(report_or_error(
        SUITE[2],
        check_hls_scaling(prob, &pair.v, s),
    ));
    let n = g.n();
    reports.push(report_or_error(
        SUITE[3],
        check_brezis_lieb(prob, g.length() / 40.0, &[n / 16, n / 8, n / 4]),
    ));
    reports.push(report_or_error(
        SUITE[4],
        nehari::nehari_project(prob, &pair).and_then(|(_, proj)| {
            check_nehari_identity_pair(prob, &proj, 1e-10).map(|mut r| {
                r.name = SUITE[4].into();
                r
            })
        }),
    ));
    reports.push(report_or_error(
        SUITE[5],
        check_gradient(prob, &pair, &direction, GRADIENT_EPS),
    ));

    let solved = nehari::ground_state(prob, cfg, None);
    reports.push(report_or_error(
        SUITE[6],
        solved
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|r| check_nehari_identity(prob, r)),
    ));
    reports.push(report_or_error(
        SUITE[7],
        solved.as_ref().map_err(Clone::clone).map(|r| CheckReport {
            name: SUITE[7].into(),
            passed: r.converged && r.c0 > 0.0,
            skipped: false,
            measured: r.c0,
            threshold: 0.0,
            details: format!(
                "c0 = {:.12e} after {} iterations, relative residual {:.3e}, converged = {}",
                r.c0,
                r.iterations,
                r.relative_residual(),
                r.converged
            ),
        }),
    ));

    let low = sample_potential(&PotentialSpec::constant(prob.potential_a().min()), &g)
        .and_then(|pot| prob.with_potential_a(pot));
    reports.push(report_or_error(
        SUITE[8],
        low.and_then(|low| check_comparison(&low, prob, cfg)),
    ));
    reports.push(report_or_error(SUITE[9], check_shift_invariance(prob, cfg)));
    reports
}

pub fn reports_to_json(reports: &[CheckReport]) -> String {
    // Non-finite measurements serialize as null.
    serde_json::to_string_pretty(reports).unwrap_or_else(|_| "[]".into())
}

/// Fixed-width text table, one row per report.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut out = format!(
        "{:<22} {:>6} {:>14} {:>14}  details\n",
        "check", "status", "measured", "threshold"
    );
    for r in reports {
        let status = if r.skipped {
            "SKIP"
        } else if r.passed {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(
            out,
            "{:<22} {:>6} {:>14.6e} {:>14.6e}  {}",
            r.name, status, r.measured, r.threshold, r.details
        );
    }
    out
}
