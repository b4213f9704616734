//! Acceptance gate: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

use choquard::energy::{self, exponent_window, Pair, ProblemSpec};
use choquard::grid::{Field, GridSpec};
use choquard::nehari::{self, SolveResult, SolverConfig};
use choquard::random::{gaussian_bump, random_pair};
use choquard::riesz::{KernelPolicy, RieszOperator};
use choquard::verify;
use choquard::PotentialSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    summary: String,
}

impl Outcome {
    fn new(passed: bool, summary: String) -> Self {
        Self { passed, summary }
    }
}

/// Every solve of the run, kept for the cross-run criteria.
#[derive(Default)]
struct Runs {
    solves: Vec<(String, ProblemSpec, SolveResult)>,
}

impl Runs {
    fn record(&mut self, label: &str, prob: &ProblemSpec, res: &SolveResult) {
        self.solves.push((label.into(), prob.clone(), res.clone()));
    }
}

#[allow(clippy::too_many_arguments)]
fn problem(
    dim: usize,
    n: usize,
    length: f64,
    alpha: f64,
    p: f64,
    q: f64,
    a: &PotentialSpec,
    b: &PotentialSpec,
) -> ProblemSpec {
    let g = GridSpec::new(dim, n, length).expect("grid");
    ProblemSpec::from_specs(g, alpha, p, q, a, b, KernelPolicy::Truncated).expect("problem")
}

fn constant_problem(dim: usize, n: usize, length: f64, alpha: f64, p: f64, q: f64) -> ProblemSpec {
    let one = PotentialSpec::constant(1.0);
    problem(dim, n, length, alpha, p, q, &one, &one)
}

/// `f(x) − f(y)` for `f(t) = ½at² − c·t^k`, evaluated without cancelling
/// the two large terms against each other.
fn fiber_difference(a: f64, c: f64, k: f64, x: f64, y: f64) -> f64 {
    let dx = x - y;
    0.5 * a * dx * (x + y) - c * y.powf(k) * (k * (dx / y).ln_1p()).exp_m1()
}

/// Golden-section maximizer of `t ↦ ½at² − c·t^k` on `(0, ∞)`.
fn golden_maximizer(a: f64, c: f64, k: f64) -> f64 {
    let f = |t: f64| 0.5 * a * t * t - c * t.powf(k);
    let mut hi = 1.0;
    while f(hi) > f(0.5 * hi) {
        hi *= 2.0;
    }
    while f(0.5 * hi) > 0.0 && f(0.25 * hi) > f(0.5 * hi) {
        hi *= 0.5;
    }
    let mut lo = 0.0;
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        if fiber_difference(a, c, k, x1, x2) > 0.0 {
            hi = x2;
            x2 = x1;
            x1 = hi - r * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + r * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1() -> Outcome {
    let cases: [(usize, f64, usize); 6] = [
        (1, 0.5, 64),
        (2, 0.5, 32),
        (2, 1.0, 32),
        (3, 0.5, 16),
        (3, 1.0, 16),
        (3, 2.0, 16),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_nehari: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    let total = 200;
    for i in 0..total {
        let (dim, alpha, n) = cases[i % cases.len()];
        let (lo, hi) = exponent_window(dim, alpha);
        let top = hi.min(lo + 3.0);
        let mut draw = || rng.gen_range(lo + 0.02..top - 0.02);
        let (p, q) = (draw(), draw());
        let prob = constant_problem(dim, n, 24.0, alpha, p, q);
        let pair = random_pair(prob.grid(), 1000 + i as u64);
        let (t, proj) = nehari::nehari_project(&prob, &pair).expect("projection");
        let (norm_sq, d) = energy::energies(&prob, &proj).expect("energies");
        worst_nehari = worst_nehari.max((norm_sq - 2.0 * d).abs() / norm_sq);

        let (a, d0) = energy::energies(&prob, &pair).expect("energies");
        let k = p + q;
        let t_golden = golden_maximizer(a, 2.0 * d0 / k, k);
        worst_scale = worst_scale.max((t - t_golden).abs() / t_golden);
    }
    Outcome::new(
        worst_nehari <= 1e-10 && worst_scale <= 1e-8,
        format!("{total} pairs: max |P|/norm² = {worst_nehari:.2e}, max scale error = {worst_scale:.2e}"),
    )
}

fn criterion_2() -> Outcome {
    let cases: [(usize, f64, usize); 4] = [(1, 0.5, 64), (2, 1.0, 32), (3, 1.0, 16), (3, 2.0, 16)];
    let mut worst: f64 = 0.0;
    let mut all = true;
    for i in 0..100 {
        let (dim, alpha, n) = cases[i % cases.len()];
        let (lo, _) = exponent_window(dim, alpha);
        let prob = ProblemSpec::from_specs(
            GridSpec::new(dim, n, 20.0).unwrap(),
            alpha,
            lo + 0.5,
            lo + 0.7,
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(1.0),
            KernelPolicy::Drop,
        )
        .unwrap();
        let r = verify::check_semigroup(&prob, &random_pair(prob.grid(), 500 + i as u64)).unwrap();
        worst = worst.max(r.measured);
        all &= r.passed;
    }
    Outcome::new(
        all && worst <= 1e-12,
        format!("100 pairs: max relative defect = {worst:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let exponents = [
        (0.5, 2.0, 2.0),
        (0.5, 2.0, 2.5),
        (0.5, 3.0, 2.2),
        (0.8, 2.4, 3.0),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let (alpha, p, q) = exponents[i % exponents.len()];
        let prob = constant_problem(1, 64, 24.0, alpha, p, q);
        let pair = random_pair(prob.grid(), 2 * i as u64);
        let dir = random_pair(prob.grid(), 2 * i as u64 + 1);
        let r = verify::check_gradient(&prob, &pair, &dir, 1e-5).unwrap();
        worst = worst.max(r.measured);
    }
    Outcome::new(
        worst <= 1e-5,
        format!("50 draws: max relative error = {worst:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let s: f64 = 0.5;
    let g = GridSpec::new(3, 64, 16.0).unwrap();
    let norm = (2.0 * PI * s * s).powf(-1.5);
    let rho = Field::from_fn(g, |x| {
        norm * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * s * s)).exp()
    });
    let op = RieszOperator::new(g, 2.0, KernelPolicy::Truncated).unwrap();
    let phi = op.apply(&rho).unwrap();
    let mut worst: f64 = 0.0;
    for (i, &value) in phi.values().iter().enumerate() {
        let x = g.point(i);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r >= g.length() / 4.0 {
            continue;
        }
        let exact = if r == 0.0 {
            (2.0 / PI).sqrt() / (4.0 * PI * s)
        } else {
            erf(r / (2f64.sqrt() * s)) / (4.0 * PI * r)
        };
        worst = worst.max((value - exact).abs() / exact);
    }
    Outcome::new(
        worst < 1e-3,
        format!(
            "max relative error for r < L/4: {worst:.2e} (mass {:.12})",
            rho.integrate()
        ),
    )
}

/// Radial shooting for `−Δu + u = (I₂ ∗ u²) u` in three dimensions.
mod shooting {
    /// State `(u, u', W, W')` with `W = I₂∗u² − λ`.
    type State = [f64; 4];

    fn rhs(r: f64, y: &State) -> State {
        [
            y[1],
            -2.0 / r * y[1] - y[2] * y[0],
            y[3],
            -2.0 / r * y[3] - y[0] * y[0],
        ]
    }

    fn rk4(r: f64, y: &State, h: f64) -> State {
        let add = |a: &State, b: &State, s: f64| {
            [
                a[0] + s * b[0],
                a[1] + s * b[1],
                a[2] + s * b[2],
                a[3] + s * b[3],
            ]
        };
        let k1 = rhs(r, y);
        let k2 = rhs(r + 0.5 * h, &add(y, &k1, 0.5 * h));
        let k3 = rhs(r + 0.5 * h, &add(y, &k2, 0.5 * h));
        let k4 = rhs(r + h, &add(y, &k3, h));
        let mut out = *y;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    enum Fate {
        /// `u` crossed zero: too much attraction.
        Crossed,
        /// `u` turned upward while positive: too little.
        Escaped,
        Survived,
    }

    struct Trajectory {
        fate: Fate,
        /// `(r, state)` up to the point where `u` is smallest.
        samples: Vec<(f64, State)>,
    }

    const H: f64 = 1e-3;
    const R0: f64 = 1e-6;
    const R_MAX: f64 = 40.0;

    fn shoot(w0: f64) -> Trajectory {
        // Series start: u ≈ 1 − w0 r²/6, W ≈ w0 − r²/6.
        let mut y = [
            1.0 - w0 * R0 * R0 / 6.0,
            -w0 * R0 / 3.0,
            w0 - R0 * R0 / 6.0,
            -R0 / 3.0,
        ];
        let mut r = R0;
        let mut samples = vec![(r, y)];
        while r < R_MAX {
            y = rk4(r, &y, H);
            r += H;
            if y[0] <= 0.0 {
                return Trajectory {
                    fate: Fate::Crossed,
                    samples,
                };
            }
            if y[1] > 0.0 {
                return Trajectory {
                    fate: Fate::Escaped,
                    samples,
                };
            }
            samples.push((r, y));
        }
        Trajectory {
            fate: Fate::Survived,
            samples,
        }
    }

    /// Ground-state level `½(‖∇u‖² + ‖u‖²)` at `λ = 1`, plus the Pohozaev
    /// ratio `‖∇u‖²/‖u‖²` (exactly 1/3 for this equation).
    pub fn level() -> (f64, f64) {
        let (mut lo, mut hi) = (0.0, 10.0);
        assert!(matches!(shoot(hi).fate, Fate::Crossed));
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            match shoot(mid).fate {
                Fate::Crossed => hi = mid,
                Fate::Escaped | Fate::Survived => lo = mid,
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let traj = shoot(lo);
        // Cut where u has decayed by 1e-7; beyond it the shot diverges.
        let cut = traj
            .samples
            .iter()
            .position(|(_, y)| y[0] < 1e-7)
            .unwrap_or(traj.samples.len() - 1);
        let samples = &traj.samples[..=cut];
        let (r_end, y_end) = samples[cut];
        let lambda = -(y_end[2] + r_end * y_end[3]);
        assert!(lambda > 0.0);
        // Trapezoid over the samples.
        let (mut mass, mut grad) = (0.0, 0.0);
        for w in samples.windows(2) {
            let (r0, a) = w[0];
            let (r1, b) = w[1];
            let h = r1 - r0;
            mass += 0.5 * h * (a[0] * a[0] * r0 * r0 + b[0] * b[0] * r1 * r1);
            grad += 0.5 * h * (a[1] * a[1] * r0 * r0 + b[1] * b[1] * r1 * r1);
        }
        let four_pi = 4.0 * std::f64::consts::PI;
        // u₁(x) = λ^{−1} u(x/√λ) solves the λ = 1 equation.
        let mass = four_pi * mass / lambda.sqrt();
        let grad = four_pi * grad / lambda.powf(1.5);
        (0.5 * (mass + grad), grad / mass)
    }
}

fn criterion_5(runs: &mut Runs) -> Outcome {
    let prob = constant_problem(3, 64, 16.0, 2.0, 2.0, 2.0);
    let init = nehari::symmetric_init(prob.grid());
    let mut worst_split: f64 = 0.0;
    let res =
        nehari::ground_state_observed(&prob, &SolverConfig::default(), Some(init), |_, pair| {
            worst_split = worst_split
                .max(pair.u.zip_map(&pair.v, |a, b| a - b).unwrap().max_abs() / pair.u.max_abs());
        })
        .expect("solve");
    runs.record("reference 3D", &prob, &res);
    let (oracle, pohozaev) = shooting::level();
    let symmetry = worst_split;
    let rel = (res.c0 - oracle).abs() / oracle;
    Outcome::new(
        res.converged && res.relative_residual() <= 1e-6 && symmetry <= 1e-12 && rel < 0.01,
        format!(
            "c0 = {:.6} vs shooting {oracle:.6} (rel {rel:.2e}, oracle Pohozaev ratio {pohozaev:.6}), \
             residual {:.2e} after {} iterations, max over iterates of max|u−v|/max|u| = {symmetry:.1e}",
            res.c0,
            res.relative_residual(),
            res.iterations
        ),
    )
}

fn criterion_7(runs: &mut Runs) -> Outcome {
    let one = PotentialSpec::constant(1.0);
    let bumpy = PotentialSpec::Periodic {
        base: 1.0,
        amplitude: 1.0,
        periods: vec![5.0],
    };
    let low = problem(1, 128, 40.0, 0.5, 2.0, 2.5, &one, &one);
    let high = problem(1, 128, 40.0, 0.5, 2.0, 2.5, &bumpy, &one);
    let cmp = verify::compare_levels(&low, &high, &SolverConfig::default()).expect("comparison");
    runs.record("comparison A = 1", &low, &cmp.low);
    runs.record("comparison A = 1 + sin²", &high, &cmp.high);
    Outcome::new(
        cmp.report.passed && cmp.strict(),
        format!(
            "c0(A≡1) = {:.10}, c0(1+sin²) = {:.10}, slack {:.1e}",
            cmp.low.c0, cmp.high.c0, cmp.report.threshold
        ),
    )
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let a = PotentialSpec::Periodic {
        base: 1.0,
        amplitude: 0.5,
        periods: vec![5.0],
    };
    let b = PotentialSpec::Periodic {
        base: 1.5,
        amplitude: 0.5,
        periods: vec![10.0],
    };
    let prob = problem(1, 128, 40.0, 0.5, 2.0, 2.5, &a, &b);
    let (report, solves) =
        verify::shift_invariance(&prob, &SolverConfig::default()).expect("shift");
    let (first, second) = solves.expect("periodic potentials");
    runs.record("periodic", &prob, &first);
    runs.record("periodic shifted", &prob, &second);
    Outcome::new(
        report.passed && !report.skipped,
        format!(
            "relative c0 difference {:.2e} ({})",
            report.measured, report.details
        ),
    )
}

/// Measured on first implementation; guards against regressions only. The
/// band reflects what a residual of 1e-6 determines, not roundoff.
const PINNED_ASYMMETRY: f64 = 0.123_900_345;
const PIN_TOLERANCE: f64 = 1e-4;

fn criterion_9(runs: &mut Runs) -> Outcome {
    let prob = constant_problem(1, 128, 40.0, 0.5, 2.0, 2.5);
    let res = nehari::ground_state(&prob, &SolverConfig::default(), None).expect("solve");
    runs.record("asymmetric p != q", &prob, &res);
    let asym = res.asymmetry();
    let pinned = (asym - PINNED_ASYMMETRY).abs() <= PIN_TOLERANCE * PINNED_ASYMMETRY;
    Outcome::new(
        res.converged && asym > 1e-3 && pinned,
        format!(
            "asym = {asym:.12} (pinned {PINNED_ASYMMETRY}), c0 = {:.10}",
            res.c0
        ),
    )
}

fn criterion_10() -> Outcome {
    let prob = constant_problem(3, 64, 32.0, 2.0, 2.0, 2.0);
    let h = prob.grid().spacing();
    let d = (2.0 / h).round() as usize;
    let seps = [d, 2 * d, 4 * d];
    let report = verify::check_brezis_lieb(&prob, 1.2, &seps).expect("splitting");
    let bump = gaussian_bump(prob.grid(), &[0.0, 0.0, 0.0], 1.2);
    let pair = Pair {
        u: bump.clone(),
        v: bump,
    };
    let defects = verify::splitting_defects(&prob, &pair, &pair, &seps).unwrap();
    let ratio = defects[2] / defects[1];
    let predicted = 2f64.powf(prob.alpha() - prob.dim() as f64);
    let close = (ratio / predicted - 1.0).abs() <= 0.2;
    Outcome::new(
        report.passed && close,
        format!(
            "{}; last ratio {ratio:.4} vs 2^(α−N) = {predicted}",
            report.details
        ),
    )
}

fn criterion_6(runs: &Runs) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut failures = Vec::new();
    for (label, prob, res) in &runs.solves {
        if !res.converged {
            continue;
        }
        let r = verify::check_nehari_identity(prob, res).unwrap();
        checked += 1;
        worst = worst.max(r.measured);
        if !r.passed || r.skipped {
            failures.push(label.clone());
        }
    }
    Outcome::new(
        failures.is_empty() && checked > 0,
        format!("{checked} converged runs: max relative defect {worst:.2e}; failing: {failures:?}"),
    )
}

fn criterion_11(runs: &Runs) -> Outcome {
    let mut steps = 0;
    let mut violations = Vec::new();
    for (label, _, res) in &runs.solves {
        for w in res.history.windows(2) {
            steps += 1;
            if w[1].action > w[0].action {
                violations.push(format!("{label}@{}", w[1].iteration));
            }
        }
    }
    Outcome::new(
        violations.is_empty() && steps > 0,
        format!(
            "{steps} accepted steps over {} runs; violations: {violations:?}",
            runs.solves.len()
        ),
    )
}

fn main() {
    let mut runs = Runs::default();
    let mut failures = 0;
    let mut report =
        |id: u32, title: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
            let start = Instant::now();
            let out = f();
            let elapsed = start.elapsed();
            let in_time = limit.is_none_or(|l| elapsed <= l);
            let passed = out.passed && in_time;
            if !passed {
                failures += 1;
            }
            let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
            println!(
                "[{}] criterion {id:>2}: {title} ({:.1}s{budget}) {}",
                if passed { "PASS" } else { "FAIL" },
                elapsed.as_secs_f64(),
                out.summary
            );
        };
    let s = Duration::from_secs;
    report(
        1,
        "Nehari projection exactness",
        Some(s(30)),
        &mut criterion_1,
    );
    report(2, "semigroup identity", Some(s(10)), &mut criterion_2);
    report(3, "gradient correctness", Some(s(30)), &mut criterion_3);
    report(4, "free-space fidelity", Some(s(60)), &mut criterion_4);
    report(5, "reference ground state", Some(s(600)), &mut || {
        criterion_5(&mut runs)
    });
    report(7, "potential comparison", Some(s(120)), &mut || {
        criterion_7(&mut runs)
    });
    report(8, "periodic shift invariance", Some(s(120)), &mut || {
        criterion_8(&mut runs)
    });
    report(9, "p != q asymmetry", None, &mut || criterion_9(&mut runs));
    report(10, "splitting trend", Some(s(60)), &mut criterion_10);
    report(6, "Nehari identity at convergence", None, &mut || {
        criterion_6(&runs)
    });
    report(11, "monotone descent", None, &mut || criterion_11(&runs));
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
