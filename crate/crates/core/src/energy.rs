//! Action functional, Nehari functional and Euler–Lagrange gradient.
//!
//! With `D(u,v) = ∫ (I_α ∗ |u|^p) |v|^q` and the weighted norm
//! `‖(u,v)‖² = ∫ |∇u|² + |∇v|² + A u² + B v²`:
//!
//! ```text
//! 𝓘(u,v) = ½‖(u,v)‖² − 2/(p+q) · D(u,v)
//! 𝓟(u,v) = ‖(u,v)‖² − 2 D(u,v)
//! ```

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::par;
use crate::potentials::{sample_potential, weighted_mass, PotentialField, PotentialSpec};
use crate::riesz::{KernelPolicy, RieszOperator};
use serde::{Deserialize, Serialize};

/// Open interval `((N+α)/N, 2*_α)` of admissible exponents; the upper end is
/// `(N+α)/(N−2)` for `N ≥ 3` and infinite otherwise.
pub fn exponent_window(dim: usize, alpha: f64) -> (f64, f64) {
    let n = dim as f64;
    let lower = (n + alpha) / n;
    let upper = if dim >= 3 {
        (n + alpha) / (n - 2.0)
    } else {
        f64::INFINITY
    };
    (lower, upper)
}

pub fn check_admissible(dim: usize, alpha: f64, p: f64, q: f64) -> Result<()> {
    let (lower, upper) = exponent_window(dim, alpha);
    for (name, value) in [("p", p), ("q", q)] {
        if !(value > lower && value < upper) {
            return Err(Error::Inadmissible {
                name,
                value,
                lower,
                upper,
                dim,
                alpha,
            });
        }
    }
    Ok(())
}

/// `|x|^p`.
#[inline]
pub(crate) fn pow_abs(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

/// `|x|^{p−2} x`, zero at zero.
#[inline]
pub(crate) fn signed_pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x
    } else if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(p - 1.0)
    }
}

/// A discretized coupled Choquard problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    alpha: f64,
    p: f64,
    q: f64,
    pot_a: PotentialField,
    pot_b: PotentialField,
    riesz: RieszOperator,
    riesz_half: RieszOperator,
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        p: f64,
        q: f64,
        pot_a: PotentialField,
        pot_b: PotentialField,
        policy: KernelPolicy,
    ) -> Result<Self> {
        let grid = *pot_a.grid();
        grid.check_same(pot_b.grid())?;
        check_admissible(grid.dim(), alpha, p, q)?;
        let riesz = RieszOperator::new(grid, alpha, policy)?;
        let riesz_half = riesz.half();
        Ok(Self {
            alpha,
            p,
            q,
            pot_a,
            pot_b,
            riesz,
            riesz_half,
        })
    }

    /// Samples both potential families and assembles the problem.
    pub fn from_specs(
        grid: GridSpec,
        alpha: f64,
        p: f64,
        q: f64,
        a: &PotentialSpec,
        b: &PotentialSpec,
        policy: KernelPolicy,
    ) -> Result<Self> {
        check_admissible(grid.dim(), alpha, p, q)?;
        Self::new(
            alpha,
            p,
            q,
            sample_potential(a, &grid)?,
            sample_potential(b, &grid)?,
            policy,
        )
    }

    pub fn with_policy(&self, policy: KernelPolicy) -> Result<Self> {
        let mut out = self.clone();
        out.riesz = self.riesz.with_policy(policy)?;
        Ok(out)
    }

    pub fn with_potential_a(&self, pot_a: PotentialField) -> Result<Self> {
        self.grid().check_same(pot_a.grid())?;
        let mut out = self.clone();
        out.pot_a = pot_a;
        Ok(out)
    }

    pub fn with_potential_b(&self, pot_b: PotentialField) -> Result<Self> {
        self.grid().check_same(pot_b.grid())?;
        let mut out = self.clone();
        out.pot_b = pot_b;
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        self.riesz.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `p + q`, the homogeneity degree of the coupling.
    pub fn degree(&self) -> f64 {
        self.p + self.q
    }

    /// `(p+q−2) / (2(p+q))`: on the Nehari manifold `𝓘 = factor · ‖(u,v)‖²`.
    pub fn nehari_factor(&self) -> f64 {
        (self.degree() - 2.0) / (2.0 * self.degree())
    }

    pub fn potential_a(&self) -> &PotentialField {
        &self.pot_a
    }

    pub fn potential_b(&self) -> &PotentialField {
        &self.pot_b
    }

    pub fn riesz(&self) -> &RieszOperator {
        &self.riesz
    }

    /// Order `α/2` operator (always [`KernelPolicy::Drop`]).
    pub fn riesz_half(&self) -> &RieszOperator {
        &self.riesz_half
    }

    pub fn policy(&self) -> KernelPolicy {
        self.riesz.policy()
    }

    /// `|u|^p`.
    pub fn density_u(&self, u: &Field) -> Field {
        let p = self.p;
        u.map(move |x| pow_abs(x, p))
    }

    /// `|v|^q`.
    pub fn density_v(&self, v: &Field) -> Field {
        let q = self.q;
        v.map(move |x| pow_abs(x, q))
    }
}

/// A pair `(u, v)` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub u: Field,
    pub v: Field,
}

impl Pair {
    pub fn new(u: Field, v: Field) -> Result<Self> {
        u.grid().check_same(v.grid())?;
        Ok(Self { u, v })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            u: Field::zeros(grid),
            v: Field::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn scale(&self, t: f64) -> Pair {
        Pair {
            u: self.u.scale(t),
            v: self.v.scale(t),
        }
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Pair) -> Result<Pair> {
        Ok(Pair {
            u: self.u.axpy(t, &other.u)?,
            v: self.v.axpy(t, &other.v)?,
        })
    }

    pub fn abs(&self) -> Pair {
        Pair {
            u: self.u.abs(),
            v: self.v.abs(),
        }
    }

    pub fn shift(&self, offsets: &[i64]) -> Result<Pair> {
        Ok(Pair {
            u: self.u.shift(offsets)?,
            v: self.v.shift(offsets)?,
        })
    }

    /// `⟨u, φ⟩ + ⟨v, ψ⟩`.
    pub fn inner_product(&self, other: &Pair) -> Result<f64> {
        Ok(self.u.inner_product(&other.u)? + self.v.inner_product(&other.v)?)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.u.norm_sq() + self.v.norm_sq()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Pair) -> f64 {
        let du = self.u.zip_map(&other.u, |a, b| a - b).map(|f| f.max_abs());
        let dv = self.v.zip_map(&other.v, |a, b| a - b).map(|f| f.max_abs());
        match (du, dv) {
            (Ok(a), Ok(b)) => a.max(b),
            _ => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// Energies of one pair. `action` and `nehari` are derived from `norm_sq`
/// and `coupling`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub norm_sq: f64,
    pub coupling: f64,
    pub action: f64,
    pub nehari: f64,
    pub grad_residual: f64,
    pub policy: KernelPolicy,
}

impl EnergyReport {
    fn from_parts(
        norm_sq: f64,
        coupling: f64,
        degree: f64,
        grad_residual: f64,
        policy: KernelPolicy,
    ) -> Self {
        Self {
            norm_sq,
            coupling,
            action: 0.5 * norm_sq - 2.0 / degree * coupling,
            nehari: norm_sq - 2.0 * coupling,
            grad_residual,
            policy,
        }
    }

    /// `grad_residual / ‖(u,v)‖` (0 for the zero pair).
    pub fn relative_residual(&self) -> f64 {
        if self.norm_sq > 0.0 {
            self.grad_residual / self.norm_sq.sqrt()
        } else {
            0.0
        }
    }
}

fn check_pair(prob: &ProblemSpec, pair: &Pair) -> Result<()> {
    prob.grid().check_same(pair.u.grid())?;
    prob.grid().check_same(pair.v.grid())
}

/// `D(u,v) = ∫ (I_α ∗ |u|^p) |v|^q`.
pub fn coupling(prob: &ProblemSpec, pair: &Pair) -> Result<f64> {
    check_pair(prob, pair)?;
    let iu = prob.riesz().apply(&prob.density_u(&pair.u))?;
    iu.inner_product(&prob.density_v(&pair.v))
}

/// `∫ (I_α ∗ |v|^q) |u|^p`, equal to [`coupling`] by self-adjointness.
pub fn coupling_swapped(prob: &ProblemSpec, pair: &Pair) -> Result<f64> {
    check_pair(prob, pair)?;
    let iv = prob.riesz().apply(&prob.density_v(&pair.v))?;
    iv.inner_product(&prob.density_u(&pair.u))
}

/// `‖(u,v)‖² = ∫ |∇u|² + |∇v|² + A u² + B v²`.
pub fn weighted_norm_sq(prob: &ProblemSpec, pair: &Pair) -> Result<f64> {
    check_pair(prob, pair)?;
    Ok(pair.u.dirichlet_energy()
        + pair.v.dirichlet_energy()
        + weighted_mass(prob.potential_a(), &pair.u)?
        + weighted_mass(prob.potential_b(), &pair.v)?)
}

/// `(‖(u,v)‖², D(u,v))` without the gradient.
pub fn energies(prob: &ProblemSpec, pair: &Pair) -> Result<(f64, f64)> {
    Ok((weighted_norm_sq(prob, pair)?, coupling(prob, pair)?))
}

/// Energy report and L²-gradient in one pass (two Riesz applications).
pub fn evaluate(prob: &ProblemSpec, pair: &Pair) -> Result<(EnergyReport, Pair)> {
    check_pair(prob, pair)?;
    let (p, q) = (prob.p(), prob.q());
    let du = prob.density_u(&pair.u);
    let dv = prob.density_v(&pair.v);
    let iu = prob.riesz().apply(&du)?;
    let iv = prob.riesz().apply(&dv)?;
    let d = iu.inner_product(&dv)?;
    let norm_sq = weighted_norm_sq(prob, pair)?;

    let cu = 2.0 * p / (p + q);
    let cv = 2.0 * q / (p + q);
    let a = prob.potential_a().field().values();
    let b = prob.potential_b().field().values();
    let lap_u = pair.u.neg_laplacian();
    let lap_v = pair.v.neg_laplacian();
    let (uu, vv) = (pair.u.values(), pair.v.values());
    let (lu, lv) = (lap_u.values(), lap_v.values());
    let (ivv, iuv) = (iv.values(), iu.values());
    let gu = par::collect(uu.len(), |i| {
        lu[i] + a[i] * uu[i] - cu * ivv[i] * signed_pow(uu[i], p)
    });
    let gv = par::collect(vv.len(), |i| {
        lv[i] + b[i] * vv[i] - cv * iuv[i] * signed_pow(vv[i], q)
    });
    let grid = *prob.grid();
    let grad = Pair {
        u: Field::from_values(grid, gu)?,
        v: Field::from_values(grid, gv)?,
    };
    let report = EnergyReport::from_parts(norm_sq, d, prob.degree(), grad.l2_norm(), prob.policy());
    Ok((report, grad))
}

/// Full energy report including the gradient residual.
pub fn action(prob: &ProblemSpec, pair: &Pair) -> Result<EnergyReport> {
    evaluate(prob, pair).map(|(r, _)| r)
}

/// L²-gradient of `𝓘`: the left-hand sides of the Euler–Lagrange system.
pub fn gradient(prob: &ProblemSpec, pair: &Pair) -> Result<Pair> {
    evaluate(prob, pair).map(|(_, g)| g)
}

/// `h(t) = 𝓘(tu, tv) = θ₁ t² − θ₂ t^{p+q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMap {
    pub theta1: f64,
    pub theta2: f64,
    pub degree: f64,
}

impl FiberMap {
    pub fn new(norm_sq: f64, coupling: f64, degree: f64) -> Self {
        Self {
            theta1: 0.5 * norm_sq,
            theta2: 2.0 / degree * coupling,
            degree,
        }
    }

    pub fn from_report(report: &EnergyReport, degree: f64) -> Self {
        Self::new(report.norm_sq, report.coupling, degree)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.theta1 * t * t - self.theta2 * t.powf(self.degree)
    }

    /// Unique positive critical point `(2θ₁ / ((p+q)θ₂))^{1/(p+q−2)}`, or
    /// `None` when `θ₁` or `θ₂` is not positive.
    pub fn maximizer(&self) -> Option<f64> {
        if self.theta1 > 0.0 && self.theta2 > 0.0 {
            Some((2.0 * self.theta1 / (self.degree * self.theta2)).powf(1.0 / (self.degree - 2.0)))
        } else {
            None
        }
    }
}

/// `𝓘(tu, tv)` from one energy evaluation at `t = 1`.
pub fn fiber_value(prob: &ProblemSpec, pair: &Pair, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "fiber parameter must be positive, got {t}"
        )));
    }
    let (norm_sq, d) = energies(prob, pair)?;
    Ok(FiberMap::new(norm_sq, d, prob.degree()).value(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_pair;

    fn problem(
        dim: usize,
        n: usize,
        l: f64,
        alpha: f64,
        p: f64,
        q: f64,
        policy: KernelPolicy,
    ) -> ProblemSpec {
        let g = GridSpec::new(dim, n, l).unwrap();
        ProblemSpec::from_specs(
            g,
            alpha,
            p,
            q,
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(1.0),
            policy,
        )
        .unwrap()
    }

    #[test]
    fn window_bounds() {
        assert_eq!(exponent_window(3, 2.0), (5.0 / 3.0, 5.0));
        assert_eq!(exponent_window(1, 0.5).1, f64::INFINITY);
        assert!(check_admissible(3, 2.0, 2.0, 2.0).is_ok());
        assert!(check_admissible(3, 2.0, 5.0 / 3.0, 2.0).is_err());
        assert!(check_admissible(3, 2.0, 2.0, 5.0).is_err());
        assert!(check_admissible(1, 0.5, 1.5, 100.0).is_err());
        assert!(check_admissible(1, 0.5, 1.51, 100.0).is_ok());
    }

    #[test]
    fn powers() {
        assert_eq!(signed_pow(0.0, 2.5), 0.0);
        assert_eq!(signed_pow(-4.0, 2.5), -8.0);
        assert_eq!(pow_abs(-3.0, 2.0), 9.0);
    }

    #[test]
    fn zero_pair_energies() {
        let prob = problem(1, 32, 10.0, 0.5, 2.0, 2.5, KernelPolicy::Truncated);
        let zero = Pair::zeros(*prob.grid());
        let r = action(&prob, &zero).unwrap();
        assert_eq!(
            (r.action, r.nehari, r.coupling, r.norm_sq),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(gradient(&prob, &zero).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn single_component_has_no_coupling() {
        let prob = problem(1, 32, 10.0, 0.5, 2.0, 2.5, KernelPolicy::Truncated);
        let pair = random_pair(prob.grid(), 3);
        let half = Pair::new(pair.u.clone(), Field::zeros(*prob.grid())).unwrap();
        let r = action(&prob, &half).unwrap();
        assert_eq!(r.coupling, 0.0);
        assert!(r.action > 0.0);
        assert!((r.action - 0.5 * r.norm_sq).abs() <= 1e-15 * r.action);
    }

    #[test]
    fn report_consistency() {
        let prob = problem(2, 16, 8.0, 1.0, 2.5, 3.0, KernelPolicy::Truncated);
        let r = action(&prob, &random_pair(prob.grid(), 11)).unwrap();
        let a = 0.5 * r.norm_sq - 2.0 / 5.5 * r.coupling;
        assert!((r.action - a).abs() <= 1e-12 * a.abs());
        assert!((r.nehari - (r.norm_sq - 2.0 * r.coupling)).abs() <= 1e-12 * r.norm_sq);
    }

    #[test]
    fn coupling_homogeneity() {
        let prob = problem(1, 64, 12.0, 0.5, 2.0, 2.5, KernelPolicy::Truncated);
        let pair = random_pair(prob.grid(), 5);
        let d = coupling(&prob, &pair).unwrap();
        let d2 = coupling(&prob, &pair.scale(2.0)).unwrap();
        assert!((d2 - 2f64.powf(4.5) * d).abs() <= 1e-12 * d2.abs());
    }

    #[test]
    fn coupling_matches_direct_double_sum() {
        // Oracle: build the discrete kernel K = IDFT(multiplier) and evaluate
        // Σ_i Σ_j K(i−j) |u_j|^p |v_i|^q h² directly.
        for policy in [KernelPolicy::Drop, KernelPolicy::Truncated] {
            let prob = problem(1, 16, 6.0, 0.5, 2.0, 2.5, policy);
            let g = *prob.grid();
            let n = g.n();
            let mult = prob.riesz().multiplier();
            let h = g.spacing();
            let kernel: Vec<f64> = (0..n)
                .map(|k| {
                    (0..n)
                        .map(|m| {
                            let a = 2.0 * std::f64::consts::PI * (m * k) as f64 / n as f64;
                            mult[m] * a.cos()
                        })
                        .sum::<f64>()
                        / (n as f64 * h)
                })
                .collect();
            let pair = random_pair(&g, 21);
            let du = prob.density_u(&pair.u);
            let dv = prob.density_v(&pair.v);
            let mut direct = 0.0;
            for i in 0..n {
                for j in 0..n {
                    direct += kernel[(i + n - j) % n] * du.values()[j] * dv.values()[i] * h * h;
                }
            }
            let d = coupling(&prob, &pair).unwrap();
            assert!(
                (d - direct).abs() <= 1e-12 * direct.abs(),
                "{policy:?}: {d} vs {direct}"
            );
        }
    }

    #[test]
    fn euler_identity() {
        // ⟨∇𝓘(w), w⟩ = 𝓟(w) for the homogeneous functional.
        let prob = problem(1, 64, 16.0, 0.5, 2.0, 2.5, KernelPolicy::Truncated);
        let pair = random_pair(prob.grid(), 8);
        let (r, g) = evaluate(&prob, &pair).unwrap();
        let lhs = g.inner_product(&pair).unwrap();
        assert!((lhs - r.nehari).abs() <= 1e-10 * r.nehari.abs().max(r.norm_sq * 1e-3));
    }

    #[test]
    fn weighted_norm_monotone_in_potential() {
        let g = GridSpec::new(1, 64, 16.0).unwrap();
        let low = ProblemSpec::from_specs(
            g,
            0.5,
            2.0,
            2.0,
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(1.0),
            KernelPolicy::Drop,
        )
        .unwrap();
        let high = low
            .with_potential_a(
                sample_potential(
                    &PotentialSpec::Periodic {
                        base: 1.0,
                        amplitude: 2.0,
                        periods: vec![4.0],
                    },
                    &g,
                )
                .unwrap(),
            )
            .unwrap();
        let pair = random_pair(&g, 2);
        let unweighted = pair.u.dirichlet_energy()
            + pair.v.dirichlet_energy()
            + pair.u.norm_sq()
            + pair.v.norm_sq();
        let nl = weighted_norm_sq(&low, &pair).unwrap();
        assert!((nl - unweighted).abs() <= 1e-14 * nl);
        assert!(weighted_norm_sq(&high, &pair).unwrap() >= nl);
        assert_eq!(weighted_norm_sq(&low, &Pair::zeros(g)).unwrap(), 0.0);
    }

    #[test]
    fn fiber_map_paths_agree() {
        let prob = problem(1, 64, 16.0, 0.5, 2.0, 2.5, KernelPolicy::Truncated);
        let pair = random_pair(prob.grid(), 4);
        let r = action(&prob, &pair).unwrap();
        assert!(
            (fiber_value(&prob, &pair, 1.0).unwrap() - r.action).abs() <= 1e-14 * r.action.abs()
        );
        for t in [0.5, 1.7, 2.0] {
            let direct = action(&prob, &pair.scale(t)).unwrap().action;
            let fib = fiber_value(&prob, &pair, t).unwrap();
            assert!((direct - fib).abs() <= 1e-12 * direct.abs(), "t = {t}");
        }
        let small = fiber_value(&prob, &pair, 1e-6).unwrap();
        assert!(small > 0.0);
        assert!(fiber_value(&prob, &pair, 0.0).is_err());
    }

    #[test]
    fn fiber_maximizer_closed_form() {
        let f = FiberMap {
            theta1: 1.0,
            theta2: 1.0,
            degree: 4.0,
        };
        assert!((f.maximizer().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(FiberMap::new(1.0, 0.0, 4.0).maximizer(), None);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let prob = problem(1, 32, 10.0, 0.5, 2.0, 2.0, KernelPolicy::Drop);
        let other = Pair::zeros(GridSpec::new(1, 32, 11.0).unwrap());
        assert_eq!(coupling(&prob, &other).unwrap_err(), Error::GridMismatch);
        assert!(Pair::new(Field::zeros(*prob.grid()), other.u.clone()).is_err());
    }
}
