//! Riesz potential `f ↦ I_α ∗ f` as a Fourier multiplier on the periodic box.
//!
//! `I_α(x) = A_α |x|^{α−N}` with `A_α = Γ((N−α)/2) / (2^α π^{N/2} Γ(α/2))`,
//! normalized so that its free-space symbol is `|κ|^{−α}`. On a torus the
//! symbol is singular at `κ = 0`; [`KernelPolicy`] selects how that is
//! resolved.

mod quadrature;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Spectrum};
use crate::par;
use quadrature::TruncatedRadialIntegral;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// How the Riesz symbol is realized on the periodic box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KernelPolicy {
    /// `|κ|^{−α}` off zero, `0` at `κ = 0`. Makes the semigroup
    /// factorization and positivity exact.
    Drop,
    /// `|κ|^{−α}` off zero, kernel mass over the ball of radius `L/2` at
    /// `κ = 0`.
    BallValue,
    /// Transform of the kernel truncated to the ball of radius `L/2` at
    /// every mode. Reproduces free-space convolution for densities whose
    /// support diameter plus evaluation radius stays below `L/2`.
    #[default]
    Truncated,
}

/// `A_α` for the Riesz kernel in dimension `dim`.
pub fn riesz_constant(dim: usize, alpha: f64) -> Result<f64> {
    check_order(dim, alpha)?;
    let n = dim as f64;
    Ok(gamma(0.5 * (n - alpha)) / (2f64.powf(alpha) * PI.powf(0.5 * n) * gamma(0.5 * alpha)))
}

/// Area of the unit sphere in `R^dim` (`2`, `2π`, `4π`).
pub fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(0.5 * dim as f64) / gamma(0.5 * dim as f64),
    }
}

fn check_order(dim: usize, alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < dim as f64 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Riesz order alpha = {alpha} outside (0, {dim})"
        )))
    }
}

/// Immutable Riesz multiplier bound to one grid.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    alpha: f64,
    grid: GridSpec,
    policy: KernelPolicy,
    zero_mode_value: f64,
    multiplier: Arc<Vec<f64>>,
}

impl RieszOperator {
    pub fn new(grid: GridSpec, alpha: f64, policy: KernelPolicy) -> Result<Self> {
        check_order(grid.dim(), alpha)?;
        let dim = grid.dim();
        let a_alpha = riesz_constant(dim, alpha)?;
        let radius = 0.5 * grid.length();
        let ball_value = a_alpha * unit_sphere_area(dim) * radius.powf(alpha) / alpha;
        let zero_mode_value = match policy {
            KernelPolicy::Drop => 0.0,
            KernelPolicy::BallValue | KernelPolicy::Truncated => ball_value,
        };

        let k0 = 2.0 * PI / grid.length();
        let mut levels: Vec<u64> = (0..grid.len()).map(|i| grid.mode_norm_sq(i)).collect();
        let slot_levels = levels.clone();
        levels.sort_unstable();
        levels.dedup();

        let symbol_at = |m2: u64, radial: Option<&TruncatedRadialIntegral>| -> f64 {
            if m2 == 0 {
                return zero_mode_value;
            }
            let kappa = k0 * (m2 as f64).sqrt();
            match radial {
                None => kappa.powf(-alpha),
                Some(j) => {
                    a_alpha * unit_sphere_area(dim) * kappa.powf(-alpha) * j.eval(kappa * radius)
                }
            }
        };
        let radial = (policy == KernelPolicy::Truncated).then(|| {
            let kmax = k0 * (*levels.last().unwrap_or(&0) as f64).sqrt();
            TruncatedRadialIntegral::new(dim, alpha, kmax * radius)
        });
        let values = par::collect(levels.len(), |i| symbol_at(levels[i], radial.as_ref()));
        let table: HashMap<u64, f64> = levels.into_iter().zip(values).collect();
        let multiplier = slot_levels.iter().map(|m2| table[m2]).collect();

        Ok(Self {
            alpha,
            grid,
            policy,
            zero_mode_value,
            multiplier: Arc::new(multiplier),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn policy(&self) -> KernelPolicy {
        self.policy
    }

    pub fn zero_mode_value(&self) -> f64 {
        self.zero_mode_value
    }

    /// Symbol values in FFT slot order.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Same grid and order, different policy.
    pub fn with_policy(&self, policy: KernelPolicy) -> Result<Self> {
        if policy == self.policy {
            return Ok(self.clone());
        }
        Self::new(self.grid, self.alpha, policy)
    }

    /// `I_α ∗ f`.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.grid.check_same(f.grid())?;
        let mut s = Spectrum::forward(f);
        s.apply_symbol(&self.multiplier);
        Ok(s.to_field())
    }

    /// Order `α/2` with [`KernelPolicy::Drop`]: applying it twice equals the
    /// order-`α` operator with `Drop`.
    pub fn half(&self) -> RieszOperator {
        let multiplier = par::collect(self.grid.len(), |i| {
            if self.grid.mode_norm_sq(i) == 0 {
                0.0
            } else {
                self.grid.wavenumber_sq(i).powf(-0.25 * self.alpha)
            }
        });
        Self {
            alpha: 0.5 * self.alpha,
            grid: self.grid,
            policy: KernelPolicy::Drop,
            zero_mode_value: 0.0,
            multiplier: Arc::new(multiplier),
        }
    }
}

/// Convenience wrapper matching [`RieszOperator::new`].
pub fn build_operator(grid: GridSpec, alpha: f64, policy: KernelPolicy) -> Result<RieszOperator> {
    RieszOperator::new(grid, alpha, policy)
}
