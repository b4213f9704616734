//! Potential families for `A(x)` and `B(x)`.
//!
//! * `Constant`: `A ≡ value`.
//! * `BoundedLimit`: `A(x) = A∞ − depth·exp(−|x|²/width²)`, bounded below by a
//!   floor `A₀` and approaching `A∞` far from the origin.
//! * `Periodic`: `A(x) = base + amplitude·Π sin²(π x_i / τ_i)`.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::par;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance for `A(boundary) ≈ A∞` on bounded-limit potentials.
pub const LIMIT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    BoundedLimit {
        floor: f64,
        limit: f64,
        well_depth: f64,
        well_width: f64,
    },
    Periodic {
        base: f64,
        amplitude: f64,
        periods: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    /// Checks the family's own invariants (independent of any grid).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPotential(msg));
        match self {
            Self::Constant { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return bad(format!("constant value must be positive, got {value}"));
                }
            }
            Self::BoundedLimit {
                floor,
                limit,
                well_depth,
                well_width,
            } => {
                if !(floor.is_finite() && *floor > 0.0) {
                    return bad(format!("floor must be positive, got {floor}"));
                }
                if !(well_depth.is_finite() && *well_depth >= 0.0) {
                    return bad(format!("well depth must be nonnegative, got {well_depth}"));
                }
                if !(well_width.is_finite() && *well_width > 0.0) {
                    return bad(format!("well width must be positive, got {well_width}"));
                }
                if !(limit.is_finite() && limit - well_depth >= *floor) {
                    return bad(format!(
                        "limit - depth = {} is below the floor {floor}",
                        limit - well_depth
                    ));
                }
            }
            Self::Periodic {
                base,
                amplitude,
                periods,
            } => {
                if !(base.is_finite() && *base > 0.0) {
                    return bad(format!("base must be positive, got {base}"));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return bad(format!("amplitude must be nonnegative, got {amplitude}"));
                }
                if periods.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                    return bad("periods must be positive".into());
                }
            }
        }
        Ok(())
    }

    /// Closed-form value at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::BoundedLimit {
                limit,
                well_depth,
                well_width,
                ..
            } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                limit - well_depth * (-r2 / (well_width * well_width)).exp()
            }
            Self::Periodic {
                base,
                amplitude,
                periods,
            } => {
                let prod: f64 = x
                    .iter()
                    .zip(periods)
                    .map(|(xi, t)| (PI * xi / t).sin().powi(2))
                    .product();
                base + amplitude * prod
            }
        }
    }

    /// Guaranteed positive lower bound (`A₀`).
    pub fn lower_bound(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::BoundedLimit { floor, .. } => *floor,
            Self::Periodic { base, .. } => *base,
        }
    }
}

/// Number of periods per box side on each axis, if every period divides `L`.
fn periods_per_box(periods: &[f64], grid: &GridSpec) -> Result<Vec<usize>> {
    if periods.len() != grid.dim() {
        return Err(Error::InvalidPotential(format!(
            "expected {} periods, got {}",
            grid.dim(),
            periods.len()
        )));
    }
    periods
        .iter()
        .enumerate()
        .map(|(axis, &tau)| {
            let k = grid.length() / tau;
            let kr = k.round();
            if kr >= 1.0 && (k - kr).abs() <= 1e-9 * kr {
                Ok(kr as usize)
            } else {
                Err(Error::PeriodMismatch {
                    axis,
                    period: tau,
                    length: grid.length(),
                })
            }
        })
        .collect()
}

/// A sampled potential together with the family that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    spec: PotentialSpec,
    field: Field,
    min: f64,
    warnings: Vec<String>,
}

impl PotentialField {
    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    /// Smallest sampled value.
    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Grid points per period on each axis when the potential is invariant
    /// under those lattice shifts. Constants are invariant under unit shifts.
    pub fn lattice_period(&self) -> Option<Vec<usize>> {
        let grid = self.grid();
        match &self.spec {
            PotentialSpec::Constant { .. } => Some(vec![1; grid.dim()]),
            PotentialSpec::Periodic { periods, .. } => {
                let ks = periods_per_box(periods, grid).ok()?;
                ks.iter()
                    .map(|&k| grid.n().is_multiple_of(k).then_some(grid.n() / k))
                    .collect()
            }
            PotentialSpec::BoundedLimit { .. } => None,
        }
    }
}

/// Samples a potential family on the grid and checks positivity.
pub fn sample_potential(spec: &PotentialSpec, grid: &GridSpec) -> Result<PotentialField> {
    spec.validate()?;
    let g = *grid;
    let mut warnings = Vec::new();
    let values = match spec {
        PotentialSpec::Constant { value } => vec![*value; g.len()],
        PotentialSpec::BoundedLimit {
            limit,
            well_depth,
            well_width,
            ..
        } => {
            let edge =
                well_depth * (-(0.25 * g.length() * g.length()) / (well_width * well_width)).exp();
            if edge > LIMIT_TOLERANCE * limit {
                warnings.push(format!(
                    "potential differs from its limit by {edge:e} at the box boundary; enlarge L"
                ));
            }
            par::collect(g.len(), |i| spec.eval(&g.point(i)[..g.dim()]))
        }
        PotentialSpec::Periodic {
            base,
            amplitude,
            periods,
        } => {
            let ks = periods_per_box(periods, &g)?;
            // Aligned periods: evaluate at the reduced index so lattice shifts
            // reproduce samples bit for bit.
            let reduce: Vec<Option<usize>> = ks
                .iter()
                .map(|&k| g.n().is_multiple_of(k).then_some(g.n() / k))
                .collect();
            par::collect(g.len(), |i| {
                let idx = g.unravel(i);
                let mut prod = 1.0;
                for axis in 0..g.dim() {
                    let j = match reduce[axis] {
                        Some(p) => idx[axis] % p,
                        None => idx[axis],
                    };
                    prod *= (PI * g.coord(j) / periods[axis]).sin().powi(2);
                }
                base + amplitude * prod
            })
        }
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NonPositivePotential { min });
    }
    Ok(PotentialField {
        spec: spec.clone(),
        field: Field::from_values(g, values)?,
        min,
        warnings,
    })
}

/// `∫ A f²`.
pub fn weighted_mass(pot: &PotentialField, f: &Field) -> Result<f64> {
    pot.grid().check_same(f.grid())?;
    let (a, v) = (pot.field().values(), f.values());
    Ok(par::sum(v.len(), |i| a[i] * v[i] * v[i]) * f.grid().cell_volume())
}
