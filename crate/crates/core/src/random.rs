//! Seeded smooth random fields for property checks.

use crate::energy::Pair;
use crate::grid::{Field, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Highest oscillation index per axis.
const MODES: i32 = 2;

/// Gaussian envelope `exp(−|x|²/(2σ²))`, `σ = L/12`, times a random
/// trigonometric polynomial with wavelengths down to `L/8`.
pub fn band_limited_field<R: Rng>(grid: &GridSpec, rng: &mut R) -> Field {
    let dim = grid.dim();
    let sigma = grid.length() / 12.0;
    let k0 = 2.0 * PI * 4.0 / grid.length();
    let mut terms = Vec::new();
    let count = (2 * MODES + 1).pow(dim as u32);
    for t in 0..count {
        let mut m = [0i32; 3];
        let mut rest = t;
        for mi in m.iter_mut().take(dim) {
            *mi = rest % (2 * MODES + 1) - MODES;
            rest /= 2 * MODES + 1;
        }
        let decay = 1.0 / (1.0 + m.iter().map(|x| (x * x) as f64).sum::<f64>());
        let a: f64 = rng.gen_range(-1.0..1.0) * decay;
        let b: f64 = rng.gen_range(-1.0..1.0) * decay;
        terms.push((m, a, b));
    }
    let offset: f64 = rng.gen_range(0.5..1.5);
    Field::from_fn(*grid, move |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let osc: f64 = terms
            .iter()
            .map(|(m, a, b)| {
                let phase: f64 = (0..3).map(|i| m[i] as f64 * k0 * x[i]).sum();
                a * phase.cos() + b * phase.sin()
            })
            .sum();
        (-r2 / (2.0 * sigma * sigma)).exp() * (offset + osc)
    })
}

/// Deterministic random pair for a seed.
pub fn random_pair(grid: &GridSpec, seed: u64) -> Pair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = band_limited_field(grid, &mut rng);
    let v = band_limited_field(grid, &mut rng);
    Pair { u, v }
}

/// `exp(−|x − c|²/width²)`.
pub fn gaussian_bump(grid: &GridSpec, center: &[f64], width: f64) -> Field {
    let mut c = [0.0; 3];
    c[..center.len()].copy_from_slice(center);
    Field::from_fn(*grid, move |x| {
        let r2: f64 = (0..3).map(|i| (x[i] - c[i]).powi(2)).sum();
        (-r2 / (width * width)).exp()
    })
}
