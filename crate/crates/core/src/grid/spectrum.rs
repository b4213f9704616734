use super::{Field, GridSpec};
use crate::error::{Error, Result};
use crate::par;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Plan = Arc<dyn Fft<f64>>;

fn plans(n: usize) -> (Plan, Plan) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Plan, Plan)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Unnormalized N-dimensional DFT in place. The inverse is not scaled.
pub(crate) fn transform(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.n();
    let (fwd, inv) = plans(n);
    let plan = if inverse { inv } else { fwd };
    let len = data.len();
    let mut buffer = vec![Complex64::default(); len];

    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        if stride == 1 {
            par::for_each_chunk(data, n, |_, line| plan.process(line));
            continue;
        }
        // Each block of n * stride samples holds `stride` interleaved lines.
        let block = n * stride;
        par::for_each_chunk(&mut buffer, block, |b, out| {
            let src = &data[b * block..(b + 1) * block];
            for inner in 0..stride {
                for k in 0..n {
                    out[inner * n + k] = src[k * stride + inner];
                }
            }
        });
        par::for_each_chunk(&mut buffer, n, |_, line| plan.process(line));
        par::for_each_chunk(data, block, |b, dst| {
            let src = &buffer[b * block..(b + 1) * block];
            for inner in 0..stride {
                for k in 0..n {
                    dst[k * stride + inner] = src[inner * n + k];
                }
            }
        });
    }
}

/// Discrete Fourier coefficients of a field on a periodic grid.
///
/// Coefficients are the unnormalized sums `F_m = sum_j f_j exp(-i kappa_m j h)`
/// in FFT slot order; [`GridSpec::wavenumber`] maps slots to `kappa`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl Spectrum {
    pub fn forward(field: &Field) -> Self {
        let values = field.values();
        let mut coeffs = par::collect(values.len(), |i| Complex64::new(values[i], 0.0));
        transform(field.grid(), &mut coeffs, false);
        Self {
            grid: *field.grid(),
            coeffs,
            hermitian: true,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>, hermitian: bool) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            coeffs,
            hermitian,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Whether the coefficients are known to come from a real field.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest `|F_m - conj(F_{-m})|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let n = g.n();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let defect = par::max(self.coeffs.len(), |i| {
            let idx = g.unravel(i);
            let mut mirror = idx;
            for m in mirror.iter_mut().take(g.dim()) {
                *m = (n - *m) % n;
            }
            (self.coeffs[i] - self.coeffs[g.ravel(&mirror)].conj()).norm()
        });
        defect / scale
    }

    /// Multiplies every coefficient by a real symbol indexed by flat slot.
    pub fn apply_symbol(&mut self, symbol: &[f64]) {
        par::update(&mut self.coeffs, |i, c| c * symbol[i]);
    }

    /// Inverse transform, keeping the real part.
    pub fn to_field(&self) -> Field {
        let mut data = self.coeffs.clone();
        transform(&self.grid, &mut data, true);
        let scale = 1.0 / self.grid.len() as f64;
        let values = par::collect(data.len(), |i| data[i].re * scale);
        Field::from_values_unchecked(self.grid, values)
    }

    /// Spectral inner product `h^N / n^N * sum Re(F conj(G))`, equal to the
    /// quadrature inner product by Parseval.
    pub fn inner_product(&self, other: &Spectrum) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s = par::sum(self.coeffs.len(), |i| {
            (self.coeffs[i] * other.coeffs[i].conj()).re
        });
        Ok(s * self.grid.cell_volume() / self.grid.len() as f64)
    }

    /// `h^N / n^N * sum w_m |F_m|^2` for a real weight.
    pub fn weighted_norm_sq(&self, weight: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
        let s = par::sum(self.coeffs.len(), |i| weight(i) * self.coeffs[i].norm_sqr());
        s * self.grid.cell_volume() / self.grid.len() as f64
    }
}
