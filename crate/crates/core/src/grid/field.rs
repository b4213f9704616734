use super::{GridSpec, Spectrum, MAX_DIM};
use crate::error::{Error, Result};
use crate::par;

/// Real samples on a [`GridSpec`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at index {i}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    /// Samples `f` at every node position.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn([f64; MAX_DIM]) -> f64 + Sync + Send,
    {
        let values = par::collect(grid.len(), |i| f(grid.point(i)));
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> Field {
        let v = &self.values;
        Self::from_values_unchecked(self.grid, par::collect(v.len(), |i| f(v[i])))
    }

    pub fn zip_map(
        &self,
        other: &Field,
        f: impl Fn(f64, f64) -> f64 + Sync + Send,
    ) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let (a, b) = (&self.values, &other.values);
        Ok(Self::from_values_unchecked(
            self.grid,
            par::collect(a.len(), |i| f(a[i], b[i])),
        ))
    }

    pub fn scale(&self, t: f64) -> Field {
        self.map(|x| t * x)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a + t * b)
    }

    pub fn abs(&self) -> Field {
        self.map(f64::abs)
    }

    pub fn max_abs(&self) -> f64 {
        let v = &self.values;
        par::max(v.len(), |i| v[i].abs()).max(0.0)
    }

    /// Largest sample magnitude on the outer shell of the box.
    pub fn boundary_max_abs(&self) -> f64 {
        let v = &self.values;
        let g = self.grid;
        par::max(v.len(), |i| if g.on_boundary(i) { v[i].abs() } else { 0.0 }).max(0.0)
    }

    /// Ratio of boundary-shell amplitude to peak amplitude (0 for the zero field).
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            0.0
        } else {
            self.boundary_max_abs() / peak
        }
    }

    /// Quadrature `h^N sum f`.
    pub fn integrate(&self) -> f64 {
        let v = &self.values;
        par::sum(v.len(), |i| v[i]) * self.grid.cell_volume()
    }

    /// `h^N sum f g`.
    pub fn inner_product(&self, other: &Field) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let (a, b) = (&self.values, &other.values);
        Ok(par::sum(a.len(), |i| a[i] * b[i]) * self.grid.cell_volume())
    }

    pub fn norm_sq(&self) -> f64 {
        let v = &self.values;
        par::sum(v.len(), |i| v[i] * v[i]) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `∫|∇f|²`, evaluated spectrally as `sum |kappa|^2 |F|^2` with Parseval
    /// scaling.
    pub fn dirichlet_energy(&self) -> f64 {
        let g = self.grid;
        Spectrum::forward(self).weighted_norm_sq(|i| g.wavenumber_sq(i))
    }

    /// `-Δf` via the spectral symbol `|kappa|^2`.
    pub fn neg_laplacian(&self) -> Field {
        let g = self.grid;
        let symbol = par::collect(g.len(), |i| g.wavenumber_sq(i));
        let mut s = Spectrum::forward(self);
        s.apply_symbol(&symbol);
        s.to_field()
    }

    /// Periodic lattice translation: `g(x_j) = f(x_{j - offset mod n})`.
    pub fn shift(&self, offsets: &[i64]) -> Result<Field> {
        let g = self.grid;
        if offsets.len() != g.dim() {
            return Err(Error::Domain(format!(
                "expected {} offsets, got {}",
                g.dim(),
                offsets.len()
            )));
        }
        let n = g.n() as i64;
        let v = &self.values;
        let values = par::collect(v.len(), |i| {
            let mut idx = g.unravel(i);
            for (axis, off) in offsets.iter().enumerate() {
                idx[axis] = (idx[axis] as i64 - off).rem_euclid(n) as usize;
            }
            v[g.ravel(&idx)]
        });
        Ok(Self::from_values_unchecked(g, values))
    }
}
