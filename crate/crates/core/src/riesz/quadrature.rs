//! Radial integrals for the ball-truncated Riesz kernel.
//!
//! The Fourier transform of `A_α |x|^{α−N}` restricted to `|x| < R` is
//! `A_α C_N κ^{−α} J(κR)` with `J(X) = ∫_0^X s^{α−1} g(s) ds`, where `g` is
//! `cos s` (N = 1), `J₀(s)` (N = 2) or `sin s / s` (N = 3) and `C_N` is the
//! unit-sphere area `2, 2π, 4π`.

use std::f64::consts::PI;

const PANEL: f64 = 0.5;
const SERIES_TERMS: usize = 14;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Bessel `J₀` from the trapezoidal rule on `(1/2π)∫ cos(s sin θ) dθ`,
/// which is spectrally accurate for a periodic integrand.
pub(crate) fn bessel_j0(s: f64) -> f64 {
    let s = s.abs();
    let m = 4 * ((s as usize + 48) / 4);
    let step = 2.0 * PI / m as f64;
    let quarter = m / 4;
    // Symmetry: the integrand over one quarter period determines the rest.
    let mut acc = 0.5 * (1.0 + s.cos());
    for j in 1..quarter {
        acc += (s * (j as f64 * step).sin()).cos();
    }
    acc / quarter as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Weight {
    Cos,
    Bessel0,
    Sinc,
}

impl Weight {
    fn eval(self, s: f64) -> f64 {
        match self {
            Weight::Cos => s.cos(),
            Weight::Bessel0 => bessel_j0(s),
            Weight::Sinc => {
                if s == 0.0 {
                    1.0
                } else {
                    s.sin() / s
                }
            }
        }
    }

    /// Taylor coefficient of `s^{2k}`.
    fn series_coeff(self, k: usize) -> f64 {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        match self {
            Weight::Cos => sign / fact(2 * k),
            Weight::Bessel0 => sign / (4f64.powi(k as i32) * fact(k) * fact(k)),
            Weight::Sinc => sign / fact(2 * k + 1),
        }
    }
}

/// Tabulated `J(X)` on panel boundaries, refined per query with one partial
/// Gauss–Legendre panel.
#[derive(Debug, Clone)]
pub(crate) struct TruncatedRadialIntegral {
    alpha: f64,
    weight: Weight,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TruncatedRadialIntegral {
    pub(crate) fn new(dim: usize, alpha: f64, x_max: f64) -> Self {
        let weight = match dim {
            1 => Weight::Cos,
            2 => Weight::Bessel0,
            _ => Weight::Sinc,
        };
        let (nodes, weights) = gauss_legendre(16);
        let mut this = Self {
            alpha,
            weight,
            nodes,
            weights,
            cumulative: Vec::new(),
        };
        let panels = (x_max / PANEL).ceil() as usize + 1;
        let mut cumulative = Vec::with_capacity(panels + 1);
        cumulative.push(0.0);
        cumulative.push(this.head(PANEL));
        for k in 1..panels {
            let a = k as f64 * PANEL;
            let prev = cumulative[k];
            cumulative.push(prev + this.panel(a, a + PANEL));
        }
        this.cumulative = cumulative;
        this
    }

    /// `∫_0^a s^{α−1} g(s) ds` by termwise integration of the Taylor series.
    fn head(&self, a: f64) -> f64 {
        (0..SERIES_TERMS)
            .map(|k| {
                let e = self.alpha + 2.0 * k as f64;
                self.weight.series_coeff(k) * a.powf(e) / e
            })
            .sum()
    }

    fn panel(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| {
                let s = mid + half * t;
                w * s.powf(self.alpha - 1.0) * self.weight.eval(s)
            })
            .sum::<f64>()
            * half
    }

    /// `J(X)` for `0 <= X`.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        if x <= PANEL {
            return self.head(x);
        }
        let k = ((x / PANEL).floor() as usize).min(self.cumulative.len() - 1);
        let a = k as f64 * PANEL;
        if a >= x {
            return self.cumulative[k];
        }
        self.cumulative[k] + self.panel(a, x)
    }
}
