//! Uniform periodic grids on `S¹` and `T²`, FFT-based spectral calculus and
//! trigonometric polynomials.
//!
//! Samples on a torus grid are stored row-major with the first angle as the
//! slow index: node `i1 * n + i2` sits at `(2π i1 / n, 2π i2 / n)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Uniform angle grid on the model manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Circle { n: usize },
    Torus { n: usize },
}

impl Grid {
    pub fn circle(n: usize) -> Self {
        Grid::Circle { n }
    }

    pub fn torus(n: usize) -> Self {
        Grid::Torus { n }
    }

    /// Dimension of the model manifold (1 or 2).
    pub fn dim(&self) -> usize {
        match self {
            Grid::Circle { .. } => 1,
            Grid::Torus { .. } => 2,
        }
    }

    /// Nodes per angle.
    pub fn per_axis(&self) -> usize {
        match *self {
            Grid::Circle { n } | Grid::Torus { n } => n,
        }
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        match *self {
            Grid::Circle { n } => n,
            Grid::Torus { n } => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angle coordinates of node `j`; the second entry is zero on the circle.
    pub fn node(&self, j: usize) -> [f64; 2] {
        let n = self.per_axis();
        let h = TAU / n as f64;
        match self {
            Grid::Circle { .. } => [h * j as f64, 0.0],
            Grid::Torus { .. } => [h * (j / n) as f64, h * (j % n) as f64],
        }
    }

    /// Trapezoidal weight of one node, `(2π/n)^dim`.
    pub fn cell_measure(&self) -> f64 {
        (TAU / self.per_axis() as f64).powi(self.dim() as i32)
    }

    /// Indices of the nodes adjacent to `j` in parameter space (including
    /// diagonal neighbours on the torus).
    pub(crate) fn adjacent(&self, a: usize, b: usize) -> bool {
        let n = self.per_axis();
        let close = |x: usize, y: usize| {
            let d = if x > y { x - y } else { y - x };
            d <= 1 || d == n - 1
        };
        match self {
            Grid::Circle { .. } => close(a, b),
            Grid::Torus { .. } => close(a / n, b / n) && close(a % n, b % n),
        }
    }
}

/// Signed wavenumber of FFT index `j` on an `n`-point axis. The Nyquist
/// index (even `n`) is reported with `nyquist = true`.
fn wavenumber(j: usize, n: usize) -> (f64, bool) {
    if 2 * j == n {
        ((n / 2) as f64, true)
    } else if 2 * j < n {
        (j as f64, false)
    } else {
        (j as f64 - n as f64, false)
    }
}

fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    if !n.is_power_of_two() {
        let input = data.to_vec();
        for (k, out) in data.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, x) in input.iter().enumerate() {
                let ang = sign * TAU * ((j * k) % n) as f64 / n as f64;
                acc += x * Complex64::new(ang.cos(), ang.sin());
            }
            *out = acc;
        }
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let r = i.reverse_bits() >> (usize::BITS - bits);
        if r > i {
            data.swap(i, r);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * TAU / len as f64;
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| {
                let a = ang * k as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = data[start + k];
                let v = data[start + k + half] * twiddles[k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

fn transform(grid: Grid, data: &mut [Complex64], inverse: bool) {
    match grid {
        Grid::Circle { .. } => fft_in_place(data, inverse),
        Grid::Torus { n } => {
            for row in data.chunks_mut(n) {
                fft_in_place(row, inverse);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for i2 in 0..n {
                for i1 in 0..n {
                    col[i1] = data[i1 * n + i2];
                }
                fft_in_place(&mut col, inverse);
                for i1 in 0..n {
                    data[i1 * n + i2] = col[i1];
                }
            }
        }
    }
}

/// Fourier coefficients of a real periodic sample array, normalized so that
/// `sample(φ) = Σ c_k e^{i k·φ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(grid: Grid, samples: &[f64]) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        transform(grid, &mut data, false);
        let scale = 1.0 / grid.len() as f64;
        for c in &mut data {
            *c *= scale;
        }
        Spectrum { grid, coeffs: data }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn samples(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        transform(self.grid, &mut data, true);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Mean value (the zero mode).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Signed wavenumbers `(k1, k2)` of coefficient `j`, with Nyquist flags.
    fn modes(&self, j: usize) -> ([f64; 2], [bool; 2]) {
        let n = self.grid.per_axis();
        match self.grid {
            Grid::Circle { .. } => {
                let (k, ny) = wavenumber(j, n);
                ([k, 0.0], [ny, false])
            }
            Grid::Torus { .. } => {
                let (k1, n1) = wavenumber(j / n, n);
                let (k2, n2) = wavenumber(j % n, n);
                ([k1, k2], [n1, n2])
            }
        }
    }

    /// Signed integer mode of coefficient `j` (Nyquist reported as `+n/2`).
    pub fn mode(&self, j: usize) -> [i64; 2] {
        let (k, _) = self.modes(j);
        [k[0] as i64, k[1] as i64]
    }

    /// Spectral partial derivative along `axis`; Nyquist modes are dropped.
    pub fn derivative(&self, axis: usize) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let (k, ny) = self.modes(j);
                if ny[axis] || ny[1 - axis] && self.grid.dim() == 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * Complex64::new(0.0, k[axis])
                }
            })
            .collect();
        Spectrum { grid: self.grid, coeffs }
    }

    /// Evaluates the trigonometric interpolant at arbitrary angles.
    pub fn eval(&self, point: [f64; 2]) -> f64 {
        let n = self.grid.per_axis();
        let axis_waves = |phi: f64| -> Vec<Complex64> {
            (0..n)
                .map(|j| {
                    let (k, ny) = wavenumber(j, n);
                    if ny {
                        Complex64::new((k * phi).cos(), 0.0)
                    } else {
                        Complex64::new((k * phi).cos(), (k * phi).sin())
                    }
                })
                .collect()
        };
        match self.grid {
            Grid::Circle { .. } => {
                let w = axis_waves(point[0]);
                self.coeffs.iter().zip(&w).map(|(c, w)| (c * w).re).sum()
            }
            Grid::Torus { .. } => {
                let w1 = axis_waves(point[0]);
                let w2 = axis_waves(point[1]);
                let mut acc = Complex64::new(0.0, 0.0);
                for (i1, row) in self.coeffs.chunks(n).enumerate() {
                    let inner: Complex64 = row.iter().zip(&w2).map(|(c, w)| c * w).sum();
                    acc += w1[i1] * inner;
                }
                acc.re
            }
        }
    }

    /// Largest coefficient magnitude among the top `band` wavenumbers of
    /// either axis; a resolution diagnostic.
    pub fn tail(&self, band: usize) -> f64 {
        let n = self.grid.per_axis() as f64;
        let cut = n / 2.0 - band as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let (k, _) = self.modes(*j);
                k[0].abs() >= cut || k[1].abs() >= cut
            })
            .fold(0.0, |m, (_, c)| m.max(c.norm()))
    }
}

/// Spectral derivative of periodic samples along `axis`.
pub fn derivative(grid: Grid, samples: &[f64], axis: usize) -> Vec<f64> {
    Spectrum::of(grid, samples).derivative(axis).samples()
}

/// Zero-mean potential `H` with `dH ≈ β` for a 1-form given by its
/// components (one on the circle, two on the torus). The caller is expected
/// to check periods and exactness of the result.
pub fn potential(grid: Grid, components: &[Vec<f64>]) -> Vec<f64> {
    let spectra: Vec<Spectrum> = components.iter().map(|c| Spectrum::of(grid, c)).collect();
    let first = &spectra[0];
    let coeffs = (0..grid.len())
        .map(|j| {
            let (k, ny) = first.modes(j);
            if ny[0] || ny[1] {
                return Complex64::new(0.0, 0.0);
            }
            if k[0] != 0.0 {
                spectra[0].coeffs[j] / Complex64::new(0.0, k[0])
            } else if k[1] != 0.0 && spectra.len() > 1 {
                spectra[1].coeffs[j] / Complex64::new(0.0, k[1])
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Spectrum { grid, coeffs }.samples()
}

/// One term `cos·cos(k·φ) + sin·sin(k·φ)` of a real trigonometric polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub k: [i32; 2],
    pub cos: f64,
    pub sin: f64,
}

impl TrigTerm {
    pub fn new(k: [i32; 2], cos: f64, sin: f64) -> Self {
        TrigTerm { k, cos, sin }
    }

    fn phase(&self, point: [f64; 2]) -> f64 {
        self.k[0] as f64 * point[0] + self.k[1] as f64 * point[1]
    }

    pub fn eval(&self, point: [f64; 2]) -> f64 {
        let a = self.phase(point);
        self.cos * a.cos() + self.sin * a.sin()
    }
}

/// Real trigonometric polynomial in one or two angles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigPoly { terms }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly { terms: vec![TrigTerm::new([0, 0], c, 0.0)] }
    }

    pub fn eval(&self, point: [f64; 2]) -> f64 {
        self.terms.iter().map(|t| t.eval(point)).sum()
    }

    pub fn sample(&self, grid: Grid) -> Vec<f64> {
        (0..grid.len()).map(|j| self.eval(grid.node(j))).collect()
    }

    /// Average over the full torus / circle.
    pub fn mean(&self) -> f64 {
        self.terms.iter().filter(|t| t.k == [0, 0]).map(|t| t.cos).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm::new(t.k, t.cos * factor, t.sin * factor))
                .collect(),
        }
    }

    pub fn derivative(&self, axis: usize) -> Self {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.k[axis] != 0)
                .map(|t| {
                    let k = t.k[axis] as f64;
                    TrigTerm::new(t.k, k * t.sin, -k * t.cos)
                })
                .collect(),
        }
    }

    /// `∫_0^{φ_axis} p(…, s, …) ds` with the other angle held fixed.
    pub fn integral_along(&self, axis: usize, point: [f64; 2]) -> f64 {
        let mut start = point;
        start[axis] = 0.0;
        self.terms
            .iter()
            .map(|t| {
                if t.k[axis] == 0 {
                    point[axis] * t.eval(point)
                } else {
                    let k = t.k[axis] as f64;
                    let (a, a0) = (t.phase(point), t.phase(start));
                    (t.cos * (a.sin() - a0.sin()) - t.sin * (a.cos() - a0.cos())) / k
                }
            })
            .sum()
    }

    /// `∫_0^{2π} p dφ_axis`, a polynomial in the remaining angle.
    pub fn integrate_out(&self, axis: usize) -> Self {
        TrigPoly {
            terms: self
                .terms
                .iter()
                .filter(|t| t.k[axis] == 0)
                .map(|t| TrigTerm::new(t.k, TAU * t.cos, TAU * t.sin))
                .collect(),
        }
    }
}

/// Solves `g(x) = target` for a strictly increasing `g` with `g(x + 2π) =
/// g(x) + 2π`-type growth, starting from `guess`, by safeguarded Newton.
pub(crate) fn invert_monotone(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    target: f64,
    guess: f64,
) -> f64 {
    let mut lo = guess - PI;
    let mut hi = guess + PI;
    while g(lo) > target {
        lo -= PI;
    }
    while g(hi) < target {
        hi += PI;
    }
    let mut x = guess.clamp(lo, hi);
    for _ in 0..100 {
        let r = g(x) - target;
        if r.abs() < 1e-15 {
            break;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = dg(x);
        let mut next = x - r / d;
        if !(next > lo && next < hi) || d <= 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-16 * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    x
}
