//! Spectrally discretized embeddings `f: M → S` of `M ∈ {S¹, T²}`, fields
//! along them, pulled-back forms, and the two momentum maps of the dual pair:
//! `J_L(f) = f_*μ` (paired with Hamiltonians) and `J_R^ex(f) = [f*θ]`
//! (represented by its periods).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;


use crate::ambient::{hamiltonian_field_into, AmbientModel, HamiltonianSpec};
use crate::error::{Error, Result};
use crate::spectral::{Grid, Spectrum, TrigPoly, TrigTerm};
#[allow(unused_imports)]
use num_traits::Float;

/// `(M, μ)`: a circle or torus with a strictly positive trigonometric
/// density of total volume `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelManifold {
    grid: Grid,
    density: TrigPoly,
    samples: Vec<f64>,
    total_volume: f64,
}

impl ModelManifold {
    /// Rescales `shape` so that `∫_M μ = total_volume`. An empty shape means
    /// the uniform density.
    pub fn new(grid: Grid, shape: TrigPoly, total_volume: f64) -> Result<Self> {
        if !(total_volume > 0.0) {
            return Err(Error::InvalidArgument("total volume must be positive"));
        }
        if grid.per_axis() < 4 {
            return Err(Error::InvalidArgument("grid needs at least 4 nodes per angle"));
        }
        if grid.dim() == 1 && shape.terms.iter().any(|t| t.k[1] != 0) {
            return Err(Error::InvalidArgument("circle density depends on a second angle"));
        }
        let shape = if shape.terms.is_empty() { TrigPoly::constant(1.0) } else { shape };
        let raw_total = shape.mean() * TAU.powi(grid.dim() as i32);
        let raw = shape.sample(grid);
        let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) || !(raw_total > 0.0) {
            return Err(Error::DegenerateDensity { min });
        }
        let density = shape.scaled(total_volume / raw_total);
        let samples = density.sample(grid);
        Ok(ModelManifold { grid, density, samples, total_volume })
    }

    pub fn uniform(grid: Grid, total_volume: f64) -> Result<Self> {
        Self::new(grid, TrigPoly::default(), total_volume)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Density of `μ` with respect to `dφ` (or `dφ₁dφ₂`).
    pub fn density(&self) -> &TrigPoly {
        &self.density
    }

    pub fn density_samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_uniform(&self) -> bool {
        self.density.terms.iter().all(|t| t.k == [0, 0] || (t.cos == 0.0 && t.sin == 0.0))
    }

    /// Trapezoidal quadrature `∫_M φ μ` of node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let w = self.grid.cell_measure();
        values.iter().zip(&self.samples).map(|(v, r)| v * r).sum::<f64>() * w
    }
}

/// Fourier description of one ambient coordinate: a linear winding part
/// (only allowed for angular coordinates) plus a trigonometric polynomial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoordinateSeries {
    pub winding: [i32; 2],
    pub terms: Vec<TrigTerm>,
}

impl CoordinateSeries {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        CoordinateSeries { winding: [0, 0], terms }
    }

    pub fn winding(winding: [i32; 2], terms: Vec<TrigTerm>) -> Self {
        CoordinateSeries { winding, terms }
    }

    pub fn eval(&self, point: [f64; 2]) -> f64 {
        self.winding[0] as f64 * point[0]
            + self.winding[1] as f64 * point[1]
            + self.terms.iter().map(|t| t.eval(point)).sum::<f64>()
    }
}

/// Validity thresholds for embeddings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingTolerances {
    pub min_singular_value: f64,
    pub separation: f64,
}

impl Default for EmbeddingTolerances {
    fn default() -> Self {
        EmbeddingTolerances { min_singular_value: 1e-6, separation: 1e-6 }
    }
}

/// An embedding sampled on a uniform grid, with spectral first derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    model: AmbientModel,
    grid: Grid,
    winding: Vec<[i32; 2]>,
    values: Vec<Vec<f64>>,
    periodic: Vec<Spectrum>,
    derivs: Vec<Vec<Vec<f64>>>,
}

impl Embedding {
    pub fn from_series(model: AmbientModel, grid: Grid, series: &[CoordinateSeries]) -> Result<Self> {
        let winding = series.iter().map(|s| s.winding).collect();
        let values = series
            .iter()
            .map(|s| (0..grid.len()).map(|j| s.eval(grid.node(j))).collect())
            .collect();
        Self::from_samples(model, grid, values, winding)
    }

    /// Builds from lifted node values (coordinate-major) and validates with
    /// the default tolerances.
    pub fn from_samples(
        model: AmbientModel,
        grid: Grid,
        values: Vec<Vec<f64>>,
        winding: Vec<[i32; 2]>,
    ) -> Result<Self> {
        let f = Self::build(model, grid, values, winding)?;
        f.validate(EmbeddingTolerances::default())?;
        Ok(f)
    }

    pub(crate) fn build(
        model: AmbientModel,
        grid: Grid,
        values: Vec<Vec<f64>>,
        winding: Vec<[i32; 2]>,
    ) -> Result<Self> {
        if values.len() != model.dim() || winding.len() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), got: values.len() });
        }
        for (i, (v, w)) in values.iter().zip(&winding).enumerate() {
            if v.len() != grid.len() {
                return Err(Error::GridMismatch);
            }
            if *w != [0, 0] && !model.is_angular(i) {
                return Err(Error::InvalidArgument("winding on a non-angular coordinate"));
            }
            if grid.dim() == 1 && w[1] != 0 {
                return Err(Error::InvalidArgument("second winding number on a circle"));
            }
        }
        let periodic: Vec<Spectrum> = values
            .iter()
            .zip(&winding)
            .map(|(v, w)| {
                let p: Vec<f64> = v
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let phi = grid.node(j);
                        x - w[0] as f64 * phi[0] - w[1] as f64 * phi[1]
                    })
                    .collect();
                Spectrum::of(grid, &p)
            })
            .collect();
        let derivs = (0..grid.dim())
            .map(|axis| {
                periodic
                    .iter()
                    .zip(&winding)
                    .map(|(s, w)| {
                        let mut d = s.derivative(axis).samples();
                        d.iter_mut().for_each(|x| *x += w[axis] as f64);
                        d
                    })
                    .collect()
            })
            .collect();
        Ok(Embedding { model, grid, winding, values, periodic, derivs })
    }

    /// Checks immersion (smallest singular value of `Tf`) and injectivity
    /// (node separation, ignoring parameter-adjacent nodes).
    pub fn validate(&self, tol: EmbeddingTolerances) -> Result<()> {
        let (node, value) = self.min_singular_value();
        if !(value > tol.min_singular_value) {
            return Err(Error::NotImmersed { node, value });
        }
        let d = self.model.dim();
        let n = self.grid.len();
        let pts: Vec<f64> = (0..n).flat_map(|j| (0..d).map(move |i| (i, j))).map(|(i, j)| self.values[i][j]).collect();
        let mut diff = vec![0.0; d];
        let sep2 = tol.separation * tol.separation;
        for a in 0..n {
            for b in (a + 1)..n {
                if self.grid.adjacent(a, b) {
                    continue;
                }
                self.model.displacement(&pts[a * d..(a + 1) * d], &pts[b * d..(b + 1) * d], &mut diff);
                let dist2: f64 = diff.iter().map(|x| x * x).sum();
                if !(dist2 > sep2) {
                    return Err(Error::NotInjective { a, b, distance: dist2.sqrt() });
                }
            }
        }
        Ok(())
    }

    /// Smallest singular value of the derivative over all nodes, and where.
    pub fn min_singular_value(&self) -> (usize, f64) {
        let mut worst = (0, f64::INFINITY);
        for j in 0..self.grid.len() {
            let s = match self.grid.dim() {
                1 => self.derivs[0].iter().map(|c| c[j] * c[j]).sum::<f64>().sqrt(),
                _ => {
                    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
                    for i in 0..self.model.dim() {
                        let (u, v) = (self.derivs[0][i][j], self.derivs[1][i][j]);
                        a += u * u;
                        b += u * v;
                        c += v * v;
                    }
                    let mid = 0.5 * (a + c);
                    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                    (mid - rad).max(0.0).sqrt()
                }
            };
            if s < worst.1 {
                worst = (j, s);
            }
        }
        worst
    }

    pub fn model(&self) -> &AmbientModel {
        &self.model
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn winding(&self) -> &[[i32; 2]] {
        &self.winding
    }

    /// Lifted node values, coordinate-major.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// `∂f/∂φ_axis` at the nodes, coordinate-major.
    pub fn derivative(&self, axis: usize) -> &[Vec<f64>] {
        &self.derivs[axis]
    }

    /// Fourier data of the periodic part of coordinate `i`.
    pub fn spectrum(&self, coord: usize) -> &Spectrum {
        &self.periodic[coord]
    }

    pub fn point(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|c| c[j]).collect()
    }

    pub(crate) fn point_into(&self, j: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.values) {
            *o = c[j];
        }
    }

    pub(crate) fn tangent_into(&self, axis: usize, j: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.derivs[axis]) {
            *o = c[j];
        }
    }

    /// Spectral interpolant at arbitrary parameter values (lifted).
    pub fn eval(&self, param: [f64; 2]) -> Vec<f64> {
        self.periodic
            .iter()
            .zip(&self.winding)
            .map(|(s, w)| s.eval(param) + w[0] as f64 * param[0] + w[1] as f64 * param[1])
            .collect()
    }

    /// Largest node-wise ambient distance to `other` (same grid).
    pub fn max_node_distance(&self, other: &Embedding) -> Result<f64> {
        self.check_compatible(other.grid, other.model.dim())?;
        let d = self.model.dim();
        let (mut a, mut b, mut diff) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.len() {
            self.point_into(j, &mut a);
            other.point_into(j, &mut b);
            self.model.displacement(&a, &b, &mut diff);
            worst = worst.max(diff.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
        Ok(worst)
    }

    pub(crate) fn check_compatible(&self, grid: Grid, dim: usize) -> Result<()> {
        if grid != self.grid {
            return Err(Error::GridMismatch);
        }
        if dim != self.model.dim() {
            return Err(Error::DimensionMismatch { expected: self.model.dim(), got: dim });
        }
        Ok(())
    }

    /// Applies `g` to every node value, keeping winding numbers; the result
    /// is validated.
    pub fn map_points(&self, mut g: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Embedding> {
        let d = self.model.dim();
        let mut values = vec![Vec::with_capacity(self.grid.len()); d];
        let mut p = vec![0.0; d];
        for j in 0..self.grid.len() {
            self.point_into(j, &mut p);
            let q = g(&p);
            if q.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: q.len() });
            }
            for (col, x) in values.iter_mut().zip(q) {
                col.push(x);
            }
        }
        Embedding::from_samples(self.model, self.grid, values, self.winding.clone())
    }
}

/// A vector field on `S` along an embedding, sampled at the nodes
/// (coordinate-major).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    grid: Grid,
    values: Vec<Vec<f64>>,
}

impl TangentField {
    pub fn new(grid: Grid, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(TangentField { grid, values })
    }

    pub fn zero(f: &Embedding) -> Self {
        TangentField { grid: f.grid, values: vec![vec![0.0; f.grid.len()]; f.model.dim()] }
    }

    /// Node-wise field `j ↦ g(f(node_j))`.
    pub fn from_fn(f: &Embedding, mut g: impl FnMut(&[f64], &mut [f64])) -> Self {
        let d = f.model.dim();
        let mut out = Self::zero(f);
        let (mut p, mut v) = (vec![0.0; d], vec![0.0; d]);
        for j in 0..f.grid.len() {
            f.point_into(j, &mut p);
            v.iter_mut().for_each(|x| *x = 0.0);
            g(&p, &mut v);
            for (col, x) in out.values.iter_mut().zip(&v) {
                col[j] = *x;
            }
        }
        out
    }

    pub fn constant(f: &Embedding, v: &[f64]) -> Result<Self> {
        if v.len() != f.model.dim() {
            return Err(Error::DimensionMismatch { expected: f.model.dim(), got: v.len() });
        }
        Ok(Self::from_fn(f, |_, out| out.copy_from_slice(v)))
    }

    /// `X_h ∘ f`.
    pub fn hamiltonian(f: &Embedding, h: &HamiltonianSpec) -> Result<Self> {
        h.check(&f.model)?;
        Ok(Self::from_fn(f, |p, out| hamiltonian_field_into(h, p, out)))
    }

    /// `Tf ∘ w` for a vector field `w` on `M` given by its components along
    /// each angle.
    pub fn along_parameter(f: &Embedding, w: &[Vec<f64>]) -> Result<Self> {
        if w.len() != f.grid.dim() {
            return Err(Error::DimensionMismatch { expected: f.grid.dim(), got: w.len() });
        }
        if w.iter().any(|c| c.len() != f.grid.len()) {
            return Err(Error::GridMismatch);
        }
        let mut out = Self::zero(f);
        for (axis, wa) in w.iter().enumerate() {
            for (col, dcol) in out.values.iter_mut().zip(&f.derivs[axis]) {
                for j in 0..f.grid.len() {
                    col[j] += wa[j] * dcol[j];
                }
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn at(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|c| c[j]).collect()
    }

    pub(crate) fn at_into(&self, j: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.values) {
            *o = c[j];
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &TangentField, b: f64) -> Result<Self> {
        if self.grid != other.grid || self.dim() != other.dim() {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            .collect();
        Ok(TangentField { grid: self.grid, values })
    }

    pub fn max_abs(&self) -> f64 {
        crate::max_abs(self.values.iter().flatten().copied())
    }
}

/// A differential form on `M`, sampled at the nodes. Components follow the
/// basis `1` (degree 0), `dφ` / `(dφ₁, dφ₂)` (degree 1), `dφ₁∧dφ₂`
/// (degree 2).
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    grid: Grid,
    degree: usize,
    comps: Vec<Vec<f64>>,
}

fn n_components(dim: usize, degree: usize) -> usize {
    match (dim, degree) {
        (_, 0) => 1,
        (1, 1) => 1,
        (2, 1) => 2,
        (2, 2) => 1,
        _ => 0,
    }
}

impl Form {
    pub fn new(grid: Grid, degree: usize, comps: Vec<Vec<f64>>) -> Result<Self> {
        let expected = n_components(grid.dim(), degree);
        if comps.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: comps.len() });
        }
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(Form { grid, degree, comps })
    }

    pub fn function(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 0, vec![values])
    }

    pub fn zero(grid: Grid, degree: usize) -> Self {
        Form { grid, degree, comps: vec![vec![0.0; grid.len()]; n_components(grid.dim(), degree)] }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn max_abs(&self) -> f64 {
        crate::max_abs(self.comps.iter().flatten().copied())
    }

    /// Spectral exterior derivative. A top-degree form maps to the (empty)
    /// zero form of the next degree.
    pub fn d(&self) -> Form {
        let g = self.grid;
        let der = |c: &[f64], axis: usize| crate::spectral::derivative(g, c, axis);
        let comps = match (g.dim(), self.degree) {
            (1, 0) => vec![der(&self.comps[0], 0)],
            (2, 0) => vec![der(&self.comps[0], 0), der(&self.comps[0], 1)],
            (2, 1) => {
                let a = der(&self.comps[1], 0);
                let b = der(&self.comps[0], 1);
                vec![a.iter().zip(&b).map(|(x, y)| x - y).collect()]
            }
            _ => Vec::new(),
        };
        Form { grid: g, degree: self.degree + 1, comps }
    }

    /// `self ∧ other` when the degrees add up to `dim M`; returns the
    /// `dφ` / `dφ₁∧dφ₂` coefficient.
    pub fn wedge_top(&self, other: &Form) -> Result<Vec<f64>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let dim = self.grid.dim();
        if self.degree + other.degree != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.degree + other.degree });
        }
        let n = self.grid.len();
        let out = match (self.degree, other.degree) {
            (0, _) => (0..n).map(|j| self.comps[0][j] * other.comps[0][j]).collect(),
            (_, 0) => (0..n).map(|j| self.comps[0][j] * other.comps[0][j]).collect(),
            _ => (0..n)
                .map(|j| self.comps[0][j] * other.comps[1][j] - self.comps[1][j] * other.comps[0][j])
                .collect(),
        };
        Ok(out)
    }

    /// `∫_M` of a top-degree form.
    pub fn integrate(&self) -> Result<f64> {
        if self.degree != self.grid.dim() {
            return Err(Error::DimensionMismatch { expected: self.grid.dim(), got: self.degree });
        }
        Ok(integrate_top(self.grid, &self.comps[0]))
    }

    /// Periods of a 1-form over the cycle basis; torus periods are averaged
    /// over the transverse angle.
    pub fn periods(&self) -> Result<Vec<f64>> {
        if self.degree != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.degree });
        }
        let n = self.grid.len() as f64;
        Ok(self.comps.iter().map(|c| TAU * c.iter().sum::<f64>() / n).collect())
    }
}

pub(crate) fn integrate_top(grid: Grid, coeff: &[f64]) -> f64 {
    coeff.iter().sum::<f64>() * grid.cell_measure()
}

/// `f*θ` as a 1-form on `M`.
pub fn pullback_theta(f: &Embedding) -> Form {
    let d = f.model.dim();
    let (mut p, mut t) = (vec![0.0; d], vec![0.0; d]);
    let comps = (0..f.grid.dim())
        .map(|axis| {
            (0..f.grid.len())
                .map(|j| {
                    f.point_into(j, &mut p);
                    f.tangent_into(axis, j, &mut t);
                    f.model.theta_unchecked(&p, &t)
                })
                .collect()
        })
        .collect();
    Form { grid: f.grid, degree: 1, comps }
}

/// Periods of `f*θ`: the value of `J_R^ex(f)` on the cycle basis. They all
/// vanish exactly when `f` is exact isotropic.
pub fn theta_periods(f: &Embedding) -> Vec<f64> {
    pullback_theta(f).periods().expect("degree-one form")
}

/// `f*ω`; the empty zero form on the circle.
pub fn pullback_omega(f: &Embedding) -> Form {
    if f.grid.dim() == 1 {
        return Form::zero(f.grid, 2);
    }
    let d = f.model.dim();
    let (mut a, mut b) = (vec![0.0; d], vec![0.0; d]);
    let coeff = (0..f.grid.len())
        .map(|j| {
            f.tangent_into(0, j, &mut a);
            f.tangent_into(1, j, &mut b);
            f.model.omega_unchecked(&a, &b)
        })
        .collect();
    Form { grid: f.grid, degree: 2, comps: vec![coeff] }
}

fn check_measure(f: &Embedding, m: &ModelManifold) -> Result<()> {
    if f.grid != m.grid {
        Err(Error::GridMismatch)
    } else {
        Ok(())
    }
}

/// `ω̄_f(u, v) = ∫_M ω(u, v) μ`.
pub fn wbar(f: &Embedding, u: &TangentField, v: &TangentField, m: &ModelManifold) -> Result<f64> {
    check_measure(f, m)?;
    f.check_compatible(u.grid, u.dim())?;
    f.check_compatible(v.grid, v.dim())?;
    let d = f.model.dim();
    let (mut a, mut b) = (vec![0.0; d], vec![0.0; d]);
    let integrand: Vec<f64> = (0..f.grid.len())
        .map(|j| {
            u.at_into(j, &mut a);
            v.at_into(j, &mut b);
            f.model.omega_unchecked(&a, &b)
        })
        .collect();
    Ok(m.integrate(&integrand))
}

/// `⟨J_L(f), h⟩ = ∫_M (h∘f) μ`.
pub fn jl_pair(f: &Embedding, m: &ModelManifold, h: &HamiltonianSpec) -> Result<f64> {
    check_measure(f, m)?;
    h.check(&f.model)?;
    let d = f.model.dim();
    let mut p = vec![0.0; d];
    let values: Vec<f64> = (0..f.grid.len())
        .map(|j| {
            f.point_into(j, &mut p);
            h.value(&p)
        })
        .collect();
    Ok(m.integrate(&values))
}

/// `ψ(φ)_a = φ_a + shift_a + perturbation_a(φ)`, a degree-one map of the
/// circle or torus.
#[derive(Debug, Clone, PartialEq)]
pub struct Reparametrization {
    pub shift: [f64; 2],
    pub perturbation: [TrigPoly; 2],
}

impl Reparametrization {
    pub fn rotation(shift: [f64; 2]) -> Self {
        Reparametrization { shift, perturbation: [TrigPoly::default(), TrigPoly::default()] }
    }

    pub fn new(shift: [f64; 2], perturbation: [TrigPoly; 2]) -> Self {
        Reparametrization { shift, perturbation }
    }

    pub fn apply(&self, grid: Grid, phi: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for a in 0..grid.dim() {
            out[a] = phi[a] + self.shift[a] + self.perturbation[a].eval(phi);
        }
        out
    }

    /// Jacobian matrix `∂ψ_a/∂φ_b` (row-major 2×2; the circle uses entry 0).
    pub fn jacobian(&self, grid: Grid, phi: [f64; 2]) -> [f64; 4] {
        let mut j = [1.0, 0.0, 0.0, 1.0];
        for a in 0..grid.dim() {
            for b in 0..grid.dim() {
                j[2 * a + b] += self.perturbation[a].derivative(b).eval(phi);
            }
        }
        j
    }

    pub fn determinant(&self, grid: Grid, phi: [f64; 2]) -> f64 {
        let j = self.jacobian(grid, phi);
        if grid.dim() == 1 {
            j[0]
        } else {
            j[0] * j[3] - j[1] * j[2]
        }
    }

    pub(crate) fn check(&self, grid: Grid) -> Result<()> {
        if grid.dim() == 1 && self.perturbation[0].terms.iter().any(|t| t.k[1] != 0) {
            return Err(Error::InvalidArgument("circle reparametrization depends on a second angle"));
        }
        for node in 0..grid.len() {
            let jacobian = self.determinant(grid, grid.node(node));
            if !(jacobian > 0.0) {
                return Err(Error::NotDiffeomorphism { node, jacobian });
            }
        }
        Ok(())
    }
}

/// `f ∘ ψ`, resampled spectrally on the same grid.
pub fn reparametrize(f: &Embedding, psi: &Reparametrization) -> Result<Embedding> {
    psi.check(f.grid)?;
    let n = f.grid.len();
    let mut values = vec![Vec::with_capacity(n); f.model.dim()];
    for j in 0..n {
        let p = f.eval(psi.apply(f.grid, f.grid.node(j)));
        for (col, x) in values.iter_mut().zip(p) {
            col.push(x);
        }
    }
    Embedding::from_samples(f.model, f.grid, values, f.winding.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn t(k: [i32; 2], c: f64, s: f64) -> TrigTerm {
        TrigTerm::new(k, c, s)
    }

    pub(crate) fn planar_circle(n: usize) -> Embedding {
        // (x₁, y₁, x₂, y₂) = (cos φ, 0, sin φ, 0)
        Embedding::from_series(
            AmbientModel::euclidean(2),
            Grid::circle(n),
            &[
                CoordinateSeries::new(vec![t([1, 0], 1.0, 0.0)]),
                CoordinateSeries::default(),
                CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)]),
                CoordinateSeries::default(),
            ],
        )
        .unwrap()
    }

    fn symplectic_circle(n: usize) -> Embedding {
        Embedding::from_series(
            AmbientModel::euclidean(2),
            Grid::circle(n),
            &[
                CoordinateSeries::new(vec![t([1, 0], 1.0, 0.0)]),
                CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)]),
                CoordinateSeries::default(),
                CoordinateSeries::default(),
            ],
        )
        .unwrap()
    }

    fn torus(n: usize, series: [[TrigTerm; 1]; 4]) -> Embedding {
        let s: Vec<CoordinateSeries> = series.iter().map(|c| CoordinateSeries::new(c.to_vec())).collect();
        Embedding::from_series(AmbientModel::euclidean(2), Grid::torus(n), &s).unwrap()
    }

    fn clifford(n: usize) -> Embedding {
        torus(
            n,
            [[t([1, 0], 1.0, 0.0)], [t([1, 0], 0.0, 1.0)], [t([0, 1], 1.0, 0.0)], [t([0, 1], 0.0, 1.0)]],
        )
    }

    #[test]
    fn density_is_normalized_and_positive() {
        let m = ModelManifold::new(Grid::circle(64), TrigPoly::new(vec![t([0, 0], 2.0, 0.0), t([1, 0], 0.5, 0.3)]), 1.7)
            .unwrap();
        assert!((m.integrate(&vec![1.0; 64]) - 1.7).abs() < 1e-13);
        let bad = ModelManifold::new(Grid::circle(64), TrigPoly::new(vec![t([1, 0], 1.0, 0.0)]), 1.0);
        assert!(matches!(bad, Err(Error::DegenerateDensity { .. })));
    }

    #[test]
    fn pullback_theta_examples() {
        assert!(pullback_theta(&planar_circle(64)).max_abs() < 1e-15);
        let r2 = Embedding::from_series(
            AmbientModel::euclidean(1),
            Grid::circle(64),
            &[CoordinateSeries::new(vec![t([1, 0], 1.0, 0.0)]), CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)])],
        )
        .unwrap();
        let a = pullback_theta(&r2);
        for j in 0..64 {
            let phi = Grid::circle(64).node(j)[0];
            assert!((a.components()[0][j] + phi.sin().powi(2)).abs() < 1e-13);
        }
        let ct = pullback_theta(&clifford(16));
        for j in 0..256 {
            let p = Grid::torus(16).node(j);
            assert!((ct.components()[0][j] + p[0].sin().powi(2)).abs() < 1e-13);
            assert!((ct.components()[1][j] + p[1].sin().powi(2)).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_period_examples() {
        let p = theta_periods(&symplectic_circle(256));
        assert!((p[0] + PI).abs() < 1e-13);
        assert!(theta_periods(&planar_circle(256))[0].abs() < 1e-15);
        let p = theta_periods(&clifford(64));
        assert!((p[0] + PI).abs() < 1e-12 && (p[1] + PI).abs() < 1e-12);
    }

    #[test]
    fn pullback_omega_examples() {
        let c = pullback_omega(&planar_circle(32));
        assert_eq!(c.degree(), 2);
        assert!(c.components().is_empty());
        assert!(pullback_omega(&clifford(16)).max_abs() < 1e-13);
        let mixed = torus(
            16,
            [[t([1, 0], 1.0, 0.0)], [t([0, 1], 0.0, 1.0)], [t([1, 0], 0.0, 1.0)], [t([0, 1], 1.0, 0.0)]],
        );
        let w = pullback_omega(&mixed);
        for j in 0..256 {
            let p = Grid::torus(16).node(j);
            assert!((w.components()[0][j] + (p[0] + p[1]).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn wbar_examples() {
        let f = Embedding::from_series(
            AmbientModel::euclidean(1),
            Grid::circle(64),
            &[CoordinateSeries::new(vec![t([1, 0], 2.0, 0.0)]), CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)])],
        )
        .unwrap();
        let m = ModelManifold::new(Grid::circle(64), TrigPoly::new(vec![t([0, 0], 1.0, 0.0), t([2, 0], 0.4, 0.0)]), 2.5)
            .unwrap();
        let dx = TangentField::constant(&f, &[1.0, 0.0]).unwrap();
        let dy = TangentField::constant(&f, &[0.0, 1.0]).unwrap();
        assert!((wbar(&f, &dx, &dy, &m).unwrap() - 2.5).abs() < 1e-13);
        let u = TangentField::from_fn(&f, |p, out| {
            out[0] = p[1] * p[0];
            out[1] = p[0].sin();
        });
        assert!(wbar(&f, &u, &u, &m).unwrap().abs() < 1e-15);
        let other = ModelManifold::uniform(Grid::circle(32), 1.0).unwrap();
        assert_eq!(wbar(&f, &dx, &dy, &other), Err(Error::GridMismatch));
    }

    #[test]
    fn jl_pair_examples() {
        let c = 0.75;
        let f = Embedding::from_series(
            AmbientModel::euclidean(1),
            Grid::circle(128),
            &[
                CoordinateSeries::new(vec![t([0, 0], c, 0.0), t([1, 0], 1.0, 0.0)]),
                CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)]),
            ],
        )
        .unwrap();
        let m = ModelManifold::uniform(Grid::circle(128), 3.0).unwrap();
        let one = HamiltonianSpec::constant(f.model(), 1.0);
        assert!((jl_pair(&f, &m, &one).unwrap() - 3.0).abs() < 1e-13);
        let x = HamiltonianSpec::coordinate(1, 0);
        assert!((jl_pair(&f, &m, &x).unwrap() - 3.0 * c).abs() < 1e-13);
        let rotated = reparametrize(&f, &Reparametrization::rotation([1.234, 0.0])).unwrap();
        let osc = HamiltonianSpec::oscillator(1, 0);
        assert!((jl_pair(&rotated, &m, &osc).unwrap() - jl_pair(&f, &m, &osc).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn reparametrize_examples() {
        let f = symplectic_circle(64);
        let same = reparametrize(&f, &Reparametrization::rotation([0.0, 0.0])).unwrap();
        assert!(same.max_node_distance(&f).unwrap() < 1e-14);
        let half = reparametrize(&f, &Reparametrization::rotation([PI, 0.0])).unwrap();
        for j in 0..64 {
            for i in 0..4 {
                assert!((half.values()[i][j] - f.values()[i][(j + 32) % 64]).abs() < 1e-13);
            }
        }
        let fold = Reparametrization::new([0.0, 0.0], [TrigPoly::new(vec![t([1, 0], 0.0, 2.0)]), TrigPoly::default()]);
        assert!(matches!(reparametrize(&f, &fold), Err(Error::NotDiffeomorphism { .. })));
    }

    #[test]
    fn invalid_embeddings_rejected() {
        let model = AmbientModel::euclidean(1);
        // doubly covered circle is not injective
        let double = Embedding::from_series(
            model,
            Grid::circle(64),
            &[CoordinateSeries::new(vec![t([2, 0], 1.0, 0.0)]), CoordinateSeries::new(vec![t([2, 0], 0.0, 1.0)])],
        );
        assert!(matches!(double, Err(Error::NotInjective { .. })));
        let constant = Embedding::from_series(
            model,
            Grid::circle(64),
            &[CoordinateSeries::new(vec![t([0, 0], 1.0, 0.0)]), CoordinateSeries::default()],
        );
        assert!(matches!(constant, Err(Error::NotImmersed { .. })));
        let winding_on_x = Embedding::from_series(
            model,
            Grid::circle(64),
            &[CoordinateSeries::winding([1, 0], vec![]), CoordinateSeries::default()],
        );
        assert!(matches!(winding_on_x, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn cylinder_graph_loop() {
        // q = φ, p = cos φ
        let f = Embedding::from_series(
            AmbientModel::cotangent_circle(),
            Grid::circle(64),
            &[CoordinateSeries::winding([1, 0], vec![]), CoordinateSeries::new(vec![t([1, 0], 1.0, 0.0)])],
        )
        .unwrap();
        assert!(theta_periods(&f)[0].abs() < 1e-13);
        let e = f.eval([TAU + 0.5, 0.0]);
        assert!((e[0] - TAU - 0.5).abs() < 1e-13);
    }
}
