//! Weighted isotropic submanifolds `(N, ν)` as canonical representatives of
//! the quotient `Emb / Diff_vol(M)`, their tangent vectors `(u_N, dγ)`, and the
//! reduced symplectic form
//!
//! ```text
//! ω₀((u, dγ), (v, dλ)) = ∫ ω(u, v) ν + ∫ (i_u ω)|_TN ∧ λ − ∫ (i_v ω)|_TN ∧ γ
//!                      = ∫ ω(u, v) ν + h_v dγ − h_u dλ
//! ```
//!
//! where `dh_u = (i_u ω)|_TN`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ambient::HamiltonianSpec;
use crate::error::{Error, Result};
use crate::loops::{jl_pair, pullback_omega, wbar, Embedding, Form, ModelManifold, TangentField};
use crate::spectral::{invert_monotone, Grid, Spectrum};

/// Periods below this separate isodrast-tangent directions from leaving ones.
pub const PERIOD_TOLERANCE: f64 = 1e-8;

const IDENTITY_TOLERANCE: f64 = 1e-10;

/// A weighted submanifold `(N, ν)`, held as the canonical embedding that
/// pulls `ν` back to the uniform density of total volume `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSubmanifold {
    rep: Embedding,
    measure: ModelManifold,
    source_params: Vec<[f64; 2]>,
    phase: [f64; 2],
}

impl WeightedSubmanifold {
    /// The canonical embedding.
    pub fn embedding(&self) -> &Embedding {
        &self.rep
    }

    /// `ν` expressed in the canonical parameter (uniform).
    pub fn measure(&self) -> &ModelManifold {
        &self.measure
    }

    pub fn total_volume(&self) -> f64 {
        self.measure.total_volume()
    }

    /// Rotation applied by the phase convention, in the volume-normalized
    /// parameter.
    pub fn phase(&self) -> [f64; 2] {
        self.phase
    }

    /// Parameter values on the source embedding of each canonical node.
    pub fn source_params(&self) -> &[[f64; 2]] {
        &self.source_params
    }

    /// Resamples a field along the source embedding at the canonical nodes.
    pub fn pull_field(&self, v: &TangentField) -> Result<TangentField> {
        let grid = self.rep.grid();
        if v.grid() != grid {
            return Err(Error::GridMismatch);
        }
        let values = v
            .values()
            .iter()
            .map(|c| {
                let s = Spectrum::of(grid, c);
                self.source_params.iter().map(|&p| s.eval(p)).collect()
            })
            .collect();
        TangentField::new(grid, values)
    }
}

/// Parameter values `χ⁻¹(φ' + δ)` of the source embedding at the canonical
/// nodes, where `χ` pushes `μ` to the uniform density.
fn normalizing_inverse(m: &ModelManifold, shift: [f64; 2]) -> Vec<[f64; 2]> {
    let grid = m.grid();
    let a = m.total_volume();
    let targets = (0..grid.len()).map(move |j| {
        let p = grid.node(j);
        [p[0] + shift[0], p[1] + shift[1]]
    });
    if m.is_uniform() {
        return targets.collect();
    }
    let rho = m.density();
    match grid {
        Grid::Circle { .. } => targets
            .map(|t| {
                let g = |x: f64| TAU / a * rho.integral_along(0, [x, 0.0]);
                let dg = |x: f64| TAU / a * rho.eval([x, 0.0]);
                [invert_monotone(g, dg, t[0], t[0]), 0.0]
            })
            .collect(),
        Grid::Torus { .. } => {
            let marginal = rho.integrate_out(1);
            targets
                .map(|t| {
                    let g1 = |x: f64| TAU / a * marginal.integral_along(0, [x, 0.0]);
                    let dg1 = |x: f64| TAU / a * marginal.eval([x, 0.0]);
                    let x1 = invert_monotone(g1, dg1, t[0], t[0]);
                    let m1 = marginal.eval([x1, 0.0]);
                    let g2 = |x: f64| TAU * rho.integral_along(1, [x1, x]) / m1;
                    let dg2 = |x: f64| TAU * rho.eval([x1, x]) / m1;
                    [x1, invert_monotone(g2, dg2, t[1], t[1])]
                })
                .collect()
        }
    }
}

/// Rotation `δ` making the first significant Fourier coefficient of the
/// first coordinate real and positive, ties broken by later coordinates.
fn phase_convention(grid: Grid, spectra: &[Spectrum]) -> [f64; 2] {
    let scale = spectra
        .iter()
        .flat_map(|s| s.coeffs().iter().skip(1).map(|c| c.norm()))
        .fold(0.0, f64::max);
    let threshold = 1e-9 * (1.0 + scale);
    let mut shift = [0.0; 2];
    let n = grid.per_axis();
    for axis in 0..grid.dim() {
        // pure modes along this axis, ordered by coordinate then wavenumber
        let mut candidates: Option<Vec<f64>> = None;
        for s in spectra {
            for k in 1..n / 2 {
                let j = if axis == 0 && grid.dim() == 2 { k * n } else { k };
                let c = s.coeffs()[j];
                if c.norm() <= threshold {
                    continue;
                }
                let kf = k as f64;
                match candidates.as_mut() {
                    None => {
                        let base = -c.arg() / kf;
                        candidates = Some((0..k).map(|i| base + TAU * i as f64 / kf).collect());
                    }
                    Some(list) => {
                        let score = |d: f64| (c * Complex64::from_polar(1.0, kf * d)).re;
                        let best = list.iter().map(|&d| score(d)).fold(f64::NEG_INFINITY, f64::max);
                        list.retain(|&d| score(d) >= best - threshold);
                    }
                }
                if candidates.as_ref().is_some_and(|l| l.len() == 1) {
                    break;
                }
            }
            if candidates.as_ref().is_some_and(|l| l.len() == 1) {
                break;
            }
        }
        if let Some(list) = candidates {
            shift[axis] = crate::wrap_angle(list[0]);
        }
    }
    shift
}

/// Canonical representative of `(f(M), f_*μ)`: reparametrizes so the
/// density is uniform and fixes the rotation by the phase convention.
pub fn canonical_representative(f: &Embedding, m: &ModelManifold) -> Result<WeightedSubmanifold> {
    let grid = f.grid();
    if m.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let min = m.density_samples().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::DegenerateDensity { min });
    }
    let resample = |params: &[[f64; 2]]| -> Result<Embedding> {
        let mut values = vec![Vec::with_capacity(grid.len()); f.model().dim()];
        for &p in params {
            for (col, x) in values.iter_mut().zip(f.eval(p)) {
                col.push(x);
            }
        }
        Embedding::from_samples(*f.model(), grid, values, f.winding().to_vec())
    };
    let unshifted = if m.is_uniform() { f.clone() } else { resample(&normalizing_inverse(m, [0.0; 2]))? };
    let spectra: Vec<Spectrum> = (0..f.model().dim()).map(|i| unshifted.spectrum(i).clone()).collect();
    let phase = phase_convention(grid, &spectra);
    let source_params = normalizing_inverse(m, phase);
    let rep = if phase == [0.0; 2] && m.is_uniform() { unshifted } else { resample(&source_params)? };
    Ok(WeightedSubmanifold {
        rep,
        measure: ModelManifold::uniform(grid, m.total_volume())?,
        source_params,
        phase,
    })
}

/// Pointwise `g`-orthogonal split of a field along `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSplit {
    pub normal: TangentField,
    pub tangential: TangentField,
    /// Components `w` of the tangential part, `v^∥ = Tf ∘ w`, one per angle.
    pub coefficients: Vec<Vec<f64>>,
}

pub fn split_normal_tangential(f: &Embedding, v: &TangentField) -> Result<NormalSplit> {
    if v.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    if v.dim() != f.model().dim() {
        return Err(Error::DimensionMismatch { expected: f.model().dim(), got: v.dim() });
    }
    let grid = f.grid();
    let k = grid.dim();
    let dot = |a: &[Vec<f64>], b: &[Vec<f64>], j: usize| -> f64 { a.iter().zip(b).map(|(x, y)| x[j] * y[j]).sum() };
    let mut coefficients = vec![vec![0.0; grid.len()]; k];
    for j in 0..grid.len() {
        let t0 = f.derivative(0);
        let g00 = dot(t0, t0, j);
        let r0 = dot(t0, v.values(), j);
        if k == 1 {
            if !(g00 > 0.0) {
                return Err(Error::NotImmersed { node: j, value: g00.sqrt() });
            }
            coefficients[0][j] = r0 / g00;
        } else {
            let t1 = f.derivative(1);
            let (g01, g11) = (dot(t0, t1, j), dot(t1, t1, j));
            let r1 = dot(t1, v.values(), j);
            let det = g00 * g11 - g01 * g01;
            if !(det > 1e-24 * (g00 * g11).max(1e-300)) {
                return Err(Error::NotImmersed { node: j, value: det.max(0.0).sqrt() });
            }
            coefficients[0][j] = (g11 * r0 - g01 * r1) / det;
            coefficients[1][j] = (g00 * r1 - g01 * r0) / det;
        }
    }
    let tangential = TangentField::along_parameter(f, &coefficients)?;
    let normal = v.combine(1.0, &tangential, -1.0)?;
    Ok(NormalSplit { normal, tangential, coefficients })
}

/// `(i_u ω)|_TN` pulled back to `M`.
fn contraction_form(f: &Embedding, u: &TangentField) -> Result<Form> {
    if u.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let model = f.model();
    let d = model.dim();
    let (mut a, mut t) = (vec![0.0; d], vec![0.0; d]);
    let comps = (0..grid.dim())
        .map(|axis| {
            (0..grid.len())
                .map(|j| {
                    u.at_into(j, &mut a);
                    for (o, c) in t.iter_mut().zip(f.derivative(axis)) {
                        *o = c[j];
                    }
                    model.omega_unchecked(&a, &t)
                })
                .collect()
        })
        .collect();
    Form::new(grid, 1, comps)
}

/// Zero-mean `h₀` on `N` with `dh₀ = (i_u ω)|_TN`, failing with
/// [`Error::NonHamiltonianDirection`] when the form has a period.
pub fn loop_potential(n: &WeightedSubmanifold, u: &TangentField) -> Result<Vec<f64>> {
    potential_along(&n.rep, u, PERIOD_TOLERANCE)
}

pub fn potential_along(f: &Embedding, u: &TangentField, tolerance: f64) -> Result<Vec<f64>> {
    let beta = contraction_form(f, u)?;
    for (cycle, period) in beta.periods()?.into_iter().enumerate() {
        if !(period.abs() <= tolerance) {
            return Err(Error::NonHamiltonianDirection { cycle, period });
        }
    }
    let grid = f.grid();
    let h = crate::spectral::potential(grid, beta.components());
    let dh = Form::function(grid, h.clone())?.d();
    let scale = 1.0 + beta.max_abs();
    let residual = crate::max_abs(
        dh.components().iter().flatten().zip(beta.components().iter().flatten()).map(|(a, b)| a - b),
    );
    if !(residual <= tolerance * scale) {
        return Err(Error::IdentityViolated { name: "dh = (i_u ω)|TN", residual, tolerance: tolerance * scale });
    }
    Ok(h)
}

/// A tangent vector `(u_N, dγ)` at a weighted submanifold, with the
/// potential `h_{u_N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannTangent {
    normal: TangentField,
    gamma: Form,
    potential: Vec<f64>,
}

impl GrassmannTangent {
    /// Checks that `normal` is `g`-orthogonal to `N` and that `γ` has degree
    /// `dim M − 1`, then computes `h_{u_N}`.
    pub fn new(n: &WeightedSubmanifold, normal: TangentField, gamma: Form) -> Result<Self> {
        let f = &n.rep;
        if gamma.grid() != f.grid() {
            return Err(Error::GridMismatch);
        }
        if gamma.degree() + 1 != f.grid().dim() {
            return Err(Error::DimensionMismatch { expected: f.grid().dim() - 1, got: gamma.degree() });
        }
        let split = split_normal_tangential(f, &normal)?;
        let residual = split.tangential.max_abs();
        let tolerance = IDENTITY_TOLERANCE * (1.0 + normal.max_abs());
        if !(residual <= tolerance) {
            return Err(Error::IdentityViolated { name: "u_N normal to N", residual, tolerance });
        }
        let potential = loop_potential(n, &normal)?;
        Ok(GrassmannTangent { normal, gamma, potential })
    }

    pub fn normal(&self) -> &TangentField {
        &self.normal
    }

    /// The `(k−1)`-form potential `γ` of the density variation `dγ`.
    pub fn gamma(&self) -> &Form {
        &self.gamma
    }

    /// `h_{u_N}` (zero mean).
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }
}

/// `i_w ν` for `ν` uniform of total volume `a`, as a `(k−1)`-form.
fn contract_volume(grid: Grid, density: f64, w: &[Vec<f64>]) -> Result<Form> {
    match grid.dim() {
        1 => Form::function(grid, w[0].iter().map(|x| density * x).collect()),
        _ => Form::new(
            grid,
            1,
            vec![w[1].iter().map(|x| -density * x).collect(), w[0].iter().map(|x| density * x).collect()],
        ),
    }
}

/// Tangent vector at `N` represented by a field along the canonical
/// embedding: `(v^⊥, d(i_{v^∥} ν))`.
pub fn tangent_at(n: &WeightedSubmanifold, v: &TangentField) -> Result<GrassmannTangent> {
    let grid = n.rep.grid();
    let split = split_normal_tangential(&n.rep, v)?;
    let density = n.measure.density_samples()[0];
    let gamma = contract_volume(grid, density, &split.coefficients)?;
    let potential = loop_potential(n, &split.normal)?;
    Ok(GrassmannTangent { normal: split.normal, gamma, potential })
}

/// Image of `v ∘ f` under the differential of `f ↦ (f(M), f_*μ)`.
pub fn project_tangent(f: &Embedding, v: &TangentField, m: &ModelManifold) -> Result<GrassmannTangent> {
    let n = canonical_representative(f, m)?;
    let pulled = n.pull_field(v)?;
    tangent_at(&n, &pulled)
}

/// Both expressions of the reduced form: `(line one, line two)`.
pub fn omega0_lines(n: &WeightedSubmanifold, t1: &GrassmannTangent, t2: &GrassmannTangent) -> Result<(f64, f64)> {
    let f = &n.rep;
    let grid = f.grid();
    for t in [t1, t2] {
        if t.normal.grid() != grid || t.gamma.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    let base = {
        let d = f.model().dim();
        let (mut a, mut b) = (vec![0.0; d], vec![0.0; d]);
        let integrand: Vec<f64> = (0..grid.len())
            .map(|j| {
                t1.normal.at_into(j, &mut a);
                t2.normal.at_into(j, &mut b);
                f.model().omega_unchecked(&a, &b)
            })
            .collect();
        n.measure.integrate(&integrand)
    };
    let beta1 = contraction_form(f, &t1.normal)?;
    let beta2 = contraction_form(f, &t2.normal)?;
    let integral = |form: Vec<f64>| crate::loops::integrate_top(grid, &form);
    let line1 = base + integral(beta1.wedge_top(&t2.gamma)?) - integral(beta2.wedge_top(&t1.gamma)?);
    let h1 = Form::function(grid, t1.potential.clone())?;
    let h2 = Form::function(grid, t2.potential.clone())?;
    let line2 = base + integral(h2.wedge_top(&t1.gamma.d())?) - integral(h1.wedge_top(&t2.gamma.d())?);
    Ok((line1, line2))
}

/// `ω₀` at `(N, ν)`; also checks that both expressions agree.
pub fn omega0(n: &WeightedSubmanifold, t1: &GrassmannTangent, t2: &GrassmannTangent) -> Result<f64> {
    let (line1, line2) = omega0_lines(n, t1, t2)?;
    let tolerance = IDENTITY_TOLERANCE * line1.abs().max(1.0);
    let residual = (line1 - line2).abs();
    if residual > tolerance {
        return Err(Error::IdentityViolated { name: "integration by parts in ω₀", residual, tolerance });
    }
    Ok(line1)
}

/// `ω̄_f(v₁, v₂)` for lifts tangent to the momentum level set; the
/// independent route to `ω₀`.
pub fn omega0_oracle(f: &Embedding, v1: &TangentField, v2: &TangentField, m: &ModelManifold) -> Result<f64> {
    for v in [v1, v2] {
        for period in contraction_form(f, v)?.periods()? {
            if !(period.abs() <= PERIOD_TOLERANCE) {
                return Err(Error::NotLevelSetTangent { derivative: -period });
            }
        }
    }
    wbar(f, v1, v2, m)
}

/// `(dh, dλ) = ∫_L dh ∧ λ`.
pub fn lagrangian_pairing(dh: &Form, lambda: &Form) -> Result<f64> {
    if dh.degree() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: dh.degree() });
    }
    let dim = dh.grid().dim();
    if lambda.degree() + 1 != dim {
        return Err(Error::DimensionMismatch { expected: dim - 1, got: lambda.degree() });
    }
    Ok(crate::loops::integrate_top(dh.grid(), &dh.wedge_top(lambda)?))
}

/// `ω₀` on a Lagrangian `(L, ν)` in the `(dh, dλ)` description, together
/// with the vanishing first term `∫ ω(u₁, u₂) ν` of the general formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianOmega {
    pub value: f64,
    pub first_term: f64,
}

pub fn omega0_lagrangian(
    n: &WeightedSubmanifold,
    t1: &GrassmannTangent,
    t2: &GrassmannTangent,
) -> Result<LagrangianOmega> {
    let f = &n.rep;
    let grid = f.grid();
    if f.model().dim() != 2 * grid.dim() {
        return Err(Error::NotLagrangian { reason: "dim M is not half of dim S" });
    }
    let restricted = pullback_omega(f).max_abs();
    if restricted > IDENTITY_TOLERANCE {
        return Err(Error::NotLagrangian { reason: "ω does not vanish on N" });
    }
    let d = f.model().dim();
    let (mut a, mut b) = (vec![0.0; d], vec![0.0; d]);
    let integrand: Vec<f64> = (0..grid.len())
        .map(|j| {
            t1.normal.at_into(j, &mut a);
            t2.normal.at_into(j, &mut b);
            f.model().omega_unchecked(&a, &b)
        })
        .collect();
    let first_term = n.measure.integrate(&integrand);
    if first_term.abs() > IDENTITY_TOLERANCE {
        return Err(Error::IdentityViolated {
            name: "first term of ω₀ on a Lagrangian",
            residual: first_term.abs(),
            tolerance: IDENTITY_TOLERANCE,
        });
    }
    let dh1 = Form::function(grid, t1.potential.clone())?.d();
    let dh2 = Form::function(grid, t2.potential.clone())?.d();
    let value = lagrangian_pairing(&dh1, &t2.gamma)? - lagrangian_pairing(&dh2, &t1.gamma)?;
    Ok(LagrangianOmega { value, first_term })
}

/// `⟨J̄_L(N, ν), h⟩ = ∫_N h ν`.
pub fn coadjoint_functional(n: &WeightedSubmanifold, h: &HamiltonianSpec) -> Result<f64> {
    jl_pair(&n.rep, &n.measure, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientModel;
    use crate::loops::{reparametrize, CoordinateSeries, Reparametrization};
    use crate::spectral::{TrigPoly, TrigTerm};
    use core::f64::consts::PI;

    fn t(k: [i32; 2], c: f64, s: f64) -> TrigTerm {
        TrigTerm::new(k, c, s)
    }

    fn planar_circle(n: usize) -> Embedding {
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

    fn unit(f: &Embedding, i: usize) -> TangentField {
        let mut v = vec![0.0; f.model().dim()];
        v[i] = 1.0;
        TangentField::constant(f, &v).unwrap()
    }

    #[test]
    fn canonical_representative_of_uniform_circle_is_unchanged() {
        let f = planar_circle(64);
        let m = ModelManifold::uniform(Grid::circle(64), 1.0).unwrap();
        let n = canonical_representative(&f, &m).unwrap();
        assert!(n.embedding().max_node_distance(&f).unwrap() < 1e-14);
        assert!((n.measure().integrate(&vec![1.0; 64]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_representative_removes_rotation() {
        let f = planar_circle(64);
        let m = ModelManifold::uniform(Grid::circle(64), 2.0).unwrap();
        let g = reparametrize(&f, &Reparametrization::rotation([0.9, 0.0])).unwrap();
        let a = canonical_representative(&f, &m).unwrap();
        let b = canonical_representative(&g, &m).unwrap();
        assert!(a.embedding().max_node_distance(b.embedding()).unwrap() < 1e-12);
    }

    #[test]
    fn canonical_representative_removes_density() {
        let grid = Grid::circle(128);
        let f = planar_circle(128);
        let psi = Reparametrization::new([0.0, 0.0], [TrigPoly::new(vec![t([1, 0], 0.0, 0.3)]), TrigPoly::default()]);
        let g = reparametrize(&f, &psi).unwrap();
        // ψ*μ for uniform μ: density 1 + 0.3 cos φ
        let pulled = ModelManifold::new(grid, TrigPoly::new(vec![t([0, 0], 1.0, 0.0), t([1, 0], 0.3, 0.0)]), 1.0).unwrap();
        let plain = ModelManifold::uniform(grid, 1.0).unwrap();
        let a = canonical_representative(&f, &plain).unwrap();
        let b = canonical_representative(&g, &pulled).unwrap();
        assert!(a.embedding().max_node_distance(b.embedding()).unwrap() < 1e-8);
    }

    #[test]
    fn split_examples() {
        let f = planar_circle(64);
        let w = vec![(0..64).map(|j| (Grid::circle(64).node(j)[0]).cos() + 2.0).collect()];
        let v = TangentField::along_parameter(&f, &w).unwrap();
        let s = split_normal_tangential(&f, &v).unwrap();
        assert!(s.normal.max_abs() < 1e-13);
        let dy1 = unit(&f, 1);
        let s = split_normal_tangential(&f, &dy1).unwrap();
        assert!(s.tangential.max_abs() < 1e-15);
        let mixed = TangentField::from_fn(&f, |p, out| {
            out[0] = p[2];
            out[1] = 1.0;
            out[3] = p[0] * p[2];
        });
        let s = split_normal_tangential(&f, &mixed).unwrap();
        let back = s.normal.combine(1.0, &s.tangential, 1.0).unwrap();
        assert!(back.combine(1.0, &mixed, -1.0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn loop_potential_examples() {
        let grid = Grid::circle(64);
        let f = planar_circle(64);
        let n = canonical_representative(&f, &ModelManifold::uniform(grid, 1.0).unwrap()).unwrap();
        let h = loop_potential(&n, &unit(&f, 1)).unwrap();
        for j in 0..64 {
            assert!((h[j] + grid.node(j)[0].cos()).abs() < 1e-13);
        }
        // ∂x₁ is tangent-ish: (i ω)|TN = ω(∂x₁, f') = f'_{y₁} = 0
        let h = loop_potential(&n, &unit(&f, 0)).unwrap();
        assert!(crate::max_abs(h) < 1e-15);
        let sym = Embedding::from_series(
            AmbientModel::euclidean(2),
            grid,
            &[
                CoordinateSeries::new(vec![t([1, 0], 1.0, 0.0)]),
                CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)]),
                CoordinateSeries::default(),
                CoordinateSeries::default(),
            ],
        )
        .unwrap();
        let ns = canonical_representative(&sym, &ModelManifold::uniform(grid, 1.0).unwrap()).unwrap();
        let radial = TangentField::from_fn(&sym, |p, out| {
            out[0] = p[0];
            out[1] = p[1];
        });
        match loop_potential(&ns, &radial) {
            Err(Error::NonHamiltonianDirection { cycle: 0, period }) => assert!((period - TAU).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn project_tangent_examples() {
        let grid = Grid::circle(64);
        let f = planar_circle(64);
        let m = ModelManifold::uniform(grid, 1.0).unwrap();
        let t1 = project_tangent(&f, &unit(&f, 1), &m).unwrap();
        assert!(t1.gamma().max_abs() < 1e-15);
        for j in 0..64 {
            assert!((t1.potential()[j] + grid.node(j)[0].cos()).abs() < 1e-13);
        }
        let w: Vec<f64> = (0..64).map(|j| grid.node(j)[0].sin()).collect();
        let v = TangentField::along_parameter(&f, &[w.clone()]).unwrap();
        let t2 = project_tangent(&f, &v, &m).unwrap();
        assert!(t2.normal().max_abs() < 1e-13);
        for j in 0..64 {
            assert!((t2.gamma().components()[0][j] - w[j] / TAU).abs() < 1e-13);
        }
    }

    #[test]
    fn omega0_worked_value() {
        let grid = Grid::circle(256);
        let f = planar_circle(256);
        let n = canonical_representative(&f, &ModelManifold::uniform(grid, 1.0).unwrap()).unwrap();
        let t1 = GrassmannTangent::new(&n, unit(&f, 1), Form::zero(grid, 0)).unwrap();
        let lambda: Vec<f64> = (0..256).map(|j| grid.node(j)[0].sin()).collect();
        let t2 = GrassmannTangent::new(&n, unit(&f, 3), Form::function(grid, lambda).unwrap()).unwrap();
        let (l1, l2) = omega0_lines(&n, &t1, &t2).unwrap();
        assert!((l1 - PI).abs() < 1e-12);
        assert!((l2 - PI).abs() < 1e-12);
        assert!(omega0(&n, &t1, &t1).unwrap().abs() < 1e-15);
        // constant normal translations with γ = λ = 0
        let a = GrassmannTangent::new(&n, unit(&f, 1), Form::zero(grid, 0)).unwrap();
        let b = GrassmannTangent::new(&n, TangentField::constant(&f, &[0.0, 0.0, 0.0, 1.0]).unwrap(), Form::zero(grid, 0));
        assert!((omega0(&n, &a, &b.unwrap()).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn normality_is_enforced() {
        let grid = Grid::circle(32);
        let f = planar_circle(32);
        let n = canonical_representative(&f, &ModelManifold::uniform(grid, 1.0).unwrap()).unwrap();
        let r = GrassmannTangent::new(&n, unit(&f, 0), Form::zero(grid, 0));
        assert!(matches!(r, Err(Error::IdentityViolated { .. })));
    }

    #[test]
    fn lagrangian_pairing_examples() {
        let grid = Grid::circle(128);
        let h: Vec<f64> = (0..128).map(|j| grid.node(j)[0].sin()).collect();
        let lam: Vec<f64> = (0..128).map(|j| grid.node(j)[0].cos()).collect();
        let dh = Form::function(grid, h).unwrap().d();
        let v = lagrangian_pairing(&dh, &Form::function(grid, lam).unwrap()).unwrap();
        assert!((v - PI).abs() < 1e-13);
        let c = lagrangian_pairing(&dh, &Form::function(grid, vec![2.0; 128]).unwrap()).unwrap();
        assert!(c.abs() < 1e-13);
        assert!(lagrangian_pairing(&dh, &dh).is_err());
    }

    #[test]
    fn coadjoint_functional_separates_centers() {
        let grid = Grid::circle(64);
        let m = ModelManifold::uniform(grid, 1.5).unwrap();
        let circle = |c: f64| {
            Embedding::from_series(
                AmbientModel::euclidean(1),
                grid,
                &[
                    CoordinateSeries::new(vec![t([0, 0], c, 0.0), t([1, 0], 1.0, 0.0)]),
                    CoordinateSeries::new(vec![t([1, 0], 0.0, 1.0)]),
                ],
            )
            .unwrap()
        };
        let x = HamiltonianSpec::coordinate(1, 0);
        let a = canonical_representative(&circle(0.0), &m).unwrap();
        let b = canonical_representative(&circle(0.5), &m).unwrap();
        let (va, vb) = (coadjoint_functional(&a, &x).unwrap(), coadjoint_functional(&b, &x).unwrap());
        assert!(va.abs() < 1e-14 && (vb - 0.75).abs() < 1e-13);
    }
}
