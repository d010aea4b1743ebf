//! Horizontal lifts to `P = S × S¹` with `α = dt − θ`, the averaged
//! connection `ᾱ(v_F) = ∫ α(v_F) μ`, parallel transport over paths of weighted
//! submanifolds, Berry holonomy, and its reading in the quotient `P/ℤ_a`.
//!
//! Holonomy orientation: the reported angle is minus the accumulated fiber
//! displacement, so that a positively oriented parameter square with positive
//! `ω₀`-flux gives a positive angle.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ambient::{hamiltonian_field_into, HamiltonianSpec};
use crate::error::{Error, Result};
use crate::grassmann::{
    canonical_representative, coadjoint_functional, omega0, tangent_at, WeightedSubmanifold, PERIOD_TOLERANCE,
};
use crate::loops::{pullback_theta, Embedding, Form, ModelManifold, TangentField};

const HORIZONTAL_TOLERANCE: f64 = 1e-10;

/// Lift `F = (f, h + z)` of an exact isotropic embedding with `F*α = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalEmbedding {
    base: Embedding,
    phase: Vec<f64>,
    offset: f64,
}

impl HorizontalEmbedding {
    /// Wraps given fiber values `h`, checking `dh = f*θ`.
    pub fn new(base: Embedding, phase: Vec<f64>, offset: f64) -> Result<Self> {
        if phase.len() != base.grid().len() {
            return Err(Error::GridMismatch);
        }
        let lift = HorizontalEmbedding { base, phase, offset };
        let residual = lift.horizontality_residual();
        if !(residual <= HORIZONTAL_TOLERANCE) {
            return Err(Error::IdentityViolated { name: "F*α = 0", residual, tolerance: HORIZONTAL_TOLERANCE });
        }
        Ok(lift)
    }

    /// `p ∘ F`.
    pub fn base(&self) -> &Embedding {
        &self.base
    }

    /// `h` at the nodes, without the global offset.
    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        HorizontalEmbedding { offset, ..self.clone() }
    }

    /// Fiber coordinate `t = h + z` at node `j`.
    pub fn fiber(&self, j: usize) -> f64 {
        self.phase[j] + self.offset
    }

    /// `g = e^{i(h + z)}` at the nodes.
    pub fn phase_function(&self) -> Vec<Complex64> {
        self.phase.iter().map(|h| Complex64::from_polar(1.0, h + self.offset)).collect()
    }

    /// Largest component of `F*α = dh − f*θ` over the nodes.
    pub fn horizontality_residual(&self) -> f64 {
        let grid = self.base.grid();
        let dh = Form::function(grid, self.phase.clone()).expect("phase matches the grid").d();
        let theta = pullback_theta(&self.base);
        crate::max_abs(
            dh.components()
                .iter()
                .flatten()
                .zip(theta.components().iter().flatten())
                .map(|(a, b)| a - b),
        )
    }
}

/// Horizontal lift with `h` vanishing at node 0 and unit global phase.
pub fn horizontal_lift(f: &Embedding) -> Result<HorizontalEmbedding> {
    horizontal_lift_from(f, 0, 0.0)
}

/// Horizontal lift with `h(basepoint) = 0` and global phase `e^{i offset}`.
pub fn horizontal_lift_from(f: &Embedding, basepoint: usize, offset: f64) -> Result<HorizontalEmbedding> {
    let grid = f.grid();
    if basepoint >= grid.len() {
        return Err(Error::InvalidArgument("basepoint outside the grid"));
    }
    let theta = pullback_theta(f);
    for (cycle, period) in theta.periods()?.into_iter().enumerate() {
        if !(period.abs() <= PERIOD_TOLERANCE) {
            return Err(Error::NonExactLoop { cycle, period });
        }
    }
    let mut h = crate::spectral::potential(grid, theta.components());
    let h0 = h[basepoint];
    h.iter_mut().for_each(|x| *x -= h0);
    HorizontalEmbedding::new(f.clone(), h, offset)
}

/// Largest deviation of `g₁/g₂` from its mean; zero when two lifts of the
/// same embedding differ by a constant phase.
pub fn phase_ratio_deviation(a: &HorizontalEmbedding, b: &HorizontalEmbedding) -> Result<f64> {
    if a.base.max_node_distance(&b.base)? > 1e-12 {
        return Err(Error::InvalidArgument("lifts of different embeddings"));
    }
    let ratio: Vec<Complex64> = a.phase_function().iter().zip(b.phase_function()).map(|(x, y)| x / y).collect();
    let mean = ratio.iter().sum::<Complex64>() / ratio.len() as f64;
    Ok(ratio.iter().fold(0.0, |m: f64, r| m.max((r - mean).norm())))
}

/// A vector field on `P` along a lift: spatial part plus fiber component.
#[derive(Debug, Clone, PartialEq)]
pub struct PrequantumTangent {
    pub spatial: TangentField,
    pub fiber: Vec<f64>,
}

impl PrequantumTangent {
    pub fn vertical(f: &HorizontalEmbedding, c: f64) -> Self {
        PrequantumTangent { spatial: TangentField::zero(&f.base), fiber: vec![c; f.base.grid().len()] }
    }

    /// `E ∘ F`, the infinitesimal generator of the circle action.
    pub fn generator(f: &HorizontalEmbedding) -> Self {
        Self::vertical(f, 1.0)
    }

    /// `ξ_h ∘ F = (X_h, θ(X_h) − h)`.
    pub fn quantomorphism(f: &HorizontalEmbedding, h: &HamiltonianSpec) -> Result<Self> {
        let base = &f.base;
        let spatial = TangentField::hamiltonian(base, h)?;
        let model = base.model();
        let d = model.dim();
        let (mut p, mut x) = (vec![0.0; d], vec![0.0; d]);
        let fiber = (0..base.grid().len())
            .map(|j| {
                base.point_into(j, &mut p);
                hamiltonian_field_into(h, &p, &mut x);
                model.theta_unchecked(&p, &x) - h.value(&p)
            })
            .collect();
        Ok(PrequantumTangent { spatial, fiber })
    }
}

/// `ᾱ(v_F) = ∫ (v_t − θ(v_S)) μ`.
pub fn alpha_bar(f: &HorizontalEmbedding, v: &PrequantumTangent, m: &ModelManifold) -> Result<f64> {
    let base = &f.base;
    let grid = base.grid();
    if m.grid() != grid || v.spatial.grid() != grid || v.fiber.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    base.check_compatible(grid, v.spatial.dim())?;
    let d = base.model().dim();
    let (mut p, mut x) = (vec![0.0; d], vec![0.0; d]);
    let integrand: Vec<f64> = (0..grid.len())
        .map(|j| {
            base.point_into(j, &mut p);
            v.spatial.at_into(j, &mut x);
            v.fiber[j] - base.model().theta_unchecked(&p, &x)
        })
        .collect();
    Ok(m.integrate(&integrand))
}

/// `α₀` on the generator `ξ_h`: `∫_N h ν`, checked against `−ᾱ(ξ_h ∘ F)`
/// on the horizontal lift.
pub fn alpha0_on_generator(n: &WeightedSubmanifold, h: &HamiltonianSpec) -> Result<f64> {
    let value = coadjoint_functional(n, h)?;
    let lift = horizontal_lift(n.embedding())?;
    let xi = PrequantumTangent::quantomorphism(&lift, h)?;
    let lifted = -alpha_bar(&lift, &xi, n.measure())?;
    let tolerance = 1e-10 * value.abs().max(1.0);
    let residual = (value - lifted).abs();
    if residual > tolerance {
        return Err(Error::IdentityViolated { name: "α₀(ξ_h) = −ᾱ(ξ_h∘F)", residual, tolerance });
    }
    Ok(value)
}

/// Default bound on the node-wise jump between consecutive path samples.
pub const DEFAULT_MAX_JUMP: f64 = 0.25;
/// Canonical representatives closer than this are the same point of the
/// Grassmannian.
pub const CLOSURE_TOLERANCE: f64 = 1e-8;

/// Time-sampled weighted submanifolds, each held canonically.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPath {
    times: Vec<f64>,
    samples: Vec<WeightedSubmanifold>,
    closed: bool,
}

impl GrassmannPath {
    pub fn new(times: Vec<f64>, embeddings: &[Embedding], m: &ModelManifold) -> Result<Self> {
        let samples = embeddings.iter().map(|f| canonical_representative(f, m)).collect::<Result<Vec<_>>>()?;
        Self::from_samples(times, samples, DEFAULT_MAX_JUMP)
    }

    pub fn from_samples(times: Vec<f64>, samples: Vec<WeightedSubmanifold>, max_jump: f64) -> Result<Self> {
        if samples.is_empty() || times.len() != samples.len() {
            return Err(Error::InvalidArgument("a path needs one time per sample and at least one sample"));
        }
        for (index, pair) in samples.windows(2).enumerate() {
            if (pair[0].total_volume() - pair[1].total_volume()).abs() > 1e-12 * pair[0].total_volume() {
                return Err(Error::InvalidArgument("total volume changes along the path"));
            }
            let jump = pair[0].embedding().max_node_distance(pair[1].embedding())?;
            if !(jump <= max_jump) {
                return Err(Error::DiscontinuousPath { index: index + 1, jump });
            }
        }
        let first = samples[0].embedding();
        let closed = samples.len() > 1
            && first.max_node_distance(samples[samples.len() - 1].embedding())? <= CLOSURE_TOLERANCE;
        Ok(GrassmannPath { times, samples, closed })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[WeightedSubmanifold] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Distance between the canonical representatives at the two ends.
    pub fn closure_gap(&self) -> Result<f64> {
        self.samples[0].embedding().max_node_distance(self.samples[self.samples.len() - 1].embedding())
    }

    pub fn total_volume(&self) -> f64 {
        self.samples[0].total_volume()
    }

    /// The same samples traversed backwards, times mirrored.
    pub fn reversed(&self) -> Self {
        let end = self.times[self.times.len() - 1];
        GrassmannPath {
            times: self.times.iter().rev().map(|t| end - t).collect(),
            samples: self.samples.iter().rev().cloned().collect(),
            closed: self.closed,
        }
    }

    /// `self` followed by `next`, which must start where `self` ends.
    pub fn concat(&self, next: &GrassmannPath) -> Result<Self> {
        let gap = self.samples[self.samples.len() - 1].embedding().max_node_distance(next.samples[0].embedding())?;
        if gap > CLOSURE_TOLERANCE {
            return Err(Error::DiscontinuousPath { index: self.samples.len(), jump: gap });
        }
        let end = self.times[self.times.len() - 1];
        let start = next.times[0];
        let mut times = self.times.clone();
        times.extend(next.times.iter().skip(1).map(|t| end + t - start));
        let mut samples = self.samples.clone();
        samples.extend(next.samples.iter().skip(1).cloned());
        Self::from_samples(times, samples, f64::INFINITY)
    }
}

/// Global fiber phase `ζ(t)` of the horizontal transport of `F₀` along the
/// path (basepoint phase of the lift at each sample).
#[derive(Debug, Clone, PartialEq)]
pub struct TransportHistory {
    pub times: Vec<f64>,
    pub phase: Vec<f64>,
}

impl TransportHistory {
    /// `ζ(T) − ζ(0)`.
    pub fn displacement(&self) -> f64 {
        self.phase[self.phase.len() - 1] - self.phase[0]
    }
}

/// Parallel transport: at each step the sample is lifted horizontally and
/// the global phase advances so that `ᾱ` of the discrete velocity vanishes
/// (midpoint rule in time).
pub fn transport(path: &GrassmannPath, initial: &HorizontalEmbedding) -> Result<TransportHistory> {
    let first = &path.samples[0];
    if initial.base.max_node_distance(first.embedding())? > CLOSURE_TOLERANCE {
        return Err(Error::InvalidArgument("initial lift does not cover the first sample"));
    }
    let a = first.total_volume();
    let mut zeta = initial.fiber(0);
    let mut phase = vec![zeta];
    let mut prev = horizontal_lift(first.embedding())?;
    for next_sample in &path.samples[1..] {
        let next = horizontal_lift(next_sample.embedding())?;
        zeta += step_phase(&prev, &next, next_sample.measure(), a);
        phase.push(zeta);
        prev = next;
    }
    Ok(TransportHistory { times: path.times.clone(), phase })
}

/// `(1/a) [∫ θ_{f_mid}(f₁ − f₀) μ − ∫ (h₁ − h₀) μ]`.
fn step_phase(prev: &HorizontalEmbedding, next: &HorizontalEmbedding, m: &ModelManifold, a: f64) -> f64 {
    let model = *prev.base.model();
    let d = model.dim();
    let (mut p, mut q, mut diff, mut mid) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let integrand: Vec<f64> = (0..prev.base.grid().len())
        .map(|j| {
            prev.base.point_into(j, &mut p);
            next.base.point_into(j, &mut q);
            model.displacement(&p, &q, &mut diff);
            for i in 0..d {
                mid[i] = p[i] + 0.5 * diff[i];
            }
            model.theta_unchecked(&mid, &diff) - (next.phase[j] - prev.phase[j])
        })
        .collect();
    m.integrate(&integrand) / a
}

/// Holonomy of a closed path: the oriented angle in `(−π, π]` and the raw
/// fiber displacement it was read from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holonomy {
    pub angle: f64,
    pub fiber_displacement: f64,
}

pub fn berry_holonomy(path: &GrassmannPath) -> Result<Holonomy> {
    if !path.closed {
        return Err(Error::OpenPath { distance: path.closure_gap()? });
    }
    let lift = horizontal_lift(path.samples[0].embedding())?;
    let fiber_displacement = transport(path, &lift)?.displacement();
    Ok(Holonomy { angle: crate::wrap_angle(-fiber_displacement), fiber_displacement })
}

/// Holonomy read in `P/ℤ_a`: the fiber displacement is taken modulo the
/// quotient fiber `2π/a` and scaled by `a`.
pub fn quotient_holonomy(displacement: f64, a: f64) -> Result<f64> {
    if !(a >= 1.0) || a.fract() != 0.0 || !a.is_finite() {
        return Err(Error::NonIntegerVolume { value: a });
    }
    let fiber = TAU / a;
    let mut r = displacement % fiber;
    if r < 0.0 {
        r += fiber;
    }
    Ok(crate::wrap_angle(a * r))
}

/// Node-wise central difference `(F(p + δ e) − F(p − δ e)) / 2δ` of a
/// parametrized family, as a field along `F(p)`.
pub fn family_tangent<F>(family: &F, at: [f64; 2], axis: usize, delta: f64) -> Result<TangentField>
where
    F: Fn([f64; 2]) -> Result<Embedding>,
{
    let mut plus = at;
    let mut minus = at;
    plus[axis] += delta;
    minus[axis] -= delta;
    let (a, b) = (family(plus)?, family(minus)?);
    a.check_compatible(b.grid(), b.model().dim())?;
    let model = *a.model();
    let d = model.dim();
    let (mut p, mut q, mut diff) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut values = vec![Vec::with_capacity(a.grid().len()); d];
    for j in 0..a.grid().len() {
        a.point_into(j, &mut p);
        b.point_into(j, &mut q);
        model.displacement(&q, &p, &mut diff);
        for (col, x) in values.iter_mut().zip(&diff) {
            col.push(x / (2.0 * delta));
        }
    }
    TangentField::new(a.grid(), values)
}

/// Step used by [`family_tangent`] inside the flux oracle.
pub const FAMILY_DELTA: f64 = 1e-5;

/// `ω₀` on the projected tangents `(∂₁F, ∂₂F)` at one parameter value.
pub fn family_omega0<F>(family: &F, m: &ModelManifold, at: [f64; 2]) -> Result<f64>
where
    F: Fn([f64; 2]) -> Result<Embedding>,
{
    let f = family(at)?;
    let n = canonical_representative(&f, m)?;
    let u = family_tangent(family, at, 0, FAMILY_DELTA)?;
    let v = family_tangent(family, at, 1, FAMILY_DELTA)?;
    let tu = tangent_at(&n, &n.pull_field(&u)?)?;
    let tv = tangent_at(&n, &n.pull_field(&v)?)?;
    omega0(&n, &tu, &tv)
}

/// Midpoint Riemann sum of `ω₀(∂₁F, ∂₂F)` over `[s, s+ε] × [t, t+ε]`.
pub fn flux_oracle<F>(family: &F, m: &ModelManifold, corner: [f64; 2], eps: f64, cells: usize) -> Result<f64>
where
    F: Fn([f64; 2]) -> Result<Embedding>,
{
    if cells == 0 {
        return Err(Error::InvalidArgument("at least one cell is required"));
    }
    let h = eps / cells as f64;
    let mut total = 0.0;
    for i in 0..cells {
        for k in 0..cells {
            let at = [corner[0] + (i as f64 + 0.5) * h, corner[1] + (k as f64 + 0.5) * h];
            total += family_omega0(family, m, at)?;
        }
    }
    Ok(total * h * h)
}

/// The counterclockwise square `(s,t) → (s+ε,t) → (s+ε,t+ε) → (s,t+ε) → (s,t)`
/// of a family, `steps` samples per side.
pub fn square_loop<F>(family: &F, m: &ModelManifold, corner: [f64; 2], eps: f64, steps: usize) -> Result<GrassmannPath>
where
    F: Fn([f64; 2]) -> Result<Embedding>,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step per side is required"));
    }
    let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
    let mut times = Vec::with_capacity(4 * steps + 1);
    let mut embeddings = Vec::with_capacity(4 * steps + 1);
    for side in 0..4 {
        let (a, b) = (corners[side], corners[side + 1]);
        let first = if side == 0 { 0 } else { 1 };
        for i in first..=steps {
            let r = i as f64 / steps as f64;
            let at = [
                corner[0] + eps * (a[0] + r * (b[0] - a[0])),
                corner[1] + eps * (a[1] + r * (b[1] - a[1])),
            ];
            times.push(eps * (side as f64 + r));
            embeddings.push(family(at)?);
        }
    }
    GrassmannPath::new(times, &embeddings, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{AmbientModel, Monomial};
    use crate::loops::CoordinateSeries;
    use crate::spectral::{Grid, TrigTerm};
    use core::f64::consts::PI;

    fn t(k: [i32; 2], c: f64, s: f64) -> TrigTerm {
        TrigTerm::new(k, c, s)
    }

    fn circle_in(n: usize, axes: [usize; 2], center: [f64; 4]) -> Result<Embedding> {
        let mut series: Vec<CoordinateSeries> =
            center.iter().map(|&c| CoordinateSeries::new(vec![t([0, 0], c, 0.0)])).collect();
        series[axes[0]].terms.push(t([1, 0], 1.0, 0.0));
        series[axes[1]].terms.push(t([1, 0], 0.0, 1.0));
        Embedding::from_series(AmbientModel::euclidean(2), Grid::circle(n), &series)
    }

    #[test]
    fn lift_examples() {
        let f = circle_in(64, [0, 2], [0.0; 4]).unwrap();
        let lift = horizontal_lift(&f).unwrap();
        assert!(crate::max_abs(lift.phase().iter().copied()) < 1e-15);
        assert_eq!(lift.base(), &f);
        let disc = circle_in(64, [0, 1], [0.0; 4]).unwrap();
        match horizontal_lift(&disc) {
            Err(Error::NonExactLoop { cycle: 0, period }) => assert!((period + PI).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cylinder_graph_lift() {
        let grid = Grid::circle(64);
        // p = h'(q) with h = 0.4 sin q + 0.1 cos 2q
        let f = Embedding::from_series(
            AmbientModel::cotangent_circle(),
            grid,
            &[
                CoordinateSeries::winding([1, 0], vec![]),
                CoordinateSeries::new(vec![t([1, 0], 0.4, 0.0), t([2, 0], 0.0, -0.2)]),
            ],
        )
        .unwrap();
        let lift = horizontal_lift(&f).unwrap();
        let h = |q: f64| 0.4 * q.sin() + 0.1 * (2.0 * q).cos();
        for j in 0..64 {
            let q = grid.node(j)[0];
            assert!((lift.phase()[j] - (h(q) - h(0.0))).abs() < 1e-13);
        }
        assert!(lift.horizontality_residual() < 1e-12);
    }

    #[test]
    fn lifts_differ_by_constant_phase() {
        let f = circle_in(64, [0, 2], [0.0, 0.3, 0.0, -0.2]).unwrap();
        let a = horizontal_lift(&f).unwrap();
        let b = horizontal_lift_from(&f, 17, 1.3).unwrap();
        assert!(phase_ratio_deviation(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn alpha_bar_examples() {
        let grid = Grid::circle(64);
        let f = circle_in(64, [0, 2], [0.0; 4]).unwrap();
        let lift = horizontal_lift(&f).unwrap();
        for a in [1.0, 2.5] {
            let m = ModelManifold::uniform(grid, a).unwrap();
            let v = alpha_bar(&lift, &PrequantumTangent::generator(&lift), &m).unwrap();
            assert!((v - a).abs() < 1e-13);
        }
        let m = ModelManifold::uniform(grid, 1.0).unwrap();
        let w: Vec<f64> = (0..64).map(|j| grid.node(j)[0].cos()).collect();
        let spatial = TangentField::along_parameter(&f, &[w]).unwrap();
        let v = PrequantumTangent { spatial, fiber: vec![0.0; 64] };
        assert!(alpha_bar(&lift, &v, &m).unwrap().abs() < 1e-15);
    }

    #[test]
    fn alpha0_examples() {
        let grid = Grid::circle(64);
        let f = circle_in(64, [0, 2], [0.2, 0.1, 0.0, 0.0]).unwrap();
        let m = ModelManifold::uniform(grid, 1.0).unwrap();
        let n = canonical_representative(&f, &m).unwrap();
        let one = HamiltonianSpec::constant(f.model(), 1.0);
        assert!((alpha0_on_generator(&n, &one).unwrap() - 1.0).abs() < 1e-14);
        let h = HamiltonianSpec::Polynomial(vec![
            Monomial { coeff: 0.7, powers: vec![1, 1, 0, 0] },
            Monomial { coeff: -0.3, powers: vec![0, 0, 2, 1] },
        ]);
        let v = alpha0_on_generator(&n, &h).unwrap();
        assert_eq!(v, coadjoint_functional(&n, &h).unwrap());
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient_holonomy(0.4, 1.0).unwrap(), 0.4);
        assert_eq!(quotient_holonomy(PI, 2.0).unwrap(), 0.0);
        assert_eq!(quotient_holonomy(TAU / 3.0, 3.0).unwrap(), 0.0);
        assert!(matches!(quotient_holonomy(0.1, 1.5), Err(Error::NonIntegerVolume { .. })));
        assert!(matches!(quotient_holonomy(0.1, 0.0), Err(Error::NonIntegerVolume { .. })));
    }

    fn translation_family(p: [f64; 2]) -> Result<Embedding> {
        circle_in(64, [0, 2], [p[0], p[1], 0.0, 0.0])
    }

    #[test]
    fn translation_square_holonomy() {
        let grid = Grid::circle(64);
        for a in [1.0, 2.0] {
            let m = ModelManifold::uniform(grid, a).unwrap();
            let eps = 0.1;
            let path = square_loop(&translation_family, &m, [0.0, 0.0], eps, 4).unwrap();
            assert!(path.is_closed());
            let hol = berry_holonomy(&path).unwrap();
            // the raw angle is flux / a; the ℤ_a reading recovers the flux
            assert!((hol.angle - eps * eps).abs() < 1e-12, "{}", hol.angle);
            let quotient = quotient_holonomy(hol.angle, a).unwrap();
            assert!((quotient - a * eps * eps).abs() < 1e-12);
            let flux = flux_oracle(&translation_family, &m, [0.0, 0.0], eps, 2).unwrap();
            assert!((flux - a * eps * eps).abs() < 1e-9);
            let back = berry_holonomy(&path.reversed()).unwrap();
            assert!((back.angle + hol.angle).abs() < 1e-13);
            let twice = berry_holonomy(&path.concat(&path).unwrap()).unwrap();
            assert!((twice.angle - 2.0 * hol.angle).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_and_degenerate_paths() {
        let grid = Grid::circle(32);
        let m = ModelManifold::uniform(grid, 1.0).unwrap();
        let f = circle_in(32, [0, 2], [0.0; 4]).unwrap();
        let path = GrassmannPath::new(vec![0.0, 1.0, 2.0], &[f.clone(), f.clone(), f.clone()], &m).unwrap();
        let lift = horizontal_lift(path.samples()[0].embedding()).unwrap().with_offset(0.7);
        let hist = transport(&path, &lift).unwrap();
        assert!(hist.phase.iter().all(|z| (z - 0.7).abs() < 1e-15));
        // back and forth along a segment encloses nothing
        let g = |s: f64| circle_in(32, [0, 2], [s, 0.0, 0.0, 0.0]).unwrap();
        let line = [g(0.0), g(0.05), g(0.1), g(0.05), g(0.0)];
        let path = GrassmannPath::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], &line, &m).unwrap();
        assert!(berry_holonomy(&path).unwrap().angle.abs() < 1e-15);
        let open = GrassmannPath::new(vec![0.0, 1.0], &line[..2], &m).unwrap();
        assert!(matches!(berry_holonomy(&open), Err(Error::OpenPath { .. })));
        let far = GrassmannPath::new(vec![0.0, 1.0], &[g(0.0), g(1.0)], &m);
        assert!(matches!(far, Err(Error::DiscontinuousPath { index: 1, .. })));
    }
}
