//! Exact symplectic ambient models, Hamiltonians over a closed basis, and the
//! trivial prequantum bundle `P = S × S¹` with `α = dt − p*θ`.
//!
//! Coordinates on `ℝ^{2m}` are interleaved `(x₁, y₁, …, x_m, y_m)`; the
//! cylinder `T*S¹` uses `(q, p)` with `q` an angle. In both cases
//! `ω = Σ dx_i ∧ dy_i`, `θ = Σ y_i dx_i` so that `ω = −dθ`, the metric is flat
//! and `J(v_x, v_y) = (−v_y, v_x)` satisfies `g(u, v) = ω(u, Jv)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmbientKind {
    /// `ℝ^{2m}` with its standard symplectic structure.
    Euclidean { m: usize },
    /// The cylinder `T*S¹`, coordinates `(q mod 2π, p)`.
    CotangentCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmbientModel {
    kind: AmbientKind,
}

impl AmbientModel {
    pub fn euclidean(m: usize) -> Self {
        assert!(m >= 1, "euclidean model needs m >= 1");
        AmbientModel { kind: AmbientKind::Euclidean { m } }
    }

    pub fn cotangent_circle() -> Self {
        AmbientModel { kind: AmbientKind::CotangentCircle }
    }

    pub fn kind(&self) -> AmbientKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            AmbientKind::Euclidean { .. } => "euclidean",
            AmbientKind::CotangentCircle => "cotangent_circle",
        }
    }

    /// Half the dimension of `S`.
    pub fn half_dim(&self) -> usize {
        match self.kind {
            AmbientKind::Euclidean { m } => m,
            AmbientKind::CotangentCircle => 1,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.half_dim()
    }

    /// Whether coordinate `i` is an angle (defined mod 2π).
    pub fn is_angular(&self, coord: usize) -> bool {
        matches!(self.kind, AmbientKind::CotangentCircle) && coord == 0
    }

    fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    /// `ω(u, v)`.
    pub fn omega(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.omega_unchecked(u, v))
    }

    pub(crate) fn omega_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        u.chunks_exact(2)
            .zip(v.chunks_exact(2))
            .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
            .sum()
    }

    /// `θ_s(u)`; `θ = Σ y_i dx_i` (`p dq` on the cylinder).
    pub fn theta(&self, point: &[f64], u: &[f64]) -> Result<f64> {
        self.check(point)?;
        self.check(u)?;
        Ok(self.theta_unchecked(point, u))
    }

    pub(crate) fn theta_unchecked(&self, point: &[f64], u: &[f64]) -> f64 {
        point
            .chunks_exact(2)
            .zip(u.chunks_exact(2))
            .map(|(s, v)| s[1] * v[0])
            .sum()
    }

    /// Flat metric `g(u, v)`.
    pub fn metric(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
    }

    /// Compatible almost-complex structure, `g(u, v) = ω(u, Jv)`.
    pub fn complex_structure(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check(v)?;
        let mut out = vec![0.0; v.len()];
        for (o, a) in out.chunks_exact_mut(2).zip(v.chunks_exact(2)) {
            o[0] = -a[1];
            o[1] = a[0];
        }
        Ok(out)
    }

    /// Displacement `b − a`, with angular coordinates reduced to `(−π, π]`.
    pub(crate) fn displacement(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let d = b[i] - a[i];
            *o = if self.is_angular(i) { crate::wrap_angle(d) } else { d };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Cos,
    Sin,
}

/// `coeff · Π_i s_i^{powers[i]}` in the interleaved coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// `coeff · wave(freq · q) · p^{p_power}` on the cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderTerm {
    pub coeff: f64,
    pub freq: u32,
    pub wave: Wave,
    pub p_power: u32,
}

/// A Hamiltonian from a fixed basis closed under differentiation, so values
/// and gradients are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    Polynomial(Vec<Monomial>),
    Cylinder(Vec<CylinderTerm>),
}

fn powi(x: f64, n: u32) -> f64 {
    x.powi(n as i32)
}

impl HamiltonianSpec {
    pub fn constant(model: &AmbientModel, c: f64) -> Self {
        match model.kind() {
            AmbientKind::Euclidean { m } => {
                HamiltonianSpec::Polynomial(vec![Monomial { coeff: c, powers: vec![0; 2 * m] }])
            }
            AmbientKind::CotangentCircle => HamiltonianSpec::Cylinder(vec![CylinderTerm {
                coeff: c,
                freq: 0,
                wave: Wave::Cos,
                p_power: 0,
            }]),
        }
    }

    /// A single coordinate function `s_i` on `ℝ^{2m}`.
    pub fn coordinate(m: usize, i: usize) -> Self {
        let mut powers = vec![0; 2 * m];
        powers[i] = 1;
        HamiltonianSpec::Polynomial(vec![Monomial { coeff: 1.0, powers }])
    }

    /// `(x_i² + y_i²)/2` on `ℝ^{2m}` for pair `i`.
    pub fn oscillator(m: usize, pair: usize) -> Self {
        let mut px = vec![0; 2 * m];
        let mut py = vec![0; 2 * m];
        px[2 * pair] = 2;
        py[2 * pair + 1] = 2;
        HamiltonianSpec::Polynomial(vec![
            Monomial { coeff: 0.5, powers: px },
            Monomial { coeff: 0.5, powers: py },
        ])
    }

    /// Fails when a term does not belong to the model's basis.
    pub fn check(&self, model: &AmbientModel) -> Result<()> {
        let ok = match (self, model.kind()) {
            (HamiltonianSpec::Polynomial(terms), AmbientKind::Euclidean { m }) => {
                terms.iter().all(|t| t.powers.len() == 2 * m)
            }
            (HamiltonianSpec::Cylinder(_), AmbientKind::CotangentCircle) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedTerm { model: model.name() })
        }
    }

    /// `h(s)`; assumes [`check`](Self::check) passed.
    pub fn value(&self, point: &[f64]) -> f64 {
        match self {
            HamiltonianSpec::Polynomial(terms) => terms
                .iter()
                .map(|t| t.coeff * t.powers.iter().zip(point).map(|(&e, &x)| powi(x, e)).product::<f64>())
                .sum(),
            HamiltonianSpec::Cylinder(terms) => terms
                .iter()
                .map(|t| {
                    let a = t.freq as f64 * point[0];
                    let w = match t.wave {
                        Wave::Cos => a.cos(),
                        Wave::Sin => a.sin(),
                    };
                    t.coeff * w * powi(point[1], t.p_power)
                })
                .sum(),
        }
    }

    /// Exact gradient `dh(s)` in coordinates.
    pub fn gradient(&self, point: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            HamiltonianSpec::Polynomial(terms) => {
                for t in terms {
                    for i in 0..point.len() {
                        let e = t.powers[i];
                        if e == 0 {
                            continue;
                        }
                        let mut prod = t.coeff * e as f64 * powi(point[i], e - 1);
                        for (k, (&ek, &xk)) in t.powers.iter().zip(point).enumerate() {
                            if k != i {
                                prod *= powi(xk, ek);
                            }
                        }
                        out[i] += prod;
                    }
                }
            }
            HamiltonianSpec::Cylinder(terms) => {
                for t in terms {
                    let k = t.freq as f64;
                    let a = k * point[0];
                    let (w, dw) = match t.wave {
                        Wave::Cos => (a.cos(), -k * a.sin()),
                        Wave::Sin => (a.sin(), k * a.cos()),
                    };
                    let pp = powi(point[1], t.p_power);
                    out[0] += t.coeff * dw * pp;
                    if t.p_power > 0 {
                        out[1] += t.coeff * w * t.p_power as f64 * powi(point[1], t.p_power - 1);
                    }
                }
            }
        }
    }

    /// `h ∘ ψ` for an affine symplectic map `ψ`, expanded in the same basis.
    pub fn compose_affine(&self, map: &AffineSymplectic) -> Result<Self> {
        let d = map.shift.len();
        match self {
            HamiltonianSpec::Polynomial(terms) => {
                // ψ(s)_i = Σ_j A_ij s_j + b_i as sparse linear polynomials
                let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                for t in terms {
                    if t.powers.len() != d {
                        return Err(Error::DimensionMismatch { expected: d, got: t.powers.len() });
                    }
                    let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                    acc.insert(vec![0; d], t.coeff);
                    for (i, &e) in t.powers.iter().enumerate() {
                        let mut lin: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                        lin.insert(vec![0; d], map.shift[i]);
                        for j in 0..d {
                            let a = map.linear[i * d + j];
                            if a != 0.0 {
                                let mut p = vec![0; d];
                                p[j] = 1;
                                lin.insert(p, a);
                            }
                        }
                        for _ in 0..e {
                            acc = poly_mul(&acc, &lin);
                        }
                    }
                    for (p, c) in acc {
                        *out.entry(p).or_insert(0.0) += c;
                    }
                }
                Ok(HamiltonianSpec::Polynomial(
                    out.into_iter()
                        .filter(|(_, c)| *c != 0.0)
                        .map(|(powers, coeff)| Monomial { coeff, powers })
                        .collect(),
                ))
            }
            HamiltonianSpec::Cylinder(terms) => {
                if d != 2 || map.linear != [1.0, 0.0, 0.0, 1.0] {
                    return Err(Error::InvalidArgument(
                        "cylinder Hamiltonians compose only with translations",
                    ));
                }
                let (b, c) = (map.shift[0], map.shift[1]);
                let mut out = Vec::new();
                for t in terms {
                    // wave(k(q + b)) expanded in cos/sin of kq
                    let kb = t.freq as f64 * b;
                    let (cc, ss) = match t.wave {
                        Wave::Cos => (kb.cos(), -kb.sin()),
                        Wave::Sin => (kb.sin(), kb.cos()),
                    };
                    // (p + c)^n binomial expansion
                    let mut binom = 1.0;
                    for j in 0..=t.p_power {
                        let w = t.coeff * binom * powi(c, t.p_power - j);
                        for (wave, f) in [(Wave::Cos, cc), (Wave::Sin, ss)] {
                            if f * w != 0.0 {
                                out.push(CylinderTerm { coeff: f * w, freq: t.freq, wave, p_power: j });
                            }
                        }
                        binom = binom * (t.p_power - j) as f64 / (j + 1) as f64;
                    }
                }
                Ok(HamiltonianSpec::Cylinder(out))
            }
        }
    }
}

fn poly_mul(a: &BTreeMap<Vec<u32>, f64>, b: &BTreeMap<Vec<u32>, f64>) -> BTreeMap<Vec<u32>, f64> {
    let mut out = BTreeMap::new();
    for (pa, ca) in a {
        for (pb, cb) in b {
            let p: Vec<u32> = pa.iter().zip(pb).map(|(x, y)| x + y).collect();
            *out.entry(p).or_insert(0.0) += ca * cb;
        }
    }
    out
}

/// `s ↦ A s + b` with `A` symplectic (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSymplectic {
    pub linear: Vec<f64>,
    pub shift: Vec<f64>,
}

impl AffineSymplectic {
    pub fn translation(shift: Vec<f64>) -> Self {
        let d = shift.len();
        let mut linear = vec![0.0; d * d];
        for i in 0..d {
            linear[i * d + i] = 1.0;
        }
        AffineSymplectic { linear, shift }
    }

    /// Rotation by `angle` in the `(x_pair, y_pair)` plane of `ℝ^{2m}`: the
    /// time-`angle` flow of the oscillator `(x² + y²)/2` on that pair.
    pub fn pair_rotation(m: usize, pair: usize, angle: f64) -> Self {
        let mut map = Self::translation(vec![0.0; 2 * m]);
        let d = 2 * m;
        let (i, j) = (2 * pair, 2 * pair + 1);
        let (c, s) = (angle.cos(), angle.sin());
        map.linear[i * d + i] = c;
        map.linear[i * d + j] = s;
        map.linear[j * d + i] = -s;
        map.linear[j * d + j] = c;
        map
    }

    /// Symplectic shear `x_i ↦ x_i + c·y_j`, `x_j ↦ x_j + c·y_i` (a single
    /// `x_i ↦ x_i + c·y_i` when `i = j`).
    pub fn shear(m: usize, i: usize, j: usize, c: f64) -> Self {
        let mut map = Self::translation(vec![0.0; 2 * m]);
        let d = 2 * m;
        map.linear[2 * i * d + 2 * j + 1] += c;
        if i != j {
            map.linear[2 * j * d + 2 * i + 1] += c;
        }
        map
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineSymplectic) -> Result<Self> {
        let d = self.shift.len();
        if inner.shift.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: inner.shift.len() });
        }
        let mut linear = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                linear[r * d + c] = (0..d).map(|k| self.linear[r * d + k] * inner.linear[k * d + c]).sum();
            }
        }
        Ok(AffineSymplectic { linear, shift: self.apply(&inner.shift) })
    }

    /// `Aᵀ Ω A − Ω`, max entry.
    pub fn symplectic_defect(&self) -> f64 {
        let d = self.shift.len();
        let omega = |r: usize, c: usize| -> f64 {
            if r / 2 != c / 2 {
                0.0
            } else if r % 2 == 0 && c % 2 == 1 {
                1.0
            } else if r % 2 == 1 && c % 2 == 0 {
                -1.0
            } else {
                0.0
            }
        };
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0.0;
                for i in 0..d {
                    for j in 0..d {
                        acc += self.linear[i * d + r] * omega(i, j) * self.linear[j * d + c];
                    }
                }
                worst = worst.max((acc - omega(r, c)).abs());
            }
        }
        worst
    }

    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        let d = self.shift.len();
        (0..d)
            .map(|i| self.shift[i] + (0..d).map(|j| self.linear[i * d + j] * point[j]).sum::<f64>())
            .collect()
    }
}

/// `X_h` from `i_{X_h} ω = dh`: on each pair `X = (∂_y h, −∂_x h)`.
pub fn hamiltonian_field(model: &AmbientModel, h: &HamiltonianSpec, point: &[f64]) -> Result<Vec<f64>> {
    model.check(point)?;
    h.check(model)?;
    let mut out = vec![0.0; point.len()];
    hamiltonian_field_into(h, point, &mut out);
    Ok(out)
}

pub(crate) fn hamiltonian_field_into(h: &HamiltonianSpec, point: &[f64], out: &mut [f64]) {
    h.gradient(point, out);
    for pair in out.chunks_exact_mut(2) {
        let (dx, dy) = (pair[0], pair[1]);
        pair[0] = dy;
        pair[1] = -dx;
    }
}

/// Trivial prequantum bundle over an exact ambient model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrequantumModel {
    base: AmbientModel,
}

/// A tangent vector `(v_S, v_t)` on `P = S × S¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrequantumVector {
    pub spatial: Vec<f64>,
    pub fiber: f64,
}

impl PrequantumModel {
    pub fn new(base: AmbientModel) -> Self {
        PrequantumModel { base }
    }

    pub fn base(&self) -> &AmbientModel {
        &self.base
    }

    /// `α(v) = v_t − θ(v_S)` at a point of `P` over `s`.
    pub fn alpha(&self, s: &[f64], v: &PrequantumVector) -> Result<f64> {
        Ok(v.fiber - self.base.theta(s, &v.spatial)?)
    }

    /// Vertical generator `E = ∂_t`.
    pub fn generator(&self) -> PrequantumVector {
        PrequantumVector { spatial: vec![0.0; self.base.dim()], fiber: 1.0 }
    }
}

/// `ξ_h = X_h^hor − (h∘p) E`. The fiber coordinate does not enter.
pub fn prequantum_field(model: &PrequantumModel, h: &HamiltonianSpec, s: &[f64]) -> Result<PrequantumVector> {
    let xh = hamiltonian_field(&model.base, h, s)?;
    let lift = model.base.theta_unchecked(s, &xh);
    Ok(PrequantumVector { fiber: lift - h.value(s), spatial: xh })
}
