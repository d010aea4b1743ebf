//! Seeded random embeddings, densities, Hamiltonians and variations for the
//! invariant suite.

use isodrast_core::ambient::{AffineSymplectic, AmbientModel, HamiltonianSpec, Monomial};
use isodrast_core::loops::{CoordinateSeries, Embedding, ModelManifold, TangentField};
use isodrast_core::spectral::{Grid, TrigPoly, TrigTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn term(k: [i32; 2], c: f64, s: f64) -> TrigTerm {
    TrigTerm::new(k, c, s)
}

/// Unit circle in the `(axes[0], axes[1])` coordinate plane of `ℝ⁴`.
pub fn circle(n: usize, axes: [usize; 2]) -> Embedding {
    let mut series = vec![CoordinateSeries::default(); 4];
    series[axes[0]] = CoordinateSeries::new(vec![term([1, 0], 1.0, 0.0)]);
    series[axes[1]] = CoordinateSeries::new(vec![term([1, 0], 0.0, 1.0)]);
    Embedding::from_series(AmbientModel::euclidean(2), Grid::circle(n), &series).unwrap()
}

/// The isotropic `(x₁, x₂)`-plane circle.
pub fn planar_circle(n: usize) -> Embedding {
    circle(n, [0, 2])
}

fn random_terms(rng: &mut ChaCha8Rng, modes: &[[i32; 2]], amp: f64) -> Vec<TrigTerm> {
    modes.iter().map(|&k| term(k, rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))).collect()
}

/// Planar circle plus small random modes 0..3 in every coordinate of `ℝ⁴`.
pub fn random_circle(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Embedding {
    let base = [
        vec![term([1, 0], 1.0, 0.0)],
        vec![],
        vec![term([1, 0], 0.0, 1.0)],
        vec![],
    ];
    let modes = [[0, 0], [1, 0], [2, 0], [3, 0]];
    let series: Vec<CoordinateSeries> = base
        .into_iter()
        .map(|mut terms| {
            terms.extend(random_terms(rng, &modes, amp));
            CoordinateSeries::new(terms)
        })
        .collect();
    Embedding::from_series(AmbientModel::euclidean(2), Grid::circle(n), &series).unwrap()
}

/// Product torus `(cos φ₁, sin φ₁, cos φ₂, sin φ₂)` plus small random modes.
pub fn random_torus(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Embedding {
    let base = [
        vec![term([1, 0], 1.0, 0.0)],
        vec![term([1, 0], 0.0, 1.0)],
        vec![term([0, 1], 1.0, 0.0)],
        vec![term([0, 1], 0.0, 1.0)],
    ];
    let modes = [[1, 0], [0, 1], [1, 1], [1, -1]];
    let series: Vec<CoordinateSeries> = base
        .into_iter()
        .map(|mut terms| {
            terms.extend(random_terms(rng, &modes, amp));
            CoordinateSeries::new(terms)
        })
        .collect();
    Embedding::from_series(AmbientModel::euclidean(2), Grid::torus(n), &series).unwrap()
}

/// Density `1 + small modes`, normalized to total volume `a`.
pub fn random_density(rng: &mut ChaCha8Rng, grid: Grid, a: f64) -> ModelManifold {
    let modes: &[[i32; 2]] = match grid {
        Grid::Circle { .. } => &[[1, 0], [2, 0]],
        Grid::Torus { .. } => &[[1, 0], [0, 1], [1, 1]],
    };
    let mut terms = vec![term([0, 0], 1.0, 0.0)];
    terms.extend(random_terms(rng, modes, 0.15));
    ModelManifold::new(grid, TrigPoly::new(terms), a).unwrap()
}

/// Random polynomial of degree ≤ `degree` on `ℝ^{2m}` with `count` terms.
pub fn random_polynomial(rng: &mut ChaCha8Rng, m: usize, degree: u32, count: usize) -> HamiltonianSpec {
    let terms = (0..count)
        .map(|_| {
            let mut powers = vec![0u32; 2 * m];
            let deg = rng.gen_range(1..=degree);
            for _ in 0..deg {
                powers[rng.gen_range(0..2 * m)] += 1;
            }
            Monomial { coeff: rng.gen_range(-1.0..1.0), powers }
        })
        .collect();
    HamiltonianSpec::Polynomial(terms)
}

/// Random tangential field `Tf ∘ w` with low-mode `w`.
pub fn random_tangential(rng: &mut ChaCha8Rng, f: &Embedding) -> TangentField {
    let grid = f.grid();
    let w: Vec<Vec<f64>> = (0..grid.dim())
        .map(|_| {
            let mut terms = vec![term([0, 0], rng.gen_range(-1.0..1.0), 0.0)];
            terms.extend(random_terms(rng, &[[1, 0], [0, 1], [2, 0]], 0.5));
            TrigPoly::new(terms).sample(grid)
        })
        .collect();
    TangentField::along_parameter(f, &w).unwrap()
}

/// Random `X_h ∘ f + Tf ∘ w`: tangent to the level set of the exact
/// right momentum map.
pub fn random_admissible(rng: &mut ChaCha8Rng, f: &Embedding) -> TangentField {
    let h = random_polynomial(rng, f.model().half_dim(), 3, 5);
    let x = TangentField::hamiltonian(f, &h).unwrap();
    x.combine(1.0, &random_tangential(rng, f), 1.0).unwrap()
}

/// Random affine symplectic map of `ℝ^{2m}` from rotations, shears and a
/// translation.
pub fn random_affine(rng: &mut ChaCha8Rng, m: usize) -> AffineSymplectic {
    let mut map = AffineSymplectic::translation((0..2 * m).map(|_| rng.gen_range(-0.5..0.5)).collect());
    for _ in 0..3 {
        let pair = rng.gen_range(0..m);
        let rot = AffineSymplectic::pair_rotation(m, pair, rng.gen_range(-3.0..3.0));
        let shear = AffineSymplectic::shear(m, rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(-0.5..0.5));
        map = map.compose(&rot).unwrap().compose(&shear).unwrap();
    }
    map
}

/// Anharmonic oscillator `(x₁² + y₁²)/2 + x₁⁴/4` on `ℝ⁴`.
pub fn anharmonic() -> HamiltonianSpec {
    HamiltonianSpec::Polynomial(vec![
        Monomial { coeff: 0.5, powers: vec![2, 0, 0, 0] },
        Monomial { coeff: 0.5, powers: vec![0, 2, 0, 0] },
        Monomial { coeff: 0.25, powers: vec![4, 0, 0, 0] },
    ])
}

/// Nonlinear Hamiltonians on `ℝ⁴` used to sweep exact families.
pub fn sweep_hamiltonians() -> [HamiltonianSpec; 3] {
    [
        HamiltonianSpec::Polynomial(vec![
            Monomial { coeff: 1.0, powers: vec![0, 1, 0, 0] },
            Monomial { coeff: 0.3, powers: vec![2, 0, 1, 0] },
        ]),
        HamiltonianSpec::Polynomial(vec![
            Monomial { coeff: 1.0, powers: vec![0, 0, 0, 1] },
            Monomial { coeff: 0.4, powers: vec![1, 1, 0, 0] },
            Monomial { coeff: -0.2, powers: vec![0, 0, 3, 0] },
        ]),
        HamiltonianSpec::Polynomial(vec![
            Monomial { coeff: 1.0, powers: vec![1, 0, 0, 0] },
            Monomial { coeff: 0.25, powers: vec![0, 1, 0, 2] },
        ]),
    ]
}
