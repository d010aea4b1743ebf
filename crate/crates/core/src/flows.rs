//! Hamiltonian flows by the implicit midpoint rule and their nodewise action
//! on embeddings.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ambient::{hamiltonian_field_into, AmbientModel, HamiltonianSpec};
use crate::error::{Error, Result};
use crate::loops::{theta_periods, Embedding, TangentField};

/// Fixed-point tolerance of one implicit midpoint step (relative to the
/// size of the state).
pub const STEP_TOLERANCE: f64 = 1e-13;
const MAX_ITERATIONS: usize = 200;

/// Number of steps of size `dt` covering `duration`.
pub fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument("step size must be positive and duration finite"));
    }
    let n = (duration.abs() / dt).round();
    if (n * dt - duration.abs()).abs() > 1e-9 * duration.abs().max(dt) {
        return Err(Error::StepMismatch { duration, dt });
    }
    Ok(n as usize)
}

/// One implicit midpoint step `z₁ = z₀ + Δt X_h((z₀ + z₁)/2)`, in place.
/// `scratch` must hold `3 · dim` values.
fn midpoint_step(h: &HamiltonianSpec, z: &mut [f64], dt: f64, scratch: &mut [f64]) -> Result<()> {
    let d = z.len();
    let (next, rest) = scratch.split_at_mut(d);
    let (mid, field) = rest.split_at_mut(d);
    hamiltonian_field_into(h, z, field);
    for i in 0..d {
        next[i] = z[i] + dt * field[i];
    }
    let mut update = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..d {
            mid[i] = 0.5 * (z[i] + next[i]);
        }
        hamiltonian_field_into(h, mid, field);
        let scale = crate::max_abs(z.iter().copied()).max(1.0);
        update = 0.0;
        for i in 0..d {
            let x = z[i] + dt * field[i];
            update = update.max((x - next[i]).abs());
            next[i] = x;
        }
        if !update.is_finite() {
            break;
        }
        if update <= STEP_TOLERANCE * scale {
            z.copy_from_slice(next);
            return Ok(());
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, update })
}

/// Endpoint of the implicit midpoint trajectory of `X_h` from `point` over
/// time `duration` (negative runs backwards).
pub fn flow_point(model: &AmbientModel, h: &HamiltonianSpec, point: &[f64], duration: f64, dt: f64) -> Result<Vec<f64>> {
    h.check(model)?;
    if point.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: point.len() });
    }
    let n = step_count(duration, dt)?;
    let mut z = point.to_vec();
    if n == 0 {
        return Ok(z);
    }
    let step = duration / n as f64;
    let mut scratch = vec![0.0; 3 * z.len()];
    for _ in 0..n {
        midpoint_step(h, &mut z, step, &mut scratch)?;
    }
    Ok(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    ImplicitMidpoint,
}

/// Consecutive Hamiltonian segments integrated with a common step.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSchedule {
    segments: Vec<(HamiltonianSpec, f64)>,
    dt: f64,
    output_every: usize,
    integrator: Integrator,
}

impl FlowSchedule {
    /// Durations must be non-negative multiples of `dt`. Output is taken at
    /// the start, every `output_every` steps and at the end of each segment.
    pub fn new(segments: Vec<(HamiltonianSpec, f64)>, dt: f64, output_every: usize) -> Result<Self> {
        if output_every == 0 {
            return Err(Error::InvalidArgument("output interval must be at least one step"));
        }
        for (_, duration) in &segments {
            if !(*duration >= 0.0) {
                return Err(Error::InvalidArgument("segment durations must be non-negative"));
            }
            step_count(*duration, dt)?;
        }
        Ok(FlowSchedule { segments, dt, output_every, integrator: Integrator::ImplicitMidpoint })
    }

    pub fn single(h: HamiltonianSpec, duration: f64, dt: f64) -> Result<Self> {
        let n = step_count(duration, dt)?;
        Self::new(vec![(h, duration)], dt, n.max(1))
    }

    pub fn segments(&self) -> &[(HamiltonianSpec, f64)] {
        &self.segments
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn output_every(&self) -> usize {
        self.output_every
    }

    pub fn integrator(&self) -> Integrator {
        self.integrator
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.1).sum()
    }
}

/// Embeddings sampled along a flow.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPath {
    pub times: Vec<f64>,
    pub embeddings: Vec<Embedding>,
}

impl EmbeddingPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &Embedding {
        self.embeddings.last().expect("a path holds at least its initial sample")
    }
}

/// Applies the schedule to every node of `f`, re-validating the embedding at
/// each output time.
pub fn advect_embedding(f: &Embedding, schedule: &FlowSchedule) -> Result<EmbeddingPath> {
    let model = *f.model();
    for (h, _) in &schedule.segments {
        h.check(&model)?;
    }
    let d = model.dim();
    let grid = f.grid();
    let mut state: Vec<f64> = (0..grid.len()).flat_map(|j| f.point(j)).collect();
    let mut scratch = vec![0.0; 3 * d];
    let mut path = EmbeddingPath { times: vec![0.0], embeddings: vec![f.clone()] };
    let mut time = 0.0;
    for (h, duration) in &schedule.segments {
        let n = step_count(*duration, schedule.dt)?;
        if n == 0 {
            continue;
        }
        let step = duration / n as f64;
        let mut done = 0;
        while done < n {
            let k = schedule.output_every.min(n - done);
            for z in state.chunks_mut(d) {
                for _ in 0..k {
                    midpoint_step(h, z, step, &mut scratch)
                        .map_err(|e| Error::InvalidDuringFlow { time, source: Box::new(e) })?;
                }
            }
            done += k;
            time += k as f64 * step;
            let values = (0..d).map(|i| state.iter().skip(i).step_by(d).copied().collect()).collect();
            let g = Embedding::from_samples(model, grid, values, f.winding().to_vec())
                .map_err(|e| Error::InvalidDuringFlow { time, source: Box::new(e) })?;
            path.times.push(time);
            path.embeddings.push(g);
        }
    }
    Ok(path)
}

/// `f` flowed by `h` for `duration`.
pub fn flow_embedding(f: &Embedding, h: &HamiltonianSpec, duration: f64, dt: f64) -> Result<Embedding> {
    let path = advect_embedding(f, &FlowSchedule::single(h.clone(), duration, dt)?)?;
    Ok(path.last().clone())
}

/// `f` flowed by `h` for `duration` using exactly `steps` midpoint steps, so
/// the result depends smoothly on `duration` (including its sign).
pub fn flow_embedding_steps(f: &Embedding, h: &HamiltonianSpec, duration: f64, steps: usize) -> Result<Embedding> {
    h.check(f.model())?;
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required"));
    }
    if duration == 0.0 {
        return Ok(f.clone());
    }
    let dt = duration / steps as f64;
    let d = f.model().dim();
    let mut scratch = vec![0.0; 3 * d];
    let mut z = vec![0.0; d];
    f.map_points(|p| {
        z.copy_from_slice(p);
        for _ in 0..steps {
            if midpoint_step(h, &mut z, dt, &mut scratch).is_err() {
                z.iter_mut().for_each(|x| *x = f64::NAN);
                break;
            }
        }
        z.clone()
    })
    .map_err(|e| Error::InvalidDuringFlow { time: duration, source: Box::new(e) })
}

/// Variation `δf(t)` of the flowed embedding in the direction `v`, by
/// central differences of the flow with seeds `f ± ε v`.
pub fn linearized_flow(
    f: &Embedding,
    v: &TangentField,
    h: &HamiltonianSpec,
    duration: f64,
    dt: f64,
    eps: f64,
) -> Result<TangentField> {
    f.check_compatible(v.grid(), v.dim())?;
    let model = f.model();
    let d = model.dim();
    let mut values = vec![Vec::with_capacity(f.grid().len()); d];
    let (mut p, mut dv) = (vec![0.0; d], vec![0.0; d]);
    for j in 0..f.grid().len() {
        f.point_into(j, &mut p);
        v.at_into(j, &mut dv);
        let plus: Vec<f64> = p.iter().zip(&dv).map(|(x, y)| x + eps * y).collect();
        let minus: Vec<f64> = p.iter().zip(&dv).map(|(x, y)| x - eps * y).collect();
        let a = flow_point(model, h, &plus, duration, dt)?;
        let b = flow_point(model, h, &minus, duration, dt)?;
        for (col, (x, y)) in values.iter_mut().zip(a.iter().zip(&b)) {
            col.push((x - y) / (2.0 * eps));
        }
    }
    TangentField::new(f.grid(), values)
}

/// Periods of `f_t*θ` along a path and their largest deviation from the
/// initial ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub times: Vec<f64>,
    pub periods: Vec<Vec<f64>>,
    pub max_drift: f64,
}

pub fn isodrast_drift(path: &EmbeddingPath) -> DriftReport {
    let periods: Vec<Vec<f64>> = path.embeddings.iter().map(theta_periods).collect();
    let max_drift = match periods.first() {
        Some(first) => crate::max_abs(periods.iter().flat_map(|p| p.iter().zip(first).map(|(a, b)| a - b))),
        None => 0.0,
    };
    DriftReport { times: path.times.clone(), periods, max_drift }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Monomial;
    use crate::loops::{jl_pair, CoordinateSeries, ModelManifold};
    use crate::spectral::{Grid, TrigTerm};
    use core::f64::consts::TAU;

    fn plane_circle(n: usize, pair_axes: [usize; 2]) -> Embedding {
        let mut series = vec![CoordinateSeries::default(); 4];
        series[pair_axes[0]] = CoordinateSeries::new(vec![TrigTerm::new([1, 0], 1.0, 0.0)]);
        series[pair_axes[1]] = CoordinateSeries::new(vec![TrigTerm::new([1, 0], 0.0, 1.0)]);
        Embedding::from_series(AmbientModel::euclidean(2), Grid::circle(n), &series).unwrap()
    }

    fn anharmonic() -> HamiltonianSpec {
        let mut terms = match HamiltonianSpec::oscillator(2, 0) {
            HamiltonianSpec::Polynomial(t) => t,
            _ => unreachable!(),
        };
        terms.push(Monomial { coeff: 0.25, powers: vec![4, 0, 0, 0] });
        HamiltonianSpec::Polynomial(terms)
    }

    #[test]
    fn oscillator_matches_cayley_rotation() {
        let model = AmbientModel::euclidean(1);
        let h = HamiltonianSpec::oscillator(1, 0);
        for dt in [TAU / 100.0, TAU / 200.0] {
            let end = flow_point(&model, &h, &[1.0, 0.0], TAU, dt).unwrap();
            // each midpoint step is an exact rotation by 2 atan(Δt/2), clockwise
            let angle = 200.0 * (dt / 2.0).atan() * (TAU / dt / 100.0);
            assert!((end[0] - angle.cos()).abs() < 1e-12 && (end[1] + angle.sin()).abs() < 1e-12);
            let err = ((end[0] - 1.0).powi(2) + end[1].powi(2)).sqrt();
            assert!(err < dt * dt);
        }
    }

    #[test]
    fn constant_hamiltonian_is_identity() {
        let model = AmbientModel::euclidean(2);
        let p = [0.3, -1.0, 2.0, 0.5];
        let end = flow_point(&model, &HamiltonianSpec::constant(&model, 4.0), &p, 1.0, 0.1).unwrap();
        assert_eq!(end, p.to_vec());
    }

    #[test]
    fn energy_drift() {
        let model = AmbientModel::euclidean(2);
        let p = [0.7, 0.2, -0.1, 0.4];
        let h = HamiltonianSpec::oscillator(2, 0);
        let end = flow_point(&model, &h, &p, 1.0, 1e-3).unwrap();
        assert!((h.value(&end) - h.value(&p)).abs() < 1e-10);
        let h = anharmonic();
        let drift = |dt| (h.value(&flow_point(&model, &h, &p, 1.0, dt).unwrap()) - h.value(&p)).abs();
        let (a, b) = (drift(0.02), drift(0.01));
        assert!(a < 0.02 * 0.02);
        assert!((a / b - 4.0).abs() < 0.8, "ratio {}", a / b);
    }

    #[test]
    fn step_mismatch_is_reported() {
        let model = AmbientModel::euclidean(1);
        let r = flow_point(&model, &HamiltonianSpec::oscillator(1, 0), &[1.0, 0.0], 1.0, 0.3);
        assert!(matches!(r, Err(Error::StepMismatch { .. })));
    }

    #[test]
    fn translation_is_rigid() {
        let f = plane_circle(64, [0, 2]);
        let h = HamiltonianSpec::coordinate(2, 1);
        let path = advect_embedding(&f, &FlowSchedule::new(vec![(h, 0.5)], 0.05, 5).unwrap()).unwrap();
        assert_eq!(path.len(), 3);
        let g = path.last();
        for i in 0..4 {
            let (a, b) = (f.spectrum(i).coeffs(), g.spectrum(i).coeffs());
            for (k, (x, y)) in a.iter().zip(b).enumerate() {
                let shift = if i == 0 && k == 0 { 0.5 } else { 0.0 };
                assert!(((y - x).re - shift).abs() < 1e-10 && (y - x).im.abs() < 1e-10);
            }
        }
        assert!(isodrast_drift(&path).max_drift < 1e-10);
    }

    #[test]
    fn zero_duration_schedule_is_constant() {
        let f = plane_circle(32, [0, 2]);
        let s = FlowSchedule::new(vec![(anharmonic(), 0.0)], 0.1, 1).unwrap();
        let path = advect_embedding(&f, &s).unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(isodrast_drift(&path).max_drift, 0.0);
    }

    #[test]
    fn jl_drift_is_second_order() {
        let f = plane_circle(64, [0, 2]);
        let m = ModelManifold::uniform(f.grid(), 1.0).unwrap();
        let h = anharmonic();
        let start = jl_pair(&f, &m, &h).unwrap();
        let drift = |dt| (jl_pair(&flow_embedding(&f, &h, 1.0, dt).unwrap(), &m, &h).unwrap() - start).abs();
        let (a, b) = (drift(0.02), drift(0.01));
        assert!(a < 0.02 * 0.02);
        assert!((a / b - 4.0).abs() < 0.8, "ratio {}", a / b);
    }

    #[test]
    fn flows_preserve_periods() {
        let f = plane_circle(64, [0, 1]);
        for h in [HamiltonianSpec::oscillator(2, 0), anharmonic()] {
            let path = advect_embedding(&f, &FlowSchedule::new(vec![(h, 1.0)], 0.05, 4).unwrap()).unwrap();
            assert!(isodrast_drift(&path).max_drift < 1e-10);
        }
        let disc = plane_circle(64, [0, 1]);
        let path = advect_embedding(&disc, &FlowSchedule::new(vec![(anharmonic(), 1.0)], 0.05, 10).unwrap()).unwrap();
        let report = isodrast_drift(&path);
        assert!((report.periods[0][0] + core::f64::consts::PI).abs() < 1e-12);
        assert!(report.max_drift < 1e-9, "{}", report.max_drift);
    }

    #[test]
    fn reverse_flow_inverts() {
        let model = AmbientModel::euclidean(2);
        let p = [0.7, 0.2, -0.1, 0.4];
        let h = anharmonic();
        let q = flow_point(&model, &h, &p, 0.5, 0.01).unwrap();
        let back = flow_point(&model, &h, &q, -0.5, 0.01).unwrap();
        assert!(crate::max_abs(back.iter().zip(&p).map(|(a, b)| a - b)) < 1e-12);
    }
}
