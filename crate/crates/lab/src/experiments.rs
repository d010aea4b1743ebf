//! The `run <experiment>` drivers. Each returns result records plus CSV
//! series for plotting.

use std::time::Instant;

use isodrast_core::flows::{advect_embedding, flow_embedding_steps, isodrast_drift};
use isodrast_core::grassmann::{omega0_lines, omega0_oracle, project_tangent};
use isodrast_core::loops::{jl_pair, theta_periods, Embedding, TangentField};
use isodrast_core::prequantum::{
    berry_holonomy, flux_oracle, horizontal_lift_from, phase_ratio_deviation, quotient_holonomy, square_loop,
};
use isodrast_core::spectral::Grid;
use isodrast_core::{wrap_angle, Error, Result};

use crate::config::{BerryConfig, ConfigError, ExperimentConfig, FamilyConfig, Setup};
use crate::records::{format_float, sort_records, Provenance, ResultRecord, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[derive(clap::ValueEnum)]
pub enum Experiment {
    Momenta,
    Omega0,
    Flow,
    Berry,
    Lift,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::Momenta, Experiment::Omega0, Experiment::Flow, Experiment::Berry, Experiment::Lift];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Momenta => "momenta",
            Experiment::Omega0 => "omega0",
            Experiment::Flow => "flow",
            Experiment::Berry => "berry",
            Experiment::Lift => "lift",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ResultRecord>,
    pub series: Vec<Series>,
}

fn not_configured(e: Experiment) -> ConfigError {
    ConfigError::Field { field: format!("experiments.{}", e.name()), message: "experiment is not configured".into() }
}

fn num(x: f64) -> String {
    format_float(x)
}

/// Runs one configured experiment. Numerical failures inside the core
/// become failing records, not errors.
pub fn run_experiment(config: &ExperimentConfig, experiment: Experiment, timing: bool) -> Outcome {
    let setup = config.setup()?;
    let ex = &config.experiments;
    let start = Instant::now();
    let mut out = match experiment {
        Experiment::Momenta => {
            ex.momenta.as_ref().ok_or_else(|| not_configured(experiment))?;
            momenta(config, &setup)
        }
        Experiment::Omega0 => omega0_sweep(config, &setup),
        Experiment::Flow => {
            let flow = ex.flow.as_ref().ok_or_else(|| not_configured(experiment))?;
            let schedule = config.schedule(&setup, flow)?;
            flow_run(config, &setup, &schedule, flow.drift_constant, flow.modes)
        }
        Experiment::Berry => berry(&setup, ex.berry.as_ref().ok_or_else(|| not_configured(experiment))?),
        Experiment::Lift => lift(config, &setup),
    }
    ?;
    if timing {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for r in &mut out.records {
            r.runtime_ms = Some(ms);
        }
    }
    sort_records(&mut out.records);
    Ok(out)
}

type Outcome = std::result::Result<ExperimentOutput, ConfigError>;

/// Wraps a core failure as a single failing record.
fn core_failure(name: &str, oracle: &str, e: Error) -> ExperimentOutput {
    ExperimentOutput { records: vec![ResultRecord::failed(name, Provenance::Derived, oracle, e.to_string())], series: vec![] }
}

/// `∮ y dx` along one cycle by the closed-polygon rule on `samples` points of
/// the spectral interpolant; for a closed planar curve this is minus the
/// shoelace area of the polygon.
fn polygon_period(f: &Embedding, cycle: usize, samples: usize, transverse: f64) -> f64 {
    let m = f.model().half_dim();
    let at = |i: usize| {
        let mut phi = [transverse; 2];
        phi[cycle] = std::f64::consts::TAU * i as f64 / samples as f64;
        f.eval(phi)
    };
    let mut total = 0.0;
    let mut prev = at(0);
    for i in 1..=samples {
        let next = at(i % samples);
        for k in 0..m {
            let (x0, y0, x1, y1) = (prev[2 * k], prev[2 * k + 1], next[2 * k], next[2 * k + 1]);
            let mut dx = x1 - x0;
            if i == samples && f.model().is_angular(2 * k) {
                // the lifted angle has wound once around; close the polygon
                dx = x1 + f.winding()[2 * k][cycle] as f64 * std::f64::consts::TAU - x0;
            }
            total += 0.5 * (y0 + y1) * dx;
        }
        prev = next;
    }
    total
}

/// Green's-theorem oracle for the periods of `f*θ`: polygon rule on `4N`,
/// `8N` and `16N` points with two Romberg levels. On the torus the loop
/// integral is averaged over the transverse nodes, as the periods are.
pub fn green_periods(f: &Embedding) -> Vec<f64> {
    let grid = f.grid();
    let n = grid.per_axis();
    let transverse: Vec<f64> = if grid.dim() == 1 {
        vec![0.0]
    } else {
        (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect()
    };
    (0..grid.dim())
        .map(|c| {
            let romberg = |t: f64| {
                let [a, b, d] = [4, 8, 16].map(|k| polygon_period(f, c, k * n, t));
                let (r1, r2) = ((4.0 * b - a) / 3.0, (4.0 * d - b) / 3.0);
                (16.0 * r2 - r1) / 15.0
            };
            transverse.iter().map(|t| romberg(*t)).sum::<f64>() / transverse.len() as f64
        })
        .collect()
}

/// `∫ (h∘f) μ` by the trapezoid rule on the doubled grid, evaluating the
/// spectral interpolant of `f` and the density directly.
fn refined_pairing(setup: &Setup, h: &isodrast_core::ambient::HamiltonianSpec) -> f64 {
    let grid = setup.embedding.grid();
    let fine = match grid {
        Grid::Circle { n } => Grid::circle(2 * n),
        Grid::Torus { n } => Grid::torus(2 * n),
    };
    let density = setup.manifold.density();
    (0..fine.len())
        .map(|j| {
            let phi = fine.node(j);
            h.value(&setup.embedding.eval(phi)) * density.eval(phi)
        })
        .sum::<f64>()
        * fine.cell_measure()
}

fn momenta(config: &ExperimentConfig, setup: &Setup) -> Outcome {
    let tol = config.experiments.momenta.as_ref().expect("checked by caller").tolerance;
    let f = &setup.embedding;
    let mut records = vec![];
    let mut series = Series::new("momenta", &["quantity", "index", "value", "reference"]);
    let oracle = green_periods(f);
    for (i, (p, g)) in theta_periods(f).into_iter().zip(oracle).enumerate() {
        records.push(ResultRecord::compare(
            format!("momenta.jr_ex[{i}]"),
            p,
            g,
            Provenance::Derived,
            "Green's theorem: polygon rule, Richardson-extrapolated",
            tol,
        ));
        series.push(vec!["jr_ex".into(), i.to_string(), num(p), num(g)]);
    }
    for (name, h) in &setup.hamiltonians {
        let value = match jl_pair(f, &setup.manifold, h) {
            Ok(v) => v,
            Err(e) => return Ok(core_failure(&format!("momenta.jl[{name}]"), "trapezoid rule on the doubled grid", e)),
        };
        let reference = refined_pairing(setup, h);
        records.push(ResultRecord::compare(
            format!("momenta.jl[{name}]"),
            value,
            reference,
            Provenance::Derived,
            "trapezoid rule on the doubled grid",
            tol,
        ));
        series.push(vec!["jl".into(), name.clone(), num(value), num(reference)]);
    }
    Ok(ExperimentOutput { records, series: vec![series] })
}

fn omega0_sweep(config: &ExperimentConfig, setup: &Setup) -> Outcome {
    let c = config.experiments.omega0.as_ref().ok_or_else(|| not_configured(Experiment::Omega0))?;
    let f = &setup.embedding;
    let m = &setup.manifold;
    let mut records = vec![];
    let mut series = Series::new("omega0", &["a", "b", "omega0", "oracle", "rel_error"]);
    for [a, b] in &c.pairs {
        let name = format!("omega0[{a},{b}]");
        let run = || -> Result<(f64, f64, f64)> {
            let v1 = TangentField::hamiltonian(f, setup.hamiltonian(a))?;
            let v2 = TangentField::hamiltonian(f, setup.hamiltonian(b))?;
            let t1 = project_tangent(f, &v1, m)?;
            let t2 = project_tangent(f, &v2, m)?;
            let n = isodrast_core::grassmann::canonical_representative(f, m)?;
            let (l1, l2) = omega0_lines(&n, &t1, &t2)?;
            Ok((l1, l2, omega0_oracle(f, &v1, &v2, m)?))
        };
        match run() {
            Ok((l1, l2, oracle)) => {
                let rel = (l1 - oracle).abs() / oracle.abs().max(1.0);
                records.push(ResultRecord::new(
                    name.clone(),
                    l1,
                    oracle,
                    Provenance::Derived,
                    "ω̄ on the Hamiltonian lifts",
                    rel,
                    c.tolerance,
                ));
                records.push(ResultRecord::new(
                    format!("{name}.lines"),
                    l2,
                    l1,
                    Provenance::Derived,
                    "first line vs integrated-by-parts second line",
                    (l1 - l2).abs() / l1.abs().max(1.0),
                    1e-10,
                ));
                series.push(vec![a.clone(), b.clone(), num(l1), num(oracle), num(rel)]);
            }
            Err(e) => records.push(ResultRecord::failed(name, Provenance::Derived, "ω̄ on the Hamiltonian lifts", e.to_string())),
        }
    }
    Ok(ExperimentOutput { records, series: vec![series] })
}

fn flow_run(
    config: &ExperimentConfig,
    setup: &Setup,
    schedule: &isodrast_core::flows::FlowSchedule,
    drift_constant: f64,
    modes: usize,
) -> Outcome {
    let path = match advect_embedding(&setup.embedding, schedule) {
        Ok(p) => p,
        Err(e) => return Ok(core_failure("flow.max_drift", "periods of the initial embedding", e)),
    };
    let drift = isodrast_drift(&path);
    let cycles = setup.embedding.grid().dim();
    let mut columns = vec!["time".to_string()];
    columns.extend((0..cycles).map(|c| format!("period_{c}")));
    columns.extend(setup.hamiltonians.iter().map(|(name, _)| format!("jl_{name}")));
    columns.push("drift".into());
    let mut series = Series { name: "flow".into(), columns, rows: vec![] };
    let mut coeffs = Series::new("flow_modes", &["time", "coordinate", "k1", "k2", "re", "im"]);
    for (i, (t, f)) in path.times.iter().zip(&path.embeddings).enumerate() {
        let mut row = vec![num(*t)];
        row.extend(drift.periods[i].iter().map(|p| num(*p)));
        for (_, h) in &setup.hamiltonians {
            row.push(jl_pair(f, &setup.manifold, h).map(num).unwrap_or_else(|_| "NaN".into()));
        }
        let step = drift.periods[i].iter().zip(&drift.periods[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        row.push(num(step));
        series.rows.push(row);
        for coord in 0..f.model().dim() {
            let spectrum = f.spectrum(coord);
            for (j, c) in spectrum.coeffs().iter().enumerate() {
                let k = spectrum.mode(j);
                if k[0].unsigned_abs() as usize <= modes && k[1].unsigned_abs() as usize <= modes {
                    coeffs.push(vec![num(*t), coord.to_string(), k[0].to_string(), k[1].to_string(), num(c.re), num(c.im)]);
                }
            }
        }
    }
    let dt = config.dt();
    let records = vec![ResultRecord::new(
        "flow.max_drift",
        drift.max_drift,
        0.0,
        Provenance::Derived,
        "periods of the initial embedding; bound C·Δt²",
        drift.max_drift,
        drift_constant * dt * dt,
    )];
    Ok(ExperimentOutput { records, series: vec![series, coeffs] })
}

/// The configured two-parameter family around the base embedding.
fn family<'a>(setup: &'a Setup, c: &'a BerryConfig) -> Box<dyn Fn([f64; 2]) -> Result<Embedding> + 'a> {
    let f0 = &setup.embedding;
    match &c.family {
        FamilyConfig::Translation { axes, shear } => {
            let (i, j, shear) = (axes[0], axes[1], *shear);
            Box::new(move |p: [f64; 2]| {
                f0.map_points(|x| {
                    let mut y = x.to_vec();
                    y[i] += p[0];
                    y[j] += p[1] * (1.0 + shear * p[0]);
                    y
                })
            })
        }
        FamilyConfig::Flows { hamiltonians, substeps } => {
            let (h1, h2) = (setup.hamiltonian(&hamiltonians[0]), setup.hamiltonian(&hamiltonians[1]));
            let k = *substeps;
            Box::new(move |p: [f64; 2]| flow_embedding_steps(&flow_embedding_steps(f0, h1, p[0], k)?, h2, p[1], k))
        }
    }
}

fn berry(setup: &Setup, c: &BerryConfig) -> Outcome {
    let fam = family(setup, c);
    let m = &setup.manifold;
    let a = m.total_volume();
    let mut eps = c.eps.clone();
    eps.sort_by(f64::total_cmp);
    let mut records = vec![];
    let mut series = Series::new("berry", &["eps", "holonomy_angle", "flux_oracle", "rel_error"]);
    for e in eps {
        let name = format!("berry.holonomy[eps={e}]");
        let oracle = "midpoint flux of ω₀ over the square, divided by a";
        let run = || -> Result<(f64, f64)> {
            let path = square_loop(&fam, m, c.corner, e, c.steps)?;
            Ok((berry_holonomy(&path)?.angle, flux_oracle(&fam, m, c.corner, e, c.cells)?))
        };
        let (angle, flux) = match run() {
            Ok(v) => v,
            Err(err) => {
                records.push(ResultRecord::failed(name, Provenance::Derived, oracle, err.to_string()));
                continue;
            }
        };
        let predicted = flux / a;
        let scale = predicted.abs();
        let rel = if scale > 0.0 { (angle - predicted).abs() / scale } else { angle.abs() };
        records.push(ResultRecord::new(name, angle, predicted, Provenance::Derived, oracle, rel, c.tolerance));
        series.push(vec![num(e), num(angle), num(flux), num(rel)]);
        if c.quotient {
            let q = quotient_holonomy(angle, a).expect("integer volume is validated");
            let reference = wrap_angle(flux);
            let gap = wrap_angle(q - reference).abs();
            let rel = if reference != 0.0 { gap / reference.abs() } else { gap };
            records.push(ResultRecord::new(
                format!("berry.quotient[eps={e}]"),
                q,
                reference,
                Provenance::Derived,
                "ω₀-flux modulo 2π",
                rel,
                c.tolerance,
            ));
        }
    }
    Ok(ExperimentOutput { records, series: vec![series] })
}

fn lift(config: &ExperimentConfig, setup: &Setup) -> Outcome {
    let c = config.experiments.lift.as_ref().ok_or_else(|| not_configured(Experiment::Lift))?;
    let f = &setup.embedding;
    let grid = f.grid();
    let periods = theta_periods(f);
    let worst = periods.iter().fold(0.0, |acc: f64, p| acc.max(p.abs()));
    let mut records = vec![ResultRecord::new(
        "lift.exactness",
        worst,
        0.0,
        Provenance::Derived,
        "periods of f*θ",
        worst,
        isodrast_core::grassmann::PERIOD_TOLERANCE,
    )];
    let lift = match horizontal_lift_from(f, c.basepoint, c.offset) {
        Ok(l) => l,
        Err(e @ Error::NonExactLoop { .. }) => {
            records[0].error = Some(e.to_string());
            return Ok(ExperimentOutput { records, series: vec![] });
        }
        Err(e) => return Ok(core_failure("lift.horizontality", "α = dt − θ along the lift", e)),
    };
    records.push(ResultRecord::new(
        "lift.horizontality",
        lift.horizontality_residual(),
        0.0,
        Provenance::Derived,
        "α = dt − θ along the lift",
        lift.horizontality_residual(),
        c.tolerance,
    ));
    let projection = lift.base().max_node_distance(f).unwrap_or(f64::INFINITY);
    records.push(ResultRecord::new(
        "lift.projection",
        projection,
        0.0,
        Provenance::Trivial,
        "p∘F = f node-wise",
        projection,
        0.0,
    ));
    let other_base = (c.basepoint + grid.len() / 3) % grid.len();
    match horizontal_lift_from(f, other_base, c.offset + 1.0).and_then(|o| phase_ratio_deviation(&lift, &o)) {
        Ok(dev) => records.push(ResultRecord::new(
            "lift.uniqueness",
            dev,
            0.0,
            Provenance::Derived,
            "lift from a second basepoint and offset",
            dev,
            c.tolerance,
        )),
        Err(e) => records.push(ResultRecord::failed("lift.uniqueness", Provenance::Derived, "lift from a second basepoint and offset", e.to_string())),
    }
    let mut columns = vec!["node"];
    columns.extend(if grid.dim() == 1 { &["phi"][..] } else { &["phi1", "phi2"][..] });
    columns.extend(["fiber", "re", "im"]);
    let mut series = Series::new("lift", &columns);
    let phase = lift.phase_function();
    for j in 0..grid.len() {
        let phi = grid.node(j);
        let mut row = vec![j.to_string()];
        row.extend(phi[..grid.dim()].iter().map(|x| num(*x)));
        row.extend([num(lift.fiber(j)), num(phase[j].re), num(phase[j].im)]);
        series.push(row);
    }
    Ok(ExperimentOutput { records, series: vec![series] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use isodrast_core::ambient::AmbientModel;
    use isodrast_core::loops::CoordinateSeries;
    use isodrast_core::spectral::TrigTerm;

    #[test]
    fn green_oracle_matches_disc_area() {
        let mut series = vec![CoordinateSeries::default(); 4];
        series[0] = CoordinateSeries::new(vec![TrigTerm::new([1, 0], 1.0, 0.0)]);
        series[1] = CoordinateSeries::new(vec![TrigTerm::new([1, 0], 0.0, 1.0)]);
        let f = Embedding::from_series(AmbientModel::euclidean(2), Grid::circle(64), &series).unwrap();
        assert!((green_periods(&f)[0] + std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn green_oracle_closes_winding_loops() {
        let series = [
            CoordinateSeries::winding([1, 0], vec![]),
            CoordinateSeries::new(vec![TrigTerm::new([0, 0], 0.5, 0.0), TrigTerm::new([1, 0], 0.3, 0.0)]),
        ];
        let f = Embedding::from_series(AmbientModel::cotangent_circle(), Grid::circle(64), &series).unwrap();
        // ∮ p dq = 2π · 0.5 for the graph p = 0.5 + 0.3 cos q
        assert!((green_periods(&f)[0] - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
        }
        assert_eq!(Experiment::from_name("holonomy"), None);
    }
}
