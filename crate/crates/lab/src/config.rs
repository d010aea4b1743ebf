//! JSON experiment configuration: schema, validation and conversion into
//! core objects.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use isodrast_core::ambient::{AmbientModel, CylinderTerm, HamiltonianSpec, Monomial, Wave};
use isodrast_core::flows::{step_count, FlowSchedule};
use isodrast_core::loops::{CoordinateSeries, Embedding, ModelManifold};
use isodrast_core::spectral::{Grid, TrigPoly, TrigTerm};
use serde::Deserialize;

/// The configuration used when `--config` is not given.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.json");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ambient: AmbientConfig,
    pub manifold: ManifoldConfig,
    pub embedding: Vec<SeriesConfig>,
    #[serde(default)]
    pub hamiltonians: Vec<HamiltonianConfig>,
    pub integrator: IntegratorConfig,
    pub seed: u64,
    #[serde(default)]
    pub checks: CheckConfig,
    #[serde(default)]
    pub experiments: ExperimentsConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientKindConfig {
    Euclidean,
    CotangentCircle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientConfig {
    pub kind: AmbientKindConfig,
    #[serde(default)]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    Circle,
    Torus,
}

/// Trigonometric terms are arrays `[k, cos, sin]` on the circle and
/// `[k1, k2, cos, sin]` on the torus.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub kind: ManifoldKind,
    pub n: usize,
    pub total_volume: f64,
    #[serde(default)]
    pub density: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    #[serde(default)]
    pub winding: Vec<i32>,
    #[serde(default)]
    pub terms: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub name: String,
    #[serde(default)]
    pub polynomial: Option<Vec<MonomialConfig>>,
    #[serde(default)]
    pub cylinder: Option<Vec<CylinderTermConfig>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialConfig {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveConfig {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderTermConfig {
    pub coeff: f64,
    pub freq: u32,
    pub wave: WaveConfig,
    #[serde(default)]
    pub p_power: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

/// Sizes of the randomized invariant suite.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "default_check_n")]
    pub n: usize,
    #[serde(default = "default_check_torus_n")]
    pub torus_n: usize,
    #[serde(default = "default_check_cases")]
    pub cases: usize,
}

fn default_check_n() -> usize {
    128
}

fn default_check_torus_n() -> usize {
    16
}

fn default_check_cases() -> usize {
    8
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { n: default_check_n(), torus_n: default_check_torus_n(), cases: default_check_cases() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentsConfig {
    #[serde(default)]
    pub momenta: Option<MomentaConfig>,
    #[serde(default)]
    pub omega0: Option<Omega0Config>,
    #[serde(default)]
    pub flow: Option<FlowConfig>,
    #[serde(default)]
    pub berry: Option<BerryConfig>,
    #[serde(default)]
    pub lift: Option<LiftConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentaConfig {
    #[serde(default = "default_momenta_tolerance")]
    pub tolerance: f64,
}

fn default_momenta_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Omega0Config {
    pub pairs: Vec<[String; 2]>,
    #[serde(default = "default_omega0_tolerance")]
    pub tolerance: f64,
}

fn default_omega0_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub hamiltonian: String,
    pub duration: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub schedule: Vec<SegmentConfig>,
    #[serde(default = "one")]
    pub output_every: usize,
    #[serde(default = "default_drift_constant")]
    pub drift_constant: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
}

fn one() -> usize {
    1
}

fn default_drift_constant() -> f64 {
    1.0
}

fn default_modes() -> usize {
    4
}

/// Two-parameter family of embeddings around which Berry loops are taken.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    /// `f₀ + s·e_{axes[0]} + t(1 + shear·s)·e_{axes[1]}`.
    Translation {
        axes: [usize; 2],
        #[serde(default)]
        shear: f64,
    },
    /// `Φ^{h₂}_t ∘ Φ^{h₁}_s ∘ f₀`, each flow taken in `substeps` midpoint steps.
    Flows {
        hamiltonians: [String; 2],
        #[serde(default = "default_substeps")]
        substeps: usize,
    },
}

fn default_substeps() -> usize {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerryConfig {
    pub eps: Vec<f64>,
    pub family: FamilyConfig,
    #[serde(default)]
    pub corner: [f64; 2],
    #[serde(default = "default_berry_steps")]
    pub steps: usize,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default = "default_berry_tolerance")]
    pub tolerance: f64,
    /// Also report the `ℤ_a` quotient holonomy; needs an integer total volume.
    #[serde(default)]
    pub quotient: bool,
}

fn default_berry_steps() -> usize {
    8
}

fn default_cells() -> usize {
    4
}

fn default_berry_tolerance() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftConfig {
    #[serde(default)]
    pub basepoint: usize,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "default_lift_tolerance")]
    pub tolerance: f64,
}

fn default_lift_tolerance() -> f64 {
    1e-10
}

/// Core objects built from a validated configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub model: AmbientModel,
    pub manifold: ModelManifold,
    pub embedding: Embedding,
    pub hamiltonians: Vec<(String, HamiltonianSpec)>,
}

impl Setup {
    pub fn hamiltonian(&self, name: &str) -> &HamiltonianSpec {
        &self.hamiltonians.iter().find(|(n, _)| n == name).expect("names are validated").1
    }
}

fn check_positive(field: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(field_error(field, format!("must be positive and finite, got {value}")))
    }
}

fn integer(field: &str, value: f64) -> Result<i32, ConfigError> {
    if value.fract() == 0.0 && value.abs() <= i32::MAX as f64 {
        Ok(value as i32)
    } else {
        Err(field_error(field, format!("wave number must be an integer, got {value}")))
    }
}

fn parse_terms(field: &str, terms: &[Vec<f64>], kind: ManifoldKind) -> Result<Vec<TrigTerm>, ConfigError> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let field = format!("{field}[{i}]");
            match (kind, t.as_slice()) {
                (ManifoldKind::Circle, &[k, c, s]) => Ok(TrigTerm::new([integer(&field, k)?, 0], c, s)),
                (ManifoldKind::Torus, &[k1, k2, c, s]) => {
                    Ok(TrigTerm::new([integer(&field, k1)?, integer(&field, k2)?], c, s))
                }
                (ManifoldKind::Circle, _) => Err(field_error(field, "circle terms are [k, cos, sin]")),
                (ManifoldKind::Torus, _) => Err(field_error(field, "torus terms are [k1, k2, cos, sin]")),
            }
        })
        .collect()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn default_config() -> Self {
        Self::from_json(DEFAULT_CONFIG).expect("the bundled default config is valid")
    }

    pub fn grid(&self) -> Grid {
        match self.manifold.kind {
            ManifoldKind::Circle => Grid::circle(self.manifold.n),
            ManifoldKind::Torus => Grid::torus(self.manifold.n),
        }
    }

    pub fn dt(&self) -> f64 {
        self.integrator.dt
    }

    fn model(&self) -> Result<AmbientModel, ConfigError> {
        match (self.ambient.kind, self.ambient.m) {
            (AmbientKindConfig::Euclidean, Some(m)) if m >= 1 => Ok(AmbientModel::euclidean(m)),
            (AmbientKindConfig::Euclidean, _) => Err(field_error("ambient.m", "euclidean ambient needs m ≥ 1")),
            (AmbientKindConfig::CotangentCircle, None) => Ok(AmbientModel::cotangent_circle()),
            (AmbientKindConfig::CotangentCircle, Some(_)) => {
                Err(field_error("ambient.m", "cotangent_circle takes no dimension"))
            }
        }
    }

    fn names(&self) -> BTreeSet<&str> {
        self.hamiltonians.iter().map(|h| h.name.as_str()).collect()
    }

    fn check_name(&self, field: &str, name: &str) -> Result<(), ConfigError> {
        if self.names().contains(name) {
            Ok(())
        } else {
            Err(field_error(field, format!("unknown Hamiltonian `{name}`")))
        }
    }

    /// Checks everything that does not need the core objects: shapes,
    /// references, signs and the integer gate of the quotient.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let model = self.model()?;
        if self.manifold.n < 4 {
            return Err(field_error("manifold.n", "need at least 4 nodes per angle"));
        }
        if self.manifold.kind == ManifoldKind::Torus && self.manifold.n > 256 {
            return Err(field_error("manifold.n", "torus resolution is capped at 256 per angle"));
        }
        check_positive("manifold.total_volume", self.manifold.total_volume)?;
        parse_terms("manifold.density", &self.manifold.density, self.manifold.kind)?;
        if self.embedding.len() != model.dim() {
            return Err(field_error(
                "embedding",
                format!("expected {} coordinate series, got {}", model.dim(), self.embedding.len()),
            ));
        }
        let dim = self.grid().dim();
        for (i, s) in self.embedding.iter().enumerate() {
            if !s.winding.is_empty() && s.winding.len() != dim {
                return Err(field_error(format!("embedding[{i}].winding"), format!("expected {dim} entries")));
            }
            if s.winding.iter().any(|w| *w != 0) && !model.is_angular(i) {
                return Err(field_error(format!("embedding[{i}].winding"), "only angular coordinates may wind"));
            }
            parse_terms(&format!("embedding[{i}].terms"), &s.terms, self.manifold.kind)?;
        }
        let mut seen = BTreeSet::new();
        for (i, h) in self.hamiltonians.iter().enumerate() {
            if !seen.insert(h.name.as_str()) {
                return Err(field_error(format!("hamiltonians[{i}].name"), format!("duplicate name `{}`", h.name)));
            }
            self.hamiltonian_spec(i, &model)?;
        }
        check_positive("integrator.dt", self.integrator.dt)?;
        if self.checks.n < 16 {
            return Err(field_error("checks.n", "need at least 16 nodes"));
        }
        if self.checks.torus_n < 8 {
            return Err(field_error("checks.torus_n", "need at least 8 nodes per angle"));
        }
        if self.checks.cases == 0 {
            return Err(field_error("checks.cases", "need at least one case"));
        }
        self.validate_experiments(&model)
    }

    fn validate_experiments(&self, model: &AmbientModel) -> Result<(), ConfigError> {
        let ex = &self.experiments;
        if let Some(c) = &ex.momenta {
            check_positive("experiments.momenta.tolerance", c.tolerance)?;
        }
        if let Some(c) = &ex.omega0 {
            check_positive("experiments.omega0.tolerance", c.tolerance)?;
            for (i, [a, b]) in c.pairs.iter().enumerate() {
                self.check_name(&format!("experiments.omega0.pairs[{i}][0]"), a)?;
                self.check_name(&format!("experiments.omega0.pairs[{i}][1]"), b)?;
            }
        }
        if let Some(c) = &ex.flow {
            if c.output_every == 0 {
                return Err(field_error("experiments.flow.output_every", "must be at least 1"));
            }
            check_positive("experiments.flow.drift_constant", c.drift_constant)?;
            for (i, s) in c.schedule.iter().enumerate() {
                let field = format!("experiments.flow.schedule[{i}]");
                self.check_name(&format!("{field}.hamiltonian"), &s.hamiltonian)?;
                if !(s.duration >= 0.0 && s.duration.is_finite()) {
                    return Err(field_error(format!("{field}.duration"), "must be non-negative"));
                }
                step_count(s.duration, self.integrator.dt)
                    .map_err(|e| field_error(format!("{field}.duration"), e.to_string()))?;
            }
        }
        if let Some(c) = &ex.berry {
            if c.eps.is_empty() {
                return Err(field_error("experiments.berry.eps", "need at least one loop size"));
            }
            for (i, e) in c.eps.iter().enumerate() {
                check_positive(&format!("experiments.berry.eps[{i}]"), *e)?;
            }
            check_positive("experiments.berry.tolerance", c.tolerance)?;
            if c.steps == 0 {
                return Err(field_error("experiments.berry.steps", "must be at least 1"));
            }
            if c.cells == 0 {
                return Err(field_error("experiments.berry.cells", "must be at least 1"));
            }
            match &c.family {
                FamilyConfig::Translation { axes, shear } => {
                    if axes.iter().any(|a| *a >= model.dim()) || axes[0] == axes[1] {
                        return Err(field_error(
                            "experiments.berry.family.axes",
                            format!("need two distinct coordinates below {}", model.dim()),
                        ));
                    }
                    if !shear.is_finite() {
                        return Err(field_error("experiments.berry.family.shear", "must be finite"));
                    }
                }
                FamilyConfig::Flows { hamiltonians, substeps } => {
                    self.check_name("experiments.berry.family.hamiltonians[0]", &hamiltonians[0])?;
                    self.check_name("experiments.berry.family.hamiltonians[1]", &hamiltonians[1])?;
                    if *substeps == 0 {
                        return Err(field_error("experiments.berry.family.substeps", "must be at least 1"));
                    }
                }
            }
            let a = self.manifold.total_volume;
            if c.quotient && (a.fract() != 0.0 || a < 1.0) {
                return Err(field_error(
                    "manifold.total_volume",
                    format!("the Z_a quotient in experiments.berry requires an integer total volume, got {a}"),
                ));
            }
        }
        if let Some(c) = &ex.lift {
            check_positive("experiments.lift.tolerance", c.tolerance)?;
            if c.basepoint >= self.grid().len() {
                return Err(field_error("experiments.lift.basepoint", "outside the grid"));
            }
            if !c.offset.is_finite() {
                return Err(field_error("experiments.lift.offset", "must be finite"));
            }
        }
        Ok(())
    }

    fn hamiltonian_spec(&self, i: usize, model: &AmbientModel) -> Result<HamiltonianSpec, ConfigError> {
        let h = &self.hamiltonians[i];
        let field = format!("hamiltonians[{i}]");
        let spec = match (&h.polynomial, &h.cylinder) {
            (Some(terms), None) => HamiltonianSpec::Polynomial(
                terms.iter().map(|t| Monomial { coeff: t.coeff, powers: t.powers.clone() }).collect(),
            ),
            (None, Some(terms)) => HamiltonianSpec::Cylinder(
                terms
                    .iter()
                    .map(|t| CylinderTerm {
                        coeff: t.coeff,
                        freq: t.freq,
                        wave: match t.wave {
                            WaveConfig::Cos => Wave::Cos,
                            WaveConfig::Sin => Wave::Sin,
                        },
                        p_power: t.p_power,
                    })
                    .collect(),
            ),
            _ => return Err(field_error(field, "give exactly one of `polynomial` or `cylinder`")),
        };
        spec.check(model).map_err(|e| field_error(field, e.to_string()))?;
        Ok(spec)
    }

    /// Builds the core objects; density positivity and the embedding's
    /// validity are reported against their fields.
    pub fn setup(&self) -> Result<Setup, ConfigError> {
        let model = self.model()?;
        let grid = self.grid();
        let density = TrigPoly::new(parse_terms("manifold.density", &self.manifold.density, self.manifold.kind)?);
        let manifold = ModelManifold::new(grid, density, self.manifold.total_volume)
            .map_err(|e| field_error("manifold.density", e.to_string()))?;
        let series = self
            .embedding
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut winding = [0, 0];
                winding[..s.winding.len()].copy_from_slice(&s.winding);
                Ok(CoordinateSeries::winding(
                    winding,
                    parse_terms(&format!("embedding[{i}].terms"), &s.terms, self.manifold.kind)?,
                ))
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let embedding =
            Embedding::from_series(model, grid, &series).map_err(|e| field_error("embedding", e.to_string()))?;
        let hamiltonians = (0..self.hamiltonians.len())
            .map(|i| Ok((self.hamiltonians[i].name.clone(), self.hamiltonian_spec(i, &model)?)))
            .collect::<Result<_, ConfigError>>()?;
        Ok(Setup { model, manifold, embedding, hamiltonians })
    }

    /// The configured flow schedule.
    pub fn schedule(&self, setup: &Setup, flow: &FlowConfig) -> Result<FlowSchedule, ConfigError> {
        let segments = flow.schedule.iter().map(|s| (setup.hamiltonian(&s.hamiltonian).clone(), s.duration)).collect();
        FlowSchedule::new(segments, self.integrator.dt, flow.output_every)
            .map_err(|e| field_error("experiments.flow", e.to_string()))
    }
}
