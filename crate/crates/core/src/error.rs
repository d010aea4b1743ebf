use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sample grids do not match")]
    GridMismatch,

    #[error("Hamiltonian term not supported by the {model} model")]
    UnsupportedTerm { model: &'static str },

    #[error("density is not strictly positive (min sample {min})")]
    DegenerateDensity { min: f64 },

    #[error("not an immersion: smallest singular value {value} at node {node}")]
    NotImmersed { node: usize, value: f64 },

    #[error("not injective: nodes {a} and {b} are {distance} apart")]
    NotInjective { a: usize, b: usize, distance: f64 },

    #[error("reparametrization is not an orientation-preserving diffeomorphism (jacobian {jacobian} at node {node})")]
    NotDiffeomorphism { node: usize, jacobian: f64 },

    #[error("direction leaves the isodrast: period {period} on cycle {cycle}")]
    NonHamiltonianDirection { cycle: usize, period: f64 },

    #[error("loop is not exact: period {period} of the pulled-back primitive on cycle {cycle}")]
    NonExactLoop { cycle: usize, period: f64 },

    #[error("lift is not tangent to the momentum level set (period derivative {derivative})")]
    NotLevelSetTangent { derivative: f64 },

    #[error("submanifold is not Lagrangian: {reason}")]
    NotLagrangian { reason: &'static str },

    #[error("identity `{name}` violated: residual {residual} exceeds {tolerance}")]
    IdentityViolated { name: &'static str, residual: f64, tolerance: f64 },

    #[error("fixed-point iteration did not converge (update {update} after {iterations} iterations)")]
    NoConvergence { iterations: usize, update: f64 },

    #[error("step size {dt} does not divide duration {duration}")]
    StepMismatch { duration: f64, dt: f64 },

    #[error("embedding became invalid at t = {time}: {source}")]
    InvalidDuringFlow { time: f64, source: alloc::boxed::Box<Error> },

    #[error("path jumps by {jump} between samples {index} and {next}", next = index + 1)]
    DiscontinuousPath { index: usize, jump: f64 },

    #[error("path is not closed (end point differs by {distance})")]
    OpenPath { distance: f64 },

    #[error("total volume {value} is not a positive integer")]
    NonIntegerVolume { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
