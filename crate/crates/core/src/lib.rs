//! Numerical laboratory for the momentum maps of the ideal fluid dual pair on
//! loop spaces, the reduced symplectic form on weighted isotropic
//! submanifolds, and the prequantum (Berry) connection over them.
//!
//! Everything here is pure computation over immutable values and only needs
//! `alloc`. File formats, configuration and the command line live in the
//! `isodrast-lab` crate.
//!
//! Module map:
//!
//! * [`ambient`]: exact symplectic models `(S, ω = -dθ, g, J)`, Hamiltonians
//!   from a closed basis, and the trivial prequantum bundle `P = S × S¹`.
//! * [`loops`]: Fourier-discretized embeddings of `S¹` / `T²`, pullbacks,
//!   periods, the weak form `ω̄` and the left momentum map.
//! * [`grassmann`]: weighted submanifolds `(N, ν)`, the `(u_N, dγ)` tangent
//!   decomposition and the reduced form `ω₀`.
//! * [`flows`]: implicit-midpoint Hamiltonian flows acting on embeddings.
//! * [`prequantum`]: horizontal lifts, the averaged connection and holonomy.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ambient;
pub mod error;
pub mod flows;
pub mod grassmann;
pub mod loops;
pub mod prequantum;
pub mod spectral;

pub use error::{Error, Result};

use core::f64::consts::{PI, TAU};
#[allow(unused_imports)]
use num_traits::Float;

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut r = angle % TAU;
    if r < 0.0 {
        r += TAU;
    }
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}
