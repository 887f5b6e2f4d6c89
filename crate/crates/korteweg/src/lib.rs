//! Solitary waves of the isentropic Korteweg capillarity model and their
//! spectral stability.
//!
//! The model is compressible gas dynamics in Lagrangian coordinates with a
//! capillarity correction,
//!
//! ```text
//! v_t - u_x = 0
//! u_t + p(v)_x = -kappa v_xxx
//! ```
//!
//! with specific volume `v`, velocity `u`, pressure `p(v)` and constant
//! capillarity `kappa > 0`. The crate computes
//!
//! - homoclinic traveling-wave profiles `(vbar, ubar)(x - s t)` by quadrature
//!   on the conserved-energy level set of the profile ODE ([`profile`]),
//! - the conserved functionals `Q`, `H`, the moment of instability
//!   `m(s) = H + s Q`, its speed derivatives, and the Melnikov integral
//!   `gamma` ([`functionals`]),
//! - the Evans function `D(lambda)` by exterior-square (compound-matrix)
//!   integration of the linearized eigenvalue system, with derivatives at the
//!   origin and the large-`lambda` sign ([`evans`]),
//! - essential-spectrum diagnostics, real unstable roots of `D`, and a final
//!   stability verdict combining the independent criteria ([`spectrum`]).
//!
//! The central identity under test is `D''(0) = (-C/kappa) * m''(s)` with
//! `C = 2c(p'(v_inf) + s^2) < 0`, which ties the sign of the Evans curvature
//! at the origin to convexity of the moment of instability, and hence decides
//! stability.
//!
//! See the `examples/` directory for runnable entry points to each
//! capability, and the `korteweg` binary for the CSV/JSON pipeline.

pub mod cli;
pub mod evans;
pub mod functionals;
pub mod model;
pub mod profile;
pub mod quadrature;
pub mod spectrum;

use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The endstate is not a saddle point of the profile ODE at this speed.
    #[error("saddle condition violated: s^2 + p'(v_inf) = {margin}")]
    NotAdmissible { margin: f64 },

    /// The potential well has no turning point, so no homoclinic loop exists.
    #[error("no homoclinic orbit: {0}")]
    NoHomoclinic(String),

    /// An adaptive quadrature failed to reach its error target.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// The 2-2 stable/unstable eigenvalue split of the limiting coefficient
    /// matrix failed for Re(lambda) > 0, which indicates a numerical fault.
    #[error("consistent splitting lost at lambda = {lambda}: {n_stable} stable / {n_unstable} unstable")]
    SplittingLost {
        lambda: Complex64,
        n_stable: usize,
        n_unstable: usize,
    },

    /// Adaptive step size underflowed during ODE integration.
    #[error("ODE integration failure: step size underflow at x = {x}")]
    IntegrationFailure { x: f64 },

    /// The renormalized exterior-square state left the representable range.
    #[error("normalization overflow: accumulated rescale exponent {log2_scale}")]
    NormalizationOverflow { log2_scale: i64 },

    /// The polynomial fit near lambda = 0 did not resolve the derivatives.
    #[error("Evans derivative fit unstable: residual {residual:e} exceeds {tolerance:e}")]
    FitUnstable { residual: f64, tolerance: f64 },

    /// A quantity needed for a sign decision is below its uncertainty.
    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    /// |D''(0)| is below its fit uncertainty, so the stability index has no sign.
    #[error("degenerate stability index: |D''(0)| = {d2:e} below uncertainty {uncertainty:e}")]
    DegenerateIndex { d2: f64, uncertainty: f64 },

    /// Bad user-supplied configuration or option.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Internal numerical contract violated (bug guard, not a user error).
    #[error("numerical fault: {0}")]
    Numerics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use evans::{constant_c, verify_theorem, EvansContext, TheoremReport};
pub use functionals::{moment_report, MomentReport};
pub use model::{saddle_check, sound_speed_c, ModelParams, PressureLaw, Speed};
pub use profile::{family_at, node_count, solve_profile, ProfileFamily, WaveProfile};
pub use spectrum::{dispersion_curve, find_real_roots, verdict, StabilityReport};
