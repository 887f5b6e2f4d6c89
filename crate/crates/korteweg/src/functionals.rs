//! Conserved functionals along the solitary-wave family: the relative
//! momentum `Q`, the relative Hamiltonian `H`, the moment of instability
//! `m(s) = H + s Q`, its speed derivatives, and the Melnikov integral
//! `gamma`.
//!
//! All whole-line integrals are trapezoid sums over the profile grid plus an
//! analytic exponential-tail correction, so the truncation error is
//! `O(exp(-2 nu L))` and the results are h-dominated. The identity chain
//! under test: `m'(s) = Q`, `m''(s) = dQ/ds`, and `gamma = m''(s) / kappa`.

use serde::Serialize;

use crate::model::{ModelParams, Speed};
use crate::profile::{family_at_with, solve_profile, ProfileFamily, ProfileOptions, WaveProfile};
use crate::quadrature::trapezoid;
use crate::{Error, Result};

/// Trapezoid over the grid plus `f(+-L)/rate` tail corrections for an
/// integrand decaying like `exp(-rate |x|)`.
fn whole_line(values: &[f64], h: f64, rate: f64) -> f64 {
    trapezoid(values, h) + (values[0] + values[values.len() - 1]) / rate
}

/// Relative generalized momentum `Q = int (ubar - u_inf)(vbar - v_inf) dx`.
pub fn momentum_q(profile: &WaveProfile) -> f64 {
    let vals: Vec<f64> = (0..profile.x.len())
        .map(|i| (profile.ubar[i] - profile.u_inf) * (profile.vbar[i] - profile.v_inf))
        .collect();
    whole_line(&vals, profile.h, 2.0 * profile.nu)
}

/// Relative Hamiltonian
/// `H = int [ (ubar-u_inf)^2/2 - int_{v_inf}^{vbar}(p - p_inf) + kappa vbar_x^2/2 ] dx`.
pub fn hamiltonian_h(params: &ModelParams, profile: &WaveProfile) -> f64 {
    let vals: Vec<f64> = (0..profile.x.len())
        .map(|i| {
            let du = profile.ubar[i] - profile.u_inf;
            0.5 * du * du - params.pressure.p_potential(params.v_inf, profile.vbar[i])
                + 0.5 * params.kappa * profile.vbar_x[i] * profile.vbar_x[i]
        })
        .collect();
    whole_line(&vals, profile.h, 2.0 * profile.nu)
}

/// Moment of instability on a given profile, `m = H + s Q`.
pub fn moment_of(params: &ModelParams, profile: &WaveProfile) -> f64 {
    hamiltonian_h(params, profile) + profile.s.0 * momentum_q(profile)
}

/// Moment of instability `m(s)`, solving the profile internally.
pub fn moment_m(params: &ModelParams, s: Speed) -> Result<f64> {
    let profile = solve_profile(params, s, 1e-13)?;
    Ok(moment_of(params, &profile))
}

/// Relative masses `P1_v = int (vbar - v_inf) dx` and
/// `P1_u = int (ubar - u_inf) dx = -s P1_v`.
pub fn masses_p(profile: &WaveProfile) -> (f64, f64) {
    let vals: Vec<f64> = profile.vbar.iter().map(|&v| v - profile.v_inf).collect();
    let p1_v = whole_line(&vals, profile.h, profile.nu);
    (p1_v, -profile.s.0 * p1_v)
}

/// The two quadrature forms of the Melnikov integral.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MelnikovGamma {
    /// `kappa^{-1} int (vbar - v_inf) [-s ds_vbar + ds_ubar] dx`.
    pub value: f64,
    /// `kappa^{-1} int [(ubar - u_inf) ds_vbar + (vbar - v_inf) ds_ubar] dx`,
    /// identical up to the `ubar` relation; computed as a cross-check.
    pub alt: f64,
}

/// Evaluates the Melnikov integral `gamma` on a profile family; the theorem
/// identifies it with `m''(s_bar) / kappa`.
pub fn melnikov_gamma(family: &ProfileFamily, params: &ModelParams) -> MelnikovGamma {
    let p = &family.center;
    let s = p.s.0;
    let n = p.x.len();
    let form1: Vec<f64> = (0..n)
        .map(|i| (p.vbar[i] - p.v_inf) * (-s * family.ds_vbar[i] + family.ds_ubar[i]))
        .collect();
    let form2: Vec<f64> = (0..n)
        .map(|i| (p.ubar[i] - p.u_inf) * family.ds_vbar[i] + (p.vbar[i] - p.v_inf) * family.ds_ubar[i])
        .collect();
    let rate = 2.0 * p.nu;
    MelnikovGamma {
        value: whole_line(&form1, p.h, rate) / params.kappa,
        alt: whole_line(&form2, p.h, rate) / params.kappa,
    }
}

/// Profiles on a shared grid at `s_bar + k ds/2` for `k = -2..=2`.
fn band(params: &ModelParams, s_bar: Speed, ds: f64) -> Result<[WaveProfile; 5]> {
    let opts = ProfileOptions::default();
    let outer = family_at_with(params, s_bar, ds, &opts)?;
    // Reuse the outer family's grid for the half-step profiles.
    let shared = ProfileOptions {
        l_override: Some(outer.center.half_length),
        h_override: Some(outer.center.h),
        ..opts
    };
    let half_minus =
        crate::profile::solve_profile_with(params, Speed(s_bar.0 - 0.5 * ds), &shared)?;
    let half_plus =
        crate::profile::solve_profile_with(params, Speed(s_bar.0 + 0.5 * ds), &shared)?;
    Ok([
        outer.minus,
        half_minus,
        outer.center,
        half_plus,
        outer.plus,
    ])
}

/// Second derivative of the moment of instability, by two independent
/// routes: `dQ/ds` (centered difference of `Q`, one Richardson step) and the
/// direct second difference of `m`. Both are returned; agreement is the
/// caller's cross-check.
pub fn d2m_ds2(params: &ModelParams, s_bar: Speed, ds: f64) -> Result<(f64, f64)> {
    if ds <= 0.0 {
        return Err(Error::InvalidConfig(format!("ds must be positive, got {ds}")));
    }
    let profiles = band(params, s_bar, ds)?;
    let q: Vec<f64> = profiles.iter().map(momentum_q).collect();
    let m: Vec<f64> = profiles.iter().map(|p| moment_of(params, p)).collect();

    let dq_full = (q[4] - q[0]) / (2.0 * ds);
    let dq_half = (q[3] - q[1]) / ds;
    let dq_ds = (4.0 * dq_half - dq_full) / 3.0;

    let d2m_full = (m[4] - 2.0 * m[2] + m[0]) / (ds * ds);
    let d2m_half = (m[3] - 2.0 * m[2] + m[1]) / (0.25 * ds * ds);
    let d2m_direct = (4.0 * d2m_half - d2m_full) / 3.0;

    Ok((dq_ds, d2m_direct))
}

/// Everything the moment machinery produces for one configuration and speed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentReport {
    pub s: f64,
    pub q: f64,
    pub h: f64,
    pub m: f64,
    /// `dQ/ds = m''(s)`, centered difference with Richardson refinement.
    pub dq_ds: f64,
    /// `m''(s)` by direct second difference, the independent route.
    pub d2m_direct: f64,
    pub gamma: f64,
    pub gamma_alt: f64,
    pub p1_v: f64,
    pub p1_u: f64,
    /// Relative disagreement of the two `m''` routes.
    pub residual_d2m: f64,
    /// Relative residual of `gamma * kappa = dQ/ds`.
    pub residual_gamma: f64,
}

impl MomentReport {
    /// Whether both cross-checks hold at the given relative tolerance.
    pub fn consistent(&self, rtol: f64) -> bool {
        self.residual_d2m <= rtol && self.residual_gamma <= rtol
    }
}

/// Assembles a full [`MomentReport`] at speed `s` with difference step `ds`.
pub fn moment_report(params: &ModelParams, s: Speed, ds: f64) -> Result<MomentReport> {
    let profiles = band(params, s, ds)?;
    let q: Vec<f64> = profiles.iter().map(momentum_q).collect();
    let m: Vec<f64> = profiles.iter().map(|p| moment_of(params, p)).collect();

    let dq_full = (q[4] - q[0]) / (2.0 * ds);
    let dq_half = (q[3] - q[1]) / ds;
    let dq_ds = (4.0 * dq_half - dq_full) / 3.0;
    let d2m_full = (m[4] - 2.0 * m[2] + m[0]) / (ds * ds);
    let d2m_half = (m[3] - 2.0 * m[2] + m[1]) / (0.25 * ds * ds);
    let d2m_direct = (4.0 * d2m_half - d2m_full) / 3.0;

    let [minus, _, center, _, plus] = profiles;
    let n = center.x.len();
    let mut ds_vbar = vec![0.0; n];
    let mut ds_ubar = vec![0.0; n];
    for i in 0..n {
        ds_vbar[i] = (plus.vbar[i] - minus.vbar[i]) / (2.0 * ds);
        ds_ubar[i] = (plus.ubar[i] - minus.ubar[i]) / (2.0 * ds);
    }
    let family = ProfileFamily {
        center,
        minus,
        plus,
        ds,
        ds_vbar,
        ds_ubar,
    };
    let gamma = melnikov_gamma(&family, params);
    let (p1_v, p1_u) = masses_p(&family.center);

    let scale_d2m = dq_ds.abs().max(1e-12);
    let scale_gamma = dq_ds.abs().max(1e-12);
    Ok(MomentReport {
        s: s.0,
        q: q[2],
        h: m[2] - s.0 * q[2],
        m: m[2],
        dq_ds,
        d2m_direct,
        gamma: gamma.value,
        gamma_alt: gamma.alt,
        p1_v,
        p1_u,
        residual_d2m: (dq_ds - d2m_direct).abs() / scale_d2m,
        residual_gamma: (gamma.value * params.kappa - dq_ds).abs() / scale_gamma,
    })
}
