//! Solitary-wave profiles of the traveling-wave ODE on a symmetric grid.
//!
//! Substituting `U(x, t) = Ubar(x - s t)` into the model and integrating once
//! gives the planar Hamiltonian ODE
//!
//! ```text
//! vbar'' = -(1/kappa) (s^2 (vbar - v_inf) + p(vbar) - p(v_inf))
//! ```
//!
//! together with `ubar - u_inf = -s (vbar - v_inf)`. The homoclinic orbit
//! lives on the zero level set of the conserved energy
//! `E = (kappa/2) v'^2 - W(v)` with potential
//! `W(v) = -int_{v_inf}^{v} (s^2 (z - v_inf) + p(z) - p(v_inf)) dz`,
//! so the profile is a quadrature: locate the turning point `v*` as the
//! nearest root of `W`, then invert the travel time
//! `x(v) = int_v^{v*} dz / sqrt(2 W(z) / kappa)` onto a uniform grid. The
//! square-root turning-point singularity is removed by the substitution
//! `z = v* - t^2`; past the quadrature window the tail is continued
//! analytically with the saddle rate `nu`.

use std::io::Write;

use crate::model::{saddle_check, sound_speed_c, ModelParams, Speed};
use crate::quadrature;
use crate::{Error, Result};

/// Options for [`solve_profile_with`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// Relative target for the travel-time quadrature.
    pub quad_rtol: f64,
    /// Truncation target: `|vbar(+-L) - v_inf| <= tail_tol`.
    pub tail_tol: f64,
    /// Grid resolution target `nu * h <= nu_h`.
    pub nu_h: f64,
    /// Depth of the quadrature window relative to the wave amplitude; beyond
    /// it the tail is analytic.
    pub match_frac: f64,
    /// Force the half-length (must still satisfy the tail target).
    pub l_override: Option<f64>,
    /// Force the grid step.
    pub h_override: Option<f64>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            quad_rtol: 1e-13,
            tail_tol: 1e-12,
            nu_h: 0.05,
            match_frac: 1e-9,
            l_override: None,
            h_override: None,
        }
    }
}

/// A solitary wave at speed `s`, sampled on the uniform symmetric grid
/// `x_j = -L + j h`, `j = 0..=2N`, crest at the origin.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub s: Speed,
    /// Half-length of the window; the grid covers `[-L, L]`.
    pub half_length: f64,
    pub h: f64,
    pub x: Vec<f64>,
    pub vbar: Vec<f64>,
    pub vbar_x: Vec<f64>,
    pub vbar_xx: Vec<f64>,
    pub ubar: Vec<f64>,
    /// Tail decay rate (saddle eigenvalue).
    pub nu: f64,
    /// `a+` in `vbar(x) - v_inf ~ a+ exp(-nu x)` as `x -> +inf`.
    pub tail_amp_plus: f64,
    /// `a-` in `vbar(x) - v_inf ~ a- exp(+nu x)` as `x -> -inf`.
    pub tail_amp_minus: f64,
    /// Turning-point value `v* = vbar(0)`.
    pub v_crest: f64,
    pub v_inf: f64,
    pub u_inf: f64,
}

/// The potential `W(v)` of the profile ODE; `W(v_inf) = W'(v_inf) = 0` and
/// `W > 0` strictly between `v_inf` and the turning point of a homoclinic.
pub(crate) fn potential_w(params: &ModelParams, s: Speed, v: f64) -> f64 {
    let dv = v - params.v_inf;
    -(0.5 * s.0 * s.0 * dv * dv + params.pressure.p_potential(params.v_inf, v))
}

/// `W'(v) = -(s^2 (v - v_inf) + p(v) - p(v_inf))`; equals `kappa * vbar''`.
pub(crate) fn potential_w_prime(params: &ModelParams, s: Speed, v: f64) -> f64 {
    -(s.0 * s.0 * (v - params.v_inf) + params.pressure.p(v) - params.pressure.p(params.v_inf))
}

/// Classic Brent root finder on a bracketing interval.
fn brent_root<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::Numerics(format!(
            "brent: no sign change on [{a}, {b}]"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Locates the turning point: the root of `W` nearest `v_inf` with `W > 0`
/// strictly between, scanning both directions.
fn find_turning_point(params: &ModelParams, s: Speed) -> Result<f64> {
    let scale = 1.0 + params.v_inf.abs();
    let mut candidates: Vec<f64> = Vec::new();
    for dir in [1.0, -1.0] {
        let mut prev = params.v_inf;
        let mut offset = 1e-4 * scale;
        let mut found = None;
        while offset < 1e6 * scale {
            let v = params.v_inf + dir * offset;
            if !params.pressure.admissible_v(v) {
                break;
            }
            if potential_w(params, s, v) <= 0.0 {
                let root = brent_root(
                    |z| potential_w(params, s, z),
                    prev,
                    v,
                    1e-15 * scale,
                )?;
                found = Some(root);
                break;
            }
            prev = v;
            offset *= 1.25;
        }
        if let Some(root) = found {
            candidates.push(root);
        }
    }
    let v_star = candidates
        .into_iter()
        .min_by(|a, b| {
            let da = (a - params.v_inf).abs();
            let db = (b - params.v_inf).abs();
            da.partial_cmp(&db).unwrap()
        })
        .ok_or_else(|| {
            Error::NoHomoclinic(format!(
                "potential W has no root besides v_inf = {} at s = {}",
                params.v_inf, s.0
            ))
        })?;
    if potential_w_prime(params, s, v_star).abs() < 1e-12 * scale {
        return Err(Error::NoHomoclinic(format!(
            "degenerate turning point at v* = {v_star} (W' vanishes)"
        )));
    }
    Ok(v_star)
}

/// Travel time from the crest to `v`, by Gauss-Kronrod after the
/// singularity-removing substitution `z = v* - d t^2`.
fn x_of_v(params: &ModelParams, s: Speed, v_star: f64, v: f64, rtol: f64) -> Result<f64> {
    let d = (v_star - params.v_inf).signum();
    let t_max = (d * (v_star - v)).sqrt();
    if !t_max.is_finite() {
        return Err(Error::Numerics(format!("x_of_v: v = {v} beyond crest")));
    }
    let wp_star = potential_w_prime(params, s, v_star).abs();
    let flat = 2.0 / (2.0 * wp_star / params.kappa).sqrt();
    let integrand = |t: f64| {
        let z = v_star - d * t * t;
        let w = potential_w(params, s, z);
        if w <= 0.0 {
            // Roundoff at the turning point; use the linearized potential.
            flat
        } else {
            2.0 * t / (2.0 * w / params.kappa).sqrt()
        }
    };
    quadrature::integrate(integrand, 0.0, t_max, rtol, 1e-16)
}

/// Computes the homoclinic profile. `tol` is the relative quadrature target;
/// all other knobs take their defaults.
pub fn solve_profile(params: &ModelParams, s: Speed, tol: f64) -> Result<WaveProfile> {
    solve_profile_with(
        params,
        s,
        &ProfileOptions {
            quad_rtol: tol,
            ..ProfileOptions::default()
        },
    )
}

/// Computes the homoclinic profile with explicit options.
pub fn solve_profile_with(
    params: &ModelParams,
    s: Speed,
    opts: &ProfileOptions,
) -> Result<WaveProfile> {
    params.validate()?;
    let check = saddle_check(params, s);
    if !check.admissible {
        return Err(Error::NotAdmissible {
            margin: check.margin,
        });
    }
    let nu = sound_speed_c(params, s)?.nu;
    let v_star = find_turning_point(params, s)?;
    let amp = (v_star - params.v_inf).abs();
    let dir = (v_star - params.v_inf).signum();

    // Quadrature window: invert x(v) down to |v - v_inf| = match_frac * amp,
    // then continue with the analytic tail.
    let v_match = params.v_inf + dir * opts.match_frac * amp;
    let x_match = x_of_v(params, s, v_star, v_match, opts.quad_rtol)?;
    let tail_amp = (v_match - params.v_inf) * (nu * x_match).exp();

    // Window length from the actual tail amplitude.
    let needed_l = ((tail_amp.abs() / opts.tail_tol).ln() / nu).max(x_match + 1.0);
    let half_length = match opts.l_override {
        Some(l) => {
            if tail_amp.abs() * (-nu * l).exp() > opts.tail_tol * 1.0001 {
                return Err(Error::InvalidConfig(format!(
                    "L = {l} too small for tail_tol = {}; need at least {needed_l:.2}",
                    opts.tail_tol
                )));
            }
            l
        }
        None => needed_l,
    };
    let h_target = opts.h_override.unwrap_or(opts.nu_h / nu);
    let n_half = (half_length / h_target).ceil().max(4.0) as usize;
    let h = half_length / n_half as f64;

    let n = 2 * n_half;
    let mut x = vec![0.0; n + 1];
    let mut vbar = vec![0.0; n + 1];
    let mut vbar_x = vec![0.0; n + 1];
    let mut vbar_xx = vec![0.0; n + 1];
    let mut ubar = vec![0.0; n + 1];

    // Fill x >= 0, marching outward so each Brent bracket is tight.
    let mut v_prev = v_star;
    for j in 0..=n_half {
        let xj = h * j as f64;
        let idx = n_half + j;
        x[idx] = xj;
        let v = if j == 0 {
            v_star
        } else if xj >= x_match {
            params.v_inf + tail_amp * (-nu * xj).exp()
        } else {
            let g = |z: f64| match x_of_v(params, s, v_star, z, opts.quad_rtol) {
                Ok(val) => val - xj,
                Err(_) => f64::NAN,
            };
            let (lo, hi) = if dir > 0.0 { (v_match, v_prev) } else { (v_prev, v_match) };
            let root = brent_root(g, lo, hi, 1e-14 * amp)?;
            if !root.is_finite() {
                return Err(Error::QuadratureFailure(format!(
                    "profile inversion failed at x = {xj}"
                )));
            }
            root
        };
        let w = potential_w(params, s, v).max(0.0);
        vbar[idx] = v;
        vbar_x[idx] = if j == 0 {
            0.0
        } else if xj >= x_match {
            -nu * (v - params.v_inf)
        } else {
            -dir * (2.0 * w / params.kappa).sqrt()
        };
        vbar_xx[idx] = potential_w_prime(params, s, v) / params.kappa;
        v_prev = v;
    }
    // Even symmetry fixes the phase: crest at the origin.
    for j in 1..=n_half {
        x[n_half - j] = -x[n_half + j];
        vbar[n_half - j] = vbar[n_half + j];
        vbar_x[n_half - j] = -vbar_x[n_half + j];
        vbar_xx[n_half - j] = vbar_xx[n_half + j];
    }
    for idx in 0..=n {
        ubar[idx] = params.u_inf - s.0 * (vbar[idx] - params.v_inf);
    }

    let profile = WaveProfile {
        s,
        half_length,
        h,
        x,
        vbar,
        vbar_x,
        vbar_xx,
        ubar,
        nu,
        tail_amp_plus: tail_amp,
        tail_amp_minus: tail_amp,
        v_crest: v_star,
        v_inf: params.v_inf,
        u_inf: params.u_inf,
    };

    let e_max = profile.first_integral_max(params);
    let e_scale = potential_w(params, s, v_star - 0.5 * dir * amp).abs().max(1.0);
    if e_max > 1e-10 * e_scale {
        return Err(Error::QuadratureFailure(format!(
            "first integral residual {e_max:e} exceeds 1e-10 (scale {e_scale:e})"
        )));
    }
    Ok(profile)
}

impl WaveProfile {
    /// Max over the grid of the conserved-energy residual
    /// `E = (kappa/2) vbar_x^2 - W(vbar)`, which vanishes on the homoclinic.
    pub fn first_integral_max(&self, params: &ModelParams) -> f64 {
        self.vbar
            .iter()
            .zip(&self.vbar_x)
            .map(|(&v, &vx)| {
                (0.5 * params.kappa * vx * vx - potential_w(params, self.s, v)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Least-squares slope of `ln |vbar - v_inf|` over grid points with
    /// `x_lo <= x <= x_hi`; `None` if fewer than two usable points.
    pub fn tail_rate_fit(&self, x_lo: f64, x_hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .x
            .iter()
            .zip(&self.vbar)
            .filter(|(&x, &v)| x >= x_lo && x <= x_hi && (v - self.v_inf).abs() > 0.0)
            .map(|(&x, &v)| (x, (v - self.v_inf).abs().ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    }

    /// Writes the profile as CSV with columns `x,vbar,vbar_x,vbar_xx,ubar`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,vbar,vbar_x,vbar_xx,ubar")?;
        for i in 0..self.x.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.x[i], self.vbar[i], self.vbar_x[i], self.vbar_xx[i], self.ubar[i]
            )?;
        }
        Ok(())
    }

    /// Index of the grid point at `x = 0`.
    pub fn crest_index(&self) -> usize {
        self.x.len() / 2
    }
}

/// Counts strict sign changes of a sampled function, skipping exact zeros.
pub(crate) fn count_sign_changes(values: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

/// Number of interior nodes (sign changes) of `vbar_x`; one for a genuine
/// single-crest solitary wave, which caps the unstable eigenvalue count.
pub fn node_count(profile: &WaveProfile) -> usize {
    count_sign_changes(&profile.vbar_x)
}

/// A centered profile triple with finite-difference speed derivatives on a
/// shared grid.
#[derive(Debug, Clone)]
pub struct ProfileFamily {
    pub center: WaveProfile,
    pub minus: WaveProfile,
    pub plus: WaveProfile,
    pub ds: f64,
    /// `d vbar / d s` at the center speed, phase-locked by even symmetry.
    pub ds_vbar: Vec<f64>,
    /// `d ubar / d s` at the center speed.
    pub ds_ubar: Vec<f64>,
}

/// Solves the profiles at `s_bar - ds, s_bar, s_bar + ds` on one grid and
/// forms centered speed derivatives.
pub fn family_at(params: &ModelParams, s_bar: Speed, ds: f64) -> Result<ProfileFamily> {
    family_at_with(params, s_bar, ds, &ProfileOptions::default())
}

pub fn family_at_with(
    params: &ModelParams,
    s_bar: Speed,
    ds: f64,
    base: &ProfileOptions,
) -> Result<ProfileFamily> {
    if ds <= 0.0 {
        return Err(Error::InvalidConfig(format!("ds must be positive, got {ds}")));
    }
    // Grid sized for the worst member of the band. nu depends on s only
    // through s^2: the largest |s| decays slowest (longest window), the
    // smallest |s| decays fastest (finest step) and has the largest amplitude.
    let s_hi = Speed(s_bar.0.abs() + ds);
    let s_lo = Speed((s_bar.0.abs() - ds).max(0.0));
    let nu_min = sound_speed_c(params, s_hi)?.nu;
    let nu_max = sound_speed_c(params, s_lo)?.nu;

    let v_star_lo = find_turning_point(params, s_lo)?;
    let amp_max = (v_star_lo - params.v_inf).abs();
    let mut l = ((4.0 * amp_max.max(base.tail_tol) / base.tail_tol).ln() / nu_min) * 1.05;
    let h = base.nu_h / nu_max;

    // The 4*amp tail-amplitude guess is exact for sech^2 profiles; widen the
    // window if a heavier tail rejects it.
    let solve_all = |l: f64| -> Result<(WaveProfile, WaveProfile, WaveProfile)> {
        let opts = ProfileOptions {
            l_override: Some(l),
            h_override: Some(h),
            ..*base
        };
        Ok((
            solve_profile_with(params, s_bar, &opts)?,
            solve_profile_with(params, Speed(s_bar.0 - ds), &opts)?,
            solve_profile_with(params, Speed(s_bar.0 + ds), &opts)?,
        ))
    };
    let (center, minus, plus) = loop {
        match solve_all(l) {
            Ok(triple) => break triple,
            Err(Error::InvalidConfig(_)) if l < 1e4 => l *= 1.3,
            Err(e) => return Err(e),
        }
    };

    let n = center.x.len();
    debug_assert_eq!(minus.x.len(), n);
    debug_assert_eq!(plus.x.len(), n);
    let mut ds_vbar = vec![0.0; n];
    let mut ds_ubar = vec![0.0; n];
    for i in 0..n {
        ds_vbar[i] = (plus.vbar[i] - minus.vbar[i]) / (2.0 * ds);
        ds_ubar[i] = (plus.ubar[i] - minus.ubar[i]) / (2.0 * ds);
    }
    Ok(ProfileFamily {
        center,
        minus,
        plus,
        ds,
        ds_vbar,
        ds_ubar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_params() -> ModelParams {
        ModelParams::default()
    }

    /// Closed-form homoclinic of the default quadratic law:
    /// `vbar(x) = A sech^2(nu x / 2)` with `A = 3 (1 - s^2) / (2 b)`.
    fn closed_form(s: f64, kappa: f64, b: f64, x: f64) -> f64 {
        let nu = ((1.0 - s * s) / kappa).sqrt();
        let amp = 1.5 * (1.0 - s * s) / b;
        amp / (0.5 * nu * x).cosh().powi(2)
    }

    #[test]
    fn closed_form_satisfies_profile_ode() {
        // Oracle check by substitution: the closed form solves
        // v'' = (1/kappa)((1 - s^2) v - b v^2) for the default law.
        let (s, kappa, b) = (0.6, 1.0, 1.0);
        let nu = ((1.0 - s * s) / kappa).sqrt();
        let amp = 1.5 * (1.0 - s * s) / b;
        for k in 0..60 {
            let x = -6.0 + 0.2 * k as f64;
            let k2 = 0.5 * nu;
            let sech2 = 1.0 / (k2 * x).cosh().powi(2);
            let v = amp * sech2;
            // (sech^2)'' = 4 k^2 sech^2 - 6 k^2 sech^4
            let vxx = amp * (4.0 * k2 * k2 * sech2 - 6.0 * k2 * k2 * sech2 * sech2);
            let rhs = ((1.0 - s * s) * v - b * v * v) / kappa;
            assert_relative_eq!(vxx, rhs, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn quadrature_profile_matches_closed_form() {
        let params = default_params();
        for s in [0.6, 0.0] {
            let profile = solve_profile(&params, Speed(s), 1e-13).unwrap();
            let mut max_err = 0.0f64;
            for (&x, &v) in profile.x.iter().zip(&profile.vbar) {
                max_err = max_err.max((v - closed_form(s, 1.0, 1.0, x)).abs());
            }
            assert!(
                max_err <= 1e-8,
                "s = {s}: max |v_quadrature - v_closed| = {max_err:e}"
            );
        }
    }

    #[test]
    fn crest_and_rate_values() {
        let params = default_params();
        let profile = solve_profile(&params, Speed(0.6), 1e-13).unwrap();
        assert_relative_eq!(profile.v_crest, 0.96, max_relative = 1e-12);
        assert_relative_eq!(profile.nu, 0.8, max_relative = 1e-15);
        assert_relative_eq!(profile.vbar[profile.crest_index()], 0.96, max_relative = 1e-12);

        let profile0 = solve_profile(&params, Speed(0.0), 1e-13).unwrap();
        assert_relative_eq!(profile0.v_crest, 1.5, max_relative = 1e-12);
    }

    #[test]
    fn linear_pressure_has_no_homoclinic() {
        let params = ModelParams {
            pressure: crate::model::PressureLaw::Quadratic { a: -1.0, b: 0.0 },
            ..default_params()
        };
        assert!(matches!(
            solve_profile(&params, Speed(0.5), 1e-12),
            Err(Error::NoHomoclinic(_))
        ));
    }

    #[test]
    fn first_integral_and_symmetry() {
        let params = default_params();
        let profile = solve_profile(&params, Speed(0.6), 1e-13).unwrap();
        assert!(profile.first_integral_max(&params) <= 1e-10);
        let n = profile.x.len();
        for j in 0..n {
            assert_eq!(profile.vbar[j], profile.vbar[n - 1 - j]);
            assert_eq!(profile.vbar_x[j], -profile.vbar_x[n - 1 - j]);
        }
        // ubar - u_inf = -s (vbar - v_inf) holds exactly as computed.
        for j in 0..n {
            let lhs = profile.ubar[j] - profile.u_inf;
            let rhs = -0.6 * (profile.vbar[j] - profile.v_inf);
            assert_eq!(lhs, rhs);
        }
        // Tail target.
        assert!((profile.vbar[0] - profile.v_inf).abs() <= 1e-12);
        assert!((profile.vbar[n - 1] - profile.v_inf).abs() <= 1e-12);
    }

    #[test]
    fn tail_rate_matches_nu() {
        let params = default_params();
        let profile = solve_profile(&params, Speed(0.6), 1e-13).unwrap();
        let l = profile.half_length;
        // Last decade of the grid (analytic-tail region).
        let slope = profile
            .tail_rate_fit(l - 10.0f64.ln() / profile.nu, l)
            .unwrap();
        assert_relative_eq!(slope, -profile.nu, max_relative = 1e-3);
        // A decade inside the quadrature window, where the fit is nontrivial.
        let x_mid = 0.55 * l;
        let slope = profile
            .tail_rate_fit(x_mid - 10.0f64.ln() / profile.nu, x_mid)
            .unwrap();
        assert_relative_eq!(slope, -profile.nu, max_relative = 1e-3);
    }

    #[test]
    fn node_count_examples() {
        let params = default_params();
        let p06 = solve_profile(&params, Speed(0.6), 1e-12).unwrap();
        assert_eq!(node_count(&p06), 1);
        let p0 = solve_profile(&params, Speed(0.0), 1e-12).unwrap();
        assert_eq!(node_count(&p0), 1);
        // Synthetic monotone data has no nodes.
        assert_eq!(count_sign_changes(&[0.5, 0.4, 0.3, 0.2, 0.1]), 0);
        assert_eq!(count_sign_changes(&[0.5, 0.0, -0.5]), 1);
    }

    #[test]
    fn family_amplitude_derivative() {
        let params = default_params();
        let family = family_at(&params, Speed(0.6), 1e-3).unwrap();
        let crest = family.center.crest_index();
        // d/ds [3 (1 - s^2) / 2] = -3 s = -1.8 at s = 0.6.
        assert_relative_eq!(family.ds_vbar[crest], -1.8, max_relative = 1e-5);
        // d ubar/ds = -(vbar - v_inf) - s d vbar/ds pointwise.
        for i in (0..family.center.x.len()).step_by(37) {
            let expect = -(family.center.vbar[i] - params.v_inf) - 0.6 * family.ds_vbar[i];
            assert_relative_eq!(family.ds_ubar[i], expect, epsilon = 1e-6, max_relative = 1e-4);
        }
    }

    #[test]
    fn family_zero_speed_derivative_vanishes() {
        let params = default_params();
        let family = family_at(&params, Speed(0.0), 1e-3).unwrap();
        let max_ds: f64 = family.ds_vbar.iter().fold(0.0, |m, &v| m.max(v.abs()));
        // Odd symmetry in s: the centered difference is O(ds^2).
        assert!(max_ds <= 1e-4, "max |ds_vbar| = {max_ds:e}");
    }

    #[test]
    fn family_richardson_order() {
        let params = default_params();
        let s = Speed(0.6);
        let f1 = family_at(&params, s, 1e-3).unwrap();
        let f2 = family_at(&params, s, 5e-4).unwrap();
        let f4 = family_at(&params, s, 2.5e-4).unwrap();
        // Compare at the crest (grids differ between families).
        let d12 = (f1.ds_vbar[f1.center.crest_index()] - f2.ds_vbar[f2.center.crest_index()]).abs();
        let d24 = (f2.ds_vbar[f2.center.crest_index()] - f4.ds_vbar[f4.center.crest_index()]).abs();
        // O(ds^2): halving ds shrinks the change by ~4.
        assert!(
            d12 / d24 > 2.5 && d12 / d24 < 6.0,
            "ratio = {} (d12 = {d12:e}, d24 = {d24:e})",
            d12 / d24
        );
    }

    #[test]
    fn window_override_keeps_crest() {
        let params = default_params();
        let base = solve_profile(&params, Speed(0.6), 1e-13).unwrap();
        let wide = solve_profile_with(
            &params,
            Speed(0.6),
            &ProfileOptions {
                l_override: Some(40.0),
                ..ProfileOptions::default()
            },
        )
        .unwrap();
        assert!((base.v_crest - wide.v_crest).abs() <= 1e-10);
        let too_small = solve_profile_with(
            &params,
            Speed(0.6),
            &ProfileOptions {
                l_override: Some(5.0),
                ..ProfileOptions::default()
            },
        );
        assert!(matches!(too_small, Err(Error::InvalidConfig(_))));
    }
}
