//! Physical configuration: pressure laws, endstates, wave speeds, and the
//! saddle-point admissibility check that gates every downstream computation.
//!
//! A traveling wave with speed `s` homoclinic to the endstate `(v_inf, u_inf)`
//! can only exist when the endstate is a hyperbolic rest point of the profile
//! ODE, which is the condition `s^2 + p'(v_inf) < 0` checked by
//! [`saddle_check`]. Both the sound speed `c = sqrt(-p'(v_inf))` and the
//! profile tail decay rate `nu = sqrt(-(s^2 + p'(v_inf))/kappa)` derive from
//! the same quantity; [`sound_speed_c`] returns both.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pressure as a function of specific volume, with two derivatives.
///
/// `p''` enters the Evans coefficient matrix through the variable coefficient
/// `alpha'(x) = p''(vbar) vbar_x`, so the three evaluators must be mutually
/// consistent; [`ModelParams::validate`] enforces this with finite
/// differences on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureLaw {
    /// `p(v) = a v + b v^2`.
    Quadratic { a: f64, b: f64 },
    /// `p(v) = rt / (v - bcov) - acoh / v^2`, defined for `v > bcov`.
    VanDerWaals { rt: f64, acoh: f64, bcov: f64 },
}

impl PressureLaw {
    pub fn p(&self, v: f64) -> f64 {
        match *self {
            PressureLaw::Quadratic { a, b } => a * v + b * v * v,
            PressureLaw::VanDerWaals { rt, acoh, bcov } => rt / (v - bcov) - acoh / (v * v),
        }
    }

    pub fn dp(&self, v: f64) -> f64 {
        match *self {
            PressureLaw::Quadratic { a, b } => a + 2.0 * b * v,
            PressureLaw::VanDerWaals { rt, acoh, bcov } => {
                -rt / ((v - bcov) * (v - bcov)) + 2.0 * acoh / (v * v * v)
            }
        }
    }

    pub fn d2p(&self, v: f64) -> f64 {
        match *self {
            PressureLaw::Quadratic { b, .. } => 2.0 * b,
            PressureLaw::VanDerWaals { rt, acoh, bcov } => {
                2.0 * rt / ((v - bcov) * (v - bcov) * (v - bcov)) - 6.0 * acoh / (v * v * v * v)
            }
        }
    }

    /// Closed-form `int_{v0}^{v} (p(z) - p(v0)) dz`.
    pub fn p_potential(&self, v0: f64, v: f64) -> f64 {
        match *self {
            PressureLaw::Quadratic { a, b } => {
                0.5 * a * (v * v - v0 * v0) + b * (v * v * v - v0 * v0 * v0) / 3.0
                    - self.p(v0) * (v - v0)
            }
            PressureLaw::VanDerWaals { rt, acoh, bcov } => {
                rt * ((v - bcov) / (v0 - bcov)).ln() + acoh * (1.0 / v - 1.0 / v0)
                    - self.p(v0) * (v - v0)
            }
        }
    }

    /// Whether `v` is in the law's domain of definition.
    pub fn admissible_v(&self, v: f64) -> bool {
        match *self {
            PressureLaw::Quadratic { .. } => v.is_finite(),
            PressureLaw::VanDerWaals { bcov, .. } => v.is_finite() && v > bcov,
        }
    }
}

/// Wave speed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Speed(pub f64);

impl From<f64> for Speed {
    fn from(s: f64) -> Self {
        Speed(s)
    }
}

impl std::fmt::Display for Speed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The physical configuration: capillarity, pressure law, and endstate.
///
/// Immutable after construction; all operations on it are pure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub pressure: PressureLaw,
    pub v_inf: f64,
    pub u_inf: f64,
}

impl Default for ModelParams {
    /// The worked default configuration: `Quadratic(a = -1, b = 1)`,
    /// `v_inf = u_inf = 0`, `kappa = 1`. This realizes the good-Boussinesq
    /// equivalent of the model and admits closed-form solitons, which the
    /// test suite uses as oracles.
    fn default() -> Self {
        ModelParams {
            kappa: 1.0,
            pressure: PressureLaw::Quadratic { a: -1.0, b: 1.0 },
            v_inf: 0.0,
            u_inf: 0.0,
        }
    }
}

impl ModelParams {
    /// Builds and validates a configuration.
    pub fn new(kappa: f64, pressure: PressureLaw, v_inf: f64, u_inf: f64) -> Result<Self> {
        let params = ModelParams {
            kappa,
            pressure,
            v_inf,
            u_inf,
        };
        params.validate()?;
        Ok(params)
    }

    /// `alpha_inf = p'(v_inf)`, the convection coefficient at the endstate.
    pub fn alpha_inf(&self) -> f64 {
        self.pressure.dp(self.v_inf)
    }

    /// Checks `kappa > 0`, domain admissibility of `v_inf`, and consistency
    /// of `p`, `p'`, `p''` by central differences on a small grid around the
    /// endstate.
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "kappa must be positive and finite, got {}",
                self.kappa
            )));
        }
        if !self.pressure.admissible_v(self.v_inf) {
            return Err(Error::InvalidConfig(format!(
                "v_inf = {} outside the pressure law's domain",
                self.v_inf
            )));
        }
        // Sample points stay on the admissible side of any covolume pole.
        let scale = 1.0 + self.v_inf.abs();
        let spread = match self.pressure {
            PressureLaw::Quadratic { .. } => 0.5 * scale,
            PressureLaw::VanDerWaals { bcov, .. } => 0.25 * (self.v_inf - bcov).min(scale),
        };
        let fd_step = 1e-5 * scale;
        for k in -2i32..=2 {
            let v = self.v_inf + f64::from(k) * 0.5 * spread;
            if !self.pressure.admissible_v(v - fd_step) || !self.pressure.admissible_v(v + fd_step)
            {
                continue;
            }
            let dp_fd = (self.pressure.p(v + fd_step) - self.pressure.p(v - fd_step))
                / (2.0 * fd_step);
            let d2p_fd = (self.pressure.dp(v + fd_step) - self.pressure.dp(v - fd_step))
                / (2.0 * fd_step);
            let dp = self.pressure.dp(v);
            let d2p = self.pressure.d2p(v);
            let dp_scale = dp.abs().max(1e-8);
            let d2p_scale = d2p.abs().max(1e-8);
            if (dp_fd - dp).abs() > 1e-6 * dp_scale {
                return Err(Error::InvalidConfig(format!(
                    "pressure law inconsistent: finite-difference p' = {dp_fd} vs p' = {dp} at v = {v}"
                )));
            }
            if (d2p_fd - d2p).abs() > 1e-6 * d2p_scale {
                return Err(Error::InvalidConfig(format!(
                    "pressure law inconsistent: finite-difference p'' = {d2p_fd} vs p'' = {d2p} at v = {v}"
                )));
            }
        }
        Ok(())
    }

    /// Parses a configuration from TOML text (see README for the schema).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let params: ModelParams = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))?;
        params.validate()?;
        Ok(params)
    }

    /// Loads a configuration from a TOML file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

/// Result of the saddle-point admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleCheck {
    /// `s^2 + p'(v_inf)`; the endstate is a saddle iff this is strictly negative.
    pub margin: f64,
    pub admissible: bool,
}

/// Evaluates `s^2 + p'(v_inf)`. The endstate is a saddle point of the profile
/// ODE, and homoclinic connections can exist, iff the margin is strictly
/// negative.
pub fn saddle_check(params: &ModelParams, s: Speed) -> SaddleCheck {
    let margin = s.0 * s.0 + params.alpha_inf();
    SaddleCheck {
        margin,
        admissible: margin < 0.0,
    }
}

/// Characteristic scales at the endstate: the sound speed and the profile
/// tail decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailScales {
    /// `c = sqrt(-p'(v_inf))`, the slow-mode limit speed.
    pub c: f64,
    /// `nu = sqrt(-(s^2 + p'(v_inf)) / kappa)`, the saddle eigenvalue of the
    /// profile ODE and the exponential decay rate of the wave tails.
    pub nu: f64,
}

/// Returns `c` and `nu`; rejects non-admissible `(params, s)`.
pub fn sound_speed_c(params: &ModelParams, s: Speed) -> Result<TailScales> {
    let alpha_inf = params.alpha_inf();
    let check = saddle_check(params, s);
    if !check.admissible {
        return Err(Error::NotAdmissible {
            margin: check.margin,
        });
    }
    // margin < 0 implies alpha_inf < 0, so both roots are real.
    Ok(TailScales {
        c: (-alpha_inf).sqrt(),
        nu: (-check.margin / params.kappa).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn default_params() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn saddle_check_default_speeds() {
        let p = default_params();
        let c = saddle_check(&p, Speed(0.8));
        assert_relative_eq!(c.margin, -0.36, max_relative = 1e-15);
        assert!(c.admissible);

        let c = saddle_check(&p, Speed(1.0));
        assert_relative_eq!(c.margin, 0.0, epsilon = 1e-15);
        assert!(!c.admissible);

        let c = saddle_check(&p, Speed(1.2));
        assert_relative_eq!(c.margin, 0.44, max_relative = 1e-14);
        assert!(!c.admissible);
    }

    /// Oracle for nu: eigenvalues of the 2x2 linearization of the profile ODE
    /// about the endstate, (v, v')' = [[0, 1], [-(s^2 + p'(v_inf))/kappa, 0]].
    fn nu_from_linearization(params: &ModelParams, s: f64) -> f64 {
        let a21 = -(s * s + params.alpha_inf()) / params.kappa;
        // char poly: mu^2 - a21 = 0 -> real saddle pair +-sqrt(a21) when a21 > 0
        assert!(a21 > 0.0, "not a saddle");
        a21.sqrt()
    }

    #[test]
    fn sound_speed_matches_linearization_oracle() {
        let p = default_params();
        let scales = sound_speed_c(&p, Speed(0.6)).unwrap();
        assert_relative_eq!(scales.c, 1.0, max_relative = 1e-15);
        assert_relative_eq!(scales.nu, 0.8, max_relative = 1e-15);
        assert_relative_eq!(
            scales.nu,
            nu_from_linearization(&p, 0.6),
            max_relative = 1e-15
        );

        let scales = sound_speed_c(&p, Speed(0.0)).unwrap();
        assert_relative_eq!(scales.c, 1.0, max_relative = 1e-15);
        assert_relative_eq!(scales.nu, 1.0, max_relative = 1e-15);

        let p4 = ModelParams {
            kappa: 4.0,
            ..default_params()
        };
        let scales = sound_speed_c(&p4, Speed(0.6)).unwrap();
        assert_relative_eq!(scales.nu, 0.4, max_relative = 1e-15);
        assert_relative_eq!(
            scales.nu,
            nu_from_linearization(&p4, 0.6),
            max_relative = 1e-15
        );
    }

    #[test]
    fn sound_speed_rejects_non_admissible() {
        let p = default_params();
        assert!(matches!(
            sound_speed_c(&p, Speed(1.2)),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn van_der_waals_requires_v_above_covolume() {
        let law = PressureLaw::VanDerWaals {
            rt: 1.0,
            acoh: 1.0,
            bcov: 0.3,
        };
        assert!(!law.admissible_v(0.3));
        assert!(law.admissible_v(0.31));
        assert!(ModelParams::new(1.0, law, 0.2, 0.0).is_err());
        // A phase-transitional window: p' > 0 somewhere, p'(v_inf) < 0 possible.
        let params = ModelParams::new(1.0, law, 2.0, 0.0).unwrap();
        assert!(params.alpha_inf() < 0.0);
    }

    #[test]
    fn config_roundtrip_and_errors() {
        let text = r#"
            kappa = 1.0
            v_inf = 0.0
            u_inf = 0.0
            [pressure]
            kind = "quadratic"
            a = -1.0
            b = 1.0
        "#;
        let params = ModelParams::from_toml_str(text).unwrap();
        assert_eq!(params, ModelParams::default());

        let bad = ModelParams::from_toml_str("kappa = -1.0");
        assert!(matches!(bad, Err(Error::InvalidConfig(_))));

        let vdw = r#"
            kappa = 0.5
            v_inf = 2.0
            u_inf = 0.0
            [pressure]
            kind = "van_der_waals"
            rt = 1.0
            acoh = 1.0
            bcov = 0.3
        "#;
        let params = ModelParams::from_toml_str(vdw).unwrap();
        assert!(matches!(params.pressure, PressureLaw::VanDerWaals { .. }));
    }

    #[test]
    fn potential_antiderivative_consistent_with_p() {
        // d/dv p_potential(v0, v) = p(v) - p(v0), checked by central differences.
        let laws = [
            PressureLaw::Quadratic { a: -1.0, b: 1.0 },
            PressureLaw::VanDerWaals {
                rt: 1.0,
                acoh: 1.0,
                bcov: 0.3,
            },
        ];
        for law in laws {
            let v0 = 2.0;
            for k in 1..=10 {
                let v = 0.5 + 0.3 * f64::from(k);
                let h = 1e-6;
                let fd = (law.p_potential(v0, v + h) - law.p_potential(v0, v - h)) / (2.0 * h);
                assert_relative_eq!(fd, law.p(v) - law.p(v0), max_relative = 1e-8, epsilon = 1e-10);
            }
        }
    }

    proptest! {
        /// Admissibility is monotone in s^2: admissible at s implies
        /// admissible at any smaller |s|.
        #[test]
        fn saddle_monotone_in_speed(s1 in 0.0f64..0.999, frac in 0.0f64..1.0) {
            let p = default_params();
            let s2 = s1 * frac;
            if saddle_check(&p, Speed(s1)).admissible {
                prop_assert!(saddle_check(&p, Speed(s2)).admissible);
            }
        }

        /// nu^2 * kappa = -(s^2 + p'(v_inf)) exactly.
        #[test]
        fn nu_identity_machine_precision(s in 0.0f64..0.99, kappa in 0.1f64..10.0) {
            let p = ModelParams { kappa, ..ModelParams::default() };
            let scales = sound_speed_c(&p, Speed(s)).unwrap();
            let lhs = scales.nu * scales.nu * kappa;
            let rhs = -(s * s + p.alpha_inf());
            prop_assert!((lhs - rhs).abs() <= 1e-15 * rhs.abs().max(1.0));
        }

        /// Central differences of p reproduce p' (and p' reproduces p'') at
        /// random admissible v, tying the three evaluators together.
        #[test]
        fn pressure_derivative_consistency(v in -3.0f64..3.0) {
            let law = PressureLaw::Quadratic { a: -1.0, b: 1.0 };
            let h = 1e-5 * (1.0 + v.abs());
            let dp_fd = (law.p(v + h) - law.p(v - h)) / (2.0 * h);
            let d2p_fd = (law.dp(v + h) - law.dp(v - h)) / (2.0 * h);
            prop_assert!((dp_fd - law.dp(v)).abs() <= 1e-6 * law.dp(v).abs().max(1e-8));
            prop_assert!((d2p_fd - law.d2p(v)).abs() <= 1e-6 * law.d2p(v).abs().max(1e-8));
        }
    }
}
