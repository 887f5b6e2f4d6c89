//! Quadrature kernels shared by the profile and functionals modules.
//!
//! Two regimes appear in this crate. Finite integrals with endpoint
//! structure (the travel-time integral of the profile ODE) go through
//! adaptive Gauss-Kronrod. Whole-line integrals of analytic, exponentially
//! decaying integrands sampled on a uniform grid use the plain trapezoid
//! rule, which is spectrally accurate in that setting, plus analytic tail
//! corrections supplied by the caller.

use crate::{Error, Result};

// Gauss-Kronrod 7-15 abscissae and weights (QUADPACK values).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss-Kronrod 7-15 panel. Returns (kronrod, |kronrod - gauss|).
fn gk15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        res_k += WGK[j] * (f_lo + f_hi);
        if j % 2 == 1 {
            // XGK odd entries are the Gauss-7 nodes.
            res_g += WG[j / 2] * (f_lo + f_hi);
        }
    }
    (res_k * half, ((res_k - res_g) * half).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Bisects until the per-panel error estimate satisfies
/// `err <= rel_tol * |integral| + abs_tol` distributed over the panel widths.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (coarse, _) = gk15_panel(&f, a, b);
    let scale = coarse.abs().max(abs_tol);
    let mut total = 0.0;
    // Manual stack; depth 52 halves the panel below f64 resolution.
    let mut stack: Vec<(f64, f64, u32)> = vec![(a, b, 0)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15_panel(&f, lo, hi);
        let budget = (rel_tol * scale + abs_tol) * ((hi - lo) / (b - a)).abs();
        if err <= budget || (hi - lo).abs() <= 1e-15 * (b - a).abs() {
            if depth >= 52 {
                return Err(Error::QuadratureFailure(format!(
                    "panel [{lo}, {hi}] did not converge: error {err:e} > budget {budget:e}"
                )));
            }
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(total)
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    h * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Tail of `int_L^inf amp * exp(-rate x) dx` given the value `amp*exp(-rate L)`
/// of the integrand at the cut.
pub fn exp_tail(value_at_cut: f64, rate: f64) -> f64 {
    value_at_cut / rate
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_polynomial_exact() {
        // K15 integrates degree <= 22 exactly; a quartic on one panel is easy.
        let val = integrate(|x| x * x * x * x, 0.0, 2.0, 1e-14, 1e-300).unwrap();
        assert_relative_eq!(val, 32.0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn gk_sqrt_endpoint() {
        // Integrable endpoint behavior forces real adaptivity.
        let val = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12, 1e-300).unwrap();
        assert_relative_eq!(val, 2.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn trapezoid_spectral_on_decaying_analytic() {
        // Trapezoid on sech^2 over a wide symmetric window is exact to
        // roundoff: Euler-Maclaurin boundary terms vanish with the tails.
        let h = 0.1;
        let l = 30.0;
        let n = (2.0 * l / h).round() as usize;
        let values: Vec<f64> = (0..=n)
            .map(|j| {
                let x = -l + h * j as f64;
                1.0 / x.cosh().powi(2)
            })
            .collect();
        assert_relative_eq!(trapezoid(&values, h), 2.0, max_relative = 1e-14);
    }
}
