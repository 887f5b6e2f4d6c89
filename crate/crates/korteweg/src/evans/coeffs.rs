//! The first-order coefficient matrix of the linearized eigenvalue system
//! and the spectral splitting of its constant-coefficient limit.
//!
//! Writing the eigenvalue equations
//!
//! ```text
//! lambda v - s v' - u' = 0
//! lambda u - s u' + (alpha v)' = -kappa v'''      alpha(x) = p'(vbar(x))
//! ```
//!
//! in the phase vector `W = (u, v, v', v'')^T` gives `W' = A(x, lambda) W`
//! with rows
//!
//! ```text
//! u'   = lambda v - s v'
//! v'   = v'
//! v''  = v''
//! v''' = (1/kappa) [ -lambda u + (s lambda - p''(vbar) vbar_x) v - (s^2 + alpha) v' ]
//! ```
//!
//! (re-derived from the eigenvalue equations; the published first-order form
//! contains typos). The limit matrix `A_inf(lambda)` has characteristic
//! equation `(lambda - s mu)^2 + alpha_inf mu^2 + kappa mu^4 = 0`; for
//! `Re(lambda) > 0` exactly two roots have negative real part (decaying at
//! `+inf`) and two positive (decaying at `-inf`), and the split continues
//! analytically to `lambda = 0` where the slow pair degenerates to constant
//! directions with `u`-components `-+ c`, `c = sqrt(-alpha_inf)`.

use nalgebra::LU;
use num_complex::Complex64;

use super::compound::{second_compound, wedge, CMat4, CMat6, CVec4, CVec6};
use crate::model::{sound_speed_c, ModelParams, Speed};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `A(x, lambda)` given the local profile values `v = vbar(x)`,
/// `vx = vbar_x(x)`.
pub fn interior_matrix(
    params: &ModelParams,
    s: Speed,
    lambda: Complex64,
    v: f64,
    vx: f64,
) -> CMat4 {
    let alpha = params.pressure.dp(v);
    let alpha_x = params.pressure.d2p(v) * vx;
    let ik = 1.0 / params.kappa;
    let mut a = CMat4::zeros();
    a[(0, 1)] = lambda;
    a[(0, 2)] = Complex64::from(-s.0);
    a[(1, 2)] = Complex64::from(1.0);
    a[(2, 3)] = Complex64::from(1.0);
    a[(3, 0)] = -lambda * ik;
    a[(3, 1)] = (s.0 * lambda - Complex64::from(alpha_x)) * ik;
    a[(3, 2)] = Complex64::from(-(s.0 * s.0 + alpha) * ik);
    a
}

/// The constant-coefficient limit `A_inf(lambda)`.
pub fn limit_matrix(params: &ModelParams, s: Speed, lambda: Complex64) -> CMat4 {
    interior_matrix(params, s, lambda, params.v_inf, 0.0)
}

/// Exterior-square lift of the interior matrix.
pub fn interior_compound(
    params: &ModelParams,
    s: Speed,
    lambda: Complex64,
    v: f64,
    vx: f64,
) -> CMat6 {
    second_compound(&interior_matrix(params, s, lambda, v, vx))
}

/// Coefficients `c[k]` of `mu^k` in the characteristic quartic
/// `kappa mu^4 + (s^2 + alpha_inf) mu^2 - 2 s lambda mu + lambda^2 = 0`.
pub fn char_quartic(params: &ModelParams, s: Speed, lambda: Complex64) -> [Complex64; 5] {
    [
        lambda * lambda,
        Complex64::from(-2.0 * s.0) * lambda,
        Complex64::from(s.0 * s.0 + params.alpha_inf()),
        ZERO,
        Complex64::from(params.kappa),
    ]
}

/// Durand-Kerner iteration for a quartic with leading coefficient `c[4] != 0`,
/// followed by Newton polish. Deterministic.
fn quartic_roots(c: &[Complex64; 5]) -> [Complex64; 4] {
    let lead = c[4];
    let q: [Complex64; 4] = [c[0] / lead, c[1] / lead, c[2] / lead, c[3] / lead];
    let eval = |z: Complex64| (((z + q[3]) * z + q[2]) * z + q[1]) * z + q[0];
    let deriv = |z: Complex64| {
        ((Complex64::from(4.0) * z + Complex64::from(3.0) * q[3]) * z
            + Complex64::from(2.0) * q[2])
            * z
            + q[1]
    };
    let radius = 1.0 + q.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [
        seed * radius,
        seed * seed * radius,
        seed * seed * seed * radius,
        seed * seed * seed * seed * radius,
    ];
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom == ZERO {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-15 * radius {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let d = deriv(*zi);
            if d.norm() > 1e-30 {
                *zi -= eval(*zi) / d;
            }
        }
    }
    z
}

/// Enforces exact conjugate symmetry on roots of a real-coefficient quartic,
/// so downstream quantities stay exactly real for real `lambda`.
fn realify_roots(roots: &mut [Complex64; 4]) {
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    let mut used = [false; 4];
    for i in 0..4 {
        if used[i] {
            continue;
        }
        if roots[i].im.abs() <= tol {
            roots[i].im = 0.0;
            used[i] = true;
            continue;
        }
        // Find the conjugate partner and average the pair.
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for j in (i + 1)..4 {
            if used[j] {
                continue;
            }
            let d = (roots[j] - roots[i].conj()).norm();
            if d < best_d {
                best_d = d;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            if best_d <= 1e-6 * scale {
                let re = 0.5 * (roots[i].re + roots[j].re);
                let im = 0.5 * (roots[i].im - roots[j].im);
                roots[i] = Complex64::new(re, im);
                roots[j] = Complex64::new(re, -im);
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

/// One spatial mode of the limiting system.
#[derive(Debug, Clone, Copy)]
pub struct LimitMode {
    pub mu: Complex64,
    /// Eigenvector in phase variables, v-component normalized to 1.
    pub w: CVec4,
}

fn mode_vector(s: Speed, lambda: Complex64, mu: Complex64) -> LimitMode {
    // W = ((lambda - s mu)/mu, 1, mu, mu^2), valid for mu != 0.
    let u = (lambda - Complex64::from(s.0) * mu) / mu;
    LimitMode {
        mu,
        w: CVec4::from_column_slice(&[u, Complex64::new(1.0, 0.0), mu, mu * mu]),
    }
}

/// Stable/unstable splitting of `A_inf(lambda)`, each pair ordered
/// fast-then-slow (by |mu|).
#[derive(Debug, Clone, Copy)]
pub struct LimitSplitting {
    /// Re(mu) < 0, spanning the solutions decaying at +inf.
    pub stable: [LimitMode; 2],
    /// Re(mu) > 0, spanning the solutions decaying at -inf.
    pub unstable: [LimitMode; 2],
    /// Sum of the stable eigenvalues, the renormalization rate at +inf.
    pub sigma_stable: Complex64,
    /// Sum of the unstable eigenvalues (= -sigma_stable; the matrix is traceless).
    pub sigma_unstable: Complex64,
}

/// Computes the splitting for `Re(lambda) > 0`, or its analytic continuation
/// at `lambda = 0`, where the slow directions degenerate to
/// `(-c, 1, 0, 0)` (stable side) and `(c, 1, 0, 0)` (unstable side).
pub fn limiting_splitting(
    params: &ModelParams,
    s: Speed,
    lambda: Complex64,
) -> Result<LimitSplitting> {
    let scales = sound_speed_c(params, s)?;
    let (c, nu) = (scales.c, scales.nu);

    if lambda.norm() == 0.0 {
        let fast_stable = mode_vector(s, ZERO, Complex64::from(-nu));
        let fast_unstable = mode_vector(s, ZERO, Complex64::from(nu));
        let one = Complex64::new(1.0, 0.0);
        let slow_stable = LimitMode {
            mu: ZERO,
            w: CVec4::from_column_slice(&[Complex64::from(-c), one, ZERO, ZERO]),
        };
        let slow_unstable = LimitMode {
            mu: ZERO,
            w: CVec4::from_column_slice(&[Complex64::from(c), one, ZERO, ZERO]),
        };
        return Ok(LimitSplitting {
            stable: [fast_stable, slow_stable],
            unstable: [fast_unstable, slow_unstable],
            sigma_stable: Complex64::from(-nu),
            sigma_unstable: Complex64::from(nu),
        });
    }

    let mut roots = quartic_roots(&char_quartic(params, s, lambda));
    if lambda.im == 0.0 {
        realify_roots(&mut roots);
    }
    let mut stable: Vec<Complex64> = Vec::with_capacity(2);
    let mut unstable: Vec<Complex64> = Vec::with_capacity(2);
    for mu in roots {
        if mu.re < 0.0 {
            stable.push(mu);
        } else {
            unstable.push(mu);
        }
    }
    if stable.len() != 2 || unstable.len() != 2 {
        return Err(Error::SplittingLost {
            lambda,
            n_stable: stable.len(),
            n_unstable: unstable.len(),
        });
    }
    // Fast mode first.
    stable.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    unstable.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    let sigma_stable = stable[0] + stable[1];
    Ok(LimitSplitting {
        stable: [
            mode_vector(s, lambda, stable[0]),
            mode_vector(s, lambda, stable[1]),
        ],
        unstable: [
            mode_vector(s, lambda, unstable[0]),
            mode_vector(s, lambda, unstable[1]),
        ],
        sigma_stable,
        sigma_unstable: -sigma_stable,
    })
}

/// The wedge of a 2-dimensional invariant subspace of `A_inf`, computed as
/// the kernel direction of `A_inf^(2) - sigma I` by inverse iteration and
/// normalized so its leading (u, v) minor equals 1. The normalization is
/// analytic in `lambda` and fixes the branch consistently along the real ray.
pub fn subspace_wedge(a2_inf: &CMat6, sigma: Complex64) -> Result<CVec6> {
    let shifted = a2_inf - CMat6::identity() * sigma;
    let norm_m = shifted.norm().max(1e-300);
    let lu: LU<Complex64, nalgebra::Const<6>, nalgebra::Const<6>> = LU::new(shifted);
    let seeds: [[f64; 6]; 2] = [[1.0, 0.3, -0.2, 0.5, -0.4, 0.7], [0.2, -0.7, 1.0, 0.1, 0.6, -0.3]];
    for seed in seeds {
        let mut x = CVec6::from_iterator(seed.into_iter().map(Complex64::from));
        let mut ok = true;
        for _ in 0..3 {
            match lu.solve(&x) {
                Some(y) => {
                    let n = y.norm();
                    if !n.is_finite() || n == 0.0 {
                        ok = false;
                        break;
                    }
                    x = y / Complex64::from(n);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let residual = (shifted * x).norm();
        if residual <= 1e-6 * norm_m {
            let lead = x[0];
            if lead.norm() < 1e-9 {
                return Err(Error::Numerics(format!(
                    "subspace wedge has vanishing leading minor at sigma = {sigma}"
                )));
            }
            return Ok(x / lead);
        }
    }
    Err(Error::Numerics(format!(
        "inverse iteration failed to isolate the invariant 2-plane at sigma = {sigma}"
    )))
}

/// Initial wedge data for the two integrations, unit (leading minor = 1)
/// normalization.
pub struct InitialWedges {
    pub plus: CVec6,
    pub minus: CVec6,
    pub sigma_plus: Complex64,
    pub sigma_minus: Complex64,
}

pub fn initial_wedges(params: &ModelParams, s: Speed, lambda: Complex64) -> Result<InitialWedges> {
    let split = limiting_splitting(params, s, lambda)?;
    if lambda.norm() == 0.0 {
        // The stable-sum eigenvalue of the lifted matrix is defective at the
        // origin; build the wedges from the explicit continuation instead.
        let eta_p = wedge(&split.stable[0].w, &split.stable[1].w);
        let eta_m = wedge(&split.unstable[1].w, &split.unstable[0].w);
        return Ok(InitialWedges {
            plus: eta_p / eta_p[0],
            minus: eta_m / eta_m[0],
            sigma_plus: split.sigma_stable,
            sigma_minus: split.sigma_unstable,
        });
    }
    let a2 = second_compound(&limit_matrix(params, s, lambda));
    let plus = subspace_wedge(&a2, split.sigma_stable)?;
    let minus = subspace_wedge(&a2, split.sigma_unstable)?;
    Ok(InitialWedges {
        plus,
        minus,
        sigma_plus: split.sigma_stable,
        sigma_minus: split.sigma_unstable,
    })
}
