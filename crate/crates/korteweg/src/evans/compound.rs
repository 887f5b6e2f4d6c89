//! Exterior-square algebra on C^4: wedge products of vectors, the induced
//! (second additive compound) action of a 4x4 matrix on 2-forms, the
//! Lambda^2 x Lambda^2 -> Lambda^4 pairing, and the Plucker decomposability
//! form.
//!
//! Basis order for Lambda^2(C^4): e1^e2, e1^e3, e1^e4, e2^e3, e2^e4, e3^e4.

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

pub type CVec4 = SVector<Complex64, 4>;
pub type CVec6 = SVector<Complex64, 6>;
pub type CMat4 = Matrix4<Complex64>;
pub type CMat6 = SMatrix<Complex64, 6, 6>;

/// Lexicographic index pairs of the Lambda^2 basis.
pub const WEDGE_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Position and sign of `e_p ^ e_q` in the ordered basis (`p != q`).
fn wedge_index(p: usize, q: usize) -> (usize, f64) {
    let (i, j, sign) = if p < q { (p, q, 1.0) } else { (q, p, -1.0) };
    let idx = WEDGE_PAIRS.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap();
    (idx, sign)
}

/// `a ^ b` as a 6-vector: components `a_i b_j - a_j b_i` for `i < j`.
pub fn wedge(a: &CVec4, b: &CVec4) -> CVec6 {
    CVec6::from_fn(|k, _| {
        let (i, j) = WEDGE_PAIRS[k];
        a[i] * b[j] - a[j] * b[i]
    })
}

/// The second additive compound of `a`: the 6x6 matrix `B` with
/// `B (u ^ w) = (a u) ^ w + u ^ (a w)`, so that 2-planes of solutions of
/// `W' = a W` evolve as single trajectories of `eta' = B eta`.
pub fn second_compound(a: &CMat4) -> CMat6 {
    let mut b = CMat6::zeros();
    for (col, &(i, j)) in WEDGE_PAIRS.iter().enumerate() {
        for k in 0..4 {
            if k != j {
                let (row, sign) = wedge_index(k, j);
                b[(row, col)] += a[(k, i)] * Complex64::from(sign);
            }
            if k != i {
                let (row, sign) = wedge_index(i, k);
                b[(row, col)] += a[(k, j)] * Complex64::from(sign);
            }
        }
    }
    b
}

/// Coefficient of `e1^e2^e3^e4` in `eta ^ zeta`; equals
/// `det [u1 u2 w1 w2]` when `eta = u1 ^ u2` and `zeta = w1 ^ w2`.
pub fn wedge_pairing(eta: &CVec6, zeta: &CVec6) -> Complex64 {
    eta[0] * zeta[5] - eta[1] * zeta[4] + eta[2] * zeta[3] + eta[3] * zeta[2]
        - eta[4] * zeta[1]
        + eta[5] * zeta[0]
}

/// The Plucker form `eta1 eta6 - eta2 eta5 + eta3 eta4`; zero exactly on
/// decomposable 2-forms (genuine 2-planes).
pub fn plucker(eta: &CVec6) -> Complex64 {
    eta[0] * eta[5] - eta[1] * eta[4] + eta[2] * eta[3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn vec4(vals: [f64; 4]) -> CVec4 {
        CVec4::from_iterator(vals.into_iter().map(c))
    }

    #[test]
    fn pairing_is_determinant() {
        let u1 = vec4([1.0, 2.0, -1.0, 0.5]);
        let u2 = vec4([0.0, 1.0, 3.0, -2.0]);
        let w1 = vec4([2.0, -1.0, 0.0, 1.0]);
        let w2 = vec4([1.0, 1.0, 1.0, 1.0]);
        let det = Matrix4::from_columns(&[u1, u2, w1, w2]).determinant();
        let pairing = wedge_pairing(&wedge(&u1, &u2), &wedge(&w1, &w2));
        assert!((pairing - det).norm() < 1e-12 * det.norm().max(1.0));
    }

    proptest! {
        /// Defining property of the compound: B(u^w) = (Au)^w + u^(Aw).
        #[test]
        fn compound_is_derivation(
            a_vals in proptest::array::uniform16(-3.0f64..3.0),
            u_vals in proptest::array::uniform4(-2.0f64..2.0),
            w_vals in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let a = CMat4::from_iterator(a_vals.into_iter().map(c));
            let u = vec4(u_vals);
            let w = vec4(w_vals);
            let lhs = second_compound(&a) * wedge(&u, &w);
            let rhs = wedge(&(a * u), &w) + wedge(&u, &(a * w));
            for k in 0..6 {
                prop_assert!((lhs[k] - rhs[k]).norm() <= 1e-10);
            }
        }

        /// Wedges of vectors are decomposable: the Plucker form vanishes.
        #[test]
        fn wedge_satisfies_plucker(
            u_vals in proptest::array::uniform4(-2.0f64..2.0),
            w_vals in proptest::array::uniform4(-2.0f64..2.0),
        ) {
            let eta = wedge(&vec4(u_vals), &vec4(w_vals));
            prop_assert!(plucker(&eta).norm() <= 1e-10);
        }
    }
}
