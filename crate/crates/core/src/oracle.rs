//! Independent dense eigenvalue oracle used only for verification: the
//! characteristic polynomial is obtained by the Faddeev-LeVerrier
//! recursion and its roots by Durand-Kerner iteration. This path shares no
//! code with the closed-form eigenvalues it checks.

use crate::linalg::{c, mat4_identity, mat4_mul, C64, Mat4};

/// Coefficients of det(lambda I - M), highest degree first (monic).
pub fn characteristic_polynomial(m: &Mat4) -> [C64; 5] {
    let mut coeffs = [c(0.0, 0.0); 5];
    coeffs[0] = c(1.0, 0.0);
    let mut aux = mat4_identity();
    for k in 1..=4 {
        let prod = mat4_mul(m, &aux);
        let tr: C64 = (0..4).map(|i| prod[i][i]).sum();
        let ck = -tr / k as f64;
        coeffs[k] = ck;
        aux = prod;
        for (i, row) in aux.iter_mut().enumerate() {
            row[i] += ck;
        }
    }
    coeffs
}

fn eval_poly(coeffs: &[C64; 5], z: C64) -> C64 {
    coeffs.iter().fold(c(0.0, 0.0), |acc, &co| acc * z + co)
}

/// All four roots of a monic quartic by Durand-Kerner simultaneous
/// iteration, sorted by (real, imaginary) part for determinism.
pub fn quartic_roots(coeffs: &[C64; 5]) -> [C64; 4] {
    // radius bound: 1 + max |c_k|
    let radius = 1.0 + coeffs[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9); // standard non-real, non-root-of-unity seed
    let mut roots = [seed, seed * seed, seed * seed * seed, seed * seed * seed * seed];
    for root in &mut roots {
        *root *= radius / root.norm();
    }
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..4 {
            let mut denom = c(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval_poly(coeffs, roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 * radius.max(1.0) {
            break;
        }
    }
    roots.sort_by(|x, y| {
        (x.re, x.im)
            .partial_cmp(&(y.re, y.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    roots
}

/// Eigenvalues of a 4x4 complex matrix, sorted by (real, imaginary) part.
pub fn dense_eigenvalues(m: &Mat4) -> [C64; 4] {
    quartic_roots(&characteristic_polynomial(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let mut m = [[ZERO; 4]; 4];
        for (i, v) in [3.0, -1.0, 2.0, 0.5].iter().enumerate() {
            m[i][i] = c(*v, 0.0);
        }
        let eig = dense_eigenvalues(&m);
        let expect = [-1.0, 0.5, 2.0, 3.0];
        for (got, want) in eig.iter().zip(expect) {
            assert!((got - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_conjugate_pair() {
        // companion-style matrix with eigenvalues 1 +- 2i, 0, 3
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = c(1.0, 2.0);
        m[1][1] = c(1.0, -2.0);
        m[2][2] = ZERO;
        m[3][3] = c(3.0, 0.0);
        // mix with a similarity to avoid the trivially diagonal case
        m[0][1] = c(0.7, 0.0);
        m[2][3] = c(-0.3, 0.4);
        let eig = dense_eigenvalues(&m);
        let mut found = 0;
        for want in [c(1.0, 2.0), c(1.0, -2.0), ZERO, c(3.0, 0.0)] {
            if eig.iter().any(|got| (got - want).norm() < 1e-10) {
                found += 1;
            }
        }
        assert_eq!(found, 4);
    }
}
