//! Small fixed-size complex matrix helpers. Everything in the frequency-side
//! pipeline is 2x2 or 4x4, so no general linear algebra crate is needed.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];
pub type Vec2 = [C64; 2];
pub type Vec4 = [C64; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mat2_identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mat4_identity() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn mat2_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat4_vec(m: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [ZERO; 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = ZERO;
            for (k, bk) in b.iter().enumerate() {
                s += a[i][k] * bk[j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn vec4_sub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn vec4_norm_sq(v: &Vec4) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest singular value of a 2x2 complex matrix, from the closed-form
/// eigenvalues of the 2x2 Hermitian Gram matrix M* M.
pub fn mat2_opnorm(m: &Mat2) -> f64 {
    // Gram matrix entries
    let g11 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let g22 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let g12 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let tr = g11 + g22;
    let disc = ((g11 - g22) * 0.5).powi(2) + g12.norm_sqr();
    let lam_max = tr * 0.5 + disc.max(0.0).sqrt();
    lam_max.max(0.0).sqrt()
}

pub fn mat4_max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut m = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}
