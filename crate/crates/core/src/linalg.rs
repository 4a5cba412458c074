//! Small fixed-size complex linear algebra used on the hot integration paths.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
fn det2(a: C64, b: C64, c: C64, d: C64) -> C64 {
    a * d - b * c
}

/// Determinant by Laplace expansion over complementary 2x2 minors of rows (0,1) and (2,3).
pub fn det4(m: &Mat4) -> C64 {
    let top = |c0: usize, c1: usize| det2(m[(0, c0)], m[(0, c1)], m[(1, c0)], m[(1, c1)]);
    let bot = |c0: usize, c1: usize| det2(m[(2, c0)], m[(2, c1)], m[(3, c0)], m[(3, c1)]);
    top(0, 1) * bot(2, 3) - top(0, 2) * bot(1, 3) + top(0, 3) * bot(1, 2) + top(1, 2) * bot(0, 3)
        - top(1, 3) * bot(0, 2)
        + top(2, 3) * bot(0, 1)
}

fn minor3(m: &Mat4, skip_row: usize, skip_col: usize) -> C64 {
    let mut r = [0usize; 3];
    let mut c = [0usize; 3];
    let mut k = 0;
    for i in 0..4 {
        if i != skip_row {
            r[k] = i;
            k += 1;
        }
    }
    k = 0;
    for j in 0..4 {
        if j != skip_col {
            c[k] = j;
            k += 1;
        }
    }
    let e = |i: usize, j: usize| m[(r[i], c[j])];
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

/// Classical adjugate (transposed cofactor matrix); well defined for singular input.
pub fn adjugate4(m: &Mat4) -> Mat4 {
    let mut adj = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(j, i)] = minor3(m, i, j) * sign;
        }
    }
    adj
}

/// Ascending eigenvalues of a Hermitian 4x4 matrix.
pub fn hermitian_eigenvalues(m: &Mat4) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2], eig.eigenvalues[3]];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Ascending eigenvalues of a Hermitian matrix of any size.
pub fn hermitian_eigenvalues_dyn(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_defect(m: &Mat4) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Householder reflection `I - 2 w w^† / (w^† w)` with `w = e_1 - v`, which sends `e_1` to the
/// unit vector `v`. `v[0]` must be real and nonnegative; the map is singular only at `v = e_1`,
/// where the identity is returned.
pub fn householder_to(v: &[C64]) -> DMatrix<C64> {
    let n = v.len();
    let mut w: Vec<C64> = v.iter().map(|x| -x).collect();
    w[0] += ONE;
    let norm2: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let mut h = DMatrix::<C64>::identity(n, n);
    if norm2 < 1e-300 {
        return h;
    }
    let scale = 2.0 / norm2;
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] -= w[i] * w[j].conj() * scale;
        }
    }
    h
}

/// Pairwise (tree) summation. The split points depend only on the slice length, so the result is
/// a deterministic function of the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
