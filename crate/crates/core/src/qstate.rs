//! Two-qubit density matrices parameterized by fifteen angles.
//!
//! A state is `D = U diag(λ) U^†`. The eigenvalues come from three hyperspherical angles,
//! `λ = (cos²θ1, sin²θ1 cos²θ2, sin²θ1 sin²θ2 cos²θ3, sin²θ1 sin²θ2 sin²θ3)`, which covers the whole
//! (unordered) probability simplex. The eigenvector frame `U` is assembled column by column from
//! three Householder reflections,
//!
//! ```text
//! U = H(v1) · (1 ⊕ H(v2)) · (1 ⊕ 1 ⊕ H(v3)),   v1 ∈ S⁷ ⊂ C⁴, v2 ∈ S⁵ ⊂ C³, v3 ∈ S³ ⊂ C²,
//! ```
//!
//! where each `v` is a unit vector with real nonnegative first entry, written in hyperspherical
//! moduli angles `χ ∈ [0, π/2]` and phases `φ ∈ [0, 2π)`. Uniform points on the spheres give
//! the unitarily invariant measure on the flag manifold `U(4)/U(1)⁴`; [`haar_density`] is its
//! exact normalized density over the twelve frame angles.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, C64, ONE, ZERO};

/// Number of frame angles.
pub const FRAME_DIM: usize = 12;
/// Total number of coordinates.
pub const STATE_DIM: usize = 15;
/// Default central-difference step for coordinate derivatives.
pub const FD_STEP: f64 = 1e-6;
/// Tolerance band for sign decisions on `det(PT)`.
pub const DET_BAND: f64 = 1e-12;

/// Range convention for the eigenvalue angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleDomain {
    /// All eigenvalue angles in `[0, π/2]`.
    Volume,
    /// `θ3` in `[0, π]`, which covers the `(λ3, λ4)` edge twice.
    Boundary,
}

/// Fifteen coordinates of a two-qubit state: twelve frame angles then three eigenvalue angles.
///
/// Frame layout: `[χ1 χ2 χ3 φ1 φ2 φ3]` for `v1`, `[χ1 χ2 φ1 φ2]` for `v2`, `[χ1 φ1]` for `v3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleVector {
    pub euler: [f64; FRAME_DIM],
    pub eig: [f64; 3],
}

/// Ranges `(lo, hi)` of the frame angles, in layout order.
pub const FRAME_RANGES: [(f64, f64); FRAME_DIM] = [
    (0.0, FRAC_PI_2),
    (0.0, FRAC_PI_2),
    (0.0, FRAC_PI_2),
    (0.0, 2.0 * PI),
    (0.0, 2.0 * PI),
    (0.0, 2.0 * PI),
    (0.0, FRAC_PI_2),
    (0.0, FRAC_PI_2),
    (0.0, 2.0 * PI),
    (0.0, 2.0 * PI),
    (0.0, FRAC_PI_2),
    (0.0, 2.0 * PI),
];

impl AngleVector {
    pub fn new(euler: [f64; FRAME_DIM], eig: [f64; 3]) -> Self {
        Self { euler, eig }
    }

    pub fn from_array(x: &[f64; STATE_DIM]) -> Self {
        let mut euler = [0.0; FRAME_DIM];
        euler.copy_from_slice(&x[..FRAME_DIM]);
        Self { euler, eig: [x[12], x[13], x[14]] }
    }

    pub fn to_array(&self) -> [f64; STATE_DIM] {
        let mut x = [0.0; STATE_DIM];
        x[..FRAME_DIM].copy_from_slice(&self.euler);
        x[12..].copy_from_slice(&self.eig);
        x
    }

    /// Affine image of a point of the unit cube; `theta3_hi` is `π/2` or `π`.
    pub fn from_unit_cube(u: &[f64; STATE_DIM], theta3_hi: f64) -> Self {
        let mut euler = [0.0; FRAME_DIM];
        for (k, (lo, hi)) in FRAME_RANGES.iter().enumerate() {
            euler[k] = lo + (hi - lo) * u[k];
        }
        Self { euler, eig: [FRAC_PI_2 * u[12], FRAC_PI_2 * u[13], theta3_hi * u[14]] }
    }

    pub fn validate(&self, domain: AngleDomain) -> Result<()> {
        if self.euler.iter().chain(self.eig.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidAngles("non-finite entry".into()));
        }
        let eps = 1e-12;
        for (k, &t) in self.eig.iter().enumerate() {
            let hi = if k == 2 && domain == AngleDomain::Boundary { PI } else { FRAC_PI_2 };
            if t < -eps || t > hi + eps {
                return Err(Error::InvalidAngles(format!("theta{} = {t} outside [0, {hi}]", k + 1)));
            }
        }
        Ok(())
    }
}

/// Box volume of the frame-angle ranges, `(π/2)^6 (2π)^6`.
pub fn frame_box_volume() -> f64 {
    FRAME_RANGES.iter().map(|(lo, hi)| hi - lo).product()
}

/// Eigenvalues and simplex-measure Jacobian of the hyperspherical-squared map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lambda: [f64; 4],
    /// `|∂(λ1, λ2, λ3)/∂(θ1, θ2, θ3)|`.
    pub jacobian: f64,
}

pub fn eigenvalues_from_angles(t1: f64, t2: f64, t3: f64) -> Spectrum {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let (s3, c3) = t3.sin_cos();
    let (s1q, s2q) = (s1 * s1, s2 * s2);
    let lambda = [c1 * c1, s1q * c2 * c2, s1q * s2q * c3 * c3, s1q * s2q * s3 * s3];
    let jacobian = (8.0 * c1 * s1q * s1q * s1 * c2 * s2q * s2 * c3 * s3).abs();
    Spectrum { lambda, jacobian }
}

/// `|∂(λ1, λ2)/∂(θ1, θ2)|` on the rank-three stratum `θ3 = 0`.
pub fn rank3_jacobian(t1: f64, t2: f64) -> f64 {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    (4.0 * c1 * s1 * s1 * s1 * c2 * s2).abs()
}

/// `∂λ/∂θ3` at the given angles.
pub fn dlambda_dtheta3(t1: f64, t2: f64, t3: f64) -> [f64; 4] {
    let a = (t1.sin() * t2.sin()).powi(2);
    let d = a * (2.0 * t3).sin();
    [0.0, 0.0, -d, d]
}

/// Unit vector in `C^n` with real first entry from `n-1` moduli angles and `n-1` phases.
fn sphere_point(chi: &[f64], phi: &[f64], out: &mut [C64]) {
    let n = out.len();
    let mut tail = 1.0;
    for k in 0..n {
        let r = if k + 1 < n {
            let (s, c) = chi[k].sin_cos();
            let r = tail * c;
            tail *= s;
            r
        } else {
            tail
        };
        out[k] = if k == 0 { C64::new(r, 0.0) } else { C64::from_polar(r, phi[k - 1]) };
    }
}

fn embed_householder(v: &[C64], offset: usize) -> Mat4 {
    let n = v.len();
    let mut w = [ZERO; 4];
    for k in 0..n {
        w[k] = -v[k];
    }
    w[0] += ONE;
    let norm2: f64 = w[..n].iter().map(|x| x.norm_sqr()).sum();
    let mut h = Mat4::identity();
    if norm2 < 1e-300 {
        return h;
    }
    let scale = 2.0 / norm2;
    for i in 0..n {
        for j in 0..n {
            h[(offset + i, offset + j)] -= w[i] * w[j].conj() * scale;
        }
    }
    h
}

/// Unitary eigenvector frame; column `j` is the eigenvector of `λ_j`.
pub fn frame(euler: &[f64; FRAME_DIM]) -> Mat4 {
    let mut v1 = [ZERO; 4];
    let mut v2 = [ZERO; 3];
    let mut v3 = [ZERO; 2];
    sphere_point(&euler[0..3], &euler[3..6], &mut v1);
    sphere_point(&euler[6..8], &euler[8..10], &mut v2);
    sphere_point(&euler[10..11], &euler[11..12], &mut v3);
    embed_householder(&v1, 0) * embed_householder(&v2, 1) * embed_householder(&v3, 2)
}

/// `2^(n-1) Π cos χ_k sin^(2(n-k)-1) χ_k`: density of the squared moduli on the simplex.
fn moduli_jacobian(chi: &[f64]) -> f64 {
    let n = chi.len() + 1;
    let mut j = 1.0;
    for (k, &x) in chi.iter().enumerate() {
        let (s, c) = x.sin_cos();
        j *= 2.0 * c * s.powi((2 * (n - k - 1) - 1) as i32);
    }
    j.abs()
}

/// Normalized density of the invariant flag measure over the frame-angle box.
pub fn haar_density(euler: &[f64; FRAME_DIM]) -> f64 {
    let two_pi = 2.0 * PI;
    // (n-1)! J_{n-1} / (2π)^{n-1} for n = 4, 3, 2
    6.0 * moduli_jacobian(&euler[0..3]) / two_pi.powi(3)
        * 2.0
        * moduli_jacobian(&euler[6..8])
        / two_pi.powi(2)
        * moduli_jacobian(&euler[10..11])
        / two_pi
}

/// 4x4 unit-trace Hermitian positive semidefinite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let herm = linalg::hermiticity_defect(&m);
        if herm > 1e-12 {
            return Err(Error::NotDensityMatrix(format!("hermiticity defect {herm:e}")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > 1e-12 {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&m)[0];
        if min < -1e-12 {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_trusted(m: Mat4) -> Self {
        Self(m)
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity() * C64::new(0.25, 0.0))
    }

    pub fn pure(psi: &[C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotDensityMatrix("zero vector".into()));
        }
        let m = Mat4::from_fn(|i, j| psi[i] * psi[j].conj() / (norm * norm));
        Ok(Self(m))
    }

    /// `|Φ+⟩⟨Φ+|` with `|Φ+⟩ = (|00⟩ + |11⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure(&[C64::new(r, 0.0), ZERO, ZERO, C64::new(r, 0.0)]).expect("normalized")
    }

    /// `p |Φ+⟩⟨Φ+| + (1 - p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("Werner weight {p}")));
        }
        let m = Self::bell_phi_plus().0 * C64::new(p, 0.0) + Mat4::identity() * C64::new((1.0 - p) / 4.0, 0.0);
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian_eigenvalues(&self.0)
    }
}

/// Eigenvalues and orthonormal eigenvectors (columns of `vectors`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub values: [f64; 4],
    pub vectors: Mat4,
}

impl Eigensystem {
    pub fn from_angles(a: &AngleVector) -> Self {
        let spec = eigenvalues_from_angles(a.eig[0], a.eig[1], a.eig[2]);
        Self { values: spec.lambda, vectors: frame(&a.euler) }
    }

    pub fn compose(&self) -> Mat4 {
        compose(&self.vectors, &self.values)
    }

    /// Smallest pairwise eigenvalue gap.
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                gap = gap.min((self.values[i] - self.values[j]).abs());
            }
        }
        gap
    }
}

/// `Σ_j λ_j u_j u_j^†`.
pub fn compose(u: &Mat4, lambda: &[f64; 4]) -> Mat4 {
    let mut d = Mat4::zeros();
    for i in 0..4 {
        for k in i..4 {
            let mut acc = ZERO;
            for j in 0..4 {
                acc += u[(i, j)] * u[(k, j)].conj() * lambda[j];
            }
            d[(i, k)] = acc;
            if k != i {
                d[(k, i)] = acc.conj();
            } else {
                d[(i, i)] = C64::new(acc.re, 0.0);
            }
        }
    }
    d
}

pub fn angles_to_state(a: &AngleVector) -> DensityMatrix {
    DensityMatrix::from_trusted(Eigensystem::from_angles(a).compose())
}

/// Transposes each of the four 2x2 blocks in place.
pub fn partial_transpose(m: &Mat4) -> Mat4 {
    let mut t = *m;
    for bi in 0..2 {
        for bj in 0..2 {
            let (r, c) = (2 * bi, 2 * bj);
            t[(r, c + 1)] = m[(r + 1, c)];
            t[(r + 1, c)] = m[(r, c + 1)];
        }
    }
    t
}

pub fn det_partial_transpose(d: &DensityMatrix) -> f64 {
    det_pt(d.matrix())
}

pub fn det_pt(m: &Mat4) -> f64 {
    linalg::det4(&partial_transpose(m)).re
}

/// PPT test via the sign of `det(PT)`; values inside the tolerance band count as separable.
pub fn is_separable(d: &DensityMatrix) -> bool {
    det_partial_transpose(d) >= -DET_BAND
}

/// Smallest eigenvalue of the partial transpose (the full PPT test).
pub fn min_eigenvalue_partial_transpose(d: &DensityMatrix) -> f64 {
    linalg::hermitian_eigenvalues(&partial_transpose(d.matrix()))[0]
}

fn shifted(a: &AngleVector, i: usize, delta: f64) -> Mat4 {
    let mut x = a.to_array();
    x[i] += delta;
    Eigensystem::from_angles(&AngleVector::from_array(&x)).compose()
}

/// `∂D/∂x_i` by central differences with step `h`; `i` is a 0-based coordinate index
/// (0..12 frame, 12..15 eigenvalue angles).
pub fn state_derivative_with_step(a: &AngleVector, i: usize, h: f64) -> Result<Mat4> {
    if i >= STATE_DIM {
        return Err(Error::OutOfRange(format!("coordinate index {i}")));
    }
    Ok((shifted(a, i, h) - shifted(a, i, -h)) / C64::new(2.0 * h, 0.0))
}

pub fn state_derivative(a: &AngleVector, i: usize) -> Result<Mat4> {
    state_derivative_with_step(a, i, FD_STEP)
}

/// One Richardson step on top of the central difference: `(4 D(h/2) - D(h)) / 3`.
pub fn state_derivative_richardson(a: &AngleVector, i: usize, h: f64) -> Result<Mat4> {
    let coarse = state_derivative_with_step(a, i, h)?;
    let fine = state_derivative_with_step(a, i, h / 2.0)?;
    Ok((fine * C64::new(4.0, 0.0) - coarse) / C64::new(3.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_angles(rng: &mut ChaCha8Rng) -> AngleVector {
        let mut u = [0.0; STATE_DIM];
        for x in u.iter_mut() {
            *x = rng.gen::<f64>();
        }
        AngleVector::from_unit_cube(&u, FRAC_PI_2)
    }

    fn max_abs(m: &Mat4) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pure_state_corner() {
        let s = eigenvalues_from_angles(0.0, 0.7, 1.1);
        assert_eq!(s.lambda, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn simplex_vertex() {
        let s = eigenvalues_from_angles(FRAC_PI_2, 0.0, 0.3);
        assert!((s.lambda[0]).abs() < 1e-16);
        assert!((s.lambda[1] - 1.0).abs() < 1e-15);
        assert!(s.lambda[2].abs() < 1e-15 && s.lambda[3].abs() < 1e-15);
    }

    #[test]
    fn uniform_spectrum_angles() {
        let s = eigenvalues_from_angles(PI / 3.0, (1.0f64 / 3.0f64.sqrt()).acos(), PI / 4.0);
        for l in s.lambda {
            assert!((l - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let (t1, t2, t3) = (0.4, 1.0, 0.9);
        let h = 1e-6;
        let mut jac = [[0.0; 3]; 3];
        for c in 0..3 {
            let mut p = [t1, t2, t3];
            let mut m = [t1, t2, t3];
            p[c] += h;
            m[c] -= h;
            let lp = eigenvalues_from_angles(p[0], p[1], p[2]).lambda;
            let lm = eigenvalues_from_angles(m[0], m[1], m[2]).lambda;
            for r in 0..3 {
                jac[r][c] = (lp[r] - lm[r]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1])
            - jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0])
            + jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
        let want = eigenvalues_from_angles(t1, t2, t3).jacobian;
        assert!((det.abs() - want).abs() < 1e-8 * want);
    }

    #[test]
    fn frame_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_angles(&mut rng);
            let u = frame(&a.euler);
            assert!(max_abs(&(u * u.adjoint() - Mat4::identity())) < 1e-13);
        }
    }

    #[test]
    fn haar_density_integrates_to_one() {
        // the density factorizes over blocks; integrate each block's moduli part by midpoint rule
        let n = 400;
        let grid = |k: usize| (k as f64 + 0.5) * FRAC_PI_2 / n as f64;
        let step = FRAC_PI_2 / n as f64;
        let mut i2 = 0.0;
        for a in 0..n {
            i2 += moduli_jacobian(&[grid(a)]) * step;
        }
        assert!((i2 - 1.0).abs() < 1e-5, "{i2}");
        let mut i3 = 0.0;
        for a in 0..n {
            for b in 0..n {
                i3 += moduli_jacobian(&[grid(a), grid(b)]) * step * step;
            }
        }
        // uniform simplex volume in (p1, p2) is 1/2
        assert!((i3 - 0.5).abs() < 1e-5, "{i3}");
    }

    #[test]
    fn fully_mixed_state_is_frame_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = random_angles(&mut rng);
        a.eig = [PI / 3.0, (1.0f64 / 3.0f64.sqrt()).acos(), PI / 4.0];
        let d = angles_to_state(&a);
        assert!(max_abs(&(d.matrix() - DensityMatrix::maximally_mixed().matrix())) < 1e-15);
    }

    #[test]
    fn theta1_zero_gives_pure_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut a = random_angles(&mut rng);
        a.eig[0] = 0.0;
        let d = angles_to_state(&a);
        let m = d.matrix();
        assert!(max_abs(&(m * m - m)) < 1e-14);
        assert!((m.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn state_eigenvalues_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_angles(&mut rng);
            let d = angles_to_state(&a);
            let mut want = eigenvalues_from_angles(a.eig[0], a.eig[1], a.eig[2]).lambda;
            want.sort_by(|x, y| x.total_cmp(y));
            let got = d.eigenvalues();
            for k in 0..4 {
                assert!((got[k] - want[k]).abs() < 1e-10);
            }
            DensityMatrix::new(*d.matrix()).expect("valid density matrix");
        }
    }

    #[test]
    fn partial_transpose_of_fixed_points_and_bell() {
        let mixed = DensityMatrix::maximally_mixed();
        assert_eq!(partial_transpose(mixed.matrix()), *mixed.matrix());
        let bell = DensityMatrix::bell_phi_plus();
        let ev = linalg::hermitian_eigenvalues(&partial_transpose(bell.matrix()));
        let want = [-0.5, 0.5, 0.5, 0.5];
        for k in 0..4 {
            assert!((ev[k] - want[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn det_partial_transpose_examples() {
        assert!((det_partial_transpose(&DensityMatrix::maximally_mixed()) - 1.0 / 256.0).abs() < 1e-17);
        assert!((det_partial_transpose(&DensityMatrix::bell_phi_plus()) + 1.0 / 16.0).abs() < 1e-15);
        let w = DensityMatrix::werner(1.0 / 3.0).unwrap();
        assert!(det_partial_transpose(&w).abs() < 1e-16);
    }

    #[test]
    fn separability_examples() {
        assert!(is_separable(&DensityMatrix::maximally_mixed()));
        assert!(!is_separable(&DensityMatrix::bell_phi_plus()));
        assert!(is_separable(&DensityMatrix::werner(1.0 / 3.0).unwrap()));
        assert!(!is_separable(&DensityMatrix::werner(0.34).unwrap()));
    }

    #[test]
    fn invalid_matrices_are_rejected() {
        let mut m = Mat4::identity() * C64::new(0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        m = Mat4::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::werner(1.5).is_err());
    }

    #[test]
    fn derivative_vanishes_at_fully_mixed_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut a = random_angles(&mut rng);
        a.eig = [PI / 3.0, (1.0f64 / 3.0f64.sqrt()).acos(), PI / 4.0];
        for i in 0..FRAME_DIM {
            let d = state_derivative(&a, i).unwrap();
            assert!(max_abs(&d) < 1e-9, "coordinate {i}");
        }
    }

    #[test]
    fn derivatives_are_hermitian_and_traceless() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_angles(&mut rng);
            for i in 0..STATE_DIM {
                let d = state_derivative(&a, i).unwrap();
                assert!(d.trace().norm() < 1e-8);
                assert!(linalg::hermiticity_defect(&d) < 1e-8);
            }
        }
        assert!(state_derivative(&random_angles(&mut rng), 15).is_err());
    }

    #[test]
    fn central_difference_agrees_with_richardson() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let a = random_angles(&mut rng);
            for i in 0..STATE_DIM {
                let plain = state_derivative(&a, i).unwrap();
                let rich = state_derivative_richardson(&a, i, 1e-3).unwrap();
                assert!(max_abs(&(plain - rich)) < 1e-6, "coordinate {i}");
            }
        }
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let mut a = AngleVector::new([0.1; FRAME_DIM], [0.1, 0.2, 2.0]);
        assert!(a.validate(AngleDomain::Volume).is_err());
        assert!(a.validate(AngleDomain::Boundary).is_ok());
        a.euler[3] = f64::NAN;
        assert!(a.validate(AngleDomain::Boundary).is_err());
    }
}
