//! Monotone Riemannian metrics on two-qubit states and their volume and hyperarea elements.
//!
//! A monotone metric is fixed by an operator monotone function `f` with `f(1) = 1`, or
//! equivalently by its Morozova–Chentsov function `c(x, y) = 1 / (y f(x/y))`. In the eigenbasis of
//! `D` the squared line element is
//!
//! ```text
//! ds² = s Σ_{j,k} c(λ_j, λ_k) |⟨j|dD|k⟩|²,     s = 1/4 (Bures-normalized) or 1 (×4 "tilde").
//! ```
//!
//! With `c_Bures = 2/(x+y)` and `s = 1/4` this is the usual Bures element. The metric splits into
//! a flag part, where each eigenvalue pair contributes `(λ_j - λ_k)² c(λ_j, λ_k) / 2`, and a
//! diagonal part whose density is `1/√det D` for every monotone metric. The Hilbert–Schmidt
//! metric is carried along as the flat calibration case `c ≡ 4`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat4};
use crate::qstate::{self, AngleVector, Eigensystem, FRAME_DIM, STATE_DIM};

/// Smallest eigenvalue gap accepted by the eigenbasis form of the metric tensor.
pub const GAP_THRESHOLD: f64 = 1e-8;
/// Below this, `|∂ det(PT)/∂θ3|` (per unit `sin 2θ3`) marks a tangential root.
pub const TANGENTIAL_THRESHOLD: f64 = 1e-14;

/// Riemannian volume of the flag manifold `U(N)/U(1)^N` under `Σ_{j<k} |dA_jk|²`:
/// `π^{N(N-1)/2} / Π_{k=1}^{N-1} k!`.
pub fn flag_volume(n: u32) -> f64 {
    let mut denom = 1.0;
    let mut fact = 1.0;
    for k in 1..n {
        fact *= k as f64;
        denom *= fact;
    }
    PI.powi((n * (n - 1) / 2) as i32) / denom
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MetricName {
    Bures,
    Gks,
    Wy,
    Average,
    KuboMori,
    NonInformative,
    Maximal,
    /// `f_a = (1-a) f_max + a f_Bures`, `a ∈ [0, 1]`.
    Interpolated(f64),
    /// Flat Hilbert–Schmidt metric, used only to calibrate the normalization.
    HilbertSchmidt,
}

impl MetricName {
    pub const BUILTIN: [MetricName; 8] = [
        MetricName::Bures,
        MetricName::Gks,
        MetricName::Wy,
        MetricName::Average,
        MetricName::KuboMori,
        MetricName::NonInformative,
        MetricName::Maximal,
        MetricName::HilbertSchmidt,
    ];

    /// Short label used in reports and the conjecture ledger.
    pub fn label(&self) -> String {
        match self {
            MetricName::Bures => "Bures".into(),
            MetricName::Gks => "GKS".into(),
            MetricName::Wy => "WY".into(),
            MetricName::Average => "Average".into(),
            MetricName::KuboMori => "KM".into(),
            MetricName::NonInformative => "NI".into(),
            MetricName::Maximal => "Maximal".into(),
            MetricName::Interpolated(a) => format!("Interp({a})"),
            MetricName::HilbertSchmidt => "HS".into(),
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("interp") {
            let a = rest.trim_start_matches([':', '=', '(']).trim_end_matches(')');
            let a: f64 = a.parse().map_err(|_| Error::UnknownMetric(s.into()))?;
            return interpolated_metric(a, false).map(|m| m.name);
        }
        Ok(match lower.as_str() {
            "bures" | "sd" => MetricName::Bures,
            "gks" => MetricName::Gks,
            "wy" | "wigner-yanase" => MetricName::Wy,
            "average" | "avg" => MetricName::Average,
            "km" | "kubo-mori" => MetricName::KuboMori,
            "ni" | "noninformative" => MetricName::NonInformative,
            "maximal" | "max" => MetricName::Maximal,
            "hs" | "hilbert-schmidt" => MetricName::HilbertSchmidt,
            _ => return Err(Error::UnknownMetric(s.into())),
        })
    }
}

/// `u / ln(1 + u)`, continuous at `u = 0`.
fn u_over_log1p(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u / u.ln_1p()
    }
}

/// An immutable metric value: the named family member plus the ×4 scaling flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneMetric {
    pub name: MetricName,
    pub tilde: bool,
}

pub fn builtin_metric(name: &str, tilde: bool) -> Result<MonotoneMetric> {
    Ok(MonotoneMetric { name: name.parse()?, tilde })
}

pub fn interpolated_metric(a: f64, tilde: bool) -> Result<MonotoneMetric> {
    if !(0.0..=1.0).contains(&a) || !a.is_finite() {
        return Err(Error::OutOfRange(format!("interpolation parameter a = {a} outside [0, 1]")));
    }
    Ok(MonotoneMetric { name: MetricName::Interpolated(a), tilde })
}

impl MonotoneMetric {
    pub fn new(name: MetricName, tilde: bool) -> Self {
        Self { name, tilde }
    }

    pub fn is_monotone(&self) -> bool {
        self.name != MetricName::HilbertSchmidt
    }

    /// Line-element prefactor `s`.
    pub fn scale(&self) -> f64 {
        if self.tilde {
            1.0
        } else {
            0.25
        }
    }

    /// Operator monotone function. Undefined (NaN) for the Hilbert–Schmidt calibration metric.
    pub fn f(&self, t: f64) -> f64 {
        let u = t - 1.0;
        match self.name {
            MetricName::Bures => (1.0 + t) / 2.0,
            MetricName::Gks => {
                if t == 0.0 {
                    1.0 / E
                } else {
                    ((1.0 + u) / u_over_log1p(u) - 1.0).exp()
                }
            }
            MetricName::Wy => (t.sqrt() + 1.0).powi(2) / 4.0,
            MetricName::Average => (1.0 + 6.0 * t + t * t) / (4.0 + 4.0 * t),
            MetricName::KuboMori => {
                if t == 0.0 {
                    0.0
                } else {
                    u_over_log1p(u)
                }
            }
            MetricName::NonInformative => {
                if t == 0.0 {
                    0.0
                } else {
                    2.0 * u_over_log1p(u).powi(2) / (2.0 + u)
                }
            }
            MetricName::Maximal => 2.0 * t / (1.0 + t),
            MetricName::Interpolated(a) => (1.0 - a) * 2.0 * t / (1.0 + t) + a * (1.0 + t) / 2.0,
            MetricName::HilbertSchmidt => f64::NAN,
        }
    }

    /// `f(0⁺)`; zero means `c(λ, 0⁺)` diverges.
    pub fn f_at_zero(&self) -> f64 {
        match self.name {
            MetricName::Bures => 0.5,
            MetricName::Gks => 1.0 / E,
            MetricName::Wy | MetricName::Average => 0.25,
            MetricName::KuboMori | MetricName::NonInformative | MetricName::Maximal => 0.0,
            MetricName::Interpolated(a) => a / 2.0,
            MetricName::HilbertSchmidt => f64::NAN,
        }
    }

    /// Morozova–Chentsov function.
    pub fn c(&self, x: f64, y: f64) -> f64 {
        match self.name {
            MetricName::Bures => 2.0 / (x + y),
            MetricName::Wy => 4.0 / (x.sqrt() + y.sqrt()).powi(2),
            MetricName::Average => 4.0 * (x + y) / (x * x + 6.0 * x * y + y * y),
            MetricName::Maximal => (x + y) / (2.0 * x * y),
            MetricName::Interpolated(a) => 2.0 * (x + y) / (a * (x - y) * (x - y) + 4.0 * x * y),
            MetricName::HilbertSchmidt => 4.0,
            MetricName::KuboMori => {
                // ln(x/y)/(x-y) = ln1p(u)/(y u), u = (x-y)/y
                let u = (x - y) / y;
                if u.abs() < 0.5 {
                    1.0 / (y * u_over_log1p(u))
                } else {
                    (x.ln() - y.ln()) / (x - y)
                }
            }
            MetricName::Gks | MetricName::NonInformative => 1.0 / (y * self.f(x / y)),
        }
    }

    /// `c(λ, 0⁺) = 1 / (λ f(0))`; infinite when `f(0) = 0`.
    pub fn c_at_zero(&self, lambda: f64) -> f64 {
        1.0 / (lambda * self.f_at_zero())
    }
}

/// `Q = Π_{ν<μ} (λ_ν - λ_μ)² c(λ_μ, λ_ν) / 2`; coincident eigenvalues give exactly zero.
pub fn q_factor(metric: &MonotoneMetric, lambda: &[f64]) -> f64 {
    let mut q = 1.0;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            let d = lambda[i] - lambda[j];
            if d == 0.0 {
                return 0.0;
            }
            q *= d * d * metric.c(lambda[j], lambda[i]) / 2.0;
        }
    }
    q
}

/// `H = 1/√(λ1 λ2 λ3 λ4)` for monotone metrics, `1` for Hilbert–Schmidt.
pub fn h_factor(metric: &MonotoneMetric, lambda: &[f64]) -> Result<f64> {
    if !metric.is_monotone() {
        return Ok(1.0);
    }
    let mut h = 1.0;
    for &l in lambda {
        if l < 1e-300 {
            return Err(Error::Divergent(l));
        }
        h /= l.sqrt();
    }
    Ok(h)
}

/// Result of evaluating a possibly divergent volume element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    Value(f64),
    /// The element overflowed or evaluated to a non-finite number.
    Overflow,
}

impl Element {
    pub fn value(self) -> Option<f64> {
        match self {
            Element::Value(v) => Some(v),
            Element::Overflow => None,
        }
    }

    fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            Element::Value(v)
        } else {
            Element::Overflow
        }
    }
}

/// Constant in front of the Bures-normalized product form: flag volume over the 4! orderings
/// of the eigenvalues covered by the angle box.
fn ordering_normalized_flag_volume() -> f64 {
    flag_volume(4) / 24.0
}

/// Diagonal-block density: `2^{-3} H` for monotone metrics, `√4 = 2` for Hilbert–Schmidt.
fn diagonal_density(metric: &MonotoneMetric, lambda: &[f64; 4]) -> Result<f64> {
    Ok(if metric.is_monotone() { h_factor(metric, lambda)? / 8.0 } else { 2.0 })
}

/// Volume element in the fifteen angle coordinates, per state (the 4! eigenvalue orderings
/// covered by the angle box are divided out), so that its integral over the angle box is the
/// volume. Multiplied by `2^15` for tilde metrics.
pub fn volume_element_parts(metric: &MonotoneMetric, lambda: &[f64; 4], jacobian: f64, haar: f64) -> Result<Element> {
    let q = q_factor(metric, lambda);
    if q == 0.0 {
        return Ok(Element::Value(0.0));
    }
    let diag = diagonal_density(metric, lambda)?;
    let mut v = ordering_normalized_flag_volume() * q * diag * jacobian * haar;
    if metric.tilde {
        v *= 32768.0;
    }
    Ok(Element::from_f64(v))
}

pub fn volume_element(metric: &MonotoneMetric, a: &AngleVector) -> Result<Element> {
    let spec = qstate::eigenvalues_from_angles(a.eig[0], a.eig[1], a.eig[2]);
    volume_element_parts(metric, &spec.lambda, spec.jacobian, qstate::haar_density(&a.euler))
}

/// Full 15x15 coordinate metric tensor from finite-difference state derivatives.
pub fn metric_tensor(metric: &MonotoneMetric, a: &AngleVector) -> Result<SMatrix<f64, 15, 15>> {
    let es = Eigensystem::from_angles(a);
    let gap = es.min_gap();
    if gap < GAP_THRESHOLD {
        return Err(Error::DegenerateSpectrum { gap, threshold: GAP_THRESHOLD });
    }
    let mut tangents = Vec::with_capacity(STATE_DIM);
    for i in 0..STATE_DIM {
        let d = qstate::state_derivative(a, i)?;
        tangents.push(es.vectors.adjoint() * d * es.vectors);
    }
    let mut weights = [[0.0; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            weights[j][k] = metric.scale() * metric.c(es.values[j], es.values[k]);
        }
    }
    let mut g = SMatrix::<f64, 15, 15>::zeros();
    for p in 0..STATE_DIM {
        for q in p..STATE_DIM {
            let mut acc = 0.0;
            for j in 0..4 {
                for k in 0..4 {
                    acc += weights[j][k] * (tangents[p][(j, k)] * tangents[q][(j, k)].conj()).re;
                }
            }
            g[(p, q)] = acc;
            g[(q, p)] = acc;
        }
    }
    Ok(g)
}

/// Fourteen coordinates of a boundary base point: twelve frame angles plus `θ1, θ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub euler: [f64; FRAME_DIM],
    pub theta1: f64,
    pub theta2: f64,
}

impl BoundaryPoint {
    pub fn with_theta3(&self, theta3: f64) -> AngleVector {
        AngleVector::new(self.euler, [self.theta1, self.theta2, theta3])
    }

    /// Affine image of a point of the unit 14-cube.
    pub fn from_unit_cube(u: &[f64; 14]) -> Self {
        let mut euler = [0.0; FRAME_DIM];
        for (k, (lo, hi)) in qstate::FRAME_RANGES.iter().enumerate() {
            euler[k] = lo + (hi - lo) * u[k];
        }
        Self { euler, theta1: std::f64::consts::FRAC_PI_2 * u[12], theta2: std::f64::consts::FRAC_PI_2 * u[13] }
    }
}

/// Squared dual norm of the covector `X ↦ Tr(M X)` on traceless Hermitian tangents, with `M`
/// expressed in the eigenbasis.
fn dual_norm_sq(metric: &MonotoneMetric, lambda: &[f64; 4], m: &Mat4) -> f64 {
    let s = metric.scale();
    let mut off = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            if j != k {
                off += m[(j, k)].norm_sqr() / (s * metric.c(lambda[j], lambda[k]));
            }
        }
    }
    let inv_c: Vec<f64> = (0..4).map(|j| 1.0 / metric.c(lambda[j], lambda[j])).collect();
    let mu = (0..4).map(|j| m[(j, j)].re * inv_c[j]).sum::<f64>() / inv_c.iter().sum::<f64>();
    let diag: f64 = (0..4).map(|j| (m[(j, j)].re - mu).powi(2) * inv_c[j] / s).sum();
    off + diag
}

/// Gradient of `det(PT(D))` as the Hermitian matrix `M = PT(adj(PT(D)))`, so that
/// `d det(PT) = Tr(M dD)`.
pub fn det_pt_gradient(d: &Mat4) -> Mat4 {
    qstate::partial_transpose(&linalg::adjugate4(&qstate::partial_transpose(d)))
}

/// Metric-independent data at a root of `det(PT)` along `θ3`.
#[derive(Debug, Clone)]
pub struct RootGeometry {
    pub lambda: [f64; 4],
    /// `U^† M U` with `M` the gradient of `det(PT)`.
    pub m: Mat4,
    /// `∂ det(PT)/∂θ3 / sin(2θ3)`.
    pub slope: f64,
    haar: f64,
    jac: f64,
}

impl RootGeometry {
    pub fn new(bp: &BoundaryPoint, u: &Mat4, haar: f64, theta3: f64) -> Self {
        let spec = qstate::eigenvalues_from_angles(bp.theta1, bp.theta2, theta3);
        let d = qstate::compose(u, &spec.lambda);
        let m = u.adjoint() * det_pt_gradient(&d) * u;
        // ∂f/∂θ3 = a sin(2θ3) (m44 - m33) with a = sin²θ1 sin²θ2
        let a = (bp.theta1.sin() * bp.theta2.sin()).powi(2);
        let slope = a * (m[(3, 3)].re - m[(2, 2)].re);
        Self { lambda: spec.lambda, m, slope, haar, jac: qstate::rank3_jacobian(bp.theta1, bp.theta2) }
    }

    /// Dual norm of `d det(PT)` with respect to the metric.
    pub fn grad_norm(&self, metric: &MonotoneMetric) -> f64 {
        dual_norm_sq(metric, &self.lambda, &self.m).sqrt()
    }

    pub fn is_tangential(&self) -> bool {
        self.slope.abs() < TANGENTIAL_THRESHOLD
    }

    pub fn element(&self, metric: &MonotoneMetric) -> Result<Element> {
        if self.is_tangential() {
            return Err(Error::TangentialRoot(self.slope.abs()));
        }
        let q = q_factor(metric, &self.lambda);
        if q == 0.0 {
            return Ok(Element::Value(0.0));
        }
        let diag = diagonal_density(metric, &self.lambda)?;
        let grad = dual_norm_sq(metric, &self.lambda, &self.m).sqrt();
        // J_simplex / |∂f/∂θ3| = J2 a sin2θ3 / |a sin2θ3 (m44 - m33)|
        let dm = self.m[(3, 3)].re - self.m[(2, 2)].re;
        let mut v = ordering_normalized_flag_volume() * q * diag * self.haar * self.jac * grad / dm.abs();
        if metric.tilde {
            v *= 32768.0;
        }
        Ok(Element::from_f64(v))
    }
}

/// Hyperarea density of the rank-four separability boundary `det(PT) = 0` in the coordinates
/// `(frame, θ1, θ2)`, at a root `θ3`.
///
/// Equals `√det(G) ‖∇f‖_G / |∂f/∂θ3|` (`f = det PT`, `G` the 15x15 metric tensor), divided by
/// the 4! eigenvalue orderings. The gradient norm is the dual norm of `df = Tr(M dD)`, and
/// `J_simplex / |∂λ4/∂θ3|` is folded into the rank-three Jacobian so the element stays finite
/// at `θ3 ∈ {0, π/2, π}`.
pub fn hyperarea_element_rank4(metric: &MonotoneMetric, bp: &BoundaryPoint, theta3: f64) -> Result<Element> {
    let u = qstate::frame(&bp.euler);
    RootGeometry::new(bp, &u, qstate::haar_density(&bp.euler), theta3).element(metric)
}

pub fn supports_rank3(metric: &MonotoneMetric) -> bool {
    metric.is_monotone() && metric.f_at_zero() > 0.0
}

/// Rank-three element from precomputed eigenvalues `(λ1, λ2, λ3, 0)`, Haar weight and Jacobian.
pub fn rank3_element_parts(metric: &MonotoneMetric, lambda: &[f64; 4], haar: f64, jac: f64) -> Result<Element> {
    if !supports_rank3(metric) {
        return Err(Error::UnsupportedStratum { metric: metric.name.label(), surface: "rank3".into() });
    }
    let f0 = metric.f_at_zero();
    let l = lambda;
    let s = metric.scale();
    let mut pairs = 1.0;
    for i in 0..3 {
        for j in i + 1..3 {
            let d = l[i] - l[j];
            pairs *= 2.0 * s * metric.c(l[j], l[i]) * d * d;
        }
        pairs *= 2.0 * s * l[i] / f0;
    }
    if pairs == 0.0 {
        return Ok(Element::Value(0.0));
    }
    let det = l[0] * l[1] * l[2];
    if det < 1e-300 {
        return Err(Error::Divergent(det));
    }
    Ok(Element::from_f64(flag_volume(4) / 6.0 * haar * pairs * s / det.sqrt() * jac))
}

/// Hyperarea density of the rank-three stratum `λ4 = 0` in the coordinates `(frame, θ1, θ2)`,
/// per state (the 3! orderings of the nonzero eigenvalues are divided out).
pub fn hyperarea_element_rank3(metric: &MonotoneMetric, bp: &BoundaryPoint) -> Result<Element> {
    let spec = qstate::eigenvalues_from_angles(bp.theta1, bp.theta2, 0.0);
    rank3_element_parts(metric, &spec.lambda, qstate::haar_density(&bp.euler), qstate::rank3_jacobian(bp.theta1, bp.theta2))
}

/// 14x14 metric on the rank-three stratum from finite-difference derivatives, using the limiting
/// weights `c(λ, 0⁺)` for pairs with the vanishing eigenvalue.
pub fn rank3_metric_tensor(metric: &MonotoneMetric, bp: &BoundaryPoint) -> Result<DMatrix<f64>> {
    let f0 = metric.f_at_zero();
    if !(f0 > 0.0) {
        return Err(Error::UnsupportedStratum { metric: metric.name.label(), surface: "rank3".into() });
    }
    let a = bp.with_theta3(0.0);
    let es = Eigensystem::from_angles(&a);
    let idx: Vec<usize> = (0..14).collect();
    let tangents: Vec<Mat4> = idx
        .iter()
        .map(|&i| qstate::state_derivative(&a, i).map(|d| es.vectors.adjoint() * d * es.vectors))
        .collect::<Result<_>>()?;
    let mut w = [[0.0; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            w[j][k] = match (j, k) {
                (3, 3) => 0.0,
                (3, k) => metric.c_at_zero(es.values[k]),
                (j, 3) => metric.c_at_zero(es.values[j]),
                _ => metric.c(es.values[j], es.values[k]),
            } * metric.scale();
        }
    }
    let mut g = DMatrix::<f64>::zeros(14, 14);
    for p in 0..14 {
        for q in p..14 {
            let mut acc = 0.0;
            for j in 0..4 {
                for k in 0..4 {
                    acc += w[j][k] * (tangents[p][(j, k)] * tangents[q][(j, k)].conj()).re;
                }
            }
            g[(p, q)] = acc;
            g[(q, p)] = acc;
        }
    }
    Ok(g)
}

/// Radial metric component of a qubit (Bloch ball) state at radius `r`.
pub fn bloch_radial_metric(metric: &MonotoneMetric, r: f64) -> f64 {
    let (l1, l2) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    metric.scale() * (metric.c(l1, l1) + metric.c(l2, l2)) / 4.0
}

/// Riemannian volume element of a qubit metric in spherical Bloch coordinates `(r, θ, φ)`.
pub fn bloch_volume_element(metric: &MonotoneMetric, r: f64, theta: f64) -> f64 {
    let (l1, l2) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    let angular = metric.scale() * metric.c(l1, l2) * r * r / 2.0;
    bloch_radial_metric(metric, r).sqrt() * angular * theta.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_monotone() -> Vec<MonotoneMetric> {
        let mut v: Vec<MonotoneMetric> = MetricName::BUILTIN
            .iter()
            .filter(|n| **n != MetricName::HilbertSchmidt)
            .map(|&n| MonotoneMetric::new(n, false))
            .collect();
        for a in [0.0, 0.05, 0.3, 0.5, 0.9, 1.0] {
            v.push(interpolated_metric(a, false).unwrap());
        }
        v
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn builtin_examples() {
        let bures = builtin_metric("bures", false).unwrap();
        assert!((bures.c(0.5, 0.5) - 2.0).abs() < 1e-15);
        let km = builtin_metric("km", false).unwrap();
        assert!(rel(km.c(1.0, E), 1.0 / (E - 1.0)) < 1e-14);
        assert!(rel(1.0 / (E - 1.0), 0.58198) < 1e-5);
        let max = builtin_metric("maximal", false).unwrap();
        assert!(rel(max.c(0.1, 0.4), 6.25) < 1e-14);
        assert!(matches!(builtin_metric("fisher", false), Err(Error::UnknownMetric(_))));
    }

    #[test]
    fn parse_names() {
        assert_eq!("avg".parse::<MetricName>().unwrap(), MetricName::Average);
        assert_eq!("interp:0.1".parse::<MetricName>().unwrap(), MetricName::Interpolated(0.1));
        assert!("interp:1.5".parse::<MetricName>().is_err());
    }

    #[test]
    fn interpolation_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let one = interpolated_metric(1.0, false).unwrap();
        let zero = interpolated_metric(0.0, false).unwrap();
        let half = interpolated_metric(0.5, false).unwrap();
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        let max = MonotoneMetric::new(MetricName::Maximal, false);
        let avg = MonotoneMetric::new(MetricName::Average, false);
        for _ in 0..1000 {
            let (x, y) = (rng.gen_range(1e-3..1.0), rng.gen_range(1e-3..1.0));
            assert!(rel(one.c(x, y), bures.c(x, y)) < 1e-12);
            assert!(rel(zero.c(x, y), max.c(x, y)) < 1e-12);
            assert!(rel(half.c(x, y), avg.c(x, y)) < 1e-12);
            let t = x / y;
            assert!(rel(half.f(t), avg.f(t)) < 1e-12);
        }
        assert!((zero.c(0.2, 0.2) - 5.0).abs() < 1e-12);
        assert!(rel(half.c(0.3, 0.1), 4.0 * 0.4 / (0.09 + 0.18 + 0.01)) < 1e-12);
        assert!(interpolated_metric(-0.1, false).is_err());
        assert!(interpolated_metric(1.1, false).is_err());
    }

    #[test]
    fn morozova_chentsov_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in all_monotone() {
            for _ in 0..10_000 {
                let (x, y) = (rng.gen_range(1e-4..1.0), rng.gen_range(1e-4..1.0));
                let t = rng.gen_range(0.1..10.0);
                assert!(rel(m.c(x, y), m.c(y, x)) < 1e-12, "{} symmetry at {x},{y}", m.name);
                assert!(rel(m.c(t * x, t * y), m.c(x, y) / t) < 1e-12, "{} homogeneity", m.name);
                assert!(rel(m.c(x, x), 1.0 / x) < 1e-12, "{} diagonal", m.name);
                assert!((m.c(x, y) * y * m.f(x / y) - 1.0).abs() < 1e-12, "{} consistency", m.name);
            }
        }
    }

    #[test]
    fn bures_minimal_maximal_maximal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        let max = MonotoneMetric::new(MetricName::Maximal, false);
        for m in all_monotone() {
            for _ in 0..10_000 {
                let (x, y) = (rng.gen_range(1e-4..1.0), rng.gen_range(1e-4..1.0));
                let c = m.c(x, y);
                assert!(c <= max.c(x, y) * (1.0 + 1e-12), "{}", m.name);
                assert!(c >= bures.c(x, y) * (1.0 - 1e-12), "{}", m.name);
            }
        }
    }

    #[test]
    fn table_closed_forms_match_operator_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gks = MonotoneMetric::new(MetricName::Gks, false);
        let ni = MonotoneMetric::new(MetricName::NonInformative, false);
        for _ in 0..1000 {
            let (x, y): (f64, f64) = (rng.gen_range(1e-3..1.0), rng.gen_range(1e-3..1.0));
            let gks_closed = E * (x / y).powf(x / (y - x)) / y;
            assert!(rel(gks.c(x, y), gks_closed) < 1e-9);
            let ni_closed = (x + y) * (x / y).ln().powi(2) / (2.0 * (x - y).powi(2));
            assert!(rel(ni.c(x, y), ni_closed) < 1e-9);
        }
    }

    #[test]
    fn q_factor_examples() {
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        assert_eq!(q_factor(&bures, &[0.3, 0.3, 0.2, 0.2]), 0.0);
        // hand product of Δ²/(λμ+λν): .01/.7 .04/.6 .09/.5 .01/.5 .04/.4 .01/.3
        let want = 0.01 / 0.7 * 0.04 / 0.6 * 0.09 / 0.5 * 0.01 / 0.5 * 0.04 / 0.4 * 0.01 / 0.3;
        assert!(rel(q_factor(&bures, &[0.4, 0.3, 0.2, 0.1]), want) < 1e-12);
        assert!(rel(want, 1.1429e-8) < 1e-4);
        assert!(rel(q_factor(&bures, &[0.75, 0.25]), 0.25) < 1e-15);
    }

    #[test]
    fn h_factor_examples() {
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        assert!((h_factor(&bures, &[0.25; 4]).unwrap() - 16.0).abs() < 1e-12);
        assert!(rel(h_factor(&bures, &[0.4, 0.3, 0.2, 0.1]).unwrap(), 20.412) < 1e-4);
        let hs = MonotoneMetric::new(MetricName::HilbertSchmidt, false);
        assert_eq!(h_factor(&hs, &[0.7, 0.1, 0.1, 0.1]).unwrap(), 1.0);
        assert!(matches!(h_factor(&bures, &[0.5, 0.5, 0.0, 0.0]), Err(Error::Divergent(_))));
    }

    fn random_angles(rng: &mut ChaCha8Rng) -> AngleVector {
        let mut u = [0.0; STATE_DIM];
        for x in u.iter_mut() {
            *x = rng.gen_range(0.05..0.95);
        }
        AngleVector::from_unit_cube(&u, std::f64::consts::FRAC_PI_2)
    }

    #[test]
    fn volume_element_zero_on_coincident_eigenvalues() {
        let bures = MonotoneMetric::new(MetricName::Bures, true);
        // θ3 = π/4 makes λ3 = λ4
        let a = AngleVector::new([0.3; FRAME_DIM], [0.7, 0.9, std::f64::consts::FRAC_PI_4]);
        let spec = qstate::eigenvalues_from_angles(0.7, 0.9, std::f64::consts::FRAC_PI_4);
        assert!((spec.lambda[2] - spec.lambda[3]).abs() < 1e-16);
        match volume_element(&bures, &a).unwrap() {
            Element::Value(v) => assert!(v.abs() < 1e-20),
            Element::Overflow => panic!("overflow"),
        }
    }

    #[test]
    fn tilde_scaling_is_exact_power_of_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_angles(&mut rng);
        for name in [MetricName::Bures, MetricName::KuboMori, MetricName::Wy] {
            let base = volume_element(&MonotoneMetric::new(name, false), &a).unwrap().value().unwrap();
            let tilde = volume_element(&MonotoneMetric::new(name, true), &a).unwrap().value().unwrap();
            assert_eq!(tilde, base * 32768.0);
        }
    }

    #[test]
    fn metric_tensor_is_symmetric_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        for _ in 0..20 {
            let a = random_angles(&mut rng);
            let g = metric_tensor(&bures, &a).unwrap();
            assert_eq!(g, g.transpose());
            let ev = g.symmetric_eigenvalues();
            assert!(ev.iter().all(|&e| e > -1e-8), "{ev}");
        }
    }

    #[test]
    fn metric_tensor_rejects_degenerate_spectrum() {
        let a = AngleVector::new([0.3; FRAME_DIM], [0.7, 0.9, std::f64::consts::FRAC_PI_4]);
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        assert!(matches!(metric_tensor(&bures, &a), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn tensor_determinant_tracks_product_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<AngleVector> = (0..100).map(|_| random_angles(&mut rng)).collect();
        for name in [MetricName::Bures, MetricName::KuboMori, MetricName::Average, MetricName::HilbertSchmidt] {
            let m = MonotoneMetric::new(name, false);
            let ratios: Vec<f64> = pts
                .iter()
                .map(|a| {
                    let g = metric_tensor(&m, a).unwrap();
                    g.determinant().sqrt() / volume_element(&m, a).unwrap().value().unwrap()
                })
                .collect();
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let spread = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
            assert!(spread < 1e-5, "{name}: spread {spread}");
            // the angle box covers each state once per eigenvalue ordering
            assert!((mean - 24.0).abs() < 24.0 * 1e-5, "{name}: {mean}");
        }
    }

    #[test]
    fn bloch_ball_radial_component() {
        let bures = MonotoneMetric::new(MetricName::Bures, false);
        for r in [0.0, 0.3, 0.8] {
            assert!(rel(bloch_radial_metric(&bures, r), 1.0 / (4.0 * (1.0 - r * r))) < 1e-14);
        }
        // shapes r² (1-r²)^{-1/2} and r² (1-r²)^{-3/2}
        let max = MonotoneMetric::new(MetricName::Maximal, false);
        for r in [0.2f64, 0.6, 0.9] {
            let b = bloch_volume_element(&bures, r, 1.0) / (r * r * (1.0 - r * r).powf(-0.5) * 1f64.sin());
            let m = bloch_volume_element(&max, r, 1.0) / (r * r * (1.0 - r * r).powf(-1.5) * 1f64.sin());
            assert!(rel(b, 0.125) < 1e-12);
            assert!(rel(m, 0.125) < 1e-12);
        }
    }

    #[test]
    fn rank3_rejects_divergent_metrics() {
        let bp = BoundaryPoint { euler: [0.4; FRAME_DIM], theta1: 0.8, theta2: 0.6 };
        for name in [MetricName::KuboMori, MetricName::NonInformative, MetricName::Maximal] {
            let err = hyperarea_element_rank3(&MonotoneMetric::new(name, true), &bp).unwrap_err();
            assert!(matches!(err, Error::UnsupportedStratum { .. }));
        }
        assert!(hyperarea_element_rank3(&MonotoneMetric::new(MetricName::Gks, true), &bp).is_ok());
    }

    #[test]
    fn rank3_element_matches_stratum_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for name in [MetricName::Bures, MetricName::Wy, MetricName::Average, MetricName::Gks] {
            let m = MonotoneMetric::new(name, false);
            for _ in 0..30 {
                let mut u = [0.0; 14];
                for x in u.iter_mut() {
                    *x = rng.gen_range(0.05..0.95);
                }
                let bp = BoundaryPoint::from_unit_cube(&u);
                let g = rank3_metric_tensor(&m, &bp).unwrap();
                let want = g.determinant().sqrt() / 6.0;
                let got = hyperarea_element_rank3(&m, &bp).unwrap().value().unwrap();
                assert!(rel(got, want) < 1e-5, "{name}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn det_pt_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_angles(&mut rng);
        let d = qstate::angles_to_state(&a);
        let grad = det_pt_gradient(d.matrix());
        for i in 0..STATE_DIM {
            let dd = qstate::state_derivative(&a, i).unwrap();
            let analytic = (grad * dd).trace().re;
            let h = 1e-6;
            let mut xp = a.to_array();
            let mut xm = a.to_array();
            xp[i] += h;
            xm[i] -= h;
            let fp = qstate::det_pt(qstate::angles_to_state(&AngleVector::from_array(&xp)).matrix());
            let fm = qstate::det_pt(qstate::angles_to_state(&AngleVector::from_array(&xm)).matrix());
            assert!((analytic - (fp - fm) / (2.0 * h)).abs() < 1e-8);
        }
    }
}
