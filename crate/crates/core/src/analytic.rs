//! Closed-form constants, the conjecture ledger, sphere/cap geometry for the Lévy–Gromov check,
//! and the diagonal-state Bures Ricci formula with a minimization search.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::integrate::{EstimateSeries, TargetKind};
use crate::linalg::{C64, ZERO};
use crate::metrics::{self, MetricName, MonotoneMetric};

/// Silver mean `√2 - 1`.
pub fn silver_mean() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

/// `(p/q) π^pi σ^sigma` with `σ = √2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exact {
    pub coeff: Ratio<i64>,
    pub pi: i32,
    pub sigma: i32,
}

impl Exact {
    pub const fn new(num: i64, den: i64, pi: i32, sigma: i32) -> Self {
        Self { coeff: Ratio::new_raw(num, den), pi, sigma }
    }

    pub fn value(&self) -> f64 {
        *self.coeff.numer() as f64 / *self.coeff.denom() as f64 * PI.powi(self.pi) * silver_mean().powi(self.sigma)
    }

    pub fn mul(&self, o: &Exact) -> Exact {
        Exact { coeff: self.coeff * o.coeff, pi: self.pi + o.pi, sigma: self.sigma + o.sigma }
    }

    pub fn div(&self, o: &Exact) -> Exact {
        Exact { coeff: self.coeff / o.coeff, pi: self.pi - o.pi, sigma: self.sigma - o.sigma }
    }
}

fn power(name: &str, k: i32) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{name}^{k}")
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeff.reduced();
        let mut num = Vec::new();
        let mut den = Vec::new();
        if *c.numer() != 1 || (self.pi <= 0 && self.sigma <= 0) {
            num.push(c.numer().to_string());
        }
        if *c.denom() != 1 {
            den.push(c.denom().to_string());
        }
        for (name, k) in [("sigma", self.sigma), ("pi", self.pi)] {
            if k > 0 {
                num.push(power(name, k));
            } else if k < 0 {
                den.push(power(name, -k));
            }
        }
        write!(f, "{}", num.join("*"))?;
        match den.len() {
            0 => Ok(()),
            1 => write!(f, "/{}", den[0]),
            _ => write!(f, "/({})", den.join("*")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    VSep,
    VTotal,
    BSep,
    BTotal,
    Beta,
    BSepPlusBeta,
    PSep,
    PiSepRank3,
}

impl Quantity {
    pub fn label(&self) -> &'static str {
        match self {
            Quantity::VSep => "V_sep",
            Quantity::VTotal => "V_total",
            Quantity::BSep => "B_sep",
            Quantity::BTotal => "B_total",
            Quantity::Beta => "Beta",
            Quantity::BSepPlusBeta => "B_sep_plus_Beta",
            Quantity::PSep => "P_sep",
            Quantity::PiSepRank3 => "Pi_sep_rank3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Known,
    Conjectured,
    Unknown,
    Infinite,
    /// An earlier conjecture replaced by a later one; kept for the record.
    Superseded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureEntry {
    /// Metric label; values are for the ×4 ("tilde") metric.
    pub metric: &'static str,
    pub quantity: Quantity,
    pub exact: Option<Exact>,
    pub status: Status,
    /// Decimal printed alongside the closed form, where there is one.
    pub printed: Option<f64>,
}

impl ConjectureEntry {
    pub fn value(&self) -> f64 {
        match (self.status, self.exact) {
            (Status::Infinite, _) => f64::INFINITY,
            (_, Some(e)) => e.value(),
            _ => f64::NAN,
        }
    }

    pub fn expr(&self) -> String {
        match (self.status, self.exact) {
            (Status::Infinite, _) => "inf".into(),
            (_, Some(e)) => e.to_string(),
            _ => "?".into(),
        }
    }
}

const Q_COLUMNS: [Quantity; 6] =
    [Quantity::VSep, Quantity::VTotal, Quantity::BSep, Quantity::BTotal, Quantity::Beta, Quantity::BSepPlusBeta];

enum Cell {
    C(Exact, Option<f64>),
    K(Exact, Option<f64>),
    U,
    Inf,
}

fn row(metric: &'static str, cells: [Cell; 6]) -> Vec<ConjectureEntry> {
    Q_COLUMNS
        .iter()
        .zip(cells)
        .map(|(&quantity, c)| {
            let (exact, status, printed) = match c {
                Cell::C(e, p) => (Some(e), Status::Conjectured, p),
                Cell::K(e, p) => (Some(e), Status::Known, p),
                Cell::U => (None, Status::Unknown, None),
                Cell::Inf => (None, Status::Infinite, None),
            };
            ConjectureEntry { metric, quantity, exact, status, printed }
        })
        .collect()
}

/// The full ledger: per-metric volumes and hyperareas, derived probabilities and the superseded
/// earlier conjectures.
pub fn conjecture_table() -> Vec<ConjectureEntry> {
    use Cell::*;
    let mut t = Vec::new();
    t.extend(row(
        "Bures",
        [
            C(Exact::new(1, 3, 0, 1), Some(0.138071)),
            K(Exact::new(1, 5040, 8, 0), Some(1.882645)),
            C(Exact::new(43, 39, 0, 1), Some(0.456697)),
            K(Exact::new(512, 135135, 7, 0), Some(11.4433)),
            C(Exact::new(55, 39, 0, 1), Some(0.584147)),
            C(Exact::new(98, 39, 0, 1), Some(1.04084)),
        ],
    ));
    t.extend(row(
        "GKS",
        [
            C(Exact::new(4, 5, 0, 1), Some(0.331371)),
            C(Exact::new(1, 1750, 8, 0), Some(5.42202)),
            U,
            U,
            C(Exact::new(270, 77, 0, 1), Some(1.45244)),
            U,
        ],
    ));
    t.extend(row(
        "WY",
        [
            C(Exact::new(7, 4, 0, 1), Some(0.724874)),
            U,
            C(Exact::new(7735, 1, 0, 1), Some(3203.94)),
            C(Exact::new(262144, 45045, 7, 0), Some(17576.9)),
            C(Exact::new(15950, 1, 0, 1), None),
            C(Exact::new(23685, 1, 0, 1), None),
        ],
    ));
    t.extend(row(
        "Average",
        [
            C(Exact::new(29, 9, 0, 1), Some(1.33469)),
            C(Exact::new(25, 8448, 8, 0), Some(28.0792)),
            C(Exact::new(255, 16, 0, 1), Some(6.60153)),
            C(Exact::new(3437, 42075, 7, 0), Some(246.72)),
            C(Exact::new(15, 1, 0, 1), None),
            C(Exact::new(495, 16, 0, 1), None),
        ],
    ));
    t.extend(row(
        "KM",
        [
            C(Exact::new(10, 1, 0, 1), Some(4.14214)),
            C(Exact::new(4, 315, 8, 0), Some(120.489)),
            Inf,
            Inf,
            C(Exact::new(616, 13, 0, 1), Some(19.6274)),
            Inf,
        ],
    ));
    t.extend(row("NI", [U, U, Inf, Inf, U, Inf]));
    t.extend(row("Maximal", [Inf, Inf, Inf, Inf, Inf, Inf]));
    let derived = |metric, quantity, e: Exact, status, printed| ConjectureEntry {
        metric,
        quantity,
        exact: Some(e),
        status,
        printed: Some(printed),
    };
    t.push(derived("Bures", Quantity::PSep, Exact::new(1680, 1, -8, 1), Status::Conjectured, 0.0733389));
    t.push(derived("KM", Quantity::PSep, Exact::new(1575, 2, -8, 1), Status::Conjectured, 0.0343776));
    t.push(derived("Bures", Quantity::PiSepRank3, Exact::new(297297, 1024, -7, 1), Status::Conjectured, 0.0398167));
    t.push(derived("Bures", Quantity::VSep, Exact::new(1, 6930, 6, 0), Status::Superseded, 0.138729));
    t.push(ConjectureEntry {
        metric: "Bures",
        quantity: Quantity::PSep,
        exact: None,
        status: Status::Superseded,
        printed: Some(0.0736881),
    });
    t
}

/// `8/(11π²)`: the superseded separability probability, which is not of the `(p/q) π^k σ^j` form.
pub fn superseded_bures_probability() -> f64 {
    8.0 / (11.0 * PI * PI)
}

/// Current (non-superseded) ledger entry.
pub fn lookup(metric: &str, quantity: Quantity) -> Option<ConjectureEntry> {
    conjecture_table()
        .into_iter()
        .find(|e| e.metric.eq_ignore_ascii_case(metric) && e.quantity == quantity && e.status != Status::Superseded)
}

/// Exact ratio of two current ledger entries.
pub fn ledger_ratio(metric_a: &str, qa: Quantity, metric_b: &str, qb: Quantity) -> Option<Exact> {
    Some(lookup(metric_a, qa)?.exact?.div(&lookup(metric_b, qb)?.exact?))
}

/// `(B^s + β)/V^s` for Bures, `98/13`.
pub fn separable_area_volume_ratio() -> Exact {
    ledger_ratio("Bures", Quantity::BSepPlusBeta, "Bures", Quantity::VSep).unwrap()
}

/// `B^{s+n}/V^{s+n}` for Bures, `8192/(429π)`.
pub fn total_area_volume_ratio() -> Exact {
    ledger_ratio("Bures", Quantity::BTotal, "Bures", Quantity::VTotal).unwrap()
}

fn ledger_metric(m: &MetricName) -> Option<&'static str> {
    Some(match m {
        MetricName::Bures => "Bures",
        MetricName::Gks => "GKS",
        MetricName::Wy => "WY",
        MetricName::Average => "Average",
        MetricName::KuboMori => "KM",
        MetricName::NonInformative => "NI",
        MetricName::Maximal => "Maximal",
        MetricName::Interpolated(a) if *a == 1.0 => "Bures",
        MetricName::Interpolated(a) if *a == 0.5 => "Average",
        MetricName::Interpolated(a) if *a == 0.0 => "Maximal",
        _ => return None,
    })
}

/// A numeric target with its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub expr: String,
    pub value: f64,
    pub status: Status,
}

/// Ledger target for one quantity. Ledger volumes and areas are for the ×4 metrics; separability
/// probabilities are scale free. Hilbert–Schmidt has only its total volume, `π^6/851350500`.
pub fn target_for_quantity(metric: &MonotoneMetric, quantity: Quantity) -> Result<Target> {
    let none = || Error::NoTarget(format!("{} {}", metric.name, quantity.label()));
    if metric.name == MetricName::HilbertSchmidt {
        if quantity != Quantity::VTotal || metric.tilde {
            return Err(none());
        }
        let e = Exact::new(1, 851350500, 6, 0);
        return Ok(Target { expr: e.to_string(), value: e.value(), status: Status::Known });
    }
    if !metric.tilde && quantity != Quantity::PSep {
        return Err(Error::NoTarget(format!("{} {}: ledger values are for the x4 metrics", metric.name, quantity.label())));
    }
    let name = ledger_metric(&metric.name).ok_or_else(none)?;
    let e = lookup(name, quantity).ok_or_else(none)?;
    match e.status {
        Status::Known | Status::Conjectured => Ok(Target { expr: e.expr(), value: e.value(), status: e.status }),
        _ => Err(Error::NoTarget(format!("{name} {}: {}", quantity.label(), e.expr()))),
    }
}

/// Ledger target for an estimated quantity; the nonseparable volume is the difference of the
/// total and separable targets.
pub fn target_for(metric: &MonotoneMetric, kind: TargetKind) -> Result<Target> {
    let single = |q| target_for_quantity(metric, q);
    match kind {
        TargetKind::VTotal => single(Quantity::VTotal),
        TargetKind::VSep => single(Quantity::VSep),
        TargetKind::BRank3Total => single(Quantity::BTotal),
        TargetKind::BRank3Sep => single(Quantity::BSep),
        TargetKind::BetaRank4Sep => single(Quantity::Beta),
        TargetKind::VNonsep => {
            let (t, s) = (single(Quantity::VTotal)?, single(Quantity::VSep)?);
            Ok(Target { expr: format!("{} - {}", t.expr, s.expr), value: t.value - s.value, status: Status::Conjectured })
        }
        TargetKind::BetaRank4All => Err(Error::NoTarget(format!("{} {kind:?}", metric.name))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub points: u64,
    pub estimate: f64,
    pub deviation: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub metric: String,
    pub target_kind: TargetKind,
    pub target: Target,
    pub rows: Vec<DeviationRow>,
    pub final_row: DeviationRow,
}

pub fn deviation(points: u64, estimate: f64, target: f64) -> DeviationRow {
    DeviationRow { points, estimate, deviation: estimate - target, relative: estimate / target - 1.0 }
}

/// Per-checkpoint `estimate - target` and `estimate/target - 1`.
pub fn compare_to_conjecture(series: &EstimateSeries, metric: &MonotoneMetric) -> Result<DeviationReport> {
    let target = target_for(metric, series.target)?;
    if !target.value.is_finite() {
        return Err(Error::NoTarget(format!("{} {:?} is infinite", series.metric, series.target)));
    }
    let n = series.checkpoints.last().map_or(0, |c| c.0);
    Ok(DeviationReport {
        metric: series.metric.clone(),
        target_kind: series.target,
        rows: series.checkpoints.iter().map(|&(p, e)| deviation(p, e, target.value)).collect(),
        final_row: deviation(n.max(1), series.final_value, target.value),
        target,
    })
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("dimension N = {n} must be at least 2")));
    }
    Ok(())
}

/// Bures volume of the `N×N` density matrices, `2^{1-N²} π^{N²/2} / Γ(N²/2)`.
pub fn bures_total_volume(n: u32) -> Result<f64> {
    check_n(n)?;
    let n2 = (n * n) as f64;
    Ok(2f64.powf(1.0 - n2) * PI.powf(n2 / 2.0) / gamma(n2 / 2.0))
}

/// Hall/Bures normalization `2^{N²-N} Γ(N²/2) / (π^{N/2} Γ(1)⋯Γ(N+1))`.
pub fn hall_constant(n: u32) -> Result<f64> {
    check_n(n)?;
    let n2 = (n * n) as f64;
    let denom: f64 = (1..=n + 1).map(|k| gamma(k as f64)).product();
    Ok(2f64.powf(n2 - n as f64) * gamma(n2 / 2.0) / (PI.powf(n as f64 / 2.0) * denom))
}

fn gl(degree: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(degree).expect("positive degree"))
}

/// `∫ Q_N H_N dλ` over the unordered eigenvalue simplex, by tensor Gauss–Legendre quadrature in
/// hyperspherical angles with a smoothstep substitution that tames endpoint singularities.
pub fn simplex_qh_integral(metric: &MonotoneMetric, n: usize, degree: usize) -> Result<f64> {
    check_n(n as u32)?;
    let rule = gl(degree);
    let nodes: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| {
            let u = 0.5 * (x + 1.0);
            // θ = (π/2)(3u² - 2u³)
            (FRAC_PI_2 * u * u * (3.0 - 2.0 * u), 0.5 * w * FRAC_PI_2 * 6.0 * u * (1.0 - u))
        })
        .collect();
    let k = n - 1;
    let mut idx = vec![0usize; k];
    let mut total = 0.0;
    let mut lambda = vec![0.0; n];
    loop {
        let mut weight = 1.0;
        let mut jac = 1.0;
        let mut rest = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            let (th, w) = nodes[i];
            let (s, c) = th.sin_cos();
            weight *= w;
            lambda[j] = rest * c * c;
            rest *= s * s;
            jac *= 2.0 * c * s.powi(2 * (n - 1 - j) as i32 - 1);
        }
        lambda[n - 1] = rest;
        // nodes whose eigenvalues underflow carry no weight
        let q = if lambda.iter().all(|&l| l > 0.0) { metrics::q_factor(metric, &lambda) } else { 0.0 };
        if q != 0.0 {
            if let Ok(h) = metrics::h_factor(metric, &lambda) {
                total += weight * jac * q * h;
            }
        }
        let mut p = 0;
        while p < k {
            idx[p] += 1;
            if idx[p] < degree {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
        if p == k {
            break;
        }
    }
    Ok(total)
}

/// Volume of a qubit metric over the Bloch ball by 1-d quadrature in `r = sin φ`.
pub fn bloch_ball_volume(metric: &MonotoneMetric, degree: usize) -> f64 {
    4.0 * PI
        * gl(degree).integrate(0.0, FRAC_PI_2, |phi| {
            let r = phi.sin();
            metrics::bloch_volume_element(metric, r, FRAC_PI_2) * phi.cos()
        })
}

/// Content of the unit `n`-sphere `S^n ⊂ R^{n+1}`.
pub fn sphere_volume(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::OutOfRange("sphere dimension must be at least 1".into()));
    }
    let m = (n + 1) as f64;
    Ok(2.0 * PI.powf(m / 2.0) / gamma(m / 2.0))
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: u32) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0 + 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(())
}

/// Boundary content of the geodesic cap of `S^n` whose volume is `α vol(S^n)`.
pub fn cap_boundary_area(n: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let whole = sphere_volume(n)?;
    let equator = if n == 1 { 2.0 } else { sphere_volume(n - 1)? };
    let rule = gl(64);
    let cap = |r: f64| equator * rule.integrate(0.0, r, |t| t.sin().powi(n as i32 - 1));
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cap(mid) < alpha * whole {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    Ok(equator * r.sin().powi(n as i32 - 1))
}

/// Boundary content of the Euclidean ball in `R^n` whose volume is `α` times the unit ball's:
/// `n B_n α^{(n-1)/n}`.
pub fn ball_boundary_area(n: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(n as f64 * ball_volume(n) * alpha.powf((n as f64 - 1.0) / n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Satisfied,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyGromovReport {
    pub alpha: f64,
    /// Normalizing content (the unit 15-ball, `256π⁷/2027025`).
    pub reference_volume: f64,
    pub s_alpha: f64,
    pub is_alpha: f64,
    /// `(B^s + β)/V^{s+n}` in Bures units.
    pub ratio: f64,
    pub verdict: Verdict,
    /// `Is` from the geodesic cap of the round `S^15`, for comparison.
    pub is_alpha_spherical_cap: f64,
}

/// Isoperimetric comparison at volume fraction `alpha` against an area/volume `ratio`.
pub fn levy_gromov_with(alpha: f64, ratio: f64) -> Result<LevyGromovReport> {
    let n = 15;
    let reference_volume = ball_volume(n);
    let s_alpha = ball_boundary_area(n, alpha)?;
    let is_alpha = s_alpha / reference_volume;
    let is_alpha_spherical_cap = cap_boundary_area(n, alpha)? / sphere_volume(n)?;
    Ok(LevyGromovReport {
        alpha,
        reference_volume,
        s_alpha,
        is_alpha,
        ratio,
        verdict: if is_alpha <= ratio { Verdict::Satisfied } else { Verdict::Violated },
        is_alpha_spherical_cap,
    })
}

/// Ledger-based check: `α = P^s_SD = 1680σ/π⁸` and ratio
/// `2^{-14}(B^s_SD + β_SD) / (2^{-15} V^{s+n}_SD)`.
pub fn levy_gromov_check() -> LevyGromovReport {
    let alpha = lookup("Bures", Quantity::PSep).and_then(|e| e.exact).unwrap().value();
    let area = lookup("Bures", Quantity::BSepPlusBeta).unwrap().value();
    let vol = lookup("Bures", Quantity::VTotal).unwrap().value();
    levy_gromov_with(alpha, 2.0 * area / vol).expect("ledger alpha lies in [0, 1]")
}

fn check_state(rho: &[f64]) -> Result<()> {
    if let Some(&r) = rho.iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::NotDensityMatrix(format!("nonpositive eigenvalue {r}")));
    }
    Ok(())
}

/// Bures Ricci tensor at a diagonal state:
/// `3 Σ Y_νμ ρ_η Z_μν / ((ρ_μ+ρ_ν)(ρ_μ+ρ_η)(ρ_ν+ρ_η)) - (3/2) Σ Y_μμ Z_νν / (ρ_μ+ρ_ν)²`.
pub fn ricci_diag(rho: &[f64], y: &DMatrix<C64>, z: &DMatrix<C64>) -> Result<f64> {
    check_state(rho)?;
    let n = rho.len();
    let mut first = ZERO;
    for mu in 0..n {
        for nu in 0..n {
            let yz = y[(nu, mu)] * z[(mu, nu)];
            let mut acc = 0.0;
            for eta in 0..n {
                acc += rho[eta] / ((rho[mu] + rho[eta]) * (rho[nu] + rho[eta]));
            }
            first += yz * (acc / (rho[mu] + rho[nu]));
        }
    }
    let mut second = ZERO;
    for mu in 0..n {
        for nu in 0..n {
            second += y[(mu, mu)] * z[(nu, nu)] / (rho[mu] + rho[nu]).powi(2);
        }
    }
    Ok((first * 3.0 - second * 1.5).re)
}

/// Bures inner product `(1/2) Σ Re(conj(Y_μν) Z_μν) / (ρ_μ + ρ_ν)` at a diagonal state.
pub fn bures_inner(rho: &[f64], y: &DMatrix<C64>, z: &DMatrix<C64>) -> f64 {
    let n = rho.len();
    let mut acc = 0.0;
    for mu in 0..n {
        for nu in 0..n {
            acc += (y[(mu, nu)].conj() * z[(mu, nu)]).re / (rho[mu] + rho[nu]);
        }
    }
    0.5 * acc
}

/// Real basis of the traceless Hermitian `N×N` matrices (dimension `N² - 1`).
pub fn traceless_hermitian_basis(n: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        // diag(1, ..., 1, -k, 0, ...) with k ones
        let mut m = DMatrix::from_element(n, n, ZERO);
        for j in 0..k {
            m[(j, j)] = C64::new(1.0, 0.0);
        }
        m[(k, k)] = C64::new(-(k as f64), 0.0);
        out.push(m);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut re = DMatrix::from_element(n, n, ZERO);
            re[(i, j)] = C64::new(1.0, 0.0);
            re[(j, i)] = C64::new(1.0, 0.0);
            out.push(re);
            let mut im = DMatrix::from_element(n, n, ZERO);
            im[(i, j)] = C64::new(0.0, 1.0);
            im[(j, i)] = C64::new(0.0, -1.0);
            out.push(im);
        }
    }
    out
}

/// Gram–Schmidt in the Bures inner product at `rho`.
pub fn bures_orthonormal_basis(rho: &[f64]) -> Result<Vec<DMatrix<C64>>> {
    check_state(rho)?;
    let mut basis: Vec<DMatrix<C64>> = Vec::new();
    for mut v in traceless_hermitian_basis(rho.len()) {
        for b in &basis {
            let c = bures_inner(rho, b, &v);
            v -= b * C64::new(c, 0.0);
        }
        let norm = bures_inner(rho, &v, &v).sqrt();
        basis.push(v / C64::new(norm, 0.0));
    }
    Ok(basis)
}

/// `Σ_i Ricci(E_i, E_i)` over a Bures-orthonormal tangent basis.
pub fn ricci_trace(rho: &[f64]) -> Result<f64> {
    bures_orthonormal_basis(rho)?.iter().map(|e| ricci_diag(rho, e, e)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitNorm {
    /// `g_Bures(Y, Y) = 1`.
    Bures,
    /// `Tr Y² = 1`.
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicciMinimum {
    pub n: usize,
    pub norm: UnitNorm,
    pub value: f64,
    pub rho: Vec<f64>,
    /// Real parameters of `Y`: diagonal entries, then (re, im) of the upper triangle.
    pub y: Vec<f64>,
    pub negative_found: bool,
}

fn unpack(n: usize, x: &[f64]) -> (Vec<f64>, DMatrix<C64>) {
    // softmax keeps ρ in the open simplex
    let mx = x[..n].iter().cloned().fold(f64::MIN, f64::max);
    let e: Vec<f64> = x[..n].iter().map(|v| (v - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    let rho = e.iter().map(|v| (v / s).max(1e-300)).collect();
    let mut y = DMatrix::from_element(n, n, ZERO);
    let mut k = n;
    for i in 0..n {
        y[(i, i)] = C64::new(x[k], 0.0);
        k += 1;
    }
    for i in 0..n {
        for j in i + 1..n {
            y[(i, j)] = C64::new(x[k], x[k + 1]);
            y[(j, i)] = C64::new(x[k], -x[k + 1]);
            k += 2;
        }
    }
    let tr = y.trace() / C64::new(n as f64, 0.0);
    for i in 0..n {
        y[(i, i)] -= tr;
    }
    (rho, y)
}

/// `Ricci(Y, Y)` for a unit `Y`, as a function of unconstrained parameters.
fn normalized_ricci(n: usize, x: &[f64], norm: UnitNorm) -> f64 {
    let (rho, y) = unpack(n, x);
    let len2 = match norm {
        UnitNorm::Bures => bures_inner(&rho, &y, &y),
        UnitNorm::Euclidean => (&y * &y).trace().re,
    };
    if !(len2 > 1e-300) {
        return f64::INFINITY;
    }
    ricci_diag(&rho, &y, &y).map_or(f64::INFINITY, |r| r / len2)
}

/// Random restarts followed by coordinate-wise polishing. Restarts run in parallel and the
/// running minimum is merged in restart order, so the result depends only on the seed.
pub fn ricci_min_search(n: usize, trials: usize, refinement_steps: usize, norm: UnitNorm, seed: u64) -> Result<RicciMinimum> {
    if !(2..=4).contains(&n) {
        return Err(Error::OutOfRange(format!("Ricci search supports N in 2..=4, got {n}")));
    }
    let dim = n + n * n;
    let candidates: Vec<(f64, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let x: Vec<f64> = (0..dim)
                .map(|i| if i < n { rng.gen_range(-4.0..4.0) } else { rng.gen_range(-1.0..1.0) })
                .collect();
            (normalized_ricci(n, &x, norm), x)
        })
        .collect();
    let mut order: Vec<usize> = (0..trials).collect();
    order.sort_by(|&a, &b| candidates[a].0.total_cmp(&candidates[b].0).then(a.cmp(&b)));
    // polish the best few starts
    let polished: Vec<(f64, Vec<f64>)> = order
        .iter()
        .take(16.min(trials))
        .map(|&i| candidates[i].clone())
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(mut best, mut x)| {
            let mut step = 0.5;
            for _ in 0..refinement_steps {
                let mut improved = false;
                for i in 0..dim {
                    for dir in [step, -step] {
                        x[i] += dir;
                        let v = normalized_ricci(n, &x, norm);
                        if v < best {
                            best = v;
                            improved = true;
                            break;
                        }
                        x[i] -= dir;
                    }
                }
                if !improved {
                    step *= 0.5;
                    if step < 1e-10 {
                        break;
                    }
                }
            }
            (best, x)
        })
        .collect();
    let (value, x) = polished
        .into_iter()
        .chain(order.first().map(|&i| candidates[i].clone()))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::InvalidConfig("need at least one trial".into()))?;
    let (rho, _) = unpack(n, &x);
    Ok(RicciMinimum { n, norm, value, rho, y: x[n..].to_vec(), negative_found: value < 0.0 })
}
