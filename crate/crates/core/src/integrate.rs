//! Volume and boundary estimators.
//!
//! Points are generated and evaluated in blocks of [`BLOCK`] consecutive indices. Each block is
//! summed pairwise, the blocks of one checkpoint segment are reduced by a fixed pairwise tree, and
//! segments are accumulated in order. The result depends only on the run configuration, never on
//! how many worker threads evaluated the blocks.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, pairwise_sum, Mat4};
use crate::metrics::{self, BoundaryPoint, Element, MonotoneMetric, RootGeometry};
use crate::qstate::{self, AngleVector, DET_BAND, STATE_DIM};
use crate::sequences::{PointSequence, SequenceConfig};

pub const BLOCK: usize = 4096;
pub const VOLUME_CHECKPOINT: u64 = 1_000_000;
pub const BOUNDARY_CHECKPOINT: u64 = 100_000;
pub const ROOT_GRID_CELLS: usize = 256;
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const ROOT_DEDUP: f64 = 1e-9;
/// Offset at which the two sides of a boundary root are probed for separability.
pub const SIDE_PROBE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    VTotal,
    VSep,
    VNonsep,
    BRank3Total,
    BRank3Sep,
    BetaRank4Sep,
    BetaRank4All,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Points whose element could not be evaluated (a vanishing eigenvalue with nonzero `Q`, or a
    /// boundary line on which `det(PT)` vanishes identically).
    pub skipped: u64,
    /// Points whose element overflowed; excluded from the sums.
    pub overflow: u64,
    /// Boundary roots skipped because `det(PT)` is tangent to zero there.
    pub tangential: u64,
    /// `root_histogram[k]` = number of base points with exactly `k` roots in `θ3 ∈ [0, π]`.
    pub root_histogram: Vec<u64>,
}

impl Diagnostics {
    fn merge(&mut self, other: &Diagnostics) {
        self.skipped += other.skipped;
        self.overflow += other.overflow;
        self.tangential += other.tangential;
        if self.root_histogram.len() < other.root_histogram.len() {
            self.root_histogram.resize(other.root_histogram.len(), 0);
        }
        for (a, b) in self.root_histogram.iter_mut().zip(&other.root_histogram) {
            *a += b;
        }
    }

    /// Fraction of histogrammed base points with at least one root.
    pub fn root_fraction(&self) -> f64 {
        let total: u64 = self.root_histogram.iter().sum();
        let none = self.root_histogram.first().copied().unwrap_or(0);
        if total == 0 {
            f64::NAN
        } else {
            (total - none) as f64 / total as f64
        }
    }

    pub fn roots_with_count(&self, k: usize) -> u64 {
        self.root_histogram.get(k).copied().unwrap_or(0)
    }

    fn record_roots(&mut self, k: usize) {
        if self.root_histogram.len() <= k {
            self.root_histogram.resize(k + 1, 0);
        }
        self.root_histogram[k] += 1;
    }

    fn absorb(&mut self, e: Result<Element>) -> f64 {
        match e {
            Ok(Element::Value(v)) => v,
            Ok(Element::Overflow) => {
                self.overflow += 1;
                0.0
            }
            Err(Error::TangentialRoot(_)) => {
                self.tangential += 1;
                0.0
            }
            Err(_) => {
                self.skipped += 1;
                0.0
            }
        }
    }
}

/// Running estimates of one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSeries {
    pub metric: String,
    pub target: TargetKind,
    pub checkpoints: Vec<(u64, f64)>,
    pub final_value: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeCheckpoint {
    pub points: u64,
    pub total: f64,
    pub sep: f64,
    pub nonsep: f64,
}

impl VolumeCheckpoint {
    pub fn prob_sep(&self) -> f64 {
        self.sep / self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeRun {
    pub metric: MonotoneMetric,
    pub checkpoints: Vec<VolumeCheckpoint>,
    pub final_estimate: VolumeCheckpoint,
    pub diagnostics: Diagnostics,
}

impl VolumeRun {
    pub fn series(&self, kind: TargetKind) -> Result<EstimateSeries> {
        let pick = |c: &VolumeCheckpoint| match kind {
            TargetKind::VTotal => Ok(c.total),
            TargetKind::VSep => Ok(c.sep),
            TargetKind::VNonsep => Ok(c.nonsep),
            _ => Err(Error::InvalidConfig(format!("{kind:?} is not a volume quantity"))),
        };
        Ok(EstimateSeries {
            metric: self.metric.name.label(),
            target: kind,
            checkpoints: self.checkpoints.iter().map(|c| Ok((c.points, pick(c)?))).collect::<Result<_>>()?,
            final_value: pick(&self.final_estimate)?,
            diagnostics: self.diagnostics.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheckpoint {
    pub points: u64,
    /// Rank-three hyperarea, all states.
    pub b_total: f64,
    /// Rank-three hyperarea, separable states.
    pub b_sep: f64,
    /// Rank-four `det(PT) = 0` hyperarea with a separable side.
    pub beta: f64,
    /// Rank-four `det(PT) = 0` hyperarea over all roots.
    pub beta_all: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRun {
    pub metric: MonotoneMetric,
    pub checkpoints: Vec<BoundaryCheckpoint>,
    pub final_estimate: BoundaryCheckpoint,
    pub diagnostics: Diagnostics,
}

impl BoundaryRun {
    pub fn series(&self, kind: TargetKind) -> Result<EstimateSeries> {
        let pick = |c: &BoundaryCheckpoint| match kind {
            TargetKind::BRank3Total => Ok(c.b_total),
            TargetKind::BRank3Sep => Ok(c.b_sep),
            TargetKind::BetaRank4Sep => Ok(c.beta),
            TargetKind::BetaRank4All => Ok(c.beta_all),
            _ => Err(Error::InvalidConfig(format!("{kind:?} is not a boundary quantity"))),
        };
        Ok(EstimateSeries {
            metric: self.metric.name.label(),
            target: kind,
            checkpoints: self.checkpoints.iter().map(|c| Ok((c.points, pick(c)?))).collect::<Result<_>>()?,
            final_value: pick(&self.final_estimate)?,
            diagnostics: self.diagnostics.clone(),
        })
    }
}

/// Per-block, per-metric partial sums.
#[derive(Debug, Clone, Default)]
struct Partial {
    sums: Vec<f64>,
    diag: Diagnostics,
}

/// Drives the block/segment reduction shared by the volume and boundary passes.
///
/// `eval` fills the per-metric partial sums of one block (`width` sums per metric).
fn reduce_stream<F>(
    seq: &PointSequence,
    n_points: u64,
    checkpoint_every: u64,
    n_metrics: usize,
    width: usize,
    eval: F,
) -> Result<(Vec<(u64, Vec<f64>)>, Vec<f64>, Vec<Diagnostics>)>
where
    F: Fn(&[f64], usize, &mut [Vec<Vec<f64>>], &mut [Diagnostics]) + Sync,
{
    if n_points == 0 {
        return Err(Error::InvalidConfig("n_points must be at least 1".into()));
    }
    if checkpoint_every == 0 {
        return Err(Error::InvalidConfig("checkpoint interval must be at least 1".into()));
    }
    if n_points > seq.capacity() {
        return Err(Error::IndexOverflow { index: n_points - 1, capacity: seq.capacity() });
    }
    let dim = seq.dim();
    let cols = n_metrics * width;
    let mut running = vec![0.0; cols];
    let mut diags = vec![Diagnostics::default(); n_metrics];
    let mut checkpoints = Vec::new();
    let mut start = 0u64;
    while start < n_points {
        let end = (start + checkpoint_every).min(n_points);
        let n_blocks = ((end - start) as usize).div_ceil(BLOCK);
        let partials: Vec<Result<Vec<Partial>>> = (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let lo = start + (b * BLOCK) as u64;
                let hi = (lo + BLOCK as u64).min(end);
                let count = (hi - lo) as usize;
                let mut pts = vec![0.0; count * dim];
                seq.fill(lo, &mut pts)?;
                let mut vals = vec![vec![Vec::with_capacity(count); width]; n_metrics];
                let mut d = vec![Diagnostics::default(); n_metrics];
                eval(&pts, count, &mut vals, &mut d);
                Ok(vals
                    .into_iter()
                    .zip(d)
                    .map(|(v, diag)| Partial { sums: v.iter().map(|x| pairwise_sum(x)).collect(), diag })
                    .collect())
            })
            .collect();
        let partials: Vec<Vec<Partial>> = partials.into_iter().collect::<Result<_>>()?;
        for m in 0..n_metrics {
            for w in 0..width {
                let block_sums: Vec<f64> = partials.iter().map(|p| p[m].sums[w]).collect();
                running[m * width + w] += pairwise_sum(&block_sums);
            }
            for p in &partials {
                diags[m].merge(&p[m].diag);
            }
        }
        if end - start == checkpoint_every {
            checkpoints.push((end, running.clone()));
        }
        start = end;
    }
    Ok((checkpoints, running, diags))
}

/// Lebesgue measure of the fifteen-angle box, i.e. the Jacobian of the unit-cube map.
pub fn volume_range_jacobian() -> f64 {
    qstate::frame_box_volume() * FRAC_PI_2.powi(3)
}

/// Lebesgue measure of the fourteen-angle box `(frame, θ1, θ2)`.
pub fn boundary_range_jacobian() -> f64 {
    qstate::frame_box_volume() * FRAC_PI_2.powi(2)
}

/// Estimates `V_total`, `V_sep` and `V_nonsep` for several metrics from one pass over the points.
pub fn estimate_volumes(
    metrics: &[MonotoneMetric],
    cfg: &SequenceConfig,
    n_points: u64,
    checkpoint_every: u64,
) -> Result<Vec<VolumeRun>> {
    if cfg.dim != STATE_DIM {
        return Err(Error::InvalidConfig(format!("volume runs need dimension {STATE_DIM}, got {}", cfg.dim)));
    }
    let seq = cfg.build()?;
    let nm = metrics.len();
    let (cps, fin, diags) = reduce_stream(&seq, n_points, checkpoint_every, nm, 2, |pts, count, vals, d| {
        for k in 0..count {
            let u: &[f64; STATE_DIM] = pts[k * STATE_DIM..(k + 1) * STATE_DIM].try_into().unwrap();
            let a = AngleVector::from_unit_cube(u, FRAC_PI_2);
            let spec = qstate::eigenvalues_from_angles(a.eig[0], a.eig[1], a.eig[2]);
            let haar = qstate::haar_density(&a.euler);
            let uf = qstate::frame(&a.euler);
            let sep = qstate::det_pt(&qstate::compose(&uf, &spec.lambda)) >= -DET_BAND;
            for (m, metric) in metrics.iter().enumerate() {
                let v = d[m].absorb(metrics::volume_element_parts(metric, &spec.lambda, spec.jacobian, haar));
                let (s, ns) = if sep { (v, 0.0) } else { (0.0, v) };
                vals[m][0].push(s);
                vals[m][1].push(ns);
            }
        }
    })?;
    let jac = volume_range_jacobian();
    let to_cp = |points: u64, sums: &[f64], m: usize| {
        let scale = jac / points as f64;
        let (sep, nonsep) = (sums[2 * m] * scale, sums[2 * m + 1] * scale);
        VolumeCheckpoint { points, total: sep + nonsep, sep, nonsep }
    };
    Ok(metrics
        .iter()
        .enumerate()
        .map(|(m, metric)| VolumeRun {
            metric: *metric,
            checkpoints: cps.iter().map(|(p, s)| to_cp(*p, s, m)).collect(),
            final_estimate: to_cp(n_points, &fin, m),
            diagnostics: diags[m].clone(),
        })
        .collect())
}

pub fn estimate_volume(
    metric: &MonotoneMetric,
    cfg: &SequenceConfig,
    n_points: u64,
    checkpoint_every: u64,
) -> Result<VolumeRun> {
    Ok(estimate_volumes(std::slice::from_ref(metric), cfg, n_points, checkpoint_every)?.remove(0))
}

/// `det(PT(D(θ3)))` along `θ3` for fixed frame and `θ1, θ2`.
///
/// With `t = cos 2θ3`, `λ3 = a(1+t)/2` and `λ4 = a(1-t)/2`, so `PT(D) = A + tB` and the
/// determinant is a quartic in `t`, stored by its values at five nodes.
#[derive(Debug, Clone)]
pub struct DetAlongTheta3 {
    coeffs: [f64; 5],
}

impl DetAlongTheta3 {
    pub fn new(bp: &BoundaryPoint, u: &Mat4) -> Self {
        let base = qstate::eigenvalues_from_angles(bp.theta1, bp.theta2, 0.0);
        let a = base.lambda[2];
        let (l1, l2) = (base.lambda[0], base.lambda[1]);
        let pa = qstate::partial_transpose(&qstate::compose(u, &[l1, l2, a / 2.0, a / 2.0]));
        let pb = qstate::partial_transpose(&qstate::compose(u, &[0.0, 0.0, a / 2.0, -a / 2.0]));
        let nodes = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let vals = nodes.map(|t| linalg::det4(&(pa + pb * linalg::C64::new(t, 0.0))).re);
        Self { coeffs: newton_coefficients(&nodes, &vals) }
    }

    pub fn at_t(&self, t: f64) -> f64 {
        let nodes = [-1.0, -0.5, 0.0, 0.5, 1.0];
        let mut v = self.coeffs[4];
        for k in (0..4).rev() {
            v = v * (t - nodes[k]) + self.coeffs[k];
        }
        v
    }

    pub fn at(&self, theta3: f64) -> f64 {
        self.at_t((2.0 * theta3).cos())
    }
}

/// Divided-difference coefficients of the interpolating polynomial (Newton form).
fn newton_coefficients(x: &[f64; 5], y: &[f64; 5]) -> [f64; 5] {
    let mut c = *y;
    for j in 1..5 {
        for i in (j..5).rev() {
            c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - j]);
        }
    }
    c
}

fn bisect(f: &DetAlongTheta3, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f.at(lo);
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let fm = f.at(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl DetAlongTheta3 {
    /// True when `det(PT)` vanishes along the whole line (e.g. the corner of the unit cube).
    pub fn is_identically_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c.abs() < f64::MIN_POSITIVE)
    }
}

fn roots_of(f: &DetAlongTheta3) -> Vec<f64> {
    if f.is_identically_zero() {
        return Vec::new();
    }
    let h = PI / ROOT_GRID_CELLS as f64;
    let grid: Vec<f64> = (0..=ROOT_GRID_CELLS).map(|k| f.at(k as f64 * h)).collect();
    let mut roots: Vec<f64> = Vec::new();
    for k in 0..ROOT_GRID_CELLS {
        let (a, b) = (grid[k], grid[k + 1]);
        let r = if a == 0.0 {
            k as f64 * h
        } else if b == 0.0 {
            (k + 1) as f64 * h
        } else if (a < 0.0) != (b < 0.0) {
            bisect(f, k as f64 * h, (k + 1) as f64 * h)
        } else {
            continue;
        };
        if roots.last().is_none_or(|&p| r - p > ROOT_DEDUP) {
            roots.push(r);
        }
    }
    roots
}

/// Sign changes of `θ3 ↦ det(PT(D(a14, θ3)))` on `[0, π]`, bracketed on a 256-cell grid and
/// bisected to `1e-12`.
pub fn find_boundary_roots(bp: &BoundaryPoint) -> Vec<f64> {
    roots_of(&DetAlongTheta3::new(bp, &qstate::frame(&bp.euler)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surface {
    Rank3,
    Rank4Sep,
    Rank4All,
}

impl std::str::FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "rank3" => Ok(Surface::Rank3),
            "rank4-sep" | "rank4" => Ok(Surface::Rank4Sep),
            "rank4-all" => Ok(Surface::Rank4All),
            _ => Err(Error::InvalidConfig(format!("unknown surface `{s}`"))),
        }
    }
}

/// Estimates boundary hyperareas for several metrics in one pass. Rank-three columns are filled
/// when `Surface::Rank3` is requested, rank-four columns when either rank-four surface is.
pub fn estimate_boundaries(
    metrics: &[MonotoneMetric],
    cfg: &SequenceConfig,
    n_points: u64,
    checkpoint_every: u64,
    surfaces: &[Surface],
) -> Result<Vec<BoundaryRun>> {
    if cfg.dim != 14 {
        return Err(Error::InvalidConfig(format!("boundary runs need dimension 14, got {}", cfg.dim)));
    }
    let rank3 = surfaces.contains(&Surface::Rank3);
    let rank4 = surfaces.iter().any(|s| *s != Surface::Rank3);
    if rank3 {
        if let Some(m) = metrics.iter().find(|m| !metrics::supports_rank3(m)) {
            return Err(Error::UnsupportedStratum { metric: m.name.label(), surface: "rank3".into() });
        }
    }
    let seq = cfg.build()?;
    let nm = metrics.len();
    let (cps, fin, diags) = reduce_stream(&seq, n_points, checkpoint_every, nm, 4, |pts, count, vals, d| {
        for k in 0..count {
            let u: &[f64; 14] = pts[k * 14..(k + 1) * 14].try_into().unwrap();
            let bp = BoundaryPoint::from_unit_cube(u);
            let uf = qstate::frame(&bp.euler);
            let haar = qstate::haar_density(&bp.euler);
            let mut b3 = vec![(0.0, 0.0); nm];
            if rank3 {
                let spec = qstate::eigenvalues_from_angles(bp.theta1, bp.theta2, 0.0);
                let sep = qstate::det_pt(&qstate::compose(&uf, &spec.lambda)) >= -DET_BAND;
                let jac = qstate::rank3_jacobian(bp.theta1, bp.theta2);
                for (m, metric) in metrics.iter().enumerate() {
                    let v = d[m].absorb(metrics::rank3_element_parts(metric, &spec.lambda, haar, jac));
                    b3[m] = (v, if sep { v } else { 0.0 });
                }
            }
            let mut b4 = vec![(0.0, 0.0); nm];
            if rank4 {
                let f = DetAlongTheta3::new(&bp, &uf);
                let degenerate = f.is_identically_zero();
                let roots = roots_of(&f);
                for dm in d.iter_mut() {
                    if degenerate {
                        dm.skipped += 1;
                    } else {
                        dm.record_roots(roots.len());
                    }
                }
                for &r in &roots {
                    let sep_side = f.at(r - SIDE_PROBE).max(f.at(r + SIDE_PROBE)) >= -DET_BAND;
                    let g = RootGeometry::new(&bp, &uf, haar, r);
                    for (m, metric) in metrics.iter().enumerate() {
                        // θ3 ∈ [0, π] covers each state twice
                        let v = 0.5 * d[m].absorb(g.element(metric));
                        b4[m].1 += v;
                        if sep_side {
                            b4[m].0 += v;
                        }
                    }
                }
            }
            for m in 0..nm {
                vals[m][0].push(b3[m].0);
                vals[m][1].push(b3[m].1);
                vals[m][2].push(b4[m].0);
                vals[m][3].push(b4[m].1);
            }
        }
    })?;
    let jac = boundary_range_jacobian();
    let nan_unless = |on: bool, v: f64| if on { v } else { f64::NAN };
    let to_cp = |points: u64, s: &[f64], m: usize| {
        let scale = jac / points as f64;
        BoundaryCheckpoint {
            points,
            b_total: nan_unless(rank3, s[4 * m] * scale),
            b_sep: nan_unless(rank3, s[4 * m + 1] * scale),
            beta: nan_unless(rank4, s[4 * m + 2] * scale),
            beta_all: nan_unless(rank4, s[4 * m + 3] * scale),
        }
    };
    Ok(metrics
        .iter()
        .enumerate()
        .map(|(m, metric)| BoundaryRun {
            metric: *metric,
            checkpoints: cps.iter().map(|(p, s)| to_cp(*p, s, m)).collect(),
            final_estimate: to_cp(n_points, &fin, m),
            diagnostics: diags[m].clone(),
        })
        .collect())
}

pub fn estimate_boundary(
    metric: &MonotoneMetric,
    cfg: &SequenceConfig,
    n_points: u64,
    surface: Surface,
) -> Result<BoundaryRun> {
    Ok(estimate_boundaries(std::slice::from_ref(metric), cfg, n_points, BOUNDARY_CHECKPOINT, &[surface])?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub v_total: f64,
    pub v_sep: f64,
    pub p_sep: f64,
    pub overflow: u64,
}

/// Volumes and separability probabilities along the interpolated family, one shared pass.
pub fn interpolation_sweep(a_values: &[f64], cfg: &SequenceConfig, n_points: u64, tilde: bool) -> Result<Vec<SweepRow>> {
    let metrics: Vec<MonotoneMetric> =
        a_values.iter().map(|&a| metrics::interpolated_metric(a, tilde)).collect::<Result<_>>()?;
    let runs = estimate_volumes(&metrics, cfg, n_points, n_points)?;
    Ok(a_values
        .iter()
        .zip(runs)
        .map(|(&a, r)| SweepRow {
            a,
            v_total: r.final_estimate.total,
            v_sep: r.final_estimate.sep,
            p_sep: r.final_estimate.prob_sep(),
            overflow: r.diagnostics.overflow,
        })
        .collect())
}

/// Independent Monte Carlo replications (distinct random streams) of the volume estimates.
/// Returns, per metric, the final estimate of each replication.
pub fn replicate_volumes(
    metrics: &[MonotoneMetric],
    cfg: &SequenceConfig,
    replications: u64,
    n_points: u64,
) -> Result<Vec<Vec<VolumeCheckpoint>>> {
    if replications < 2 {
        return Err(Error::TooFewReplications(replications as usize));
    }
    let mut out = vec![Vec::with_capacity(replications as usize); metrics.len()];
    for r in 0..replications {
        let runs = estimate_volumes(metrics, &cfg.clone().with_replication(r), n_points, n_points)?;
        for (o, run) in out.iter_mut().zip(runs) {
            o.push(run.final_estimate);
        }
    }
    Ok(out)
}
