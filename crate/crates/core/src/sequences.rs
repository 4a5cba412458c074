//! Index-addressed point sets on `[0,1)^d`: scrambled Halton, scrambled Faure–Tezuka, stratified
//! Monte Carlo and plain pseudorandom points.
//!
//! Every generator is immutable after construction and maps an index to a point, so any index
//! range can be generated independently (skip-ahead) and in parallel.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceKind {
    Halton,
    FaureTezuka,
    StratifiedMc,
    PlainMc,
}

impl std::str::FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "halton" => Ok(SequenceKind::Halton),
            "faure-tezuka" | "faure" | "ft" => Ok(SequenceKind::FaureTezuka),
            "stratified" | "stratified-mc" => Ok(SequenceKind::StratifiedMc),
            "mc" | "plain" | "plain-mc" => Ok(SequenceKind::PlainMc),
            _ => Err(Error::InvalidConfig(format!("unknown sequence kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scramble {
    /// Identity permutations / identity NUT matrix.
    None,
    /// One seeded scrambling shared by all dimensions.
    Shared,
    /// An independent seeded scrambling per dimension.
    PerDimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceConfig {
    pub kind: SequenceKind,
    pub dim: usize,
    pub seed: u64,
    /// Faure–Tezuka base (smallest prime ≥ dim when `None`); stratification base for stratified MC.
    pub base: Option<u32>,
    /// Faure–Tezuka digit count `m`.
    pub digits: u32,
    pub scramble: Scramble,
    /// Replication index for the Monte Carlo kinds: selects an independent random stream.
    pub replication: u64,
}

impl SequenceConfig {
    pub fn new(kind: SequenceKind, dim: usize, seed: u64) -> Self {
        let base = match kind {
            SequenceKind::StratifiedMc => Some(3),
            _ => None,
        };
        Self { kind, dim, seed, base, digits: 8, scramble: Scramble::Shared, replication: 0 }
    }

    pub fn with_replication(mut self, r: u64) -> Self {
        self.replication = r;
        self
    }

    pub fn build(&self) -> Result<PointSequence> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        Ok(match self.kind {
            SequenceKind::Halton => PointSequence::Halton(Halton::new(self.dim, self.seed, self.scramble)),
            SequenceKind::FaureTezuka => {
                let base = self.base.unwrap_or_else(|| next_prime(self.dim as u32));
                PointSequence::FaureTezuka(FaureTezuka::new(self.dim, base, self.digits, self.seed, self.scramble)?)
            }
            SequenceKind::StratifiedMc => {
                let base = self.base.unwrap_or(3);
                PointSequence::Stratified(Stratified::new(self.dim, base, self.seed, self.replication)?)
            }
            SequenceKind::PlainMc => PointSequence::Plain(PlainMc::new(self.dim, self.seed, self.replication)),
        })
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `≥ n`.
pub fn next_prime(n: u32) -> u32 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

pub fn first_primes(k: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(k);
    let mut p = 2;
    while out.len() < k {
        if is_prime(p) {
            out.push(p);
        }
        p += 1;
    }
    out
}

/// Radical inverse of `index` in `base` with a digit permutation applied to each digit.
fn radical_inverse(mut index: u64, base: u32, perm: &[u32]) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut x = 0.0;
    while index > 0 {
        let d = (index % b) as usize;
        x += perm[d] as f64 * scale;
        index /= b;
        scale *= inv;
    }
    x
}

#[derive(Debug, Clone)]
pub struct Halton {
    bases: Vec<u32>,
    perms: Vec<Vec<u32>>,
}

impl Halton {
    /// `Scramble::Shared` and `Scramble::PerDimension` both draw one permutation per base (each base
    /// occurs in exactly one dimension).
    pub fn new(dim: usize, seed: u64, scramble: Scramble) -> Self {
        let bases = first_primes(dim);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms = bases
            .iter()
            .map(|&b| {
                let mut p: Vec<u32> = (0..b).collect();
                if scramble != Scramble::None {
                    p[1..].shuffle(&mut rng);
                }
                p
            })
            .collect();
        Self { bases, perms }
    }

    pub fn point(&self, index: u64, out: &mut [f64]) {
        for (j, x) in out.iter_mut().enumerate() {
            *x = radical_inverse(index, self.bases[j], &self.perms[j]);
        }
    }
}

/// Upper-triangular `m×m` matrices over `Z_b`, stored row-major.
type DigitMatrix = Vec<u32>;

fn mat_mul_mod(a: &[u32], b: &[u32], m: usize, p: u32) -> DigitMatrix {
    let mut c = vec![0u32; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0u64;
            for k in 0..m {
                acc += a[i * m + k] as u64 * b[k * m + j] as u64;
            }
            c[i * m + j] = (acc % p as u64) as u32;
        }
    }
    c
}

/// `P^k mod b` for the upper-triangular Pascal matrix: `(P^k)_{rc} = C(c, r) k^{c-r}`.
pub fn pascal_power(k: u64, m: usize, b: u32) -> DigitMatrix {
    let p = b as u64;
    let mut binom = vec![vec![0u64; m]; m];
    for n in 0..m {
        binom[n][0] = 1;
        for r in 1..=n {
            binom[n][r] = (binom[n - 1][r - 1] + if r < n { binom[n - 1][r] } else { 0 }) % p;
        }
    }
    let mut out = vec![0u32; m * m];
    for r in 0..m {
        let mut kp = 1u64;
        for c in r..m {
            out[r * m + c] = (binom[c][r] * kp % p) as u32;
            kp = kp * (k % p) % p;
        }
    }
    out
}

fn random_nut(rng: &mut ChaCha8Rng, m: usize, b: u32) -> DigitMatrix {
    let mut u = vec![0u32; m * m];
    for r in 0..m {
        u[r * m + r] = rng.gen_range(1..b);
        for c in r + 1..m {
            u[r * m + c] = rng.gen_range(0..b);
        }
    }
    u
}

fn identity(m: usize) -> DigitMatrix {
    let mut u = vec![0u32; m * m];
    for r in 0..m {
        u[r * m + r] = 1;
    }
    u
}

/// Faure sequence in prime base `b` with Tezuka's generator scrambling `C^(i) = P^(i-1) U`.
#[derive(Debug, Clone)]
pub struct FaureTezuka {
    base: u32,
    digits: usize,
    gens: Vec<DigitMatrix>,
    capacity: u64,
}

impl FaureTezuka {
    pub fn new(dim: usize, base: u32, digits: u32, seed: u64, scramble: Scramble) -> Result<Self> {
        if !is_prime(base) || (base as usize) < dim {
            return Err(Error::InvalidConfig(format!("base {base} must be a prime not below the dimension {dim}")));
        }
        let m = digits as usize;
        let capacity = (base as u64)
            .checked_pow(digits)
            .ok_or_else(|| Error::InvalidConfig(format!("{base}^{digits} overflows the index type")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shared = match scramble {
            Scramble::None => identity(m),
            _ => random_nut(&mut rng, m, base),
        };
        let gens = (0..dim)
            .map(|i| {
                let u = if scramble == Scramble::PerDimension { random_nut(&mut rng, m, base) } else { shared.clone() };
                mat_mul_mod(&pascal_power(i as u64, m, base), &u, m, base)
            })
            .collect();
        Ok(Self { base, digits: m, gens, capacity })
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn point(&self, index: u64, out: &mut [f64]) -> Result<()> {
        if index >= self.capacity {
            return Err(Error::IndexOverflow { index, capacity: self.capacity });
        }
        let m = self.digits;
        let b = self.base as u64;
        let mut a = [0u64; 64];
        let mut n = index;
        for d in a.iter_mut().take(m) {
            *d = n % b;
            n /= b;
        }
        let inv = 1.0 / self.base as f64;
        for (x, c) in out.iter_mut().zip(&self.gens) {
            let mut scale = inv;
            let mut v = 0.0;
            for r in 0..m {
                let mut y = 0u64;
                for col in r..m {
                    y += c[r * m + col] as u64 * a[col];
                }
                v += (y % b) as f64 * scale;
                scale *= inv;
            }
            *x = v;
        }
        Ok(())
    }
}

/// ChaCha8 stream for `(seed, replication)`, positioned at the first word of point `index`.
fn stream_at(seed: u64, replication: u64, dim: usize, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    // each f64 consumes one u64, i.e. two 32-bit words
    rng.set_word_pos(index as u128 * dim as u128 * 2);
    rng
}

/// One uniform point in each of the `b^d` congruent subcubes.
///
/// Index `i` visits cell `i * k mod b^d` for a fixed multiplier `k` coprime to `b`, a bijection
/// that spreads every prefix of the stream over all coordinates.
#[derive(Debug, Clone)]
pub struct Stratified {
    dim: usize,
    base: u32,
    seed: u64,
    replication: u64,
    capacity: u64,
    multiplier: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Stratified {
    pub fn new(dim: usize, base: u32, seed: u64, replication: u64) -> Result<Self> {
        if base < 1 {
            return Err(Error::InvalidConfig("stratification base must be positive".into()));
        }
        let capacity = (base as u64)
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidConfig(format!("{base}^{dim} subcubes overflow the index type")))?;
        let mut multiplier = ((capacity as f64 * 0.618_033_988_749_895) as u64).max(1);
        while gcd(multiplier, base as u64) != 1 {
            multiplier += 1;
        }
        Ok(Self { dim, base, seed, replication, capacity, multiplier })
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    fn fill(&self, start: u64, out: &mut [f64]) -> Result<()> {
        let count = (out.len() / self.dim) as u64;
        if start + count > self.capacity {
            return Err(Error::IndexOverflow { index: start + count - 1, capacity: self.capacity });
        }
        let mut rng = stream_at(self.seed, self.replication, self.dim, start);
        let b = self.base as u64;
        let inv = 1.0 / self.base as f64;
        for (k, p) in out.chunks_exact_mut(self.dim).enumerate() {
            let mut cell = ((start + k as u64) as u128 * self.multiplier as u128 % self.capacity as u128) as u64;
            for x in p.iter_mut() {
                let d = cell % b;
                cell /= b;
                let u: f64 = rng.gen();
                *x = (d as f64 + u) * inv;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PlainMc {
    dim: usize,
    seed: u64,
    replication: u64,
}

impl PlainMc {
    pub fn new(dim: usize, seed: u64, replication: u64) -> Self {
        Self { dim, seed, replication }
    }

    fn fill(&self, start: u64, out: &mut [f64]) {
        let mut rng = stream_at(self.seed, self.replication, self.dim, start);
        for x in out.iter_mut() {
            *x = rng.gen();
        }
    }
}

#[derive(Debug, Clone)]
pub enum PointSequence {
    Halton(Halton),
    FaureTezuka(FaureTezuka),
    Stratified(Stratified),
    Plain(PlainMc),
}

impl PointSequence {
    pub fn dim(&self) -> usize {
        match self {
            PointSequence::Halton(h) => h.bases.len(),
            PointSequence::FaureTezuka(f) => f.gens.len(),
            PointSequence::Stratified(s) => s.dim,
            PointSequence::Plain(p) => p.dim,
        }
    }

    /// Number of addressable indices (`u64::MAX` when effectively unbounded).
    pub fn capacity(&self) -> u64 {
        match self {
            PointSequence::FaureTezuka(f) => f.capacity,
            PointSequence::Stratified(s) => s.capacity,
            _ => u64::MAX,
        }
    }

    /// Writes points `start .. start + out.len()/dim` contiguously into `out`.
    pub fn fill(&self, start: u64, out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        match self {
            PointSequence::Halton(h) => {
                for (k, p) in out.chunks_exact_mut(d).enumerate() {
                    h.point(start + k as u64, p);
                }
                Ok(())
            }
            PointSequence::FaureTezuka(f) => {
                for (k, p) in out.chunks_exact_mut(d).enumerate() {
                    f.point(start + k as u64, p)?;
                }
                Ok(())
            }
            PointSequence::Stratified(s) => s.fill(start, out),
            PointSequence::Plain(p) => {
                p.fill(start, out);
                Ok(())
            }
        }
    }

    pub fn point(&self, index: u64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.fill(index, &mut out)?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationStats {
    pub mean: f64,
    pub sd: f64,
    pub t: f64,
    /// Zero spread: `t` is `0/0` or `x/0` and reported as NaN.
    pub degenerate: bool,
}

/// Sample mean, sample standard deviation and `(mean - hypothesized) / sd` across replications.
pub fn replication_stats(estimates: &[f64], hypothesized: f64) -> Result<ReplicationStats> {
    let n = estimates.len();
    if n < 2 {
        return Err(Error::TooFewReplications(n));
    }
    let mean = estimates.iter().sum::<f64>() / n as f64;
    let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let degenerate = sd == 0.0;
    let t = if degenerate { f64::NAN } else { (mean - hypothesized) / sd };
    Ok(ReplicationStats { mean, sd, t, degenerate })
}
