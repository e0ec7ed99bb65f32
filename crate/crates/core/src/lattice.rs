//! Chain geometry, momentum grids and enumeration of fermionic configurations.
//!
//! Momenta are stored as integer indices. On the integer grid an index `n`
//! stands for `p = 2πn/L`, on the half-integer grid for `q = 2π(n + 1/2)/L`.
//! Both grids are reduced to the zone `(-π, π]`, which fixes the admissible
//! index ranges:
//!
//! * integer grid: `n ∈ (-L/2, L/2]`
//! * half-integer grid: `n ∈ [-L/2, L/2 - 1]`
//!
//! Total momenta are handled in units of `π/L` so that zero-momentum tests are
//! exact integer comparisons.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XxError};

/// Default cap on the number of index sets an enumeration may visit.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 5_000_000;

/// Chain length `L` and particle number `M` of the ket sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChainSpec {
    l: usize,
    m: usize,
}

impl ChainSpec {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(XxError::InvalidChain(format!(
                "chain length L = {l} must be a positive even integer"
            )));
        }
        if m == 0 || m > l {
            return Err(XxError::InvalidChain(format!(
                "particle number M = {m} must satisfy 0 < M <= L = {l}"
            )));
        }
        Ok(Self { l, m })
    }

    /// Half filling, `M = L/2`.
    pub fn half_filled(l: usize) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(XxError::InvalidChain(format!(
                "chain length L = {l} must be a positive even integer"
            )));
        }
        Self::new(l, l / 2)
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn particles(&self) -> usize {
        self.m
    }

    /// Exact correlators need `M = L/2` with `M` odd (so `L ≡ 2 mod 4`).
    pub fn require_correlator_sector(&self) -> Result<()> {
        if 2 * self.m != self.l {
            return Err(XxError::Parity(format!(
                "correlators need half filling, got L = {}, M = {}",
                self.l, self.m
            )));
        }
        if self.m.is_multiple_of(2) {
            return Err(XxError::Parity(format!(
                "M = L/2 = {} is even; the periodic ground state is degenerate",
                self.m
            )));
        }
        Ok(())
    }
}

/// Quantization grid of a particle-number sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sector {
    IntegerGrid,
    HalfIntegerGrid,
}

impl Sector {
    /// Twice the grid offset: 0 for integer, 1 for half-integer momenta.
    pub fn offset2(self) -> i64 {
        match self {
            Sector::IntegerGrid => 0,
            Sector::HalfIntegerGrid => 1,
        }
    }

    /// Smallest and largest admissible index on a chain of `l` sites.
    pub fn index_bounds(self, l: usize) -> (i64, i64) {
        let half = (l / 2) as i64;
        match self {
            Sector::IntegerGrid => (-half + 1, half),
            Sector::HalfIntegerGrid => (-half, half - 1),
        }
    }

    pub fn momentum(self, l: usize, index: i64) -> f64 {
        PI * (2 * index + self.offset2()) as f64 / l as f64
    }
}

/// Reduces an integer momentum in units of `π/L` into `(-L, L]`.
fn reduce_units(units: i64, l: usize) -> i64 {
    let period = 2 * l as i64;
    let mut r = units.rem_euclid(period);
    if r > l as i64 {
        r -= period;
    }
    r
}

/// Reduces an angle into `(-π, π]`.
pub fn reduce_angle(phi: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = phi - two_pi * (phi / two_pi).round();
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

/// Strictly increasing set of momentum indices labelling a Slater determinant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MomentumConfig {
    sector: Sector,
    l: usize,
    indices: Vec<i64>,
}

impl MomentumConfig {
    pub fn new(sector: Sector, l: usize, indices: Vec<i64>) -> Result<Self> {
        let (lo, hi) = sector.index_bounds(l);
        if let Some(&n) = indices.iter().find(|&&n| n < lo || n > hi) {
            return Err(XxError::InvalidConfig(format!(
                "index {n} outside the zone [{lo}, {hi}] for L = {l}"
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(XxError::InvalidConfig(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        if indices.len() > l {
            return Err(XxError::InvalidConfig(format!(
                "{} particles do not fit on {l} sites",
                indices.len()
            )));
        }
        Ok(Self { sector, l, indices })
    }

    /// Sorts `indices` into canonical order. Returns the configuration together
    /// with the parity of the sorting permutation (`true` if odd).
    pub fn from_unordered(sector: Sector, l: usize, indices: &[i64]) -> Result<(Self, bool)> {
        let mut v = indices.to_vec();
        let mut odd = false;
        // insertion sort keeps track of transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        Ok((Self::new(sector, l, v)?, odd))
    }

    /// Inverse of [`MomentumConfig::momenta`]; momenta are reduced into the zone first.
    pub fn from_momenta(sector: Sector, l: usize, momenta: &[f64]) -> Result<Self> {
        let mut idx = Vec::with_capacity(momenta.len());
        for &p in momenta {
            let x = reduce_angle(p) * l as f64 / (2.0 * PI) - 0.5 * sector.offset2() as f64;
            let n = x.round();
            if (x - n).abs() > 1e-8 {
                return Err(XxError::InvalidConfig(format!(
                    "momentum {p} is not on the {sector:?} of L = {l}"
                )));
            }
            let (lo, hi) = sector.index_bounds(l);
            let mut n = n as i64;
            if n < lo {
                n += l as i64;
            } else if n > hi {
                n -= l as i64;
            }
            idx.push(n);
        }
        Self::new(sector, l, idx)
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.indices
            .iter()
            .map(|&n| self.sector.momentum(self.l, n))
            .collect()
    }

    /// Raw (unreduced) momentum sum; the half-angle gauges depend on it.
    pub fn momentum_sum_raw(&self) -> f64 {
        PI * self.raw_units() as f64 / self.l as f64
    }

    fn raw_units(&self) -> i64 {
        self.indices
            .iter()
            .map(|&n| 2 * n + self.sector.offset2())
            .sum()
    }

    /// Total momentum in units of `π/L`, reduced into `(-L, L]`.
    pub fn momentum_units(&self) -> i64 {
        reduce_units(self.raw_units(), self.l)
    }

    pub fn is_zero_momentum(&self) -> bool {
        self.momentum_units() == 0
    }

    /// Number of particles sitting outside `reference` (particle-hole rank).
    pub fn excitation_rank(&self, reference: &MomentumConfig) -> usize {
        self.indices
            .iter()
            .filter(|n| reference.indices.binary_search(n).is_err())
            .count()
    }
}

/// Total momentum reduced into `(-π, π]`.
pub fn total_momentum(cfg: &MomentumConfig) -> f64 {
    PI * cfg.momentum_units() as f64 / cfg.sites() as f64
}

/// Particle-hole moves relative to a reference configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcitationLevel {
    pub hops: Vec<(i64, i64)>,
}

impl ExcitationLevel {
    pub fn new(hops: Vec<(i64, i64)>) -> Self {
        Self { hops }
    }

    /// Applies the hops in order. Each hop must move an occupied index onto an
    /// empty one inside the zone.
    pub fn apply(&self, reference: &MomentumConfig) -> Result<MomentumConfig> {
        let mut idx = reference.indices.clone();
        for &(from, to) in &self.hops {
            let pos = idx.iter().position(|&n| n == from).ok_or_else(|| {
                XxError::InvalidConfig(format!("hop source {from} is not occupied"))
            })?;
            if idx.contains(&to) {
                return Err(XxError::InvalidConfig(format!(
                    "hop target {to} is already occupied"
                )));
            }
            idx[pos] = to;
        }
        idx.sort_unstable();
        MomentumConfig::new(reference.sector, reference.l, idx)
    }
}

/// Symmetric Fermi sea: `M` particles on the integer grid or `M - 1` on the
/// half-integer grid, both centred on zero momentum.
pub fn ground_state_config(spec: &ChainSpec, sector: Sector) -> Result<MomentumConfig> {
    let m = spec.particles() as i64;
    match sector {
        Sector::IntegerGrid => {
            if m % 2 == 0 {
                return Err(XxError::Parity(format!(
                    "M = {m} is even; the integer-grid Fermi sea is degenerate"
                )));
            }
            let h = (m - 1) / 2;
            MomentumConfig::new(sector, spec.sites(), (-h..=h).collect())
        }
        Sector::HalfIntegerGrid => {
            let count = m - 1;
            if count % 2 != 0 {
                return Err(XxError::Parity(format!(
                    "M - 1 = {count} is odd; the half-integer Fermi sea is degenerate"
                )));
            }
            let h = count / 2;
            MomentumConfig::new(sector, spec.sites(), (-h..h).collect())
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Calls `f` with every `k`-subset of `items`, in lexicographic order.
fn for_each_combination<T: Copy>(items: &[T], k: usize, mut f: impl FnMut(&[T])) {
    let n = items.len();
    if k > n {
        return;
    }
    let mut pos: Vec<usize> = (0..k).collect();
    let mut buf: Vec<T> = Vec::with_capacity(k);
    loop {
        buf.clear();
        buf.extend(pos.iter().map(|&i| items[i]));
        f(&buf);
        // rightmost slot that can still move
        let Some(i) = (0..k).rev().find(|&i| pos[i] < i + n - k) else {
            return;
        };
        pos[i] += 1;
        for j in i + 1..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
}

/// All bra configurations (`M - 1` particles, half-integer grid) within
/// `max_particle_hole` hops of the bra ground state, optionally restricted to
/// total momentum `momentum_units` (in units of `π/L`). Output is sorted
/// lexicographically on the index sets.
pub fn enumerate_bra_configs(
    spec: &ChainSpec,
    max_particle_hole: usize,
    momentum_units: Option<i64>,
    limit: u128,
) -> Result<Vec<MomentumConfig>> {
    let ground = ground_state_config(spec, Sector::HalfIntegerGrid)?;
    let l = spec.sites();
    let (lo, hi) = Sector::HalfIntegerGrid.index_bounds(l);
    let outside: Vec<i64> = (lo..=hi)
        .filter(|n| ground.indices.binary_search(n).is_err())
        .collect();
    let occupied = ground.indices.clone();
    let k_max = max_particle_hole.min(occupied.len()).min(outside.len());

    let visits: u128 = (0..=k_max)
        .map(|k| binomial(occupied.len(), k) * binomial(outside.len(), k))
        .sum();
    if visits > limit {
        return Err(XxError::Resource {
            what: "bra enumeration",
            requested: visits,
            limit,
        });
    }

    let target = momentum_units.map(|u| reduce_units(u, l));
    let mut out = Vec::new();
    for k in 0..=k_max {
        for_each_combination(&occupied, k, |holes| {
            let kept: Vec<i64> = occupied
                .iter()
                .copied()
                .filter(|n| !holes.contains(n))
                .collect();
            for_each_combination(&outside, k, |parts| {
                let mut idx = kept.clone();
                idx.extend_from_slice(parts);
                idx.sort_unstable();
                let cfg = MomentumConfig {
                    sector: Sector::HalfIntegerGrid,
                    l,
                    indices: idx,
                };
                if target.is_none_or(|t| cfg.momentum_units() == t) {
                    out.push(cfg);
                }
            });
        });
    }
    out.sort();
    Ok(out)
}

/// Zero-momentum bras reachable with at most `max_particle_hole` hops.
pub fn enumerate_zero_momentum_configs(
    spec: &ChainSpec,
    max_particle_hole: usize,
    limit: u128,
) -> Result<Vec<MomentumConfig>> {
    enumerate_bra_configs(spec, max_particle_hole, Some(0), limit)
}

/// Uniformly random `count`-particle configuration on `sector`, optionally
/// conditioned on total momentum (rejection sampling).
pub fn sample_config<R: Rng + ?Sized>(
    l: usize,
    sector: Sector,
    count: usize,
    momentum_units: Option<i64>,
    rng: &mut R,
) -> Result<MomentumConfig> {
    if count > l {
        return Err(XxError::InvalidConfig(format!(
            "{count} particles do not fit on {l} sites"
        )));
    }
    let (lo, hi) = sector.index_bounds(l);
    let pool: Vec<i64> = (lo..=hi).collect();
    let target = momentum_units.map(|u| reduce_units(u, l));
    // acceptance probability is about 1/L when conditioning on momentum
    for _ in 0..(1000 * l.max(1)) {
        let mut idx: Vec<i64> = rand::seq::index::sample(rng, pool.len(), count)
            .into_iter()
            .map(|i| pool[i])
            .collect();
        idx.sort_unstable();
        let cfg = MomentumConfig { sector, l, indices: idx };
        if target.is_none_or(|t| cfg.momentum_units() == t) {
            return Ok(cfg);
        }
    }
    Err(XxError::InvalidConfig(format!(
        "no {count}-particle configuration with momentum units {target:?} found on L = {l}"
    )))
}
