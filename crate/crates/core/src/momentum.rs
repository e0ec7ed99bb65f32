//! Momentum distribution `n(q) = (1/L) Σ_x e^{−iqx} G(x)` at `q = 2πn/L`,
//! `n ∈ (−L/2, L/2]`.
//!
//! `G` is the positive correlator of [`crate::correlator`], so the power-law
//! singularity sits at `q = 0`. By completeness `n(q)` is also the sum of
//! `|ψ|²` over bras of total momentum `q`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlator::{AsymptoticsModel, CorrelatorTable, IMAGINARY_TOLERANCE};
use crate::error::{Result, XxError};
use crate::formfactor::formfactor_product;
use crate::lattice::{enumerate_bra_configs, ground_state_config, ChainSpec, MomentumConfig, Sector};
use crate::special::{gamma_fn, gamma_ratio, sin_power_integral, sin_power_integral_quad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NqMethod {
    DftExact,
    FormfactorSum,
    Asymptotic,
}

impl NqMethod {
    pub fn name(self) -> &'static str {
        match self {
            NqMethod::DftExact => "dft",
            NqMethod::FormfactorSum => "ffsum",
            NqMethod::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub spec: ChainSpec,
    /// `n(q)` for `n = −L/2+1, …, L/2`.
    pub values: Vec<f64>,
    pub method: NqMethod,
}

impl MomentumDistribution {
    pub fn min_index(&self) -> i64 {
        1 - self.spec.sites() as i64 / 2
    }

    /// `(n, q, n(q))` in ascending `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64, f64)> + '_ {
        let l = self.spec.sites() as f64;
        let n0 = self.min_index();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (n0 + i as i64, 2.0 * PI * (n0 + i as i64) as f64 / l, v))
    }

    /// Value at `q = 2πn/L`, with `n` taken modulo `L`.
    pub fn at(&self, n: i64) -> f64 {
        let l = self.spec.sites() as i64;
        let n0 = self.min_index();
        self.values[(n - n0).rem_euclid(l) as usize]
    }
}

/// Discrete Fourier transform of an exact correlator table.
pub fn nq_dft(table: &CorrelatorTable) -> Result<MomentumDistribution> {
    if !table.method.is_exact() {
        return Err(XxError::MethodMismatch(format!(
            "n(q) by DFT needs an exact correlator table, got {}",
            table.method.name()
        )));
    }
    let l = table.spec.sites() as i64;
    if table.values.len() != l as usize {
        return Err(XxError::Dimension(format!("table has {} entries for L = {l}", table.values.len())));
    }
    let n0 = 1 - l / 2;
    let values = (n0..=l / 2)
        .into_par_iter()
        .map(|n| {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, &g) in table.values.iter().enumerate() {
                let x = i as i64 + 1;
                // reduce the phase on the integers
                let angle = 2.0 * PI * (n * x).rem_euclid(l) as f64 / l as f64;
                re += g * angle.cos();
                im -= g * angle.sin();
            }
            let (re, im) = (re / l as f64, im / l as f64);
            if im.abs() > IMAGINARY_TOLERANCE {
                return Err(XxError::NumericalAssertion {
                    what: format!("imaginary part of n(q) at n = {n}"),
                    residue: im,
                });
            }
            Ok(re)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MomentumDistribution {
        spec: table.spec,
        values,
        method: NqMethod::DftExact,
    })
}

fn sum_squares(spec: &ChainSpec, bras: &[MomentumConfig]) -> Result<f64> {
    let ket = ground_state_config(spec, Sector::IntegerGrid)?;
    let terms = bras
        .par_iter()
        .map(|bra| formfactor_product(spec, &ket, bra).map(|f| (2.0 * f.value.log_magnitude).exp()))
        .collect::<Result<Vec<f64>>>()?;
    // fixed summation order keeps the result independent of the thread count
    Ok(terms.iter().sum())
}

/// `Σ|ψ({q})|²` over bras of total momentum `2πn/L` within
/// `max_particle_hole` hops of the bra ground state.
pub fn nq_formfactor_sector(spec: &ChainSpec, max_particle_hole: usize, n: i64, limit: u128) -> Result<f64> {
    spec.require_correlator_sector()?;
    let bras = enumerate_bra_configs(spec, max_particle_hole, Some(2 * n), limit)?;
    sum_squares(spec, &bras)
}

/// The zero-momentum sector, which approaches `n(0)` from below as the
/// cutoff grows.
pub fn nq_formfactor_sum(spec: &ChainSpec, max_particle_hole: usize, limit: u128) -> Result<f64> {
    nq_formfactor_sector(spec, max_particle_hole, 0, limit)
}

/// Formfactor sums for every momentum sector at once.
pub fn nq_formfactor_distribution(spec: &ChainSpec, max_particle_hole: usize, limit: u128) -> Result<MomentumDistribution> {
    spec.require_correlator_sector()?;
    let l = spec.sites() as i64;
    let bras = enumerate_bra_configs(spec, max_particle_hole, None, limit)?;
    let mut buckets: Vec<Vec<MomentumConfig>> = vec![Vec::new(); l as usize];
    let n0 = 1 - l / 2;
    for bra in bras {
        // units of π/L are even here, since M − 1 half-odd momenta add up to an integer
        let n = bra.momentum_units().div_euclid(2);
        buckets[(n - n0).rem_euclid(l) as usize].push(bra);
    }
    let values = buckets.iter().map(|b| sum_squares(spec, b)).collect::<Result<Vec<f64>>>()?;
    Ok(MomentumDistribution {
        spec: *spec,
        values,
        method: NqMethod::FormfactorSum,
    })
}

fn check_alpha_pole(alpha: f64) -> Result<()> {
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(XxError::Pole("α = 1 (free fermions) is a pole of the small-q formula".into()));
    }
    Ok(())
}

/// `sin(πα/2)·2^α Γ(2−α)/(π(1−α))`, the `C2/C0` prefactor.
fn c2_factor(alpha: f64) -> Result<f64> {
    check_alpha_pole(alpha)?;
    Ok((PI * alpha / 2.0).sin() * 2f64.powf(alpha) * gamma_fn(2.0 - alpha)? / (PI * (1.0 - alpha)))
}

/// `(C0/L^α) sin(πα/2) (2^α Γ(2−α)/(π(1−α))) Γ(n+α/2)/Γ(n+1−α/2)`.
pub fn nq_asymptotic(model: &AsymptoticsModel, spec: &ChainSpec, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(XxError::Range {
            what: "momentum index n",
            value: n,
            min: 0,
            max: spec.sites() as i64,
        });
    }
    let a = model.alpha;
    let l = spec.sites() as f64;
    Ok(model.c0 / l.powf(a) * c2_factor(a)? * gamma_ratio(n as f64, a / 2.0, 1.0 - a / 2.0)?)
}

/// `Σ_{n=0}^{n_max}` of [`nq_asymptotic`].
pub fn nq_asymptotic_sum(model: &AsymptoticsModel, spec: &ChainSpec, n_max: i64) -> Result<f64> {
    (0..=n_max).map(|n| nq_asymptotic(model, spec, n)).sum()
}

/// The small-q formula over the zone, evaluated at `|n|`.
pub fn nq_asymptotic_distribution(model: &AsymptoticsModel, spec: &ChainSpec) -> Result<MomentumDistribution> {
    let l = spec.sites() as i64;
    let values = (1 - l / 2..=l / 2)
        .map(|n| nq_asymptotic(model, spec, n.abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(MomentumDistribution {
        spec: *spec,
        values,
        method: NqMethod::Asymptotic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityConstants {
    /// `C0 ∫₀¹ sin(πy)^{−α} dy`, closed form.
    pub c1: f64,
    /// The same integral by adaptive quadrature.
    pub c1_quadrature: f64,
    pub c2: f64,
    pub c2_prime: f64,
}

pub fn singularity_constants(model: &AsymptoticsModel) -> Result<SingularityConstants> {
    let a = model.alpha;
    if !(a > 0.0 && a < 1.0) {
        return Err(XxError::Domain(format!("singularity constants need α in (0, 1), got {a}")));
    }
    let c2 = model.c0 * c2_factor(a)?;
    Ok(SingularityConstants {
        // ∫₀¹ sin(πy)^{−α} dy = (1/π) ∫₀^π sin(y)^{−α} dy
        c1: model.c0 * sin_power_integral(a)? / PI,
        c1_quadrature: model.c0 * sin_power_integral_quad(a, 1e-13)?.value / PI,
        c2,
        c2_prime: c2 * (2.0 * PI).powf(1.0 - a),
    })
}

/// `Σ_q n(q)`; exact methods give `1/2`.
pub fn sum_rule_check(dist: &MomentumDistribution) -> f64 {
    dist.values.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub eta: f64,
    /// `2(π − η)/π`.
    pub xi: f64,
    pub alpha: f64,
    pub lambda: f64,
    /// `√((1+λ)/(1−λ))`, for which `γ = (ξ^{1/2} − ξ^{−1/2})²/2`.
    pub xi_lutt: f64,
    pub alpha_lutt: f64,
    pub gamma: f64,
}

pub fn exponents(eta: f64, lambda: f64) -> Result<ExponentSet> {
    if !(eta > 0.0 && eta < PI) {
        return Err(XxError::Domain(format!("anisotropy angle η = {eta} outside (0, π)")));
    }
    if !(lambda.abs() < 1.0) {
        return Err(XxError::Domain(format!("coupling λ = {lambda} outside (−1, 1)")));
    }
    let xi = 2.0 * (PI - eta) / PI;
    let alpha_lutt = 1.0 / (1.0 - lambda * lambda).sqrt();
    Ok(ExponentSet {
        eta,
        xi,
        alpha: xi / 2.0,
        lambda,
        xi_lutt: ((1.0 + lambda) / (1.0 - lambda)).sqrt(),
        alpha_lutt,
        gamma: alpha_lutt - 1.0,
    })
}
