//! Brute-force many-body engine on the full `2^L` occupation basis.
//!
//! Basis states are bitmasks: site `x ∈ 1..=L` is bit `x − 1`, a set bit is an
//! up spin (an occupied fermion). Site `0` is accepted as an alias for site
//! `L`. Fermions are introduced through the Jordan–Wigner map
//! `σ⁺_x = exp(iπ Σ_{l<x} n_l) a⁺_x`, so creating a fermion on site `x` picks
//! up a sign `(−1)^{#occupied sites below x}`.
//!
//! The Hamiltonian is `H = −Σ_x (σ⁺_x σ⁻_{x+1} + h.c.)` written in spin
//! language, which needs no boundary phase; the sector rule for the momentum
//! grids is then checked, not assumed.

use num_complex::Complex64;

use crate::error::{Result, XxError};
use crate::lattice::{ChainSpec, MomentumConfig, Sector, ground_state_config};

/// Largest chain the oracle will build.
pub const MAX_SITES: usize = 14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    l: usize,
    amps: Vec<Complex64>,
}

fn check_sites(l: usize) -> Result<()> {
    if l > MAX_SITES {
        return Err(XxError::Resource {
            what: "brute-force state dimension 2^L",
            requested: 1u128 << l.min(127),
            limit: 1u128 << MAX_SITES,
        });
    }
    if l == 0 {
        return Err(XxError::InvalidChain("chain with no sites".into()));
    }
    Ok(())
}

impl StateVector {
    pub fn vacuum(l: usize) -> Result<Self> {
        check_sites(l)?;
        let mut amps = vec![ZERO; 1 << l];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { l, amps })
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.l != other.l {
            return Err(XxError::Dimension(format!(
                "states on {} and {} sites",
                self.l, other.l
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn bit(&self, site: usize) -> Result<usize> {
        if site > self.l {
            return Err(XxError::Range {
                what: "site",
                value: site as i64,
                min: 0,
                max: self.l as i64,
            });
        }
        let x = if site == 0 { self.l } else { site };
        Ok(1 << (x - 1))
    }

    /// Applies `Σ_x coeffs[x−1] a⁺_x`.
    pub fn apply_creation(&self, coeffs: &[Complex64]) -> Result<StateVector> {
        if coeffs.len() != self.l {
            return Err(XxError::Dimension(format!(
                "{} coefficients for {} sites",
                coeffs.len(),
                self.l
            )));
        }
        let mut out = vec![ZERO; self.amps.len()];
        for (s, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (x, &c) in coeffs.iter().enumerate() {
                let b = 1usize << x;
                if s & b != 0 {
                    continue;
                }
                let sign = if (s & (b - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                out[s | b] += sign * c * a;
            }
        }
        Ok(StateVector { l: self.l, amps: out })
    }
}

/// `a⁺_{k_1} ⋯ a⁺_{k_n} |0⟩` for the momenta of `cfg` in canonical order,
/// with `a⁺_k = L^{−1/2} Σ_x e^{ikx} a⁺_x`.
pub fn build_momentum_state(cfg: &MomentumConfig) -> Result<StateVector> {
    let l = cfg.sites();
    let mut v = StateVector::vacuum(l)?;
    let norm = 1.0 / (l as f64).sqrt();
    // the rightmost operator acts first
    for &k in cfg.momenta().iter().rev() {
        let coeffs: Vec<Complex64> = (1..=l)
            .map(|x| Complex64::from_polar(norm, k * x as f64))
            .collect();
        v = v.apply_creation(&coeffs)?;
    }
    Ok(v)
}

/// Ground state of the chain: the integer-grid Fermi sea of `M` particles.
pub fn ground_state(spec: &ChainSpec) -> Result<StateVector> {
    check_sites(spec.sites())?;
    build_momentum_state(&ground_state_config(spec, Sector::IntegerGrid)?)
}

/// Spin lowering at `site` (no string; σ operators are local in the spin basis).
pub fn apply_sigma_minus(v: &StateVector, site: usize) -> Result<StateVector> {
    let b = v.bit(site)?;
    let mut out = vec![ZERO; v.amps.len()];
    for (s, &a) in v.amps.iter().enumerate() {
        if s & b != 0 {
            out[s ^ b] += a;
        }
    }
    Ok(StateVector { l: v.l, amps: out })
}

pub fn apply_sigma_plus(v: &StateVector, site: usize) -> Result<StateVector> {
    let b = v.bit(site)?;
    let mut out = vec![ZERO; v.amps.len()];
    for (s, &a) in v.amps.iter().enumerate() {
        if s & b == 0 {
            out[s | b] += a;
        }
    }
    Ok(StateVector { l: v.l, amps: out })
}

/// `H v` for `H = −Σ_x (σ⁺_x σ⁻_{x+1} + σ⁻_x σ⁺_{x+1})`, periodic.
pub fn apply_hamiltonian(v: &StateVector) -> StateVector {
    let l = v.l;
    let mut out = vec![ZERO; v.amps.len()];
    for (s, &a) in v.amps.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        for i in 0..l {
            let bi = 1usize << i;
            let bj = 1usize << ((i + 1) % l);
            if bi == bj {
                continue;
            }
            // exactly one of the two sites occupied: the particle hops
            if (s & bi != 0) != (s & bj != 0) {
                out[s ^ bi ^ bj] -= a;
            }
        }
    }
    StateVector { l, amps: out }
}

/// Single-particle energy sum `−2 Σ cos k`.
pub fn band_energy(cfg: &MomentumConfig) -> f64 {
    -2.0 * cfg.momenta().iter().map(|k| k.cos()).sum::<f64>()
}

/// `‖H v − E v‖`.
pub fn eigen_residual(v: &StateVector, energy: f64) -> f64 {
    let hv = apply_hamiltonian(v);
    hv.amps
        .iter()
        .zip(&v.amps)
        .map(|(h, a)| (h - energy * a).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `⟨v|σ⁺_x σ⁻_0|v⟩`; `x ≡ 0 (mod L)` gives the density.
pub fn expectation_correlator(v: &StateVector, x: usize) -> Result<f64> {
    let l = v.l;
    if x > l {
        return Err(XxError::Range {
            what: "distance x",
            value: x as i64,
            min: 0,
            max: l as i64,
        });
    }
    let w = apply_sigma_plus(&apply_sigma_minus(v, l)?, x % l)?;
    let z = v.inner(&w)?;
    let scale = v.norm().powi(2).max(1.0);
    if z.im.abs() > 1e-12 * scale {
        return Err(XxError::NumericalAssertion {
            what: format!("imaginary part of the correlator at x = {x}"),
            residue: z.im,
        });
    }
    Ok(z.re)
}

/// `⟨bra|σ⁻_site|ket⟩` for explicit states.
pub fn matrix_element_sigma_minus(bra: &StateVector, ket: &StateVector, site: usize) -> Result<Complex64> {
    bra.inner(&apply_sigma_minus(ket, site)?)
}

/// `⟨{q}|σ⁻_L|{p}⟩` from explicitly built many-body states.
pub fn formfactor_matrix_element(ket: &MomentumConfig, bra: &MomentumConfig) -> Result<Complex64> {
    if ket.sites() != bra.sites() {
        return Err(XxError::Dimension(format!(
            "ket on {} sites, bra on {}",
            ket.sites(),
            bra.sites()
        )));
    }
    let k = build_momentum_state(ket)?;
    let b = build_momentum_state(bra)?;
    matrix_element_sigma_minus(&b, &k, ket.sites())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_bra_configs, total_momentum, DEFAULT_ENUMERATION_LIMIT};
    use std::f64::consts::PI;

    fn cfg(sector: Sector, l: usize, idx: &[i64]) -> MomentumConfig {
        MomentumConfig::new(sector, l, idx.to_vec()).unwrap()
    }

    #[test]
    fn two_site_uniform_mode() {
        let v = build_momentum_state(&cfg(Sector::IntegerGrid, 2, &[0])).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert!((v.amps[0b01] - h).norm() < 1e-15);
        assert!((v.amps[0b10] - h).norm() < 1e-15);
        assert_eq!(v.amps[0], ZERO);
        assert_eq!(v.amps[0b11], ZERO);
    }

    #[test]
    fn sigma_on_single_site() {
        let up = StateVector {
            l: 1,
            amps: vec![ZERO, Complex64::new(1.0, 0.0)],
        };
        let down = apply_sigma_minus(&up, 1).unwrap();
        assert_eq!(down.amps, vec![Complex64::new(1.0, 0.0), ZERO]);
        assert_eq!(apply_sigma_minus(&down, 1).unwrap().norm(), 0.0);
        assert!(apply_sigma_minus(&up, 2).is_err());
    }

    #[test]
    fn ground_state_l6() {
        let spec = ChainSpec::half_filled(6).unwrap();
        let g = ground_state_config(&spec, Sector::IntegerGrid).unwrap();
        assert!((band_energy(&g) + 4.0).abs() < 1e-14);
        let v = ground_state(&spec).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(eigen_residual(&v, -4.0) < 1e-10);
        assert!((expectation_correlator(&v, 0).unwrap() - 0.5).abs() < 1e-12);
        let w = apply_sigma_minus(&v, 3).unwrap();
        assert!((w.norm().powi(2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn every_sector_state_is_an_eigenvector() {
        // M odd: integer grid; M − 1 even: half-integer grid
        for (l, sector, count) in [(6, Sector::IntegerGrid, 3), (6, Sector::HalfIntegerGrid, 2), (10, Sector::HalfIntegerGrid, 4), (8, Sector::IntegerGrid, 3)] {
            let (lo, hi) = sector.index_bounds(l);
            let pool: Vec<i64> = (lo..=hi).collect();
            for start in 0..pool.len().saturating_sub(count) {
                let c = cfg(sector, l, &pool[start..start + count]);
                let v = build_momentum_state(&c).unwrap();
                assert!((v.norm() - 1.0).abs() < 1e-12);
                assert!(eigen_residual(&v, band_energy(&c)) < 1e-10, "{c:?}");
            }
        }
        // wrong grid for the parity: two particles on the integer grid are not eigenstates
        let bad = build_momentum_state(&cfg(Sector::IntegerGrid, 6, &[0, 1])).unwrap();
        assert!(eigen_residual(&bad, band_energy(&cfg(Sector::IntegerGrid, 6, &[0, 1]))) > 1e-3);
    }

    #[test]
    fn orthonormal_momentum_states() {
        let a = build_momentum_state(&cfg(Sector::HalfIntegerGrid, 6, &[-1, 0])).unwrap();
        let b = build_momentum_state(&cfg(Sector::HalfIntegerGrid, 6, &[-2, 1])).unwrap();
        let c = build_momentum_state(&cfg(Sector::HalfIntegerGrid, 6, &[-3, 2])).unwrap();
        assert!((a.inner(&a).unwrap().re - 1.0).abs() < 1e-12);
        assert!(a.inner(&b).unwrap().norm() < 1e-12);
        assert!(b.inner(&c).unwrap().norm() < 1e-12);
    }

    #[test]
    fn completeness_over_all_bras() {
        for l in [2usize, 6, 10] {
            let spec = ChainSpec::half_filled(l).unwrap();
            let ket = ground_state(&spec).unwrap();
            let lowered = apply_sigma_minus(&ket, l).unwrap();
            let bras = enumerate_bra_configs(&spec, l, None, DEFAULT_ENUMERATION_LIMIT).unwrap();
            let total: f64 = bras
                .iter()
                .map(|b| build_momentum_state(b).unwrap().inner(&lowered).unwrap().norm_sqr())
                .sum();
            let density = expectation_correlator(&ket, l).unwrap();
            assert!((total - 0.5).abs() < 1e-12, "L = {l}");
            assert!((density - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_covariance() {
        let l = 10;
        let spec = ChainSpec::half_filled(l).unwrap();
        let ket_cfg = ground_state_config(&spec, Sector::IntegerGrid).unwrap();
        let ket = build_momentum_state(&ket_cfg).unwrap();
        for idx in [[-2, -1, 0, 1], [-3, -1, 0, 2], [-5, -2, 1, 3]] {
            let bra_cfg = cfg(Sector::HalfIntegerGrid, l, &idx);
            let bra = build_momentum_state(&bra_cfg).unwrap();
            let base = matrix_element_sigma_minus(&bra, &ket, l).unwrap();
            let dp = total_momentum(&ket_cfg) - total_momentum(&bra_cfg);
            for x in 1..=l {
                let at_x = matrix_element_sigma_minus(&bra, &ket, x).unwrap();
                let expect = base * Complex64::from_polar(1.0, dp * x as f64);
                assert!((at_x - expect).norm() < 1e-12, "x = {x}, bra = {idx:?}");
            }
        }
    }

    #[test]
    fn two_site_formfactor() {
        let ket = cfg(Sector::IntegerGrid, 2, &[0]);
        let bra = cfg(Sector::HalfIntegerGrid, 2, &[]);
        let f = formfactor_matrix_element(&ket, &bra).unwrap();
        assert!((f.norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn correlator_l6_values() {
        let v = ground_state(&ChainSpec::half_filled(6).unwrap()).unwrap();
        let expect = [1.0 / 3.0, 2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 3.0, 0.5];
        for (x, e) in (1..=6).zip(expect) {
            assert!((expectation_correlator(&v, x).unwrap() - e).abs() < 1e-12, "x = {x}");
        }
        // free-fermion check at x = 1: ⟨a⁺_1 a_0⟩ = (1/L)Σ e^{-ip} over the sea
        let g1: f64 = [-PI / 3.0, 0.0, PI / 3.0].iter().map(|p| p.cos()).sum::<f64>() / 6.0;
        assert!((expectation_correlator(&v, 1).unwrap() - g1).abs() < 1e-12);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(StateVector::vacuum(15), Err(XxError::Resource { .. })));
        let big = cfg(Sector::IntegerGrid, 16, &[0]);
        assert!(build_momentum_state(&big).is_err());
    }
}
