//! Formfactors `ψ({q}) = ⟨{q}|σ⁻_L|{p}⟩` of the spin-lowering operator
//! between an `M`-particle ket on the integer grid and an `(M−1)`-particle
//! bra on the half-integer grid.
//!
//! The three closed formulations agree with the explicit matrix element up to
//! a global phase that depends only on the bra momenta. Each [`Method`] knows
//! its gauge, so [`Formfactor::physical`] returns the same (real) number for
//! every method:
//!
//! | method       | value / ψ            |
//! |--------------|----------------------|
//! | `Product`    | `i^{M−1} e^{iΣq}`    |
//! | `SinDet`     | `e^{i(Σq−Σp)/2}`     |
//! | `CtgDet`     | `i^{−(M−1)}`         |
//! | `BruteForce` | `1`                  |
//!
//! `Σq` and `Σp` are the unreduced momentum sums in canonical order.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Result, XxError};
use crate::lattice::{ground_state_config, ChainSpec, ExcitationLevel, MomentumConfig, Sector};
use crate::linalg::{cauchy_sin_det, dd_div, det_lu_dd, sin_cos_pi_frac, sin_product_ratio, DdComplex, LogComplex};
use crate::oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Product,
    SinDet,
    CtgDet,
    BruteForce,
    /// Closed Cauchy form of the ground-to-ground formfactor; magnitude only.
    Lowest,
}

impl Method {
    pub const EXACT: [Method; 4] = [Method::Product, Method::SinDet, Method::CtgDet, Method::BruteForce];

    pub fn name(self) -> &'static str {
        match self {
            Method::Product => "product",
            Method::SinDet => "sindet",
            Method::CtgDet => "ctgdet",
            Method::BruteForce => "brute",
            Method::Lowest => "lowest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Formfactor {
    pub value: LogComplex,
    pub bra: MomentumConfig,
    pub ket: MomentumConfig,
    pub method: Method,
}

impl Formfactor {
    pub fn magnitude(&self) -> f64 {
        self.value.abs()
    }

    /// Global phase of this method relative to the explicit matrix element.
    pub fn gauge(&self) -> LogComplex {
        let sum_q = self.bra.momentum_sum_raw();
        match self.method {
            Method::Product => LogComplex::new(0.0, FRAC_PI_2 * (self.ket.len() as f64 - 1.0) + sum_q),
            Method::SinDet => LogComplex::new(0.0, 0.5 * (sum_q - self.ket.momentum_sum_raw())),
            Method::CtgDet => LogComplex::new(0.0, -FRAC_PI_2 * (self.ket.len() as f64 - 1.0)),
            Method::BruteForce | Method::Lowest => LogComplex::one(),
        }
    }

    /// The value in the gauge of the explicit matrix element.
    pub fn physical(&self) -> LogComplex {
        self.value / self.gauge()
    }

    /// Same matrix element with the operator moved to site `x`:
    /// multiplies by `e^{i(P_ket − P_bra)x}`.
    pub fn translate(&self, x: i64) -> Formfactor {
        let dp = self.ket.momentum_sum_raw() - self.bra.momentum_sum_raw();
        Formfactor {
            value: self.value * LogComplex::new(0.0, dp * x as f64),
            ..self.clone()
        }
    }
}

fn validate(spec: &ChainSpec, ket: &MomentumConfig, bra: &MomentumConfig) -> Result<()> {
    if ket.sector() != Sector::IntegerGrid || bra.sector() != Sector::HalfIntegerGrid {
        return Err(XxError::InvalidConfig(
            "the ket lives on the integer grid and the bra on the half-integer grid".into(),
        ));
    }
    let l = spec.sites();
    if ket.sites() != l || bra.sites() != l {
        return Err(XxError::Dimension(format!(
            "configurations on {} and {} sites for L = {l}",
            ket.sites(),
            bra.sites()
        )));
    }
    if ket.len() != spec.particles() || bra.len() + 1 != ket.len() {
        return Err(XxError::Dimension(format!(
            "need M = {} ket momenta and M − 1 bra momenta, got {} and {}",
            spec.particles(),
            ket.len(),
            bra.len()
        )));
    }
    Ok(())
}

fn inv_sqrt_l(l: usize) -> LogComplex {
    LogComplex::new(-0.5 * (l as f64).ln(), 0.0)
}

/// `(1/√L)(i/L)^{M−1} e^{iΣq} Π sin((p_i−p_j)/2) Π sin((q_i−q_j)/2) / Π sin((p_i−q_j)/2)`.
pub fn formfactor_product(spec: &ChainSpec, ket: &MomentumConfig, bra: &MomentumConfig) -> Result<Formfactor> {
    validate(spec, ket, bra)?;
    let l = spec.sites() as f64;
    let m = ket.len() as f64;
    let prefactor = LogComplex::new(-(m - 1.0) * l.ln(), FRAC_PI_2 * (m - 1.0) + bra.momentum_sum_raw());
    let value = inv_sqrt_l(spec.sites()) * prefactor * sin_product_ratio(&ket.momenta(), &bra.momenta())?;
    Ok(Formfactor {
        value,
        bra: bra.clone(),
        ket: ket.clone(),
        method: Method::Product,
    })
}

/// Momenta in units of `π/L`.
fn units(cfg: &MomentumConfig) -> Vec<i64> {
    let off = cfg.sector().offset2();
    cfg.indices().iter().map(|&n| 2 * n + off).collect()
}

/// `sin` and `cos` of `(p_i−q_j)/2` for every pair, in double-double precision.
fn half_differences(l: usize, ket: &MomentumConfig, bra: &MomentumConfig) -> Vec<Vec<(TwoFloat, TwoFloat)>> {
    let (up, uq) = (units(ket), units(bra));
    up.iter()
        .map(|&a| uq.iter().map(|&b| sin_cos_pi_frac(a - b, 2 * l as i64)).collect())
        .collect()
}

/// `(1/√L) det[(i/L)/sin((p_i−q_j)/2) | e^{−ip_i/2}]`.
///
/// Deep excitations make the determinant tiny compared with its entries, so
/// both the entries and the elimination use double-double arithmetic.
pub fn formfactor_det_sin(spec: &ChainSpec, ket: &MomentumConfig, bra: &MomentumConfig) -> Result<Formfactor> {
    validate(spec, ket, bra)?;
    let l = spec.sites();
    let m = ket.len();
    let sc = half_differences(l, ket, bra);
    let up = units(ket);
    let lf = TwoFloat::from(l as f64);
    let zero = TwoFloat::from(0.0);
    let det = det_lu_dd(m, |i, j| {
        if j + 1 == m {
            let (s, c) = sin_cos_pi_frac(up[i], 2 * l as i64);
            DdComplex::new(c, -s)
        } else {
            DdComplex::new(zero, dd_div(TwoFloat::from(1.0), lf * sc[i][j].0))
        }
    });
    Ok(Formfactor {
        value: inv_sqrt_l(l) * det,
        bra: bra.clone(),
        ket: ket.clone(),
        method: Method::SinDet,
    })
}

/// `(1/√L) det[(1/L) ctg((p_i−q_j)/2) | 1]`, in double-double precision.
pub fn formfactor_det_ctg(spec: &ChainSpec, ket: &MomentumConfig, bra: &MomentumConfig) -> Result<Formfactor> {
    validate(spec, ket, bra)?;
    let l = spec.sites();
    let m = ket.len();
    let sc = half_differences(l, ket, bra);
    let lf = TwoFloat::from(l as f64);
    let zero = TwoFloat::from(0.0);
    let det = det_lu_dd(m, |i, j| {
        if j + 1 == m {
            DdComplex::new(TwoFloat::from(1.0), zero)
        } else {
            let (s, c) = sc[i][j];
            DdComplex::new(dd_div(c, lf * s), zero)
        }
    });
    Ok(Formfactor {
        value: inv_sqrt_l(l) * det,
        bra: bra.clone(),
        ket: ket.clone(),
        method: Method::CtgDet,
    })
}

/// Explicit matrix element from `2^L`-dimensional state vectors (`L ≤ 14`).
pub fn formfactor_bruteforce(spec: &ChainSpec, ket: &MomentumConfig, bra: &MomentumConfig) -> Result<Formfactor> {
    validate(spec, ket, bra)?;
    let z = oracle::formfactor_matrix_element(ket, bra)?;
    Ok(Formfactor {
        value: LogComplex::from_complex(z),
        bra: bra.clone(),
        ket: ket.clone(),
        method: Method::BruteForce,
    })
}

pub fn formfactor(spec: &ChainSpec, ket: &MomentumConfig, bra: &MomentumConfig, method: Method) -> Result<Formfactor> {
    match method {
        Method::Product => formfactor_product(spec, ket, bra),
        Method::SinDet => formfactor_det_sin(spec, ket, bra),
        Method::CtgDet => formfactor_det_ctg(spec, ket, bra),
        Method::BruteForce => formfactor_bruteforce(spec, ket, bra),
        Method::Lowest => {
            let ground = ground_state_config(spec, Sector::HalfIntegerGrid)?;
            if *bra != ground {
                return Err(XxError::InvalidConfig("the lowest formfactor needs the ground bra".into()));
            }
            lowest_formfactor(spec)
        }
    }
}

fn lowest_grids(l: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * PI / l as f64;
    let p = (1..=m).map(|i| step * i as f64).collect();
    let q = (1..=m).map(|i| step * (i as f64 + 0.5)).collect();
    (p, q)
}

fn require_half_filling_odd(spec: &ChainSpec) -> Result<()> {
    spec.require_correlator_sector()
}

/// `|ψ({q⁽⁰⁾})| = |det_M[(i/L)/sin(π(i−j−½)/L)]|`, evaluated as a closed
/// Cauchy product.
pub fn lowest_formfactor(spec: &ChainSpec) -> Result<Formfactor> {
    require_half_filling_odd(spec)?;
    let (l, m) = (spec.sites(), spec.particles());
    let (p, q) = lowest_grids(l, m);
    let det = cauchy_sin_det(&p, &q)?;
    let scale = LogComplex::new(-(m as f64) * (l as f64).ln(), 0.0);
    Ok(Formfactor {
        value: LogComplex::new((scale * det).log_magnitude, 0.0),
        bra: ground_state_config(spec, Sector::HalfIntegerGrid)?,
        ket: ground_state_config(spec, Sector::IntegerGrid)?,
        method: Method::Lowest,
    })
}

/// Same matrix element from the `M`-versus-`M` sine product
/// `(1/L)(i/L)^{M−1} Π sin((p_i−p_j)/2) Π sin((q_i−q_j)/2) / Π sin((p_i−q_j)/2)`
/// with `p_i = 2πi/L`, `q_i = 2π(i+½)/L`.
pub fn lowest_formfactor_prodform(spec: &ChainSpec) -> Result<LogComplex> {
    require_half_filling_odd(spec)?;
    let (l, m) = (spec.sites(), spec.particles());
    let (p, q) = lowest_grids(l, m);
    let pre = LogComplex::new(-(m as f64) * (l as f64).ln(), FRAC_PI_2 * (m as f64 - 1.0));
    Ok(pre * sin_product_ratio(&p, &q)?)
}

/// The bra with `q_1` moved one step left and `q_{M−1}` one step right.
pub fn shifted_bra(spec: &ChainSpec) -> Result<MomentumConfig> {
    let ground = ground_state_config(spec, Sector::HalfIntegerGrid)?;
    let idx = ground.indices();
    if idx.is_empty() {
        return Err(XxError::InvalidConfig("no bra momenta to shift".into()));
    }
    let (first, last) = (idx[0], idx[idx.len() - 1]);
    ExcitationLevel::new(vec![(first, first - 1), (last, last + 1)]).apply(&ground)
}

/// `|ψ(shifted bra) / ψ(ground bra)|`.
pub fn excited_suppression_ratio(spec: &ChainSpec) -> Result<f64> {
    require_half_filling_odd(spec)?;
    let ket = ground_state_config(spec, Sector::IntegerGrid)?;
    let ground = ground_state_config(spec, Sector::HalfIntegerGrid)?;
    let a = formfactor_product(spec, &ket, &shifted_bra(spec)?)?;
    let b = formfactor_product(spec, &ket, &ground)?;
    Ok((a.value.log_magnitude - b.value.log_magnitude).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_bra_configs, sample_config, DEFAULT_ENUMERATION_LIMIT};
    use crate::linalg::{det_lu, rank1_det_expand, ComplexMatrix};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket_of(spec: &ChainSpec) -> MomentumConfig {
        ground_state_config(spec, Sector::IntegerGrid).unwrap()
    }

    fn same(a: LogComplex, b: LogComplex, tol: f64) -> bool {
        let (x, y) = (a.to_complex().unwrap(), b.to_complex().unwrap());
        (x - y).norm() <= tol * y.norm().max(1e-300)
    }

    #[test]
    fn two_sites() {
        let spec = ChainSpec::new(2, 1).unwrap();
        let ket = ket_of(&spec);
        let bra = ground_state_config(&spec, Sector::HalfIntegerGrid).unwrap();
        for m in Method::EXACT {
            let f = formfactor(&spec, &ket, &bra, m).unwrap();
            assert!((f.magnitude() - 1.0 / 2f64.sqrt()).abs() < 1e-15, "{m:?}");
        }
        assert!((lowest_formfactor(&spec).unwrap().magnitude() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn all_methods_match_oracle_l6() {
        let spec = ChainSpec::half_filled(6).unwrap();
        let ket = ket_of(&spec);
        let bras = enumerate_bra_configs(&spec, 6, None, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(bras.len(), 15);
        let mut total = 0.0;
        for bra in &bras {
            let oracle = formfactor_bruteforce(&spec, &ket, bra).unwrap();
            let z = oracle.value.to_complex().unwrap();
            // matrix elements are real in this gauge
            assert!(z.im.abs() < 1e-14);
            total += z.norm_sqr();
            for m in [Method::Product, Method::SinDet, Method::CtgDet] {
                let f = formfactor(&spec, &ket, bra, m).unwrap();
                let d = f.physical().to_complex().unwrap() - z;
                assert!(d.norm() < 1e-13, "{m:?} {bra:?}");
            }
        }
        assert!((total - 0.5).abs() < 1e-13);
    }

    #[test]
    fn excited_kets_keep_the_gauges() {
        for (l, k) in [(6usize, vec![-1i64, 0, 2]), (6, vec![-2, 0, 3]), (10, vec![-2, -1, 0, 1, 3])] {
            let spec = ChainSpec::half_filled(l).unwrap();
            let ket = MomentumConfig::new(Sector::IntegerGrid, l, k).unwrap();
            for bra in enumerate_bra_configs(&spec, 2, None, DEFAULT_ENUMERATION_LIMIT).unwrap() {
                let z = formfactor_bruteforce(&spec, &ket, &bra).unwrap().value.to_complex().unwrap();
                for m in [Method::Product, Method::SinDet, Method::CtgDet] {
                    let f = formfactor(&spec, &ket, &bra, m).unwrap().physical().to_complex().unwrap();
                    assert!((f - z).norm() < 1e-13, "{m:?} {bra:?}");
                }
            }
        }
    }

    #[test]
    fn lowest_l6_and_prodform() {
        let spec = ChainSpec::half_filled(6).unwrap();
        let ket = ket_of(&spec);
        let ground = ground_state_config(&spec, Sector::HalfIntegerGrid).unwrap();
        let direct = formfactor_product(&spec, &ket, &ground).unwrap().magnitude();
        let low = lowest_formfactor(&spec).unwrap().magnitude();
        let prod = lowest_formfactor_prodform(&spec).unwrap().abs();
        assert!((low - direct).abs() < 1e-13);
        assert!((prod - direct).abs() < 1e-13);
        assert!(lowest_formfactor(&ChainSpec::half_filled(8).unwrap()).is_err());
    }

    #[test]
    fn lowest_cauchy_matches_lu() {
        for l in [6usize, 10, 14, 30, 102] {
            let spec = ChainSpec::half_filled(l).unwrap();
            let m = l / 2;
            let lf = l as f64;
            let mat = ComplexMatrix::from_fn(m, |i, j| {
                Complex64::new(0.0, 1.0 / (lf * (PI / lf * (i as f64 - j as f64 - 0.5)).sin()))
            });
            let lu = det_lu(&mat).abs();
            let closed = lowest_formfactor(&spec).unwrap().magnitude();
            assert!(((lu - closed) / closed).abs() < 1e-10, "L = {l}");
            let direct = formfactor_product(&spec, &ket_of(&spec), &ground_state_config(&spec, Sector::HalfIntegerGrid).unwrap()).unwrap();
            assert!(((direct.magnitude() - closed) / closed).abs() < 1e-10, "L = {l}");
        }
    }

    #[test]
    fn suppression_small_chain() {
        let spec = ChainSpec::half_filled(6).unwrap();
        let r = excited_suppression_ratio(&spec).unwrap();
        let ket = ket_of(&spec);
        let ground = ground_state_config(&spec, Sector::HalfIntegerGrid).unwrap();
        let shifted = shifted_bra(&spec).unwrap();
        assert_eq!(shifted.indices(), &[-2, 1]);
        let a = oracle::formfactor_matrix_element(&ket, &shifted).unwrap().norm();
        let b = oracle::formfactor_matrix_element(&ket, &ground).unwrap().norm();
        assert!((r - a / b).abs() < 1e-13);
    }

    #[test]
    fn validation_errors() {
        let spec = ChainSpec::half_filled(6).unwrap();
        let ket = ket_of(&spec);
        let bra = ground_state_config(&spec, Sector::HalfIntegerGrid).unwrap();
        assert!(formfactor_product(&spec, &bra, &ket).is_err());
        let short = MomentumConfig::new(Sector::HalfIntegerGrid, 6, vec![0]).unwrap();
        assert!(matches!(formfactor_det_sin(&spec, &ket, &short), Err(XxError::Dimension(_))));
        let spec16 = ChainSpec::new(16, 3).unwrap();
        let ket16 = MomentumConfig::new(Sector::IntegerGrid, 16, vec![-1, 0, 1]).unwrap();
        let bra16 = MomentumConfig::new(Sector::HalfIntegerGrid, 16, vec![-1, 0]).unwrap();
        assert!(matches!(
            formfactor_bruteforce(&spec16, &ket16, &bra16),
            Err(XxError::Resource { .. })
        ));
    }

    #[test]
    fn translation_helper_matches_oracle() {
        let spec = ChainSpec::half_filled(10).unwrap();
        let ket = ket_of(&spec);
        let bra = MomentumConfig::new(Sector::HalfIntegerGrid, 10, vec![-4, -1, 0, 2]).unwrap();
        let f = formfactor_det_ctg(&spec, &ket, &bra).unwrap();
        let kv = oracle::build_momentum_state(&ket).unwrap();
        let bv = oracle::build_momentum_state(&bra).unwrap();
        for x in 1..=10 {
            let z = oracle::matrix_element_sigma_minus(&bv, &kv, x).unwrap();
            assert!((f.translate(x as i64).value.to_complex().unwrap() - z).norm() < 1e-13);
        }
    }

    #[test]
    fn antisymmetry_under_reordering() {
        // swapping two bra momenta is a transposition of creation operators
        let spec = ChainSpec::half_filled(10).unwrap();
        let ket = oracle::build_momentum_state(&ket_of(&spec)).unwrap();
        let bra = MomentumConfig::new(Sector::HalfIntegerGrid, 10, vec![-3, -1, 0, 4]).unwrap();
        let canonical = oracle::build_momentum_state(&bra).unwrap();
        let mut v = oracle::StateVector::vacuum(10).unwrap();
        let order = [-1i64, -3, 0, 4];
        let (_, odd) = MomentumConfig::from_unordered(Sector::HalfIntegerGrid, 10, &order).unwrap();
        for &n in order.iter().rev() {
            let k = Sector::HalfIntegerGrid.momentum(10, n);
            let c: Vec<Complex64> = (1..=10).map(|x| Complex64::from_polar(1.0 / 10f64.sqrt(), k * x as f64)).collect();
            v = v.apply_creation(&c).unwrap();
        }
        let a = oracle::matrix_element_sigma_minus(&canonical, &ket, 10).unwrap();
        let b = oracle::matrix_element_sigma_minus(&v, &ket, 10).unwrap();
        assert!(odd);
        assert!((a + b).norm() < 1e-13);
        assert!((a.norm() - b.norm()).abs() < 1e-13);
    }

    /// `(i/L)/sin x = (i/L) e^{−ix}(ctg x + i)`: pulling the row factors
    /// `e^{−ip_i/2}` and column factors `i e^{iq_j/2}` out of the sine matrix
    /// leaves columns `(ctg + i)/L`, a rank-1 update of the cotangent matrix
    /// along its last column of ones.
    #[test]
    fn sin_to_ctg_by_rank_one_lemma() {
        for l in [6usize, 10] {
            let spec = ChainSpec::half_filled(l).unwrap();
            let ket = ket_of(&spec);
            let mut rng = ChaCha8Rng::seed_from_u64(l as u64);
            for _ in 0..5 {
                let bra = sample_config(l, Sector::HalfIntegerGrid, l / 2 - 1, None, &mut rng).unwrap();
                let (p, q) = (ket.momenta(), bra.momenta());
                let m = p.len();
                let lf = l as f64;
                let ctg = ComplexMatrix::from_fn(m, |i, j| {
                    if j + 1 == m {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(1.0 / (lf * (0.5 * (p[i] - q[j])).tan()), 0.0)
                    }
                });
                let phi = vec![Complex64::new(1.0, 0.0); m];
                let mut c = vec![Complex64::new(0.0, 1.0 / lf); m];
                c[m - 1] = Complex64::new(0.0, 0.0);
                let lemma = rank1_det_expand(&ctg, &c, &phi).unwrap();
                let shifted = det_lu(&ComplexMatrix::from_fn(m, |i, j| ctg[(i, j)] + phi[i] * c[j]));
                assert!(same(lemma, shifted, 1e-11));
                assert!(same(lemma, det_lu(&ctg), 1e-11));

                let sum_p: f64 = p.iter().sum();
                let sum_q: f64 = q.iter().sum();
                let factor = LogComplex::new(0.0, 0.5 * (sum_q - sum_p) + FRAC_PI_2 * (m as f64 - 1.0));
                let sin = formfactor_det_sin(&spec, &ket, &bra).unwrap().value;
                let via_lemma = factor * lemma * inv_sqrt_l(l);
                assert!(same(sin, via_lemma, 1e-11));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn three_formulations_agree(seed in any::<u64>(), k in 1usize..=16) {
            let l = 4 * k + 2;
            let spec = ChainSpec::half_filled(l).unwrap();
            let ket = ket_of(&spec);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let bra = sample_config(l, Sector::HalfIntegerGrid, l / 2 - 1, Some(0), &mut rng).unwrap();
            let a = formfactor_product(&spec, &ket, &bra).unwrap();
            let b = formfactor_det_sin(&spec, &ket, &bra).unwrap();
            let c = formfactor_det_ctg(&spec, &ket, &bra).unwrap();
            let rel = |x: &Formfactor, y: &Formfactor| ((x.value.log_magnitude - y.value.log_magnitude).exp() - 1.0).abs();
            prop_assert!(rel(&a, &b) < 1e-10);
            prop_assert!(rel(&a, &c) < 1e-10);
            prop_assert!(same(a.physical(), c.physical(), 1e-9));
            prop_assert!(same(b.physical(), c.physical(), 1e-9));
        }
    }
}
