//! Equal-time correlator `G(x) = ⟨0|σ⁺_x σ⁻_0|0⟩` of the half-filled chain
//! with `M = L/2` odd.
//!
//! With `H = −Σ(σ⁺_iσ⁻_{i+1} + h.c.)` the correlator is positive for every
//! `x`, and `G(2N) = ½R_N²`, `G(2N+1) = ½R_N R_{N+1}`. The convention with
//! the singularity at `q = π` (`σ → (−1)ˣσ`) is available through
//! [`CorrelatorTable::alternating`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XxError};
use crate::lattice::{ground_state_config, ChainSpec, Sector};
use crate::linalg::{cauchy_sin_det, det_lu, ComplexMatrix, LogComplex};
use crate::special::{constants, ln_gamma};

/// Largest imaginary residue tolerated in a determinant that is real by
/// construction.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrelatorMethod {
    WickDet,
    RnProduct,
    MRDet,
    Asymptotic,
}

impl CorrelatorMethod {
    pub const EXACT: [CorrelatorMethod; 3] = [CorrelatorMethod::WickDet, CorrelatorMethod::RnProduct, CorrelatorMethod::MRDet];

    pub fn name(self) -> &'static str {
        match self {
            CorrelatorMethod::WickDet => "wick",
            CorrelatorMethod::RnProduct => "rn",
            CorrelatorMethod::MRDet => "mr",
            CorrelatorMethod::Asymptotic => "asymptotic",
        }
    }

    pub fn is_exact(self) -> bool {
        self != CorrelatorMethod::Asymptotic
    }
}

/// Power-law model `G(x) ≈ C0/(L sin(πx/L))^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsModel {
    pub alpha: f64,
    pub c0: f64,
    /// Coefficient of the `x^{−5/2}` term relative to the leading one.
    pub subleading: f64,
}

impl AsymptoticsModel {
    pub fn new(alpha: f64, c0: f64, subleading: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(XxError::Domain(format!("exponent α = {alpha} outside (0, 2)")));
        }
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(XxError::Domain(format!("amplitude C0 = {c0} must be positive")));
        }
        Ok(Self { alpha, c0, subleading })
    }

    /// The XX chain: `α = 1/2`, `C0` from the integral constant, `−1/8`.
    pub fn xx() -> Self {
        Self {
            alpha: 0.5,
            c0: constants().c0,
            subleading: -0.125,
        }
    }
}

fn check_distance(x: i64, max: i64) -> Result<()> {
    if x < 1 || x > max {
        return Err(XxError::Range {
            what: "distance x",
            value: x,
            min: 1,
            max,
        });
    }
    Ok(())
}

/// Free-fermion Green function `sin(πx/2)/(L sin(πx/L))`, with `1/2` at
/// `x ≡ 0 (mod L)`.
pub fn green0(spec: &ChainSpec, x: i64) -> Result<f64> {
    spec.require_correlator_sector()?;
    let l = spec.sites() as i64;
    if x.rem_euclid(l) == 0 {
        return Ok(0.5);
    }
    if x.rem_euclid(2) == 0 {
        return Ok(0.0);
    }
    // sin(πx/2) for odd x is exactly ±1
    let num = if (x - 1).div_euclid(2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let r = x.rem_euclid(2 * l);
    Ok(num / (l as f64 * (PI * r as f64 / l as f64).sin()))
}

fn real_part(v: LogComplex, what: impl FnOnce() -> String) -> Result<f64> {
    let z = v.to_complex()?;
    if z.im.abs() > IMAGINARY_TOLERANCE * z.re.abs().max(1.0) {
        return Err(XxError::NumericalAssertion {
            what: what(),
            residue: z.im,
        });
    }
    Ok(z.re)
}

/// `½ det_{x×x}[⟨B_{i−1}A_j⟩]` with `⟨B_{i−1}A_j⟩ = 2G0(i−j−1) − δ_{i−j−1,0}`.
pub fn correlator_wick(spec: &ChainSpec, x: i64) -> Result<f64> {
    spec.require_correlator_sector()?;
    check_distance(x, spec.sites() as i64 - 1)?;
    let n = x as usize;
    let g: Vec<f64> = (-(n as i64)..=n as i64).map(|d| green0(spec, d)).collect::<Result<_>>()?;
    let mat = ComplexMatrix::from_fn(n, |i, j| {
        let d = i as i64 - j as i64 - 1;
        let same_site = if d == 0 { 1.0 } else { 0.0 };
        Complex64::new(2.0 * g[(d + n as i64) as usize] - same_site, 0.0)
    });
    let det = real_part(det_lu(&mat), || format!("imaginary part of the Wick determinant at x = {x}"))?;
    Ok(0.5 * det)
}

fn check_rn_index(spec: &ChainSpec, n: usize) -> Result<()> {
    if n > spec.particles() {
        return Err(XxError::Range {
            what: "R_N index N",
            value: n as i64,
            min: 0,
            max: spec.particles() as i64,
        });
    }
    Ok(())
}

/// `ln R_N` from the finite-chain sine product
/// `(2/(L sin(π/L)))^N Π_{k=1}^{N−1} [sin²(2πk/L)/(sin(π(2k+1)/L) sin(π(2k−1)/L))]^{N−k}`.
pub fn ln_rn(spec: &ChainSpec, n: usize) -> Result<f64> {
    spec.require_correlator_sector()?;
    check_rn_index(spec, n)?;
    let l = spec.sites() as f64;
    let s = |k: f64| (PI * k / l).sin().ln();
    let mut acc = n as f64 * (2.0f64.ln() - l.ln() - s(1.0));
    for k in 1..n {
        let kf = k as f64;
        acc += (n - k) as f64 * (2.0 * s(2.0 * kf) - s(2.0 * kf + 1.0) - s(2.0 * kf - 1.0));
    }
    Ok(acc)
}

/// `R_N` on the finite chain; `R_0 = 1`.
pub fn rn(spec: &ChainSpec, n: usize) -> Result<f64> {
    Ok(ln_rn(spec, n)?.exp())
}

/// `R_N` as the kernel determinant `(−1)^N det[2/(L sin((2π/L)(i−j−½)))]`.
pub fn rn_kernel_det(spec: &ChainSpec, n: usize) -> Result<f64> {
    spec.require_correlator_sector()?;
    check_rn_index(spec, n)?;
    let l = spec.sites() as f64;
    let mat = ComplexMatrix::from_fn(n, |i, j| {
        let d = 2.0 * (i as f64 - j as f64) - 1.0;
        Complex64::new(2.0 / (l * (PI * d / l).sin()), 0.0)
    });
    let det = real_part(det_lu(&mat), || format!("imaginary part of the R_{n} kernel"))?;
    Ok(if n % 2 == 1 { -det } else { det })
}

/// `R_N` as a closed Cauchy sine product, `(2/L)^N |det[1/sin((p_i−q_j)/2)]|`
/// with `p_i = 4πi/L`, `q_j = 4π(j+½)/L`.
pub fn rn_cauchy(spec: &ChainSpec, n: usize) -> Result<f64> {
    spec.require_correlator_sector()?;
    check_rn_index(spec, n)?;
    let l = spec.sites() as f64;
    let p: Vec<f64> = (1..=n).map(|i| 4.0 * PI * i as f64 / l).collect();
    let q: Vec<f64> = (1..=n).map(|j| 4.0 * PI * (j as f64 + 0.5) / l).collect();
    let det = cauchy_sin_det(&p, &q)?;
    Ok((det.log_magnitude + n as f64 * (2.0 / l).ln()).exp())
}

/// `ln R_N` in the thermodynamic limit,
/// `N ln(2/π) + Σ_{k=1}^{N−1} (N−k) ln[(2k)²/((2k+1)(2k−1))]`.
pub fn ln_rn_thermodynamic(n: usize) -> f64 {
    let mut acc = n as f64 * (2.0 / PI).ln();
    for k in 1..n {
        let kf = k as f64;
        // ln(4k²/(4k²−1)) = −ln(1 − 1/(4k²))
        acc -= (n - k) as f64 * (-1.0 / (4.0 * kf * kf)).ln_1p();
    }
    acc
}

pub fn rn_thermodynamic(n: usize) -> f64 {
    ln_rn_thermodynamic(n).exp()
}

/// `ln R_N^∞` through Barnes G,
/// `√π G(½)² G(N+1)² / (G(N+½) G(N+3/2))`, with the `G` ratios reduced to
/// `Γ` products.
pub fn ln_rn_barnes(n: usize) -> Result<f64> {
    let mut acc = 0.5 * PI.ln();
    for k in 0..n {
        let kf = k as f64;
        acc += 2.0 * ln_gamma(kf + 1.0)? - 2.0 * ln_gamma(kf + 0.5)?;
    }
    Ok(acc - ln_gamma(n as f64 + 0.5)?)
}

/// `G(x)` assembled from `R_N`: `½R_N²` for `x = 2N`, `½R_N R_{N+1}` for odd `x`.
pub fn correlator_rn(spec: &ChainSpec, x: i64) -> Result<f64> {
    spec.require_correlator_sector()?;
    check_distance(x, spec.sites() as i64)?;
    let n = (x / 2) as usize;
    if x % 2 == 0 {
        Ok(0.5 * (2.0 * ln_rn(spec, n)?).exp())
    } else {
        Ok(0.5 * (ln_rn(spec, n)? + ln_rn(spec, n + 1)?).exp())
    }
}

/// Same assembly in the thermodynamic limit.
pub fn correlator_thermodynamic(x: i64) -> Result<f64> {
    if x < 1 {
        return Err(XxError::Range {
            what: "distance x",
            value: x,
            min: 1,
            max: i64::MAX,
        });
    }
    let n = (x / 2) as usize;
    Ok(if x % 2 == 0 {
        0.5 * (2.0 * ln_rn_thermodynamic(n)).exp()
    } else {
        0.5 * (ln_rn_thermodynamic(n) + ln_rn_thermodynamic(n + 1)).exp()
    })
}

/// `det(M + R) − det(M)` over the ground-state momenta, with
/// `M_ij = δ_ij(1 − 2x/L) − (1−δ_ij)(2/L) sin((p_i−p_j)x/2)/tg((p_i−p_j)/2)` and
/// `R_ij = (1/L) e^{i(p_i+p_j)x/2}`.
pub fn correlator_mr(spec: &ChainSpec, x: i64) -> Result<f64> {
    spec.require_correlator_sector()?;
    check_distance(x, spec.sites() as i64)?;
    let ket = ground_state_config(spec, Sector::IntegerGrid)?;
    let p = ket.momenta();
    let m = p.len();
    let l = spec.sites() as f64;
    let xf = x as f64;
    let base = ComplexMatrix::from_fn(m, |i, j| {
        if i == j {
            Complex64::new(1.0 - 2.0 * xf / l, 0.0)
        } else {
            let d = p[i] - p[j];
            Complex64::new(-(2.0 / l) * (0.5 * d * xf).sin() / (0.5 * d).tan(), 0.0)
        }
    });
    let shifted = ComplexMatrix::from_fn(m, |i, j| base[(i, j)] + Complex64::from_polar(1.0 / l, 0.5 * (p[i] + p[j]) * xf));
    let diff = det_lu(&shifted).sub(&det_lu(&base));
    real_part(diff, || format!("imaginary part of det(M+R) − det(M) at x = {x}"))
}

/// `C0/(L sin(πx/L))^α`.
pub fn correlator_asymptotic(model: &AsymptoticsModel, spec: &ChainSpec, x: i64) -> Result<f64> {
    if x < 1 {
        return Err(XxError::Range {
            what: "distance x",
            value: x,
            min: 1,
            max: i64::MAX,
        });
    }
    let l = spec.sites() as f64;
    Ok(model.c0 / (l * (PI * x as f64 / l).sin()).powf(model.alpha))
}

/// `(C0/√π)((−1)ˣ x^{−1/2} − (1/8) x^{−5/2})`, the thermodynamic correlator
/// with its first correction, in the alternating convention.
pub fn correlator_subleading(x: i64) -> Result<f64> {
    if x < 1 {
        return Err(XxError::Range {
            what: "distance x",
            value: x,
            min: 1,
            max: i64::MAX,
        });
    }
    let xf = x as f64;
    let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
    Ok(constants().c0 / PI.sqrt() * (sign * xf.powf(-0.5) - 0.125 * xf.powf(-2.5)))
}

pub fn correlator(spec: &ChainSpec, x: i64, method: CorrelatorMethod) -> Result<f64> {
    match method {
        CorrelatorMethod::WickDet => {
            if x == spec.sites() as i64 {
                spec.require_correlator_sector()?;
                return Ok(0.5);
            }
            correlator_wick(spec, x)
        }
        CorrelatorMethod::RnProduct => correlator_rn(spec, x),
        CorrelatorMethod::MRDet => correlator_mr(spec, x),
        CorrelatorMethod::Asymptotic => correlator_asymptotic(&AsymptoticsModel::xx(), spec, x),
    }
}

/// `G(x)` for `x = 1..L`. Entry `L` is the same-site density `1/2` for every
/// method, since the power law has no finite value there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    pub spec: ChainSpec,
    pub values: Vec<f64>,
    pub method: CorrelatorMethod,
}

impl CorrelatorTable {
    pub fn compute(spec: &ChainSpec, method: CorrelatorMethod) -> Result<Self> {
        Self::compute_with(spec, method, &AsymptoticsModel::xx())
    }

    /// Like [`compute`](Self::compute), with an explicit model for the
    /// asymptotic method.
    pub fn compute_with(spec: &ChainSpec, method: CorrelatorMethod, model: &AsymptoticsModel) -> Result<Self> {
        spec.require_correlator_sector()?;
        let l = spec.sites() as i64;
        let values = (1..=l)
            .into_par_iter()
            .map(|x| match method {
                _ if x == l => Ok(0.5),
                CorrelatorMethod::Asymptotic => correlator_asymptotic(model, spec, x),
                _ => correlator(spec, x, method),
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            spec: *spec,
            values,
            method,
        })
    }

    pub fn get(&self, x: usize) -> Option<f64> {
        x.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// `(−1)ˣ G(x)`.
    pub fn alternating(&self) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &g)| if (i + 1) % 2 == 0 { g } else { -g })
            .collect()
    }

    /// `max_x |G(x) − G(L−x)|`.
    pub fn reflection_asymmetry(&self) -> f64 {
        let l = self.values.len();
        (1..l).map(|x| (self.values[x - 1] - self.values[l - x - 1]).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::special::ln_rn_asymptotic;
    use proptest::prelude::*;

    fn spec(l: usize) -> ChainSpec {
        ChainSpec::half_filled(l).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn green0_values() {
        let s = spec(6);
        assert!((green0(&s, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(green0(&s, 2).unwrap(), 0.0);
        assert_eq!(green0(&s, 0).unwrap(), 0.5);
        assert_eq!(green0(&s, 12).unwrap(), 0.5);
        assert!((green0(&s, -1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((green0(&s, 3).unwrap() - -1.0 / 6.0).abs() < 1e-15);
        assert!(green0(&spec(8), 1).is_err());
    }

    #[test]
    fn wick_small_values() {
        let s = spec(6);
        assert!((correlator_wick(&s, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((correlator_wick(&s, 2).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        assert!(correlator_wick(&s, 0).is_err());
        assert!(correlator_wick(&s, 6).is_err());
    }

    #[test]
    fn rn_routes_agree() {
        let s = spec(6);
        assert_eq!(rn(&s, 0).unwrap(), 1.0);
        assert!((rn(&s, 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        for l in [6usize, 10, 50, 102] {
            let s = spec(l);
            for n in 0..=s.particles() {
                let a = rn(&s, n).unwrap();
                assert!(rel(rn_kernel_det(&s, n).unwrap(), a) < 1e-11, "kernel L={l} N={n}");
                assert!(rel(rn_cauchy(&s, n).unwrap(), a) < 1e-10, "cauchy L={l} N={n}");
            }
            // G(L) = ½ R_M² = ½
            assert!((rn(&s, s.particles()).unwrap() - 1.0).abs() < 1e-11);
        }
        assert!(rn(&spec(6), 4).is_err());
    }

    #[test]
    fn thermodynamic_rn_routes() {
        assert!((rn_thermodynamic(1) - 2.0 / PI).abs() < 1e-15);
        for n in [1usize, 2, 5, 40, 300] {
            assert!((ln_rn_barnes(n).unwrap() - ln_rn_thermodynamic(n)).abs() < 1e-11, "N={n}");
        }
        // the finite chain approaches the limit
        let a = (ln_rn(&spec(2002), 10).unwrap() - ln_rn_thermodynamic(10)).abs();
        let b = (ln_rn(&spec(202), 10).unwrap() - ln_rn_thermodynamic(10)).abs();
        assert!(a < b && a < 1e-4);
    }

    #[test]
    fn ln_rn_large_n_expansion() {
        for n in [25usize, 50, 100] {
            let resid = ln_rn_thermodynamic(n) - ln_rn_asymptotic(n as u32).unwrap();
            // next term is O(N⁻⁴)
            assert!(resid.abs() * (n as f64).powi(4) < 5e-3, "N={n} resid={resid:e}");
        }
    }

    #[test]
    fn exact_methods_match_oracle() {
        for l in [6usize, 10] {
            let s = spec(l);
            let v = oracle::ground_state(&s).unwrap();
            for x in 1..=l as i64 {
                let want = oracle::expectation_correlator(&v, x as usize).unwrap();
                for m in CorrelatorMethod::EXACT {
                    let got = correlator(&s, x, m).unwrap();
                    assert!((got - want).abs() < 1e-12, "L={l} x={x} {m:?}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn three_routes_agree_on_long_chains() {
        for l in [50usize, 102] {
            let s = spec(l);
            let tables: Vec<_> = CorrelatorMethod::EXACT.iter().map(|&m| CorrelatorTable::compute(&s, m).unwrap()).collect();
            for x in 1..=l {
                let a = tables[1].get(x).unwrap();
                for t in [&tables[0], &tables[2]] {
                    let b = t.get(x).unwrap();
                    assert!(rel(b, a) < 1e-10, "L={l} x={x} {:?}: {b} vs {a}", t.method);
                }
            }
            for t in &tables {
                assert!(t.reflection_asymmetry() < 1e-10);
                assert_eq!(t.get(l), Some(0.5));
            }
        }
    }

    #[test]
    fn midpoint_matches_power_law() {
        let s = spec(402);
        let model = AsymptoticsModel::xx();
        let exact = correlator_rn(&s, 201).unwrap();
        let asym = correlator_asymptotic(&model, &s, 201).unwrap();
        assert!((asym - model.c0 / (402f64).sqrt()).abs() < 1e-15);
        assert!(rel(asym, exact) < 1e-3);
    }

    #[test]
    fn subleading_term() {
        let c0 = constants().c0;
        let lead = c0 / PI.sqrt() * 10f64.powf(-0.5);
        let sub = correlator_subleading(10).unwrap();
        assert!(((lead - sub) / lead - 0.00125).abs() < 1e-12);
        // the thermodynamic correlator in the alternating convention
        for x in [20i64, 21, 40, 41] {
            let exact = if x % 2 == 0 { 1.0 } else { -1.0 } * correlator_thermodynamic(x).unwrap();
            let err = (correlator_subleading(x).unwrap() - exact).abs() / exact.abs();
            assert!(err < 0.5 / (x as f64).powi(4), "x={x} err={err:e}");
        }
        assert!((correlator_thermodynamic(1).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn alternating_flips_odd_distances() {
        let t = CorrelatorTable::compute(&spec(6), CorrelatorMethod::RnProduct).unwrap();
        let a = t.alternating();
        assert_eq!(a[0], -t.values[0]);
        assert_eq!(a[1], t.values[1]);
    }

    #[test]
    fn model_validation() {
        assert!(AsymptoticsModel::new(0.0, 0.5, 0.0).is_err());
        assert!(AsymptoticsModel::new(0.5, -1.0, 0.0).is_err());
        assert!(AsymptoticsModel::new(0.5, 0.5, 0.0).is_ok());
        assert!(CorrelatorTable::compute(&spec(8), CorrelatorMethod::WickDet).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn positive_and_reflection_symmetric(k in 1usize..40) {
            let s = spec(4 * k + 2);
            let t = CorrelatorTable::compute(&s, CorrelatorMethod::RnProduct).unwrap();
            prop_assert!(t.values.iter().all(|&g| g > 0.0));
            prop_assert!(t.reflection_asymmetry() < 1e-12);
        }
    }
}
