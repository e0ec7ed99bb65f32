//! Gamma function, Glaisher's constant, Barnes G asymptotics, the sine-power
//! integrals and the constant `C0` of the correlator asymptotics.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XxError};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Principal-branch `ln Γ(z)` up to multiples of `2πi` in the imaginary part.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && is_nonpositive_integer(z.re) {
        return Err(XxError::Pole(format!("Γ has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - z)?);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (z + 0.5) * t.ln() - t + x.ln())
}

/// `ln |Γ(x)|` for real `x`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(XxError::Pole(format!("Γ has a pole at {x}")));
    }
    if x < 0.5 {
        return Ok(PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let mut s = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(LN_SQRT_2PI + (z + 0.5) * t.ln() - t + s.ln())
}

/// Sign of `Γ(x)`; `x` must not be a pole.
fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Euler's Γ for real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(XxError::Pole(format!("Γ has a pole at {x}")));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    let lg = ln_gamma(x)?;
    if lg > 709.0 {
        return Err(XxError::Overflow(lg));
    }
    // small integers are exact factorials; Lanczos is good to a few ulp elsewhere
    if x == x.round() && x <= 23.0 {
        return Ok((1..x as u64).map(|k| k as f64).product());
    }
    Ok(lg.exp())
}

/// `1/Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    match ln_gamma(x) {
        Ok(lg) => gamma_sign(x) * (-lg).exp(),
        Err(_) => 0.0,
    }
}

/// `Γ(x + a)/Γ(x + b)` through log-gammas; both arguments must be positive.
pub fn gamma_ratio(x: f64, a: f64, b: f64) -> Result<f64> {
    if x + a <= 0.0 || x + b <= 0.0 {
        return Err(XxError::Domain(format!(
            "gamma_ratio needs positive arguments, got {} and {}",
            x + a,
            x + b
        )));
    }
    Ok((ln_gamma(x + a)? - ln_gamma(x + b)?).exp())
}

// Bernoulli numbers B_4, B_6, ..., B_16
const BERNOULLI_EVEN: [f64; 7] = [
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ln A` from Euler–Maclaurin applied to `Σ k ln k`, cut at `n = 10`.
fn ln_glaisher() -> f64 {
    let n = 10.0_f64;
    let head: f64 = (2..=10).map(|k| k as f64 * (k as f64).ln()).sum();
    let mut acc = head - (n * n / 2.0 + n / 2.0 + 1.0 / 12.0) * n.ln() + n * n / 4.0;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = (i + 2) as f64;
        let m = 2.0 * j;
        acc += b / (m * (m - 1.0) * (m - 2.0)) * n.powf(-(m - 2.0));
    }
    acc
}

/// `ζ′(−1) = 1/12 − ln A`.
pub fn zeta_prime_minus_one() -> f64 {
    1.0 / 12.0 - ln_glaisher()
}

/// Glaisher–Kinkelin constant `A`.
pub fn glaisher() -> f64 {
    ln_glaisher().exp()
}

/// `ln G(1/2)` in closed form.
pub fn ln_barnes_g_half() -> f64 {
    LN_2 / 24.0 + 0.125 - 0.25 * PI.ln() - 1.5 * ln_glaisher()
}

/// Large-argument `ln G(N)`. The expansion is written for `G(n + 1)` and
/// evaluated at `n = N − 1`.
pub fn barnes_g_log_asymptotic(big_n: f64) -> Result<f64> {
    if !(big_n >= 2.0) {
        return Err(XxError::Domain(format!(
            "Barnes G asymptotics need N >= 2, got {big_n}"
        )));
    }
    let n = big_n - 1.0;
    Ok((n * n / 2.0 - 1.0 / 12.0) * n.ln() - 0.75 * n * n
        + 0.5 * n * (2.0 * PI).ln()
        + 1.0 / 12.0
        - ln_glaisher()
        - 1.0 / (240.0 * n * n))
}

/// Constant term of `ln R_N`: `ln 2/12 + 3ζ′(−1)`.
pub fn ln_rn_constant() -> f64 {
    LN_2 / 12.0 + 3.0 * zeta_prime_minus_one()
}

/// `ln R_N ≈ −¼ ln N + ln 2/12 + 3ζ′(−1) − 1/(64N²)`.
pub fn ln_rn_asymptotic(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(XxError::Domain("ln R_N asymptotics need N >= 1".into()));
    }
    let n = n as f64;
    Ok(-0.25 * n.ln() + ln_rn_constant() - 1.0 / (64.0 * n * n))
}

// ---------------------------------------------------------------------------
// quadrature

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = 0.0;
    let mut rabs = rk.abs();
    let mut fv = [(0.0, 0.0); 10];
    for j in 0..10 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        fv[j] = (f1, f2);
        rk += WGK[j] * (f1 + f2);
        rabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut rasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        rasc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let (rk, rabs, rasc) = (rk * h, rabs * h.abs(), rasc * h.abs());
    let mut err = ((rk - rg * h) * 1.0).abs();
    if rasc != 0.0 && err != 0.0 {
        err = rasc * (200.0 * err / rasc).powf(1.5).min(1.0);
    }
    if rabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * rabs);
    }
    (rk, err)
}

const MAX_INTERVALS: usize = 2000;

/// Globally adaptive Gauss–Kronrod (10/21) integration of `f` over `[a, b]`.
/// Stops when the summed error drops below `tol · max(1, |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    let (v, e) = gk21(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(XxError::Quadrature {
                estimate: value,
                error,
            });
        }
        if error <= tol * value.abs().max(1.0) {
            return Ok(QuadResult { value, error });
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(XxError::Quadrature {
                estimate: value,
                error,
            });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(XxError::Quadrature {
                estimate: value,
                error,
            });
        }
        let (v1, e1) = gk21(&f, lo, mid);
        let (v2, e2) = gk21(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `∫₀^π g(y) sin(y)^e dy` for smooth `g` and `e > −1`. Each half of the
/// interval is mapped with `y = t^m`, `m = 1/(1+e)`, which removes the
/// endpoint power singularity.
fn sin_weighted_quad<G: Fn(f64) -> f64>(g: G, e: f64, tol: f64) -> Result<QuadResult> {
    let m = if e < 0.0 { 1.0 / (1.0 + e) } else { 1.0 };
    let top = (PI / 2.0).powf(1.0 / m);
    let half = |reflect: bool| {
        integrate(
            |t: f64| {
                let u = t.powf(m);
                let jac = m * t.powf(m - 1.0);
                let y = if reflect { PI - u } else { u };
                g(y) * (e * u.sin().ln()).exp() * jac
            },
            0.0,
            top,
            tol,
        )
    };
    let l = half(false)?;
    let r = half(true)?;
    Ok(QuadResult {
        value: l.value + r.value,
        error: l.error + r.error,
    })
}

/// `∫₀^π sin(y)^{−α} dy = √π Γ((1−α)/2)/Γ(1−α/2)`.
pub fn sin_power_integral(alpha: f64) -> Result<f64> {
    if !(alpha < 1.0) {
        return Err(XxError::Domain(format!(
            "∫ sin^(-α) diverges for α = {alpha}"
        )));
    }
    Ok(PI.sqrt() * (ln_gamma((1.0 - alpha) / 2.0)? - ln_gamma(1.0 - alpha / 2.0)?).exp())
}

/// Quadrature value of [`sin_power_integral`].
pub fn sin_power_integral_quad(alpha: f64, tol: f64) -> Result<QuadResult> {
    if !(alpha < 1.0) {
        return Err(XxError::Domain(format!(
            "∫ sin^(-α) diverges for α = {alpha}"
        )));
    }
    sin_weighted_quad(|_| 1.0, -alpha, tol)
}

/// `∫₀^π e^{iqy} sin(y)^{ν−1} dy = π e^{iqπ/2} / (2^{ν−1} ν B((ν+q+1)/2, (ν−q+1)/2))`.
pub fn sin_fourier_integral(nu: f64, q: f64) -> Result<Complex64> {
    if !(nu > 0.0) {
        return Err(XxError::Domain(format!("need ν > 0, got {nu}")));
    }
    // 1/(ν B(a, b)) = Γ(ν)/(Γ(a)Γ(b)); 1/Γ vanishes at the poles
    let a = 0.5 * (nu + q + 1.0);
    let b = 0.5 * (nu - q + 1.0);
    let modulus = PI * gamma_fn(nu)? * rgamma(a) * rgamma(b) / 2f64.powf(nu - 1.0);
    Ok(Complex64::from_polar(1.0, 0.5 * q * PI) * modulus)
}

/// Quadrature value of [`sin_fourier_integral`], real and imaginary parts
/// with their own error estimates.
pub fn sin_fourier_integral_quad(nu: f64, q: f64, tol: f64) -> Result<(QuadResult, QuadResult)> {
    if !(nu > 0.0) {
        return Err(XxError::Domain(format!("need ν > 0, got {nu}")));
    }
    let re = sin_weighted_quad(|y| (q * y).cos(), nu - 1.0, tol)?;
    let im = sin_weighted_quad(|y| (q * y).sin(), nu - 1.0, tol)?;
    Ok((re, im))
}

/// The constant `I = ¼∫₀^∞ (e^{−4t} − ch(t)^{−2}) dt/t` and the derived `C0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C0Integral {
    pub integral: f64,
    pub error: f64,
    pub c0: f64,
}

/// `C0 = √(π/2)·e^{2I}`.
pub fn c0_from_ln_rn_constant(i: f64) -> f64 {
    (PI / 2.0).sqrt() * (2.0 * i).exp()
}

pub fn c0_from_integral() -> Result<C0Integral> {
    // e^{-4t} - sech²t = expm1(-4t) + tanh²t, free of cancellation near t = 0
    let f = |t: f64| {
        if t == 0.0 {
            -4.0
        } else {
            ((-4.0 * t).exp_m1() + t.tanh().powi(2)) / t
        }
    };
    let near = integrate(f, 0.0, 1.0, 1e-13)?;
    // the integrand decays like e^{-2t}; beyond t = 40 it is below 1e-36
    let far = integrate(f, 1.0, 40.0, 1e-13)?;
    let integral = 0.25 * (near.value + far.value);
    let error = 0.25 * (near.error + far.error);
    if error > 1e-10 {
        return Err(XxError::Quadrature {
            estimate: integral,
            error,
        });
    }
    Ok(C0Integral {
        integral,
        error,
        c0: c0_from_ln_rn_constant(integral),
    })
}

/// Constants shared by the asymptotic formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBundle {
    pub c0: f64,
    pub c0_error: f64,
    pub ln_rn_constant: f64,
    pub a_glaisher: f64,
    pub zeta_prime_minus_one: f64,
    pub gamma_quarter: f64,
    pub gamma_three_quarter: f64,
}

impl ConstantsBundle {
    pub fn compute() -> Result<Self> {
        let c = c0_from_integral()?;
        Ok(Self {
            c0: c.c0,
            c0_error: 2.0 * c.c0 * c.error,
            ln_rn_constant: c.integral,
            a_glaisher: glaisher(),
            zeta_prime_minus_one: zeta_prime_minus_one(),
            gamma_quarter: gamma_fn(0.25)?,
            gamma_three_quarter: gamma_fn(0.75)?,
        })
    }
}

/// Process-wide constants, computed on first use.
pub fn constants() -> &'static ConstantsBundle {
    static CELL: OnceLock<ConstantsBundle> = OnceLock::new();
    CELL.get_or_init(|| ConstantsBundle::compute().expect("constant quadrature converges"))
}
