//! Log-domain complex numbers, pivoted determinants and closed-form Cauchy
//! determinants.

use std::f64::consts::PI;
use std::ops::{Div, Mul, Neg};

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Result, XxError};
use crate::lattice::reduce_angle;
use crate::special::ln_gamma_complex;

/// Largest log-magnitude that may be converted back to a plain complex.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// A complex number stored as `exp(log_magnitude + i·phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogComplex {
    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::zero();
        }
        Self {
            log_magnitude,
            phase: reduce_angle(phase),
        }
    }

    pub fn zero() -> Self {
        Self {
            log_magnitude: f64::NEG_INFINITY,
            phase: 0.0,
        }
    }

    pub fn one() -> Self {
        Self {
            log_magnitude: 0.0,
            phase: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else {
            Self::new(x.abs().ln(), if x < 0.0 { PI } else { 0.0 })
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::zero()
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn to_complex(&self) -> Result<Complex64> {
        if self.log_magnitude > OVERFLOW_GUARD {
            return Err(XxError::Overflow(self.log_magnitude));
        }
        Ok(Complex64::from_polar(self.log_magnitude.exp(), self.phase))
    }

    /// `|z|`, possibly `inf` for very large values.
    pub fn abs(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn powi(&self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::one() } else { Self::zero() };
        }
        Self::new(self.log_magnitude * k as f64, self.phase * k as f64)
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        Self::new(0.5 * self.log_magnitude, 0.5 * self.phase)
    }

    /// Sum of two values, scaled by the larger magnitude so neither side overflows.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let s = self.log_magnitude.max(other.log_magnitude);
        let a = Complex64::from_polar((self.log_magnitude - s).exp(), self.phase);
        let b = Complex64::from_polar((other.log_magnitude - s).exp(), other.phase);
        let sum = Self::from_complex(a + b);
        if sum.is_zero() {
            return sum;
        }
        Self::new(sum.log_magnitude + s, sum.phase)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&-*other)
    }

    /// Phase difference reduced into `(-π, π]`.
    pub fn phase_diff(&self, other: &Self) -> f64 {
        reduce_angle(self.phase - other.phase)
    }
}

impl Mul for LogComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self::new(self.log_magnitude + rhs.log_magnitude, self.phase + rhs.phase)
    }
}

impl Div for LogComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.log_magnitude - rhs.log_magnitude, self.phase - rhs.phase)
    }
}

impl Neg for LogComplex {
    type Output = Self;
    fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.log_magnitude, self.phase + PI)
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(XxError::Dimension(format!("matrix with {n} rows is not square")));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    fn with_column(&self, k: usize, col: &[Complex64]) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, k)] = col[i];
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Determinant by Gaussian elimination with partial pivoting. Pivots are
/// accumulated in log form, so the result never overflows.
pub fn det_lu(m: &ComplexMatrix) -> LogComplex {
    let n = m.n;
    let mut a = m.data.clone();
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return LogComplex::zero();
        }
        if p != k {
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            phase += PI;
        }
        let pivot = a[k * n + k];
        log_mag += best.ln();
        phase += pivot.arg();
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] -= factor * t;
            }
        }
        // keep the accumulated phase small
        phase = reduce_angle(phase);
    }
    LogComplex::new(log_mag, phase)
}

/// Complex number in double-double precision (about 32 significant digits).
pub type DdComplex = Complex<TwoFloat>;

/// `(sin(πk/n), cos(πk/n))` in double-double precision. The reduction to
/// `|y| ≤ π/4` is done on the integers, so large `k` lose nothing.
pub fn sin_cos_pi_frac(k: i64, n: i64) -> (TwoFloat, TwoFloat) {
    assert!(n > 0, "denominator must be positive");
    let period = 2 * n as i128;
    let kk = (k as i128).rem_euclid(period);
    // angle = πk/n = (π/2)(2k/n) = jπ/2 + π r/(2n)
    let j = (2 * kk + n as i128 / 2).div_euclid(n as i128);
    let r = 2 * kk - j * n as i128;
    let y = twofloat::consts::PI * (r as f64) / (2.0 * n as f64);
    let (s, c) = sin_cos_small(y);
    match j.rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `a / b` to full double-double accuracy. The quotient operator of
/// `TwoFloat` forms its residual without a fused multiply-add and is only
/// good to about 16 digits, so two correction steps are added here.
pub fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + q2 + q3
}

fn sin_cos_small(y: TwoFloat) -> (TwoFloat, TwoFloat) {
    let y2 = y * y;
    let mut s = y;
    let mut c = TwoFloat::from(1.0);
    let mut ts = y;
    let mut tc = TwoFloat::from(1.0);
    for k in 1..30 {
        let kf = k as f64;
        ts = -ts * y2 / ((2.0 * kf) * (2.0 * kf + 1.0));
        tc = -tc * y2 / ((2.0 * kf - 1.0) * (2.0 * kf));
        s += ts;
        c += tc;
        if ts.hi().abs() < 1e-40 && tc.hi().abs() < 1e-40 {
            break;
        }
    }
    (s, c)
}

/// `det_lu` carried out in double-double arithmetic. Needed when the
/// determinant is many orders of magnitude below the product of row norms.
pub fn det_lu_dd(n: usize, mut entry: impl FnMut(usize, usize) -> DdComplex) -> LogComplex {
    let mut a: Vec<DdComplex> = (0..n * n).map(|idx| entry(idx / n, idx % n)).collect();
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, a[i * n + k].norm_sqr().hi()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= 0.0 {
            return LogComplex::zero();
        }
        if p != k {
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            phase += PI;
        }
        let pivot = a[k * n + k];
        let nsq = pivot.norm_sqr();
        log_mag += 0.5 * (nsq.hi().ln() + nsq.lo() / nsq.hi());
        phase += pivot.im.hi().atan2(pivot.re.hi());
        let inv = Complex::new(dd_div(pivot.re, nsq), dd_div(-pivot.im, nsq));
        for i in k + 1..n {
            let factor = a[i * n + k] * inv;
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] -= factor * t;
            }
        }
        phase = reduce_angle(phase);
    }
    LogComplex::new(log_mag, phase)
}

fn log_sin(x: f64) -> LogComplex {
    LogComplex::from_real(x.sin())
}

fn is_multiple_of_two_pi(x: f64) -> bool {
    let r = x / (2.0 * PI);
    (r - r.round()).abs() < 1e-13
}

/// `Π_{i<j} sin((p_i−p_j)/2) · Π_{i<j} sin((q_i−q_j)/2) / Π_{i,j} sin((p_i−q_j)/2)`.
///
/// The determinant of the kernel `[1/sin((p_i−q_j)/2)]` equals this product
/// times `(−1)^{n(n−1)/2}`, see [`cauchy_sin_det`].
pub fn cauchy_sin_product(p: &[f64], q: &[f64]) -> Result<LogComplex> {
    if p.len() != q.len() {
        return Err(XxError::Dimension(format!(
            "Cauchy product needs equal lengths, got {} and {}",
            p.len(),
            q.len()
        )));
    }
    sin_product_ratio(p, q)
}

/// The same product for sets of any sizes.
pub fn sin_product_ratio(p: &[f64], q: &[f64]) -> Result<LogComplex> {
    let mut acc = LogComplex::one();
    for set in [p, q] {
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                acc = acc * log_sin(0.5 * (set[i] - set[j]));
            }
        }
    }
    for &pi in p {
        for &qj in q {
            if is_multiple_of_two_pi(pi - qj) {
                return Err(XxError::Coincidence { p: pi, q: qj });
            }
            acc = acc / log_sin(0.5 * (pi - qj));
        }
    }
    Ok(acc)
}

/// `det[1/sin((p_i−q_j)/2)]` via the closed product.
pub fn cauchy_sin_det(p: &[f64], q: &[f64]) -> Result<LogComplex> {
    let n = p.len();
    let v = cauchy_sin_product(p, q)?;
    Ok(if (n * n.saturating_sub(1) / 2) % 2 == 1 { -v } else { v })
}

/// `det(M + φ cᵀ)` expanded as `det M + Σ_k c_k det M^(k)`, where `M^(k)` has
/// its k-th column replaced by `φ`.
pub fn rank1_det_expand(m: &ComplexMatrix, c: &[Complex64], phi: &[Complex64]) -> Result<LogComplex> {
    let n = m.dim();
    if c.len() != n || phi.len() != n {
        return Err(XxError::Dimension(format!(
            "rank-1 expansion of a {n}×{n} matrix got vectors of length {} and {}",
            c.len(),
            phi.len()
        )));
    }
    let mut acc = det_lu(m);
    for k in 0..n {
        if c[k] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let term = LogComplex::from_complex(c[k]) * det_lu(&m.with_column(k, phi));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `det[1/(i−j+z)]_{i,j=1..n}` from the Barnes G closed form
/// `G(n+1)² (π/sin πz)^n / Π_{k<n} Γ(1+z+k) Γ(1−z+k)`.
pub fn cauchy_shifted_det(n: usize, z: Complex64) -> Result<LogComplex> {
    if z.im == 0.0 && z.re == z.re.round() {
        return Err(XxError::Pole(format!("integer shift z = {}", z.re)));
    }
    if n == 0 {
        return Ok(LogComplex::one());
    }
    let pi_over_sin = LogComplex::from_complex(PI / (z * PI).sin());
    let mut acc = pi_over_sin.powi(n as i32);
    for k in 0..n {
        let kf = k as f64;
        // G(n+1) = Π_{k<n} k!
        let fact = ln_gamma_complex(Complex64::new(kf + 1.0, 0.0))?.re;
        let lg = ln_gamma_complex(z + 1.0 + kf)? + ln_gamma_complex(1.0 - z + kf)?;
        acc = acc * LogComplex::new(2.0 * fact - lg.re, -lg.im);
    }
    Ok(acc)
}
