//! Closed-form special functions: Wigner little-d and Big-D, symmetric
//! Kravchuk functions, Clebsch–Gordan coefficients and the RA–MA phase.
//!
//! Spins and magnetic numbers are [`HalfInt`]s, so all index arithmetic is
//! exact. Every function checks its ranges and reports a domain error instead
//! of returning a silent zero.
//!
//! # Evaluation of d^j_{m1,m2}(β)
//!
//! [`wigner_little_d`] uses the Jacobi-polynomial form
//!
//! ```text
//! d^j_{m1,m2}(β) = (−1)^λ √(k!(k+a+b)! / ((k+a)!(k+b)!)) sin^a(β/2) cos^b(β/2) P_k^{(a,b)}(cos β)
//! ```
//!
//! with the Jacobi polynomial from its three-term recurrence. The alternating
//! factorial sum ([`wigner_little_d_sum`]) cancels catastrophically: at
//! j = 31 it already loses seven digits, so it is kept only as a cross-check
//! for small spins. Both are capped at j ≤ 64.
//!
//! # Kravchuk functions
//!
//! Ψ_n(q) is defined by `K Ψ_n = (n − j) Ψ_n` with `K` the pseudo-energy
//! matrix of [`crate::oracle::build_su2_matrices`], unit norm and `Ψ_n(−j) > 0`.
//! This coincides with
//!
//! ```text
//! Ψ_n(q) = d^j_{q, j−n}(π/2) = (−1)^n d^j_{n−j, q}(π/2)
//! ```
//!
//! which is how [`kravchuk_psi`] evaluates it. The oracle tests confirm the
//! identity exhaustively for j ≤ 8.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::linalg::{i_pow, RMatrix};

/// Largest 2j accepted by the little-d and Kravchuk functions.
pub const MAX_TWICE_J: i64 = 128;

/// Largest 2(j1 + j2) accepted by [`clebsch_gordan`].
///
/// Racah's alternating sum stays below 1e−12 absolute error up to
/// j1 = j2 = 16, which covers polar grids up to N = 33.
pub const MAX_TWICE_CG: i64 = 64;

/// An integer or half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn as_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn to_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }

    pub const fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    /// Whether `self − other` is an integer.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::int(n)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Accepts `"3"`, `"3/2"`, `"-1/2"` and decimal forms such as `"1.5"`.
impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an integer or half-integer: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(HalfInt::int(num)),
                "2" => Ok(HalfInt::from_twice(num)),
                _ => Err(bad()),
            };
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(HalfInt::int(n));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let t = 2.0 * x;
        if !t.is_finite() || t.fract() != 0.0 || t.abs() > 1e15 {
            return Err(bad());
        }
        Ok(HalfInt::from_twice(t as i64))
    }
}

/// An angle in radians. Never reduced modulo a period behind the caller's back.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct AngleRad(f64);

impl AngleRad {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(AngleRad(value))
        } else {
            domain(format!("angle must be finite, got {value}"))
        }
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        AngleRad::new(deg.to_radians())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The value, or a domain error if it is not finite.
    pub fn checked(self) -> Result<f64> {
        AngleRad::new(self.0).map(|a| a.0)
    }
}

impl From<f64> for AngleRad {
    fn from(value: f64) -> Self {
        AngleRad(value)
    }
}

/// Accepts `"0.5"`, `"0.5rad"` and `"30deg"`.
impl FromStr for AngleRad {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("not an angle: {s:?}"));
        let (num, deg) = if let Some(v) = t.strip_suffix("deg") {
            (v, true)
        } else if let Some(v) = t.strip_suffix("rad") {
            (v, false)
        } else {
            (t, false)
        };
        let x: f64 = num.trim().parse().map_err(|_| bad())?;
        let a = if deg { AngleRad::from_degrees(x) } else { AngleRad::new(x) };
        a.map_err(|_| bad())
    }
}

fn check_projection(j: HalfInt, m: HalfInt, what: &str) -> Result<()> {
    if j.twice() < 0 {
        return domain(format!("spin must be non-negative, got {j}"));
    }
    if m.abs() > j || !j.same_parity(m) {
        return domain(format!("{what} = {m} is not a projection of spin {j}"));
    }
    Ok(())
}

fn check_little_d_args(j: HalfInt, m1: HalfInt, m2: HalfInt) -> Result<()> {
    check_projection(j, m1, "m1")?;
    check_projection(j, m2, "m2")?;
    if j.twice() > MAX_TWICE_J {
        return Err(Error::Precision(format!(
            "spin {j} exceeds the supported maximum {}",
            HalfInt::from_twice(MAX_TWICE_J)
        )));
    }
    Ok(())
}

/// Jacobi polynomial P_k^{(a,b)}(x) by the standard three-term recurrence.
fn jacobi(k: i64, a: f64, b: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for n in 2..=k {
        let n = n as f64;
        let c = 2.0 * n + a + b;
        let p2 = ((c - 1.0) * (c * (c - 2.0) * x + a * a - b * b) * p1 - 2.0 * (n + a - 1.0) * (n + b - 1.0) * c * p0)
            / (2.0 * n * (n + a + b) * (c - 2.0));
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Wigner little-d function d^j_{m1,m2}(β) = ⟨j m1| e^{−iβJ_y} |j m2⟩.
///
/// Convention check: d^{1/2}_{1/2,−1/2}(β) = −sin(β/2).
pub fn wigner_little_d(j: HalfInt, m1: HalfInt, m2: HalfInt, beta: impl Into<AngleRad>) -> Result<f64> {
    let beta = beta.into().checked()?;
    check_little_d_args(j, m1, m2)?;
    let (jt, at, bt) = (j.twice(), m1.twice(), m2.twice());
    let d = (at - bt) / 2;
    // k = min(j+m2, j−m2, j+m1, j−m1); the branch fixes a and the sign λ.
    let cands = [((jt + bt) / 2, d, d), ((jt - bt) / 2, -d, 0), ((jt + at) / 2, -d, 0), ((jt - at) / 2, d, d)];
    let (k, a, lambda) = cands.iter().copied().fold(cands[0], |best, c| if c.0 < best.0 { c } else { best });
    let b = jt - 2 * k - a;
    let ratio: f64 = (1..=b).map(|i| (k + a + i) as f64 / (k + i) as f64).product();
    let (s, c) = (beta / 2.0).sin_cos();
    let sign = if lambda.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let p = jacobi(k, a as f64, b as f64, beta.cos());
    Ok(sign * ratio.sqrt() * s.powi(a as i32) * c.powi(b as i32) * p)
}

fn ln_factorial(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut f = 1.0_f64;
        let mut out = Vec::with_capacity(171);
        out.push(0.0);
        for k in 1..=170 {
            f *= k as f64;
            out.push(f.ln());
        }
        out
    });
    table[usize::try_from(n).expect("negative factorial argument")]
}

/// d^j_{m1,m2}(β) by the alternating factorial sum, evaluated in the log domain.
///
/// Accurate to about 1e−14 for j ≤ 8 and increasingly poor beyond that; used
/// only to cross-check [`wigner_little_d`].
pub fn wigner_little_d_sum(j: HalfInt, m1: HalfInt, m2: HalfInt, beta: impl Into<AngleRad>) -> Result<f64> {
    let beta = beta.into().checked()?;
    check_little_d_args(j, m1, m2)?;
    let h = |x: HalfInt| x.to_integer().expect("integer by construction");
    let (jp1, jm1, jp2, jm2) = (h(j + m1), h(j - m1), h(j + m2), h(j - m2));
    let d12 = h(m1 - m2);
    let two_j = j.twice();
    let pre = 0.5 * (ln_factorial(jp1) + ln_factorial(jm1) + ln_factorial(jp2) + ln_factorial(jm2));
    let (s, c) = (beta / 2.0).sin_cos();
    let kmin = 0.max(-d12);
    let kmax = jm1.min(jp2);
    let mut total = 0.0;
    for k in kmin..=kmax {
        let ln_mag = pre - ln_factorial(k) - ln_factorial(jp2 - k) - ln_factorial(d12 + k) - ln_factorial(jm1 - k);
        let sign = if (d12 + k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let trig = c.powi((two_j - d12 - 2 * k) as i32) * s.powi((d12 + 2 * k) as i32);
        total += sign * ln_mag.exp() * trig;
    }
    Ok(total)
}

/// Full little-d matrix of spin `j`, rows and columns ordered m = −j … j.
pub fn wigner_d_matrix(j: HalfInt, beta: impl Into<AngleRad>) -> Result<RMatrix> {
    let beta = beta.into();
    let dim = (j.twice() + 1) as usize;
    let mut out = RMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let m1 = HalfInt::from_twice(2 * r as i64 - j.twice());
            let m2 = HalfInt::from_twice(2 * c as i64 - j.twice());
            out[(r, c)] = wigner_little_d(j, m1, m2, beta)?;
        }
    }
    Ok(out)
}

/// Wigner Big-D function e^{−iιω} e^{−iμφ} d^ι_{μ,μ′}(θ) e^{−iμ′ψ}.
pub fn wigner_big_d(
    iota: HalfInt,
    mu: HalfInt,
    mu2: HalfInt,
    omega: impl Into<AngleRad>,
    phi: impl Into<AngleRad>,
    theta: impl Into<AngleRad>,
    psi: impl Into<AngleRad>,
) -> Result<Complex64> {
    let (omega, phi, psi) = (omega.into().checked()?, phi.into().checked()?, psi.into().checked()?);
    let d = wigner_little_d(iota, mu, mu2, theta)?;
    let phase = -(iota.as_f64() * omega + mu.as_f64() * phi + mu2.as_f64() * psi);
    Ok(Complex64::from_polar(d, phase))
}

/// Symmetric Kravchuk function Ψ_n(q) on q ∈ {−j, …, j}, 0 ≤ n ≤ 2j.
pub fn kravchuk_psi(j: HalfInt, n: i64, q: HalfInt) -> Result<f64> {
    if n < 0 || n > j.twice() {
        return domain(format!("Kravchuk index n = {n} outside 0..={}", j.twice()));
    }
    check_projection(j, q, "q")?;
    wigner_little_d(j, q, j - HalfInt::int(n), FRAC_PI_2)
}

/// All Kravchuk functions of spin `j`: rows q = −j … j, columns n = 0 … 2j.
pub fn kravchuk_matrix(j: HalfInt) -> Result<RMatrix> {
    let dim = (j.twice() + 1) as usize;
    let mut out = RMatrix::zeros(dim, dim);
    for r in 0..dim {
        let q = HalfInt::from_twice(2 * r as i64 - j.twice());
        for n in 0..dim {
            out[(r, n)] = kravchuk_psi(j, n as i64, q)?;
        }
    }
    Ok(out)
}

/// Condon–Shortley Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩.
///
/// Racah's single-sum closed form in the log domain. Returns 0 when
/// M ≠ m1 + m2; a triangle violation is a domain error.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    big_j: HalfInt,
    big_m: HalfInt,
) -> Result<f64> {
    check_projection(j1, m1, "m1")?;
    check_projection(j2, m2, "m2")?;
    check_projection(big_j, big_m, "M")?;
    if big_j < (j1 - j2).abs() || big_j > j1 + j2 || !(j1 + j2).same_parity(big_j) {
        return domain(format!("triangle rule violated by ({j1}, {j2}, {big_j})"));
    }
    if j1.twice() + j2.twice() > MAX_TWICE_CG {
        return Err(Error::Precision(format!(
            "Clebsch-Gordan with j1 + j2 = {} exceeds the supported maximum {}",
            j1 + j2,
            HalfInt::from_twice(MAX_TWICE_CG)
        )));
    }
    if big_m != m1 + m2 {
        return Ok(0.0);
    }
    let h = |x: HalfInt| x.to_integer().expect("integer by construction");
    let pre = 0.5
        * (((big_j.twice() + 1) as f64).ln()
            + ln_factorial(h(big_j + j1 - j2))
            + ln_factorial(h(big_j - j1 + j2))
            + ln_factorial(h(j1 + j2 - big_j))
            - ln_factorial(h(j1 + j2 + big_j) + 1)
            + ln_factorial(h(big_j + big_m))
            + ln_factorial(h(big_j - big_m))
            + ln_factorial(h(j1 - m1))
            + ln_factorial(h(j1 + m1))
            + ln_factorial(h(j2 - m2))
            + ln_factorial(h(j2 + m2)));
    let kmin = 0.max(h(j2 - big_j - m1)).max(h(j1 - big_j + m2));
    let kmax = h(j1 + j2 - big_j).min(h(j1 - m1)).min(h(j2 + m2));
    let mut total = 0.0;
    for k in kmin..=kmax {
        let den = ln_factorial(k)
            + ln_factorial(h(j1 + j2 - big_j) - k)
            + ln_factorial(h(j1 - m1) - k)
            + ln_factorial(h(j2 + m2) - k)
            + ln_factorial(h(big_j - j2 + m1) + k)
            + ln_factorial(h(big_j - j1 - m2) + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * (pre - den).exp();
    }
    Ok(total)
}

/// `e^{iπ t/2}` for a half-integer `t`, exact whenever `t` is an integer.
fn quarter_turns(t: HalfInt) -> Complex64 {
    match t.to_integer() {
        Some(n) => i_pow(n),
        None => Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * t.twice() as f64),
    }
}

/// Phase of the RA–MA overlap: (−1)^{j+ρ} exp[iπ(κ + |m| − m)/2].
///
/// For half-integer exponents (−1)^x means e^{iπx}.
pub fn ra_ma_phase(j: HalfInt, rho: i64, kappa: HalfInt, m: HalfInt) -> Result<Complex64> {
    if j.twice() < 0 {
        return domain(format!("spin must be non-negative, got {j}"));
    }
    if rho < 0 || rho > j.twice() {
        return domain(format!("radius ρ = {rho} outside 0..={}", j.twice()));
    }
    if m.abs() > HalfInt::int(rho) {
        return domain(format!("|m| = {} exceeds ρ = {rho}", m.abs()));
    }
    let sign = quarter_turns(HalfInt::from_twice(2 * (j.twice() + 2 * rho)));
    let tail = quarter_turns(kappa + m.abs() - m);
    Ok(sign * tail)
}
