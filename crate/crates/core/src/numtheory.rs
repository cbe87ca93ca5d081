//! Exact integer arithmetic behind every phase computation.
//!
//! Phases of the form `2π m^n N / l` are never evaluated in floating point.
//! Instead the numerator `(m^n · N) mod l` is computed exactly, modular-first:
//! `m` and `N` are reduced modulo `l` before any multiplication, so the
//! intermediate values stay within a double machine word whenever `l < 2^64`.
//! Only the reduced fraction in `[0, 1)` ever reaches a trigonometric function.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest integer below which every `u64` converts to `f64` exactly.
const EXACT_F64_LIMIT: u64 = 1 << 53;

/// Largest input accepted by [`brute_force_factorize`].
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000_000_000_000_000;

/// An arbitrary-precision non-negative integer.
///
/// Parses from and prints to plain decimal, so 17-digit (and longer) inputs
/// round-trip exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Natural(BigUint);

impl Natural {
    pub fn new(value: BigUint) -> Self {
        Natural(value)
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `self mod modulus` without allocating.
    ///
    /// # Panics
    ///
    /// Panics if `modulus` is zero.
    pub fn rem_u64(&self, modulus: u64) -> u64 {
        assert!(modulus != 0, "modulus must be non-zero");
        let m = u128::from(modulus);
        let mut r: u128 = 0;
        for digit in self.0.iter_u64_digits().rev() {
            r = ((r << 64) | u128::from(digit)) % m;
        }
        r as u64
    }

    /// `self + offset`.
    pub fn add_u64(&self, offset: u64) -> Natural {
        Natural(&self.0 + offset)
    }
}

impl From<u64> for Natural {
    fn from(v: u64) -> Self {
        Natural(BigUint::from(v))
    }
}

impl From<u32> for Natural {
    fn from(v: u32) -> Self {
        Natural(BigUint::from(v))
    }
}

impl From<u128> for Natural {
    fn from(v: u128) -> Self {
        Natural(BigUint::from(v))
    }
}

impl From<BigUint> for Natural {
    fn from(v: BigUint) -> Self {
        Natural(v)
    }
}

impl FromStr for Natural {
    type Err = Error;

    /// Accepts plain ASCII decimal digits only: no sign, separators or
    /// whitespace.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::ParseNatural(s.to_string()));
        }
        BigUint::parse_bytes(s.as_bytes(), 10)
            .map(Natural)
            .ok_or_else(|| Error::ParseNatural(s.to_string()))
    }
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for Natural {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Natural {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The exact fractional content `(m^n · N mod l) / l` of one phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseFraction {
    numerator: Natural,
    denominator: Natural,
}

impl PhaseFraction {
    pub fn numerator(&self) -> &Natural {
        &self.numerator
    }

    pub fn denominator(&self) -> &Natural {
        &self.denominator
    }

    /// The fraction as a real in `[0, 1)`, within one ulp.
    pub fn as_real(&self) -> f64 {
        ratio_to_f64(self.numerator.as_biguint(), self.denominator.as_biguint())
    }
}

/// `ε(N, l)`: the signed distance of `2N/l` from its nearest even integer.
///
/// Stored exactly as `numerator / l` together with its real value. The tie
/// `2N/l` halfway between two even integers resolves to `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Epsilon {
    numerator: BigInt,
    denominator: Natural,
    value: f64,
}

impl Epsilon {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact_numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exact_denominator(&self) -> &Natural {
        &self.denominator
    }

    /// Exact test for a true factor.
    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// The even integer `2k` closest to `2N/l`, recovered from `N`.
    pub fn nearest_even(&self, n: &Natural) -> BigInt {
        let two_n = BigInt::from_biguint(Sign::Plus, n.as_biguint() * 2u32);
        let l = BigInt::from_biguint(Sign::Plus, self.denominator.as_biguint().clone());
        (two_n - &self.numerator) / l
    }
}

/// A trial factor prepared for repeated evaluation of `(m^n · N) mod l`.
///
/// Holds `N mod l` so each term costs only a modular exponentiation of `m`.
#[derive(Debug, Clone)]
pub(crate) enum PreparedTrial {
    Word { l: u64, n_mod_l: u64 },
    Wide { l: BigUint, n_mod_l: BigUint },
}

impl PreparedTrial {
    pub(crate) fn new(n: &Natural, l: &Natural) -> Result<Self> {
        if l.is_zero() {
            return Err(Error::ZeroModulus);
        }
        Ok(match l.to_u64() {
            Some(l) => PreparedTrial::Word {
                l,
                n_mod_l: n.rem_u64(l),
            },
            None => PreparedTrial::Wide {
                n_mod_l: n.as_biguint() % l.as_biguint(),
                l: l.as_biguint().clone(),
            },
        })
    }

    pub(crate) fn divides(&self) -> bool {
        match self {
            PreparedTrial::Word { n_mod_l, .. } => *n_mod_l == 0,
            PreparedTrial::Wide { n_mod_l, .. } => n_mod_l.is_zero(),
        }
    }

    /// `(m^order · N) mod l` as a fraction of `l`, in `[0, 1)`.
    pub(crate) fn unit_phase(&self, m: u64, order: u32) -> f64 {
        match self {
            PreparedTrial::Word { l, n_mod_l } => {
                if *n_mod_l == 0 {
                    return 0.0;
                }
                let r = mul_mod(pow_mod(m % l, order, *l), *n_mod_l, *l);
                word_ratio(r, *l)
            }
            PreparedTrial::Wide { l, n_mod_l } => {
                let r = BigUint::from(m).modpow(&BigUint::from(order), l) * n_mod_l % l;
                ratio_to_f64(&r, l)
            }
        }
    }

    fn numerator(&self, m: u64, order: u32) -> Natural {
        match self {
            PreparedTrial::Word { l, n_mod_l } => Natural::from(mul_mod(pow_mod(m % l, order, *l), *n_mod_l, *l)),
            PreparedTrial::Wide { l, n_mod_l } => {
                Natural(BigUint::from(m).modpow(&BigUint::from(order), l) * n_mod_l % l)
            }
        }
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    if modulus <= u64::from(u32::MAX) {
        // both operands are already reduced below 2^32
        a * b % modulus
    } else {
        (u128::from(a) * u128::from(b) % u128::from(modulus)) as u64
    }
}

/// `base^exp mod modulus` by square-and-multiply; `base` must be reduced.
#[inline]
fn pow_mod(base: u64, mut exp: u32, modulus: u64) -> u64 {
    let mut result = 1 % modulus;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, modulus);
        }
        exp >>= 1;
        if exp > 0 {
            b = mul_mod(b, b, modulus);
        }
    }
    result
}

/// `r / l` for `r < l`, within one ulp.
#[inline]
fn word_ratio(r: u64, l: u64) -> f64 {
    if l <= EXACT_F64_LIMIT {
        r as f64 / l as f64
    } else {
        ratio_to_f64(&BigUint::from(r), &BigUint::from(l))
    }
}

/// `num / den` rounded to within one ulp for arbitrary-size operands.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if let (Some(a), Some(b)) = (num.to_u64(), den.to_u64()) {
        if a <= EXACT_F64_LIMIT && b <= EXACT_F64_LIMIT {
            return a as f64 / b as f64;
        }
    }
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient carries at least 64 significant bits;
    // truncating it then costs far less than half an ulp.
    let shift = (den.bits() + 64).saturating_sub(num.bits());
    let q = (num << shift) / den;
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    scale_by_pow2(mantissa, -(shift as i64))
}

fn scale_by_pow2(mut x: f64, mut exp: i64) -> f64 {
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

/// `(m^n · N mod l) / l`, computed modular-first.
pub fn phase_fraction(m: u64, order: u32, n: &Natural, l: &Natural) -> Result<PhaseFraction> {
    if order < 2 {
        return Err(Error::InvalidOrder { order });
    }
    let trial = PreparedTrial::new(n, l)?;
    Ok(PhaseFraction {
        numerator: trial.numerator(m, order),
        denominator: l.clone(),
    })
}

/// `ε(N, l) = 2N/l − 2k` with `2k` the nearest even integer, in `(−1, 1]`.
pub fn epsilon(n: &Natural, l: &Natural) -> Result<Epsilon> {
    if l.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let (numerator, value) = match l.to_u64() {
        Some(lw) => {
            let t = n.rem_u64(lw) as i128;
            let lw = lw as i128;
            let num = if 2 * t <= lw { 2 * t } else { 2 * t - 2 * lw };
            let value = if lw <= EXACT_F64_LIMIT as i128 {
                num as f64 / lw as f64
            } else {
                signed_ratio(&BigInt::from(num), l.as_biguint())
            };
            (BigInt::from(num), value)
        }
        None => {
            let lb = BigInt::from_biguint(Sign::Plus, l.as_biguint().clone());
            let t = BigInt::from_biguint(Sign::Plus, n.as_biguint() % l.as_biguint());
            let two_t = &t * 2;
            let num = if two_t <= lb { two_t } else { two_t - &lb * 2 };
            let value = signed_ratio(&num, l.as_biguint());
            (num, value)
        }
    };
    Ok(Epsilon {
        numerator,
        denominator: l.clone(),
        value,
    })
}

fn signed_ratio(num: &BigInt, den: &BigUint) -> f64 {
    let magnitude = ratio_to_f64(num.magnitude(), den);
    if num.sign() == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}

/// Whether `l` divides `N`.
pub fn is_factor(n: &Natural, l: &Natural) -> Result<bool> {
    Ok(PreparedTrial::new(n, l)?.divides())
}

/// Prime factorization by trial division, smallest factor first.
///
/// Test oracle only: accepts `2 ≤ N ≤ 10^18`.
pub fn brute_force_factorize(n: &Natural) -> Result<Vec<Natural>> {
    let mut rest = match n.to_u64() {
        Some(v) if v < 2 => return Err(Error::FactorInputTooSmall { n: n.to_string() }),
        Some(v) if v <= TRIAL_DIVISION_LIMIT => v,
        _ => return Err(Error::FactorInputTooLarge { n: n.to_string() }),
    };
    let mut factors = Vec::new();
    while rest % 2 == 0 {
        factors.push(Natural::from(2u64));
        rest /= 2;
    }
    let mut d = 3u64;
    while d <= rest / d {
        while rest % d == 0 {
            factors.push(Natural::from(d));
            rest /= d;
        }
        d += 2;
    }
    if rest > 1 {
        factors.push(Natural::from(rest));
    }
    Ok(factors)
}
