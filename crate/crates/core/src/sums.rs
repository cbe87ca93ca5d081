//! Gauss sums and their relatives: complete, truncated (any order n ≥ 2),
//! randomized, and the normalized curlicue function.
//!
//! Every sum is normalized by its term count and accumulated in ascending
//! term order with Neumaier-compensated summation on each component.

use std::f64::consts::{PI, TAU};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{self, Natural, PreparedTrial};
use crate::rng::sample_without_replacement;

/// Default ceiling on `l` for complete sums, which cost `l` terms each.
pub const COMPLETE_SUM_CAP: u64 = 10_000_000;

/// How the terms of a sum are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Consecutive terms `m = 0..=truncation`.
    Full { truncation: u64 },
    /// All `l` residues, `m = 0..l`.
    Complete,
    /// `count` distinct terms drawn from `[0, m_max]`.
    Randomized { count: u64, m_max: u64, seed: u64 },
}

/// Which sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumSpec {
    pub order: u32,
    pub strategy: Strategy,
}

impl SumSpec {
    pub fn full(order: u32, truncation: u64) -> Result<Self> {
        SumSpec {
            order,
            strategy: Strategy::Full { truncation },
        }
        .validated()
    }

    pub fn complete() -> Self {
        SumSpec {
            order: 2,
            strategy: Strategy::Complete,
        }
    }

    pub fn randomized(order: u32, count: u64, m_max: u64, seed: u64) -> Result<Self> {
        SumSpec {
            order,
            strategy: Strategy::Randomized { count, m_max, seed },
        }
        .validated()
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidOrder { order: self.order });
        }
        match self.strategy {
            Strategy::Full { .. } => Ok(()),
            Strategy::Complete if self.order != 2 => Err(Error::CompleteRequiresQuadratic { order: self.order }),
            Strategy::Complete => Ok(()),
            Strategy::Randomized { count, m_max, .. } => {
                if count == 0 {
                    Err(Error::EmptySample)
                } else if m_max == u64::MAX || count > m_max + 1 {
                    Err(Error::SampleTooLarge { count, m_max })
                } else {
                    Ok(())
                }
            }
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn seed(&self) -> Option<u64> {
        match self.strategy {
            Strategy::Randomized { seed, .. } => Some(seed),
            _ => None,
        }
    }

    /// The `m` values this spec sums over for trial factor `l`, in summation
    /// order.
    pub fn term_indices(&self, l: &Natural) -> Result<Vec<u64>> {
        self.validate()?;
        match self.strategy {
            Strategy::Full { truncation } => Ok((0..=truncation).collect()),
            Strategy::Complete => Ok((0..complete_length(l, Some(COMPLETE_SUM_CAP))?).collect()),
            Strategy::Randomized { count, m_max, seed } => sample_without_replacement(count, m_max, seed),
        }
    }
}

/// A normalized complex sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumValue {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub term_count: u64,
}

impl SumValue {
    pub fn new(re: f64, im: f64, term_count: u64) -> Self {
        SumValue {
            re,
            im,
            magnitude: re.hypot(im),
            term_count,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    re: f64,
    re_err: f64,
    im: f64,
    im_err: f64,
    count: u64,
}

#[inline]
fn neumaier(sum: &mut f64, err: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *err += (*sum - t) + x;
    } else {
        *err += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_err, z.re);
        neumaier(&mut self.im, &mut self.im_err, z.im);
        self.count += 1;
    }

    pub(crate) fn total(&self) -> Complex64 {
        Complex64::new(self.re + self.re_err, self.im + self.im_err)
    }

    /// The running sum divided by its term count.
    pub(crate) fn normalized(&self) -> SumValue {
        let total = self.total();
        let n = self.count.max(1) as f64;
        SumValue::new(total.re / n, total.im / n, self.count)
    }
}

/// `exp(2πi f)` for a unit phase `f ∈ [0, 1)`, evaluated on `(−½, ½]`.
#[inline]
pub(crate) fn unit_phasor(f: f64) -> Complex64 {
    if f == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let centered = if f > 0.5 { f - 1.0 } else { f };
    let (s, c) = (TAU * centered).sin_cos();
    Complex64::new(c, s)
}

/// One term `exp(2πi m^n N / l)` of a prepared trial factor.
#[inline]
pub(crate) fn gauss_term(trial: &PreparedTrial, m: u64, order: u32) -> Complex64 {
    unit_phasor(trial.unit_phase(m, order))
}

fn sum_over<I: IntoIterator<Item = u64>>(trial: &PreparedTrial, order: u32, ms: I) -> SumValue {
    let mut acc = CompensatedSum::default();
    for m in ms {
        acc.add(gauss_term(trial, m, order));
    }
    acc.normalized()
}

fn check_order(order: u32) -> Result<()> {
    if order < 2 {
        Err(Error::InvalidOrder { order })
    } else {
        Ok(())
    }
}

fn complete_length(l: &Natural, cap: Option<u64>) -> Result<u64> {
    if l.is_zero() {
        return Err(Error::ZeroModulus);
    }
    match (l.to_u64(), cap) {
        (Some(lw), Some(cap)) if lw <= cap => Ok(lw),
        (Some(lw), None) => Ok(lw),
        _ => Err(Error::CompleteTooLarge {
            l: l.to_string(),
            cap: cap.unwrap_or(u64::MAX),
        }),
    }
}

/// `(1/l) Σ_{m=0}^{l−1} exp(2πi m² N / l)`, capped at `l ≤ 10^7`.
pub fn complete_gauss_sum(n: &Natural, l: &Natural) -> Result<SumValue> {
    complete_gauss_sum_with_cap(n, l, Some(COMPLETE_SUM_CAP))
}

/// As [`complete_gauss_sum`] with an explicit cap; `None` lifts it.
pub fn complete_gauss_sum_with_cap(n: &Natural, l: &Natural, cap: Option<u64>) -> Result<SumValue> {
    let len = complete_length(l, cap)?;
    let trial = PreparedTrial::new(n, l)?;
    Ok(sum_over(&trial, 2, 0..len))
}

/// `(1/(M+1)) Σ_{m=0}^{M} exp(2πi m^n N / l)`.
pub fn truncated_sum(n: &Natural, l: &Natural, order: u32, truncation: u64) -> Result<SumValue> {
    check_order(order)?;
    let trial = PreparedTrial::new(n, l)?;
    Ok(sum_over(&trial, order, 0..=truncation))
}

/// `(1/k) Σ exp(2πi m^n N / l)` over `k` distinct seeded draws from `[0, m_max]`.
pub fn randomized_sum(n: &Natural, l: &Natural, order: u32, count: u64, m_max: u64, seed: u64) -> Result<SumValue> {
    check_order(order)?;
    let trial = PreparedTrial::new(n, l)?;
    let ms = sample_without_replacement(count, m_max, seed)?;
    Ok(sum_over(&trial, order, ms))
}

/// Evaluates the sum selected by `spec` at trial factor `l`.
pub fn evaluate(n: &Natural, l: &Natural, spec: &SumSpec) -> Result<SumValue> {
    spec.validate()?;
    match spec.strategy {
        Strategy::Full { truncation } => truncated_sum(n, l, spec.order, truncation),
        Strategy::Complete => complete_gauss_sum(n, l),
        Strategy::Randomized { count, m_max, seed } => randomized_sum(n, l, spec.order, count, m_max, seed),
    }
}

/// A finite double split as `sign · mantissa · 2^exponent` with an odd
/// mantissa.
fn decompose(x: f64) -> (bool, u64, i32) {
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let fraction = bits & ((1 << 52) - 1);
    let (mut mantissa, mut exponent) = if biased == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1 << 52), biased - 1075)
    };
    let tz = mantissa.trailing_zeros();
    mantissa >>= tz;
    exponent += tz as i32;
    (negative, mantissa, exponent)
}

/// `exp(iπ m^n ε)` with `m^n ε` reduced modulo 2 exactly.
///
/// `ε` is a dyadic rational `s · 2^e`, so `m^n ε mod 2` only needs
/// `m^n s mod 2^(1−e)`, which is exact integer arithmetic. Large `m^n`
/// therefore never loses the phase.
pub(crate) fn curlicue_term(epsilon: f64, m: u64, order: u32) -> Complex64 {
    if epsilon == 0.0 || m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (negative, mantissa, exponent) = decompose(epsilon);
    if exponent >= 1 {
        // m^n ε is an even integer
        return Complex64::new(1.0, 0.0);
    }
    let bits = (1 - exponent) as u32;
    // half_turns = (m^n · mantissa mod 2^bits) / 2^(bits − 1), in [0, 2)
    let half_turns = if bits <= 128 {
        let mut power: u128 = 1;
        for _ in 0..order {
            power = power.wrapping_mul(u128::from(m));
        }
        let mut r = power.wrapping_mul(u128::from(mantissa));
        if bits < 128 {
            r &= (1u128 << bits) - 1;
        }
        r as f64 * 2f64.powi(exponent)
    } else {
        let modulus = BigUint::from(1u8) << bits;
        let r = BigUint::from(m).modpow(&BigUint::from(order), &modulus) * mantissa % &modulus;
        let drop = u64::from(bits - 1 - 64);
        (r >> drop).to_f64().unwrap_or(0.0) * 2f64.powi(-64)
    };
    let centered = if half_turns > 1.0 { half_turns - 2.0 } else { half_turns };
    let signed = if negative { -centered } else { centered };
    let (s, c) = (PI * signed).sin_cos();
    Complex64::new(c, s)
}

/// The normalized curlicue function `(1/(M+1)) Σ_{m=0}^{M} exp(iπ m^n ε)`.
pub fn curlicue(epsilon: f64, order: u32, truncation: u64) -> Result<SumValue> {
    check_order(order)?;
    if !epsilon.is_finite() {
        return Err(Error::NonFinite(epsilon));
    }
    let mut acc = CompensatedSum::default();
    for m in 0..=truncation {
        acc.add(curlicue_term(epsilon, m, order));
    }
    Ok(acc.normalized())
}

/// Checks `A_N^M(l) = s_M(ε(N, l))` componentwise to `1e-9` for the quadratic
/// sum.
pub fn curlicue_equivalence_check(n: &Natural, l: &Natural, order: u32, truncation: u64) -> Result<bool> {
    if order != 2 {
        return Err(Error::NotQuadratic { order });
    }
    let direct = truncated_sum(n, l, order, truncation)?;
    let eps = numtheory::epsilon(n, l)?;
    let via_curlicue = curlicue(eps.value(), order, truncation)?;
    Ok((direct.re - via_curlicue.re).abs() < 1e-9 && (direct.im - via_curlicue.im).abs() < 1e-9)
}
