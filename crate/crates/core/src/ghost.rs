//! Trial-factor classification, ghost-factor suppression and truncation
//! scaling studies.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{self, Epsilon, Natural, PreparedTrial};
use crate::sums::{self, curlicue_term, gauss_term, CompensatedSum, SumSpec, SumValue};

/// The decision threshold separating factor-like sums from suppressed ones.
pub const GHOST_THRESHOLD: f64 = FRAC_1_SQRT_2;

/// Slack above the threshold before a non-factor counts as a ghost.
pub const GHOST_SLACK: f64 = 1e-9;

/// Half-width of the band around the threshold for threshold non-factors.
pub const THRESHOLD_BAND: f64 = 1e-3;

/// Default upper bound for [`min_suppression_m`] searches.
pub const DEFAULT_M_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrialClass {
    Factor,
    GhostFactor,
    ThresholdNonFactor,
    TypicalNonFactor,
}

impl TrialClass {
    /// Class of a trial with the given exact factor test and sum magnitude.
    pub fn from_magnitude(is_factor: bool, magnitude: f64) -> TrialClass {
        if is_factor {
            TrialClass::Factor
        } else if magnitude > GHOST_THRESHOLD + GHOST_SLACK {
            TrialClass::GhostFactor
        } else if (magnitude - GHOST_THRESHOLD).abs() <= THRESHOLD_BAND {
            TrialClass::ThresholdNonFactor
        } else {
            TrialClass::TypicalNonFactor
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TrialClass::Factor => "Factor",
            TrialClass::GhostFactor => "GhostFactor",
            TrialClass::ThresholdNonFactor => "ThresholdNonFactor",
            TrialClass::TypicalNonFactor => "TypicalNonFactor",
        }
    }
}

impl fmt::Display for TrialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrialClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Factor" => Ok(TrialClass::Factor),
            "GhostFactor" => Ok(TrialClass::GhostFactor),
            "ThresholdNonFactor" => Ok(TrialClass::ThresholdNonFactor),
            "TypicalNonFactor" => Ok(TrialClass::TypicalNonFactor),
            other => Err(format!("unknown trial class {other:?}")),
        }
    }
}

/// One evaluated trial factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedTrial {
    pub l: Natural,
    pub epsilon: Epsilon,
    pub sum: SumValue,
    pub class: TrialClass,
    pub spec: SumSpec,
}

pub fn classify(n: &Natural, l: &Natural, spec: &SumSpec) -> Result<ClassifiedTrial> {
    if l.to_u64().is_some_and(|v| v < 2) {
        return Err(Error::TrialFactorTooSmall { l: l.to_string() });
    }
    let epsilon = numtheory::epsilon(n, l)?;
    let sum = sums::evaluate(n, l, spec)?;
    let class = TrialClass::from_magnitude(epsilon.is_zero(), sum.magnitude);
    Ok(ClassifiedTrial {
        l: l.clone(),
        epsilon,
        sum,
        class,
        spec: *spec,
    })
}

fn window_len(l_min: &Natural, l_max: &Natural) -> Result<u64> {
    let invalid = || Error::InvalidWindow {
        l_min: l_min.to_string(),
        l_max: l_max.to_string(),
    };
    if l_min.to_u64().is_some_and(|v| v < 2) || l_min > l_max {
        return Err(invalid());
    }
    let span = Natural::new(l_max.as_biguint() - l_min.as_biguint());
    span.to_u64().and_then(|s| s.checked_add(1)).ok_or_else(invalid)
}

/// Classifies every `l` in `[l_min, l_max]`, ordered by `l`.
pub fn scan_window(n: &Natural, l_min: &Natural, l_max: &Natural, spec: &SumSpec) -> Result<Vec<ClassifiedTrial>> {
    let len = window_len(l_min, l_max)?;
    spec.validate()?;
    (0..len)
        .into_par_iter()
        .map(|offset| classify(n, &l_min.add_u64(offset), spec))
        .collect()
}

/// Smallest `M ≤ m_cap` with `|s_M^(n)(ε)| ≤ threshold`, or `None`.
///
/// Searches upward from `M = 0`: the magnitude oscillates in `M`, so the first
/// crossing is the quantity of interest and bisection would not find it.
pub fn min_suppression_m(epsilon: f64, order: u32, threshold: f64, m_cap: u64) -> Result<Option<u64>> {
    if order < 2 {
        return Err(Error::InvalidOrder { order });
    }
    if !epsilon.is_finite() {
        return Err(Error::NonFinite(epsilon));
    }
    if epsilon == 0.0 {
        return Err(Error::ZeroEpsilon);
    }
    if m_cap < 1 {
        return Err(Error::InvalidCap);
    }
    let mut acc = CompensatedSum::default();
    for m in 0..=m_cap {
        acc.add(curlicue_term(epsilon, m, order));
        if acc.normalized().magnitude <= threshold {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Truncation `M = ⌈ln N⌉`, the logarithmic rule of earlier experiments.
pub fn ln_truncation(n: &Natural) -> u64 {
    let bits = n.as_biguint().bits();
    let ln = if bits <= 1000 {
        n.to_f64().ln()
    } else {
        // ln N = ln(N / 2^k) + k ln 2
        let shift = bits - 64;
        Natural::new(n.as_biguint() >> shift).to_f64().ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln.ceil().max(0.0) as u64
}

/// One number to factor with its trial-factor window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingCase {
    pub n: Natural,
    pub l_min: Natural,
    pub l_max: Natural,
}

impl ScalingCase {
    pub fn new(n: Natural, l_min: Natural, l_max: Natural) -> Self {
        ScalingCase { n, l_min, l_max }
    }
}

/// Result of a scaling study for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: Natural,
    pub order: u32,
    /// ε of the non-factor closest to a factor (smallest `|ε|`), if any.
    pub worst_epsilon: Option<f64>,
    /// Smallest `M` at which every non-factor in the window sits at or below
    /// the threshold.
    pub required_m: Option<u64>,
    /// `N^(1/2n)`, the predicted scale of `required_m`.
    pub root: f64,
}

fn scale_case(case: &ScalingCase, order: u32, threshold: f64, m_cap: u64) -> Result<ScalingRow> {
    let len = window_len(&case.l_min, &case.l_max)?;
    let mut trials = Vec::new();
    let mut worst: Option<f64> = None;
    for offset in 0..len {
        let l = case.l_min.add_u64(offset);
        let trial = PreparedTrial::new(&case.n, &l)?;
        if trial.divides() {
            continue;
        }
        let eps = numtheory::epsilon(&case.n, &l)?.value();
        if worst.is_none_or(|w| eps.abs() < w.abs()) {
            worst = Some(eps);
        }
        trials.push((trial, CompensatedSum::default()));
    }

    let mut required_m = None;
    for m in 0..=m_cap {
        let mut all_below = true;
        for (trial, acc) in trials.iter_mut() {
            acc.add(gauss_term(trial, m, order));
            all_below &= acc.normalized().magnitude <= threshold;
        }
        if all_below {
            required_m = Some(m);
            break;
        }
    }

    Ok(ScalingRow {
        n: case.n.clone(),
        order,
        worst_epsilon: worst,
        required_m,
        root: case.n.to_f64().powf(1.0 / (2.0 * f64::from(order))),
    })
}

/// For each case, the smallest truncation that pushes every non-factor in the
/// window below `threshold`, reported alongside `N^(1/2n)`.
pub fn scaling_study(cases: &[ScalingCase], order: u32, threshold: f64, m_cap: u64) -> Result<Vec<ScalingRow>> {
    if cases.is_empty() {
        return Err(Error::EmptyCases);
    }
    if order < 2 {
        return Err(Error::InvalidOrder { order });
    }
    if m_cap < 1 {
        return Err(Error::InvalidCap);
    }
    cases
        .par_iter()
        .map(|case| scale_case(case, order, threshold, m_cap))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::Strategy;

    fn nat(s: &str) -> Natural {
        s.parse().unwrap()
    }

    #[test]
    fn classify_examples() {
        let n = nat("1689259081189");
        let spec = SumSpec::full(2, 19).unwrap();
        assert_eq!(classify(&n, &nat("1299709"), &spec).unwrap().class, TrialClass::Factor);
        assert_eq!(
            classify(&n, &nat("1299711"), &spec).unwrap().class,
            TrialClass::GhostFactor
        );
        let t = classify(&nat("15"), &nat("4"), &SumSpec::complete()).unwrap();
        assert_eq!(t.class, TrialClass::ThresholdNonFactor);
        assert!(matches!(
            classify(&n, &nat("1"), &spec),
            Err(Error::TrialFactorTooSmall { .. })
        ));
    }

    #[test]
    fn class_rules() {
        assert_eq!(TrialClass::from_magnitude(true, 0.0), TrialClass::Factor);
        assert_eq!(TrialClass::from_magnitude(false, 0.99), TrialClass::GhostFactor);
        assert_eq!(
            TrialClass::from_magnitude(false, GHOST_THRESHOLD + 5e-10),
            TrialClass::ThresholdNonFactor
        );
        assert_eq!(
            TrialClass::from_magnitude(false, GHOST_THRESHOLD - 9e-4),
            TrialClass::ThresholdNonFactor
        );
        assert_eq!(TrialClass::from_magnitude(false, 0.7), TrialClass::TypicalNonFactor);
        for c in [
            TrialClass::Factor,
            TrialClass::GhostFactor,
            TrialClass::ThresholdNonFactor,
            TrialClass::TypicalNonFactor,
        ] {
            assert_eq!(c.to_string().parse::<TrialClass>().unwrap(), c);
        }
    }

    #[test]
    fn scan_small_window() {
        let rows = scan_window(&nat("15"), &nat("2"), &nat("4"), &SumSpec::full(2, 4).unwrap()).unwrap();
        let classes: Vec<_> = rows.iter().map(|r| r.class).collect();
        assert_eq!(classes[1], TrialClass::Factor);
        assert_ne!(classes[0], TrialClass::Factor);
        assert_ne!(classes[2], TrialClass::Factor);
        assert_eq!(rows[0].l, nat("2"));
        assert_eq!(rows[2].l, nat("4"));
    }

    #[test]
    fn scan_window_errors() {
        let spec = SumSpec::full(2, 4).unwrap();
        assert!(matches!(
            scan_window(&nat("15"), &nat("5"), &nat("4"), &spec),
            Err(Error::InvalidWindow { .. })
        ));
        assert!(matches!(
            scan_window(&nat("15"), &nat("1"), &nat("4"), &spec),
            Err(Error::InvalidWindow { .. })
        ));
        let bad = SumSpec {
            order: 2,
            strategy: Strategy::Randomized {
                count: 0,
                m_max: 3,
                seed: 0,
            },
        };
        assert_eq!(
            scan_window(&nat("15"), &nat("2"), &nat("4"), &bad),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn fig3_upper_trace_is_all_ghosts() {
        let rows = scan_window(
            &nat("1689259081189"),
            &nat("1299699"),
            &nat("1299731"),
            &SumSpec::full(2, 19).unwrap(),
        )
        .unwrap();
        assert_eq!(rows.len(), 33);
        assert!(rows.iter().all(|r| r.sum.magnitude > GHOST_THRESHOLD));
    }

    #[test]
    fn suppression_examples() {
        assert_eq!(min_suppression_m(1.0, 2, GHOST_THRESHOLD, 100).unwrap(), Some(1));
        let m = min_suppression_m(1e-4, 2, GHOST_THRESHOLD, DEFAULT_M_CAP)
            .unwrap()
            .unwrap();
        assert!((34..=300).contains(&m), "{m}");
        let m2 = min_suppression_m(1e-6, 2, GHOST_THRESHOLD, DEFAULT_M_CAP)
            .unwrap()
            .unwrap();
        let m6 = min_suppression_m(1e-6, 6, GHOST_THRESHOLD, DEFAULT_M_CAP)
            .unwrap()
            .unwrap();
        assert!(m6 < m2);
        assert_eq!(min_suppression_m(1e-9, 2, GHOST_THRESHOLD, 10).unwrap(), None);
    }

    #[test]
    fn suppression_errors() {
        assert_eq!(min_suppression_m(0.0, 2, GHOST_THRESHOLD, 10), Err(Error::ZeroEpsilon));
        assert_eq!(min_suppression_m(0.1, 2, GHOST_THRESHOLD, 0), Err(Error::InvalidCap));
        assert_eq!(
            min_suppression_m(0.1, 1, GHOST_THRESHOLD, 10),
            Err(Error::InvalidOrder { order: 1 })
        );
    }

    #[test]
    fn suppression_is_even_in_epsilon() {
        for eps in [3e-3, 2e-5, 0.4] {
            assert_eq!(
                min_suppression_m(eps, 2, GHOST_THRESHOLD, DEFAULT_M_CAP).unwrap(),
                min_suppression_m(-eps, 2, GHOST_THRESHOLD, DEFAULT_M_CAP).unwrap()
            );
        }
    }

    #[test]
    fn ln_truncation_values() {
        assert_eq!(ln_truncation(&nat("52882363")), 18);
        assert_eq!(ln_truncation(&nat("1")), 0);
        let huge: Natural = format!("1{}", "0".repeat(400)).parse().unwrap();
        assert_eq!(ln_truncation(&huge), (400.0 * std::f64::consts::LN_10).ceil() as u64);
    }

    #[test]
    fn scaling_study_errors() {
        assert_eq!(scaling_study(&[], 2, GHOST_THRESHOLD, 10), Err(Error::EmptyCases));
    }

    #[test]
    fn scaling_study_reports_root() {
        let case = ScalingCase::new(nat("10403"), nat("2"), nat("101"));
        let rows = scaling_study(&[case], 2, GHOST_THRESHOLD, 10_000).unwrap();
        assert!((rows[0].root - 10403f64.powf(0.25)).abs() < 1e-12);
        assert!(rows[0].required_m.is_some());
        assert!(rows[0].worst_epsilon.is_some());
    }
}
