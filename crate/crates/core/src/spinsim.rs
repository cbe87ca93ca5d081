//! Spin-1/2 simulation of the pulse-sequence realization of a Gauss sum.
//!
//! Each term `m` of a sum becomes an rf pulse with flip angle `θ` and phase
//! `φ_m = 2π (m^n N mod l) / l`, acting in the rotating frame as
//! `U_m = exp(−iθ(I_x cos φ_m + I_y sin φ_m))`. The train `U_M ⋯ U_0` is
//! applied to the thermal state and the transverse magnetization is read out.
//! Inter-pulse delays are on resonance and relaxation is not modeled, so they
//! act as the identity.

use std::f64::consts::{FRAC_PI_2, TAU};

use log::warn;
use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numtheory::{Natural, PreparedTrial};
use crate::sums::{self, SumSpec};

pub type Operator = Matrix2<Complex64>;

/// Total rotation `θ · terms` above which a warning is logged.
pub const SMALL_ANGLE_WARN: f64 = 0.5;

const STATE_TOLERANCE: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn ix() -> Operator {
    Operator::new(c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0))
}

pub fn iy() -> Operator {
    Operator::new(c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0))
}

pub fn iz() -> Operator {
    Operator::new(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0))
}

/// One rf pulse: flip angle and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    theta: f64,
    phase: f64,
}

impl PulseSpec {
    /// `phase` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phase: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidFlipAngle(theta));
        }
        if !phase.is_finite() {
            return Err(Error::NonFinite(phase));
        }
        let mut phase = phase.rem_euclid(TAU);
        if phase >= TAU {
            phase = 0.0;
        }
        Ok(PulseSpec { theta, phase })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub pulses: Vec<PulseSpec>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<PulseSpec>) -> Self {
        PulseSequence { pulses }
    }

    /// Pulses for the terms of `spec` at trial factor `l`, in summation order.
    pub fn from_spec(n: &Natural, l: &Natural, spec: &SumSpec, theta: f64) -> Result<Self> {
        let trial = PreparedTrial::new(n, l)?;
        let pulses = spec
            .term_indices(l)?
            .into_iter()
            .map(|m| PulseSpec::new(theta, TAU * trial.unit_phase(m, spec.order)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PulseSequence { pulses })
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Total nominal rotation `Σ θ`, i.e. `θ(M+1)` for equal flip angles.
    pub fn total_rotation(&self) -> f64 {
        self.pulses.iter().map(|p| p.theta).sum()
    }
}

/// A spin-1/2 density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    rho: Operator,
}

impl SpinState {
    /// Validates Hermiticity, unit trace and positivity to `1e-10`.
    pub fn new(rho: Operator) -> Result<Self> {
        let state = SpinState { rho };
        state.check(STATE_TOLERANCE)?;
        Ok(state)
    }

    /// High-temperature thermal state `1/2 + p I_z` with full polarization
    /// `p = 1`. Normalized signals do not depend on `p`.
    pub fn thermal() -> Self {
        SpinState {
            rho: Operator::identity() * c(0.5, 0.0) + iz(),
        }
    }

    pub fn rho(&self) -> &Operator {
        &self.rho
    }

    pub fn expectation(&self, op: &Operator) -> f64 {
        (self.rho * op).trace().re
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.rho[(0, 0)].re;
        let d = self.rho[(1, 1)].re;
        let b = self.rho[(0, 1)];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    pub fn check(&self, tolerance: f64) -> Result<()> {
        if self.rho.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidState("non-finite entry".to_string()));
        }
        let hermitian_gap = (self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if hermitian_gap > tolerance {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {hermitian_gap:e})"
            )));
        }
        let trace = self.rho.trace();
        if (trace.re - 1.0).abs() > tolerance || trace.im.abs() > tolerance {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let (lo, hi) = self.eigenvalues();
        if lo < -tolerance || hi > 1.0 + tolerance {
            return Err(Error::InvalidState(format!("eigenvalues ({lo}, {hi}) outside [0, 1]")));
        }
        Ok(())
    }
}

/// Transverse magnetization after a pulse train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationReading {
    pub mx: f64,
    pub my: f64,
    pub transverse_magnitude: f64,
    /// Transverse magnitude divided by the exact response of a true factor,
    /// `(1/2)|sin(θ · terms)|`; a true factor reads 1.
    pub normalized_signal: f64,
}

/// `exp(−iθ(I_x cos φ + I_y sin φ)) = cos(θ/2) 1 − i sin(θ/2)(σ_x cos φ + σ_y sin φ)`.
pub fn pulse_propagator(pulse: &PulseSpec) -> Operator {
    let (s, co) = (0.5 * pulse.theta).sin_cos();
    let (sp, cp) = pulse.phase.sin_cos();
    // −i s e^{∓iφ} = −s sin φ − i s cos φ  /  s sin φ − i s cos φ
    Operator::new(c(co, 0.0), c(-s * sp, -s * cp), c(s * sp, -s * cp), c(co, 0.0))
}

/// The ordered product `U_M ⋯ U_0` of a sequence.
pub fn sequence_propagator(seq: &PulseSequence) -> Operator {
    seq.pulses
        .iter()
        .fold(Operator::identity(), |acc, p| pulse_propagator(p) * acc)
}

/// `ρ' = U ρ U†` with `U = U_M ⋯ U_0`.
pub fn apply_sequence(seq: &PulseSequence, initial: &SpinState) -> Result<SpinState> {
    initial.check(STATE_TOLERANCE)?;
    let u = sequence_propagator(seq);
    Ok(SpinState {
        rho: u * initial.rho * u.adjoint(),
    })
}

fn check_small_angle(theta: f64, terms: u64) -> Result<()> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidFlipAngle(theta));
    }
    let total = theta * terms as f64;
    if total > FRAC_PI_2 {
        return Err(Error::FlipAngleTooLarge { theta, terms });
    }
    if total > SMALL_ANGLE_WARN {
        warn!("total rotation {total:.3} rad exceeds the small-angle regime ({SMALL_ANGLE_WARN} rad)");
    }
    Ok(())
}

/// Runs the pulse train for `spec` at trial factor `l` on the thermal state.
pub fn simulate_experiment(n: &Natural, l: &Natural, spec: &SumSpec, theta: f64) -> Result<MagnetizationReading> {
    spec.validate()?;
    let terms = spec.term_indices(l)?.len() as u64;
    check_small_angle(theta, terms)?;
    let seq = PulseSequence::from_spec(n, l, spec, theta)?;
    let state = apply_sequence(&seq, &SpinState::thermal())?;
    let mx = state.expectation(&ix());
    let my = state.expectation(&iy());
    let transverse_magnitude = mx.hypot(my);
    let reference = 0.5 * (terms as f64 * theta).sin().abs();
    Ok(MagnetizationReading {
        mx,
        my,
        transverse_magnitude,
        normalized_signal: transverse_magnitude / reference,
    })
}

/// `|normalized_signal − |analytic sum||` for the same spec.
pub fn small_angle_error(n: &Natural, l: &Natural, spec: &SumSpec, theta: f64) -> Result<f64> {
    let reading = simulate_experiment(n, l, spec, theta)?;
    let analytic = sums::evaluate(n, l, spec)?;
    Ok((reading.normalized_signal - analytic.magnitude).abs())
}
