//! The 1-D logistic map `x(k+1) = r·x(k)·(1−x(k))`.
//!
//! Stepping, orbit generation, byte quantization and the ciphertext-feedback
//! perturbation used by the embedding scheme all live here. State evolution
//! is part of the cipher contract: every operation uses 64-bit IEEE floats
//! with round-to-nearest-even and the fixed evaluation order `((r·x)·(1−x))`,
//! so encryptor and decryptor reproduce bit-identical trajectories.

use std::io::{self, Write};

use thiserror::Error;

/// Lower edge of the chaotic parameter region.
pub const CHAOTIC_R_MIN: f64 = 3.57;
/// Upper edge of the chaotic parameter region.
pub const CHAOTIC_R_MAX: f64 = 4.0;

/// Half-open guard band keeping the state away from the absorbing points
/// 0 and 1: after every step and perturbation, `x` is clamped into
/// `[STATE_EPSILON, 1 − STATE_EPSILON]`.
pub const STATE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ChaosError {
    /// Parameter outside the chaotic region `[3.57, 4.0]`.
    #[error(
        "logistic parameter r = {0} outside the chaotic region [{CHAOTIC_R_MIN}, {CHAOTIC_R_MAX}]"
    )]
    ParameterOutsideChaoticRegion(f64),
    /// Parameter outside the map's domain `(0, 4.0]`.
    #[error("logistic parameter r = {0} outside the map domain (0, {CHAOTIC_R_MAX}]")]
    ParameterOutsideDomain(f64),
    /// Initial state outside the open interval (0, 1).
    #[error("logistic state x = {0} outside (0, 1)")]
    StateOutOfRange(f64),
    /// Orbits hold at least one sample.
    #[error("orbit length must be at least 1")]
    EmptyOrbit,
}

/// Dimensionless map parameter `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    r: f64,
}

impl LogisticParams {
    /// Key-bearing constructor: `r` must lie in the chaotic region
    /// `[3.57, 4.0]`.
    pub fn new(r: f64) -> Result<Self, ChaosError> {
        if !(CHAOTIC_R_MIN..=CHAOTIC_R_MAX).contains(&r) {
            return Err(ChaosError::ParameterOutsideChaoticRegion(r));
        }
        Ok(Self { r })
    }

    /// Plotting constructor: accepts any `r` in the map domain `(0, 4.0]`,
    /// including non-chaotic regimes. Never use for key material.
    pub fn unrestricted(r: f64) -> Result<Self, ChaosError> {
        if !(r > 0.0 && r <= CHAOTIC_R_MAX) {
            return Err(ChaosError::ParameterOutsideDomain(r));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

/// Map state `x`, always inside `[STATE_EPSILON, 1 − STATE_EPSILON]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticState {
    x: f64,
}

impl LogisticState {
    /// Accepts any `x` in the open interval (0, 1); the stored value is
    /// clamped into the guard band.
    pub fn new(x: f64) -> Result<Self, ChaosError> {
        if !(x > 0.0 && x < 1.0) {
            return Err(ChaosError::StateOutOfRange(x));
        }
        Ok(Self { x: clamp(x) })
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

fn clamp(x: f64) -> f64 {
    x.clamp(STATE_EPSILON, 1.0 - STATE_EPSILON)
}

/// One map step: `r·x·(1−x)`, evaluated as `((r·x)·(1−x))`, then clamped.
pub fn logistic_step(params: &LogisticParams, state: &LogisticState) -> LogisticState {
    let x = state.x;
    let next = (params.r * x) * (1.0 - x);
    LogisticState { x: clamp(next) }
}

/// `n`-fold composition of [`logistic_step`]; `n = 0` returns the state
/// unchanged.
pub fn logistic_iterate(params: &LogisticParams, state: &LogisticState, n: usize) -> LogisticState {
    let mut s = *state;
    for _ in 0..n {
        s = logistic_step(params, &s);
    }
    s
}

/// Discretize the state to one byte: `floor(x·256)` clamped to `[0, 255]`.
/// Monotone non-decreasing in `x`.
pub fn quantize_state(state: &LogisticState) -> u8 {
    let q = (state.x * 256.0).floor();
    q.clamp(0.0, 255.0) as u8
}

/// Ciphertext-feedback perturbation: `frac(x + (feedback+1)/257)`, re-clamped.
///
/// The offset `(feedback+1)/257` lies in (0, 1), so the shift is never a
/// whole number of turns; for a fixed feedback byte the map on `x` is a
/// bijection of the unit interval (mod the guard-band clamp). Both ends of
/// the channel apply it with the previous ciphertext byte, which both
/// possess.
pub fn perturb_state(state: &LogisticState, feedback: u8) -> LogisticState {
    let offset = (feedback as f64 + 1.0) / 257.0;
    let shifted = state.x + offset;
    LogisticState {
        x: clamp(shifted.fract()),
    }
}

/// A finite orbit: iterates `(k, x(k))` with `k` starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    samples: Vec<(usize, f64)>,
}

impl Orbit {
    pub fn samples(&self) -> &[(usize, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV export: header `k,x`, one row per iterate, `x` printed with
    /// 17 significant digits so the exact f64 value round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,x")?;
        for (k, x) in &self.samples {
            writeln!(w, "{},{:.16e}", k, x)?;
        }
        Ok(())
    }
}

/// First `n` iterates of the map from `x0`, including `x0` itself at
/// index 0. Rejects `x0` outside (0, 1) and `n = 0`.
pub fn generate_orbit(params: &LogisticParams, x0: f64, n: usize) -> Result<Orbit, ChaosError> {
    if n == 0 {
        return Err(ChaosError::EmptyOrbit);
    }
    let mut state = LogisticState::new(x0)?;
    let mut samples = Vec::with_capacity(n);
    samples.push((0, state.x));
    for k in 1..n {
        state = logistic_step(params, &state);
        samples.push((k, state.x));
    }
    Ok(Orbit { samples })
}
