//! Binary phase-encoded coherent states `|±α⟩` and their measurements.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{invalid, Error, Result};
use crate::quantum::code::LinearCode;
use crate::quantum::state::PureState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Bit 0 encodes `+`, bit 1 encodes `-`.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn to_bit(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        Self::from_bit(!self.to_bit())
    }
}

/// Tensor product of single-mode coherent states `|s_i a⟩`, `a >= 0` real.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentTrain {
    mode_amplitude: f64,
    signs: Vec<Sign>,
}

impl CoherentTrain {
    pub fn new(mode_amplitude: f64, signs: Vec<Sign>) -> Result<Self> {
        if !(mode_amplitude >= 0.0 && mode_amplitude.is_finite()) {
            return Err(invalid("alpha", "amplitude must be finite and nonnegative"));
        }
        Ok(Self {
            mode_amplitude,
            signs,
        })
    }

    /// Signs `(-1)^{bits_i}`.
    pub fn from_bits(mode_amplitude: f64, bits: &BitString) -> Result<Self> {
        Self::new(mode_amplitude, bits.iter().map(Sign::from_bit).collect())
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn mode_amplitude(&self) -> f64 {
        self.mode_amplitude
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.signs
            .iter()
            .map(move |s| s.value() * self.mode_amplitude)
    }

    /// `Π_i ⟨β_i|γ_i⟩`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(self
            .amplitudes()
            .zip(other.amplitudes())
            .map(|(b, g)| coherent_overlap(b, g))
            .product())
    }

    /// Normalised projection onto the one-photon subspace, `∝ Σ_i β_i |1_i⟩`.
    pub fn single_photon_component(&self) -> Result<PureState> {
        if self.mode_amplitude == 0.0 || self.is_empty() {
            return Err(invalid("alpha", "vacuum train has no one-photon component"));
        }
        let amps: Vec<f64> = self.amplitudes().collect();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        PureState::from_real(&amps.iter().map(|a| a / norm).collect::<Vec<_>>())
    }
}

/// `⟨β|γ⟩ = exp(-(β-γ)²/2)` for real amplitudes.
pub fn coherent_overlap(beta: f64, gamma: f64) -> f64 {
    (-(beta - gamma).powi(2) / 2.0).exp()
}

/// Conclusive rate of unambiguous discrimination of `|±α⟩`: `1 - e^{-2α²}`.
pub fn p_usd(alpha: f64) -> f64 {
    -(-2.0 * alpha * alpha).exp_m1()
}

/// Helstrom error for `|±α⟩`: `½(1 - √(1 - e^{-4α²}))`.
pub fn p_min(alpha: f64) -> f64 {
    let x = (-4.0 * alpha * alpha).exp();
    // Rationalised form avoids cancellation for large α.
    0.5 * x / (1.0 + (1.0 - x).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UsdOutcome {
    Conclusive(Sign),
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EliminationOutcome {
    Eliminated(Sign),
    Inconclusive,
}

pub fn usd_measure<R: Rng + ?Sized>(true_sign: Sign, alpha: f64, rng: &mut R) -> UsdOutcome {
    if rng.random_bool(p_usd(alpha).clamp(0.0, 1.0)) {
        UsdOutcome::Conclusive(true_sign)
    } else {
        UsdOutcome::Inconclusive
    }
}

/// For two states, eliminating the wrong sign is the same event as a conclusive USD.
pub fn state_elimination_measure<R: Rng + ?Sized>(
    true_sign: Sign,
    alpha: f64,
    rng: &mut R,
) -> EliminationOutcome {
    match usd_measure(true_sign, alpha, rng) {
        UsdOutcome::Conclusive(s) => EliminationOutcome::Eliminated(s.flipped()),
        UsdOutcome::Inconclusive => EliminationOutcome::Inconclusive,
    }
}

pub fn min_error_guess<R: Rng + ?Sized>(true_sign: Sign, alpha: f64, rng: &mut R) -> Sign {
    if rng.random_bool(p_min(alpha).clamp(0.0, 1.0)) {
        true_sign.flipped()
    } else {
        true_sign
    }
}

/// `⊗_i |(-1)^{E(k)_i} α/√m⟩`.
pub fn fingerprint_to_coherent(
    k: &BitString,
    code: &LinearCode,
    alpha: f64,
) -> Result<CoherentTrain> {
    let cw = code.encode(k)?;
    CoherentTrain::from_bits(alpha / (code.output_len() as f64).sqrt(), &cw)
}
