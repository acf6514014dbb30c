use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Allowed deviation of the squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch(1, 0));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE || !norm.is_finite() {
            return Err(Error::NotNormalised(norm));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Scales `amps` to unit norm.
    pub fn normalised(amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalised(norm * norm));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch(dim, index + 1));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// Haar-random state of dimension `dim`.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let amps = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalised(amps)
    }

    /// `c|self⟩ + √(1-c²)|⊥⟩` for a random `|⊥⟩` orthogonal to `self`, so the
    /// overlap with `self` is exactly `c`.
    pub fn with_overlap<R: Rng + ?Sized>(&self, c: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(crate::error::invalid("overlap", "must lie in [0, 1]"));
        }
        if self.dim() < 2 {
            return Err(Error::DimensionMismatch(2, self.dim()));
        }
        let perp = loop {
            let r = Self::random(self.dim(), rng)?;
            let proj = self.inner_product(&r)?;
            let v: Vec<Complex64> = r
                .amps
                .iter()
                .zip(&self.amps)
                .map(|(x, s)| x - s * proj)
                .collect();
            if v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6 {
                break Self::normalised(v)?;
            }
        };
        let s = (1.0 - c * c).max(0.0).sqrt();
        Self::normalised(
            self.amps
                .iter()
                .zip(&perp.amps)
                .map(|(a, p)| a * c + p * s)
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn overlap_sq(&self, other: &Self) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr().min(1.0))
    }
}

/// Probability that the SWAP test on `a`, `b` returns outcome 1.
pub fn swap_test_probability(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(swap_outcome_one(a.overlap_sq(b)?))
}

pub(crate) fn swap_outcome_one(overlap_sq: f64) -> f64 {
    (0.5 - 0.5 * overlap_sq).clamp(0.0, 0.5)
}

/// Samples a SWAP test; `true` is outcome 1 ("different").
pub fn swap_test<R: Rng + ?Sized>(a: &PureState, b: &PureState, rng: &mut R) -> Result<bool> {
    let p = swap_test_probability(a, b)?;
    Ok(p > 0.0 && rng.random_bool(p))
}
