//! BB84 symbols, unambiguous state elimination on them, and the
//! half-swap symmetrisation recipients use before comparing records.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bb84Symbol {
    Zero,
    One,
    Plus,
    Minus,
}

impl Bb84Symbol {
    pub const ALL: [Bb84Symbol; 4] = [Self::Zero, Self::One, Self::Plus, Self::Minus];

    pub fn basis(self) -> Basis {
        match self {
            Self::Zero | Self::One => Basis::Z,
            Self::Plus | Self::Minus => Basis::X,
        }
    }

    /// The other state of the same basis.
    pub fn orthogonal(self) -> Self {
        match self {
            Self::Zero => Self::One,
            Self::One => Self::Zero,
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    fn of_basis(basis: Basis, second: bool) -> Self {
        match (basis, second) {
            (Basis::Z, false) => Self::Zero,
            (Basis::Z, true) => Self::One,
            (Basis::X, false) => Self::Plus,
            (Basis::X, true) => Self::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UseOutcome {
    pub basis: Basis,
    pub outcome: Bb84Symbol,
    pub eliminated: Bb84Symbol,
}

/// Measures in a uniformly chosen basis and rules out the state orthogonal to the result.
pub fn bb84_use_measure<R: Rng + ?Sized>(symbol: Bb84Symbol, rng: &mut R) -> UseOutcome {
    let basis = if rng.random_bool(0.5) {
        Basis::X
    } else {
        Basis::Z
    };
    measure_in_basis(symbol, basis, rng)
}

pub fn measure_in_basis<R: Rng + ?Sized>(
    symbol: Bb84Symbol,
    basis: Basis,
    rng: &mut R,
) -> UseOutcome {
    let outcome = if symbol.basis() == basis {
        symbol
    } else {
        Bb84Symbol::of_basis(basis, rng.random_bool(0.5))
    };
    UseOutcome {
        basis,
        outcome,
        eliminated: outcome.orthogonal(),
    }
}

/// Exchanges a uniformly chosen half (`⌊len/2⌋` positions) of two equal-length
/// records. Returns the exchanged positions, ascending.
pub fn swap_symmetrise<T, R: Rng + ?Sized>(
    a: &mut [T],
    b: &mut [T],
    rng: &mut R,
) -> Result<Vec<usize>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let mut idx = sample(rng, a.len(), a.len() / 2).into_vec();
    idx.sort_unstable();
    for &i in &idx {
        std::mem::swap(&mut a[i], &mut b[i]);
    }
    Ok(idx)
}
