//! Majority-vote dispute resolution among recipients and arbiters.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Smallest electorate: one sender and two recipients.
pub const MIN_VOTES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    MessageValid,
    MessageInvalid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisputeVerdict {
    /// `true` = the party accepts the message.
    pub votes: Vec<bool>,
    /// `None` exactly when `tie` is set.
    pub verdict: Option<Validity>,
    pub tie: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisputeRule {
    #[default]
    Majority,
    /// Strict majority of total weight.
    Weighted(Vec<f64>),
    /// One party decides alone.
    Arbiter(usize),
}

pub fn resolve_dispute(votes: &[bool]) -> Result<DisputeVerdict> {
    resolve_dispute_with(votes, &DisputeRule::Majority)
}

pub fn resolve_dispute_with(votes: &[bool], rule: &DisputeRule) -> Result<DisputeVerdict> {
    if votes.len() < MIN_VOTES {
        return Err(Error::TooFewVotes {
            min: MIN_VOTES,
            actual: votes.len(),
        });
    }
    let (yes, no) = match rule {
        DisputeRule::Majority => {
            let y = votes.iter().filter(|&&v| v).count() as f64;
            (y, votes.len() as f64 - y)
        }
        DisputeRule::Weighted(w) => {
            if w.len() != votes.len() {
                return Err(Error::LengthMismatch {
                    expected: votes.len(),
                    actual: w.len(),
                });
            }
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(invalid("weights", "must be finite and nonnegative"));
            }
            votes.iter().zip(w).fold(
                (0.0, 0.0),
                |(y, n), (&v, &x)| if v { (y + x, n) } else { (y, n + x) },
            )
        }
        DisputeRule::Arbiter(i) => {
            let v = *votes
                .get(*i)
                .ok_or_else(|| invalid("arbiter", format!("index {i} out of range")))?;
            if v {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            }
        }
    };
    let verdict = if yes > no {
        Some(Validity::MessageValid)
    } else if no > yes {
        Some(Validity::MessageInvalid)
    } else {
        None
    };
    Ok(DisputeVerdict {
        votes: votes.to_vec(),
        verdict,
        tie: verdict.is_none(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn majority_examples() {
        assert_eq!(
            resolve_dispute(&[true, true, false]).unwrap().verdict,
            Some(Validity::MessageValid)
        );
        assert_eq!(
            resolve_dispute(&[true, false, false]).unwrap().verdict,
            Some(Validity::MessageInvalid)
        );
        let t = resolve_dispute(&[true, false, true, false]).unwrap();
        assert!(t.tie && t.verdict.is_none());
        assert!(matches!(
            resolve_dispute(&[true, true]),
            Err(Error::TooFewVotes { .. })
        ));
    }

    #[test]
    fn weighted_and_arbiter() {
        let w = DisputeRule::Weighted(vec![3.0, 1.0, 1.0]);
        assert_eq!(
            resolve_dispute_with(&[true, false, false], &w)
                .unwrap()
                .verdict,
            Some(Validity::MessageValid)
        );
        let w = DisputeRule::Weighted(vec![2.0, 1.0, 1.0]);
        assert!(resolve_dispute_with(&[true, false, false], &w).unwrap().tie);
        let a = DisputeRule::Arbiter(2);
        assert_eq!(
            resolve_dispute_with(&[true, true, false], &a)
                .unwrap()
                .verdict,
            Some(Validity::MessageInvalid)
        );
        assert!(resolve_dispute_with(&[true, true, false], &DisputeRule::Arbiter(3)).is_err());
        assert!(
            resolve_dispute_with(&[true, true, false], &DisputeRule::Weighted(vec![1.0])).is_err()
        );
    }

    proptest! {
        #[test]
        fn permutation_invariant(votes in proptest::collection::vec(any::<bool>(), 3..12), rot in 0usize..12) {
            let mut v2 = votes.clone();
            v2.rotate_left(rot % votes.len());
            v2.reverse();
            let a = resolve_dispute(&votes).unwrap();
            let b = resolve_dispute(&v2).unwrap();
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.tie, b.tie);
        }
    }
}
