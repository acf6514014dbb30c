//! Mismatch-threshold acceptance shared by all threshold-verified protocols.
//!
//! A verifier accepts iff `count == 0 || count < limit`. The zero case makes a
//! zero fraction mean "no mismatches tolerated" rather than "never accept".

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Received from the signer; threshold `s_a`.
    Direct,
    /// Forwarded by another recipient; threshold `s_v`.
    Forwarded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accept: bool,
    pub mismatches: usize,
}

// Products such as 0.05 * 1000 may land a few ulps above an integer.
const SNAP: f64 = 1e-9;

/// Largest accepted mismatch count for a real-valued `limit`.
pub fn max_accepted(limit: f64) -> usize {
    let snapped = if (limit - limit.round()).abs() < SNAP {
        limit.round()
    } else {
        limit
    };
    if snapped <= 0.0 {
        0
    } else {
        (snapped.ceil() as usize).saturating_sub(1)
    }
}

pub fn accepts(count: usize, limit: f64) -> bool {
    count <= max_accepted(limit)
}

pub fn verdict(count: usize, limit: f64) -> Verdict {
    Verdict {
        accept: accepts(count, limit),
        mismatches: count,
    }
}

/// Checks `0 <= s_a < s_v < upper`.
pub fn check_thresholds(s_a: f64, s_v: f64, upper: f64) -> Result<()> {
    if !(s_a.is_finite() && s_v.is_finite()) {
        return Err(invalid("s_a/s_v", "thresholds must be finite"));
    }
    if s_a < 0.0 {
        return Err(invalid("s_a", "must be nonnegative"));
    }
    if s_a >= s_v {
        return Err(Error::ThresholdOrder { s_a, s_v });
    }
    if s_v >= upper {
        return Err(invalid("s_v", format!("must be below {upper}")));
    }
    Ok(())
}
