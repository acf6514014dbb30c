//! Honest-signer experiments measuring how far two recipients' mismatch
//! counts drift apart.

use serde::Serialize;

use crate::error::Result;
use crate::gc_qds::GcSetup;
use crate::mqds::{self, mqds_repudiation_bound, MqdsParams};
use crate::quantum::coherent::p_usd;
use crate::rng::trial_rng;

#[derive(Clone, Debug)]
pub enum TransferProtocol {
    /// GC-QDS with per-state replacement noise on both recipients' keys.
    GcQds {
        setup: GcSetup,
        noise: f64,
    },
    Mqds(MqdsParams),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferStats {
    pub trials: u64,
    /// `(direct, forwarded)` mismatch counts per trial.
    pub pairs: Vec<(usize, usize)>,
    /// Direct recipient accepted, forwarded recipient rejected.
    pub transfer_failures: u64,
    /// `M` for GC-QDS, `L` for MQDS.
    pub size: usize,
    /// Matching repudiation bound, where one exists.
    pub repudiation_bound: Option<f64>,
}

impl TransferStats {
    /// Fraction of trials with `|count_B - count_C| <= c·√size`.
    pub fn fraction_within(&self, c: f64) -> f64 {
        let lim = c * (self.size as f64).sqrt();
        let ok = self
            .pairs
            .iter()
            .filter(|(a, b)| (*a as f64 - *b as f64).abs() <= lim)
            .count();
        ok as f64 / self.trials.max(1) as f64
    }

    pub fn failure_rate(&self) -> f64 {
        self.transfer_failures as f64 / self.trials.max(1) as f64
    }
}

pub fn transferability_experiment(
    protocol: &TransferProtocol,
    trials: u64,
    seed: u64,
) -> Result<TransferStats> {
    use rayon::prelude::*;
    let verdicts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            match protocol {
                TransferProtocol::GcQds { setup, noise } => setup.transfer_trial(*noise, &mut rng),
                TransferProtocol::Mqds(p) => mqds::honest_trial(p, &mut rng),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (size, repudiation_bound) = match protocol {
        TransferProtocol::GcQds { setup, .. } => (setup.m, None),
        TransferProtocol::Mqds(p) => (
            p.l,
            mqds_repudiation_bound(p_usd(p.alpha), p.s_a, p.s_v, p.l).ok(),
        ),
    };
    Ok(TransferStats {
        trials,
        pairs: verdicts
            .iter()
            .map(|(b, c)| (b.mismatches, c.mismatches))
            .collect(),
        transfer_failures: verdicts
            .iter()
            .filter(|(b, c)| b.accept && !c.accept)
            .count() as u64,
        size,
        repudiation_bound,
    })
}
