//! Attack experiments, bound checks, dispute resolution and transferability.

pub mod dispute;
pub mod oracle;
pub mod transfer;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::FieldElement;
use crate::gc_qds::{gc_holevo_budget, holevo_revealed_bits, GcSetup};
use crate::hanaoka::{random_forgery, setup as hanaoka_setup, transfer_check, HanaokaParams};
use crate::mqds::{self, mqds_forging_bound, mqds_repudiation_bound, MqdsParams};
use crate::p2::{
    self, p2_distribute, p2_forging_bound, p2_repudiation_bound, p2_sign, p2_symmetrise, p2_verify,
};
use crate::quantum::code::CodeSpec;
use crate::quantum::coherent::{p_min, p_usd};
use crate::rng::{trial_rng, SimRng};
use crate::threshold::Role;

pub use dispute::{resolve_dispute, resolve_dispute_with, DisputeRule, DisputeVerdict, Validity};
pub use transfer::{transferability_experiment, TransferProtocol, TransferStats};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P2Params {
    #[serde(rename = "L")]
    pub l: usize,
    pub s_a: f64,
    pub s_v: f64,
}

impl P2Params {
    pub fn thresholds(&self) -> Result<p2::ThresholdConfig> {
        if self.l < 2 || self.l % 2 != 0 {
            return Err(invalid(
                "L",
                format!("must be even and at least 2, got {}", self.l),
            ));
        }
        p2::ThresholdConfig::new(self.s_a, self.s_v, self.l)
    }
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GcParams {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(default)]
    pub code: CodeSpec,
    pub s_a: f64,
    pub s_v: f64,
    /// Cross-test rounds in the key test.
    #[serde(default = "one")]
    pub rounds: usize,
    /// Per-state replacement probability on retained keys.
    #[serde(default)]
    pub noise: f64,
    /// Public-key copies available to a forger.
    #[serde(rename = "T", default = "one")]
    pub t: usize,
}

impl GcParams {
    pub fn build(&self) -> Result<GcSetup> {
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(invalid("noise", "must lie in [0, 1]"));
        }
        if self.m == 0 {
            return Err(invalid("M", "must be positive"));
        }
        GcSetup::new(self.code.build()?, self.m, self.rounds, self.s_a, self.s_v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case")]
pub enum ProtocolParams {
    Hanaoka(HanaokaParams),
    P2(P2Params),
    GcQds(GcParams),
    Mqds(MqdsParams),
}

impl ProtocolParams {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolParams::Hanaoka(_) => "hanaoka",
            ProtocolParams::P2(_) => "p2",
            ProtocolParams::GcQds(_) => "gc-qds",
            ProtocolParams::Mqds(_) => "mqds",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProtocolParams::Hanaoka(p) => p.validate(),
            ProtocolParams::P2(p) => p.thresholds().map(drop),
            ProtocolParams::GcQds(p) => p.build().map(drop),
            ProtocolParams::Mqds(p) => p.validate(),
        }
    }

    /// Numeric parameters, for reports and sweep tables.
    pub fn parameters(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match self {
            ProtocolParams::Hanaoka(p) => vec![
                ("n", p.n as f64),
                ("omega", p.omega as f64),
                ("psi", p.psi as f64),
                ("q", p.q as f64),
            ],
            ProtocolParams::P2(p) => vec![("L", p.l as f64), ("s_a", p.s_a), ("s_v", p.s_v)],
            ProtocolParams::GcQds(p) => vec![
                ("M", p.m as f64),
                ("s_a", p.s_a),
                ("s_v", p.s_v),
                ("rounds", p.rounds as f64),
                ("noise", p.noise),
                ("T", p.t as f64),
            ],
            ProtocolParams::Mqds(p) => vec![
                ("L", p.l as f64),
                ("alpha", p.alpha),
                ("s_a", p.s_a),
                ("s_v", p.s_v),
                ("noise", p.noise),
            ],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Sets a numeric parameter by its report name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(invalid(
                    "sweep",
                    format!("{name} needs a nonnegative integer, got {v}"),
                ))
            }
        };
        match (self, name) {
            (ProtocolParams::Hanaoka(p), "n") => p.n = count(value)?,
            (ProtocolParams::Hanaoka(p), "omega") => p.omega = count(value)?,
            (ProtocolParams::Hanaoka(p), "psi") => p.psi = count(value)? as u32,
            (ProtocolParams::Hanaoka(p), "q") => p.q = count(value)? as u64,
            (ProtocolParams::P2(p), "L") => p.l = count(value)?,
            (ProtocolParams::P2(p), "s_a") => p.s_a = value,
            (ProtocolParams::P2(p), "s_v") => p.s_v = value,
            (ProtocolParams::GcQds(p), "M") => p.m = count(value)?,
            (ProtocolParams::GcQds(p), "s_a") => p.s_a = value,
            (ProtocolParams::GcQds(p), "s_v") => p.s_v = value,
            (ProtocolParams::GcQds(p), "rounds") => p.rounds = count(value)?,
            (ProtocolParams::GcQds(p), "noise") => p.noise = value,
            (ProtocolParams::GcQds(p), "T") => p.t = count(value)?,
            (ProtocolParams::Mqds(p), "L") => p.l = count(value)?,
            (ProtocolParams::Mqds(p), "alpha") => p.alpha = value,
            (ProtocolParams::Mqds(p), "s_a") => p.s_a = value,
            (ProtocolParams::Mqds(p), "s_v") => p.s_v = value,
            (ProtocolParams::Mqds(p), "noise") => p.noise = value,
            (p, _) => {
                return Err(Error::Config(format!(
                    "unknown parameter {name:?} for protocol {}",
                    p.name()
                )))
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    /// Honest run; success means every verifier accepts.
    #[default]
    None,
    Repudiate,
    Forge,
    TamperKeys,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::Repudiate => "repudiate",
            AttackKind::Forge => "forge",
            AttackKind::TamperKeys => "tamper-keys",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    /// Injected mismatches (repudiation), flipped positions or tampered
    /// states (key tampering). Repudiation picks the optimum when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injections: Option<usize>,
    /// Overlap of tampered key states with the honest ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpec {
    pub params: ProtocolParams,
    #[serde(default)]
    pub attack: AttackKind,
    #[serde(default)]
    pub strategy: Strategy,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        use AttackKind::*;
        use ProtocolParams::*;
        match (&self.params, self.attack) {
            (Hanaoka(_), None | Forge)
            | (P2(_), None | Forge | Repudiate)
            | (GcQds(_), None | Forge | TamperKeys) => {}
            (Mqds(_), _) => {}
            (p, a) => {
                return Err(Error::Unsupported {
                    protocol: p.name(),
                    attack: a.name(),
                })
            }
        }
        if let Some(c) = self.strategy.overlap {
            if !(0.0..=1.0).contains(&c) {
                return Err(invalid("overlap", "must lie in [0, 1]"));
            }
        }
        if let Some(j) = self.strategy.injections {
            let max = match &self.params {
                P2(p) => 2 * p.l,
                Mqds(p) => p.l,
                GcQds(p) => 2 * p.m,
                Hanaoka(_) => usize::MAX,
            };
            if j > max {
                return Err(invalid(
                    "injections",
                    format!("at most {max} for this protocol"),
                ));
            }
        }
        Ok(())
    }

    /// Sets a protocol parameter or one of `trials`, `seed`, `injections`, `overlap`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let whole = value >= 0.0 && value.fract() == 0.0;
        match name {
            "trials" if whole => self.trials = value as u64,
            "seed" if whole => self.seed = value as u64,
            "injections" if whole => self.strategy.injections = Some(value as usize),
            "overlap" => self.strategy.overlap = Some(value),
            "trials" | "seed" | "injections" => {
                return Err(invalid(
                    "sweep",
                    format!("{name} needs a nonnegative integer, got {value}"),
                ))
            }
            _ => self.params.set(name, value)?,
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundTag {
    P2Repudiation,
    P2Forging,
    MqdsForging,
    MqdsRepudiation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub protocol: String,
    pub attack: AttackKind,
    pub parameters: BTreeMap<String, f64>,
    pub trials: u64,
    pub successes: u64,
    pub empirical: f64,
    pub oracle: Option<f64>,
    pub bound: Option<f64>,
    pub bound_tag: Option<BoundTag>,
    pub bound_vacuous: bool,
    pub holevo_within_budget: Option<bool>,
    pub injections: Option<usize>,
    /// Mean total mismatches per trial over all verifiers (honest runs).
    pub mean_mismatches: Option<f64>,
    pub note: Option<String>,
    pub seed: u64,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl TrialReport {
    /// Binomial standard deviation of the empirical frequency.
    pub fn sigma(&self) -> f64 {
        (self.empirical * (1.0 - self.empirical) / self.trials as f64).sqrt()
    }

    /// Empirical frequency above the analytic bound by more than 3σ.
    pub fn violates_bound(&self) -> bool {
        match self.bound {
            Some(b) if !self.bound_vacuous => self.empirical > b + 3.0 * self.sigma(),
            _ => false,
        }
    }

    /// Whether the empirical frequency lies within 3 binomial σ of the oracle.
    pub fn matches_oracle(&self) -> Option<bool> {
        let p = self.oracle?;
        let sd = (p * (1.0 - p) / self.trials as f64).sqrt();
        Some((self.empirical - p).abs() <= 3.0 * sd + 1e-12)
    }
}

/// Runs `trials` independent trials in parallel, trial `t` on stream `t` of
/// `seed`. Returns (successes, summed counts).
pub fn monte_carlo<F>(trials: u64, seed: u64, f: F) -> Result<(u64, u64)>
where
    F: Fn(&mut SimRng) -> Result<(bool, u64)> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut trial_rng(seed, t)).map(|(ok, c)| (u64::from(ok), c)))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
}

struct Outcome {
    successes: u64,
    counts: Option<u64>,
    oracle: Option<f64>,
    bound: Option<(f64, BoundTag, bool)>,
    holevo: Option<bool>,
    injections: Option<usize>,
    note: Option<String>,
}

impl Outcome {
    fn new(successes: u64) -> Self {
        Self {
            successes,
            counts: None,
            oracle: None,
            bound: None,
            holevo: None,
            injections: None,
            note: None,
        }
    }
}

fn bound_or_vacuous(r: Result<f64>, tag: BoundTag) -> Result<Option<(f64, BoundTag, bool)>> {
    match r {
        Ok(b) => Ok(Some((b, tag, false))),
        Err(Error::VacuousBound(_)) => Ok(Some((1.0, tag, true))),
        Err(e) => Err(e),
    }
}

/// Validates `spec` and runs the attack it names.
pub fn run_attack(spec: &AttackSpec) -> Result<TrialReport> {
    spec.validate()?;
    match spec.attack {
        AttackKind::None => run_honest(spec),
        AttackKind::Repudiate => run_repudiation(spec),
        AttackKind::Forge => run_forging(spec),
        AttackKind::TamperKeys => run_tamper(spec),
    }
}

fn finish(spec: &AttackSpec, start: Instant, o: Outcome) -> TrialReport {
    let mut parameters = spec.params.parameters();
    if let Some(j) = o.injections {
        parameters.insert("injections".into(), j as f64);
    }
    if let Some(c) = spec.strategy.overlap {
        parameters.insert("overlap".into(), c);
    }
    let (bound, bound_tag, bound_vacuous) = match o.bound {
        Some((b, t, v)) => (Some(b), Some(t), v),
        None => (None, None, false),
    };
    TrialReport {
        protocol: spec.params.name().into(),
        attack: spec.attack,
        parameters,
        trials: spec.trials,
        successes: o.successes,
        empirical: o.successes as f64 / spec.trials as f64,
        oracle: o.oracle,
        bound,
        bound_tag,
        bound_vacuous,
        holevo_within_budget: o.holevo,
        injections: o.injections,
        mean_mismatches: o.counts.map(|c| c as f64 / spec.trials as f64),
        note: o.note,
        seed: spec.seed,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn expect_kind(spec: &AttackSpec, kind: AttackKind) -> Result<()> {
    if spec.attack != kind {
        return Err(invalid(
            "attack",
            format!("expected {}, got {}", kind.name(), spec.attack.name()),
        ));
    }
    spec.validate()
}

fn unsupported(spec: &AttackSpec) -> Error {
    Error::Unsupported {
        protocol: spec.params.name(),
        attack: spec.attack.name(),
    }
}

/// Honest runs: success iff every verifier accepts.
pub fn run_honest(spec: &AttackSpec) -> Result<TrialReport> {
    expect_kind(spec, AttackKind::None)?;
    let start = Instant::now();
    let (s, c) = match &spec.params {
        ProtocolParams::Hanaoka(p) => monte_carlo(spec.trials, spec.seed, |rng| {
            let (_, users) = hanaoka_setup(*p, rng)?;
            let signer = rng.random_range(0..users.len());
            let m = FieldElement::random(p.q, rng)?;
            let sig = users[signer].sign(m)?;
            let verdicts = transfer_check(&sig, &users, users[signer].identity)?;
            Ok((verdicts.iter().all(|&v| v), 0))
        })?,
        ProtocolParams::P2(p) => {
            let cfg = p.thresholds()?;
            monte_carlo(spec.trials, spec.seed, |rng| {
                let (keys, mut bob, mut charlie) = p2_distribute(cfg.l, rng)?;
                p2_symmetrise(&mut bob, &mut charlie, rng)?;
                let d = p2_sign(&keys, rng.random_bool(0.5));
                let vb = p2_verify(&d, &bob, &cfg, Role::Direct)?;
                let vc = p2_verify(&d, &charlie, &cfg, Role::Forwarded)?;
                Ok((
                    vb.accept && vc.accept,
                    (vb.mismatches + vc.mismatches) as u64,
                ))
            })?
        }
        ProtocolParams::GcQds(p) => {
            let setup = p.build()?;
            monte_carlo(spec.trials, spec.seed, |rng| {
                let (vb, vc) = setup.transfer_trial(p.noise, rng)?;
                Ok((
                    vb.accept && vc.accept,
                    (vb.mismatches + vc.mismatches) as u64,
                ))
            })?
        }
        ProtocolParams::Mqds(p) => monte_carlo(spec.trials, spec.seed, |rng| {
            let (vb, vc) = mqds::honest_trial(p, rng)?;
            Ok((
                vb.accept && vc.accept,
                (vb.mismatches + vc.mismatches) as u64,
            ))
        })?,
    };
    let mut o = Outcome::new(s);
    o.counts = Some(c);
    let noiseless = match &spec.params {
        ProtocolParams::GcQds(p) => p.noise == 0.0,
        ProtocolParams::Mqds(p) => p.noise == 0.0,
        _ => true,
    };
    if noiseless {
        o.oracle = Some(1.0);
    }
    Ok(finish(spec, start, o))
}

/// Signer injects mismatches so the direct recipient accepts and the
/// forwarded one rejects.
pub fn run_repudiation(spec: &AttackSpec) -> Result<TrialReport> {
    expect_kind(spec, AttackKind::Repudiate)?;
    let start = Instant::now();
    let o = match &spec.params {
        ProtocolParams::P2(p) => {
            let cfg = p.thresholds()?;
            let j = spec
                .strategy
                .injections
                .unwrap_or_else(|| oracle::p2_best_injection(p.l, p.s_a, p.s_v).0);
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                Ok((p2::repudiation_trial(&cfg, j, rng)?, 0))
            })?;
            let mut o = Outcome::new(s);
            o.injections = Some(j);
            o.oracle = Some(oracle::p2_repudiation_oracle(p.l, p.s_a, p.s_v, j));
            if p.s_a == 0.0 {
                o.bound = Some((
                    p2_repudiation_bound(p.s_v, p.l)?,
                    BoundTag::P2Repudiation,
                    false,
                ));
            } else {
                o.note = Some("exploratory: the repudiation bound is stated for s_a = 0".into());
            }
            o
        }
        ProtocolParams::Mqds(p) => {
            let j = spec
                .strategy
                .injections
                .unwrap_or_else(|| oracle::mqds_best_injection(p).0);
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                Ok((mqds::repudiation_trial(p, j, rng)?, 0))
            })?;
            let mut o = Outcome::new(s);
            o.injections = Some(j);
            o.oracle = Some(oracle::mqds_repudiation_oracle(p, j));
            o.bound = bound_or_vacuous(
                mqds_repudiation_bound(p_usd(p.alpha), p.s_a, p.s_v, p.l),
                BoundTag::MqdsRepudiation,
            )?;
            o
        }
        _ => return Err(unsupported(spec)),
    };
    Ok(finish(spec, start, o))
}

/// A recipient forwards a signature the signer never issued.
pub fn run_forging(spec: &AttackSpec) -> Result<TrialReport> {
    expect_kind(spec, AttackKind::Forge)?;
    let start = Instant::now();
    let o = match &spec.params {
        ProtocolParams::Hanaoka(p) => {
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                let (_, users) = hanaoka_setup(*p, rng)?;
                let m = FieldElement::random(p.q, rng)?;
                let sig = random_forgery(p.omega, m, rng)?;
                let verifier = rng.random_range(1..users.len());
                Ok((users[verifier].verify(users[0].identity, &sig)?, 0))
            })?;
            let mut o = Outcome::new(s);
            // One linear constraint on a uniform α.
            o.oracle = Some(1.0 / p.q as f64);
            o
        }
        ProtocolParams::P2(p) => {
            let cfg = p.thresholds()?;
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                Ok((p2::forge_trial(&cfg, rng)?, 0))
            })?;
            let mut o = Outcome::new(s);
            o.oracle = Some(oracle::p2_forging_oracle(p.l, p.s_v));
            o.bound = Some((p2_forging_bound(p.s_v, p.l)?, BoundTag::P2Forging, false));
            o
        }
        ProtocolParams::GcQds(p) => {
            let setup = p.build()?;
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                Ok((setup.forge_trial(p.t, rng)?, 0))
            })?;
            let l = setup.code.input_len();
            let t = holevo_revealed_bits(p.t, setup.code.qubits(), l);
            let mut o = Outcome::new(s);
            o.oracle = oracle::gc_forging_oracle(&setup.code, p.m, p.s_v, t).ok();
            o.holevo = Some(gc_holevo_budget(p.t, setup.code.qubits(), l));
            o.note = Some("no closed-form forging bound; compare with the oracle".into());
            o
        }
        ProtocolParams::Mqds(p) => {
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                Ok((mqds::forge_trial(p, rng)?, 0))
            })?;
            let mut o = Outcome::new(s);
            o.oracle = Some(oracle::mqds_forging_oracle(p));
            o.bound = bound_or_vacuous(
                mqds_forging_bound(p_min(p.alpha), p_usd(p.alpha), 0.0, p.s_v, p.l),
                BoundTag::MqdsForging,
            )?;
            o.note = Some("individual min-error forger; collective attacks not simulated".into());
            o
        }
    };
    Ok(finish(spec, start, o))
}

/// The signer sends the two recipients inconsistent quantum keys; success
/// means the inconsistency goes undetected.
pub fn run_tamper(spec: &AttackSpec) -> Result<TrialReport> {
    expect_kind(spec, AttackKind::TamperKeys)?;
    let start = Instant::now();
    let j = spec.strategy.injections.unwrap_or(1);
    let o = match &spec.params {
        ProtocolParams::GcQds(p) => {
            let setup = p.build()?;
            let c = spec.strategy.overlap.unwrap_or(0.0);
            let (s, _) = monte_carlo(spec.trials, spec.seed, |rng| {
                Ok((setup.tamper_trial(j, c, rng)?, 0))
            })?;
            let mut o = Outcome::new(s);
            o.oracle = Some(oracle::gc_tamper_oracle(p.rounds, j, c));
            o
        }
        ProtocolParams::Mqds(p) => {
            let (s, clicks) = monte_carlo(spec.trials, spec.seed, |rng| {
                let k = mqds::tamper_clicks(p, j, rng)?;
                Ok((k == 0, k as u64))
            })?;
            let mut o = Outcome::new(s);
            o.counts = Some(clicks);
            o.oracle = Some(oracle::mqds_tamper_oracle(p.alpha, j));
            o
        }
        _ => return Err(unsupported(spec)),
    };
    let mut report = finish(spec, start, o);
    report.injections = Some(j);
    report.parameters.insert("injections".into(), j as f64);
    Ok(report)
}
