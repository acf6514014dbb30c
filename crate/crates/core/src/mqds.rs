//! Coherent-state signatures without quantum memory.
//!
//! Alice encodes each bit of `k_b` as `|±α⟩` and sends one train to each
//! recipient through a symmetrising multiport. Equal inputs leave the null
//! ports dark; unequal inputs at a position send the light to the null ports,
//! where it may click. Recipients measure at once (USD or USE) and later count
//! declared bits that contradict their conclusive outcomes.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{invalid, Error, Result};
use crate::quantum::coherent::{
    min_error_guess, p_usd, usd_measure, CoherentTrain, Sign, UsdOutcome,
};
use crate::threshold::{check_thresholds, verdict, Role, Verdict};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    #[default]
    Usd,
    Use,
}

/// What the mismatch fraction `s` multiplies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdScale {
    /// `s · p_USD · L`, the expected number of conclusive positions.
    #[default]
    ExpectedConclusive,
    /// `s · L`.
    SignatureLength,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MqdsParams {
    #[serde(rename = "L")]
    pub l: usize,
    pub alpha: f64,
    pub s_a: f64,
    pub s_v: f64,
    #[serde(default)]
    pub measurement: MeasurementKind,
    /// Per-position probability that a received sign is flipped.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub scale: ThresholdScale,
}

impl MqdsParams {
    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(invalid("L", "must be positive"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", "must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(invalid("noise", "must lie in [0, 1]"));
        }
        check_thresholds(self.s_a, self.s_v, 1.0)
    }

    pub fn limit(&self, role: Role) -> f64 {
        let s = match role {
            Role::Direct => self.s_a,
            Role::Forwarded => self.s_v,
        };
        let base = match self.scale {
            ThresholdScale::ExpectedConclusive => p_usd(self.alpha) * self.l as f64,
            ThresholdScale::SignatureLength => self.l as f64,
        };
        s * base
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MqdsPrivateKey {
    pub k: [BitString; 2],
    pub alpha: f64,
}

pub fn mqds_keygen<R: Rng + ?Sized>(l: usize, alpha: f64, rng: &mut R) -> MqdsPrivateKey {
    MqdsPrivateKey {
        k: [BitString::random(l, rng), BitString::random(l, rng)],
        alpha,
    }
}

/// Bit 0 as `|α⟩`, bit 1 as `|-α⟩`.
pub fn mqds_encode(key: &MqdsPrivateKey, b: bool) -> Result<CoherentTrain> {
    CoherentTrain::from_bits(key.alpha, &key.k[b as usize])
}

/// Multiport output as seen by one recipient; `None` marks a vacuum mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalTrain {
    pub mode_amplitude: f64,
    pub modes: Vec<Option<Sign>>,
}

impl From<&CoherentTrain> for SignalTrain {
    fn from(t: &CoherentTrain) -> Self {
        Self {
            mode_amplitude: t.mode_amplitude(),
            modes: t.signs().iter().copied().map(Some).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiportOutcome {
    pub to_bob: SignalTrain,
    pub to_charlie: SignalTrain,
    /// Positions with a null-port click, ascending.
    pub clicks: Vec<usize>,
}

/// Per position: equal signs pass through with no click; unequal signs
/// leave the signal ports empty and click with probability `1 - e^{-2a²}`.
pub fn mqds_multiport<R: Rng + ?Sized>(
    train_b: &CoherentTrain,
    train_c: &CoherentTrain,
    rng: &mut R,
) -> Result<MultiportOutcome> {
    if train_b.len() != train_c.len() {
        return Err(Error::LengthMismatch {
            expected: train_b.len(),
            actual: train_c.len(),
        });
    }
    if train_b.mode_amplitude() != train_c.mode_amplitude() {
        return Err(invalid(
            "alpha",
            "multiport inputs must share the mode amplitude",
        ));
    }
    let a = train_b.mode_amplitude();
    let p_click = p_usd(a);
    let mut modes = Vec::with_capacity(train_b.len());
    let mut clicks = Vec::new();
    for (i, (&sb, &sc)) in train_b.signs().iter().zip(train_c.signs()).enumerate() {
        if sb == sc {
            modes.push(Some(sb));
        } else {
            modes.push(None);
            if rng.random_bool(p_click) {
                clicks.push(i);
            }
        }
    }
    let out = SignalTrain {
        mode_amplitude: a,
        modes,
    };
    Ok(MultiportOutcome {
        to_bob: out.clone(),
        to_charlie: out,
        clicks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecordEntry {
    Conclusive(Sign),
    Eliminated(Sign),
    Inconclusive,
}

impl RecordEntry {
    /// Whether this outcome rules out `declared`.
    pub fn contradicts(self, declared: Sign) -> bool {
        match self {
            RecordEntry::Conclusive(s) => s != declared,
            RecordEntry::Eliminated(s) => s == declared,
            RecordEntry::Inconclusive => false,
        }
    }

    pub fn is_conclusive(self) -> bool {
        self != RecordEntry::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub kind: MeasurementKind,
    pub entries: Vec<RecordEntry>,
}

impl MeasurementRecord {
    pub fn conclusive(&self) -> usize {
        self.entries.iter().filter(|e| e.is_conclusive()).count()
    }
}

/// Measures every mode at once. Vacuum modes are inconclusive; with
/// probability `noise` a mode's sign is flipped before measurement.
pub fn mqds_measure<R: Rng + ?Sized>(
    signal: &SignalTrain,
    kind: MeasurementKind,
    noise: f64,
    rng: &mut R,
) -> MeasurementRecord {
    let a = signal.mode_amplitude;
    let entries = signal
        .modes
        .iter()
        .map(|mode| {
            let Some(mut s) = *mode else {
                return RecordEntry::Inconclusive;
            };
            if noise > 0.0 && rng.random_bool(noise) {
                s = s.flipped();
            }
            match (usd_measure(s, a, rng), kind) {
                (UsdOutcome::Inconclusive, _) => RecordEntry::Inconclusive,
                (UsdOutcome::Conclusive(g), MeasurementKind::Usd) => RecordEntry::Conclusive(g),
                (UsdOutcome::Conclusive(g), MeasurementKind::Use) => {
                    RecordEntry::Eliminated(g.flipped())
                }
            }
        })
        .collect();
    MeasurementRecord { kind, entries }
}

/// `(b, k_b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MqdsDeclaration {
    pub message: bool,
    pub key: BitString,
}

pub fn mqds_sign(key: &MqdsPrivateKey, b: bool) -> MqdsDeclaration {
    MqdsDeclaration {
        message: b,
        key: key.k[b as usize].clone(),
    }
}

pub fn mqds_mismatches(decl: &MqdsDeclaration, record: &MeasurementRecord) -> Result<usize> {
    if decl.key.len() != record.entries.len() {
        return Err(Error::LengthMismatch {
            expected: record.entries.len(),
            actual: decl.key.len(),
        });
    }
    Ok(decl
        .key
        .iter()
        .zip(&record.entries)
        .filter(|(bit, e)| e.contradicts(Sign::from_bit(*bit)))
        .count())
}

pub fn mqds_verify(
    decl: &MqdsDeclaration,
    record: &MeasurementRecord,
    params: &MqdsParams,
    role: Role,
) -> Result<Verdict> {
    Ok(verdict(mqds_mismatches(decl, record)?, params.limit(role)))
}

/// `exp(-2 (p_min - s_v p_USD / (p_USD - δ))² (p_USD - δ) L)`; an error when
/// `p_min` does not exceed the threshold term, where the bound says nothing.
pub fn mqds_forging_bound(
    p_min: f64,
    p_usd: f64,
    delta_usd: f64,
    s_v: f64,
    l: usize,
) -> Result<f64> {
    if !(delta_usd >= 0.0 && p_usd > delta_usd && p_usd <= 1.0) {
        return Err(invalid("p_usd", "need 0 <= delta_usd < p_usd <= 1"));
    }
    let eff = p_usd - delta_usd;
    let thr = s_v * p_usd / eff;
    if p_min <= thr {
        return Err(Error::VacuousBound(format!(
            "p_min = {p_min} does not exceed s_v p_USD / (p_USD - delta) = {thr}"
        )));
    }
    Ok((-2.0 * (p_min - thr).powi(2) * eff * l as f64).exp())
}

/// `exp(-½ p_USD² (s_v - s_a)² L)`.
pub fn mqds_repudiation_bound(p_usd: f64, s_a: f64, s_v: f64, l: usize) -> Result<f64> {
    if s_v <= s_a {
        return Err(Error::ThresholdOrder { s_a, s_v });
    }
    Ok((-0.5 * p_usd.powi(2) * (s_v - s_a).powi(2) * l as f64).exp())
}

/// Honest distribution through the multiport and immediate measurement.
fn distribute<R: Rng + ?Sized>(
    params: &MqdsParams,
    rng: &mut R,
) -> Result<(MqdsPrivateKey, bool, MultiportOutcome)> {
    let key = mqds_keygen(params.l, params.alpha, rng);
    let b = rng.random_bool(0.5);
    let train = mqds_encode(&key, b)?;
    let out = mqds_multiport(&train, &train, rng)?;
    Ok((key, b, out))
}

/// Honest run with both recipients verifying; `(direct, forwarded)`.
pub fn honest_trial<R: Rng + ?Sized>(
    params: &MqdsParams,
    rng: &mut R,
) -> Result<(Verdict, Verdict)> {
    let (key, b, out) = distribute(params, rng)?;
    let rb = mqds_measure(&out.to_bob, params.measurement, params.noise, rng);
    let rc = mqds_measure(&out.to_charlie, params.measurement, params.noise, rng);
    let decl = mqds_sign(&key, b);
    Ok((
        mqds_verify(&decl, &rb, params, Role::Direct)?,
        mqds_verify(&decl, &rc, params, Role::Forwarded)?,
    ))
}

/// Bob min-error-guesses every position of his train and forwards the
/// guesses to Charlie as a signature.
pub fn forge_trial<R: Rng + ?Sized>(params: &MqdsParams, rng: &mut R) -> Result<bool> {
    let (_, b, out) = distribute(params, rng)?;
    let guess: Vec<bool> = out
        .to_bob
        .modes
        .iter()
        .map(|m| match m {
            Some(s) => min_error_guess(*s, params.alpha, rng).to_bit(),
            None => rng.random_bool(0.5),
        })
        .collect();
    let rc = mqds_measure(&out.to_charlie, params.measurement, params.noise, rng);
    let decl = MqdsDeclaration {
        message: b,
        key: BitString::from_bits(&guess),
    };
    Ok(mqds_verify(&decl, &rc, params, Role::Forwarded)?.accept)
}

/// Alice sends honest trains, then declares `k_b` with `j` uniformly chosen
/// bits flipped. Succeeds iff Bob accepts directly and Charlie rejects.
pub fn repudiation_trial<R: Rng + ?Sized>(
    params: &MqdsParams,
    j: usize,
    rng: &mut R,
) -> Result<bool> {
    if j > params.l {
        return Err(invalid(
            "injections",
            format!("at most L = {} positions", params.l),
        ));
    }
    let (key, b, out) = distribute(params, rng)?;
    let rb = mqds_measure(&out.to_bob, params.measurement, params.noise, rng);
    let rc = mqds_measure(&out.to_charlie, params.measurement, params.noise, rng);
    let mut decl = mqds_sign(&key, b);
    for i in sample(rng, params.l, j) {
        decl.key.flip(i);
    }
    let direct = mqds_verify(&decl, &rb, params, Role::Direct)?;
    let forwarded = mqds_verify(&decl, &rc, params, Role::Forwarded)?;
    Ok(direct.accept && !forwarded.accept)
}

/// Null-port clicks when Charlie's train differs from Bob's at `j` uniformly
/// chosen positions.
pub fn tamper_clicks<R: Rng + ?Sized>(params: &MqdsParams, j: usize, rng: &mut R) -> Result<usize> {
    if j > params.l {
        return Err(invalid(
            "injections",
            format!("at most L = {} positions", params.l),
        ));
    }
    let key = mqds_keygen(params.l, params.alpha, rng);
    let b = rng.random_bool(0.5);
    let train_b = mqds_encode(&key, b)?;
    let mut k = key.k[b as usize].clone();
    for i in sample(rng, params.l, j) {
        k.flip(i);
    }
    let train_c = CoherentTrain::from_bits(params.alpha, &k)?;
    Ok(mqds_multiport(&train_b, &train_c, rng)?.clicks.len())
}
