//! Quantum public-key signatures from fingerprint states, three parties.
//!
//! Alice's private key is `M` pairs of `L`-bit strings; the public key is
//! the fingerprint state of each string. Recipients check their public-key
//! copies with SWAP tests before use and verify a signature by SWAP-testing
//! freshly prepared fingerprints of the revealed strings against their copies.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{invalid, Error, Result};
use crate::p2::Recipient;
use crate::quantum::code::{codeword_overlap, LinearCode};
use crate::quantum::state::{swap_outcome_one, PureState};
use crate::threshold::{check_thresholds, verdict, Role, Verdict};

/// A public-key state: an honest fingerprint (by codeword) or an arbitrary state.
#[derive(Clone, Debug, PartialEq)]
pub enum KeyState {
    Fingerprint(BitString),
    Arbitrary(PureState),
}

impl KeyState {
    pub fn to_pure(&self) -> Result<PureState> {
        match self {
            KeyState::Arbitrary(s) => Ok(s.clone()),
            KeyState::Fingerprint(cw) => {
                let a = 1.0 / (cw.len() as f64).sqrt();
                PureState::from_real(
                    &cw.iter()
                        .map(|b| if b { -a } else { a })
                        .collect::<Vec<_>>(),
                )
            }
        }
    }

    pub fn overlap_sq(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (KeyState::Fingerprint(a), KeyState::Fingerprint(b)) => {
                Ok(codeword_overlap(a.hamming_distance(b)?, a.len()).powi(2))
            }
            _ => self.to_pure()?.overlap_sq(&other.to_pure()?),
        }
    }

    /// Samples a SWAP test against `other`; `true` is outcome 1.
    pub fn swap_test<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> Result<bool> {
        let p = swap_outcome_one(self.overlap_sq(other)?);
        Ok(p > 0.0 && rng.random_bool(p))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcPrivateKey {
    /// `{k^i_0, k^i_1}` for `i = 0..M`.
    pub pairs: Vec<[BitString; 2]>,
}

impl GcPrivateKey {
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    /// Public state for `k^i_b`.
    pub fn public_state(&self, i: usize, b: bool, code: &LinearCode) -> Result<KeyState> {
        Ok(KeyState::Fingerprint(
            code.encode(&self.pairs[i][b as usize])?,
        ))
    }

    /// One copy of all `2M` public states, index `2i + b`.
    pub fn public_copy(&self, holder: Recipient, code: &LinearCode) -> Result<GcPublicKeyCopy> {
        let mut states = Vec::with_capacity(2 * self.m());
        for i in 0..self.m() {
            for b in [false, true] {
                states.push(self.public_state(i, b, code)?);
            }
        }
        Ok(GcPublicKeyCopy { holder, states })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcPublicKeyCopy {
    pub holder: Recipient,
    pub states: Vec<KeyState>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcThresholds {
    pub s_a: f64,
    pub s_v: f64,
    pub m: usize,
}

impl GcThresholds {
    pub fn new(s_a: f64, s_v: f64, m: usize) -> Result<Self> {
        check_thresholds(s_a, s_v, 1.0)?;
        Ok(Self { s_a, s_v, m })
    }

    pub fn limit(&self, role: Role) -> f64 {
        let s = match role {
            Role::Direct => self.s_a,
            Role::Forwarded => self.s_v,
        };
        s * self.m as f64
    }
}

pub fn gc_keygen<R: Rng + ?Sized>(
    m: usize,
    l: usize,
    code: &LinearCode,
    rng: &mut R,
) -> Result<GcPrivateKey> {
    if code.input_len() != l {
        return Err(Error::LengthMismatch {
            expected: code.input_len(),
            actual: l,
        });
    }
    if m == 0 {
        return Err(invalid("M", "must be positive"));
    }
    Ok(GcPrivateKey {
        pairs: (0..m)
            .map(|_| [BitString::random(l, rng), BitString::random(l, rng)])
            .collect(),
    })
}

/// A recipient's single retained copy per public state; `None` once consumed.
#[derive(Clone, Debug, PartialEq)]
pub struct RetainedKeys {
    pub holder: Recipient,
    pub states: Vec<Option<KeyState>>,
}

impl RetainedKeys {
    pub fn consumed(&self) -> usize {
        self.states.iter().filter(|s| s.is_none()).count()
    }

    /// Replaces each retained state, independently with probability `p`, by
    /// the fingerprint of a uniformly random string.
    pub fn apply_noise<R: Rng + ?Sized>(
        &mut self,
        p: f64,
        code: &LinearCode,
        rng: &mut R,
    ) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("noise", "must lie in [0, 1]"));
        }
        if p == 0.0 {
            return Ok(());
        }
        for s in self.states.iter_mut().flatten() {
            if rng.random_bool(p) {
                *s = KeyState::Fingerprint(code.encode(&BitString::random(code.input_len(), rng))?);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyTest {
    SelfTest(Recipient),
    /// Cross-test round `t` (1-based), performed by the named recipient.
    Cross {
        round: usize,
        by: Recipient,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistributionOutcome {
    Pass {
        bob: RetainedKeys,
        charlie: RetainedKeys,
    },
    Abort {
        test: KeyTest,
        state: usize,
    },
}

impl DistributionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, DistributionOutcome::Pass { .. })
    }
}

/// Runs the key-validation SWAP tests on `1 + r` copies per recipient.
///
/// For each state: each recipient self-tests copies 0 and 1, then round
/// `t = 1..=r` SWAP-tests Bob's copy `t` against Charlie's copy `t`, Bob
/// testing on odd rounds and Charlie on even ones. Copy 0 is retained.
pub fn gc_distribute_and_test<R: Rng + ?Sized>(
    bob: Vec<GcPublicKeyCopy>,
    charlie: Vec<GcPublicKeyCopy>,
    rng: &mut R,
) -> Result<DistributionOutcome> {
    if bob.len() < 2 || bob.len() != charlie.len() {
        return Err(Error::CopyCount {
            expected: bob.len().max(2),
            actual: charlie.len(),
        });
    }
    let n_states = bob[0].states.len();
    if let Some(bad) = bob
        .iter()
        .chain(&charlie)
        .map(|c| c.states.len())
        .find(|&n| n != n_states)
    {
        return Err(Error::CopyCount {
            expected: n_states,
            actual: bad,
        });
    }
    let rounds = bob.len() - 1;
    for s in 0..n_states {
        for (who, copies) in [(Recipient::Bob, &bob), (Recipient::Charlie, &charlie)] {
            if copies[0].states[s].swap_test(&copies[1].states[s], rng)? {
                return Ok(DistributionOutcome::Abort {
                    test: KeyTest::SelfTest(who),
                    state: s,
                });
            }
        }
        for t in 1..=rounds {
            let by = if t % 2 == 1 {
                Recipient::Bob
            } else {
                Recipient::Charlie
            };
            if bob[t].states[s].swap_test(&charlie[t].states[s], rng)? {
                return Ok(DistributionOutcome::Abort {
                    test: KeyTest::Cross { round: t, by },
                    state: s,
                });
            }
        }
    }
    let retain = |copies: Vec<GcPublicKeyCopy>, holder| RetainedKeys {
        holder,
        states: copies
            .into_iter()
            .next()
            .expect("at least two copies")
            .states
            .into_iter()
            .map(Some)
            .collect(),
    };
    Ok(DistributionOutcome::Pass {
        bob: retain(bob, Recipient::Bob),
        charlie: retain(charlie, Recipient::Charlie),
    })
}

/// `(b, k^1_b, ..., k^M_b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GcDeclaration {
    pub message: bool,
    pub strings: Vec<BitString>,
}

/// Holds the private key and refuses to sign twice.
#[derive(Clone, Debug)]
pub struct GcSigner {
    key: GcPrivateKey,
    used: bool,
}

impl GcSigner {
    pub fn new(key: GcPrivateKey) -> Self {
        Self { key, used: false }
    }

    pub fn key(&self) -> &GcPrivateKey {
        &self.key
    }

    pub fn is_consumed(&self) -> bool {
        self.used
    }

    pub fn sign(&mut self, b: bool) -> Result<GcDeclaration> {
        if self.used {
            return Err(Error::KeyConsumed);
        }
        self.used = true;
        Ok(GcDeclaration {
            message: b,
            strings: self
                .key
                .pairs
                .iter()
                .map(|p| p[b as usize].clone())
                .collect(),
        })
    }
}

/// Mismatch = SWAP outcome 1 between the declared string's fingerprint and
/// the retained copy. A copy is consumed on outcome 1; a consumed copy counts
/// as a mismatch.
pub fn gc_verify<R: Rng + ?Sized>(
    decl: &GcDeclaration,
    retained: &mut RetainedKeys,
    code: &LinearCode,
    thresholds: &GcThresholds,
    role: Role,
    rng: &mut R,
) -> Result<Verdict> {
    let m = decl.strings.len();
    if m != thresholds.m || 2 * m != retained.states.len() {
        return Err(Error::LengthMismatch {
            expected: retained.states.len() / 2,
            actual: m,
        });
    }
    let mut count = 0;
    for (i, k) in decl.strings.iter().enumerate() {
        let fresh = KeyState::Fingerprint(code.encode(k)?);
        let slot = &mut retained.states[2 * i + decl.message as usize];
        match slot {
            None => count += 1,
            Some(state) => {
                if fresh.swap_test(state, rng)? {
                    count += 1;
                    *slot = None;
                }
            }
        }
    }
    Ok(verdict(count, thresholds.limit(role)))
}

/// Holevo condition `T·n < L`.
pub fn gc_holevo_budget(t: usize, n_qubits: usize, l: usize) -> bool {
    t.saturating_mul(n_qubits) < l
}

/// Key bits a forger holding `t` copies of `n`-qubit states may learn.
pub fn holevo_revealed_bits(t: usize, n_qubits: usize, l: usize) -> usize {
    t.saturating_mul(n_qubits).min(l)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GcSetup {
    pub code: LinearCode,
    pub m: usize,
    pub rounds: usize,
    pub thresholds: GcThresholds,
}

impl GcSetup {
    pub fn new(code: LinearCode, m: usize, rounds: usize, s_a: f64, s_v: f64) -> Result<Self> {
        if rounds == 0 {
            return Err(invalid(
                "rounds",
                "at least one cross-test round is required",
            ));
        }
        let thresholds = GcThresholds::new(s_a, s_v, m)?;
        Ok(Self {
            code,
            m,
            rounds,
            thresholds,
        })
    }

    fn honest_copies(&self, key: &GcPrivateKey, holder: Recipient) -> Result<Vec<GcPublicKeyCopy>> {
        let c = key.public_copy(holder, &self.code)?;
        Ok(vec![c; self.rounds + 1])
    }

    /// Keygen plus honest distribution and testing.
    pub fn honest_run<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(GcSigner, RetainedKeys, RetainedKeys)> {
        let key = gc_keygen(self.m, self.code.input_len(), &self.code, rng)?;
        let bob = self.honest_copies(&key, Recipient::Bob)?;
        let charlie = self.honest_copies(&key, Recipient::Charlie)?;
        match gc_distribute_and_test(bob, charlie, rng)? {
            DistributionOutcome::Pass { bob, charlie } => Ok((GcSigner::new(key), bob, charlie)),
            DistributionOutcome::Abort { .. } => {
                unreachable!("identical copies never fail a SWAP test")
            }
        }
    }

    /// Alice gives Charlie, for `tampered` of the public states, copies with
    /// overlap `c` to Bob's. Returns `true` if the key test passes.
    pub fn tamper_trial<R: Rng + ?Sized>(
        &self,
        tampered: usize,
        c: f64,
        rng: &mut R,
    ) -> Result<bool> {
        let key = gc_keygen(self.m, self.code.input_len(), &self.code, rng)?;
        let bob = self.honest_copies(&key, Recipient::Bob)?;
        let mut charlie_copy = key.public_copy(Recipient::Charlie, &self.code)?;
        let n_states = charlie_copy.states.len();
        if tampered > n_states {
            return Err(invalid(
                "injections",
                format!("at most {n_states} public states"),
            ));
        }
        for s in sample(rng, n_states, tampered) {
            let honest = charlie_copy.states[s].to_pure()?;
            charlie_copy.states[s] = KeyState::Arbitrary(honest.with_overlap(c, rng)?);
        }
        let charlie = vec![charlie_copy; self.rounds + 1];
        Ok(gc_distribute_and_test(bob, charlie, rng)?.passed())
    }

    /// Bob, holding `t` copies of each public state, learns `min(t·n, L)`
    /// uniformly chosen bits of each `k^i_b`, guesses the rest, and forwards
    /// the result to Charlie.
    pub fn forge_trial<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Result<bool> {
        let (signer, _, mut charlie) = self.honest_run(rng)?;
        let l = self.code.input_len();
        let revealed = holevo_revealed_bits(t, self.code.qubits(), l);
        let b = rng.random_bool(0.5);
        let strings = signer
            .key()
            .pairs
            .iter()
            .map(|pair| {
                let mut guess = BitString::random(l, rng);
                for j in sample(rng, l, revealed) {
                    guess.set(j, pair[b as usize].get(j));
                }
                guess
            })
            .collect();
        let decl = GcDeclaration {
            message: b,
            strings,
        };
        Ok(gc_verify(
            &decl,
            &mut charlie,
            &self.code,
            &self.thresholds,
            Role::Forwarded,
            rng,
        )?
        .accept)
    }

    /// Honest signature with symmetric noise `p` on both retained key sets.
    /// Returns Bob's (direct) and Charlie's (forwarded) verdicts.
    pub fn transfer_trial<R: Rng + ?Sized>(
        &self,
        p: f64,
        rng: &mut R,
    ) -> Result<(Verdict, Verdict)> {
        let (mut signer, mut bob, mut charlie) = self.honest_run(rng)?;
        bob.apply_noise(p, &self.code, rng)?;
        charlie.apply_noise(p, &self.code, rng)?;
        let decl = signer.sign(rng.random_bool(0.5))?;
        let vb = gc_verify(
            &decl,
            &mut bob,
            &self.code,
            &self.thresholds,
            Role::Direct,
            rng,
        )?;
        let vc = gc_verify(
            &decl,
            &mut charlie,
            &self.code,
            &self.thresholds,
            Role::Forwarded,
            rng,
        )?;
        Ok((vb, vc))
    }
}
