//! Classical signatures over secret channels with recipient-side symmetrisation.
//!
//! Alice privately sends `A^0_B, A^1_B` to Bob and `A^0_C, A^1_C` to Charlie.
//! Each recipient then forwards a uniformly chosen half of each of its strings
//! to the other and never tests the positions it gave away. Every one of the
//! `2L` positions of a declaration is therefore tested by exactly one recipient.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{invalid, Error, Result};
use crate::threshold::{check_thresholds, verdict, Role, Verdict};

#[derive(Clone, Debug, PartialEq)]
pub struct P2SenderKeys {
    /// `A^b_B`, indexed by message bit.
    pub a_b: [BitString; 2],
    /// `A^b_C`, indexed by message bit.
    pub a_c: [BitString; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Recipient {
    Bob,
    Charlie,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecipientHolding {
    pub recipient: Recipient,
    /// The string received from Alice, per message bit.
    pub own: [BitString; 2],
    /// Own positions given to the peer.
    pub forwarded: [BitString; 2],
    /// Peer's string; meaningful only where `peer_known` is set.
    pub peer: [BitString; 2],
    pub peer_known: [BitString; 2],
    symmetrised: bool,
}

impl RecipientHolding {
    fn new(recipient: Recipient, own: [BitString; 2]) -> Self {
        let l = own[0].len();
        Self {
            recipient,
            own,
            forwarded: [BitString::zeros(l), BitString::zeros(l)],
            peer: [BitString::zeros(l), BitString::zeros(l)],
            peer_known: [BitString::zeros(l), BitString::zeros(l)],
            symmetrised: false,
        }
    }

    pub fn len(&self) -> usize {
        self.own[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_symmetrised(&self) -> bool {
        self.symmetrised
    }

    /// Own positions this recipient tests for message `m`.
    pub fn kept(&self, m: bool) -> BitString {
        self.forwarded[m as usize].not()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub s_a: f64,
    pub s_v: f64,
    pub l: usize,
}

impl ThresholdConfig {
    pub fn new(s_a: f64, s_v: f64, l: usize) -> Result<Self> {
        check_thresholds(s_a, s_v, 0.5)?;
        Ok(Self { s_a, s_v, l })
    }

    pub fn limit(&self, role: Role) -> f64 {
        let s = match role {
            Role::Direct => self.s_a,
            Role::Forwarded => self.s_v,
        };
        s * self.l as f64
    }
}

/// `(m, A^m_B, A^m_C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct P2Declaration {
    pub message: bool,
    pub a_b: BitString,
    pub a_c: BitString,
}

impl P2Declaration {
    pub fn len(&self) -> usize {
        self.a_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flips declaration position `i` in `0..2L`; `i < L` addresses `A_B`.
    pub fn flip(&mut self, i: usize) {
        let l = self.len();
        if i < l {
            self.a_b.flip(i);
        } else {
            self.a_c.flip(i - l);
        }
    }
}

pub fn p2_distribute<R: Rng + ?Sized>(
    l: usize,
    rng: &mut R,
) -> Result<(P2SenderKeys, RecipientHolding, RecipientHolding)> {
    if l < 2 || l % 2 != 0 {
        return Err(invalid(
            "L",
            format!("must be even and at least 2, got {l}"),
        ));
    }
    let keys = P2SenderKeys {
        a_b: [BitString::random(l, rng), BitString::random(l, rng)],
        a_c: [BitString::random(l, rng), BitString::random(l, rng)],
    };
    let bob = RecipientHolding::new(Recipient::Bob, keys.a_b.clone());
    let charlie = RecipientHolding::new(Recipient::Charlie, keys.a_c.clone());
    Ok((keys, bob, charlie))
}

fn random_half<R: Rng + ?Sized>(l: usize, rng: &mut R) -> BitString {
    let mut mask = BitString::zeros(l);
    for i in sample(rng, l, l / 2) {
        mask.set(i, true);
    }
    mask
}

fn forward(
    from: &mut RecipientHolding,
    to: &mut RecipientHolding,
    b: usize,
    mask: BitString,
) -> Result<()> {
    to.peer[b] = from.own[b].and(&mask)?;
    to.peer_known[b] = mask.clone();
    from.forwarded[b] = mask;
    Ok(())
}

/// Each recipient forwards a uniform half of each of its strings to the other.
pub fn p2_symmetrise<R: Rng + ?Sized>(
    bob: &mut RecipientHolding,
    charlie: &mut RecipientHolding,
    rng: &mut R,
) -> Result<()> {
    if bob.symmetrised || charlie.symmetrised {
        return Err(Error::AlreadySymmetrised);
    }
    if bob.len() != charlie.len() {
        return Err(Error::LengthMismatch {
            expected: bob.len(),
            actual: charlie.len(),
        });
    }
    let l = bob.len();
    for b in 0..2 {
        forward(bob, charlie, b, random_half(l, rng))?;
        forward(charlie, bob, b, random_half(l, rng))?;
    }
    bob.symmetrised = true;
    charlie.symmetrised = true;
    Ok(())
}

pub fn p2_sign(keys: &P2SenderKeys, m: bool) -> P2Declaration {
    P2Declaration {
        message: m,
        a_b: keys.a_b[m as usize].clone(),
        a_c: keys.a_c[m as usize].clone(),
    }
}

/// Mismatches on the positions `holding` tests: its kept own half and the
/// peer half it received.
pub fn p2_mismatches(decl: &P2Declaration, holding: &RecipientHolding) -> Result<usize> {
    let m = decl.message as usize;
    let (own_decl, peer_decl) = match holding.recipient {
        Recipient::Bob => (&decl.a_b, &decl.a_c),
        Recipient::Charlie => (&decl.a_c, &decl.a_b),
    };
    let kept = holding.kept(decl.message);
    Ok(own_decl.masked_distance(&holding.own[m], &kept)?
        + peer_decl.masked_distance(&holding.peer[m], &holding.peer_known[m])?)
}

pub fn p2_verify(
    decl: &P2Declaration,
    holding: &RecipientHolding,
    cfg: &ThresholdConfig,
    role: Role,
) -> Result<Verdict> {
    if decl.len() != holding.len() || decl.a_c.len() != holding.len() {
        return Err(Error::LengthMismatch {
            expected: holding.len(),
            actual: decl.len(),
        });
    }
    if cfg.l != holding.len() {
        return Err(Error::LengthMismatch {
            expected: holding.len(),
            actual: cfg.l,
        });
    }
    Ok(verdict(p2_mismatches(decl, holding)?, cfg.limit(role)))
}

fn check_fraction(s_v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&s_v) {
        return Err(invalid("s_v", "must lie in [0, 1)"));
    }
    Ok(())
}

/// `(1/2)^{s_v L}`.
pub fn p2_repudiation_bound(s_v: f64, l: usize) -> Result<f64> {
    check_fraction(s_v)?;
    Ok(0.5f64.powf(s_v * l as f64))
}

/// `exp(-(1/2 - s_v)² L)`.
pub fn p2_forging_bound(s_v: f64, l: usize) -> Result<f64> {
    check_fraction(s_v)?;
    if s_v >= 0.5 {
        return Err(invalid("s_v", "forging bound needs s_v < 1/2"));
    }
    Ok((-(0.5 - s_v).powi(2) * l as f64).exp())
}

/// One forging attempt: Bob declares message `m` to Charlie using `A^m_B`,
/// the half of `A^m_C` Charlie forwarded him, and uniform guesses elsewhere.
pub fn forge_trial<R: Rng + ?Sized>(cfg: &ThresholdConfig, rng: &mut R) -> Result<bool> {
    let (_, mut bob, mut charlie) = p2_distribute(cfg.l, rng)?;
    p2_symmetrise(&mut bob, &mut charlie, rng)?;
    let m = rng.random_bool(0.5);
    let b = m as usize;
    let guess = BitString::random(cfg.l, rng);
    let known = &bob.peer_known[b];
    let a_c = bob.peer[b].and(known)?.xor(&guess.and(&known.not())?)?;
    let decl = P2Declaration {
        message: m,
        a_b: bob.own[b].clone(),
        a_c,
    };
    Ok(p2_verify(&decl, &charlie, cfg, Role::Forwarded)?.accept)
}

/// One repudiation attempt: Alice flips `j` of the `2L` declared positions,
/// chosen uniformly. Succeeds iff Bob accepts directly and Charlie rejects the
/// forwarded copy.
pub fn repudiation_trial<R: Rng + ?Sized>(
    cfg: &ThresholdConfig,
    j: usize,
    rng: &mut R,
) -> Result<bool> {
    if j > 2 * cfg.l {
        return Err(invalid(
            "injections",
            format!("at most 2L = {} positions", 2 * cfg.l),
        ));
    }
    let (keys, mut bob, mut charlie) = p2_distribute(cfg.l, rng)?;
    p2_symmetrise(&mut bob, &mut charlie, rng)?;
    let mut decl = p2_sign(&keys, rng.random_bool(0.5));
    for i in sample(rng, 2 * cfg.l, j) {
        decl.flip(i);
    }
    let direct = p2_verify(&decl, &bob, cfg, Role::Direct)?;
    let forwarded = p2_verify(&decl, &charlie, cfg, Role::Forwarded)?;
    Ok(direct.accept && !forwarded.accept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn setup(l: usize, seed: u64) -> (P2SenderKeys, RecipientHolding, RecipientHolding) {
        let mut rng = seeded(seed);
        let (k, mut b, mut c) = p2_distribute(l, &mut rng).unwrap();
        p2_symmetrise(&mut b, &mut c, &mut rng).unwrap();
        (k, b, c)
    }

    #[test]
    fn distribution_shape_and_errors() {
        let (k, b, c) = p2_distribute(4, &mut seeded(1)).unwrap();
        assert_eq!(b.own, k.a_b);
        assert_eq!(c.own, k.a_c);
        assert!(p2_distribute(3, &mut seeded(1)).is_err());
        assert!(p2_distribute(0, &mut seeded(1)).is_err());
        assert_eq!(
            p2_distribute(8, &mut seeded(5)).unwrap(),
            p2_distribute(8, &mut seeded(5)).unwrap()
        );
    }

    #[test]
    fn symmetrisation_partitions_positions() {
        let (_, b, c) = setup(4, 2);
        for m in [false, true] {
            let bi = m as usize;
            assert_eq!(b.forwarded[bi].weight(), 2);
            assert_eq!(b.kept(m).weight(), 2);
            assert_eq!(b.kept(m).xor(&b.forwarded[bi]).unwrap(), BitString::ones(4));
            assert_eq!(c.peer_known[bi], b.forwarded[bi]);
            assert_eq!(b.peer_known[bi], c.forwarded[bi]);
        }
        let (_, mut b, mut c) = setup(4, 3);
        assert_eq!(
            p2_symmetrise(&mut b, &mut c, &mut seeded(0)),
            Err(Error::AlreadySymmetrised)
        );
    }

    #[test]
    fn every_position_tested_by_exactly_one_recipient() {
        let (_, b, c) = setup(16, 4);
        for m in [false, true] {
            let bi = m as usize;
            // A_B positions: Bob tests kept, Charlie tests received.
            assert_eq!(
                b.kept(m).xor(&c.peer_known[bi]).unwrap(),
                BitString::ones(16)
            );
            assert_eq!(
                c.kept(m).xor(&b.peer_known[bi]).unwrap(),
                BitString::ones(16)
            );
        }
    }

    #[test]
    fn honest_signature_accepted_in_both_roles() {
        for l in (2..=64).step_by(2) {
            let (k, b, c) = setup(l, l as u64);
            let cfg = ThresholdConfig::new(0.0, 0.1, l).unwrap();
            for m in [false, true] {
                let d = p2_sign(&k, m);
                for h in [&b, &c] {
                    for role in [Role::Direct, Role::Forwarded] {
                        assert_eq!(
                            p2_verify(&d, h, &cfg, role).unwrap(),
                            Verdict {
                                accept: true,
                                mismatches: 0
                            }
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn flipped_declaration_rejected() {
        let (k, b, c) = setup(16, 6);
        let cfg = ThresholdConfig::new(0.0, 0.2, 16).unwrap();
        let mut d = p2_sign(&k, true);
        d.a_b = d.a_b.not();
        d.a_c = d.a_c.not();
        for h in [&b, &c] {
            let v = p2_verify(&d, h, &cfg, Role::Forwarded).unwrap();
            assert_eq!(v.mismatches, 16);
            assert!(!v.accept);
            assert!(!p2_verify(&d, h, &cfg, Role::Direct).unwrap().accept);
        }
    }

    #[test]
    fn exact_threshold_count_rejected_as_forwarded() {
        let (k, b, _) = setup(20, 7);
        let cfg = ThresholdConfig::new(0.0, 0.1, 20).unwrap();
        let mut d = p2_sign(&k, false);
        // ceil(0.1 * 20) = 2 flips on positions Bob tests.
        for i in b.kept(false).ones_positions().into_iter().take(2) {
            d.a_b.flip(i);
        }
        let v = p2_verify(&d, &b, &cfg, Role::Forwarded).unwrap();
        assert_eq!(v.mismatches, 2);
        assert!(!v.accept);
    }

    #[test]
    fn forwarded_positions_are_not_tested() {
        let (k, b, _) = setup(16, 8);
        let cfg = ThresholdConfig::new(0.0, 0.1, 16).unwrap();
        let mut d = p2_sign(&k, true);
        for i in b.forwarded[1].ones_positions() {
            d.a_b.flip(i);
        }
        assert_eq!(p2_verify(&d, &b, &cfg, Role::Direct).unwrap().mismatches, 0);
    }

    #[test]
    fn key_separation() {
        let mut total = 0usize;
        let runs = 200;
        for s in 0..runs {
            let (k, b, _) = setup(64, 100 + s);
            let mut d = p2_sign(&k, false);
            d.message = true;
            total += p2_mismatches(&d, &b).unwrap();
        }
        // 64 tested positions, each a mismatch with probability 1/2.
        let mean = total as f64 / runs as f64;
        assert!(
            (mean - 32.0).abs() < 3.0 * (16.0 / runs as f64).sqrt(),
            "mean {mean}"
        );
    }

    #[test]
    fn bounds() {
        assert!((p2_repudiation_bound(0.1, 100).unwrap() - 9.765_625e-4).abs() < 1e-15);
        assert_eq!(p2_repudiation_bound(0.1, 0).unwrap(), 1.0);
        assert!((p2_forging_bound(0.1, 100).unwrap() - (-16.0f64).exp()).abs() < 1e-20);
        assert_eq!(p2_forging_bound(0.1, 0).unwrap(), 1.0);
        assert!(p2_forging_bound(0.5, 10).is_err());
        assert!(ThresholdConfig::new(0.2, 0.1, 10).is_err());
    }

    #[test]
    fn zero_injections_never_repudiate() {
        let cfg = ThresholdConfig::new(0.0, 0.1, 32).unwrap();
        let mut rng = seeded(9);
        assert!((0..500).all(|_| !repudiation_trial(&cfg, 0, &mut rng).unwrap()));
    }

    #[test]
    fn kept_half_is_uniform_from_senders_view() {
        // Six possible kept halves of 4 positions; chi-square with 5 dof.
        let runs = 100_000u64;
        let mut counts = std::collections::BTreeMap::new();
        for s in 0..runs {
            let (_, b, _) = setup(4, 1_000 + s);
            *counts.entry(b.kept(false).to_string()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        let e = runs as f64 / 6.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 0.999 quantile of chi-square(5) is 20.5.
        assert!(chi2 < 20.5, "chi2 {chi2}");
    }

    proptest! {
        #[test]
        fn bounds_monotone_in_l(s_v in 0.01f64..0.49, l in 0usize..500) {
            prop_assert!(p2_repudiation_bound(s_v, l + 2).unwrap() < p2_repudiation_bound(s_v, l).unwrap());
            prop_assert!(p2_forging_bound(s_v, l + 2).unwrap() < p2_forging_bound(s_v, l).unwrap());
        }
    }
}
