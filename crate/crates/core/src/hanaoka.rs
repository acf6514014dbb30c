//! Trusted-authority polynomial signatures over `F_q`.
//!
//! The authority samples a master polynomial `F(x, y_1..y_ω, z)` and, for each
//! user `U_i` with a secret random vector `v_i ∈ F_q^ω`, hands out
//!
//! * the signing key `s_i = F(U_i, y, z)`,
//! * the verification keys `v_i` and `ṽ_i = F(x, v_i, z)`.
//!
//! A signature on `m` is `α = s_i(y, m)`. Verifier `U_j` accepts iff
//! `ṽ_j(U_i, m) = α(v_j)`; both sides equal `F(U_i, v_j, m)` when honest.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{binding, check_modulus, Binding, FieldElement, MultivariatePolynomial, Var};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HanaokaParams {
    pub n: usize,
    pub omega: usize,
    pub psi: u32,
    pub q: u64,
}

impl HanaokaParams {
    pub fn validate(&self) -> Result<()> {
        check_modulus(self.q)?;
        if self.n < 3 {
            return Err(invalid("n", "at least 3 users are required"));
        }
        if self.q <= self.n as u64 {
            return Err(invalid(
                "q",
                format!(
                    "q = {} must exceed the number of users n = {}",
                    self.q, self.n
                ),
            ));
        }
        if self.omega == 0 {
            return Err(invalid("omega", "must be at least 1"));
        }
        if self.omega > u16::MAX as usize {
            return Err(invalid("omega", "too many y variables"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct AuthorityState {
    pub params: HanaokaParams,
    master: MultivariatePolynomial,
    registry: Vec<FieldElement>,
}

impl AuthorityState {
    pub fn master(&self) -> &MultivariatePolynomial {
        &self.master
    }

    pub fn registry(&self) -> &[FieldElement] {
        &self.registry
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UserKeys {
    pub identity: FieldElement,
    pub signing_key: MultivariatePolynomial,
    pub verification_vector: Vec<FieldElement>,
    pub verification_poly: MultivariatePolynomial,
    /// Public identities of all registered users.
    pub registry: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HanaokaSignature {
    pub message: FieldElement,
    pub alpha: MultivariatePolynomial,
}

fn y_binding(vector: &[FieldElement]) -> Binding {
    vector
        .iter()
        .enumerate()
        .map(|(j, &v)| (Var::Y(j as u16 + 1), v))
        .collect()
}

/// Keys for user `identity` derived from the master polynomial.
pub fn derive_user_keys(
    master: &MultivariatePolynomial,
    identity: FieldElement,
    verification_vector: Vec<FieldElement>,
    registry: Vec<FieldElement>,
) -> Result<UserKeys> {
    let signing_key = master.restrict(&binding(&[(Var::X, identity)]))?;
    let verification_poly = master.restrict(&y_binding(&verification_vector))?;
    Ok(UserKeys {
        identity,
        signing_key,
        verification_vector,
        verification_poly,
        registry,
    })
}

/// Samples the master polynomial and issues keys to users `U_i = i`, `i = 1..=n`.
pub fn setup<R: Rng + ?Sized>(
    params: HanaokaParams,
    rng: &mut R,
) -> Result<(AuthorityState, Vec<UserKeys>)> {
    params.validate()?;
    let q = params.q;
    let master = MultivariatePolynomial::sample_master(params.n, params.omega, params.psi, q, rng)?;
    let registry: Vec<FieldElement> = (1..=params.n as u64)
        .map(|i| FieldElement::reduced(i, q))
        .collect();
    let mut users = Vec::with_capacity(params.n);
    for &identity in &registry {
        let v: Vec<FieldElement> = (0..params.omega)
            .map(|_| FieldElement::random_unchecked(q, rng))
            .collect();
        users.push(derive_user_keys(&master, identity, v, registry.clone())?);
    }
    Ok((
        AuthorityState {
            params,
            master,
            registry,
        },
        users,
    ))
}

impl UserKeys {
    pub fn modulus(&self) -> u64 {
        self.identity.modulus()
    }

    pub fn sign(&self, message: FieldElement) -> Result<HanaokaSignature> {
        if message.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch(self.modulus(), message.modulus()));
        }
        let alpha = self.signing_key.restrict(&binding(&[(Var::Z, message)]))?;
        Ok(HanaokaSignature { message, alpha })
    }

    /// Both sides of the verification equation, `(r1, r2)`.
    pub fn verification_values(
        &self,
        signer: FieldElement,
        sig: &HanaokaSignature,
    ) -> Result<(FieldElement, FieldElement)> {
        if !self.registry.contains(&signer) {
            return Err(Error::UnknownSigner(signer.value()));
        }
        let r1 = self
            .verification_poly
            .eval(&binding(&[(Var::X, signer), (Var::Z, sig.message)]))?;
        if sig.alpha.vars().len() != self.verification_vector.len() {
            return Err(Error::LengthMismatch {
                expected: self.verification_vector.len(),
                actual: sig.alpha.vars().len(),
            });
        }
        let r2 = sig.alpha.eval(&y_binding(&self.verification_vector))?;
        Ok((r1, r2))
    }

    pub fn verify(&self, signer: FieldElement, sig: &HanaokaSignature) -> Result<bool> {
        let (r1, r2) = self.verification_values(signer, sig)?;
        Ok(r1 == r2)
    }
}

/// Verdicts of several verifiers on one signature.
pub fn transfer_check(
    sig: &HanaokaSignature,
    verifiers: &[UserKeys],
    signer: FieldElement,
) -> Result<Vec<bool>> {
    if verifiers.len() < 2 {
        return Err(invalid("verifiers", "at least two verifiers are required"));
    }
    verifiers.iter().map(|v| v.verify(signer, sig)).collect()
}

/// Zero polynomial with the shape of a signature (`y_1..y_ω`, degree 1 each).
pub fn signature_shape(omega: usize, q: u64) -> Result<MultivariatePolynomial> {
    let vars: Vec<(Var, u32)> = (1..=omega).map(|j| (Var::Y(j as u16), 1)).collect();
    MultivariatePolynomial::zero(q, &vars)
}

/// A uniformly random candidate `α` for message `m`, produced without any key.
pub fn random_forgery<R: Rng + ?Sized>(
    omega: usize,
    message: FieldElement,
    rng: &mut R,
) -> Result<HanaokaSignature> {
    let q = message.modulus();
    let mut alpha = signature_shape(omega, q)?;
    for exps in alpha.support_monomials() {
        alpha.set_coefficient(&exps, FieldElement::random_unchecked(q, rng))?;
    }
    Ok(HanaokaSignature { message, alpha })
}

/// Every candidate `α` of the signature shape over `F_q`, in a fixed order.
pub fn all_signature_candidates(omega: usize, q: u64) -> Result<Vec<MultivariatePolynomial>> {
    let shape = signature_shape(omega, q)?;
    let monomials = shape.support_monomials();
    let count = (q as usize)
        .checked_pow(monomials.len() as u32)
        .filter(|&c| c <= 1 << 22)
        .ok_or_else(|| invalid("q", "candidate space too large to enumerate"))?;
    let mut out = Vec::with_capacity(count);
    for mut idx in 0..count {
        let mut p = shape.clone();
        for exps in &monomials {
            p.set_coefficient(exps, FieldElement::reduced((idx % q as usize) as u64, q))?;
            idx /= q as usize;
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn fe(v: u64, q: u64) -> FieldElement {
        FieldElement::new(v, q).unwrap()
    }

    fn params(n: usize, omega: usize, psi: u32, q: u64) -> HanaokaParams {
        HanaokaParams { n, omega, psi, q }
    }

    #[test]
    fn setup_shapes() {
        let (_, users) = setup(params(3, 1, 1, 101), &mut seeded(1)).unwrap();
        assert_eq!(users.len(), 3);
        for u in &users {
            assert_eq!(u.signing_key.vars(), &[Var::Y(1), Var::Z]);
            assert_eq!(u.signing_key.degree_bound(Var::Y(1)), Some(1));
            assert_eq!(u.signing_key.degree_bound(Var::Z), Some(1));
            assert_eq!(u.verification_poly.vars(), &[Var::X, Var::Z]);
            assert_eq!(u.verification_vector.len(), 1);
        }
    }

    #[test]
    fn setup_is_deterministic() {
        let (a, ua) = setup(params(4, 2, 2, 11), &mut seeded(9)).unwrap();
        let (b, ub) = setup(params(4, 2, 2, 11), &mut seeded(9)).unwrap();
        assert_eq!(a.master(), b.master());
        assert_eq!(ua, ub);
    }

    #[test]
    fn setup_rejects_bad_parameters() {
        assert!(setup(params(5, 1, 1, 3), &mut seeded(0)).is_err());
        assert!(matches!(
            setup(params(3, 1, 1, 15), &mut seeded(0)),
            Err(Error::NotPrime(15))
        ));
        assert!(setup(params(2, 1, 1, 7), &mut seeded(0)).is_err());
        assert!(setup(params(3, 0, 1, 7), &mut seeded(0)).is_err());
    }

    /// A fixed instance over F_5 with n = 3, ω = 1, ψ = 1 and hand-picked
    /// coefficients, used for exact hand-computed checks.
    fn tiny_instance() -> (MultivariatePolynomial, Vec<UserKeys>) {
        let q = 5;
        let mut f = MultivariatePolynomial::master_shape(3, 1, 1, q).unwrap();
        // exponents are (x, y1, z)
        let coeffs: [([u32; 3], u64); 7] = [
            ([0, 0, 0], 1),
            ([1, 0, 0], 2),
            ([0, 0, 1], 3),
            ([2, 0, 1], 1),
            ([0, 1, 0], 4),
            ([1, 1, 1], 2),
            ([2, 1, 0], 3),
        ];
        for (e, c) in coeffs {
            f.set_coefficient(&e, fe(c, q)).unwrap();
        }
        let registry: Vec<_> = (1..=3).map(|i| fe(i, q)).collect();
        let vs = [2u64, 4, 1];
        let users = registry
            .iter()
            .zip(vs)
            .map(|(&id, v)| derive_user_keys(&f, id, vec![fe(v, q)], registry.clone()).unwrap())
            .collect();
        (f, users)
    }

    #[test]
    fn tiny_instance_signature_by_hand() {
        // F = 1 + 2x + 3z + x^2 z + 4y + 2xyz + 3x^2 y.
        // Signer U_1 = 1, message m = 2:
        //   constant: 1 + 2 + 3*2 + 1*2 = 11 = 1 (mod 5)
        //   y coeff:  4 + 2*2 + 3 = 11 = 1 (mod 5)
        let (_, users) = tiny_instance();
        let sig = users[0].sign(fe(2, 5)).unwrap();
        assert_eq!(sig.alpha.coefficient(&[0]).value(), 1);
        assert_eq!(sig.alpha.coefficient(&[1]).value(), 1);
        // Signer U_2 = 2, m = 3:
        //   constant: 1 + 4 + 9 + 4*3 = 26 = 1
        //   y coeff:  4 + 2*2*3 + 3*4 = 28 = 3
        let sig = users[1].sign(fe(3, 5)).unwrap();
        assert_eq!(sig.alpha.coefficient(&[0]).value(), 1);
        assert_eq!(sig.alpha.coefficient(&[1]).value(), 3);
    }

    #[test]
    fn tiny_instance_distinct_messages_give_distinct_alphas() {
        // Brute force over every message pair for signer U_1: the y coefficient
        // is 7 + 2m and the constant 3 + 4m (mod 5), both injective in m.
        let (_, users) = tiny_instance();
        for m in 0..5 {
            for m2 in 0..5 {
                let a = users[0].sign(fe(m, 5)).unwrap().alpha;
                let b = users[0].sign(fe(m2, 5)).unwrap().alpha;
                assert_eq!(a == b, m == m2);
            }
        }
    }

    #[test]
    fn tiny_instance_tampered_message_rejected() {
        let (_, users) = tiny_instance();
        let signer = users[0].identity;
        let mut sig = users[0].sign(fe(2, 5)).unwrap();
        assert!(users[1].verify(signer, &sig).unwrap());
        sig.message = fe(3, 5);
        // r1 = F(1, 4, 3) = 1 + 2 + 9 + 3 + 16 + 24 + 12 = 67 = 2, r2 = α(4) = 1 + 4 = 0
        let (r1, r2) = users[1].verification_values(signer, &sig).unwrap();
        assert_eq!((r1.value(), r2.value()), (2, 0));
        assert!(!users[1].verify(signer, &sig).unwrap());
    }

    #[test]
    fn completeness_exhaustive_small_fields() {
        let mut rng = seeded(5);
        for q in [5u64, 7, 11, 13] {
            for n in 3..=5usize {
                if q <= n as u64 {
                    continue;
                }
                let (_, users) = setup(params(n, 2, 1, q), &mut rng).unwrap();
                for signer in &users {
                    for m in 0..q {
                        let sig = signer.sign(fe(m, q)).unwrap();
                        for verifier in &users {
                            assert!(verifier.verify(signer.identity, &sig).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_random_alpha_acceptance_is_one_in_q() {
        let (_, users) = tiny_instance();
        let m = fe(2, 5);
        let candidates = all_signature_candidates(1, 5).unwrap();
        assert_eq!(candidates.len(), 25);
        let accepted = candidates
            .into_iter()
            .filter(|alpha| {
                users[1]
                    .verify(
                        users[0].identity,
                        &HanaokaSignature {
                            message: m,
                            alpha: alpha.clone(),
                        },
                    )
                    .unwrap()
            })
            .count();
        assert_eq!(accepted, 5);
    }

    #[test]
    fn exhaustive_two_verifier_acceptance_is_one_in_q_squared() {
        let (_, users) = tiny_instance();
        let m = fe(4, 5);
        let both = all_signature_candidates(1, 5)
            .unwrap()
            .into_iter()
            .filter(|alpha| {
                let sig = HanaokaSignature {
                    message: m,
                    alpha: alpha.clone(),
                };
                transfer_check(&sig, &users[1..], users[0].identity)
                    .unwrap()
                    .iter()
                    .all(|&a| a)
            })
            .count();
        // v_2 = 4 and v_3 = 1 are distinct, so exactly one α passes both.
        assert_eq!(both, 1);
    }

    #[test]
    fn transfer_check_requires_two_verifiers() {
        let (_, users) = tiny_instance();
        let sig = users[0].sign(fe(1, 5)).unwrap();
        assert!(transfer_check(&sig, &[], users[0].identity).is_err());
        assert!(transfer_check(&sig, &users[..1], users[0].identity).is_err());
        let verdicts = transfer_check(&sig, &users, users[0].identity).unwrap();
        assert_eq!(verdicts, vec![true, true, true]);
    }

    #[test]
    fn unknown_signer_is_rejected() {
        let (_, users) = tiny_instance();
        let sig = users[0].sign(fe(1, 5)).unwrap();
        assert_eq!(
            users[1].verify(fe(4, 5), &sig),
            Err(Error::UnknownSigner(4))
        );
    }

    #[test]
    fn one_users_keys_leave_other_signing_keys_undetermined() {
        // Adding (x - U_1)(y_1 - v_1) H(x, z) with deg_x H <= n - 2 keeps
        // user 1's signing and verification keys unchanged. Over all 625 such H
        // at q = 5, n = 3, ψ = 1, user 2's key shifts by (y - v_1) H(2, z),
        // and H(2, z) takes all q^2 linear polynomials in z.
        let q: u64 = 5;
        let (f, users) = tiny_instance();
        let u1 = &users[0];
        let mut candidates = std::collections::BTreeSet::new();
        for h in 0..q.pow(4) {
            let hc = [h % q, (h / q) % q, (h / q / q) % q, (h / q / q / q) % q];
            let mut g = f.clone();
            let u = u1.identity.value();
            let v = u1.verification_vector[0].value();
            // (x - u)(y - v) = xy - vx - uy + uv, times h00 + h10 x + h01 z + h11 x z
            for (hx, hz, c) in [
                (0u32, 0u32, hc[0]),
                (1, 0, hc[1]),
                (0, 1, hc[2]),
                (1, 1, hc[3]),
            ] {
                let parts: [(u32, u32, u64); 4] = [
                    (1, 1, 1),
                    (1, 0, (q - v) % q),
                    (0, 1, (q - u) % q),
                    (0, 0, u * v % q),
                ];
                for (px, py, pc) in parts {
                    let e = [px + hx, py, hz];
                    let old = g.coefficient(&e);
                    let add = fe(c * pc % q, q);
                    g.set_coefficient(&e, old.add(add).unwrap()).unwrap();
                }
            }
            let keys = derive_user_keys(
                &g,
                u1.identity,
                u1.verification_vector.clone(),
                u1.registry.clone(),
            )
            .unwrap();
            assert_eq!(keys.signing_key, u1.signing_key);
            assert_eq!(keys.verification_poly, u1.verification_poly);
            let s2 = g
                .restrict(&binding(&[(Var::X, users[1].identity)]))
                .unwrap();
            candidates.insert(s2.to_string());
        }
        assert_eq!(candidates.len(), 25);
    }
}
