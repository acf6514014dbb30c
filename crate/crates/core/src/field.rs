//! Prime-field arithmetic and the sparse multivariate polynomials of the
//! trusted-authority signature scheme.
//!
//! Polynomials live in `F_q[x, y_1..y_ω, z]` with degree at most `n-1` in `x`,
//! at most 1 in each `y_j`, at most `ψ` in `z`, and no monomial containing two
//! different `y` variables. Every polynomial in this crate (the master
//! polynomial, signing keys, verification keys and signatures) is a
//! restriction of one of that shape, so the support rule is enforced on every
//! coefficient write.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive); keeps products inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_modulus(q: u64) -> Result<()> {
    if !(2..MAX_MODULUS).contains(&q) {
        return Err(Error::ModulusOutOfRange(q));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    /// Reduces `value` modulo `modulus`; the modulus must be prime.
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Self::reduced(value, modulus))
    }

    pub(crate) fn reduced(value: u64, modulus: u64) -> Self {
        Self {
            value: value % modulus,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Result<Self> {
        Self::new(1, modulus)
    }

    pub fn random<R: Rng + ?Sized>(modulus: u64, rng: &mut R) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Self::random_unchecked(modulus, rng))
    }

    pub(crate) fn random_unchecked<R: Rng + ?Sized>(modulus: u64, rng: &mut R) -> Self {
        Self {
            value: rng.random_range(0..modulus),
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, rhs: Self) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::ModulusMismatch(self.modulus, rhs.modulus));
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(Self::reduced(self.value + rhs.value, self.modulus))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(Self::reduced(
            self.value + self.modulus - rhs.value,
            self.modulus,
        ))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(Self::reduced(self.value * rhs.value, self.modulus))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Self::reduced(self.modulus - self.value, self.modulus)
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let q = self.modulus;
        let mut base = self.value;
        let mut acc = 1 % q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            exp >>= 1;
        }
        Self::reduced(acc, q)
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(self.modulus - 2))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Variable identifiers, ordered `x < y_1 < .. < y_ω < z`. `Y` is 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Var {
    X,
    Y(u16),
    Z,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => f.write_str("x"),
            Var::Y(j) => write!(f, "y{j}"),
            Var::Z => f.write_str("z"),
        }
    }
}

pub type Binding = BTreeMap<Var, FieldElement>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultivariatePolynomial {
    modulus: u64,
    vars: Vec<Var>,
    bounds: Vec<u32>,
    // Exponent tuples aligned with `vars`; zero coefficients are never stored.
    terms: BTreeMap<Vec<u32>, u64>,
}

impl MultivariatePolynomial {
    /// The zero polynomial in the given variables with per-variable degree bounds.
    pub fn zero(modulus: u64, vars_with_bounds: &[(Var, u32)]) -> Result<Self> {
        check_modulus(modulus)?;
        let mut sorted = vars_with_bounds.to_vec();
        sorted.sort_by_key(|(v, _)| *v);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Config("duplicate polynomial variable".into()));
        }
        if let Some((v, _)) = sorted
            .iter()
            .find(|(v, b)| matches!(v, Var::Y(_)) && *b > 1)
        {
            return Err(Error::InvalidMonomial(format!(
                "{v} must have degree at most 1"
            )));
        }
        Ok(Self {
            modulus,
            vars: sorted.iter().map(|(v, _)| *v).collect(),
            bounds: sorted.iter().map(|(_, b)| *b).collect(),
            terms: BTreeMap::new(),
        })
    }

    /// Zero polynomial with the master-polynomial shape for `n` users.
    pub fn master_shape(n: usize, omega: usize, psi: u32, modulus: u64) -> Result<Self> {
        if n == 0 {
            return Err(crate::error::invalid("n", "at least one user is required"));
        }
        let mut vars = vec![(Var::X, (n - 1) as u32)];
        vars.extend((1..=omega).map(|j| (Var::Y(j as u16), 1)));
        vars.push((Var::Z, psi));
        Self::zero(modulus, &vars)
    }

    /// Master polynomial with every admissible coefficient uniform on `F_q`.
    pub fn sample_master<R: Rng + ?Sized>(
        n: usize,
        omega: usize,
        psi: u32,
        modulus: u64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut p = Self::master_shape(n, omega, psi, modulus)?;
        for exps in p.support_monomials() {
            let c = rng.random_range(0..modulus);
            if c != 0 {
                p.terms.insert(exps, c);
            }
        }
        Ok(p)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn degree_bound(&self, var: Var) -> Option<u32> {
        self.position(var).map(|i| self.bounds[i])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], FieldElement)> + '_ {
        self.terms
            .iter()
            .map(|(e, &c)| (e.as_slice(), FieldElement::reduced(c, self.modulus)))
    }

    /// Every exponent tuple admitted by the degree bounds and the
    /// single-`y` support rule, in lexicographic order.
    pub fn support_monomials(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::with_capacity(self.vars.len())];
        for &b in &self.bounds {
            let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
            for prefix in &out {
                for e in 0..=b {
                    let mut t = prefix.clone();
                    t.push(e);
                    next.push(t);
                }
            }
            out = next;
        }
        out.retain(|e| self.admissible(e));
        out
    }

    fn admissible(&self, exps: &[u32]) -> bool {
        if exps.len() != self.vars.len() {
            return false;
        }
        if exps.iter().zip(&self.bounds).any(|(e, b)| e > b) {
            return false;
        }
        let y_count = self
            .vars
            .iter()
            .zip(exps)
            .filter(|(v, &e)| matches!(v, Var::Y(_)) && e > 0)
            .count();
        y_count <= 1
    }

    fn monomial_name(&self, exps: &[u32]) -> String {
        let parts: Vec<String> = self
            .vars
            .iter()
            .zip(exps)
            .filter(|(_, &e)| e > 0)
            .map(|(v, e)| format!("{v}^{e}"))
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn coefficient(&self, exps: &[u32]) -> FieldElement {
        FieldElement::reduced(self.terms.get(exps).copied().unwrap_or(0), self.modulus)
    }

    pub fn set_coefficient(&mut self, exps: &[u32], c: FieldElement) -> Result<()> {
        if c.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(self.modulus, c.modulus()));
        }
        if !self.admissible(exps) {
            return Err(Error::InvalidMonomial(if exps.len() == self.vars.len() {
                self.monomial_name(exps)
            } else {
                format!("{exps:?}")
            }));
        }
        if c.is_zero() {
            self.terms.remove(exps);
        } else {
            self.terms.insert(exps.to_vec(), c.value());
        }
        Ok(())
    }

    fn position(&self, var: Var) -> Option<usize> {
        self.vars.iter().position(|&v| v == var)
    }

    fn check_binding(&self, binding: &Binding) -> Result<()> {
        for (var, val) in binding {
            if self.position(*var).is_none() {
                return Err(Error::UnknownVariable(var.to_string()));
            }
            if val.modulus() != self.modulus {
                return Err(Error::ModulusMismatch(self.modulus, val.modulus()));
            }
        }
        Ok(())
    }

    /// Evaluates with every variable bound.
    pub fn eval(&self, binding: &Binding) -> Result<FieldElement> {
        self.check_binding(binding)?;
        let values: Vec<u64> = self
            .vars
            .iter()
            .map(|v| {
                binding
                    .get(v)
                    .map(|f| f.value())
                    .ok_or_else(|| Error::UnboundVariable(v.to_string()))
            })
            .collect::<Result<_>>()?;
        let q = self.modulus;
        let powers = self.power_tables(&values);
        let mut acc = 0u64;
        for (exps, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in exps.iter().enumerate() {
                t = t * powers[i][e as usize] % q;
            }
            acc = (acc + t) % q;
        }
        Ok(FieldElement::reduced(acc, q))
    }

    fn power_tables(&self, values: &[u64]) -> Vec<Vec<u64>> {
        let q = self.modulus;
        values
            .iter()
            .zip(&self.bounds)
            .map(|(&v, &b)| {
                let mut row = Vec::with_capacity(b as usize + 1);
                let mut p = 1 % q;
                for _ in 0..=b {
                    row.push(p);
                    p = p * v % q;
                }
                row
            })
            .collect()
    }

    /// Binds a non-empty strict subset of the variables, returning a
    /// polynomial in the remaining ones.
    pub fn restrict(&self, binding: &Binding) -> Result<Self> {
        self.check_binding(binding)?;
        if binding.is_empty() || binding.len() >= self.vars.len() {
            return Err(Error::InvalidRestriction);
        }
        let q = self.modulus;
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&i| !binding.contains_key(&self.vars[i]))
            .collect();
        // Bound variables get their real value, free ones a placeholder of 1.
        let values: Vec<u64> = self
            .vars
            .iter()
            .map(|v| binding.get(v).map_or(1, |f| f.value()))
            .collect();
        let powers = self.power_tables(&values);
        let mut terms: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (exps, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in exps.iter().enumerate() {
                if binding.contains_key(&self.vars[i]) {
                    t = t * powers[i][e as usize] % q;
                }
            }
            let key: Vec<u32> = keep.iter().map(|&i| exps[i]).collect();
            let slot = terms.entry(key).or_insert(0);
            *slot = (*slot + t) % q;
        }
        terms.retain(|_, c| *c != 0);
        Ok(Self {
            modulus: q,
            vars: keep.iter().map(|&i| self.vars[i]).collect(),
            bounds: keep.iter().map(|&i| self.bounds[i]).collect(),
            terms,
        })
    }
}

impl fmt::Display for MultivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c}*{}", self.monomial_name(e)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Builds a binding from `(variable, value)` pairs.
pub fn binding(pairs: &[(Var, FieldElement)]) -> Binding {
    pairs.iter().copied().collect()
}
