//! Exact success probabilities for the simulated attacks.

use statrs::distribution::{Binomial, Discrete, DiscreteCDF, Hypergeometric};

use crate::bits::BitString;
use crate::error::{invalid, Result};
use crate::mqds::MqdsParams;
use crate::quantum::code::{codeword_overlap, LinearCode};
use crate::quantum::coherent::{p_min, p_usd};
use crate::quantum::state::swap_outcome_one;
use crate::threshold::{max_accepted, Role};

/// Largest input length for which the code-dependent forging oracle enumerates.
pub const ORACLE_ENUMERATION_LIMIT: usize = 20;

fn binomial(n: usize, p: f64) -> Binomial {
    Binomial::new(p.clamp(0.0, 1.0), n as u64).expect("p clamped to [0, 1]")
}

/// `P(Bin(n, p) is accepted at limit)`.
pub fn binomial_accept(n: usize, p: f64, limit: f64) -> f64 {
    let k = max_accepted(limit);
    if k >= n {
        return 1.0;
    }
    binomial(n, p).cdf(k as u64)
}

/// `P(X <= k)` for `X = Bin(n1, p1) + Bin(n2, p2)`.
fn sum_cdf(n1: usize, p1: f64, n2: usize, p2: f64, k: usize) -> f64 {
    let (b1, b2) = (binomial(n1, p1), binomial(n2, p2));
    (0..=k.min(n1))
        .map(|x| b1.pmf(x as u64) * b2.cdf((k - x) as u64))
        .sum::<f64>()
        .min(1.0)
}

pub fn p2_forging_oracle(l: usize, s_v: f64) -> f64 {
    binomial_accept(l / 2, 0.5, s_v * l as f64)
}

/// `j` flips spread uniformly over `2L` positions; Bob tests a fixed `L` of them.
pub fn p2_repudiation_oracle(l: usize, s_a: f64, s_v: f64, j: usize) -> f64 {
    if j > 2 * l {
        return 0.0;
    }
    let hyp = Hypergeometric::new(2 * l as u64, l as u64, j as u64).expect("valid hypergeometric");
    let a = max_accepted(s_a * l as f64);
    let v = max_accepted(s_v * l as f64);
    (0..=a.min(j))
        .filter(|&x| j - x > v)
        .map(|x| hyp.pmf(x as u64))
        .sum()
}

/// Injection count maximising the exact repudiation probability; ties go to
/// the smaller count.
pub fn p2_best_injection(l: usize, s_a: f64, s_v: f64) -> (usize, f64) {
    argmax((0..=2 * l).map(|j| (j, p2_repudiation_oracle(l, s_a, s_v, j))))
}

fn argmax(it: impl Iterator<Item = (usize, f64)>) -> (usize, f64) {
    it.fold((0, f64::NEG_INFINITY), |best, cur| {
        if cur.1 > best.1 {
            cur
        } else {
            best
        }
    })
}

/// Per-position mismatch rate `p_USD · P(guess and received sign disagree)`.
fn mqds_forge_rate(params: &MqdsParams) -> f64 {
    let e = p_min(params.alpha);
    let nu = params.noise;
    p_usd(params.alpha) * (e * (1.0 - nu) + (1.0 - e) * nu)
}

pub fn mqds_forging_oracle(params: &MqdsParams) -> f64 {
    binomial_accept(
        params.l,
        mqds_forge_rate(params),
        params.limit(Role::Forwarded),
    )
}

/// Both recipients see `Bin(j, p_USD(1-ν)) + Bin(L-j, p_USD ν)` independently.
pub fn mqds_repudiation_oracle(params: &MqdsParams, j: usize) -> f64 {
    if j > params.l {
        return 0.0;
    }
    let pu = p_usd(params.alpha);
    let (p1, p2) = (pu * (1.0 - params.noise), pu * params.noise);
    let a = max_accepted(params.limit(Role::Direct));
    let v = max_accepted(params.limit(Role::Forwarded));
    let accept = sum_cdf(j, p1, params.l - j, p2, a);
    let reject = 1.0 - sum_cdf(j, p1, params.l - j, p2, v);
    accept * reject.max(0.0)
}

pub fn mqds_best_injection(params: &MqdsParams) -> (usize, f64) {
    argmax((0..=params.l).map(|j| (j, mqds_repudiation_oracle(params, j))))
}

/// No null-port click over `j` differing positions: `e^{-2α²j}`.
pub fn mqds_tamper_oracle(alpha: f64, j: usize) -> f64 {
    (-2.0 * alpha * alpha * j as f64).exp()
}

/// Per-index SWAP mismatch probability for a forger who knows `t` uniformly
/// chosen key bits and guesses the rest:
/// `Σ_e C(L-|e|, t)/C(L, t) · 2^{-(L-t)} · (½ - ½ ⟨E(e)⟩²)`.
pub fn gc_forge_mismatch_rate(code: &LinearCode, t: usize) -> Result<f64> {
    let l = code.input_len();
    if l > ORACLE_ENUMERATION_LIMIT {
        return Err(invalid(
            "L",
            format!("oracle enumerates 2^L patterns, L <= {ORACLE_ENUMERATION_LIMIT}"),
        ));
    }
    let t = t.min(l);
    let ln_c = |n: usize, k: usize| statrs::function::factorial::ln_binomial(n as u64, k as u64);
    let mut q = 0.0;
    for e in 0u64..(1u64 << l) {
        let err = BitString::from_u64(e, l);
        let w = err.weight();
        if w + t > l {
            continue;
        }
        let weight = (ln_c(l - w, t) - ln_c(l, t)).exp() * 0.5f64.powi((l - t) as i32);
        let ov = codeword_overlap(code.encode(&err)?.weight(), code.output_len());
        q += weight * swap_outcome_one(ov * ov);
    }
    Ok(q)
}

pub fn gc_forging_oracle(code: &LinearCode, m: usize, s_v: f64, t: usize) -> Result<f64> {
    Ok(binomial_accept(
        m,
        gc_forge_mismatch_rate(code, t)?,
        s_v * m as f64,
    ))
}

/// Key test passes with `tampered` states at overlap `c`, `r` cross rounds each.
pub fn gc_tamper_oracle(rounds: usize, tampered: usize, c: f64) -> f64 {
    (1.0 - swap_outcome_one(c * c)).powi((rounds * tampered) as i32)
}
