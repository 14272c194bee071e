//! Eve's view and attack strategies at desk scale.
//!
//! Classical side information yields an exact optimal guessing strategy by
//! column argmax. Quantum side information is attacked with the Helstrom
//! measurement (exact, binary labels) or the pretty-good measurement (a
//! certified lower bound, any label count). The forgery search enumerates
//! Eve's best impersonation `(M', T')` against a tag verifier.
//!
//! Attack timing: Eve forges before the genuine tag is broadcast. She knows
//! the hash instance, her side information, and any public syndrome bits, but
//! does not condition on the genuine tag value. (Conditioning on an observed
//! tag of an affine family would let her shift it onto any other message and
//! win outright; see `substitution_attack_is_total` in the tests.)

use rand::Rng;
use std::collections::HashMap;

use crate::entropy::{guessing_probability, JointDistribution};
use crate::error::{Error, Result};
use crate::gf2::Bits;
use crate::hashing::{HashInstance, Tag};
use crate::matrix::ComplexMatrix;
use crate::quantum::{helstrom_success, DensityMatrix};
use crate::SUPPORT_TOL;

/// Eve's classical side information: a joint table over (key value, side symbol).
#[derive(Clone, Debug)]
pub struct ClassicalSideInfo {
    joint: JointDistribution,
}

impl ClassicalSideInfo {
    pub fn new(joint: JointDistribution) -> Self {
        ClassicalSideInfo { joint }
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }
}

/// Eve's quantum side information: a classical-quantum correlation
/// `{(p_i, x_i, rho_i)}`.
#[derive(Clone, Debug)]
pub struct QuantumSideInfo {
    components: Vec<(f64, usize, DensityMatrix)>,
}

impl QuantumSideInfo {
    pub fn new(components: Vec<(f64, usize, DensityMatrix)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidState("side information must be non-empty".into()));
        }
        let dim = components[0].2.dim();
        for (_, _, rho) in &components {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch(dim, rho.dim()));
            }
        }
        let total: f64 = components.iter().map(|(p, _, _)| p).sum();
        if (total - 1.0).abs() > crate::VALIDITY_TOL {
            return Err(Error::InvalidPrior(total));
        }
        Ok(QuantumSideInfo { components })
    }

    pub fn components(&self) -> &[(f64, usize, DensityMatrix)] {
        &self.components
    }
}

/// One forgery experiment outcome.
#[derive(Clone, Debug)]
pub struct ForgeryOutcome {
    /// The representative attempted pair (message, tag).
    pub attempted: (Bits, Tag),
    /// Whether the representative attempt was accepted in a simulated draw.
    pub accepted: bool,
    pub trials: u64,
    /// Optimal (exact path) or estimated (Monte Carlo path) acceptance probability.
    pub success_rate: f64,
}

/// Optimal classical guessing: for each side symbol the lexicographically
/// smallest argmax key. Returns `(strategy, success probability)` with
/// `strategy[e] = x`.
pub fn optimal_guess_classical(side: &ClassicalSideInfo) -> (Vec<usize>, f64) {
    let j = side.joint();
    let mut strategy = Vec::with_capacity(j.e_size());
    for e in 0..j.e_size() {
        let mut best_x = 0;
        let mut best_p = f64::NEG_INFINITY;
        for x in 0..j.x_size() {
            let p = j.prob(x, e);
            if p > best_p {
                best_p = p;
                best_x = x;
            }
        }
        strategy.push(best_x);
    }
    (strategy, guessing_probability(j))
}

/// Result of a quantum-side-information guessing attack.
#[derive(Clone, Copy, Debug)]
pub struct QuantumGuess {
    /// Pretty-good-measurement success probability (a lower bound on optimal).
    pub p_lower: f64,
    /// Exact Helstrom optimum when exactly two distinct labels are present.
    pub p_exact_if_binary: Option<f64>,
}

/// Groups components by label into `(p_x, p_x * rho_x)` blocks.
fn label_blocks(side: &QuantumSideInfo) -> Vec<(usize, f64, ComplexMatrix)> {
    let mut blocks: Vec<(usize, f64, ComplexMatrix)> = Vec::new();
    for (p, label, rho) in side.components() {
        match blocks.iter_mut().find(|(l, _, _)| l == label) {
            Some((_, q, acc)) => {
                *q += p;
                *acc = acc.add(&rho.matrix().scale(*p));
            }
            None => blocks.push((*label, *p, rho.matrix().scale(*p))),
        }
    }
    blocks.sort_by_key(|(l, _, _)| *l);
    blocks
}

/// Guessing success from quantum side information.
///
/// With exactly two distinct labels the Helstrom value is exact; otherwise the
/// pretty-good measurement `mu_x = rhobar^{-1/2} p_x rho_x rhobar^{-1/2}`
/// (pseudo-inverse on the support) certifies a lower bound.
pub fn guess_quantum(side: &QuantumSideInfo) -> Result<QuantumGuess> {
    let blocks = label_blocks(side);
    let dim = side.components()[0].2.dim();

    // average state
    let mut avg = ComplexMatrix::zeros(dim, dim);
    for (_, _, b) in &blocks {
        avg = avg.add(b);
    }
    let (avg_eigs, avg_vecs) = avg.hermitian_eigen()?;
    let max_eig = avg_eigs.iter().cloned().fold(0.0, f64::max);
    if max_eig <= SUPPORT_TOL {
        return Err(Error::DegenerateEnsemble);
    }

    // rhobar^{-1/2} on the support
    let mut inv_sqrt = ComplexMatrix::zeros(dim, dim);
    for (k, &l) in avg_eigs.iter().enumerate() {
        if l > SUPPORT_TOL * max_eig.max(1.0) {
            let v = avg_vecs.column(k);
            inv_sqrt = inv_sqrt.add(&ComplexMatrix::projector(&v).scale(1.0 / l.sqrt()));
        }
    }

    // PGM success = sum_x tr(B_x S B_x S) with B_x = p_x rho_x, S = rhobar^{-1/2}
    let mut pgm = 0.0;
    for (_, _, b) in &blocks {
        let m = b.mul(&inv_sqrt).mul(b).mul(&inv_sqrt);
        pgm += m.trace().re;
    }
    pgm = pgm.clamp(0.0, 1.0);

    let p_exact_if_binary = if blocks.len() == 2 {
        let (_, p0, b0) = &blocks[0];
        let (_, p1, b1) = &blocks[1];
        let rho0 = DensityMatrix::new(b0.scale(1.0 / p0))?;
        let rho1 = DensityMatrix::new(b1.scale(1.0 / p1))?;
        Some(helstrom_success(*p0, &rho0, *p1, &rho1)?)
    } else {
        None
    };

    Ok(QuantumGuess { p_lower: pgm, p_exact_if_binary })
}

/// Caps for the exhaustive forgery oracle.
pub const EXACT_POSTERIOR_KEY_BITS: usize = 16;
pub const MAX_FORGERY_KEY_BITS: usize = 20;

/// Exhaustive forgery search against a tag verifier.
///
/// Eve holds the joint distribution of (key, side symbol), the hash instance,
/// and the genuine message `M` (her `M'` must differ). For each side symbol
/// she picks the `(M', T')` maximizing posterior acceptance mass. The success
/// probability is computed exactly by posterior summation when the key space
/// is at most `2^16`, and otherwise estimated from `trials` Monte Carlo draws.
pub fn forgery_search<R: Rng + ?Sized>(
    keys: &ClassicalSideInfo,
    hash: &HashInstance,
    genuine: (&Bits, &Tag),
    rng: &mut R,
    trials: u64,
) -> Result<ForgeryOutcome> {
    let joint = keys.joint();
    let key_bits = (usize::BITS - 1 - joint.x_size().leading_zeros()) as usize;
    if 1 << key_bits != joint.x_size() {
        return Err(Error::InvalidArgument(format!(
            "key alphabet size {} is not a power of two",
            joint.x_size()
        )));
    }
    if key_bits > MAX_FORGERY_KEY_BITS {
        return Err(Error::InfeasibleScale(key_bits, MAX_FORGERY_KEY_BITS));
    }
    let (message, _genuine_tag) = genuine;
    let msg_bits = hash
        .input_bits()
        .checked_sub(key_bits)
        .filter(|&m| m == message.len())
        .ok_or(Error::LengthMismatch {
            expected: hash.input_bits(),
            got: key_bits + message.len(),
        })?;
    if msg_bits == 0 {
        return Err(Error::EmptyMessageSpace);
    }

    if key_bits <= EXACT_POSTERIOR_KEY_BITS {
        forgery_search_exact(joint, hash, message, key_bits, msg_bits, rng)
    } else {
        forgery_search_monte_carlo(joint, hash, message, key_bits, msg_bits, rng, trials)
    }
}

fn best_pair_for_column(
    joint: &JointDistribution,
    hash: &HashInstance,
    message: &Bits,
    key_bits: usize,
    msg_bits: usize,
    e: usize,
) -> (Bits, Tag, f64) {
    let genuine_idx = message.to_index();
    let mut best: Option<(Bits, Tag, f64)> = None;
    for m_idx in 0..(1u64 << msg_bits) {
        if m_idx == genuine_idx {
            continue;
        }
        let m_prime = Bits::from_index(msg_bits, m_idx);
        let mut hist: HashMap<Tag, f64> = HashMap::new();
        for x in 0..joint.x_size() {
            let p = joint.prob(x, e);
            if p <= 0.0 {
                continue;
            }
            let key = Bits::from_index(key_bits, x as u64);
            let tag = hash.tag_message(&key, &m_prime).expect("sizes checked");
            *hist.entry(tag).or_insert(0.0) += p;
        }
        for (tag, mass) in hist {
            let better = match &best {
                None => true,
                Some((_, _, b)) => mass > *b + 1e-18,
            };
            if better {
                best = Some((m_prime.clone(), tag, mass));
            }
        }
    }
    best.expect("message space non-empty")
}

fn forgery_search_exact<R: Rng + ?Sized>(
    joint: &JointDistribution,
    hash: &HashInstance,
    message: &Bits,
    key_bits: usize,
    msg_bits: usize,
    rng: &mut R,
) -> Result<ForgeryOutcome> {
    let mut success = 0.0;
    let mut representative: Option<(Bits, Tag)> = None;
    let mut best_column_mass = f64::NEG_INFINITY;
    let mut attacks: Vec<(Bits, Tag)> = Vec::with_capacity(joint.e_size());
    for e in 0..joint.e_size() {
        let (m_prime, tag, mass) = best_pair_for_column(joint, hash, message, key_bits, msg_bits, e);
        success += mass;
        let column_mass: f64 = (0..joint.x_size()).map(|x| joint.prob(x, e)).sum();
        if column_mass > best_column_mass {
            best_column_mass = column_mass;
            representative = Some((m_prime.clone(), tag.clone()));
        }
        attacks.push((m_prime, tag));
    }

    // One simulated draw for the `accepted` record.
    let (x, e) = sample_joint(joint, rng);
    let key = Bits::from_index(key_bits, x as u64);
    let (m_prime, t_prime) = &attacks[e];
    let accepted = &hash.tag_message(&key, m_prime)? == t_prime;

    Ok(ForgeryOutcome {
        attempted: representative.expect("at least one side symbol"),
        accepted,
        trials: 1,
        success_rate: success,
    })
}

fn forgery_search_monte_carlo<R: Rng + ?Sized>(
    joint: &JointDistribution,
    hash: &HashInstance,
    message: &Bits,
    key_bits: usize,
    msg_bits: usize,
    rng: &mut R,
    trials: u64,
) -> Result<ForgeryOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("Monte Carlo path needs trials >= 1".into()));
    }
    let genuine_idx = message.to_index();
    // Strategy estimation: histogram sampled keys per side symbol.
    let mut samples: Vec<Vec<u64>> = vec![Vec::new(); joint.e_size()];
    for _ in 0..trials {
        let (x, e) = sample_joint(joint, rng);
        samples[e].push(x as u64);
    }
    let mut attacks: Vec<Option<(Bits, Tag)>> = vec![None; joint.e_size()];
    for e in 0..joint.e_size() {
        if samples[e].is_empty() {
            continue;
        }
        let mut best: Option<(Bits, Tag, usize)> = None;
        for m_idx in 0..(1u64 << msg_bits) {
            if m_idx == genuine_idx {
                continue;
            }
            let m_prime = Bits::from_index(msg_bits, m_idx);
            let mut hist: HashMap<Tag, usize> = HashMap::new();
            for &x in &samples[e] {
                let key = Bits::from_index(key_bits, x);
                let tag = hash.tag_message(&key, &m_prime)?;
                *hist.entry(tag).or_insert(0) += 1;
            }
            for (tag, count) in hist {
                if best.as_ref().is_none_or(|(_, _, b)| count > *b) {
                    best = Some((m_prime.clone(), tag, count));
                }
            }
        }
        attacks[e] = best.map(|(m, t, _)| (m, t));
    }
    // Fresh draws estimate the acceptance rate of the frozen strategy.
    let mut hits = 0u64;
    let mut last: Option<((Bits, Tag), bool)> = None;
    for _ in 0..trials {
        let (x, e) = sample_joint(joint, rng);
        let Some((m_prime, t_prime)) = &attacks[e] else {
            continue;
        };
        let key = Bits::from_index(key_bits, x as u64);
        let ok = &hash.tag_message(&key, m_prime)? == t_prime;
        if ok {
            hits += 1;
        }
        last = Some(((m_prime.clone(), t_prime.clone()), ok));
    }
    let ((attempted_m, attempted_t), accepted) =
        last.ok_or_else(|| Error::InvalidArgument("no usable Monte Carlo draws".into()))?;
    Ok(ForgeryOutcome {
        attempted: (attempted_m, attempted_t),
        accepted,
        trials,
        success_rate: hits as f64 / trials as f64,
    })
}

fn sample_joint<R: Rng + ?Sized>(joint: &JointDistribution, rng: &mut R) -> (usize, usize) {
    let mut u: f64 = rng.gen();
    for x in 0..joint.x_size() {
        for e in 0..joint.e_size() {
            u -= joint.prob(x, e);
            if u <= 0.0 {
                return (x, e);
            }
        }
    }
    (joint.x_size() - 1, joint.e_size() - 1)
}

/// Attack policies for protocol-level false-acceptance measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackPolicy {
    /// Resend the genuine pair; excluded by the `M != M'` requirement, so it
    /// contributes zero to the forgery rate.
    ReplayGenuine,
    /// Uniform random message and tag.
    RandomTag,
    /// Tag a fresh message with Eve's best posterior key guess. Optimal when
    /// the key block of the hash matrix is injective on the posterior.
    BestGuessForgery,
}

/// Runs independent protocol trials under an attack policy and reports the
/// empirical false-acceptance rate with its binomial standard error.
pub fn false_acceptance_rate(
    cfg: &crate::config::ProtocolConfig,
    policy: AttackPolicy,
    trials: u64,
) -> Result<(f64, f64)> {
    crate::protocol::attack_acceptance_rate(cfg, policy, trials)
}
