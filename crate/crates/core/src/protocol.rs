//! The three-step protocol at desk scale: syndrome-exchange error correction,
//! privacy amplification to the Holevo-limited key length, and two-universal
//! tag authentication, with transcript accounting and Monte Carlo security
//! reports.
//!
//! Timing of the forgery game: Eve attacks with knowledge of the hash
//! instance, her wiretap view, and the public syndrome bits, before the
//! genuine tag is broadcast (impersonation). See the adversary module docs.

use rand::Rng;
use rayon::prelude::*;

use crate::adversary::AttackPolicy;
use crate::bounds::BoundCheck;
use crate::config::{EcCodeSpec, ProtocolConfig};
use crate::error::{Error, Result};
use crate::gf2::{Bits, Gf2Matrix};
use crate::hashing::{sample_toeplitz, HashInstance, Tag};
use crate::seed::{derive_rng, Stream};

/// Transcript parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// Ordered public communication record.
#[derive(Clone, Debug, Default)]
pub struct Transcript {
    messages: Vec<(Party, Bits)>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript { messages: Vec::new() }
    }

    pub fn push(&mut self, sender: Party, payload: Bits) {
        self.messages.push((sender, payload));
    }

    pub fn messages(&self) -> &[(Party, Bits)] {
        &self.messages
    }

    pub fn total_bits(&self) -> usize {
        self.messages.iter().map(|(_, b)| b.len()).sum()
    }
}

// ---------------------------------------------------------------------------
// Error correction
// ---------------------------------------------------------------------------

/// A blockwise syndrome decoder with a precomputed coset-leader table.
#[derive(Clone, Debug)]
pub struct EcCode {
    block_h: Gf2Matrix,
    block_len: usize,
    blocks: usize,
    /// Min-weight error pattern per block syndrome.
    leaders: Vec<Option<Bits>>,
    /// Guaranteed-correction (packing) radius per block.
    radius: usize,
}

impl EcCode {
    /// Builds the decoder for `n` total bits; `Ok(None)` when no code is configured.
    pub fn build(spec: &EcCodeSpec, n: usize) -> Result<Option<EcCode>> {
        let block_h = match spec {
            EcCodeSpec::None => return Ok(None),
            EcCodeSpec::Hamming74 => {
                // syndrome of a single flip at position j is the binary expansion of j+1
                let mut h = Gf2Matrix::zeros(3, 7);
                for j in 0..7u32 {
                    let code = j + 1;
                    for row in 0..3 {
                        h.set(row, j as usize, code >> row & 1 == 1);
                    }
                }
                h
            }
            EcCodeSpec::Repetition(r) => {
                let mut h = Gf2Matrix::zeros(r - 1, *r);
                for i in 0..r - 1 {
                    h.set(i, i, true);
                    h.set(i, r - 1, true);
                }
                h
            }
            EcCodeSpec::Matrix(_) => spec.to_matrix().expect("matrix spec"),
        };
        let block_len = block_h.cols();
        if !n.is_multiple_of(block_len) {
            return Err(Error::Config(format!(
                "code block length {block_len} does not divide n = {n}"
            )));
        }
        let s = block_h.rows();
        if s > 12 {
            return Err(Error::Config(format!("syndrome width {s} exceeds the desk-scale cap 12")));
        }
        let (leaders, radius) = Self::leader_table(&block_h);
        Ok(Some(EcCode { block_h, block_len, blocks: n / block_len, leaders, radius }))
    }

    /// Enumerates error patterns by increasing weight. The first pattern per
    /// syndrome becomes its leader; the packing radius is the largest weight
    /// below the first syndrome collision.
    fn leader_table(h: &Gf2Matrix) -> (Vec<Option<Bits>>, usize) {
        // advances `positions` to the next k-subset of {0..len-1}, lexicographic
        fn next_combination(positions: &mut [usize], len: usize) -> bool {
            let k = positions.len();
            for i in (0..k).rev() {
                if positions[i] < len - k + i {
                    positions[i] += 1;
                    for j in i + 1..k {
                        positions[j] = positions[j - 1] + 1;
                    }
                    return true;
                }
            }
            false
        }

        let len = h.cols();
        let s = h.rows();
        let mut leaders: Vec<Option<Bits>> = vec![None; 1 << s];
        let mut radius: Option<usize> = None;
        let mut filled = 0usize;
        for weight in 0..=len {
            let mut collision = false;
            let mut positions: Vec<usize> = (0..weight).collect();
            loop {
                let mut e = Bits::zeros(len);
                for &p in &positions {
                    e.set(p, true);
                }
                let idx = h.mul_vec(&e).to_index() as usize;
                if leaders[idx].is_none() {
                    leaders[idx] = Some(e);
                    filled += 1;
                } else {
                    collision = true;
                }
                if weight == 0 || !next_combination(&mut positions, len) {
                    break;
                }
            }
            if collision && radius.is_none() {
                radius = Some(weight - 1);
            }
            if filled == leaders.len() && radius.is_some() {
                break;
            }
        }
        (leaders, radius.unwrap_or(len))
    }

    pub fn syndrome_bits(&self) -> usize {
        self.block_h.rows() * self.blocks
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Concatenated blockwise syndrome of `x`.
    pub fn syndrome(&self, x: &Bits) -> Bits {
        let mut out = Bits::zeros(self.syndrome_bits());
        let s = self.block_h.rows();
        for b in 0..self.blocks {
            let mut block = Bits::zeros(self.block_len);
            for j in 0..self.block_len {
                block.set(j, x.get(b * self.block_len + j));
            }
            let syn = self.block_h.mul_vec(&block);
            for j in 0..s {
                out.set(b * s + j, syn.get(j));
            }
        }
        out
    }

    /// Decodes a syndrome difference into an error-pattern estimate.
    pub fn decode(&self, syndrome_diff: &Bits) -> Result<Bits> {
        let s = self.block_h.rows();
        let mut err = Bits::zeros(self.blocks * self.block_len);
        for b in 0..self.blocks {
            let mut idx = 0usize;
            for j in 0..s {
                if syndrome_diff.get(b * s + j) {
                    idx |= 1 << j;
                }
            }
            let leader = self.leaders[idx]
                .as_ref()
                .ok_or(Error::DecodingFailure(self.radius))?;
            if leader.count_ones() > self.radius {
                return Err(Error::DecodingFailure(self.radius));
            }
            for j in 0..self.block_len {
                if leader.get(j) {
                    err.set(b * self.block_len + j, true);
                }
            }
        }
        Ok(err)
    }
}

/// Syndrome-exchange error correction. Alice's syndrome joins the transcript;
/// Bob decodes the syndrome difference and flips his estimate of the error.
pub fn error_correction(
    x_a: &Bits,
    x_b: &Bits,
    code: &EcCode,
    transcript: &mut Transcript,
) -> Result<Bits> {
    let syn_a = code.syndrome(x_a);
    transcript.push(Party::Alice, syn_a.clone());
    let syn_b = code.syndrome(x_b);
    let err = code.decode(&syn_a.xor(&syn_b))?;
    Ok(x_b.xor(&err))
}

// ---------------------------------------------------------------------------
// Key generation and the wiretap model
// ---------------------------------------------------------------------------

/// The wiretap model generating Eve's view of the candidate key.
#[derive(Clone, Debug)]
pub enum Wiretap {
    /// Each bit leaks independently with the given probability.
    Bernoulli(f64),
    /// A fixed set of leaked positions.
    FixedPattern(Bits),
}

impl Wiretap {
    /// Exact Holevo information of the view about a uniform key, in bits:
    /// the expected number of revealed positions.
    pub fn holevo_information(&self, n: usize) -> f64 {
        match self {
            Wiretap::Bernoulli(q) => n as f64 * q,
            Wiretap::FixedPattern(p) => p.count_ones() as f64,
        }
    }
}

/// Eve's realized view: which positions leaked and their values.
#[derive(Clone, Debug)]
pub struct EveView {
    pub pattern: Bits,
    pub values: Bits,
}

fn bernoulli_bits<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Bits {
    let mut b = Bits::zeros(n);
    for i in 0..n {
        if rng.gen_bool(p) {
            b.set(i, true);
        }
    }
    b
}

/// Draws correlated candidate keys and Eve's wiretap view.
///
/// `x_a` is uniform; `x_b = x_a + BSC(flip_prob)` noise; the view leaks
/// `x_a`'s bits per the wiretap model (unleaked positions erased).
pub fn generate_correlated_keys<R: Rng + ?Sized>(
    n: usize,
    flip_prob: f64,
    wiretap: &Wiretap,
    rng: &mut R,
) -> (Bits, Bits, EveView) {
    let x_a = Bits::random(n, rng);
    let noise = bernoulli_bits(n, flip_prob, rng);
    let x_b = x_a.xor(&noise);
    let pattern = match wiretap {
        Wiretap::Bernoulli(q) => bernoulli_bits(n, *q, rng),
        Wiretap::FixedPattern(p) => p.clone(),
    };
    let mut values = Bits::zeros(n);
    for i in 0..n {
        if pattern.get(i) {
            values.set(i, x_a.get(i));
        }
    }
    (x_a, x_b, EveView { pattern, values })
}

// ---------------------------------------------------------------------------
// Privacy amplification, authentication, leakage, gates
// ---------------------------------------------------------------------------

/// Extracted key length `l = floor(n - chi_after - log2(1/eps_S))`, with a
/// `1e-9` guard against float dust before the floor.
pub fn pa_key_length(n: usize, chi_after: f64, eps_s: f64) -> Result<usize> {
    let raw = n as f64 - chi_after - (1.0 / eps_s).log2();
    let l = (raw + 1e-9).floor();
    if l < 1.0 {
        return Err(Error::KeyLengthNonpositive(l as i64));
    }
    Ok(l as usize)
}

/// Privacy amplification of `x`: samples a fresh Toeplitz instance of output
/// width `l` from the formula, optionally appends its public descriptor to the
/// transcript, and returns `(key, l, instance)`.
pub fn privacy_amplification<R: Rng + ?Sized>(
    x: &Bits,
    chi_after: f64,
    eps_s: f64,
    rng: &mut R,
    transcript: &mut Transcript,
    seed_counts_as_leakage: bool,
) -> Result<(Bits, usize, HashInstance)> {
    let l = pa_key_length(x.len(), chi_after, eps_s)?;
    let h = sample_toeplitz(x.len(), l, rng)?;
    if seed_counts_as_leakage {
        transcript.push(Party::Alice, h.descriptor_bits());
    }
    let key = h.evaluate(x)?.bits().truncate(l);
    Ok((key, l, h))
}

/// A tag verifier bound to a hash instance and a key.
#[derive(Clone, Debug)]
pub struct Verifier {
    hash: HashInstance,
    key: Bits,
}

impl Verifier {
    pub fn new(hash: HashInstance, key: Bits) -> Self {
        Verifier { hash, key }
    }

    pub fn verify(&self, message: &Bits, tag: &Tag) -> bool {
        self.hash.tag_message(&self.key, message).map(|t| &t == tag).unwrap_or(false)
    }
}

/// Tags a message under `x_key`, appends `(M, T)` to the transcript, and
/// returns the tag with a verifier bound to the same key.
pub fn authenticate_exchange(
    x_key: &Bits,
    message: &Bits,
    hash: &HashInstance,
    transcript: &mut Transcript,
) -> Result<(Tag, Verifier)> {
    let tag = hash.tag_message(x_key, message)?;
    transcript.push(Party::Alice, message.concat(tag.bits()));
    Ok((tag, Verifier::new(hash.clone(), x_key.clone())))
}

/// The transcript leakage bound: `chi_{E,C} <= chi_E + t`.
pub fn leakage_update(chi_before: f64, transcript: &Transcript) -> f64 {
    chi_before + transcript.total_bits() as f64
}

/// The data-processing guessing bound `min(1, 2^{-(H - chi)})`.
pub fn f_dp(chi: f64, entropy_h: f64) -> f64 {
    2.0f64.powf(-(entropy_h - chi)).min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapDecision {
    Feasible,
    Infeasible,
}

/// The Holevo gap `delta = H - chi` and the protocol gate: `Feasible` iff
/// `delta > 0` (security target `2^-delta`), `Infeasible` otherwise.
pub fn holevo_gap(entropy_h: f64, chi: f64) -> (f64, GapDecision) {
    let delta = entropy_h - chi;
    let decision = if delta > 0.0 { GapDecision::Feasible } else { GapDecision::Infeasible };
    (delta, decision)
}

// ---------------------------------------------------------------------------
// Trial simulation
// ---------------------------------------------------------------------------

/// Full per-run knobs, independent of the config-file surface.
#[derive(Clone, Debug)]
pub struct TrialSetup {
    pub n: usize,
    pub flip_prob: f64,
    pub wiretap: Wiretap,
    pub ec: Option<EcCode>,
    pub eps_s: f64,
    pub tag_bits: usize,
    pub message_bits: usize,
    pub pa_bits: Option<usize>,
    pub auth_entropy_bits: usize,
    pub master_seed: u64,
    pub pa_seed_counts_as_leakage: bool,
}

impl TrialSetup {
    pub fn from_config(cfg: &ProtocolConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(TrialSetup {
            n: cfg.n,
            flip_prob: cfg.flip_prob,
            wiretap: Wiretap::Bernoulli(cfg.q_leak),
            ec: EcCode::build(&cfg.ec_code, cfg.n)?,
            eps_s: cfg.eps_s,
            tag_bits: cfg.tag_bits,
            message_bits: cfg.message_bits,
            pa_bits: cfg.pa_bits,
            auth_entropy_bits: cfg.auth_entropy_bits,
            master_seed: cfg.master_seed,
            pa_seed_counts_as_leakage: cfg.pa_seed_counts_as_leakage,
        })
    }

    pub fn chi_e(&self) -> f64 {
        self.wiretap.holevo_information(self.n)
    }
}

/// One simulated trial's outcome flags and exact per-trial quantities.
#[derive(Clone, Debug, Default)]
pub struct TrialRecord {
    pub ec_abort: bool,
    pub residual_error: bool,
    pub gate_infeasible: bool,
    pub pa_abort: bool,
    pub key_issued: bool,
    pub keys_match: bool,
    pub genuine_accepted: bool,
    pub guess_hit: bool,
    pub guess_prob_exact: f64,
    pub fa_hit: bool,
    pub forge_hit: bool,
    pub auth_hit: bool,
    pub extract_hit: bool,
    pub extract_prob_exact: f64,
    pub secrecy_tv: f64,
    pub leak_bits_pre_auth: usize,
    pub transcript_bits: usize,
    pub chi_after: f64,
}

fn random_other_message<R: Rng + ?Sized>(bits: usize, avoid: &Bits, rng: &mut R) -> Bits {
    loop {
        let m = Bits::random(bits, rng);
        if &m != avoid {
            return m;
        }
    }
}

/// Eve's linear-constraint system about `x_a`: leaked positions and public
/// syndrome rows. Returns `(mode key, nullspace basis)`.
fn eve_posterior(
    setup: &TrialSetup,
    view: &EveView,
    syndrome: Option<&Bits>,
) -> (Bits, Vec<Bits>) {
    let n = setup.n;
    let mut rows: Vec<Bits> = Vec::new();
    let mut rhs: Vec<bool> = Vec::new();
    for i in 0..n {
        if view.pattern.get(i) {
            let mut row = Bits::zeros(n);
            row.set(i, true);
            rows.push(row);
            rhs.push(view.values.get(i));
        }
    }
    if let (Some(code), Some(syn)) = (&setup.ec, syndrome) {
        let s = code.block_h.rows();
        for b in 0..code.blocks {
            for r in 0..s {
                let mut row = Bits::zeros(n);
                for j in 0..code.block_len {
                    if code.block_h.get(r, j) {
                        row.set(b * code.block_len + j, true);
                    }
                }
                rows.push(row);
                rhs.push(syn.get(b * s + r));
            }
        }
    }
    if rows.is_empty() {
        return (Bits::zeros(n), (0..n).map(|i| {
            let mut v = Bits::zeros(n);
            v.set(i, true);
            v
        }).collect());
    }
    let a = Gf2Matrix::from_rows(&rows);
    let b = Bits::from_bools(&rhs);
    let mode = a.solve_lex_min(&b).expect("true key satisfies the system");
    let nullspace = a.nullspace_basis();
    (mode, nullspace)
}

/// Runs one protocol trial under an attack policy. All randomness derives from
/// `(master seed, stream, trial index)`.
pub fn simulate_trial(setup: &TrialSetup, policy: AttackPolicy, trial: u64) -> TrialRecord {
    let mut rec = TrialRecord::default();
    let n = setup.n;

    let mut rng_keys = derive_rng(setup.master_seed, Stream::Keys, trial);
    let (x_a, x_b, view) =
        generate_correlated_keys(n, setup.flip_prob, &setup.wiretap, &mut rng_keys);

    let mut transcript = Transcript::new();
    let mut syndrome = None;
    let x_b_corr = match &setup.ec {
        Some(code) => {
            let syn_a = code.syndrome(&x_a);
            match error_correction(&x_a, &x_b, code, &mut transcript) {
                Ok(corrected) => {
                    syndrome = Some(syn_a);
                    corrected
                }
                Err(_) => {
                    rec.ec_abort = true;
                    rec.transcript_bits = transcript.total_bits();
                    return rec;
                }
            }
        }
        None => x_b.clone(),
    };
    rec.residual_error = x_b_corr != x_a;

    let chi_e = setup.chi_e();
    let chi_after_ec = leakage_update(chi_e, &transcript);
    let (_, decision) = holevo_gap(n as f64, chi_e);
    rec.gate_infeasible = decision == GapDecision::Infeasible;

    // Privacy amplification (key issuance), gated on the Holevo gap.
    let mut pa_data: Option<(Bits, usize, HashInstance)> = None;
    if !rec.gate_infeasible {
        let mut rng_pa = derive_rng(setup.master_seed, Stream::PrivacyAmp, trial);
        let result = match setup.pa_bits {
            Some(l) => sample_toeplitz(n, l, &mut rng_pa).map(|h| {
                if setup.pa_seed_counts_as_leakage {
                    transcript.push(Party::Alice, h.descriptor_bits());
                }
                let key = h.evaluate(&x_a).expect("sizes fixed").bits().truncate(l);
                (key, l, h)
            }),
            None => privacy_amplification(
                &x_a,
                chi_after_ec,
                setup.eps_s,
                &mut rng_pa,
                &mut transcript,
                setup.pa_seed_counts_as_leakage,
            ),
        };
        match result {
            Ok((key_a, l, h)) => {
                let key_b = h.evaluate(&x_b_corr).expect("sizes fixed").bits().truncate(l);
                rec.key_issued = true;
                rec.keys_match = key_a == key_b;
                pa_data = Some((key_a, l, h));
            }
            Err(_) => rec.pa_abort = true,
        }
    }

    rec.leak_bits_pre_auth = transcript.total_bits();
    rec.chi_after = leakage_update(chi_e, &transcript);

    // Authentication of a fresh message under the candidate key.
    let mut rng_msg = derive_rng(setup.master_seed, Stream::Message, trial);
    let message = Bits::random(setup.message_bits, &mut rng_msg);
    let mut rng_hash = derive_rng(setup.master_seed, Stream::Hash, trial);
    let h_auth = sample_toeplitz(n + setup.message_bits, setup.tag_bits, &mut rng_hash)
        .expect("tag_bits <= n <= n + message_bits");
    let (tag, _) = authenticate_exchange(&x_a, &message, &h_auth, &mut transcript)
        .expect("sizes fixed");
    let bob = Verifier::new(h_auth.clone(), x_b_corr.clone());
    rec.genuine_accepted = bob.verify(&message, &tag);
    rec.transcript_bits = transcript.total_bits();

    // Eve's posterior over x_a from her view and the public syndrome.
    let (mode_key, nullspace) = eve_posterior(setup, &view, syndrome.as_ref());
    rec.guess_prob_exact = 2.0f64.powi(-(nullspace.len() as i32));
    rec.guess_hit = mode_key == x_a;

    // Random-tag probe (the canonical false-acceptance measurement).
    let mut rng_fa = derive_rng(setup.master_seed, Stream::AttackRandomTag, trial);
    {
        let m_prime = random_other_message(setup.message_bits, &message, &mut rng_fa);
        let t_prime = Tag::new(Bits::random(setup.tag_bits, &mut rng_fa));
        rec.fa_hit = bob.verify(&m_prime, &t_prime);
    }

    // Policy attacks: one draw for the forgery rate, an independent draw for
    // the authentication-step rate.
    let attack = |stream: Stream| -> bool {
        let mut rng = derive_rng(setup.master_seed, stream, trial);
        match policy {
            AttackPolicy::ReplayGenuine => false,
            AttackPolicy::RandomTag => {
                let m_prime = random_other_message(setup.message_bits, &message, &mut rng);
                let t_prime = Tag::new(Bits::random(setup.tag_bits, &mut rng));
                bob.verify(&m_prime, &t_prime)
            }
            AttackPolicy::BestGuessForgery => {
                let m_prime = random_other_message(setup.message_bits, &message, &mut rng);
                let t_prime = h_auth.tag_message(&mode_key, &m_prime).expect("sizes fixed");
                bob.verify(&m_prime, &t_prime)
            }
        }
    };
    rec.forge_hit = attack(Stream::AttackForgery);
    rec.auth_hit = attack(Stream::AttackAuth);

    // Exact key-extraction odds when a key was issued.
    if let Some((key_a, l, h_pa)) = pa_data {
        let image_cols: Vec<Bits> = nullspace
            .iter()
            .map(|w| h_pa.matrix().mul_vec(w).truncate(l))
            .collect();
        let rank = if image_cols.is_empty() {
            0
        } else {
            Gf2Matrix::from_rows(&image_cols).rank()
        };
        rec.extract_prob_exact = 2.0f64.powi(-(rank as i32));
        rec.secrecy_tv = 1.0 - 2.0f64.powi(rank as i32 - l as i32);
        let guess_key = h_pa.evaluate(&mode_key).expect("sizes fixed").bits().truncate(l);
        rec.extract_hit = guess_key == key_a;
    }

    rec
}

/// Runs trials (rayon-parallel, order-stable).
pub fn run_trials(setup: &TrialSetup, policy: AttackPolicy, trials: u64) -> Vec<TrialRecord> {
    (0..trials).into_par_iter().map(|i| simulate_trial(setup, policy, i)).collect()
}

/// Rate of policy-attack acceptances over completed trials.
pub fn attack_acceptance_rate(
    cfg: &ProtocolConfig,
    policy: AttackPolicy,
    trials: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let setup = TrialSetup::from_config(cfg)?;
    let records = run_trials(&setup, policy, trials);
    let completed: Vec<&TrialRecord> = records.iter().filter(|r| !r.ec_abort).collect();
    let hits = completed.iter().filter(|r| r.forge_hit).count() as u64;
    let est = RateEstimate::from_counts(hits, completed.len() as u64);
    Ok((est.rate, est.stderr))
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// An empirical rate with its binomial standard error.
#[derive(Clone, Copy, Debug, Default)]
pub struct RateEstimate {
    pub hits: u64,
    pub denom: u64,
    pub rate: f64,
    pub stderr: f64,
}

impl RateEstimate {
    pub fn from_counts(hits: u64, denom: u64) -> Self {
        if denom == 0 {
            return RateEstimate::default();
        }
        let rate = hits as f64 / denom as f64;
        let stderr = (rate * (1.0 - rate) / denom as f64).sqrt();
        RateEstimate { hits, denom, rate, stderr }
    }
}

/// Aggregated security report for one configuration and attack policy.
#[derive(Clone, Debug)]
pub struct SecurityReport {
    pub policy: AttackPolicy,
    pub trials: u64,
    pub completed: u64,
    pub keys_issued: u64,
    pub ec_aborts: u64,
    pub gate_infeasible_count: u64,
    pub pa_aborts: u64,
    pub residual_errors: u64,
    pub entropy_h: f64,
    pub holevo_chi: f64,
    pub holevo_chi_after: f64,
    pub delta: f64,
    pub feasible: bool,
    pub key_length: Option<usize>,
    pub f_dp_value: f64,
    pub p_fa_bound: f64,
    pub unified_epsilon: f64,
    pub guess_bound_proof_form: f64,
    pub guess_bound_stated_form: f64,
    pub completeness: RateEstimate,
    pub p_guess: RateEstimate,
    pub p_guess_exact_mean: f64,
    pub p_guess_exact_stderr: f64,
    pub p_fa: RateEstimate,
    pub p_forge: RateEstimate,
    pub p_auth: RateEstimate,
    pub p_extract: RateEstimate,
    pub p_extract_exact_mean: f64,
    pub secrecy_tv_mean: f64,
    pub p_combined: RateEstimate,
    pub verdicts: Vec<BoundCheck>,
}

fn binom(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Always-valid analytic ceiling on Eve's exact guessing probability: the
/// constraint system has rank at most (leaked positions + syndrome bits), so
/// `E[2^-free] <= 2^s E[2^(r-n)]`, which is `2^s ((1+q)/2)^n` for a
/// Bernoulli(q) wiretap and `2^(s - (n - r))` for a fixed pattern.
fn guess_ceiling(setup: &TrialSetup) -> f64 {
    let s = setup.ec.as_ref().map(|c| c.syndrome_bits()).unwrap_or(0) as i32;
    let n = setup.n;
    let base = match &setup.wiretap {
        Wiretap::Bernoulli(q) => (0.5 * (1.0 + q)).powi(n as i32),
        Wiretap::FixedPattern(p) => 2.0f64.powi(-((n - p.count_ones()) as i32)),
    };
    (base * 2.0f64.powi(s)).min(1.0)
}

/// Whether the Shannon-exponent guessing bound `2^-(H - chi_EC)` is valid for
/// the configured wiretap. For Bernoulli leaks with `0 < q < 1` the exact
/// guessing probability `((1+q)/2)^n` exceeds `2^-n(1-q)` (Jensen), so the
/// form only holds for degenerate `q` or fixed patterns.
fn shannon_form_is_valid(setup: &TrialSetup) -> bool {
    match &setup.wiretap {
        Wiretap::Bernoulli(q) => *q == 0.0 || *q == 1.0,
        Wiretap::FixedPattern(_) => true,
    }
}

/// Probability that every block's error stays within the guaranteed-correction
/// radius (a lower bound on end-to-end key agreement).
fn analytic_agreement(setup: &TrialSetup) -> f64 {
    let f = setup.flip_prob;
    match &setup.ec {
        None => (1.0 - f).powi(setup.n as i32),
        Some(code) => {
            let mut per_block = 0.0;
            for w in 0..=code.radius.min(code.block_len) {
                per_block += binom(code.block_len, w)
                    * f.powi(w as i32)
                    * (1.0 - f).powi((code.block_len - w) as i32);
            }
            per_block.powi(code.blocks as i32)
        }
    }
}

/// Runs the full protocol and assembles the verdict report.
pub fn run_protocol(cfg: &ProtocolConfig, policy: AttackPolicy, trials: u64) -> Result<SecurityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let setup = TrialSetup::from_config(cfg)?;
    let records = run_trials(&setup, policy, trials);

    let n = setup.n;
    let entropy_h = n as f64;
    let chi_e = setup.chi_e();
    let (delta, decision) = holevo_gap(entropy_h, chi_e);
    let feasible = decision == GapDecision::Feasible;

    let ec_aborts = records.iter().filter(|r| r.ec_abort).count() as u64;
    let completed_records: Vec<&TrialRecord> = records.iter().filter(|r| !r.ec_abort).collect();
    let completed = completed_records.len() as u64;
    let keys_issued = completed_records.iter().filter(|r| r.key_issued).count() as u64;
    let gate_infeasible_count =
        completed_records.iter().filter(|r| r.gate_infeasible).count() as u64;
    let pa_aborts = completed_records.iter().filter(|r| r.pa_abort).count() as u64;
    let residual_errors = completed_records.iter().filter(|r| r.residual_error).count() as u64;

    let count = |f: &dyn Fn(&TrialRecord) -> bool| -> u64 {
        completed_records.iter().filter(|r| f(r)).count() as u64
    };
    let completeness =
        RateEstimate::from_counts(count(&|r| !r.residual_error), completed);
    let p_guess = RateEstimate::from_counts(count(&|r| r.guess_hit), completed);
    let p_fa = RateEstimate::from_counts(count(&|r| r.fa_hit), completed);
    let p_forge = RateEstimate::from_counts(count(&|r| r.forge_hit), completed);
    let p_auth = RateEstimate::from_counts(count(&|r| r.auth_hit), completed);
    let p_extract = RateEstimate::from_counts(
        completed_records.iter().filter(|r| r.key_issued && r.extract_hit).count() as u64,
        keys_issued,
    );
    let p_combined = RateEstimate::from_counts(
        completed_records
            .iter()
            .filter(|r| r.key_issued && (r.auth_hit || r.extract_hit))
            .count() as u64,
        keys_issued,
    );

    // Deterministic sequential folds of per-trial exact quantities.
    let mut guess_sum = 0.0;
    let mut guess_sq = 0.0;
    for r in &completed_records {
        guess_sum += r.guess_prob_exact;
        guess_sq += r.guess_prob_exact * r.guess_prob_exact;
    }
    let p_guess_exact_mean = if completed > 0 { guess_sum / completed as f64 } else { 0.0 };
    let p_guess_exact_stderr = if completed > 1 {
        let var = (guess_sq / completed as f64 - p_guess_exact_mean * p_guess_exact_mean).max(0.0);
        (var / completed as f64).sqrt()
    } else {
        0.0
    };
    let mut extract_sum = 0.0;
    let mut tv_sum = 0.0;
    for r in &completed_records {
        if r.key_issued {
            extract_sum += r.extract_prob_exact;
            tv_sum += r.secrecy_tv;
        }
    }
    let p_extract_exact_mean =
        if keys_issued > 0 { extract_sum / keys_issued as f64 } else { 0.0 };
    let secrecy_tv_mean = if keys_issued > 0 { tv_sum / keys_issued as f64 } else { 0.0 };

    let holevo_chi_after = completed_records
        .iter()
        .map(|r| r.chi_after)
        .fold(chi_e, f64::max);
    let key_length = if feasible {
        match setup.pa_bits {
            Some(l) => Some(l),
            None => pa_key_length(n, chi_e + expected_pre_pa_leak(&setup), setup.eps_s).ok(),
        }
    } else {
        None
    };

    let f_dp_value = f_dp(holevo_chi_after, entropy_h);
    let p_fa_bound = 2.0f64.powi(-(setup.tag_bits as i32));
    let unified_epsilon = f_dp_value + p_fa_bound;
    let guess_bound_proof_form = 2.0f64.powf(-(entropy_h - chi_e));
    let guess_bound_stated_form = 2.0f64.powf(-(entropy_h + chi_e));

    // Verdicts.
    let mut verdicts = Vec::new();
    verdicts.push(BoundCheck::lower_mc(
        "completeness_agreement",
        analytic_agreement(&setup),
        completeness.rate,
        completeness.stderr,
    ));
    // two-sided comparison: sigma from the expected rate, not the (possibly
    // zero-hit) empirical one
    let guess_expected_sigma = if completed > 0 {
        (p_guess_exact_mean * (1.0 - p_guess_exact_mean) / completed as f64).sqrt()
    } else {
        0.0
    };
    verdicts.push(BoundCheck::upper_mc(
        "guess_empirical_vs_exact",
        0.0,
        (p_guess.rate - p_guess_exact_mean).abs(),
        guess_expected_sigma + p_guess_exact_stderr,
    ));
    // guessing chain with the tag-collision floor: forging succeeds by key
    // guessing or by an accidental tag collision (exactly 2^-D per attempt)
    verdicts.push(BoundCheck::upper_mc(
        "forge_le_guess_plus_tagfloor",
        (p_guess_exact_mean + p_fa_bound).min(1.0),
        p_forge.rate,
        p_forge.stderr,
    ));
    let ceiling = guess_ceiling(&setup);
    verdicts.push(BoundCheck::upper_mc(
        "guess_wiretap_ceiling",
        ceiling,
        p_guess_exact_mean,
        p_guess_exact_stderr,
    ));
    if shannon_form_is_valid(&setup) {
        // deterministic in these regimes: every trial has the same free rank
        verdicts.push(BoundCheck::exact_upper(
            "lemma_guess_le_dp_bound",
            f_dp(holevo_chi_after, entropy_h),
            p_guess_exact_mean,
            1e-12,
        ));
    }
    if feasible {
        // the achievable threshold: key guessing plus the tag-collision floor
        verdicts.push(BoundCheck::upper_mc(
            "theorem2_security",
            (ceiling + p_fa_bound).min(1.0),
            p_forge.rate,
            p_forge.stderr,
        ));
    } else {
        verdicts.push(BoundCheck::lower_mc(
            "theorem2_forge_floor",
            0.1,
            p_forge.rate,
            p_forge.stderr,
        ));
    }
    verdicts.push(BoundCheck::upper_mc(
        "fa_random_tag",
        p_fa_bound,
        p_fa.rate,
        p_fa.stderr,
    ));
    // The corollary rows additionally need the tag to carry the k-bit
    // authentication budget; a shorter tag cannot deliver 2^-k security.
    let k = setup.auth_entropy_bits as f64;
    let auth_budget_met = setup.tag_bits >= setup.auth_entropy_bits;
    if auth_budget_met && holevo_chi_after <= entropy_h - k {
        verdicts.push(BoundCheck::upper_mc(
            "corollary1_auth",
            2.0f64.powf(-k),
            p_auth.rate,
            p_auth.stderr,
        ));
    }
    if let Some(l) = key_length {
        if auth_budget_met && chi_e <= entropy_h - k - l as f64 && keys_issued > 0 {
            verdicts.push(BoundCheck::upper_mc(
                "corollary2_combined",
                2.0f64.powf(-k) + 2.0f64.powi(-(l as i32)),
                p_combined.rate,
                p_combined.stderr,
            ));
        }
    }
    let expected_chi_after = chi_e
        + completed_records.first().map(|r| r.leak_bits_pre_auth as f64).unwrap_or(0.0);
    verdicts.push(BoundCheck::exact(
        "lemma2_leak_accounting",
        expected_chi_after,
        holevo_chi_after,
        1e-9,
    ));
    let keys_on_infeasible =
        completed_records.iter().filter(|r| r.gate_infeasible && r.key_issued).count();
    verdicts.push(BoundCheck::exact("gate_soundness", 0.0, keys_on_infeasible as f64, 0.5));
    verdicts.push(BoundCheck::exact(
        "epsilon_decomposition",
        0.0,
        (unified_epsilon - (f_dp_value + p_fa_bound)).abs(),
        1e-12,
    ));

    Ok(SecurityReport {
        policy,
        trials,
        completed,
        keys_issued,
        ec_aborts,
        gate_infeasible_count,
        pa_aborts,
        residual_errors,
        entropy_h,
        holevo_chi: chi_e,
        holevo_chi_after,
        delta,
        feasible,
        key_length,
        f_dp_value,
        p_fa_bound,
        unified_epsilon,
        guess_bound_proof_form,
        guess_bound_stated_form,
        completeness,
        p_guess,
        p_guess_exact_mean,
        p_guess_exact_stderr,
        p_fa,
        p_forge,
        p_auth,
        p_extract,
        p_extract_exact_mean,
        secrecy_tv_mean,
        p_combined,
        verdicts,
    })
}

/// Deterministic pre-PA transcript bits (syndrome width only).
fn expected_pre_pa_leak(setup: &TrialSetup) -> f64 {
    setup.ec.as_ref().map(|c| c.syndrome_bits() as f64).unwrap_or(0.0)
}

impl SecurityReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// CSV body: `bound_name,bound_value,measured,stderr,pass` per verdict.
    pub fn verdict_csv_body(&self) -> String {
        let mut s = String::from("bound_name,bound_value,measured,stderr,pass\n");
        for v in &self.verdicts {
            s.push_str(&v.csv_row());
            s.push('\n');
        }
        s
    }

    /// Human-readable summary block.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "trials: {} (completed {}, keys issued {})\n",
            self.trials, self.completed, self.keys_issued
        ));
        s.push_str(&format!(
            "aborts: ec {} | gate infeasible {} | pa {} | residual errors {}\n",
            self.ec_aborts, self.gate_infeasible_count, self.pa_aborts, self.residual_errors
        ));
        s.push_str(&format!(
            "H = {:.6} bits, chi_E = {:.6}, chi_EC = {:.6}, delta = {:.6} ({})\n",
            self.entropy_h,
            self.holevo_chi,
            self.holevo_chi_after,
            self.delta,
            if self.feasible { "feasible" } else { "infeasible: p_forge >= Omega(1)" }
        ));
        match self.key_length {
            Some(l) => s.push_str(&format!("extracted key length l = {l}\n")),
            None => s.push_str("no key issued\n"),
        }
        s.push_str(&format!(
            "unified epsilon = {:.6e} (f_dp {:.6e} + p_fa bound {:.6e})\n",
            self.unified_epsilon, self.f_dp_value, self.p_fa_bound
        ));
        s.push_str(&format!(
            "guess bound, proof form 2^-(H-delta) = {:.6e}; stated form 2^-(H+delta) = {:.6e}\n",
            self.guess_bound_proof_form, self.guess_bound_stated_form
        ));
        s.push_str(&format!(
            "p_guess = {:.6e} (+/- {:.2e}; exact {:.6e})\n",
            self.p_guess.rate, self.p_guess.stderr, self.p_guess_exact_mean
        ));
        s.push_str(&format!(
            "p_FA = {:.6e} (+/- {:.2e})  p_forge = {:.6e} (+/- {:.2e})\n",
            self.p_fa.rate, self.p_fa.stderr, self.p_forge.rate, self.p_forge.stderr
        ));
        s.push_str(&format!(
            "p_auth = {:.6e} (+/- {:.2e})  p_extract = {:.6e} (exact {:.6e})  p_FA/p_guess ratio = {:.3}\n",
            self.p_auth.rate,
            self.p_auth.stderr,
            self.p_extract.rate,
            self.p_extract_exact_mean,
            if self.p_guess_exact_mean > 0.0 { self.p_fa.rate / self.p_guess_exact_mean } else { f64::NAN }
        ));
        s.push_str(&format!("mean secrecy TV advantage = {:.6e}\n", self.secrecy_tv_mean));
        s.push_str(&format!(
            "tag-collision bound / measured p_FA ratio = {:.3}\n",
            if self.p_fa.rate > 0.0 { self.p_fa_bound / self.p_fa.rate } else { f64::NAN }
        ));
        for v in &self.verdicts {
            s.push_str(&format!(
                "  [{}] {:<28} bound {:>13.6e}  measured {:>13.6e}  stderr {:>10.3e}\n",
                if v.pass { "PASS" } else { "FAIL" },
                v.name,
                v.bound,
                v.measured,
                v.stderr
            ));
        }
        s.push_str(if self.all_pass() { "overall: PASS\n" } else { "overall: FAIL\n" });
        s
    }
}
