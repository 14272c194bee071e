//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime. Run with `cargo test -p holevo-auth-cli --test acceptance`
//! (add `-- --nocapture` to see the lines).

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use holevo_auth::adversary::{guess_quantum, optimal_guess_classical, ClassicalSideInfo, QuantumSideInfo};
use holevo_auth::bounds::{
    build_instance, check_contractivity_suite, check_corollary1, check_corollary2, check_dpi_suite,
    check_lemma2, fixed_pattern_joint, InstanceParams, Lemma2Toy,
};
use holevo_auth::entropy::{binary_entropy, fano_invert};
use holevo_auth::hashing::{collision_estimate, FamilySpec};
use holevo_auth::protocol::{pa_key_length, run_protocol};
use holevo_auth::quantum::{helstrom_success, random_density_matrix, DensityMatrix};
use holevo_auth::seed::{derive_rng, Stream};
use holevo_auth::{Complex64, Error, ProtocolConfig};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, elapsed: Duration, limit: Duration) {
    println!(
        "acceptance {criterion:<44} PASS   ({:.2}s, limit {:.0}s)",
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(
        elapsed <= limit,
        "{criterion}: runtime {:.2}s exceeds limit {:.0}s",
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_holevo-auth")
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join("configs").join(name)
}

/// Criterion 1: empirical Toeplitz collision rate within 4 sigma of 2^-d for
/// (n, d) in {(8,4), (16,8)} over 1e6 sampled instances.
#[test]
fn criterion_01_two_universality() {
    let start = Instant::now();
    for (case, (n, d)) in [(8usize, 4usize), (16, 8)].into_iter().enumerate() {
        let mut rng = derive_rng(1001, Stream::Hash, case as u64);
        let trials = 1_000_000u64;
        let (rate, _) =
            collision_estimate(&FamilySpec::Toeplitz { n, d }, trials, &mut rng).unwrap();
        let p = 2.0f64.powi(-(d as i32));
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (rate - p).abs() <= 4.0 * sigma,
            "(n={n}, d={d}): rate {rate} vs {p} (4 sigma {})",
            4.0 * sigma
        );
    }
    report("01 two-universality", start.elapsed(), Duration::from_secs(30));
}

/// Criterion 2: on 50 constructed instances with exact H and chi <= delta,
/// measured p_forge <= p_guess <= 2^-(H - delta) + 4 sigma, with p_guess
/// brute-forced where the key space fits.
#[test]
fn criterion_02_lemma_chain() {
    let start = Instant::now();
    let mut instances = 0;
    for leaked in [6usize, 7, 8, 9, 10] {
        for (v, delta_slack) in [(0u64, 0.0), (1, 0.5)] {
            for seed in 0..5u64 {
                let params = InstanceParams {
                    n: 12,
                    leaked,
                    delta_slack,
                    tag_bits: 12,
                    trials: 20_000,
                    seed: 9000 + seed * 10 + v,
                    ..Default::default()
                };
                let inst = build_instance(&params).unwrap();
                // forge <= guess (Monte Carlo side)
                assert!(
                    inst.p_forge_hat.rate <= inst.p_guess_exact + 4.0 * inst.p_forge_hat.stderr,
                    "leak {leaked} seed {seed}: forge {} vs guess {}",
                    inst.p_forge_hat.rate,
                    inst.p_guess_exact
                );
                // guess <= 2^-(H - delta) (exact side)
                let bound = 2.0f64.powf(-(inst.entropy_h - inst.delta_declared));
                assert!(
                    inst.p_guess_exact <= bound + 1e-12,
                    "leak {leaked}: exact guess {} vs bound {bound}",
                    inst.p_guess_exact
                );
                // and the empirical guess agrees with the exact one
                let sigma = (inst.p_guess_exact * (1.0 - inst.p_guess_exact)
                    / inst.p_guess_hat.denom as f64)
                    .sqrt();
                assert!(
                    (inst.p_guess_hat.rate - inst.p_guess_exact).abs() <= 4.0 * sigma,
                    "leak {leaked} seed {seed}: empirical {} vs exact {}",
                    inst.p_guess_hat.rate,
                    inst.p_guess_exact
                );
                instances += 1;
            }
        }
    }
    assert_eq!(instances, 50);
    // brute-force oracle for the exact guessing probability (key space <= 2^16)
    for leaked in [6usize, 8] {
        let joint = fixed_pattern_joint(12, leaked).unwrap();
        let (_, p) = optimal_guess_classical(&ClassicalSideInfo::new(joint));
        let expect = 2.0f64.powi(-((12 - leaked) as i32));
        assert!((p - expect).abs() < 1e-12, "brute force {p} vs {expect}");
    }
    report("02 lemma chain (50 instances)", start.elapsed(), Duration::from_secs(120));
}

/// Criterion 3: no-leakage runs at D in {4,6,8} give p_forge within 4 sigma of
/// 2^-D; the full-leakage branch forges with probability >= 0.1 (about 1).
#[test]
fn criterion_03_theorem2_branches() {
    let start = Instant::now();
    let trials = 100_000u64;
    for d in [4usize, 6, 8] {
        let cfg = ProtocolConfig {
            n: 20,
            tag_bits: d,
            auth_entropy_bits: d,
            pa_bits: Some(4),
            trials,
            master_seed: 7_700 + d as u64,
            ..Default::default()
        };
        let report_ = run_protocol(&cfg, holevo_auth::adversary::AttackPolicy::BestGuessForgery, trials)
            .unwrap();
        let p = 2.0f64.powi(-(d as i32));
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (report_.p_forge.rate - p).abs() <= 4.0 * sigma,
            "D = {d}: p_forge {} vs {p} (4 sigma {})",
            report_.p_forge.rate,
            4.0 * sigma
        );
        assert!(report_.all_pass(), "D = {d} report failed:\n{}", report_.summary());
    }
    // full leakage: the gate refuses keys and forgery succeeds outright
    let cfg = ProtocolConfig {
        n: 20,
        tag_bits: 8,
        q_leak: 1.0,
        pa_bits: Some(4),
        trials,
        master_seed: 7_800,
        ..Default::default()
    };
    let report_ =
        run_protocol(&cfg, holevo_auth::adversary::AttackPolicy::BestGuessForgery, trials).unwrap();
    assert!(!report_.feasible);
    assert_eq!(report_.keys_issued, 0);
    assert!(report_.p_forge.rate >= 0.1, "full leak p_forge {}", report_.p_forge.rate);
    assert!(report_.p_forge.rate > 0.99, "expected near-certain forgery");
    report("03 theorem2 branches", start.elapsed(), Duration::from_secs(120));
}

/// Criterion 4: all 16 two-bit toys with one-bit transcripts satisfy
/// chi_EC <= chi_E + 1 within 1e-9, with equality and strict witnesses.
#[test]
fn criterion_04_lemma2_exactness() {
    let start = Instant::now();
    let ket = |b: usize| DensityMatrix::diagonal(&[1.0 - b as f64, b as f64]).unwrap();
    let states: Vec<DensityMatrix> = (0..4).map(|x| ket(x & 1)).collect();
    let mut equality = 0;
    let mut strict = 0;
    for table in 0..16u32 {
        let broadcast = [
            table & 1 != 0,
            table & 2 != 0,
            table & 4 != 0,
            table & 8 != 0,
        ];
        let (check, chi_e, chi_ec) =
            check_lemma2(&Lemma2Toy { states: states.clone(), broadcast }).unwrap();
        assert!(check.pass, "table {table:04b}: chi_E {chi_e} chi_EC {chi_ec}");
        assert!(chi_ec <= chi_e + 1.0 + 1e-9);
        if (chi_ec - (chi_e + 1.0)).abs() < 1e-9 {
            equality += 1;
        }
        if chi_ec < chi_e + 1.0 - 1e-6 {
            strict += 1;
        }
    }
    assert!(equality >= 1, "no equality witness");
    assert!(strict >= 1, "no strict witness");
    report("04 lemma2 exactness (16 toys)", start.elapsed(), Duration::from_secs(30));
}

/// Criterion 5: fano_invert agrees with a 1e-6 grid-scan oracle within 2e-6 on
/// m in 2..=8, chi in {0, 0.5, ..., 3}; back-substitution reproduces the
/// target within 1e-6.
#[test]
fn criterion_05_fano_inversion() {
    let start = Instant::now();
    for m in 2..=8u64 {
        let log_m = (m as f64).log2();
        let log_m1 = ((m - 1) as f64).log2();
        for i in 0..=6 {
            let chi = i as f64 * 0.5;
            let target = log_m - chi;
            let hi = 1.0 - 1.0 / m as f64;
            // independent oracle: first 1e-6 grid point satisfying the condition
            let oracle = if target <= 0.0 {
                0.0
            } else {
                let mut found = hi;
                let steps = (hi / 1e-6).ceil() as u64;
                for k in 0..=steps {
                    let p = (k as f64 * 1e-6).min(hi);
                    if binary_entropy(p).unwrap() + p * log_m1 >= target {
                        found = p;
                        break;
                    }
                }
                found
            };
            let got = fano_invert(m, chi).unwrap();
            assert!(
                (got - oracle).abs() <= 2e-6,
                "m {m} chi {chi}: fano {got} vs oracle {oracle}"
            );
            if target > 1e-9 {
                let back = binary_entropy(got).unwrap() + got * log_m1;
                assert!((back - target).abs() <= 1e-6, "m {m} chi {chi}: back {back} vs {target}");
            }
        }
    }
    report("05 fano inversion grid", start.elapsed(), Duration::from_secs(5));
}

/// Criterion 6: the Helstrom value is exact on |0> vs |+> and never falls
/// below the PGM on 100+ random binary ensembles.
#[test]
fn criterion_06_helstrom_exactness_and_dominance() {
    let start = Instant::now();
    let zero = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
    let got = helstrom_success(0.5, &zero, 0.5, &plus).unwrap();
    let expect = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
    assert!((got - expect).abs() <= 1e-9, "{got} vs {expect}");

    let mut rng: ChaCha8Rng = derive_rng(1006, Stream::Instance, 0);
    let mut checked = 0;
    for dim in [2usize, 3, 4] {
        for _ in 0..40 {
            let p: f64 = rng.gen_range(0.1..0.9);
            let side = QuantumSideInfo::new(vec![
                (p, 0, random_density_matrix(dim, &mut rng)),
                (1.0 - p, 1, random_density_matrix(dim, &mut rng)),
            ])
            .unwrap();
            let g = guess_quantum(&side).unwrap();
            let exact = g.p_exact_if_binary.unwrap();
            assert!(exact >= g.p_lower - 1e-9, "helstrom {exact} below pgm {}", g.p_lower);
            checked += 1;
        }
    }
    assert!(checked >= 100);
    report("06 helstrom exactness and dominance", start.elapsed(), Duration::from_secs(30));
}

/// Criterion 7: zero data-processing or contractivity violations above 1e-7
/// across 500+ random (state pair, channel) samples at d in {2,3,4}.
#[test]
fn criterion_07_dpi_contractivity_suites() {
    let start = Instant::now();
    let dpi = check_dpi_suite(170, &[2, 3, 4], 1007).unwrap();
    assert!(dpi.pass, "dpi violation: {dpi:?}");
    assert!(dpi.measured <= 1e-7);
    let cont = check_contractivity_suite(170, &[2, 3, 4], 1007).unwrap();
    assert!(cont.pass, "contractivity violation: {cont:?}");
    report("07 dpi and contractivity suites", start.elapsed(), Duration::from_secs(30));
}

/// Criterion 8: the extracted key length is floor(n - chi - log2(1/eps_S)) on
/// a 10-point grid including the abort branch.
#[test]
fn criterion_08_key_length_formula() {
    let start = Instant::now();
    let grid: [(usize, f64, f64, Option<usize>); 10] = [
        (16, 4.0, 0.0625, Some(8)),
        (16, 0.0, 1.0 - 1e-12, Some(16)),
        (8, 6.0, 0.0625, None),
        (20, 3.5, 0.25, Some(14)),
        (12, 0.0, 0.5, Some(11)),
        (10, 2.0, 0.25, Some(6)),
        (14, 7.0, 0.125, Some(4)),
        (9, 8.0, 0.5, None),
        (16, 10.0, 0.015625, None),
        (18, 1.25, 0.25, Some(14)),
    ];
    for (n, chi, eps, expect) in grid {
        let got = pa_key_length(n, chi, eps);
        match expect {
            Some(l) => assert_eq!(got.unwrap(), l, "n={n} chi={chi} eps={eps}"),
            None => assert!(
                matches!(got, Err(Error::KeyLengthNonpositive(_))),
                "n={n} chi={chi} eps={eps}: expected abort, got {got:?}"
            ),
        }
    }
    report("08 key-length formula grid", start.elapsed(), Duration::from_secs(5));
}

/// Criterion 9: on hypothesis-satisfying instances, p_auth <= 2^-k + 4 sigma
/// and the combined failure <= 2^-k + 2^-l + 4 sigma over 1e5 trials.
#[test]
fn criterion_09_corollaries() {
    let start = Instant::now();
    // corollary 1 at k = tag_bits, no leakage
    let inst = build_instance(&InstanceParams {
        n: 16,
        leaked: 0,
        tag_bits: 4,
        auth_entropy_bits: 4,
        trials: 100_000,
        seed: 1009,
        ..Default::default()
    })
    .unwrap();
    let c1 = check_corollary1(&inst).unwrap();
    assert!(c1.pass, "{c1:?}");

    // corollary 1 boundary: chi_EC = H - k exactly
    let boundary = build_instance(&InstanceParams {
        n: 16,
        leaked: 12,
        tag_bits: 16,
        auth_entropy_bits: 4,
        trials: 100_000,
        seed: 1010,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(boundary.chi_after, 12.0);
    let c1b = check_corollary1(&boundary).unwrap();
    assert!(c1b.pass, "{c1b:?}");

    // corollary 2 with k = l = 4
    let inst2 = build_instance(&InstanceParams {
        n: 16,
        leaked: 0,
        tag_bits: 4,
        auth_entropy_bits: 4,
        pa_bits: Some(4),
        trials: 100_000,
        seed: 1011,
        ..Default::default()
    })
    .unwrap();
    let c2 = check_corollary2(&inst2).unwrap();
    assert!(c2.pass, "{c2:?}");
    assert!((c2.bound - 0.125).abs() < 1e-12);
    report("09 corollary bounds", start.elapsed(), Duration::from_secs(120));
}

fn csv_body(raw: &str) -> String {
    raw.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

/// Criterion 10: fixed-seed simulate runs produce byte-identical verdict CSV
/// bodies across repeated runs and across thread counts 1 and max.
#[test]
fn criterion_10_end_to_end_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = config_path("default.cfg");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "1", "0"].into_iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(binary())
            .args(["simulate", "--config"])
            .arg(&config)
            .args(["--trials", "10000", "--seed", "42", "--threads", threads, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "simulate exited with {status:?}");
        outputs.push(csv_body(&std::fs::read_to_string(&out).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1], "same-seed runs differ");
    assert_eq!(outputs[0], outputs[2], "thread counts 1 vs max differ");
    let rows = outputs[0].lines().count();
    assert!(rows >= 7, "verdict CSV has only {rows} lines");
    report("10 end-to-end determinism", start.elapsed(), Duration::from_secs(120));
}
