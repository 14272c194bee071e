//! Criterion benchmarks for the quantities that dominate Monte Carlo runtime:
//! Toeplitz sampling and evaluation, invertible-matrix sampling, the Hermitian
//! entropy stack, Fano inversion, and a full protocol trial.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use holevo_auth::adversary::AttackPolicy;
use holevo_auth::entropy::fano_invert;
use holevo_auth::gf2::Bits;
use holevo_auth::hashing::{sample_invertible_gf2, sample_toeplitz};
use holevo_auth::protocol::{simulate_trial, TrialSetup};
use holevo_auth::quantum::{holevo_information, random_density_matrix, Ensemble};
use holevo_auth::ProtocolConfig;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_toeplitz(c: &mut Criterion) {
    let mut group = c.benchmark_group("toeplitz");
    for (n, d) in [(16usize, 8usize), (64, 16), (256, 64)] {
        group.bench_function(format!("sample_eval_n{n}_d{d}"), |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            b.iter_batched(
                || Bits::random(n, &mut ChaCha8Rng::seed_from_u64(2)),
                |x| {
                    let h = sample_toeplitz(n, d, &mut rng).unwrap();
                    black_box(h.evaluate(&x).unwrap())
                },
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn bench_invertible(c: &mut Criterion) {
    let mut group = c.benchmark_group("gf2_invertible");
    for n in [8usize, 16, 32] {
        group.bench_function(format!("sample_n{n}"), |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            b.iter(|| black_box(sample_invertible_gf2(n, &mut rng)))
        });
    }
    group.finish();
}

fn bench_entropy_stack(c: &mut Criterion) {
    let mut group = c.benchmark_group("holevo_information");
    for dim in [2usize, 4, 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ensemble = Ensemble::new(
            (0..4).map(|_| (0.25, random_density_matrix(dim, &mut rng))).collect(),
        )
        .unwrap();
        group.bench_function(format!("d{dim}_parts4"), |b| {
            b.iter(|| black_box(holevo_information(&ensemble).unwrap()))
        });
    }
    group.finish();
}

fn bench_fano(c: &mut Criterion) {
    c.bench_function("fano_invert_m8", |b| {
        b.iter(|| black_box(fano_invert(8, black_box(1.5)).unwrap()))
    });
}

fn bench_protocol_trial(c: &mut Criterion) {
    let cfg = ProtocolConfig { pa_bits: Some(4), ..Default::default() };
    let setup = TrialSetup::from_config(&cfg).unwrap();
    let mut i = 0u64;
    c.bench_function("protocol_trial_n16", |b| {
        b.iter(|| {
            i += 1;
            black_box(simulate_trial(&setup, AttackPolicy::BestGuessForgery, i))
        })
    });
}

criterion_group!(
    benches,
    bench_toeplitz,
    bench_invertible,
    bench_entropy_stack,
    bench_fano,
    bench_protocol_trial
);
criterion_main!(benches);
