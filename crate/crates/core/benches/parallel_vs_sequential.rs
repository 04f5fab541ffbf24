use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use bellforge::lhv::enumerate_lhv_with;
use bellforge::quantum::{band_scan, global_quantum_range_with, named_states};
use bellforge::{family_t, t_polynomial, BellPolynomial, Execution, Scenario, Term};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

/// Dense ±1 polynomial over an (m, n) scenario, enough work per strategy to
/// make enumeration cost visible.
fn dense_polynomial(m: usize, n: usize) -> BellPolynomial {
    let terms = (1..=m).flat_map(|a| {
        (1..=n).map(move |b| Term::new(if (a * 7 + b * 3) % 5 < 2 { -1.0 } else { 1.0 }, a, b))
    });
    BellPolynomial::new(Scenario::new(m, n).unwrap(), terms).unwrap()
}

fn lhv_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_lhv");
    group.sample_size(10);
    for (m, n) in [(3, 6), (6, 8), (8, 10)] {
        let p = dense_polynomial(m, n);
        for (label, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(label, format!("{m}x{n}")), &p, |b, p| {
                b.iter(|| enumerate_lhv_with(black_box(p), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn theta_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta_scan");
    group.sample_size(10);
    let (p, fam) = (t_polynomial(), family_t());
    let states = vec![("singlet".to_string(), named_states().singlet)];
    for grid in [721, 7201] {
        for (label, exec) in MODES {
            group.bench_function(BenchmarkId::new(format!("global_range/{label}"), grid), |b| {
                b.iter(|| global_quantum_range_with(&p, &fam, black_box(grid), exec).unwrap())
            });
            group.bench_function(BenchmarkId::new(format!("band_scan/{label}"), grid), |b| {
                b.iter(|| band_scan(&p, &fam, black_box(grid), &states, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, lhv_enumeration, theta_scans);
criterion_main!(benches);
