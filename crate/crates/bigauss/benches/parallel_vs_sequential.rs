use criterion::{criterion_group, criterion_main, Criterion};

use bigauss::density::{DoubleGaussianDensity, WeightedMeasure};
use bigauss::oracle::{brute_force_minimum, OracleConfig};
use bigauss::par::ExecMode;
use bigauss::stationary::classify_candidates;

const MODES: [(&str, ExecMode); 2] = [
    ("parallel", ExecMode::Parallel),
    ("sequential", ExecMode::Sequential),
];

fn oracle_grid_search(crit: &mut Criterion) {
    let dens = DoubleGaussianDensity::new(0.5).unwrap();
    let target = WeightedMeasure::new(0.3).unwrap();
    let cfg = OracleConfig {
        grid_points: 401,
        k_max: 3,
        ..OracleConfig::default()
    };
    let mut group = crit.benchmark_group("oracle_grid_search");
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| brute_force_minimum(&dens, target, &cfg, mode).unwrap())
        });
    }
    group.finish();
}

fn candidate_classification(crit: &mut Criterion) {
    let dens = DoubleGaussianDensity::new(0.25).unwrap();
    let masses: Vec<WeightedMeasure> = (1..25)
        .map(|i| WeightedMeasure::new(i as f64 * 0.02).unwrap())
        .collect();
    let mut group = crit.benchmark_group("candidate_classification");
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                for &m in &masses {
                    classify_candidates(&dens, m, mode).unwrap();
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, oracle_grid_search, candidate_classification);
criterion_main!(benches);
