use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dpsattack_core::attack::brute_force_rates;
use dpsattack_core::optimize::optimize_sigma;
use dpsattack_core::security::scan_nbar;
use dpsattack_core::{AmplitudeProfile, AttackCatalog, NbarGrid, Setup};

const PRACTICAL: &str = r#"{"fiber_db_per_km": 0.2, "length_km": 95, "interferometer_db": 2,
    "detector_efficiency": 0.1, "dark_count": 1e-5, "mu": 0.01}"#;

fn optimize(c: &mut Criterion) {
    c.bench_function("optimize_sigma k=9", |b| {
        b.iter(|| optimize_sigma(black_box(9)).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let profile = AmplitudeProfile::gaussian(6, 1.18, 0).unwrap();
    c.bench_function("brute_force_rates k=6 pad=4", |b| {
        b.iter(|| brute_force_rates(black_box(&profile), 4).unwrap())
    });
}

fn scan(c: &mut Criterion) {
    let setup = Setup::from_json(PRACTICAL).unwrap();
    let catalog = AttackCatalog::new().unwrap();
    let grid = NbarGrid::default();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("scan_nbar 95 km", |b| {
        b.iter(|| scan_nbar(black_box(&setup), &grid, &catalog).unwrap())
    });
    group.finish();
}

criterion_group!(benches, optimize, oracle, scan);
criterion_main!(benches);
