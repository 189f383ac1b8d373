use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use skewprod::algebra::rat;
use skewprod::bottcher::bottcher;
use skewprod::green::estimate;
use skewprod::newton::NewtonPolygon;
use skewprod::regions::{sample_rng, verify_invariance};
use skewprod::{classify, GreenConfig, GreenKind, WedgeSpec};
use skewprod_bench::{case4, weighted_cubic};

fn newton(c: &mut Criterion) {
    let support = [(0, 9), (1, 7), (2, 6), (3, 3), (5, 2), (6, 1), (9, 0), (4, 4), (7, 5)];
    c.bench_function("newton_polygon_9_points", |b| b.iter(|| NewtonPolygon::from_support(black_box(support))));
    let f = case4();
    c.bench_function("classify_case4", |b| b.iter(|| classify(black_box(&f))));
}

fn green(c: &mut Criterion) {
    let f = weighted_cubic();
    let cl = classify(&f).unwrap();
    let cfg = GreenConfig::default();
    let (z, w) = (Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2));
    for kind in [GreenKind::Alpha, GreenKind::AlphaPlus, GreenKind::F] {
        c.bench_function(&format!("green_{}", kind.name()), |b| b.iter(|| estimate(&f, &cl, kind, black_box(z), black_box(w), &cfg)));
    }
}

fn conjugacy(c: &mut Criterion) {
    let f = case4();
    let cl = classify(&f).unwrap();
    let region = WedgeSpec::Between { l1: rat(1, 3), l2: rat(7, 6), r: 1e-2 };
    let (z, w) = region.sample(&mut sample_rng(1, 0));
    assert!(region.contains(z, w));
    c.bench_function("bottcher_case4", |b| b.iter(|| bottcher(&f, &cl, &region, black_box(z), black_box(w), &GreenConfig::default())));
}

fn invariance(c: &mut Criterion) {
    let f = case4();
    let spec = WedgeSpec::Lower { l: rat(1, 2), r1: 0.19, r2: 0.1 };
    c.bench_function("verify_invariance_1000", |b| b.iter(|| verify_invariance(&f, &spec, 1000, black_box(3))));
}

criterion_group!(benches, newton, green, conjugacy, invariance);
criterion_main!(benches);
