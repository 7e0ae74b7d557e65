use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use parafrob_core::eqpfit::{fit_eqp_with, FitConfig};
use parafrob_core::parallel::Execution;
use parafrob_core::qpoly::Poly;
use parafrob_core::reduction::{crosscheck, PolyFamily};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cubic() -> PolyFamily {
    PolyFamily::new(
        vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, 0, 1]), Poly::from_ints(&[-1, 2, 1])],
        2,
        2,
    )
    .unwrap()
}

fn series(c: &mut Criterion) {
    let fam = cubic();
    let mut group = c.benchmark_group("series");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "t=3..60"), &exec, |b, &exec| {
            b.iter(|| fam.parametric_frobenius_series(3, 60, black_box(exec)).unwrap())
        });
    }
    group.finish();
}

fn fit(c: &mut Criterion) {
    let (f, _) = cubic().parametric_frobenius_series(3, 120, Execution::Parallel).unwrap();
    let cfg = FitConfig::default();
    let mut group = c.benchmark_group("fit");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "d_max=24"), &exec, |b, &exec| {
            b.iter(|| fit_eqp_with(black_box(&f), &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn cross(c: &mut Criterion) {
    let fam = PolyFamily::new(vec![Poly::from_ints(&[0, 1]), Poly::from_ints(&[-1, 1])], 2, 1).unwrap();
    let mut group = c.benchmark_group("crosscheck");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "t=5..20"), &exec, |b, &exec| {
            b.iter(|| crosscheck(&fam, 5, 20, 2_000_000, black_box(exec)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, series, fit, cross);
criterion_main!(benches);
