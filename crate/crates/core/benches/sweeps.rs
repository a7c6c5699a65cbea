use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gras_core::arith::Discriminant;
use gras_core::rayoracle::{Budget, DChoice, SubmoduleSpec};
use gras_core::verify::{run_cases, verify_chevalley, verify_gras, verify_redei, Exec, OracleSource};
use gras_core::{Modulus, PlaceSet};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn form_sweeps(c: &mut Criterion) {
    let ds = Discriminant::range(-3000, 3000);
    let s = PlaceSet::infinite_only();
    let mut g = c.benchmark_group("form sweeps |d| <= 3000");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::new("chevalley narrow", name), &exec, |b, &exec| {
            b.iter(|| run_cases(&ds, exec, |d| verify_chevalley(d, true, &s)))
        });
        g.bench_with_input(BenchmarkId::new("redei", name), &exec, |b, &exec| {
            b.iter(|| run_cases(&ds, exec, verify_redei))
        });
    }
    g.finish();
}

fn ray_sweep(c: &mut Criterion) {
    let cases: Vec<(Discriminant, Modulus)> = Discriminant::range(-30, 30)
        .into_iter()
        .flat_map(|d| [3, 4, 5].map(|mf| (d.clone(), Modulus::new(mf, true).unwrap())))
        .collect();
    let s = PlaceSet::infinite_only();
    let src = OracleSource {
        budget: Budget::default(),
        cache_dir: None,
    };
    let mut g = c.benchmark_group("ray class sweep |d| <= 30");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_with_input(BenchmarkId::new("gras", name), &exec, |b, &exec| {
            b.iter(|| {
                run_cases(&cases, exec, |(d, m)| {
                    verify_gras(d, m, &s, &SubmoduleSpec::Trivial, DChoice::Primary, &src)
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, form_sweeps, ray_sweep);
criterion_main!(benches);
