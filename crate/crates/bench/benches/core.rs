use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use leibniz_bench::{conjecture_instance, generic_first_family, unit_first_family};
use leibniz_core::arith::rational::int;
use leibniz_core::derivations::derivation_space;
use leibniz_core::extensions::{build_extension_problem, conjecture_check, eliminate, generate_constraints};
use leibniz_core::{LieVariant, Var};

fn leibniz_check(c: &mut Criterion) {
    let mut g = c.benchmark_group("leibniz_check");
    for n in [5, 8, 11] {
        let a = generic_first_family(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| a.leibniz_check()));
    }
    g.finish();
}

fn derivations(c: &mut Criterion) {
    let mut g = c.benchmark_group("derivation_space");
    for n in [5, 8, 11] {
        let a = generic_first_family(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| derivation_space(a)));
    }
    g.finish();
}

fn elimination(c: &mut Criterion) {
    let mut g = c.benchmark_group("eliminate");
    g.sample_size(10);
    for n in [5, 7] {
        let nil = unit_first_family(n);
        let problem = build_extension_problem(&nil, derivation_space(&nil).template()).unwrap();
        let sys = generate_constraints(&problem).with_hypotheses(&[(Var::new("a1"), int(1))]);
        g.bench_with_input(BenchmarkId::from_parameter(n), &sys, |b, s| b.iter(|| eliminate(s)));
    }
    g.finish();
}

fn conjecture(c: &mut Criterion) {
    let mut g = c.benchmark_group("conjecture_check");
    for (variant, n) in [(LieVariant::A, 7), (LieVariant::B, 9)] {
        let (r, alpha, b) = conjecture_instance(variant, n, 11);
        assert!(conjecture_check(n, variant, r, &alpha, &int(0), &b).unwrap().eliminated);
        g.bench_function(format!("{variant:?}/{n}"), |bench| {
            bench.iter(|| conjecture_check(n, variant, r, &alpha, &int(0), &b))
        });
    }
    g.finish();
}

criterion_group!(benches, leibniz_check, derivations, elimination, conjecture);
criterion_main!(benches);
