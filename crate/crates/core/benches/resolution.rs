use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use resolve_core::marked::MarkedIdeal;
use resolve_core::par::Execution;
use resolve_core::resolver::{
    embedded_desingularize, principalize, resolve_marked_ideal, Config, Mode,
};
use resolve_core::{parse_polynomial, Ideal};

fn ideal(n: usize, gens: &[&str]) -> (Vec<String>, Ideal) {
    let names: Vec<String> = ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect();
    let gs = gens
        .iter()
        .map(|g| parse_polynomial(g, &names).unwrap())
        .collect();
    (names.clone(), Ideal::new(n, gs))
}

fn bench_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("resolution");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let label = format!("{exec:?}");
        let cfg = Config {
            execution: exec,
            ..Config::with_mode(Mode::Resolve)
        };

        let (ns, i) = ideal(2, &["x*y*(x+y)"]);
        group.bench_with_input(
            BenchmarkId::new("principalize xy(x+y)", &label),
            &cfg,
            |b, cfg| b.iter(|| principalize(ns.clone(), i.clone(), cfg).unwrap()),
        );

        let (ns, i) = ideal(3, &["x*y*z"]);
        group.bench_with_input(
            BenchmarkId::new("principalize xyz", &label),
            &cfg,
            |b, cfg| b.iter(|| principalize(ns.clone(), i.clone(), cfg).unwrap()),
        );

        let (ns, i) = ideal(3, &["x^2-y^2*z"]);
        group.bench_with_input(
            BenchmarkId::new("embedded umbrella", &label),
            &cfg,
            |b, cfg| b.iter(|| embedded_desingularize(ns.clone(), i.clone(), cfg).unwrap()),
        );

        let (ns, i) = ideal(2, &["x^2+y^5"]);
        group.bench_with_input(
            BenchmarkId::new("marked (x2+y5, 2)", &label),
            &cfg,
            |b, cfg| {
                b.iter(|| {
                    resolve_marked_ideal(ns.clone(), MarkedIdeal::new(i.clone(), 2, vec![]), cfg)
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_modes);
criterion_main!(benches);
