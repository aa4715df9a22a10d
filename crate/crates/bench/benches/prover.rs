use std::hint::black_box;
use std::time::Duration;

use bangl::logic::parse_sequent;
use bangl::prover::{prove, worked, SearchConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn config(budget: usize) -> SearchConfig {
    SearchConfig {
        max_depth: 40,
        contraction_budget: budget,
        max_solutions: 16,
        timeout: Duration::from_secs(60),
    }
}

fn bench_prove(c: &mut Criterion) {
    let mut group = c.benchmark_group("prove");
    for (name, text, budget) in [
        ("anaphora", worked::ANAPHORA, 1),
        ("ellipsis", worked::ELLIPSIS, 1),
        ("coreference", worked::COREFERENCE, 4),
        ("no_proof", "N, N -> S,S", 4),
    ] {
        let s = parse_sequent(text).unwrap();
        let cfg = config(budget);
        group.bench_function(name, |b| b.iter(|| prove(black_box(&s), &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, bench_prove);
criterion_main!(benches);
