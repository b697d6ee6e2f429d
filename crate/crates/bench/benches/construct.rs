use criterion::{criterion_group, criterion_main, Criterion};
use divmon_bench::{monoid, SAMPLES};
use divmon_core::{check_all, parse_presentation, Monoid};

fn constructions(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct");
    group.sample_size(10);
    for (name, text) in SAMPLES {
        group.bench_function(format!("check/{name}"), |b| {
            b.iter(|| check_all(&Monoid::new(parse_presentation(text).unwrap())).unwrap())
        });
        let dm = monoid(text);
        group.bench_function(format!("synthesize/{name}"), |b| b.iter(|| dm.synthesize().unwrap()));
        let top = dm.table().top().unwrap();
        group.bench_function(format!("right_multiplier/{name}"), |b| {
            b.iter(|| dm.right_multiplier_automaton(top).unwrap())
        });
        group.bench_function(format!("left_multiplier/{name}"), |b| {
            b.iter(|| dm.left_multiplier_automaton(top).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, constructions);
criterion_main!(benches);
