use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use divmon_bench::{monoid, power_word, random_word, SAMPLES};

fn fast(c: &mut Criterion) {
    for (name, text) in SAMPLES {
        let dm = monoid(text);
        let t = dm.synthesize().unwrap();
        let mut group = c.benchmark_group(format!("normalize_fast/{name}"));
        for n in [64usize, 128, 256, 512] {
            group.throughput(Throughput::Elements(n as u64));
            let power = power_word(n);
            group.bench_with_input(BenchmarkId::new("power", n), &power, |b, w| {
                b.iter(|| t.normalize_fast(black_box(w)).unwrap())
            });
            let random = random_word(3, n, 0x5eed);
            group.bench_with_input(BenchmarkId::new("random", n), &random, |b, w| {
                b.iter(|| t.normalize_fast(black_box(w)).unwrap())
            });
        }
        group.finish();
    }
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("normalize_oracle");
    group.sample_size(20);
    for (name, text) in SAMPLES {
        let dm = monoid(text);
        let w = random_word(3, 6, 0x5eed);
        group.bench_function(name, |b| {
            b.iter(|| {
                let m = divmon_core::Monoid::new(dm.presentation().clone());
                let fresh = divmon_core::DivisibilityMonoid::from_monoid_unchecked(m).unwrap();
                let a = fresh.monoid().element(black_box(&w)).unwrap();
                fresh.normalize_oracle(&a).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, fast, oracle);
criterion_main!(benches);
