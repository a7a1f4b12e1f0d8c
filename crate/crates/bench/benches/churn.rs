use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use stableprobe::{Table, TabulatedHash, Variant};

const M: usize = 1 << 14;
const ROUNDS: u64 = (M / 2) as u64;

/// A table holding keys `0..n`, churned FIFO for `warm` rounds.
fn prepared(alpha: f64, variant: Variant, warm: u64) -> Table<u64, u64, TabulatedHash> {
    let n = (alpha * M as f64).round() as u64;
    let mut table = Table::new(M, TabulatedHash::new(7, M)).unwrap();
    for k in 0..n {
        table.insert(k, k).unwrap();
    }
    for r in 0..warm {
        table.remove_with(variant, &r);
        table.insert(n + r, r).unwrap();
    }
    table
}

fn churn(c: &mut Criterion) {
    let mut group = c.benchmark_group("churn");
    group.throughput(Throughput::Elements(ROUNDS));
    for alpha in [0.5, 0.8] {
        for variant in Variant::ALL {
            let n = (alpha * M as f64).round() as u64;
            let start = prepared(alpha, variant, 0);
            group.bench_with_input(BenchmarkId::new(variant.name(), alpha), &alpha, |b, _| {
                b.iter_batched(
                    || start.clone(),
                    |mut table| {
                        for r in 0..ROUNDS {
                            table.remove_with(variant, &r);
                            // Naive deletion may run out of empty slots at high load.
                            let _ = table.insert(n + r, r);
                        }
                        table
                    },
                    BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

fn lookups(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_after_churn");
    let alpha = 0.5;
    let n = (alpha * M as f64).round() as u64;
    for variant in Variant::ALL {
        let table = prepared(alpha, variant, 4 * M as u64);
        let live: Vec<u64> = table.iter().map(|(_, k, _)| *k).collect();
        group.throughput(Throughput::Elements(live.len() as u64));
        group.bench_function(BenchmarkId::new("hit", variant.name()), |b| {
            b.iter(|| live.iter().map(|k| table.find(k).1.get()).sum::<usize>())
        });
        group.bench_function(BenchmarkId::new("miss", variant.name()), |b| {
            b.iter(|| (0..n).map(|k| table.find(&k).1.get()).sum::<usize>())
        });
    }
    group.finish();
}

criterion_group!(benches, churn, lookups);
criterion_main!(benches);
