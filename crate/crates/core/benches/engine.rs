use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use badapprox::constructions::{build_scenario, golden_line, sample_theta, BKind};
use badapprox::engine::{Engine, NormConvention, Subject};
use badapprox::geometry::{graph_subspace, Ambient};
use badapprox::parallel::Execution;

fn subjects() -> Vec<(&'static str, Subject, u64)> {
    let scenario = build_scenario(4, 3, 1, 2, BKind::Algebraic, 1.0, 1).unwrap();
    let plane = graph_subspace(&sample_theta(1, 2, 1.0, 3).unwrap(), Ambient::Within(&scenario.a_space)).unwrap();
    vec![
        ("golden_line", Subject::Subspace(golden_line()), 1_000_000),
        ("theta_2x1", Subject::Theta(sample_theta(2, 1, 1.0, 5).unwrap()), 100_000),
        ("theta_1x2", Subject::Theta(sample_theta(1, 2, 1.0, 7).unwrap()), 100_000),
        ("plane_in_r4", Subject::Subspace(plane), 10_000),
    ]
}

fn record_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("record_table");
    group.sample_size(10);
    for (name, subject, t_max) in subjects() {
        for (label, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let engine = Engine { execution, ..Engine::default() };
            group.bench_with_input(BenchmarkId::new(label, name), &subject, |b, s| {
                b.iter(|| engine.record_table(s, t_max, NormConvention::Inclusive).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, record_tables);
criterion_main!(benches);
