use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eqop::group::{character_table, induced_rep_operator, GroupSpec};
use eqop::imaging::{build_pairs, gen_shapes, PairMode, TransformSpec};
use eqop::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn characters(c: &mut Criterion) {
    let spec = GroupSpec::translations_rotations(5, 4).unwrap();
    let mut group = c.benchmark_group("induced_character_table");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| character_table(&spec, exec, |g| induced_rep_operator(&spec, g, 200)).unwrap())
        });
    }
    group.finish();
}

fn shapes(c: &mut Criterion) {
    let mut group = c.benchmark_group("gen_shapes_200");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| gen_shapes(200, 0, 28, exec).unwrap())
        });
    }
    group.finish();
}

fn pairs(c: &mut Criterion) {
    let base = gen_shapes(50, 0, 28, Execution::Sequential).unwrap();
    let spec = TransformSpec::rotations(10).unwrap();
    let mut group = c.benchmark_group("build_pairs_rot10");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| build_pairs(&base, &spec, PairMode::Orbit, Some(2000), 0, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, characters, shapes, pairs);
criterion_main!(benches);
