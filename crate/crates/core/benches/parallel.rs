//! Sequential vs parallel execution of the data-parallel kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sector_workbench::catalog::builtin;
use sector_workbench::classify::{classification_table, verify_table};
use sector_workbench::cuntz::{verify_haagerup_relations, HaagerupConstants, HaagerupSystem};
use sector_workbench::fusion::validate_ring_with;
use sector_workbench::wzw::{su2k_modular, verlinde};
use sector_workbench::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn validate(c: &mut Criterion) {
    let ring = builtin("su2", Some(24)).unwrap();
    let mut g = c.benchmark_group("validate_su2_24");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| validate_ring_with(&ring, e)));
    }
    g.finish();
}

fn verlinde_table(c: &mut Criterion) {
    let md = su2k_modular(120).unwrap();
    let mut g = c.benchmark_group("verlinde_k120");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| verlinde(&md, e)));
    }
    g.finish();
}

fn haagerup(c: &mut Criterion) {
    let sys = HaagerupSystem::new(HaagerupConstants::new());
    let mut g = c.benchmark_group("haagerup_relations");
    g.sample_size(20);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| verify_haagerup_relations(&sys, e)));
    }
    g.finish();
}

fn classify(c: &mut Criterion) {
    let table = classification_table();
    let mut g = c.benchmark_group("classify_table");
    g.sample_size(20);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| verify_table(&table, e)));
    }
    g.finish();
}

criterion_group!(benches, validate, verlinde_table, haagerup, classify);
criterion_main!(benches);
