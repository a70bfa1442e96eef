// SPDX-License-Identifier: Apache-2.0

//! Sequential versus rayon scheduling for the data-parallel kernels.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use speedup_core::classical::{worst_case_queries_with, Goal, KnowledgeState};
use speedup_core::density::monte_carlo_density_with;
use speedup_core::histories::full_bundle;
use speedup_core::oracles::{Family, FamilyKind};
use speedup_core::sharing::SharingEngine;
use speedup_core::state::Registers;
use speedup_core::unitaries::Pipeline;
use speedup_core::Parallelism;

const STRATEGIES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_density");
    let state = Pipeline::relativized(Family::full(FamilyKind::Grover, 2).unwrap()).unwrap().initial_state();
    for samples in [10_000usize, 100_000] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, samples), &samples, |bench, &samples| {
                bench.iter(|| monte_carlo_density_with(&state, Registers::all(), samples, 1, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn minimax(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimax");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    for n in [3u32, 4] {
        let family = Family::full(FamilyKind::Grover, n).unwrap();
        let knowledge = KnowledgeState::full(&family);
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, format!("grover-{n}")), &n, |bench, _| {
                bench.iter(|| worst_case_queries_with(&family, Goal::SolveProblem, &knowledge, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sharing(c: &mut Criterion) {
    let mut group = c.benchmark_group("sharing");
    group.sample_size(20);
    for (kind, n) in [(FamilyKind::Grover, 4), (FamilyKind::DeutschJozsa, 2), (FamilyKind::Simon, 2)] {
        let family = Family::full(kind, n).unwrap();
        let engine = SharingEngine::new(family.clone()).unwrap();
        let b = family.members()[1].choice();
        for (name, exec) in STRATEGIES {
            group.bench_function(BenchmarkId::new(name, format!("{kind}-{n}")), |bench| {
                bench.iter(|| engine.enumerate_sharings(&b, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn histories(c: &mut Criterion) {
    let mut group = c.benchmark_group("history_bundle");
    group.sample_size(20);
    for (kind, n) in [(FamilyKind::Grover, 3), (FamilyKind::Simon, 2)] {
        let family = Family::full(kind, n).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_function(BenchmarkId::new(name, format!("{kind}-{n}")), |bench| {
                bench.iter(|| full_bundle(&family, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, minimax, sharing, histories);
criterion_main!(benches);
