use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphsched::algos::{bfs, pagerank, AlgoOptions};
use graphsched::engine::{Engine, ExecConfig};
use graphsched::graph;
use graphsched::sched::{Binding, LoadBalance, Schedule, ScheduleProgram};

fn program(s: Schedule) -> ScheduleProgram {
    ScheduleProgram::single("s0:s1", Binding::Simple(s))
}

fn workers(c: &mut Criterion) {
    let g = graph::random_edges(50_000, 500_000, 7);
    let n = ExecConfig::default().num_workers.max(2);
    let mut group = c.benchmark_group("bfs_workers");
    group.sample_size(10);
    for w in [1, n] {
        let mut eng = Engine::new(&g, ExecConfig::with_workers(w)).unwrap();
        let p = program(Schedule {
            load_balance: LoadBalance::Etwc,
            ..Default::default()
        });
        group.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, _| {
            b.iter(|| bfs(&mut eng, 0, &p, &AlgoOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn blocking(c: &mut Criterion) {
    let g = graph::random_edges(200_000, 2_000_000, 3);
    let mut group = c.benchmark_group("pr_blocking");
    group.sample_size(10);
    let plain = program(Schedule {
        load_balance: LoadBalance::EdgeOnly,
        ..Default::default()
    });
    let blocked = program(Schedule {
        load_balance: LoadBalance::EdgeOnly,
        blocking: true,
        blocking_size: Some(16_384),
        ..Default::default()
    });
    let mut eng = Engine::new(&g, ExecConfig::default()).unwrap();
    eng.prepare(&blocked).unwrap();
    for (name, p) in [("unblocked", &plain), ("blocked", &blocked)] {
        group.bench_function(name, |b| b.iter(|| pagerank(&mut eng, p, 10, 0.0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, workers, blocking);
criterion_main!(benches);
