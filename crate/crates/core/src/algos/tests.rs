use super::*;
use crate::engine::ExecConfig;
use crate::graph;
use crate::oracle;
use crate::priority::INF;
use crate::sched::{Direction, HybridCriteria, HybridSchedule, LoadBalance, Threshold};
use crate::verify;

fn exec(workers: usize) -> ExecConfig {
    ExecConfig::with_workers(workers)
}

fn simple(s: Schedule) -> ScheduleProgram {
    ScheduleProgram::single("s0:s1", Binding::Simple(s))
}

fn fused() -> ScheduleProgram {
    ScheduleProgram::single(
        "s0",
        Binding::Simple(Schedule {
            kernel_fusion: true,
            ..Default::default()
        }),
    )
}

fn directed_path(n: u32) -> Graph {
    Graph::from_edges(n as usize, (1..n).map(|v| (v - 1, v)).collect(), None).unwrap()
}

#[test]
fn bfs_examples() {
    let g = directed_path(4);
    let mut eng = Engine::new(&g, exec(2)).unwrap();
    let p = bfs(&mut eng, 0, &ScheduleProgram::default(), &AlgoOptions::default()).unwrap();
    assert_eq!(p, vec![0, 0, 1, 2]);
    assert_eq!(eng.stats().rounds, 4);
    assert_eq!(eng.stats().dispatch_count, 4);
    let p = bfs(&mut eng, 3, &ScheduleProgram::default(), &AlgoOptions::default()).unwrap();
    assert_eq!(p, vec![-1, -1, -1, 3]);
    assert!(bfs(&mut eng, 4, &ScheduleProgram::default(), &AlgoOptions::default()).is_err());
}

#[test]
fn bfs_fusion() {
    let g = directed_path(4);
    let mut eng = Engine::new(&g, exec(2)).unwrap();
    let plain = bfs(&mut eng, 0, &ScheduleProgram::default(), &AlgoOptions::default()).unwrap();
    let p = bfs(&mut eng, 0, &fused(), &AlgoOptions::default()).unwrap();
    assert_eq!(p, plain);
    assert_eq!(eng.stats().dispatch_count, 1);
    assert_eq!(eng.stats().rounds, 4);
    let no_reuse = AlgoOptions {
        reuse_frontier: false,
        ..Default::default()
    };
    assert!(matches!(bfs(&mut eng, 0, &fused(), &no_reuse), Err(Error::FusionRequiresReuse)));
}

#[test]
fn loop_label_rejects_hybrid() {
    let g = directed_path(4);
    let mut eng = Engine::new(&g, exec(1)).unwrap();
    let h = HybridSchedule {
        criteria: HybridCriteria::InputVertexsetSize,
        threshold: Threshold::Fraction(0.1),
        s1: Schedule::default(),
        s2: Schedule::default(),
    };
    let program = ScheduleProgram::single("s0", Binding::Hybrid(h));
    assert!(matches!(
        bfs(&mut eng, 0, &program, &AlgoOptions::default()),
        Err(Error::LoopLabelNeedsSimple(_))
    ));
    let program = ScheduleProgram::single("s2", Binding::default());
    assert!(matches!(
        run(&mut eng, Algorithm::Bfs, &program, &AlgoOptions::default()),
        Err(Error::UnknownLabel { .. })
    ));
}

#[test]
fn hybrid_bfs_switches_on_power_law_graph() {
    let g = graph::preferential_attachment(2000, 4, 9);
    let mut eng = Engine::new(&g, exec(4)).unwrap();
    let h = HybridSchedule {
        criteria: HybridCriteria::InputVertexsetSize,
        threshold: Threshold::Fraction(0.05),
        s1: Schedule::default(),
        s2: Schedule {
            direction: Direction::Pull,
            ..Default::default()
        },
    };
    let program = simple(Schedule::default());
    let push = bfs(&mut eng, 0, &program, &AlgoOptions::default()).unwrap();
    let hybrid = ScheduleProgram::single("s0:s1", Binding::Hybrid(h.clone()));
    let p = bfs(&mut eng, 0, &hybrid, &AlgoOptions::default()).unwrap();
    let log = &eng.stats().direction_log;
    let switched = log.windows(2).any(|w| w == [Direction::Push, Direction::Pull]);
    let back = log.windows(2).any(|w| w == [Direction::Pull, Direction::Push]);
    assert!(switched && back, "{log:?}");
    assert_eq!(levels_from_parents(&p), levels_from_parents(&push));

    let path = graph::path(200);
    let mut eng = Engine::new(&path, exec(4)).unwrap();
    bfs(&mut eng, 0, &hybrid, &AlgoOptions::default()).unwrap();
    assert!(eng.stats().direction_log.iter().all(|&d| d == Direction::Push));
}

#[test]
fn pagerank_examples() {
    let g = Graph::from_edges(2, vec![(0, 1), (1, 0)], None).unwrap();
    let mut eng = Engine::new(&g, exec(2)).unwrap();
    let r = pagerank(&mut eng, &ScheduleProgram::default(), 100, 1e-12).unwrap();
    assert!((r[0] - 0.5).abs() < 1e-12 && (r[1] - 0.5).abs() < 1e-12);

    let g = graph::random_edges(300, 2000, 21);
    let mut eng = Engine::new(&g, exec(3)).unwrap();
    for iters in 1..6 {
        let r = pagerank(&mut eng, &ScheduleProgram::default(), iters, 0.0).unwrap();
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pagerank_blocked_matches_unblocked() {
    let g = graph::random_edges(2000, 20000, 5);
    let exec = ExecConfig {
        deterministic: true,
        ..ExecConfig::with_workers(4)
    };
    let mut eng = Engine::new(&g, exec).unwrap();
    let base = Schedule {
        load_balance: LoadBalance::EdgeOnly,
        ..Default::default()
    };
    let plain = pagerank(&mut eng, &simple(base.clone()), 20, 0.0).unwrap();
    let blocked = Schedule {
        blocking: true,
        blocking_size: Some(256),
        ..base
    };
    let b = pagerank(&mut eng, &simple(blocked), 20, 0.0).unwrap();
    let worst = plain.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst}");
    let want = oracle::pagerank_dense_oracle(&g, 20, 0.0).unwrap();
    let err = want.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn sssp_examples() {
    let g = Graph::from_edges(3, vec![(0, 1), (0, 2), (1, 2)], Some(vec![2, 10, 3])).unwrap();
    let mut eng = Engine::new(&g, exec(2)).unwrap();
    let d = sssp_delta(&mut eng, 0, &ScheduleProgram::default(), None).unwrap();
    assert_eq!(d, vec![0, 2, 5]);
    let d = sssp_delta(&mut eng, 2, &ScheduleProgram::default(), None).unwrap();
    assert_eq!(d, vec![INF, INF, 0]);
    let unweighted = directed_path(3);
    let mut eng = Engine::new(&unweighted, exec(1)).unwrap();
    assert!(matches!(
        sssp_delta(&mut eng, 0, &ScheduleProgram::default(), None),
        Err(Error::UnweightedGraph)
    ));
}

#[test]
fn sssp_matches_dijkstra_for_any_delta() {
    for seed in 0..5 {
        let g = graph::with_random_weights(&graph::random_edges(200, 1500, seed), 1, 100, seed + 50);
        let want = oracle::dijkstra_oracle(&g, 0).unwrap();
        let mut eng = Engine::new(&g, exec(4)).unwrap();
        for delta in [1, 16, 1 << 40] {
            let d = sssp_delta(&mut eng, 0, &ScheduleProgram::default(), Some(delta)).unwrap();
            assert_eq!(d, want, "seed {seed} delta {delta}");
            let log = &eng.stats().bucket_log;
            assert!(log.windows(2).all(|w| w[0] < w[1]), "{log:?}");
        }
    }
}

#[test]
fn unit_delta_settles_in_distance_order() {
    let g = graph::with_random_weights(&graph::random_edges(300, 2400, 8), 1, 1, 0);
    let mut eng = Engine::new(&g, exec(4)).unwrap();
    let (d, trace) = sssp_delta_traced(&mut eng, 0, &ScheduleProgram::default(), Some(1)).unwrap();
    let mut last = 0;
    for (bucket, members) in &trace {
        for &v in members {
            assert_eq!(d[v as usize], *bucket);
        }
        assert!(*bucket >= last);
        last = *bucket;
    }
}

#[test]
fn cc_examples() {
    let tri = Graph::from_edges(
        6,
        vec![(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2), (3, 4), (4, 3), (4, 5), (5, 4), (5, 3), (3, 5)],
        None,
    )
    .unwrap();
    let mut eng = Engine::new(&tri, exec(2)).unwrap();
    assert_eq!(cc_soman(&mut eng, &ScheduleProgram::default()).unwrap(), vec![0, 0, 0, 3, 3, 3]);

    let edgeless = Graph::from_edges(4, vec![], None).unwrap();
    let mut eng = Engine::new(&edgeless, exec(2)).unwrap();
    assert_eq!(cc_soman(&mut eng, &ScheduleProgram::default()).unwrap(), vec![0, 1, 2, 3]);

    let directed = Graph::from_edges(4, vec![(3, 2), (1, 0)], None).unwrap();
    let mut eng = Engine::new(&directed, exec(2)).unwrap();
    assert_eq!(cc_soman(&mut eng, &ScheduleProgram::default()).unwrap(), vec![0, 0, 2, 2]);
}

#[test]
fn bc_examples() {
    let path = graph::path(3);
    let mut eng = Engine::new(&path, exec(2)).unwrap();
    assert_eq!(bc(&mut eng, &[0, 1, 2], &ScheduleProgram::default()).unwrap(), vec![0.0, 1.0, 0.0]);

    let star = graph::star(3);
    let mut eng = Engine::new(&star, exec(2)).unwrap();
    assert_eq!(bc(&mut eng, &[0, 1, 2, 3], &ScheduleProgram::default()).unwrap()[0], 3.0);

    let single = Graph::from_edges(1, vec![], None).unwrap();
    let mut eng = Engine::new(&single, exec(2)).unwrap();
    assert_eq!(bc(&mut eng, &[0], &ScheduleProgram::default()).unwrap(), vec![0.0]);
    assert!(matches!(bc(&mut eng, &[], &ScheduleProgram::default()), Err(Error::NoSources)));
}

#[test]
fn bc_forward_cannot_fuse() {
    let g = graph::path(5);
    let mut eng = Engine::new(&g, exec(2)).unwrap();
    assert!(matches!(bc(&mut eng, &[0], &fused()), Err(Error::FusionRequiresReuse)));
    let back_fused = ScheduleProgram::single(
        "s1",
        Binding::Simple(Schedule {
            kernel_fusion: true,
            ..Default::default()
        }),
    );
    let r = bc(&mut eng, &[0], &back_fused).unwrap();
    assert_eq!(r, oracle::brandes_oracle(&g, &[0]).unwrap());
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let g = graph::with_random_weights(&graph::erdos_renyi(300, 0.03, 17), 1, 50, 2);
    let max = std::thread::available_parallelism().map_or(4, |n| n.get());
    let opts = AlgoOptions {
        sources: Some(vec![0, 5, 9]),
        ..Default::default()
    };
    let program = ScheduleProgram::default();
    let mut reference: Option<Vec<Values>> = None;
    for workers in [1, 4, max] {
        let exec = ExecConfig {
            deterministic: false,
            ..ExecConfig::with_workers(workers)
        };
        let mut eng = Engine::new(&g, exec).unwrap();
        let mut outs = Vec::new();
        for alg in Algorithm::ALL {
            let mut v = run(&mut eng, alg, &program, &opts).unwrap().values;
            match &mut v {
                Values::Parents(p) => *p = levels_from_parents(p).unwrap(),
                Values::Ranks(r) | Values::Centrality(r) => r.iter_mut().for_each(|x| *x = (*x * 1e6).round()),
                _ => {}
            }
            outs.push(v);
        }
        match &reference {
            None => reference = Some(outs),
            Some(r) => assert_eq!(r, &outs, "{workers} workers"),
        }
    }
}

#[test]
fn every_algorithm_passes_verification_under_sampled_schedules() {
    use crate::sched::{enumerate_space, SpaceSelector};
    let g = graph::with_random_weights(&graph::erdos_renyi(120, 0.05, 31), 1, 30, 7);
    let space = enumerate_space(&SpaceSelector::full(), &Schedule::default()).schedules;
    let opts = AlgoOptions {
        sources: Some(vec![0, 1, 2]),
        ..Default::default()
    };
    let mut eng = Engine::new(&g, exec(3)).unwrap();
    for s in space.iter().step_by(17) {
        for alg in Algorithm::ALL {
            let program = simple(s.clone());
            let r = verify::verify(&mut eng, alg, &program, &opts).unwrap();
            assert!(r.pass, "{alg} under {s}: {}", r.detail);
        }
    }
}
