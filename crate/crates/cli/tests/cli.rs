use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graphsched::graph::{self, Graph};
use graphsched::sched::{enumerate_space, Schedule, SpaceSelector};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphsched"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn graphsched");
    if !out.status.success() {
        eprintln!("stdout: {}", String::from_utf8_lossy(&out.stdout));
        eprintln!("stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn write_graph(dir: &Path, name: &str, g: &Graph) -> PathBuf {
    let mut s = String::new();
    let w = g.coo_weights();
    for (e, (u, v)) in g.edges().enumerate() {
        match w {
            Some(w) => s.push_str(&format!("{u} {v} {}\n", w[e])),
            None => s.push_str(&format!("{u} {v}\n")),
        }
    }
    let p = dir.join(name);
    std::fs::write(&p, s).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stats(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn run_bfs_writes_parents_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path.el");
    std::fs::write(&g, "# path\n0 1\n1 2\n2 3\n").unwrap();
    let out = dir.path().join("bfs.out");
    let st = dir.path().join("bfs.json");
    let r = run(&["run", "bfs", s(&g), "--source", "0", "--out", s(&out), "--stats", s(&st), "--workers", "2"]);
    assert!(r.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "0\n0\n1\n2\n");
    let j = stats(&st);
    assert_eq!(j["stats"]["dispatch_count"], j["stats"]["rounds"]);
    assert_eq!(j["stats"]["rounds"], 4);
    assert!(String::from_utf8_lossy(&r.stdout).contains("ms"));

    let sched = dir.path().join("fused.sched");
    std::fs::write(
        &sched,
        "SimpleGPUSchedule s;\ns.configKernelFusion(ENABLED);\nprogram->applyGPUSchedule(\"s0\", s);\n",
    )
    .unwrap();
    let r = run(&["run", "bfs", s(&g), "--schedule", s(&sched), "--out", s(&out), "--stats", s(&st)]);
    assert!(r.status.success());
    let j = stats(&st);
    assert_eq!(j["stats"]["dispatch_count"], 1);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "0\n0\n1\n2\n");
}

#[test]
fn sssp_resolves_argv_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph::with_random_weights(&graph::erdos_renyi(200, 0.03, 4), 1, 50, 5);
    let gp = write_graph(dir.path(), "g.wel", &g);
    let sched = dir.path().join("hybrid.sched");
    std::fs::write(
        &sched,
        "SimpleGPUSchedule s1;\ns1.configDirection(PUSH);\ns1.configDelta(8);\n\
         SimpleGPUSchedule s2 = s1;\ns2.configDirection(PULL, BITMAP);\n\
         HybridGPUSchedule h1(INPUT_VERTEXSET_SIZE, \"argv[3]\", s1, s2);\n\
         program->applyGPUSchedule(\"s0:s1\", h1);\n",
    )
    .unwrap();
    let out = dir.path().join("d.out");
    let st = dir.path().join("d.json");
    let base = ["run", "sssp", s(&gp), "--source", "0", "--schedule", s(&sched), "--out", s(&out), "--stats", s(&st)];
    let r = run(&[&base[..], &["--sched-arg", "3=0.15"]].concat());
    assert!(r.status.success());
    let want = graphsched::oracle::dijkstra_oracle(&g, 0).unwrap();
    let got: Vec<String> = std::fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
    let want: Vec<String> = want
        .iter()
        .map(|&d| if d == u64::MAX { "inf".to_string() } else { d.to_string() })
        .collect();
    assert_eq!(got, want);

    let r = bin().args(base).output().unwrap();
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("argv[3]"));
}

#[test]
fn verify_sampled_bfs_and_blocked_pr() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph::erdos_renyi(100, 0.05, 12);
    let gp = write_graph(dir.path(), "g.el", &g);
    let r = run(&["verify", "bfs", s(&gp), "--samples", "20", "--seed", "3"]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("21 of 21 schedules passed"), "{text}");

    let sched = dir.path().join("pr.sched");
    std::fs::write(
        &sched,
        "SimpleGPUSchedule s;\ns.configLoadBalance(EDGE_ONLY, BLOCKED, 16);\napply(\"s0:s1\", s);\n",
    )
    .unwrap();
    let r = run(&["verify", "pr", s(&gp), "--schedule", s(&sched), "--deterministic"]);
    assert!(r.status.success());
}

#[test]
fn tune_csv_covers_single_direction_space() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph::erdos_renyi(30, 0.1, 2);
    let gp = write_graph(dir.path(), "g.el", &g);
    let csv_path = dir.path().join("trials.csv");
    let best = dir.path().join("best.sched");
    let r = run(&[
        "tune", "bfs", s(&gp), "--budget", "600", "--single-direction", "--csv", s(&csv_path), "--out", s(&best),
        "--workers", "2",
    ]);
    assert!(r.status.success());
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        vec!["schedule_id", "schedule", "median_ms", "pass"]
    );
    let rows = rd.records().count();
    let valid = enumerate_space(&SpaceSelector::single_direction(), &Schedule::default()).valid();
    assert_eq!(rows, valid);
    let program = graphsched::sched::ScheduleProgram::parse(&std::fs::read_to_string(&best).unwrap()).unwrap();
    assert!(program.get("s0:s1").is_some());
}

#[test]
fn random_tune_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph::erdos_renyi(30, 0.1, 2);
    let gp = write_graph(dir.path(), "g.el", &g);
    let mut seqs = Vec::new();
    for i in 0..2 {
        let csv_path = dir.path().join(format!("t{i}.csv"));
        let best = dir.path().join(format!("b{i}.sched"));
        let r = run(&[
            "tune", "cc", s(&gp), "--strategy", "random", "--seed", "9", "--max-trials", "12", "--csv",
            s(&csv_path), "--out", s(&best),
        ]);
        assert!(r.status.success());
        let mut rd = csv::Reader::from_path(&csv_path).unwrap();
        seqs.push(rd.records().map(|r| r.unwrap()[0].to_string()).collect::<Vec<_>>());
    }
    assert_eq!(seqs[0].len(), 12);
    assert_eq!(seqs[0], seqs[1]);
}

#[test]
fn convert_sidecar_and_run_blocked() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph::random_edges(500, 4000, 1);
    let gp = write_graph(dir.path(), "g.el", &g);
    let side = dir.path().join("g.blk");
    let r = run(&["convert", s(&gp), s(&side), "--block", "64"]);
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("8 segments"));
    let sched = dir.path().join("b.sched");
    std::fs::write(
        &sched,
        "SimpleGPUSchedule s;\ns.configLoadBalance(EDGE_ONLY, BLOCKED, 64);\napply(\"s0:s1\", s);\n",
    )
    .unwrap();
    let st = dir.path().join("pr.json");
    let out = dir.path().join("pr.out");
    let r = run(&[
        "run", "pr", s(&gp), "--schedule", s(&sched), "--blocked", s(&side), "--stats", s(&st), "--out", s(&out),
    ]);
    assert!(r.status.success());
    let j = stats(&st);
    assert!(j["preprocess_ms"].as_f64().unwrap() >= 0.0);

    let el = dir.path().join("copy.el");
    assert!(run(&["convert", s(&gp), s(&el)]).status.success());
    assert_eq!(std::fs::read_to_string(&el).unwrap(), std::fs::read_to_string(&gp).unwrap());
}

#[test]
fn list_labels_and_space() {
    let r = run(&["list-labels", "--space"]);
    assert!(r.status.success());
    let text = String::from_utf8_lossy(&r.stdout);
    assert!(text.contains("s1:s1"));
    assert!(text.contains("total: 528"));
    assert!(text.contains("enumerated valid schedules: 528"));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.el");
    let r = bin().args(["run", "bfs", s(&missing)]).output().unwrap();
    assert!(!r.status.success());
    let r = bin().args(["run", "dfs", "x"]).output().unwrap();
    assert!(!r.status.success());
    let g = dir.path().join("g.el");
    std::fs::write(&g, "0 1\n").unwrap();
    let r = bin().args(["run", "bfs", s(&g), "--source", "9"]).current_dir(dir.path()).output().unwrap();
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("out of range"));
}
