use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relprop::io;
use tempfile::TempDir;

fn relprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relprop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = relprop(args);
    assert!(
        out.status.success(),
        "relprop {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

struct Corpus {
    _dir: TempDir,
    root: PathBuf,
}

impl Corpus {
    fn synth(extra: &[&str]) -> Self {
        let dir = TempDir::new().unwrap();
        let root = dir.path().to_path_buf();
        let mut args = vec!["--quiet", "synth", "--seed", "7", "--out", p(&root)];
        args.extend_from_slice(extra);
        ok(&args);
        let graph = root.join("graph.bin");
        ok(&[
            "--quiet",
            "build-graph",
            "--matches",
            p(&root.join("matches.tsv")),
            "--out",
            p(&graph),
        ]);
        Corpus { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn rank(&self, query: &str, out: &str, extra: &[&str]) -> Vec<(String, f64)> {
        let out = self.path(out);
        let query = self.path(&format!("queries/{query}.tsv"));
        let graph = self.path("graph.bin");
        let mut args = vec![
            "--quiet",
            "rank",
            "--graph",
            p(&graph),
            "--query",
            p(&query),
            "--out",
            p(&out),
        ];
        args.extend_from_slice(extra);
        ok(&args);
        io::parse_ranking(&fs::read_to_string(out).unwrap()).unwrap()
    }
}

#[test]
fn build_graph_reports_counts_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let matches = dir.path().join("m.tsv");
    fs::write(&matches, "a\tb\t30\nb\tc\t12\nc\td\t4\n").unwrap();
    let graph = dir.path().join("g.bin");
    let out = ok(&["build-graph", "--matches", p(&matches), "--out", p(&graph)]);
    assert_eq!(stdout(&out), "vertices\t4\nedges\t2\n");

    let loaded = io::decode_graph(&fs::read(&graph).unwrap()).unwrap();
    let records = io::parse_matches(&fs::read_to_string(&matches).unwrap()).unwrap();
    let built = relprop::build_graph(&records, &relprop::KernelParams::default()).unwrap();
    assert_eq!(loaded, built);
}

#[test]
fn build_graph_errors() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.bin");

    let matches = dir.path().join("self.tsv");
    fs::write(&matches, "a\ta\t5\n").unwrap();
    let out = relprop(&["build-graph", "--matches", p(&matches), "--out", p(&graph)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: SelfMatch:"));
    assert!(stderr(&out).contains("line 1"));

    fs::write(&matches, "a\tb\t5\nb\tc\tmany\n").unwrap();
    let out = relprop(&["build-graph", "--matches", p(&matches), "--out", p(&graph)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: ParseError: parse error at line 2"));

    fs::write(&matches, "a\tb\t5\nb\ta\t5\n").unwrap();
    let out = relprop(&["build-graph", "--matches", p(&matches), "--out", p(&graph)]);
    assert!(stderr(&out).starts_with("error: DuplicatePair:"));

    let out = relprop(&[
        "build-graph",
        "--matches",
        p(&dir.path().join("absent.tsv")),
        "--out",
        p(&graph),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).starts_with("error: IoError:"));
    assert!(!graph.exists());
}

#[test]
fn kernel_flags_and_config_precedence() {
    let dir = TempDir::new().unwrap();
    let matches = dir.path().join("m.tsv");
    fs::write(&matches, "a\tb\t30\nb\tc\t12\n").unwrap();
    let graph = dir.path().join("g.bin");
    let config = dir.path().join("c.toml");

    fs::write(&config, "[kernel]\ntheta = 20\n").unwrap();
    let out = ok(&[
        "build-graph",
        "--matches",
        p(&matches),
        "--config",
        p(&config),
        "--out",
        p(&graph),
    ]);
    assert_eq!(stdout(&out), "vertices\t3\nedges\t1\n");

    let out = ok(&[
        "build-graph",
        "--matches",
        p(&matches),
        "--config",
        p(&config),
        "--theta",
        "5",
        "--out",
        p(&graph),
    ]);
    assert_eq!(stdout(&out), "vertices\t3\nedges\t2\n");

    fs::write(&config, "[kernel]\ntheta = \"x\"\n").unwrap();
    let out = relprop(&[
        "build-graph",
        "--matches",
        p(&matches),
        "--config",
        p(&config),
        "--out",
        p(&graph),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: ConfigError:"));
}

#[test]
fn chain_rank_puts_relevant_on_top() {
    let corpus = Corpus::synth(&["--model", "chain"]);
    let ranking = corpus.rank("q", "q.rank", &[]);
    let top: Vec<&str> = ranking.iter().take(4).map(|(id, _)| id.as_str()).collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(sorted, ["obj-01", "obj-02", "obj-03", "obj-04"]);
    assert!(ranking.iter().all(|(id, _)| id.starts_with("obj")));
}

#[test]
fn gamma_one_reproduces_direct_order() {
    let corpus = Corpus::synth(&["--model", "clusters"]);
    let graph = io::decode_graph(&fs::read(corpus.path("graph.bin")).unwrap()).unwrap();
    for q in ["q-01", "q-02", "q-03"] {
        let ranking = corpus.rank(q, "out.rank", &["--gamma", "1.0"]);
        let counts = io::parse_query(&fs::read_to_string(corpus.path(&format!("queries/{q}.tsv"))).unwrap()).unwrap();
        let ctx = relprop::direct_relevance(q, &counts, graph.vertices(), graph.kernel()).unwrap();
        let direct = relprop::rank(&ctx.d, graph.vertices()).unwrap();
        let a: Vec<&str> = ranking.iter().map(|(id, _)| id.as_str()).collect();
        let b: Vec<&str> = direct.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(a, b);
    }
}

#[test]
fn sub_threshold_query_fails_without_output() {
    let corpus = Corpus::synth(&["--model", "chain"]);
    let query = corpus.path("weak.tsv");
    fs::write(&query, "obj-01\t3\nnoise-01\t9\n").unwrap();
    let out_path = corpus.path("weak.rank");
    let out = relprop(&[
        "rank",
        "--graph",
        p(&corpus.path("graph.bin")),
        "--query",
        p(&query),
        "--out",
        p(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).starts_with("error: NoDirectMatches:"));
    assert!(!out_path.exists());
}

#[test]
fn member_query_and_unknown_id() {
    let corpus = Corpus::synth(&["--model", "chain"]);
    let graph = corpus.path("graph.bin");
    let out_path = corpus.path("m.rank");
    ok(&[
        "--quiet",
        "rank",
        "--graph",
        p(&graph),
        "--query-id",
        "obj-02",
        "--out",
        p(&out_path),
    ]);
    let ranking = io::parse_ranking(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let ids: Vec<&str> = ranking.iter().map(|(id, _)| id.as_str()).collect();
    assert!(!ids.contains(&"obj-02"));
    assert_eq!(ids.len(), 3);

    let out = relprop(&[
        "rank",
        "--graph",
        p(&graph),
        "--query-id",
        "nope",
        "--out",
        p(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: UnknownQueryId:"));
}

#[test]
fn full_graph_mode_agrees_with_wide_subgraph() {
    let corpus = Corpus::synth(&["--model", "clusters"]);
    for q in ["q-01", "q-05"] {
        let full = corpus.rank(q, "full.rank", &["--no-subgraph"]);
        let wide = corpus.rank(q, "wide.rank", &["--roots", "1000", "--depth", "1000"]);
        assert_eq!(full, wide);
    }
}

#[test]
fn eval_outputs() {
    let dir = TempDir::new().unwrap();
    let truth = dir.path().join("truth.json");
    fs::write(
        &truth,
        r#"{"perfect": {"relevant": ["a", "b"]}, "trap": {"relevant": ["r1", "r2"]}, "half": {"relevant": ["x", "y"]}}"#,
    )
    .unwrap();
    let perfect = dir.path().join("perfect.rank");
    fs::write(
        &perfect,
        io::write_ranking(&[("a".into(), 0.9), ("b".into(), 0.5), ("z".into(), 0.1)]),
    )
    .unwrap();
    let trap = dir.path().join("trap.rank");
    fs::write(
        &trap,
        io::write_ranking(&[("r1".into(), 0.9), ("n".into(), 0.5), ("r2".into(), 0.1)]),
    )
    .unwrap();

    let out = ok(&["eval", "--truth", p(&truth), p(&perfect)]);
    assert_eq!(stdout(&out), "perfect\t1.000000\nmAP\t1.000000\n");

    let out = ok(&["eval", "--truth", p(&truth), p(&trap)]);
    assert_eq!(stdout(&out), "trap\t0.791667\nmAP\t0.791667\n");

    // AP 0.5: one relevant hit first, the other missing from the ranking
    let half = dir.path().join("half.rank");
    fs::write(&half, io::write_ranking(&[("x".into(), 0.9)])).unwrap();
    let csv = dir.path().join("ap.csv");
    let out = ok(&["eval", "--truth", p(&truth), "--csv", p(&csv), p(&perfect), p(&half)]);
    assert_eq!(stdout(&out), "half\t0.500000\nperfect\t1.000000\nmAP\t0.750000\n");
    assert_eq!(
        fs::read_to_string(&csv).unwrap(),
        "query,ap\nhalf,0.500000\nperfect,1.000000\nmAP,0.750000\n"
    );

    let stray = dir.path().join("stray.rank");
    fs::write(&stray, "1\ta\t0.5\n").unwrap();
    let out = relprop(&["eval", "--truth", p(&truth), p(&stray)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: MissingTruth:"));

    fs::write(&stray, "1\ta\tnot-a-number\n").unwrap();
    fs::write(&truth, r#"{"stray": {"relevant": ["a"]}}"#).unwrap();
    let out = relprop(&["eval", "--truth", p(&truth), p(&stray)]);
    assert!(stderr(&out).starts_with("error: ParseError:"));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(io::SWEEP_HEADER));
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn sweep(corpus: &Corpus, out: &str, grid: &[&str]) -> Vec<Vec<String>> {
    let out = corpus.path(out);
    let (graph, queries, truth) = (
        corpus.path("graph.bin"),
        corpus.path("queries"),
        corpus.path("truth.json"),
    );
    let mut args = vec![
        "--quiet",
        "sweep",
        "--graph",
        p(&graph),
        "--queries",
        p(&queries),
        "--truth",
        p(&truth),
        "--out",
        p(&out),
    ];
    args.extend_from_slice(grid);
    ok(&args);
    read_csv(&out)
}

#[test]
fn sweep_alpha_on_chain() {
    let corpus = Corpus::synth(&["--model", "chain"]);
    let rows = sweep(&corpus, "s.csv", &["--alpha", "0.0,0.6", "--iters", "10"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2], "0.000000");
    assert_eq!(rows[1][2], "0.600000");
    let map0: f64 = rows[0][5].parse().unwrap();
    let map6: f64 = rows[1][5].parse().unwrap();
    assert!(map6 > map0);
}

#[test]
fn sweep_depth_grows_subgraph() {
    let corpus = Corpus::synth(&["--model", "clusters"]);
    let rows = sweep(&corpus, "s.csv", &["--depth", "0,1,2,3"]);
    assert_eq!(rows.len(), 4);
    let orders: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    let recalls: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(orders.windows(2).all(|w| w[0] <= w[1]), "{orders:?}");
    assert!(recalls.windows(2).all(|w| w[0] <= w[1]), "{recalls:?}");
}

#[test]
fn singleton_sweep_matches_rank_then_eval() {
    let corpus = Corpus::synth(&["--model", "clusters"]);
    let rows = sweep(&corpus, "s.csv", &[]);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..5], ["30", "3", "0.600000", "0.500000", "10"]);

    let mut rankings = Vec::new();
    for entry in fs::read_dir(corpus.path("queries")).unwrap() {
        let path = entry.unwrap().path();
        let qid = path.file_stem().unwrap().to_str().unwrap().to_owned();
        let name = format!("{qid}.rank");
        corpus.rank(&qid, &name, &[]);
        rankings.push(corpus.path(&name));
    }
    let truth = corpus.path("truth.json");
    let mut args = vec!["eval", "--truth", p(&truth)];
    args.extend(rankings.iter().map(|r| p(r)));
    let out = ok(&args);
    let last = stdout(&out).lines().last().unwrap().to_owned();
    assert_eq!(last, format!("mAP\t{}", rows[0][5]));
}

#[test]
fn sweep_workers_do_not_change_output() {
    let corpus = Corpus::synth(&["--model", "clusters"]);
    let grid = ["--alpha", "0.2,0.6,1.0", "--depth", "1,3"];
    let one = sweep(&corpus, "one.csv", &grid);
    let mut with_workers = grid.to_vec();
    with_workers.extend(["--workers", "3"]);
    let three = sweep(&corpus, "three.csv", &with_workers);
    assert_eq!(one, three);
}

#[test]
fn synth_outputs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        ok(&[
            "--quiet",
            "synth",
            "--model",
            "chain",
            "--relevant",
            "4",
            "--noise",
            "10",
            "--seed",
            "7",
            "--out",
            p(dir.path()),
        ]);
    }
    for name in ["matches.tsv", "truth.json", "queries/q.tsv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }

    let single = TempDir::new().unwrap();
    ok(&[
        "--quiet",
        "synth",
        "--model",
        "chain",
        "--relevant",
        "1",
        "--seed",
        "1",
        "--out",
        p(single.path()),
    ]);
    let truth = io::parse_truth(&fs::read_to_string(single.path().join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["q"].relevant.len(), 1);

    let out = relprop(&[
        "synth",
        "--model",
        "chain",
        "--relevant",
        "1",
        "--noise",
        "0",
        "--seed",
        "1",
        "--out",
        p(single.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: BadParams:"));
}

#[test]
fn quiet_keeps_stderr_empty() {
    let dir = TempDir::new().unwrap();
    let out = ok(&[
        "--quiet",
        "synth",
        "--model",
        "clusters",
        "--seed",
        "3",
        "--out",
        p(dir.path()),
    ]);
    assert!(out.stderr.is_empty());
    let out = ok(&["synth", "--model", "clusters", "--seed", "3", "--out", p(dir.path())]);
    assert!(!out.stderr.is_empty());
}
