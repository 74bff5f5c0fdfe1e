use std::collections::BTreeMap;
use std::fs;

use pathfreq_core::error::Error;
use pathfreq_core::fpgrowth::parse_patterns_csv;
use pathfreq_core::pipeline::{build_report, MinSupport, Mode, RunConfig};
use pathfreq_core::report::{parse_degree_hist_csv, parse_vertex_freq_csv, top_degree_share, write_report};
use pathfreq_core::transactions::{parse_ngram_csv, vertex_frequency};
use pathfreq_core::traversal::run_traversals;
use pathfreq_core::{Graph, VertexId};

/// Smallest (by length, then lexicographically) simple path between every
/// ordered pair of an unweighted graph, by exhaustive DFS.
fn oracle_paths(g: &Graph) -> Vec<Vec<VertexId>> {
    fn dfs(g: &Graph, path: &mut Vec<VertexId>, target: VertexId, best: &mut Option<Vec<VertexId>>) {
        let u = *path.last().unwrap();
        if u == target {
            let better = match best {
                None => true,
                Some(b) => (path.len(), &path[..]) < (b.len(), &b[..]),
            };
            if better {
                *best = Some(path.clone());
            }
            return;
        }
        for &v in g.neighbors(u) {
            if !path.contains(&v) {
                path.push(v);
                dfs(g, path, target, best);
                path.pop();
            }
        }
    }
    let n = g.vertex_count() as VertexId;
    let mut out = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let mut best = None;
            dfs(g, &mut vec![s], t, &mut best);
            out.extend(best);
        }
    }
    out
}

fn occurrences(paths: &[Vec<VertexId>]) -> BTreeMap<VertexId, u64> {
    let mut m = BTreeMap::new();
    for p in paths {
        for &v in p {
            *m.entry(v).or_insert(0) += 1;
        }
    }
    m
}

fn exhaustive(g: &Graph) -> pathfreq_core::transactions::TransactionDb {
    run_traversals(g, &(0..g.vertex_count() as VertexId).collect::<Vec<_>>()).unwrap()
}

#[test]
fn star_center_share() {
    let star = Graph::from_pairs(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], false).unwrap();
    let oracle = occurrences(&oracle_paths(&star));
    let total: u64 = oracle.values().sum();
    let expected = oracle[&0] as f64 / total as f64;
    assert_eq!(expected, 30.0 / 80.0);

    let db = exhaustive(&star);
    let freq = vertex_frequency(&db);
    assert_eq!(freq, oracle);
    // ⌈10% · 6⌉ = 1 vertex: the center
    assert_eq!(top_degree_share(&star, &freq, 10.0).unwrap(), expected);
}

#[test]
fn cycle_half_share() {
    let c6 = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], false).unwrap();
    let paths = oracle_paths(&c6);
    let oracle = occurrences(&paths);
    // all degrees tie, so the top half is the three highest counts
    let mut counts: Vec<u64> = oracle.values().copied().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = counts.iter().sum();
    let expected = counts[..3].iter().sum::<u64>() as f64 / total as f64;

    let db = exhaustive(&c6);
    let got: Vec<Vec<VertexId>> = db.iter().map(<[_]>::to_vec).collect();
    assert_eq!(got, paths);
    let share = top_degree_share(&c6, &vertex_frequency(&db), 50.0).unwrap();
    assert_eq!(share, expected);
    assert!((share - 0.5).abs() < 0.05, "share {share}");
}

fn config(out: &std::path::Path) -> RunConfig {
    RunConfig {
        mode: Mode::Exhaustive,
        min_support: MinSupport::Absolute(1),
        out: out.to_path_buf(),
        ..RunConfig::default()
    }
}

#[test]
fn p3_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = Graph::from_pairs(3, &[(0, 1), (1, 2)], false).unwrap();
    let db = exhaustive(&p3);
    let report = build_report(&p3, &db, &config(dir.path())).unwrap();
    write_report(&report, dir.path()).unwrap();

    let vf = fs::read_to_string(dir.path().join("vertex_freq.csv")).unwrap();
    assert_eq!(
        vf,
        "vertex,degree,path_count,path_fraction\n1,2,6,1.00000\n0,1,4,0.666667\n2,1,4,0.666667\n"
    );
    let records = parse_vertex_freq_csv(&vf).unwrap();
    assert_eq!(
        records.iter().map(|r| r.path_count).sum::<u64>(),
        db.total_items() as u64
    );

    let hist = fs::read_to_string(dir.path().join("degree_hist.csv")).unwrap();
    assert_eq!(parse_degree_hist_csv(&hist).unwrap(), report.degree_histogram);
    for counts in &report.ngrams {
        let text = fs::read_to_string(dir.path().join(format!("ngram_{}.csv", counts.n))).unwrap();
        assert_eq!(&parse_ngram_csv(&text, counts.n).unwrap(), counts);
    }
    let patterns = fs::read_to_string(dir.path().join("patterns.csv")).unwrap();
    assert_eq!(parse_patterns_csv(&patterns).unwrap(), report.patterns);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["transactions"], 6);
    assert_eq!(summary["spearman_rho"], 1.0);
    assert_eq!(summary["empty_run"], false);
    assert_eq!(summary["metadata"]["mode"], "exhaustive");
}

#[test]
fn empty_run_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let g = Graph::from_pairs(4, &[(2, 3)], false).unwrap();
    let db = run_traversals(&g, &[0]).unwrap();
    assert!(db.is_empty());
    assert_eq!(db.unreachable_pairs, 3);
    let report = build_report(&g, &db, &config(dir.path())).unwrap();
    write_report(&report, dir.path()).unwrap();
    for name in ["ngram_1.csv", "ngram_2.csv", "ngram_3.csv", "patterns.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count(), 1, "{name}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["empty_run"], true);
}

#[test]
fn failed_write_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = Graph::from_pairs(3, &[(0, 1), (1, 2)], false).unwrap();
    let db = exhaustive(&p3);
    let report = build_report(&p3, &db, &config(dir.path())).unwrap();
    // a directory where a file should go makes the write fail midway
    fs::create_dir(dir.path().join("patterns.csv")).unwrap();
    match write_report(&report, dir.path()) {
        Err(Error::Io { path, .. }) => assert!(path.ends_with("patterns.csv")),
        other => panic!("expected an I/O error, got {other:?}"),
    }
    assert!(!dir.path().join("degree_hist.csv").exists());
    assert!(!dir.path().join("vertex_freq.csv").exists());
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pairs: Vec<(u32, u32)> = (0..40u32).map(|i| (i, (i * 5 + 1) % 40)).collect();
    let g = Graph::from_pairs(40, &pairs, false).unwrap();
    for dir in [&a, &b] {
        let db = exhaustive(&g);
        let report = build_report(&g, &db, &config(dir.path())).unwrap();
        write_report(&report, dir.path()).unwrap();
    }
    for entry in fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?}"
        );
    }
}
