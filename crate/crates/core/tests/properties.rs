use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use proptest::prelude::*;

use pathfreq_core::fpgrowth::{brute_force_frequent, build_fptree, mine};
use pathfreq_core::graph::{
    clustering, degree_histogram, parse_edge_list_str, ClusteringStats, ParseOptions,
};
use pathfreq_core::report::{spearman, top_degree_share};
use pathfreq_core::transactions::{
    canonicalize, count_ngrams, parse_db, serialize_db, vertex_frequency, PathTransaction, TransactionDb,
};
use pathfreq_core::traversal::{reconstruct_path, run_traversals, sssp};
use pathfreq_core::{Graph, IntGraph, VertexId};

fn graph_strategy(max_n: u32, max_edges: usize) -> impl Strategy<Value = (u32, Vec<(u32, u32)>)> {
    (2..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..max_edges)))
}

fn weighted_strategy(max_n: u32, max_edges: usize) -> impl Strategy<Value = (u32, Vec<(u32, u32, u64)>)> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 1u64..=10), 0..max_edges),
        )
    })
}

fn bfs_levels(g: &Graph, s: VertexId) -> Vec<Option<u64>> {
    let mut level = vec![None; g.vertex_count()];
    level[s as usize] = Some(0);
    let mut frontier = vec![s];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for u in frontier {
            for &v in g.neighbors(u) {
                if level[v as usize].is_none() {
                    level[v as usize] = Some(d);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    level
}

fn floyd_warshall(n: usize, edges: &[(u32, u32, u64)]) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    // first weight wins for duplicate edges, as in the loader
    let mut seen = std::collections::HashSet::new();
    for &(u, v, w) in edges {
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        let (u, v) = (u as usize, v as usize);
        for (a, b) in [(u, v), (v, u)] {
            if d[a][b].is_none_or(|x| w < x) {
                d[a][b] = Some(w);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|x| a + b < x) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn db_from_sets(sets: &[Vec<VertexId>]) -> TransactionDb {
    // build through the text format so arbitrary item sets are accepted
    let mut text = String::from("%sources 0\n%unreachable 0\n%fp x\n");
    for s in sets {
        let line: Vec<String> = s.iter().map(u32::to_string).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    parse_db(text.as_bytes()).unwrap()
}

fn item_sets() -> impl Strategy<Value = Vec<Vec<VertexId>>> {
    prop::collection::vec(prop::collection::btree_set(0u32..12, 2..8), 0..40)
        .prop_map(|v| v.into_iter().map(|s| s.into_iter().collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csr_invariants((n, edges) in graph_strategy(40, 120)) {
        let g = Graph::from_pairs(n as usize, &edges, false).unwrap();
        let offsets = g.offsets();
        prop_assert!(offsets.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*offsets.last().unwrap(), g.adjacency().len());
        let degree_sum: usize = (0..n).map(|v| g.degree(v).unwrap()).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for v in 0..n {
            let nb = g.neighbors(v);
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!nb.contains(&v));
            for &u in nb {
                prop_assert!(g.has_edge(u, v));
            }
        }
        let h = degree_histogram(&g);
        prop_assert_eq!(h.vertex_total(), n as usize);
        prop_assert_eq!(h.degree_sum(), 2 * g.edge_count());
    }

    #[test]
    fn edge_list_round_trip((n, edges) in weighted_strategy(30, 80)) {
        let g = IntGraph::from_weighted(n as usize, &edges, false).unwrap();
        prop_assume!(g.edge_count() > 0 && g.degree(n - 1).unwrap() > 0);
        let opts = ParseOptions { directed: false, weighted: true };
        let back: IntGraph = parse_edge_list_str(&g.to_edge_list(), opts).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn clustering_matches_triangle_formula((n, edges) in graph_strategy(25, 90)) {
        let g = Graph::from_pairs(n as usize, &edges, false).unwrap();
        let exact: ClusteringStats<Ratio<i64>> = clustering(&g).unwrap();
        let approx: ClusteringStats<f64> = clustering(&g).unwrap();
        for v in 0..n {
            let d = g.degree(v).unwrap() as i64;
            let mut t = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if g.has_edge(v, a) && g.has_edge(v, b) && g.has_edge(a, b) {
                        t += 1;
                    }
                }
            }
            let expected = if d < 2 { Ratio::from_integer(0) } else { Ratio::new(2 * t, d * (d - 1)) };
            prop_assert_eq!(exact.local[v as usize], expected);
            let c = approx.local[v as usize];
            prop_assert!((0.0..=1.0).contains(&c));
        }
        let mean = exact.local.iter().sum::<Ratio<i64>>() / Ratio::from_integer(n as i64);
        prop_assert_eq!(exact.average, mean);
    }

    #[test]
    fn unit_weights_match_bfs((n, edges) in graph_strategy(60, 150)) {
        let g = Graph::from_pairs(n as usize, &edges, false).unwrap();
        let unit: Vec<(u32, u32, u64)> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        let weighted = IntGraph::from_weighted(n as usize, &unit, false).unwrap();
        for s in 0..n {
            let levels = bfs_levels(&g, s);
            let r = sssp(&weighted, s).unwrap();
            prop_assert_eq!(&r.dist, &levels);
            let r_unit = sssp(&g, s).unwrap();
            prop_assert_eq!(r_unit.parent, r.parent);
        }
    }

    #[test]
    fn dijkstra_matches_floyd_warshall((n, edges) in weighted_strategy(20, 60)) {
        let g = IntGraph::from_weighted(n as usize, &edges, false).unwrap();
        let oracle = floyd_warshall(n as usize, &edges);
        for s in 0..n {
            let r = sssp(&g, s).unwrap();
            prop_assert_eq!(&r.dist, &oracle[s as usize]);
            prop_assert_eq!(r.parent[s as usize], None);
            for t in 0..n {
                let Some(path) = reconstruct_path(&r, t).unwrap() else {
                    prop_assert!(r.dist[t as usize].is_none());
                    continue;
                };
                let mut cost = 0;
                for w in path.windows(2) {
                    cost += g.edge_weight(w[0], w[1]).expect("path follows edges");
                }
                prop_assert_eq!(Some(cost), r.dist[t as usize]);
                let mut sorted = path.clone();
                sorted.sort_unstable();
                sorted.dedup();
                prop_assert_eq!(sorted.len(), path.len());
            }
        }
    }

    #[test]
    fn ngram_windows_are_conserved((n, edges) in graph_strategy(30, 80), size in 1usize..5) {
        let g = Graph::from_pairs(n as usize, &edges, false).unwrap();
        let sources: Vec<VertexId> = (0..n).collect();
        let db = run_traversals(&g, &sources).unwrap();
        let expected: u64 = db.iter().map(|t| t.len().saturating_sub(size - 1) as u64).sum();
        for canonical in [true, false] {
            let c = count_ngrams(&db, size, canonical).unwrap();
            prop_assert_eq!(c.total(), expected);
            prop_assert!(c.entries.values().all(|&x| x >= 1));
        }
        let freq = vertex_frequency(&db);
        prop_assert_eq!(freq.values().sum::<u64>(), db.total_items() as u64);
        db.validate_against(&g).unwrap();
    }

    #[test]
    fn canonicalization_is_idempotent(mut tuple in prop::collection::vec(0u32..50, 1..6)) {
        canonicalize(&mut tuple);
        let once = tuple.clone();
        canonicalize(&mut tuple);
        prop_assert_eq!(tuple, once);
    }

    #[test]
    fn db_text_round_trip(paths in prop::collection::vec(prop::collection::btree_set(0u32..100, 2..10), 0..30),
                          sources in 0usize..50, unreachable in 0u64..1000) {
        let mut db = TransactionDb::new("cafe0123");
        db.source_count = sources;
        db.unreachable_pairs = unreachable;
        for p in paths {
            db.push(&PathTransaction::new(p.into_iter().collect()).unwrap());
        }
        prop_assert_eq!(parse_db(serialize_db(&db).as_bytes()).unwrap(), db);
    }

    #[test]
    fn fpgrowth_matches_brute_force(sets in item_sets(), min_support in 1u64..=5, max_size in 1usize..=4) {
        let db = db_from_sets(&sets);
        let tree = build_fptree(&db, min_support).unwrap();
        let fast = mine(&tree, min_support, Some(max_size)).unwrap();
        let slow = brute_force_frequent(&db, min_support, max_size).unwrap();
        prop_assert_eq!(&fast, &slow);

        let support: HashMap<&[VertexId], u64> = fast.iter().map(|p| (p.items.as_slice(), p.support)).collect();
        for p in &fast {
            prop_assert!(p.support >= min_support);
            for skip in 0..p.items.len() {
                let sub: Vec<VertexId> = p.items.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                if let Some(&s) = support.get(sub.as_slice()) {
                    prop_assert!(s >= p.support);
                }
            }
        }
    }

    #[test]
    fn spearman_self_and_reverse(x in prop::collection::vec(0u32..20, 2..30)) {
        let xs: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let rev: Vec<f64> = xs.iter().map(|v| -v).collect();
        let constant = xs.iter().all(|&v| v == xs[0]);
        if constant {
            prop_assert_eq!(spearman(&xs, &xs), 0.0);
        } else {
            prop_assert!((spearman(&xs, &xs) - 1.0).abs() < 1e-12);
            prop_assert!((spearman(&xs, &rev) + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn top_share_is_monotone((n, edges) in graph_strategy(40, 100)) {
        let g = Graph::from_pairs(n as usize, &edges, false).unwrap();
        let db = run_traversals(&g, &(0..n).collect::<Vec<_>>()).unwrap();
        let freq: BTreeMap<VertexId, u64> = vertex_frequency(&db);
        let mut last = 0.0;
        for p in [1.0, 5.0, 10.0, 25.0, 50.0, 75.0, 100.0] {
            let s = top_degree_share(&g, &freq, p).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert!(s >= last);
            last = s;
        }
        if db.total_items() > 0 {
            prop_assert_eq!(last, 1.0);
        }
    }
}

#[test]
fn ngrams_are_shortest_paths() {
    // every window of a shortest path is itself a shortest path
    let edges = [
        (0, 1, 2u64),
        (1, 2, 2),
        (0, 3, 5),
        (3, 2, 1),
        (2, 4, 3),
        (4, 5, 1),
        (1, 5, 9),
        (3, 5, 4),
    ];
    let g = IntGraph::from_weighted(6, &edges, false).unwrap();
    let oracle = floyd_warshall(6, &edges);
    let db = run_traversals(&g, &[0, 1, 2, 3, 4, 5]).unwrap();
    for n in 2..=4 {
        let counts = count_ngrams(&db, n, false).unwrap();
        for window in counts.entries.keys() {
            let cost: u64 = window
                .windows(2)
                .map(|w| g.edge_weight(w[0], w[1]).unwrap())
                .sum();
            let (a, b) = (window[0] as usize, *window.last().unwrap() as usize);
            assert_eq!(Some(cost), oracle[a][b], "window {window:?}");
        }
    }
}

#[test]
fn traversal_is_thread_count_independent() {
    let pairs: Vec<(u32, u32)> = (0..300u32)
        .map(|i| (i, (i * 7 + 3) % 300))
        .chain((0..300).map(|i| (i, (i + 1) % 300)))
        .collect();
    let g = Graph::from_pairs(300, &pairs, false).unwrap();
    let sources: Vec<VertexId> = (0..300).step_by(3).collect();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| serialize_db(&run_traversals(&g, &sources).unwrap()))
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}
