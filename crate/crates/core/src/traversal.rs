//! Single-source shortest paths and multi-source path collection.
//!
//! Among equal-cost alternatives the reported path from the source to any
//! vertex is the lexicographically smallest vertex sequence. The rule is
//! prefix-closed, so it is representable as one parent tree per source, and
//! it makes every downstream frequency count independent of heap order,
//! thread count and platform.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::scalar::{cmp_weight, Weight};
use crate::transactions::TransactionDb;
use crate::VertexId;

/// Distances and shortest-path tree from one source.
///
/// `dist[v]` is `None` when `v` is unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct SsspResult<W> {
    pub source: VertexId,
    pub dist: Vec<Option<W>>,
    pub parent: Vec<Option<VertexId>>,
}

impl<W: Weight> SsspResult<W> {
    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.dist.get(v as usize).is_some_and(Option::is_some)
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry<W>(W, VertexId);

impl<W: Weight> PartialEq for HeapEntry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: Weight> Eq for HeapEntry<W> {}

impl<W: Weight> PartialOrd for HeapEntry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Weight> Ord for HeapEntry<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_weight(&self.0, &other.0).then(self.1.cmp(&other.1))
    }
}

/// Shortest paths from `source`.
///
/// Unweighted graphs run a breadth-first search; weighted graphs run
/// Dijkstra with a lazy-deletion binary heap followed by a depth-first pass
/// over tight edges that picks the lexicographically smallest optimal path
/// to every vertex.
pub fn sssp<W: Weight>(g: &CsrGraph<W>, source: VertexId) -> Result<SsspResult<W>> {
    g.check_vertex(source)?;
    if g.is_weighted() {
        let dist = dijkstra_distances(g, source);
        let parent = lexicographic_tree(g, source, &dist);
        Ok(SsspResult { source, dist, parent })
    } else {
        Ok(bfs(g, source))
    }
}

// FIFO order with ascending neighbor scans discovers each level in
// lexicographic order of the paths, so the first discovery is the
// lexicographically smallest shortest path.
fn bfs<W: Weight>(g: &CsrGraph<W>, source: VertexId) -> SsspResult<W> {
    let n = g.vertex_count();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    dist[source as usize] = Some(W::zero());
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u as usize].expect("queued vertices have a distance") + W::one();
        for &v in g.neighbors(u) {
            if dist[v as usize].is_none() {
                dist[v as usize] = Some(next);
                parent[v as usize] = Some(u);
                queue.push_back(v);
            }
        }
    }
    SsspResult { source, dist, parent }
}

fn dijkstra_distances<W: Weight>(g: &CsrGraph<W>, source: VertexId) -> Vec<Option<W>> {
    let n = g.vertex_count();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = Some(W::zero());
    heap.push(Reverse(HeapEntry(W::zero(), source)));
    while let Some(Reverse(HeapEntry(d, u))) = heap.pop() {
        if settled[u as usize] {
            continue;
        }
        settled[u as usize] = true;
        for (v, w) in g.weighted_neighbors(u) {
            if settled[v as usize] {
                continue;
            }
            let candidate = d + w;
            if dist[v as usize].is_none_or(|cur| candidate < cur) {
                dist[v as usize] = Some(candidate);
                heap.push(Reverse(HeapEntry(candidate, v)));
            }
        }
    }
    dist
}

// Preorder DFS over the shortest-path DAG with ascending neighbor order
// visits source-rooted paths in lexicographic order; a vertex's first
// discovery is therefore through its smallest optimal path, and any later
// path reaching an already-discovered vertex is dominated for every suffix.
fn lexicographic_tree<W: Weight>(
    g: &CsrGraph<W>,
    source: VertexId,
    dist: &[Option<W>],
) -> Vec<Option<VertexId>> {
    let n = g.vertex_count();
    let offsets = g.offsets();
    let adjacency = g.adjacency();
    let weights = g.weights();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[source as usize] = true;
    let mut stack = vec![(source, offsets[source as usize])];
    while let Some(top) = stack.last_mut() {
        let u = top.0;
        let i = top.1;
        if i == offsets[u as usize + 1] {
            stack.pop();
            continue;
        }
        top.1 += 1;
        let v = adjacency[i];
        if seen[v as usize] {
            continue;
        }
        let w = weights.map_or_else(W::one, |ws| ws[i]);
        if let (Some(du), Some(dv)) = (dist[u as usize], dist[v as usize]) {
            if du + w == dv {
                seen[v as usize] = true;
                parent[v as usize] = Some(u);
                stack.push((v, offsets[v as usize]));
            }
        }
    }
    parent
}

/// Vertex sequence `[source, …, target]`, or `None` when `target` is
/// unreachable. `target == source` yields `[source]`.
pub fn reconstruct_path<W: Weight>(
    result: &SsspResult<W>,
    target: VertexId,
) -> Result<Option<Vec<VertexId>>> {
    if target as usize >= result.dist.len() {
        return Err(Error::OutOfBounds {
            vertex: target as u64,
            vertex_count: result.dist.len(),
        });
    }
    if result.dist[target as usize].is_none() {
        return Ok(None);
    }
    let mut path = vec![target];
    let mut cur = target;
    while let Some(p) = result.parent[cur as usize] {
        path.push(p);
        cur = p;
    }
    debug_assert_eq!(cur, result.source);
    path.reverse();
    Ok(Some(path))
}

/// Distinct source vertices drawn without replacement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSample {
    pub sources: Vec<VertexId>,
    pub seed: u64,
    pub k: usize,
}

/// Draws `k` distinct vertices with a partial Fisher–Yates shuffle driven by
/// ChaCha8 seeded from `seed`. The result depends only on
/// `(seed, k, vertex_count)`.
pub fn sample_sources<W: Weight>(g: &CsrGraph<W>, k: usize, seed: u64) -> Result<SourceSample> {
    let n = g.vertex_count();
    if k == 0 || k > n {
        return Err(Error::validation(format!(
            "sample size k={k} must be between 1 and the vertex count {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<VertexId> = (0..n as VertexId).collect();
    for i in 0..k {
        let j = rng.gen_range(i as u64..n as u64) as usize;
        ids.swap(i, j);
    }
    ids.truncate(k);
    Ok(SourceSample {
        sources: ids,
        seed,
        k,
    })
}

/// Runs [`sssp`] from every source and records the path to every other
/// reachable vertex as one transaction.
///
/// Sources are processed in parallel on the current rayon pool; the
/// database is assembled in `(source position, target ascending)` order
/// regardless of completion order. Unreachable pairs are only counted.
pub fn run_traversals<W: Weight>(g: &CsrGraph<W>, sources: &[VertexId]) -> Result<TransactionDb> {
    if sources.is_empty() {
        return Err(Error::validation("no source vertices given"));
    }
    for &s in sources {
        g.check_vertex(s)?;
    }
    let per_source: Vec<(Vec<VertexId>, Vec<usize>, u64)> = sources
        .par_iter()
        .map(|&s| paths_from(g, s))
        .collect::<Result<_>>()?;

    let mut db = TransactionDb::new(g.fingerprint());
    db.source_count = sources.len();
    for (items, lengths, unreachable) in per_source {
        let mut start = 0;
        for len in lengths {
            db.push_unchecked(&items[start..start + len]);
            start += len;
        }
        db.unreachable_pairs += unreachable;
    }
    Ok(db)
}

fn paths_from<W: Weight>(g: &CsrGraph<W>, s: VertexId) -> Result<(Vec<VertexId>, Vec<usize>, u64)> {
    let result = sssp(g, s)?;
    let mut items = Vec::new();
    let mut lengths = Vec::new();
    let mut unreachable = 0;
    let mut scratch = Vec::new();
    for t in 0..g.vertex_count() as VertexId {
        if t == s {
            continue;
        }
        if !result.is_reachable(t) {
            unreachable += 1;
            continue;
        }
        scratch.clear();
        let mut cur = t;
        scratch.push(cur);
        while let Some(p) = result.parent[cur as usize] {
            scratch.push(p);
            cur = p;
        }
        lengths.push(scratch.len());
        items.extend(scratch.iter().rev());
    }
    Ok((items, lengths, unreachable))
}
