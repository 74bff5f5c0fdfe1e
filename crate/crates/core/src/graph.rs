//! Immutable CSR graph, edge-list ingestion and structural properties.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use num_traits::{FromPrimitive, Num};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Weight;
use crate::VertexId;

/// Options controlling how an edge list is interpreted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub directed: bool,
    pub weighted: bool,
}

/// Compressed sparse row adjacency.
///
/// Neighbor slices are sorted ascending with no duplicates and no self-loops.
/// Undirected edges are stored in both endpoint slices and counted once in
/// [`edge_count`](CsrGraph::edge_count). Unweighted graphs carry no weight
/// array; traversal treats every edge as weight one.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrGraph<W> {
    vertex_count: usize,
    edge_count: usize,
    offsets: Vec<usize>,
    adjacency: Vec<VertexId>,
    weights: Option<Vec<W>>,
    directed: bool,
}

impl<W: Weight> CsrGraph<W> {
    /// Builds a graph from an edge sequence.
    ///
    /// Self-loops are dropped and duplicate edges collapse to the first
    /// occurrence (for undirected graphs `(u, v)` and `(v, u)` are the same
    /// edge). `weighted` selects whether the third tuple element is kept;
    /// when it is, every edge must carry a weight.
    pub fn from_edges<I>(vertex_count: usize, edges: I, directed: bool, weighted: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Option<W>)>,
    {
        let mut keyed: Vec<((VertexId, VertexId), usize, W)> = Vec::new();
        for (seq, (u, v, w)) in edges.into_iter().enumerate() {
            for x in [u, v] {
                if x as usize >= vertex_count {
                    return Err(Error::OutOfBounds {
                        vertex: x as u64,
                        vertex_count,
                    });
                }
            }
            let w = if weighted {
                let w = w.ok_or_else(|| Error::validation(format!("edge ({u}, {v}) has no weight")))?;
                if !w.is_valid_weight() {
                    return Err(Error::validation(format!(
                        "edge ({u}, {v}) has non-positive weight {w}"
                    )));
                }
                w
            } else {
                W::one()
            };
            if u == v {
                continue;
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            keyed.push((key, seq, w));
        }
        keyed.sort_unstable_by_key(|&(key, seq, _)| (key, seq));
        keyed.dedup_by_key(|e| e.0);
        let edge_count = keyed.len();

        let mut arcs: Vec<(VertexId, VertexId, W)> =
            Vec::with_capacity(if directed { edge_count } else { 2 * edge_count });
        for &((u, v), _, w) in &keyed {
            arcs.push((u, v, w));
            if !directed {
                arcs.push((v, u, w));
            }
        }
        arcs.sort_unstable_by_key(|&(u, v, _)| (u, v));

        let mut offsets = vec![0usize; vertex_count + 1];
        for &(u, _, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let adjacency = arcs.iter().map(|a| a.1).collect();
        let weights = weighted.then(|| arcs.iter().map(|a| a.2).collect());

        Ok(CsrGraph {
            vertex_count,
            edge_count,
            offsets,
            adjacency,
            weights,
            directed,
        })
    }

    /// Unweighted graph from `(u, v)` pairs.
    pub fn from_pairs(vertex_count: usize, pairs: &[(VertexId, VertexId)], directed: bool) -> Result<Self> {
        Self::from_edges(
            vertex_count,
            pairs.iter().map(|&(u, v)| (u, v, None)),
            directed,
            false,
        )
    }

    /// Weighted graph from `(u, v, w)` triples.
    pub fn from_weighted(
        vertex_count: usize,
        triples: &[(VertexId, VertexId, W)],
        directed: bool,
    ) -> Result<Self> {
        Self::from_edges(
            vertex_count,
            triples.iter().map(|&(u, v, w)| (u, v, Some(w))),
            directed,
            true,
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn adjacency(&self) -> &[VertexId] {
        &self.adjacency
    }

    pub fn weights(&self) -> Option<&[W]> {
        self.weights.as_deref()
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.vertex_count {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                vertex: v as u64,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Sorted neighbor slice of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbors of `v` with their edge weights (one when unweighted).
    pub fn weighted_neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, W)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        let weights = self.weights.as_deref();
        range.map(move |i| (self.adjacency[i], weights.map_or_else(W::one, |w| w[i])))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.offsets[v as usize + 1] - self.offsets[v as usize])
    }

    pub(crate) fn degree_unchecked(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Weight of the arc `u -> v`, if present.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<W> {
        if u as usize >= self.vertex_count {
            return None;
        }
        let start = self.offsets[u as usize];
        let i = self.neighbors(u).binary_search(&v).ok()?;
        Some(self.weights.as_ref().map_or_else(W::one, |w| w[start + i]))
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    /// Iterates edges once each: `u < v` for undirected graphs, every arc
    /// for directed ones. Ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, W)> + '_ {
        (0..self.vertex_count as VertexId).flat_map(move |u| {
            self.weighted_neighbors(u)
                .filter(move |&(v, _)| self.directed || u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Canonical edge-list text; re-parsing it reproduces this graph when
    /// the highest vertex id carries an edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            if self.is_weighted() {
                let _ = writeln!(out, "{u} {v} {w}");
            } else {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }

    /// Stable hex digest of the graph's structure, weights and mode.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!(
            "n={} directed={} weighted={}\n",
            self.vertex_count,
            self.directed,
            self.is_weighted()
        ));
        hasher.update(self.to_edge_list());
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses a whitespace-separated edge list.
///
/// Lines are `u v` or `u v w`; blank lines and lines starting with `#` are
/// skipped. Unweighted parsing ignores any tokens after the two endpoints.
/// The vertex count is the largest id seen plus one.
pub fn parse_edge_list<W: Weight, R: BufRead>(input: R, options: ParseOptions) -> Result<CsrGraph<W>> {
    let mut edges = Vec::new();
    let mut max_id: Option<VertexId> = None;
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut endpoint = |name: &str| -> Result<VertexId> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse(lineno, format!("missing {name} endpoint")))?;
            let id: u64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("invalid vertex id {tok:?}")))?;
            VertexId::try_from(id)
                .ok()
                .filter(|&id| id < VertexId::MAX)
                .ok_or_else(|| Error::parse(lineno, format!("vertex id {id} too large")))
        };
        let u = endpoint("source")?;
        let v = endpoint("target")?;
        let w = if options.weighted {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing weight"))?;
            let w: W = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("invalid weight {tok:?}")))?;
            if !w.is_valid_weight() {
                return Err(Error::validation(format!(
                    "line {lineno}: weight must be positive and finite, got {tok}"
                )));
            }
            if let Some(extra) = tokens.next() {
                return Err(Error::parse(lineno, format!("unexpected token {extra:?}")));
            }
            Some(w)
        } else {
            None
        };
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let Some(max_id) = max_id else {
        return Err(Error::validation("edge list contains no edges"));
    };
    CsrGraph::from_edges(max_id as usize + 1, edges, options.directed, options.weighted)
}

/// Parses an edge list held in memory.
pub fn parse_edge_list_str<W: Weight>(input: &str, options: ParseOptions) -> Result<CsrGraph<W>> {
    parse_edge_list(input.as_bytes(), options)
}

/// Number of vertices per degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeHistogram {
    pub entries: BTreeMap<usize, usize>,
}

impl DegreeHistogram {
    pub fn vertex_total(&self) -> usize {
        self.entries.values().sum()
    }

    /// Σ degree × count.
    pub fn degree_sum(&self) -> usize {
        self.entries.iter().map(|(d, c)| d * c).sum()
    }
}

pub fn degree_histogram<W: Weight>(g: &CsrGraph<W>) -> DegreeHistogram {
    let mut entries = BTreeMap::new();
    for v in 0..g.vertex_count() as VertexId {
        *entries.entry(g.degree_unchecked(v)).or_insert(0) += 1;
    }
    DegreeHistogram { entries }
}

/// Local clustering coefficients and their mean over all vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringStats<F> {
    pub local: Vec<F>,
    pub average: F,
}

/// Local clustering coefficient `2·T / (d·(d−1))` for every vertex, where
/// `T` counts edges among the vertex's neighbors; zero below degree two.
///
/// Generic over the output scalar: `f64` for reporting, `Ratio<i64>` for
/// exact comparisons.
pub fn clustering<W: Weight, F>(g: &CsrGraph<W>) -> Result<ClusteringStats<F>>
where
    F: Num + Copy + FromPrimitive,
{
    if g.is_directed() {
        return Err(Error::Unsupported(
            "clustering coefficient requires an undirected graph".into(),
        ));
    }
    let n = g.vertex_count();
    let convert = |x: usize| F::from_usize(x).expect("count fits the scalar type");
    let mut local = Vec::with_capacity(n);
    let mut sum = F::zero();
    for v in 0..n as VertexId {
        let nv = g.neighbors(v);
        let d = nv.len();
        let c = if d < 2 {
            F::zero()
        } else {
            let links: usize = nv.iter().map(|&u| sorted_intersection(nv, g.neighbors(u))).sum();
            // each neighbor pair is seen from both ends
            convert(links) / convert(d * (d - 1))
        };
        sum = sum + c;
        local.push(c);
    }
    let average = if n == 0 { F::zero() } else { sum / convert(n) };
    Ok(ClusteringStats { local, average })
}

fn sorted_intersection(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Renders the graph in Graphviz DOT.
///
/// Edges in `highlight` are drawn in red (for undirected graphs either
/// orientation matches). Graphs with more than `max_vertices` vertices are
/// cut down to the `max_vertices` highest-degree vertices, ties by lower id,
/// and their induced edges.
pub fn export_dot<W: Weight>(
    g: &CsrGraph<W>,
    highlight: Option<&HashSet<(VertexId, VertexId)>>,
    max_vertices: usize,
) -> String {
    let n = g.vertex_count();
    let kept: Vec<bool> = if n > max_vertices {
        let mut order: Vec<VertexId> = (0..n as VertexId).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.degree_unchecked(v)), v));
        let mut keep = vec![false; n];
        for &v in &order[..max_vertices] {
            keep[v as usize] = true;
        }
        keep
    } else {
        vec![true; n]
    };
    let is_highlighted = |u: VertexId, v: VertexId| {
        highlight.is_some_and(|h| h.contains(&(u, v)) || (!g.is_directed() && h.contains(&(v, u))))
    };

    let (keyword, arrow) = if g.is_directed() {
        ("digraph", "->")
    } else {
        ("graph", "--")
    };
    let mut out = format!("{keyword} G {{\n");
    let shown = kept.iter().filter(|&&k| k).count();
    if shown < n {
        let _ = writeln!(
            out,
            "  // truncated: {shown} of {n} vertices shown (highest degree first)"
        );
    }
    for (v, _) in kept.iter().enumerate().filter(|(_, &k)| k) {
        let _ = writeln!(out, "  {v};");
    }
    for (u, v, w) in g.edges() {
        if !(kept[u as usize] && kept[v as usize]) {
            continue;
        }
        let mut attrs = Vec::new();
        if g.is_weighted() {
            attrs.push(format!("label=\"{w}\""));
        }
        if is_highlighted(u, v) {
            attrs.push("color=red".to_string());
            attrs.push("penwidth=2".to_string());
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {u} {arrow} {v};");
        } else {
            let _ = writeln!(out, "  {u} {arrow} {v} [{}];", attrs.join(", "));
        }
    }
    out.push_str("}\n");
    out
}
