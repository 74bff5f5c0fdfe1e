//! Shortest paths as a transaction database, and consecutive-window counts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::scalar::Weight;
use crate::VertexId;

/// One shortest path: at least two distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathTransaction(Vec<VertexId>);

impl PathTransaction {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        check_shape(&vertices)?;
        Ok(PathTransaction(vertices))
    }

    /// Like [`new`](Self::new), and also requires consecutive vertices to be
    /// joined by edges of `g`.
    pub fn checked<W: Weight>(g: &CsrGraph<W>, vertices: Vec<VertexId>) -> Result<Self> {
        check_shape(&vertices)?;
        check_edges(g, &vertices)?;
        Ok(PathTransaction(vertices))
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }
}

fn check_shape(vertices: &[VertexId]) -> Result<()> {
    if vertices.len() < 2 {
        return Err(Error::validation(
            "a path transaction needs at least two vertices",
        ));
    }
    let mut seen = HashSet::with_capacity(vertices.len());
    if let Some(v) = vertices.iter().find(|&&v| !seen.insert(v)) {
        return Err(Error::validation(format!("vertex {v} repeats in path")));
    }
    Ok(())
}

fn check_edges<W: Weight>(g: &CsrGraph<W>, vertices: &[VertexId]) -> Result<()> {
    for pair in vertices.windows(2) {
        g.check_vertex(pair[0])?;
        g.check_vertex(pair[1])?;
        if !g.has_edge(pair[0], pair[1]) {
            return Err(Error::validation(format!(
                "({}, {}) is not an edge of the graph",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// Ordered collection of path transactions, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDb {
    offsets: Vec<usize>,
    items: Vec<VertexId>,
    pub source_count: usize,
    pub unreachable_pairs: u64,
    pub graph_fingerprint: String,
}

impl TransactionDb {
    pub fn new(graph_fingerprint: impl Into<String>) -> Self {
        TransactionDb {
            offsets: vec![0],
            items: Vec::new(),
            source_count: 0,
            unreachable_pairs: 0,
            graph_fingerprint: graph_fingerprint.into(),
        }
    }

    pub fn push(&mut self, t: &PathTransaction) {
        self.push_unchecked(t.vertices());
    }

    pub(crate) fn push_unchecked(&mut self, vertices: &[VertexId]) {
        self.items.extend_from_slice(vertices);
        self.offsets.push(self.items.len());
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Option<&[VertexId]> {
        (i < self.len()).then(|| &self.items[self.offsets[i]..self.offsets[i + 1]])
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[VertexId]> + Clone + '_ {
        self.offsets.windows(2).map(|w| &self.items[w[0]..w[1]])
    }

    /// Σ transaction lengths.
    pub fn total_items(&self) -> usize {
        self.items.len()
    }

    /// Checks the database against the graph it claims to come from: same
    /// fingerprint, ids in range, consecutive vertices adjacent.
    pub fn validate_against<W: Weight>(&self, g: &CsrGraph<W>) -> Result<()> {
        let fp = g.fingerprint();
        if fp != self.graph_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: fp,
                found: self.graph_fingerprint.clone(),
            });
        }
        self.iter().try_for_each(|t| check_edges(g, t))
    }
}

/// Counts of consecutive vertex windows of one length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts {
    pub n: usize,
    pub entries: HashMap<Vec<VertexId>, u64>,
}

impl NGramCounts {
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Entries by count descending, then items ascending.
    pub fn sorted(&self) -> Vec<(&[VertexId], u64)> {
        let mut rows: Vec<_> = self.entries.iter().map(|(k, &c)| (k.as_slice(), c)).collect();
        rows.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }
}

/// Replaces `tuple` by its reversal when the reversal is lexicographically
/// smaller.
pub fn canonicalize(tuple: &mut [VertexId]) {
    let smaller = tuple.iter().rev().cmp(tuple.iter()) == std::cmp::Ordering::Less;
    if smaller {
        tuple.reverse();
    }
}

/// Slides a window of `n` vertices over every transaction.
///
/// With `canonicalize` set, a window and its reversal pool their counts
/// (appropriate for undirected graphs, where direction only reflects which
/// endpoint was the source).
pub fn count_ngrams(db: &TransactionDb, n: usize, canonical: bool) -> Result<NGramCounts> {
    if n == 0 {
        return Err(Error::validation("n-gram length must be at least 1"));
    }
    let mut entries: HashMap<Vec<VertexId>, u64> = HashMap::new();
    let mut key = Vec::with_capacity(n);
    for t in db.iter() {
        for window in t.windows(n) {
            key.clear();
            key.extend_from_slice(window);
            if canonical {
                canonicalize(&mut key);
            }
            match entries.get_mut(key.as_slice()) {
                Some(c) => *c += 1,
                None => {
                    entries.insert(key.clone(), 1);
                }
            }
        }
    }
    Ok(NGramCounts { n, entries })
}

/// Number of transactions each vertex appears in. Paths are simple, so this
/// equals the 1-gram window count.
pub fn vertex_frequency(db: &TransactionDb) -> BTreeMap<VertexId, u64> {
    let mut freq = BTreeMap::new();
    for &v in &db.items {
        *freq.entry(v).or_insert(0) += 1;
    }
    freq
}

/// Line-oriented text form: `%sources`, `%unreachable` and `%fp` headers,
/// then one space-separated transaction per line.
pub fn serialize_db(db: &TransactionDb) -> String {
    let mut out = String::with_capacity(db.total_items() * 6 + 64);
    let _ = writeln!(out, "%sources {}", db.source_count);
    let _ = writeln!(out, "%unreachable {}", db.unreachable_pairs);
    let _ = writeln!(out, "%fp {}", db.graph_fingerprint);
    for t in db.iter() {
        for (i, v) in t.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_db<Wr: Write>(db: &TransactionDb, mut writer: Wr) -> std::io::Result<()> {
    writer.write_all(serialize_db(db).as_bytes())
}

/// Parses the text form written by [`serialize_db`].
pub fn parse_db<R: BufRead>(input: R) -> Result<TransactionDb> {
    let mut sources = None;
    let mut unreachable = None;
    let mut fingerprint = None;
    let mut db = TransactionDb::new(String::new());
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if let Some(header) = line.strip_prefix('%') {
            let (key, value) = header
                .split_once(' ')
                .ok_or_else(|| Error::parse(lineno, format!("malformed header {line:?}")))?;
            let number = || {
                value
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse(lineno, format!("invalid {key} value {value:?}")))
            };
            match key {
                "sources" => sources = Some(number()? as usize),
                "unreachable" => unreachable = Some(number()?),
                "fp" => fingerprint = Some(value.trim().to_string()),
                _ => return Err(Error::parse(lineno, format!("unknown header {key:?}"))),
            }
            continue;
        }
        let vertices = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<VertexId>()
                    .map_err(|_| Error::parse(lineno, format!("invalid vertex id {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        check_shape(&vertices).map_err(|e| Error::parse(lineno, e.to_string()))?;
        db.push_unchecked(&vertices);
    }
    let missing = |name: &str| Error::parse(0, format!("missing %{name} header"));
    db.source_count = sources.ok_or_else(|| missing("sources"))?;
    db.unreachable_pairs = unreachable.ok_or_else(|| missing("unreachable"))?;
    db.graph_fingerprint = fingerprint.ok_or_else(|| missing("fp"))?;
    Ok(db)
}

/// Parses and rejects databases recorded against a different graph.
pub fn parse_db_for<R: BufRead>(input: R, expected_fingerprint: &str) -> Result<TransactionDb> {
    let db = parse_db(input)?;
    if db.graph_fingerprint != expected_fingerprint {
        return Err(Error::FingerprintMismatch {
            expected: expected_fingerprint.to_string(),
            found: db.graph_fingerprint,
        });
    }
    Ok(db)
}

pub(crate) fn join_items(items: &[VertexId]) -> String {
    let mut s = String::new();
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            s.push('|');
        }
        let _ = write!(s, "{v}");
    }
    s
}

pub(crate) fn split_items(field: &str) -> Option<Vec<VertexId>> {
    field.split('|').map(|t| t.parse().ok()).collect()
}

/// CSV with columns `n,items,count`, rows in [`NGramCounts::sorted`] order.
pub fn ngram_csv(counts: &NGramCounts) -> String {
    let mut out = String::from("n,items,count\n");
    for (items, count) in counts.sorted() {
        let _ = writeln!(out, "{},{},{}", counts.n, join_items(items), count);
    }
    out
}

pub fn parse_ngram_csv(input: &str, n: usize) -> Result<NGramCounts> {
    let mut entries = HashMap::new();
    for (idx, line) in input.lines().enumerate().skip(1) {
        let bad = || Error::parse(idx + 1, format!("malformed n-gram row {line:?}"));
        let mut fields = line.split(',');
        let (Some(row_n), Some(items), Some(count), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(bad());
        };
        if row_n.parse::<usize>().ok() != Some(n) {
            return Err(bad());
        }
        let items = split_items(items).ok_or_else(bad)?;
        let count = count.parse().map_err(|_| bad())?;
        entries.insert(items, count);
    }
    Ok(NGramCounts { n, entries })
}
