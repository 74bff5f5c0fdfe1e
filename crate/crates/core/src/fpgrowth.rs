//! Frequent vertex-set mining with FP-Growth.
//!
//! Transactions are treated as item sets. Items are ranked by descending
//! support with ties broken by ascending vertex id, which fixes the tree
//! shape and the output for a given database.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::transactions::{join_items, split_items, TransactionDb};
use crate::VertexId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpNode {
    /// `None` only for the root.
    pub item: Option<VertexId>,
    pub count: u64,
    pub parent: Option<usize>,
    pub children: HashMap<VertexId, usize>,
}

/// Header-table row: an item, its support, and every node carrying it in
/// insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderEntry {
    pub item: VertexId,
    pub support: u64,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FpTree {
    nodes: Vec<FpNode>,
    /// In item order: descending support, then ascending id.
    header: Vec<HeaderEntry>,
    min_support: u64,
}

const ROOT: usize = 0;

impl FpTree {
    fn build<'a, F, I>(transactions: F, min_support: u64) -> FpTree
    where
        F: Fn() -> I,
        I: Iterator<Item = (&'a [VertexId], u64)>,
    {
        let mut support: HashMap<VertexId, u64> = HashMap::new();
        for (items, count) in transactions() {
            for &item in items {
                *support.entry(item).or_insert(0) += count;
            }
        }
        let mut frequent: Vec<(VertexId, u64)> =
            support.into_iter().filter(|&(_, s)| s >= min_support).collect();
        frequent.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let rank: HashMap<VertexId, usize> = frequent
            .iter()
            .enumerate()
            .map(|(r, &(item, _))| (item, r))
            .collect();

        let mut tree = FpTree {
            nodes: vec![FpNode {
                item: None,
                count: 0,
                parent: None,
                children: HashMap::new(),
            }],
            header: frequent
                .iter()
                .map(|&(item, support)| HeaderEntry {
                    item,
                    support,
                    nodes: Vec::new(),
                })
                .collect(),
            min_support,
        };

        let mut ordered: Vec<usize> = Vec::new();
        for (items, count) in transactions() {
            ordered.clear();
            ordered.extend(items.iter().filter_map(|i| rank.get(i).copied()));
            ordered.sort_unstable();
            ordered.dedup();
            tree.insert(&ordered, count);
        }
        tree
    }

    fn insert(&mut self, ranks: &[usize], count: u64) {
        let mut cur = ROOT;
        self.nodes[ROOT].count += count;
        for &r in ranks {
            let item = self.header[r].item;
            cur = match self.nodes[cur].children.get(&item) {
                Some(&child) => child,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(FpNode {
                        item: Some(item),
                        count: 0,
                        parent: Some(cur),
                        children: HashMap::new(),
                    });
                    self.nodes[cur].children.insert(item, idx);
                    self.header[r].nodes.push(idx);
                    idx
                }
            };
            self.nodes[cur].count += count;
        }
    }

    pub fn nodes(&self) -> &[FpNode] {
        &self.nodes
    }

    pub fn header(&self) -> &[HeaderEntry] {
        &self.header
    }

    pub fn min_support(&self) -> u64 {
        self.min_support
    }

    /// True when no item reached the support threshold.
    pub fn is_empty(&self) -> bool {
        self.header.is_empty()
    }

    /// Items on the path from `node` up to (excluding) the root, nearest
    /// first.
    fn prefix_path(&self, node: usize) -> Vec<VertexId> {
        let mut path = Vec::new();
        let mut cur = self.nodes[node].parent;
        while let Some(p) = cur {
            if let Some(item) = self.nodes[p].item {
                path.push(item);
            }
            cur = self.nodes[p].parent;
        }
        path
    }
}

/// A frequent item set with its exact support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequentPattern {
    /// Sorted ascending.
    pub items: Vec<VertexId>,
    pub support: u64,
}

/// Builds the FP-tree of `db`, dropping items with support below
/// `min_support`.
pub fn build_fptree(db: &TransactionDb, min_support: u64) -> Result<FpTree> {
    if min_support == 0 {
        return Err(Error::validation("min_support must be at least 1"));
    }
    Ok(FpTree::build(|| db.iter().map(|t| (t, 1)), min_support))
}

/// FP-Growth over `tree`: every item set with support ≥ `min_support` (and
/// at most `max_size` items when given), each once, sorted by size
/// ascending, support descending, items ascending.
pub fn mine(tree: &FpTree, min_support: u64, max_size: Option<usize>) -> Result<Vec<FrequentPattern>> {
    if min_support != tree.min_support {
        return Err(Error::validation(format!(
            "min_support {min_support} does not match the tree threshold {}",
            tree.min_support
        )));
    }
    let mut out = Vec::new();
    if max_size != Some(0) {
        grow(tree, &mut Vec::new(), max_size, &mut out);
    }
    sort_patterns(&mut out);
    Ok(out)
}

fn grow(tree: &FpTree, suffix: &mut Vec<VertexId>, max_size: Option<usize>, out: &mut Vec<FrequentPattern>) {
    for entry in tree.header.iter().rev() {
        suffix.push(entry.item);
        let mut items = suffix.clone();
        items.sort_unstable();
        out.push(FrequentPattern {
            items,
            support: entry.support,
        });
        if max_size.is_none_or(|m| suffix.len() < m) {
            let base: Vec<(Vec<VertexId>, u64)> = entry
                .nodes
                .iter()
                .map(|&n| (tree.prefix_path(n), tree.nodes[n].count))
                .filter(|(path, _)| !path.is_empty())
                .collect();
            if !base.is_empty() {
                let conditional =
                    FpTree::build(|| base.iter().map(|(p, c)| (p.as_slice(), *c)), tree.min_support);
                if !conditional.is_empty() {
                    grow(&conditional, suffix, max_size, out);
                }
            }
        }
        suffix.pop();
    }
}

fn sort_patterns(patterns: &mut [FrequentPattern]) {
    patterns.sort_unstable_by(|a, b| {
        a.items
            .len()
            .cmp(&b.items.len())
            .then(b.support.cmp(&a.support))
            .then_with(|| a.items.cmp(&b.items))
    });
}

/// Largest item universe (after support filtering) the brute-force miner
/// accepts.
pub const BRUTE_FORCE_MAX_ITEMS: usize = 16;

/// Level-wise enumeration with exact support counting. Same output contract
/// as [`mine`]; intended as an independent check on small inputs.
pub fn brute_force_frequent(
    db: &TransactionDb,
    min_support: u64,
    max_size: usize,
) -> Result<Vec<FrequentPattern>> {
    if min_support == 0 {
        return Err(Error::validation("min_support must be at least 1"));
    }
    let mut support: HashMap<VertexId, u64> = HashMap::new();
    for t in db.iter() {
        let mut items = t.to_vec();
        items.sort_unstable();
        items.dedup();
        for item in items {
            *support.entry(item).or_insert(0) += 1;
        }
    }
    let mut universe: Vec<VertexId> = support
        .iter()
        .filter(|&(_, &s)| s >= min_support)
        .map(|(&i, _)| i)
        .collect();
    universe.sort_unstable();
    if universe.len() > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::validation(format!(
            "{} frequent items exceed the brute-force limit of {BRUTE_FORCE_MAX_ITEMS}",
            universe.len()
        )));
    }
    let bit: HashMap<VertexId, u32> = universe.iter().enumerate().map(|(i, &v)| (v, 1 << i)).collect();
    let masks: Vec<u32> = db
        .iter()
        .map(|t| t.iter().filter_map(|v| bit.get(v)).fold(0, |m, b| m | b))
        .collect();
    let support_of = |set: u32| masks.iter().filter(|&&m| m & set == set).count() as u64;

    let mut out = Vec::new();
    // (mask, highest bit index) of the frequent sets at the current level
    let mut level: Vec<(u32, usize)> = Vec::new();
    for i in 0..universe.len() {
        let s = support_of(1 << i);
        if s >= min_support {
            level.push((1 << i, i));
        }
    }
    let mut size = 1;
    while !level.is_empty() && size <= max_size {
        let mut next = Vec::new();
        for &(mask, top) in &level {
            out.push(FrequentPattern {
                items: (0..universe.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| universe[i])
                    .collect(),
                support: support_of(mask),
            });
            if size < max_size {
                for j in top + 1..universe.len() {
                    let candidate = mask | (1 << j);
                    if support_of(candidate) >= min_support {
                        next.push((candidate, j));
                    }
                }
            }
        }
        level = next;
        size += 1;
    }
    sort_patterns(&mut out);
    Ok(out)
}

/// CSV with columns `support,size,items`.
pub fn patterns_csv(patterns: &[FrequentPattern]) -> String {
    let mut out = String::from("support,size,items\n");
    for p in patterns {
        let _ = writeln!(out, "{},{},{}", p.support, p.items.len(), join_items(&p.items));
    }
    out
}

pub fn parse_patterns_csv(input: &str) -> Result<Vec<FrequentPattern>> {
    input
        .lines()
        .enumerate()
        .skip(1)
        .map(|(idx, line)| {
            let bad = || Error::parse(idx + 1, format!("malformed pattern row {line:?}"));
            let mut fields = line.split(',');
            let (Some(support), Some(size), Some(items), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad());
            };
            let items = split_items(items).ok_or_else(bad)?;
            if size.parse::<usize>().ok() != Some(items.len()) {
                return Err(bad());
            }
            Ok(FrequentPattern {
                items,
                support: support.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
