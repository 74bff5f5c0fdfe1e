//! Degree versus path-occupancy statistics and report files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{Float, FromPrimitive};
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::fpgrowth::{patterns_csv, FrequentPattern};
use crate::graph::{CsrGraph, DegreeHistogram};
use crate::scalar::Weight;
use crate::transactions::{ngram_csv, NGramCounts};
use crate::VertexId;

/// Percentiles reported by default for top-degree occupancy.
pub const DEFAULT_PERCENTILES: [f64; 5] = [1.0, 5.0, 10.0, 25.0, 50.0];

#[derive(Debug, Clone, PartialEq)]
pub struct VertexFrequencyRecord {
    pub vertex: VertexId,
    pub degree: usize,
    pub path_count: u64,
    pub path_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramSummary {
    pub n: usize,
    pub windows: u64,
    pub distinct: usize,
}

/// Settings that determine a run; recorded in `summary.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub mode: String,
    pub seed: u64,
    pub k: usize,
    pub min_support: u64,
    pub max_size: Option<usize>,
    pub fingerprint: String,
}

#[derive(Debug, Clone)]
pub struct StatsReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub directed: bool,
    pub weighted: bool,
    pub transactions: usize,
    pub source_count: usize,
    pub unreachable_pairs: u64,
    pub degree_histogram: DegreeHistogram,
    /// Absent for directed graphs.
    pub clustering_average: Option<f64>,
    pub vertex_records: Vec<VertexFrequencyRecord>,
    pub ngrams: Vec<NGramCounts>,
    pub patterns: Vec<FrequentPattern>,
    pub spearman_rho: f64,
    pub top_share: Vec<(f64, f64)>,
    pub metadata: RunMetadata,
}

impl StatsReport {
    pub fn ngram_summaries(&self) -> Vec<NGramSummary> {
        self.ngrams
            .iter()
            .map(|c| NGramSummary {
                n: c.n,
                windows: c.total(),
                distinct: c.entries.len(),
            })
            .collect()
    }

    pub fn total_path_occurrences(&self) -> u64 {
        self.vertex_records.iter().map(|r| r.path_count).sum()
    }
}

/// Ranks starting at 1, tied values sharing the mean of their positions.
pub fn average_ranks<F: Float + FromPrimitive>(values: &[F]) -> Vec<F> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut ranks = vec![F::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share rank (i + j) / 2 + 1
        let rank = F::from_usize(i + j + 2).unwrap() / F::from_u8(2).unwrap();
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties; zero when either
/// series is constant.
pub fn spearman<F: Float + FromPrimitive>(x: &[F], y: &[F]) -> F {
    assert_eq!(x.len(), y.len(), "series must have equal length");
    if x.is_empty() {
        return F::zero();
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = F::from_usize(x.len()).unwrap();
    let mx = rx.iter().fold(F::zero(), |a, &b| a + b) / n;
    let my = ry.iter().fold(F::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&a, &b) in rx.iter().zip(&ry) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == F::zero() || syy == F::zero() {
        return F::zero();
    }
    let rho = sxy / (sxx * syy).sqrt();
    rho.max(-F::one()).min(F::one())
}

fn dense_counts<W: Weight>(g: &CsrGraph<W>, freq: &BTreeMap<VertexId, u64>) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; g.vertex_count()];
    for (&v, &c) in freq {
        g.check_vertex(v)?;
        counts[v as usize] = c;
    }
    Ok(counts)
}

/// Spearman correlation between vertex degree and path count over all
/// vertices; vertices missing from `freq` count zero.
pub fn correlate_degree_frequency<W: Weight>(g: &CsrGraph<W>, freq: &BTreeMap<VertexId, u64>) -> Result<f64> {
    if g.vertex_count() == 0 {
        return Err(Error::validation("graph has no vertices"));
    }
    let counts = dense_counts(g, freq)?;
    let degrees: Vec<f64> = (0..g.vertex_count() as VertexId)
        .map(|v| g.degree_unchecked(v) as f64)
        .collect();
    let counts: Vec<f64> = counts.into_iter().map(|c| c as f64).collect();
    Ok(spearman(&degrees, &counts))
}

/// Share of all path occurrences held by the `⌈percentile% · n⌉`
/// highest-degree vertices (ties: higher path count, then lower id). Zero
/// when there are no occurrences.
pub fn top_degree_share<W: Weight>(
    g: &CsrGraph<W>,
    freq: &BTreeMap<VertexId, u64>,
    percentile: f64,
) -> Result<f64> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::validation(format!(
            "percentile {percentile} outside (0, 100]"
        )));
    }
    let counts = dense_counts(g, freq)?;
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Ok(0.0);
    }
    let n = g.vertex_count();
    let take = ((percentile / 100.0 * n as f64).ceil() as usize).min(n);
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    order.sort_unstable_by_key(|&v| {
        (
            std::cmp::Reverse(g.degree_unchecked(v)),
            std::cmp::Reverse(counts[v as usize]),
            v,
        )
    });
    let held: u64 = order[..take].iter().map(|&v| counts[v as usize]).sum();
    Ok(held as f64 / total as f64)
}

/// One record per vertex, ordered by path count descending then id.
pub fn vertex_records<W: Weight>(
    g: &CsrGraph<W>,
    freq: &BTreeMap<VertexId, u64>,
    transactions: usize,
) -> Result<Vec<VertexFrequencyRecord>> {
    let counts = dense_counts(g, freq)?;
    let mut records: Vec<VertexFrequencyRecord> = (0..g.vertex_count() as VertexId)
        .map(|v| {
            let path_count = counts[v as usize];
            VertexFrequencyRecord {
                vertex: v,
                degree: g.degree_unchecked(v),
                path_count,
                path_fraction: if transactions == 0 {
                    0.0
                } else {
                    path_count as f64 / transactions as f64
                },
            }
        })
        .collect();
    records.sort_unstable_by(|a, b| b.path_count.cmp(&a.path_count).then(a.vertex.cmp(&b.vertex)));
    Ok(records)
}

/// Six significant digits, ties rounded half to even. Plain decimal for
/// magnitudes in `[1e-4, 1e6)`, otherwise scientific (`1.23457e8`).
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            digits
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn real_value(x: f64) -> Value {
    format_real(x)
        .parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

pub fn degree_hist_csv(h: &DegreeHistogram) -> String {
    let mut out = String::from("degree,count\n");
    for (d, c) in &h.entries {
        let _ = writeln!(out, "{d},{c}");
    }
    out
}

pub fn vertex_freq_csv(records: &[VertexFrequencyRecord]) -> String {
    let mut out = String::from("vertex,degree,path_count,path_fraction\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.vertex,
            r.degree,
            r.path_count,
            format_real(r.path_fraction)
        );
    }
    out
}

pub fn parse_degree_hist_csv(input: &str) -> Result<DegreeHistogram> {
    let mut entries = BTreeMap::new();
    for (idx, line) in input.lines().enumerate().skip(1) {
        let bad = || Error::parse(idx + 1, format!("malformed degree row {line:?}"));
        let (d, c) = line.split_once(',').ok_or_else(bad)?;
        entries.insert(d.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?);
    }
    Ok(DegreeHistogram { entries })
}

pub fn parse_vertex_freq_csv(input: &str) -> Result<Vec<VertexFrequencyRecord>> {
    input
        .lines()
        .enumerate()
        .skip(1)
        .map(|(idx, line)| {
            let bad = || Error::parse(idx + 1, format!("malformed vertex row {line:?}"));
            let fields: Vec<&str> = line.split(',').collect();
            let [vertex, degree, count, fraction] = fields[..] else {
                return Err(bad());
            };
            Ok(VertexFrequencyRecord {
                vertex: vertex.parse().map_err(|_| bad())?,
                degree: degree.parse().map_err(|_| bad())?,
                path_count: count.parse().map_err(|_| bad())?,
                path_fraction: fraction.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

fn percentile_key(p: f64) -> String {
    if p.fract() == 0.0 {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

/// Every scalar of the report plus run metadata.
pub fn summary_json(report: &StatsReport) -> Value {
    let mut top_share = Map::new();
    for &(p, share) in &report.top_share {
        top_share.insert(percentile_key(p), real_value(share));
    }
    let ngrams: Vec<Value> = report
        .ngram_summaries()
        .into_iter()
        .map(|s| json!({ "n": s.n, "windows": s.windows, "distinct": s.distinct }))
        .collect();
    let m = &report.metadata;
    json!({
        "empty_run": report.transactions == 0,
        "vertex_count": report.vertex_count,
        "edge_count": report.edge_count,
        "directed": report.directed,
        "weighted": report.weighted,
        "transactions": report.transactions,
        "source_count": report.source_count,
        "unreachable_pairs": report.unreachable_pairs,
        "total_path_occurrences": report.total_path_occurrences(),
        "clustering_average": report.clustering_average.map_or(Value::Null, real_value),
        "spearman_rho": real_value(report.spearman_rho),
        "top_share": top_share,
        "ngrams": ngrams,
        "patterns": report.patterns.len(),
        "metadata": {
            "mode": m.mode,
            "seed": m.seed,
            "k": m.k,
            "min_support": m.min_support,
            "max_size": m.max_size,
            "fingerprint": m.fingerprint,
        },
    })
}

/// All report files, by file name, in the order they are written.
pub fn render_files(report: &StatsReport) -> Vec<(String, String)> {
    let mut files = vec![
        (
            "degree_hist.csv".to_string(),
            degree_hist_csv(&report.degree_histogram),
        ),
        (
            "vertex_freq.csv".to_string(),
            vertex_freq_csv(&report.vertex_records),
        ),
    ];
    for counts in &report.ngrams {
        files.push((format!("ngram_{}.csv", counts.n), ngram_csv(counts)));
    }
    files.push(("patterns.csv".to_string(), patterns_csv(&report.patterns)));
    let mut summary = serde_json::to_string_pretty(&summary_json(report)).expect("json value serializes");
    summary.push('\n');
    files.push(("summary.json".to_string(), summary));
    files
}

/// Writes `files` into `dir`. On failure every file written by this call is
/// removed again and the error names the offending path.
pub fn write_files(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, contents) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            return Err(Error::io(path, e));
        }
        written.push(path);
    }
    Ok(written)
}

/// Emits `degree_hist.csv`, `vertex_freq.csv`, `ngram_<n>.csv`,
/// `patterns.csv` and `summary.json`.
pub fn write_report(report: &StatsReport, dir: &Path) -> Result<Vec<PathBuf>> {
    write_files(dir, &render_files(report))
}
