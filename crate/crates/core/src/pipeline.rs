//! End-to-end run: load, traverse, mine, report.
//!
//! Each stage is exposed separately so the command-line front end can chain
//! them through intermediate files; [`run`] chains them in memory and writes
//! the same files.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fpgrowth::{build_fptree, mine, FrequentPattern};
use crate::graph::{
    clustering, degree_histogram, export_dot, parse_edge_list, ClusteringStats, ParseOptions,
};
use crate::report::{
    correlate_degree_frequency, top_degree_share, vertex_records, write_files, RunMetadata, StatsReport,
    DEFAULT_PERCENTILES,
};
use crate::transactions::{
    count_ngrams, parse_db_for, serialize_db, vertex_frequency, NGramCounts, TransactionDb,
};
use crate::traversal::{run_traversals, sample_sources};
use crate::{Graph, VertexId};

pub const TRANSACTIONS_FILE: &str = "transactions.txt";
pub const DOT_FILE: &str = "paths.dot";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every vertex is a source.
    Exhaustive,
    /// `k` sources drawn with a seeded generator.
    Sample,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Sample => "sample",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sample" => Ok(Mode::Sample),
            _ => Err(Error::validation(format!(
                "unknown mode {s:?} (exhaustive|sample)"
            ))),
        }
    }
}

/// Support threshold: an absolute transaction count, or a fraction of the
/// database size rounded up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinSupport {
    Absolute(u64),
    Fraction(f64),
}

impl MinSupport {
    /// Absolute threshold for a database of `transactions` entries; never
    /// below one.
    pub fn resolve(self, transactions: usize) -> u64 {
        match self {
            MinSupport::Absolute(n) => n,
            MinSupport::Fraction(f) => ((f * transactions as f64).ceil() as u64).max(1),
        }
    }
}

impl FromStr for MinSupport {
    type Err = Error;

    /// Integers are absolute counts (≥ 1); anything else must be a fraction
    /// in `(0, 1]`.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(n) = s.parse::<u64>() {
            return if n >= 1 {
                Ok(MinSupport::Absolute(n))
            } else {
                Err(Error::validation("absolute min support must be at least 1"))
            };
        }
        match s.parse::<f64>() {
            Ok(f) if f > 0.0 && f <= 1.0 => Ok(MinSupport::Fraction(f)),
            _ => Err(Error::validation(format!(
                "min support {s:?} is neither a count ≥ 1 nor a fraction in (0, 1]"
            ))),
        }
    }
}

impl fmt::Display for MinSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinSupport::Absolute(n) => write!(f, "{n}"),
            MinSupport::Fraction(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub directed: bool,
    pub weighted: bool,
    pub mode: Mode,
    pub k: usize,
    pub seed: u64,
    pub min_support: MinSupport,
    /// `None` mines without a size bound.
    pub max_size: Option<usize>,
    pub ngrams: Vec<usize>,
    pub out: PathBuf,
    pub dot_cap: usize,
    /// Worker threads for traversal; `None` uses the rayon default. Output
    /// does not depend on it.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            directed: false,
            weighted: false,
            mode: Mode::Sample,
            k: 100,
            seed: 42,
            min_support: MinSupport::Fraction(0.01),
            max_size: Some(3),
            ngrams: vec![1, 2, 3],
            out: PathBuf::from("pathfreq-out"),
            dot_cap: 200,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mode == Mode::Sample && self.k == 0 {
            return Err(Error::validation("sample mode requires k ≥ 1"));
        }
        if let MinSupport::Fraction(f) = self.min_support {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::validation("fractional min support must lie in (0, 1]"));
            }
        }
        if self.ngrams.contains(&0) {
            return Err(Error::validation("n-gram sizes must be ≥ 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::validation("thread count must be ≥ 1"));
        }
        Ok(())
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            directed: self.directed,
            weighted: self.weighted,
        }
    }

    fn canonical_ngrams(&self) -> bool {
        !self.directed
    }
}

/// Pipeline stage, used to attribute errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Traversal,
    Mining,
    Report,
    Export,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Traversal => "traversal",
            Stage::Mining => "mining",
            Stage::Report => "report",
            Stage::Export => "export",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub type StageResult<T> = std::result::Result<T, StageError>;

trait AtStage<T> {
    fn at(self, stage: Stage) -> StageResult<T>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|source| StageError { stage, source })
    }
}

pub fn load_graph(config: &RunConfig) -> StageResult<Graph> {
    let file = File::open(&config.input)
        .map_err(|e| Error::io(&config.input, e))
        .at(Stage::Ingest)?;
    parse_edge_list(BufReader::new(file), config.parse_options()).at(Stage::Ingest)
}

pub fn select_sources(g: &Graph, config: &RunConfig) -> Result<Vec<VertexId>> {
    match config.mode {
        Mode::Exhaustive => Ok((0..g.vertex_count() as VertexId).collect()),
        Mode::Sample => Ok(sample_sources(g, config.k, config.seed)?.sources),
    }
}

/// Selects sources and collects every shortest path from them, on a
/// dedicated pool when a thread count is configured.
pub fn compute_paths(g: &Graph, config: &RunConfig) -> StageResult<TransactionDb> {
    config.validate().at(Stage::Config)?;
    let sources = select_sources(g, config).at(Stage::Config)?;
    match config.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::validation(format!("thread pool: {e}")))
                .at(Stage::Config)?;
            pool.install(|| run_traversals(g, &sources)).at(Stage::Traversal)
        }
        None => run_traversals(g, &sources).at(Stage::Traversal),
    }
}

pub fn load_transactions(path: &Path, g: &Graph) -> StageResult<TransactionDb> {
    let file = File::open(path)
        .map_err(|e| Error::io(path, e))
        .at(Stage::Ingest)?;
    parse_db_for(BufReader::new(file), &g.fingerprint()).at(Stage::Ingest)
}

/// n-gram counts for every configured size, and frequent patterns.
pub fn mine_db(
    db: &TransactionDb,
    config: &RunConfig,
) -> StageResult<(Vec<NGramCounts>, Vec<FrequentPattern>, u64)> {
    let ngrams = config
        .ngrams
        .iter()
        .map(|&n| count_ngrams(db, n, config.canonical_ngrams()))
        .collect::<Result<Vec<_>>>()
        .at(Stage::Mining)?;
    let min_support = config.min_support.resolve(db.len());
    let tree = build_fptree(db, min_support).at(Stage::Mining)?;
    let patterns = mine(&tree, min_support, config.max_size).at(Stage::Mining)?;
    Ok((ngrams, patterns, min_support))
}

pub fn build_report(g: &Graph, db: &TransactionDb, config: &RunConfig) -> StageResult<StatsReport> {
    let (ngrams, patterns, min_support) = mine_db(db, config)?;
    let freq = vertex_frequency(db);
    let clustering_average = if g.is_directed() {
        None
    } else {
        let stats: ClusteringStats<f64> = clustering(g).at(Stage::Report)?;
        Some(stats.average)
    };
    let spearman_rho = correlate_degree_frequency(g, &freq).at(Stage::Report)?;
    let top_share = DEFAULT_PERCENTILES
        .iter()
        .map(|&p| top_degree_share(g, &freq, p).map(|s| (p, s)))
        .collect::<Result<Vec<_>>>()
        .at(Stage::Report)?;
    let k = match config.mode {
        Mode::Exhaustive => g.vertex_count(),
        Mode::Sample => config.k,
    };
    Ok(StatsReport {
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        directed: g.is_directed(),
        weighted: g.is_weighted(),
        transactions: db.len(),
        source_count: db.source_count,
        unreachable_pairs: db.unreachable_pairs,
        degree_histogram: degree_histogram(g),
        clustering_average,
        vertex_records: vertex_records(g, &freq, db.len()).at(Stage::Report)?,
        ngrams,
        patterns,
        spearman_rho,
        top_share,
        metadata: RunMetadata {
            mode: config.mode.to_string(),
            seed: config.seed,
            k,
            min_support,
            max_size: config.max_size,
            fingerprint: g.fingerprint(),
        },
    })
}

/// Edges used by at least one transaction, as ordered pairs.
pub fn traversed_edges(db: &TransactionDb) -> HashSet<(VertexId, VertexId)> {
    db.iter()
        .flat_map(|t| t.windows(2).map(|w| (w[0], w[1])))
        .collect()
}

/// DOT of the graph with traversed edges highlighted.
pub fn render_dot(g: &Graph, db: Option<&TransactionDb>, dot_cap: usize) -> String {
    let highlight = db.map(traversed_edges);
    export_dot(g, highlight.as_ref(), dot_cap)
}

pub fn write_transactions(db: &TransactionDb, dir: &Path) -> StageResult<PathBuf> {
    let mut written =
        write_files(dir, &[(TRANSACTIONS_FILE.to_string(), serialize_db(db))]).at(Stage::Traversal)?;
    Ok(written.remove(0))
}

pub fn write_dot(g: &Graph, db: Option<&TransactionDb>, config: &RunConfig) -> StageResult<PathBuf> {
    let dot = render_dot(g, db, config.dot_cap);
    let mut written = write_files(&config.out, &[(DOT_FILE.to_string(), dot)]).at(Stage::Export)?;
    Ok(written.remove(0))
}

/// Outcome of a full run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: StatsReport,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    /// Short human-readable digest of the run.
    pub fn render(&self) -> String {
        use crate::report::format_real;
        use std::fmt::Write as _;
        let r = &self.report;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "graph: {} vertices, {} edges ({}{})",
            r.vertex_count,
            r.edge_count,
            if r.directed { "directed" } else { "undirected" },
            if r.weighted { ", weighted" } else { "" }
        );
        let _ = writeln!(
            s,
            "sources: {} ({} mode, seed {}), transactions: {}, unreachable pairs: {}",
            r.source_count, r.metadata.mode, r.metadata.seed, r.transactions, r.unreachable_pairs
        );
        if let Some(c) = r.clustering_average {
            let _ = writeln!(s, "average clustering: {}", format_real(c));
        }
        let _ = writeln!(
            s,
            "spearman rho (degree vs path count): {}",
            format_real(r.spearman_rho)
        );
        for &(p, share) in &r.top_share {
            let _ = writeln!(
                s,
                "top {p}% by degree hold {} of path occurrences",
                format_real(share)
            );
        }
        for ng in r.ngram_summaries() {
            let _ = writeln!(
                s,
                "{}-grams: {} windows, {} distinct",
                ng.n, ng.windows, ng.distinct
            );
        }
        let _ = writeln!(
            s,
            "frequent patterns: {} (min support {})",
            r.patterns.len(),
            r.metadata.min_support
        );
        let _ = writeln!(s, "top vertices by path count:");
        for rec in r.vertex_records.iter().take(5) {
            let _ = writeln!(
                s,
                "  {} (degree {}): {} paths ({})",
                rec.vertex,
                rec.degree,
                rec.path_count,
                format_real(rec.path_fraction)
            );
        }
        s
    }
}

/// Full pipeline. Writes the transaction file, every report file and the
/// DOT export into `config.out`.
pub fn run(config: &RunConfig) -> StageResult<RunSummary> {
    config.validate().at(Stage::Config)?;
    let g = load_graph(config)?;
    let db = compute_paths(&g, config)?;
    let mut files = vec![write_transactions(&db, &config.out)?];
    let report = build_report(&g, &db, config)?;
    files.extend(crate::report::write_report(&report, &config.out).at(Stage::Report)?);
    files.push(write_dot(&g, Some(&db), config)?);
    Ok(RunSummary { report, files })
}
