use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pathfreq_core::error::Error;
use pathfreq_core::fpgrowth::patterns_csv;
use pathfreq_core::graph::{clustering, degree_histogram, ClusteringStats};
use pathfreq_core::pipeline::{self, MinSupport, Mode, RunConfig, Stage, StageError, TRANSACTIONS_FILE};
use pathfreq_core::report::{degree_hist_csv, format_real, write_files};
use pathfreq_core::transactions::ngram_csv;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pathfreq",
    version,
    about = "Shortest-path occupancy analysis for social graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: paths, mining, report files and DOT export.
    Run(Common),
    /// Parse and validate the edge list, print its fingerprint.
    Ingest(Common),
    /// Compute shortest paths and write the transaction file.
    Paths(Common),
    /// Mine n-grams and frequent patterns from a transaction file.
    Mine(WithTransactions),
    /// Graph-only properties: degree histogram and clustering.
    Stats(Common),
    /// Join graph and transaction file into the full report.
    Report(WithTransactions),
    /// Write the graph as DOT, highlighting traversed edges when a
    /// transaction file is present.
    ExportDot(WithTransactions),
}

#[derive(Args, Clone)]
struct Common {
    /// Edge list: `u v` or `u v w` per line, `#` comments.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    weighted: bool,
    /// exhaustive | sample
    #[arg(long, default_value = "sample")]
    mode: String,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Absolute count (e.g. 25) or fraction of transactions (e.g. 0.01).
    #[arg(long, default_value = "0.01")]
    min_support: String,
    /// Largest itemset to mine, or `unbounded`.
    #[arg(long, default_value = "3")]
    max_size: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    ngrams: Vec<usize>,
    #[arg(long, env = "PATHFREQ_OUT", default_value = "pathfreq-out")]
    out: PathBuf,
    /// Vertex cap for the DOT export.
    #[arg(long, default_value_t = 200)]
    dot_cap: usize,
    /// Traversal worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct WithTransactions {
    #[command(flatten)]
    common: Common,
    /// Transaction file; defaults to `<out>/transactions.txt`.
    #[arg(long)]
    transactions: Option<PathBuf>,
}

impl WithTransactions {
    fn transactions_path(&self) -> PathBuf {
        self.transactions
            .clone()
            .unwrap_or_else(|| self.common.out.join(TRANSACTIONS_FILE))
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig, StageError> {
        let at_config = |source| StageError {
            stage: Stage::Config,
            source,
        };
        let max_size = match self.max_size.as_str() {
            "unbounded" => None,
            s => Some(s.parse::<usize>().ok().filter(|&m| m >= 1).ok_or_else(|| {
                at_config(Error::Validation(format!(
                    "--max-size must be a positive integer or `unbounded`, got {s:?}"
                )))
            })?),
        };
        let config = RunConfig {
            input: self.input.clone(),
            directed: self.directed,
            weighted: self.weighted,
            mode: self.mode.parse::<Mode>().map_err(at_config)?,
            k: self.k,
            seed: self.seed,
            min_support: self.min_support.parse::<MinSupport>().map_err(at_config)?,
            max_size,
            ngrams: self.ngrams.clone(),
            out: self.out.clone(),
            dot_cap: self.dot_cap,
            threads: self.threads,
        };
        config.validate().map_err(at_config)?;
        Ok(config)
    }
}

fn exit_code(err: &StageError) -> u8 {
    match (err.stage, &err.source) {
        (Stage::Ingest, _) => EXIT_PARSE,
        (Stage::Config, _) | (_, Error::Validation(_)) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn report_stage(stage: Stage) -> impl Fn(Error) -> StageError {
    move |source| StageError { stage, source }
}

fn execute(command: Command) -> Result<(), StageError> {
    match command {
        Command::Run(common) => {
            let config = common.config()?;
            let summary = pipeline::run(&config)?;
            print!("{}", summary.render());
            println!("wrote {} files to {}", summary.files.len(), config.out.display());
        }
        Command::Ingest(common) => {
            let config = common.config()?;
            let g = pipeline::load_graph(&config)?;
            println!(
                "{}: {} vertices, {} edges, fingerprint {}",
                config.input.display(),
                g.vertex_count(),
                g.edge_count(),
                g.fingerprint()
            );
        }
        Command::Paths(common) => {
            let config = common.config()?;
            let g = pipeline::load_graph(&config)?;
            let db = pipeline::compute_paths(&g, &config)?;
            let path = pipeline::write_transactions(&db, &config.out)?;
            println!(
                "{} transactions from {} sources ({} unreachable pairs) -> {}",
                db.len(),
                db.source_count,
                db.unreachable_pairs,
                path.display()
            );
        }
        Command::Mine(args) => {
            let config = args.common.config()?;
            let g = pipeline::load_graph(&config)?;
            let db = pipeline::load_transactions(&args.transactions_path(), &g)?;
            let (ngrams, patterns, min_support) = pipeline::mine_db(&db, &config)?;
            let mut files: Vec<(String, String)> = ngrams
                .iter()
                .map(|c| (format!("ngram_{}.csv", c.n), ngram_csv(c)))
                .collect();
            files.push(("patterns.csv".to_string(), patterns_csv(&patterns)));
            write_files(&config.out, &files).map_err(report_stage(Stage::Mining))?;
            println!(
                "{} frequent patterns at min support {min_support}; n-gram files for n = {:?}",
                patterns.len(),
                config.ngrams
            );
        }
        Command::Stats(common) => {
            let config = common.config()?;
            let g = pipeline::load_graph(&config)?;
            let hist = degree_histogram(&g);
            write_files(
                &config.out,
                &[("degree_hist.csv".to_string(), degree_hist_csv(&hist))],
            )
            .map_err(report_stage(Stage::Report))?;
            println!("{} vertices, {} edges", g.vertex_count(), g.edge_count());
            if let (Some((&min, _)), Some((&max, _))) =
                (hist.entries.first_key_value(), hist.entries.last_key_value())
            {
                println!(
                    "degree range {min}..={max}, {} distinct degrees",
                    hist.entries.len()
                );
            }
            if !g.is_directed() {
                let c: ClusteringStats<f64> = clustering(&g).map_err(report_stage(Stage::Report))?;
                println!("average clustering coefficient {}", format_real(c.average));
            }
        }
        Command::Report(args) => {
            let config = args.common.config()?;
            let g = pipeline::load_graph(&config)?;
            let db = pipeline::load_transactions(&args.transactions_path(), &g)?;
            let report = pipeline::build_report(&g, &db, &config)?;
            let files = pathfreq_core::report::write_report(&report, &config.out)
                .map_err(report_stage(Stage::Report))?;
            let summary = pipeline::RunSummary { report, files };
            print!("{}", summary.render());
        }
        Command::ExportDot(args) => {
            let config = args.common.config()?;
            let g = pipeline::load_graph(&config)?;
            let tx_path = args.transactions_path();
            let db = if args.transactions.is_some() || Path::new(&tx_path).exists() {
                Some(pipeline::load_transactions(&tx_path, &g)?)
            } else {
                None
            };
            let path = pipeline::write_dot(&g, db.as_ref(), &config)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
