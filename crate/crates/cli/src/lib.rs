//! Command-line driver: ingest, segment and filter, label, score optimism,
//! and run the market study, backtest, evaluation, ablation and benchmark.

pub mod bench;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

use std::path::PathBuf;

use claimforge_core::corpus::DocumentFormat;
use claimforge_core::market::Outcome;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{BacktestArgs, GoldSource, MarketInputs, PipelineArgs, StudyArgs};
use crate::config::EngineConfig;
use crate::error::CliError;
use crate::output::OutDir;

#[derive(Debug, Parser)]
#[command(
    name = "claimforge",
    version,
    about = "Numerical claim detection and optimism analytics for financial text"
)]
pub struct Cli {
    /// TOML engine configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory receiving all reports.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Jsonl,
    Dir,
}

impl From<Format> for DocumentFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Jsonl => DocumentFormat::Jsonl,
            Format::Dir => DocumentFormat::PlaintextDir,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutcomeArg {
    Surprise,
    #[value(name = "car_2_30")]
    Car2_30,
    #[value(name = "car_2_60")]
    Car2_60,
}

impl From<OutcomeArg> for Outcome {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::Surprise => Outcome::Surprise,
            OutcomeArg::Car2_30 => Outcome::Car2_30,
            OutcomeArg::Car2_60 => Outcome::Car2_60,
        }
    }
}

#[derive(Debug, Args)]
pub struct DocsArg {
    /// Documents as JSONL, or a directory of TICKER_YYYY-MM-DD.txt files with --format dir.
    #[arg(long)]
    pub documents: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: Format,
}

#[derive(Debug, Args, Default)]
pub struct MarketArgs {
    /// eps.csv, for the earnings-surprise outcome.
    #[arg(long)]
    pub eps: Option<PathBuf>,
    /// prices.csv, for CAR outcomes.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// index.csv benchmark closes, for CAR outcomes.
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// events.csv written by the pipeline, for CAR outcomes.
    #[arg(long)]
    pub events: Option<PathBuf>,
}

impl From<MarketArgs> for MarketInputs {
    fn from(m: MarketArgs) -> Self {
        MarketInputs {
            eps: m.eps,
            prices: m.prices,
            index: m.index,
            events: m.events,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment, filter, label, score sentiment and optimism in one pass.
    Pipeline {
        #[command(flatten)]
        docs: DocsArg,
        /// Externally produced sentence sentiment (doc_id,sentence_index,label).
        #[arg(long)]
        sentiment: Option<PathBuf>,
        /// Treat in-claim sentences missing from --sentiment as neutral.
        #[arg(long)]
        default_neutral: bool,
    },
    /// Split documents into sentences.
    Segment {
        #[command(flatten)]
        docs: DocsArg,
    },
    /// Keep numeric, financially relevant sentences.
    Filter {
        #[command(flatten)]
        docs: DocsArg,
    },
    /// Label filtered sentences as in-claim or out-of-claim.
    Label {
        #[command(flatten)]
        docs: DocsArg,
    },
    /// Document and firm-quarter optimism from labeled sentences.
    Optimism {
        #[command(flatten)]
        docs: DocsArg,
        /// sentences.jsonl from `label` or `pipeline`.
        #[arg(long)]
        sentences: PathBuf,
        #[arg(long)]
        sentiment: Option<PathBuf>,
        #[arg(long)]
        default_neutral: bool,
    },
    /// Precision, recall and F1 against gold labels.
    Evaluate {
        /// predictions.jsonl from `label` or `pipeline`.
        #[arg(long, requires = "gold")]
        predictions: Option<PathBuf>,
        /// gold.csv (doc_id,sentence_index,label).
        #[arg(long, requires = "predictions")]
        gold: Option<PathBuf>,
        /// LABEL<TAB>sentence file; labeled with both aggregators.
        #[arg(long, conflicts_with_all = ["predictions", "gold"])]
        gold_sentences: Option<PathBuf>,
    },
    /// Greedy forward selection over the in-claim rules.
    Ablate {
        #[arg(long)]
        gold_sentences: Option<PathBuf>,
        #[arg(long, requires = "gold")]
        documents: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        #[arg(long, requires = "documents")]
        gold: Option<PathBuf>,
    },
    /// Regress earnings surprise and CAR on optimism.
    Study {
        /// Firm-quarter optimism.csv.
        #[arg(long)]
        optimism: PathBuf,
        #[command(flatten)]
        market: MarketArgs,
        /// subset_optimism.csv from the pipeline.
        #[arg(long)]
        subset_optimism: Option<PathBuf>,
        /// subset_sizes.csv from the pipeline.
        #[arg(long)]
        subset_sizes: Option<PathBuf>,
    },
    /// Short above-mean optimism, buy below-mean optimism.
    Backtest {
        #[arg(long)]
        optimism: Option<PathBuf>,
        /// key,outcome table; overrides the market inputs.
        #[arg(long)]
        outcomes: Option<PathBuf>,
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, value_enum, default_value = "car_2_60")]
        outcome: OutcomeArg,
        /// Training quarters, e.g. 2017Q1..2018Q4 or 2017Q1,2017Q2.
        #[arg(long)]
        train: Option<String>,
        /// Test quarters, disjoint from the training quarters.
        #[arg(long)]
        test: Option<String>,
        /// Generate a universe with a known success rate instead of reading inputs.
        #[arg(long)]
        synthetic: bool,
        #[arg(long, default_value_t = 500)]
        firms: usize,
        #[arg(long, default_value_t = 8)]
        train_quarters: usize,
        #[arg(long, default_value_t = 20)]
        test_quarters: usize,
        /// Probability that a synthetic outcome goes against the signal.
        #[arg(long, default_value_t = 0.19)]
        flip_prob: f64,
    },
    /// Time single-threaded labeling throughput.
    Bench {
        #[arg(long, conflicts_with = "synthetic")]
        documents: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        /// Generate a corpus with this many sentences.
        #[arg(long)]
        synthetic: Option<usize>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::defaults(),
    };
    let engine = config.build()?;
    let mut out = OutDir::create(&cli.out)?;
    match cli.command {
        Command::Pipeline {
            docs,
            sentiment,
            default_neutral,
        } => commands::cmd_pipeline(
            &engine,
            PipelineArgs {
                documents: &docs.documents,
                format: docs.format.into(),
                sentiment: sentiment.as_deref(),
                default_neutral,
            },
            &mut out,
        ),
        Command::Segment { docs } => commands::cmd_segment(&engine, &docs.documents, docs.format.into(), &mut out),
        Command::Filter { docs } => commands::cmd_filter(&engine, &docs.documents, docs.format.into(), &mut out),
        Command::Label { docs } => commands::cmd_label(&engine, &docs.documents, docs.format.into(), &mut out),
        Command::Optimism {
            docs,
            sentences,
            sentiment,
            default_neutral,
        } => commands::cmd_optimism(
            &engine,
            &docs.documents,
            docs.format.into(),
            &sentences,
            sentiment.as_deref(),
            default_neutral,
            &mut out,
        ),
        Command::Evaluate {
            predictions,
            gold,
            gold_sentences,
        } => commands::cmd_evaluate(
            &engine,
            predictions.as_deref(),
            gold.as_deref(),
            gold_sentences.as_deref(),
            &mut out,
        ),
        Command::Ablate {
            gold_sentences,
            documents,
            format,
            gold,
        } => commands::cmd_ablate(
            &engine,
            GoldSource {
                gold_sentences: gold_sentences.as_deref(),
                documents: documents.as_deref(),
                format: format.into(),
                gold: gold.as_deref(),
            },
            &mut out,
        ),
        Command::Study {
            optimism,
            market,
            subset_optimism,
            subset_sizes,
        } => commands::cmd_study(
            StudyArgs {
                optimism: &optimism,
                market: market.into(),
                subset_optimism: subset_optimism.as_deref(),
                subset_sizes: subset_sizes.as_deref(),
            },
            &mut out,
        ),
        Command::Backtest {
            optimism,
            outcomes,
            market,
            outcome,
            train,
            test,
            synthetic,
            firms,
            train_quarters,
            test_quarters,
            flip_prob,
        } => commands::cmd_backtest(
            &engine,
            BacktestArgs {
                optimism: optimism.as_deref(),
                outcomes: outcomes.as_deref(),
                market: market.into(),
                outcome: outcome.into(),
                train: train.as_deref(),
                test: test.as_deref(),
                synthetic,
                firms,
                train_quarters,
                test_quarters,
                flip_prob,
            },
            &mut out,
        ),
        Command::Bench {
            documents,
            format,
            synthetic,
            repetitions,
        } => commands::cmd_bench(
            &engine,
            documents.as_deref(),
            format.into(),
            synthetic,
            repetitions,
            &mut out,
        )
        .map(|_| ()),
    }
}

/// Parses `args`, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
