use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use genderlex_core::lexicon::{DictFormat, ThresholdPolicy};
use genderlex_core::report::ReportFormat;
use genderlex_core::{AvaMode, Partition};

use crate::inputs::CorpusFormat;

#[derive(Debug, Parser)]
#[command(
    name = "genderlex",
    version,
    about = "Audit conversational corpora for gendered and masculine-as-norm language"
)]
pub struct Cli {
    /// TOML configuration file; flags override its values
    #[arg(long, global = true, env = "GENDERLEX_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse corpus files and summarize utterances per partition
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Token and vocabulary counts under a pipeline profile
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// gendered_language, pronouns, marked_words or names
        #[arg(long, default_value = "gendered_language")]
        profile: String,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Match dictionaries against a corpus and tabulate frequencies
    Audit(AuditArgs),
    /// Chi-square tests on counts
    Chi2 {
        #[command(subcommand)]
        test: Chi2Command,
    },
    /// List candidate ambiguous terms from gendered-language audits
    AvaExtract {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        dict: DictArgs,
        #[command(flatten)]
        sampling: SampleArgs,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Remove or flag AVA terms in dictionaries and write the result as entries JSONL
    AvaApply {
        #[command(flatten)]
        dict: DictArgs,
        /// AVA JSONL file, or `shipped` for the bundled list
        #[arg(long, default_value = "shipped")]
        ava: String,
        #[arg(long, default_value = "remove")]
        mode: AvaMode,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Serve the annotation API for AVA rating sessions
    AnnotateServe(ServeArgs),
    /// Render a saved JSON audit report as markdown, CSV or JSON
    Report {
        /// Audit report written by `audit --report-format json`
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long = "format")]
        format: Option<ReportFormat>,
        #[arg(long, value_name = "FILE", conflicts_with = "out_dir")]
        out: Option<PathBuf>,
        /// Write <corpus>_<dictionary>_<profile>.<ext> into this directory
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CorpusArgs {
    /// Corpus file as [NAME=]PATH; files sharing a name are concatenated
    #[arg(long = "corpus", value_name = "[NAME=]PATH")]
    pub corpus: Vec<String>,
    /// Corpus file format; detected from the first record when omitted
    #[arg(long = "format")]
    pub format: Option<CorpusFormat>,
    /// Partition for ReDial files; inferred from the file name when omitted
    #[arg(long)]
    pub partition: Option<Partition>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DictArgs {
    /// Dictionary file; repeat to merge several
    #[arg(long = "dict", value_name = "FILE")]
    pub dict: Vec<PathBuf>,
    /// Format for every --dict; inferred from the extension when omitted
    #[arg(long)]
    pub dict_format: Option<DictFormat>,
    /// Cut-offs for scored lists: loose or conservative
    #[arg(long)]
    pub threshold: Option<ThresholdPolicy>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Sample lines per corpus for each candidate
    #[arg(long, default_value_t = genderlex_core::annotate::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Context tokens either side of a sample keyword
    #[arg(long, default_value_t = genderlex_core::annotate::DEFAULT_WINDOW)]
    pub window: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub dict: DictArgs,
    /// Pipeline profile; defaults to the preset for the dictionary's category
    #[arg(long)]
    pub profile: Option<String>,
    /// AVA JSONL file, or `shipped` for the bundled list
    #[arg(long)]
    pub ava: Option<String>,
    #[arg(long)]
    pub ava_mode: Option<AvaMode>,
    /// Tokens never counted; names audits exclude alexa, siri and olly by default
    #[arg(long, value_delimiter = ',', conflicts_with = "no_exclusions")]
    pub exclude: Vec<String>,
    /// Disable the default exclusions
    #[arg(long)]
    pub no_exclusions: bool,
    #[arg(long)]
    pub report_format: Option<ReportFormat>,
    #[arg(long, value_name = "FILE", conflicts_with = "out_dir")]
    pub out: Option<PathBuf>,
    /// Write <corpus>_<dictionary>_<profile>.<ext> into this directory
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Write every match as JSONL
    #[arg(long, value_name = "FILE")]
    pub matches: Option<PathBuf>,
    /// Write the top terms table, in the report format
    #[arg(long, value_name = "FILE")]
    pub top_out: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub top: usize,
}

#[derive(Debug, Subcommand)]
pub enum Chi2Command {
    /// Goodness of fit against uniform or given proportions
    Gof {
        #[arg(required = true, num_args = 2..)]
        counts: Vec<u64>,
        /// Comma-separated expected proportions summing to 1
        #[arg(long, value_delimiter = ',')]
        expected: Vec<f64>,
        #[command(flatten)]
        output: Chi2Output,
    },
    /// 2x2 independence on a b c d (rows [a b], [c d])
    Ind {
        #[arg(num_args = 4, required = true, value_names = ["A", "B", "C", "D"])]
        cells: Vec<u64>,
        /// Apply the continuity correction (default)
        #[arg(long, overrides_with = "no_yates")]
        yates: bool,
        #[arg(long, overrides_with = "yates")]
        no_yates: bool,
        #[command(flatten)]
        output: Chi2Output,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Chi2Output {
    /// text prints `statistic df p`; markdown, csv and json print a table
    #[arg(long = "format", default_value = "text")]
    pub format: String,
    #[arg(long, default_value = "chi2")]
    pub label: String,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub dict: DictArgs,
    #[arg(long)]
    pub profile: Option<String>,
    #[command(flatten)]
    pub sampling: SampleArgs,
    #[arg(long)]
    pub bind: Option<String>,
    #[arg(long)]
    pub port: Option<u16>,
    /// Allow binding a non-loopback address
    #[arg(long)]
    pub unsafe_bind: bool,
    /// Directory of session journals, replayed at startup
    #[arg(long, value_name = "DIR")]
    pub journal_dir: Option<PathBuf>,
}
