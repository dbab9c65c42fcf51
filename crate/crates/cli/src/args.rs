use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nbr_core::config::{Provider, RunConfig};
use nbr_core::embed::{Normalization, EMBED_URL_ENV};
use nbr_core::report::Format;
use nbr_core::retrieval::TaskId;

#[derive(Debug, Parser)]
#[command(name = "nbr", version, about = "Textual-neighbor generation and alternative-self retrieval evaluation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and print its statistics
    Ingest(IngestArgs),
    /// Write the neighbor variants of every document
    Perturb(PerturbArgs),
    /// Embed a variants file into a vector store
    Embed(EmbedArgs),
    /// Evaluate a store and write the report
    Eval(EvalArgs),
    /// Render one or more reports as json, csv or plot data
    Report(ReportArgs),
    /// Run perturb, embed, eval and report in one go
    All(AllArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for data-parallel stages
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CorpusOpts {
    /// Corpus file, one {"id","title","abstract"} object per line
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Dataset label used in reports (defaults to the corpus file stem)
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Args)]
pub struct SelectionOpts {
    /// `all`, a category such as LO-DS, or a comma list of codes
    #[arg(long)]
    pub codes: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LinguisticOpts {
    /// Pre-tagged documents (JSONL) used ahead of the tagger
    #[arg(long)]
    pub tags: Option<PathBuf>,
    /// Tagger model file replacing the bundled one
    #[arg(long)]
    pub tagger: Option<PathBuf>,
    /// Antonym lexicon (TSV) replacing the bundled starter list
    #[arg(long)]
    pub antonyms: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProviderOpts {
    #[arg(long)]
    pub provider: Option<Provider>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, env = EMBED_URL_ENV)]
    pub embed_url: Option<String>,
    /// Dimension of the hash embedder
    #[arg(long)]
    pub hash_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalOpts {
    #[arg(long)]
    pub norm: Option<Normalization>,
    /// Tasks to run: task1, task2, nn_ret, aop
    #[arg(long = "task", value_delimiter = ',')]
    pub tasks: Vec<TaskId>,
    /// Query sample size for Task I and Task II
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long)]
    pub aop_sample: Option<usize>,
    /// k values for NNk_Ret
    #[arg(long = "k", value_delimiter = ',')]
    pub nn_k: Vec<usize>,
    /// k values for AOP
    #[arg(long, value_delimiter = ',')]
    pub aop_k: Vec<usize>,
    /// Cap on sampled pairs for pairwise similarity statistics
    #[arg(long)]
    pub pair_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub corpus: CorpusOpts,
    /// Write the statistics here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[command(flatten)]
    pub corpus: CorpusOpts,
    #[command(flatten)]
    pub selection: SelectionOpts,
    #[command(flatten)]
    pub linguistic: LinguisticOpts,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Variants file written by `perturb`
    #[arg(long)]
    pub variants: Option<PathBuf>,
    #[command(flatten)]
    pub provider: ProviderOpts,
    /// Existing store, for the file provider
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Store path; `.jsonl` selects JSONL, anything else the binary format
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub corpus: CorpusOpts,
    #[command(flatten)]
    pub selection: SelectionOpts,
    #[command(flatten)]
    pub eval: EvalOpts,
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    /// Report path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report files written by `eval`
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "json")]
    pub format: Vec<Format>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AllArgs {
    #[command(flatten)]
    pub corpus: CorpusOpts,
    #[command(flatten)]
    pub selection: SelectionOpts,
    #[command(flatten)]
    pub linguistic: LinguisticOpts,
    #[command(flatten)]
    pub provider: ProviderOpts,
    #[command(flatten)]
    pub eval: EvalOpts,
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "json,csv")]
    pub format: Vec<Format>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

impl CorpusOpts {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(p) = path_string(&self.corpus) {
            c.corpus = Some(p);
        }
        if let Some(d) = &self.dataset {
            c.dataset = Some(d.clone());
        }
    }
}

impl SelectionOpts {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(codes) = &self.codes {
            c.codes = codes.clone();
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
    }
}

impl LinguisticOpts {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(p) = path_string(&self.tags) {
            c.tags = Some(p);
        }
        if let Some(p) = path_string(&self.tagger) {
            c.tagger = Some(p);
        }
        if let Some(p) = path_string(&self.antonyms) {
            c.antonyms = Some(p);
        }
    }
}

impl ProviderOpts {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(p) = self.provider {
            c.provider = p;
        }
        if let Some(m) = &self.model {
            c.model = Some(m.clone());
        }
        if let Some(u) = &self.embed_url {
            c.embed_url = Some(u.clone());
        }
        if let Some(d) = self.hash_dim {
            c.hash_dimension = d;
        }
    }
}

impl EvalOpts {
    pub fn apply(&self, c: &mut RunConfig) {
        if let Some(n) = self.norm {
            c.normalization = n;
        }
        if !self.tasks.is_empty() {
            c.tasks = self.tasks.clone();
        }
        if let Some(s) = self.sample {
            c.task_sample = s;
        }
        if let Some(s) = self.aop_sample {
            c.aop_sample = s;
        }
        if !self.nn_k.is_empty() {
            c.nn_k = self.nn_k.clone();
        }
        if !self.aop_k.is_empty() {
            c.aop_k = self.aop_k.clone();
        }
        if let Some(p) = self.pair_cap {
            c.pair_cap = p;
        }
    }
}
