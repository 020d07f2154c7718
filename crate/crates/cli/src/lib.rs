//! Command-line front end for the fuzzyforest library.

pub mod commands;
pub mod config;
pub mod output;
pub mod prepare;
pub mod svg;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, SynthKind};

#[derive(Debug, Parser)]
#[command(name = "fuzzyforest", version, about = "Fuzzy forest feature selection for correlated survey data")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random stream (required here or in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic labeled dataset and its ground truth.
    Synth(SynthArgs),
    /// Load, impute and one-hot encode a table.
    Ingest(InputArgs),
    /// Group features into correlation modules.
    Modules {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        wgcna: WgcnaArgs,
        /// Also write the adjacency and TOM matrices.
        #[arg(long)]
        write_matrices: bool,
    },
    /// Run the full selection and rank the top features.
    Select {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        wgcna: WgcnaArgs,
        #[command(flatten)]
        fuzzy: FuzzyArgs,
        #[command(flatten)]
        truth: TruthArgs,
    },
    /// Cross-validate the selected-feature forest against a full forest
    /// and a ridge logistic model.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        wgcna: WgcnaArgs,
        #[command(flatten)]
        fuzzy: FuzzyArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Reuse the feature set of a forest written by `select` instead
        /// of re-running selection inside every fold.
        #[arg(long)]
        forest: Option<PathBuf>,
    },
    /// Break the outcome down by categorical variables.
    Crosstab {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        crosstab: CrosstabArgs,
    },
    /// Every artifact in one run; synthesizes data when no input is given.
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        wgcna: WgcnaArgs,
        #[command(flatten)]
        fuzzy: FuzzyArgs,
        #[command(flatten)]
        eval: EvalArgs,
        #[command(flatten)]
        crosstab: CrosstabArgs,
        #[command(flatten)]
        truth: TruthArgs,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SynthKind>,
    /// Number of rows to generate.
    #[arg(long)]
    pub rows: Option<usize>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long)]
    pub weight_column: Option<String>,
}

#[derive(Debug, Args)]
pub struct WgcnaArgs {
    /// Fixed soft-threshold power.
    #[arg(long, conflicts_with = "auto_beta")]
    pub beta: Option<f64>,
    /// Pick the power by scale-free fit.
    #[arg(long)]
    pub auto_beta: bool,
    #[arg(long)]
    pub cut_height: Option<f64>,
    #[arg(long)]
    pub min_module_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FuzzyArgs {
    #[arg(long)]
    pub final_k: Option<usize>,
    #[arg(long)]
    pub drop_fraction: Option<f64>,
    #[arg(long)]
    pub keep_fraction: Option<f64>,
    #[arg(long)]
    pub screen_trees: Option<usize>,
    #[arg(long)]
    pub select_trees: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub forest_trees: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CrosstabArgs {
    /// Comma-separated variables; default is every categorical feature.
    #[arg(long, value_delimiter = ',')]
    pub variables: Option<Vec<String>>,
    /// Sum survey weights instead of counting rows.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    /// Ground truth written by `synth`; prints recovery of signal variables.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

impl InputArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.input.is_some() {
            cfg.input = self.input.clone();
        }
        set(&mut cfg.label_column, &self.label_column);
        if self.weight_column.is_some() {
            cfg.weight_column = self.weight_column.clone();
        }
    }
}

impl WgcnaArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.beta.is_some() {
            cfg.wgcna.beta = self.beta;
        }
        if self.auto_beta {
            cfg.wgcna.beta = None;
        }
        if self.cut_height.is_some() {
            cfg.wgcna.cut_height = self.cut_height;
        }
        set(&mut cfg.wgcna.min_module_size, &self.min_module_size);
    }
}

impl FuzzyArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.fuzzy.final_k, &self.final_k);
        set(&mut cfg.fuzzy.drop_fraction, &self.drop_fraction);
        set(&mut cfg.fuzzy.keep_fraction, &self.keep_fraction);
        set(&mut cfg.fuzzy.screen_trees, &self.screen_trees);
        set(&mut cfg.fuzzy.select_trees, &self.select_trees);
    }
}

impl EvalArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.evaluation.folds, &self.folds);
        set(&mut cfg.evaluation.lambda, &self.lambda);
        set(&mut cfg.evaluation.forest_trees, &self.forest_trees);
    }
}

impl CrosstabArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.crosstab.variables, &self.variables);
        if self.weighted {
            cfg.crosstab.weighted = true;
        }
    }
}

impl TruthArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.truth.is_some() {
            cfg.truth = self.truth.clone();
        }
    }
}

impl Cli {
    /// The config file with this invocation's flags applied on top.
    pub fn effective_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        match &self.command {
            Command::Synth(a) => {
                set(&mut cfg.synth.kind, &a.kind);
                if let Some(rows) = a.rows {
                    cfg.synth.blocks.n_samples = rows;
                    cfg.synth.survey.n_rows = rows;
                }
            }
            Command::Ingest(input) => input.apply(&mut cfg),
            Command::Modules {
                input,
                wgcna,
                write_matrices,
            } => {
                input.apply(&mut cfg);
                wgcna.apply(&mut cfg);
                if *write_matrices {
                    cfg.wgcna.write_matrices = true;
                }
            }
            Command::Select {
                input,
                wgcna,
                fuzzy,
                truth,
            } => {
                input.apply(&mut cfg);
                wgcna.apply(&mut cfg);
                fuzzy.apply(&mut cfg);
                truth.apply(&mut cfg);
            }
            Command::Evaluate {
                input,
                wgcna,
                fuzzy,
                eval,
                ..
            } => {
                input.apply(&mut cfg);
                wgcna.apply(&mut cfg);
                fuzzy.apply(&mut cfg);
                eval.apply(&mut cfg);
            }
            Command::Crosstab { input, crosstab } => {
                input.apply(&mut cfg);
                crosstab.apply(&mut cfg);
            }
            Command::Report {
                input,
                wgcna,
                fuzzy,
                eval,
                crosstab,
                truth,
            } => {
                input.apply(&mut cfg);
                wgcna.apply(&mut cfg);
                fuzzy.apply(&mut cfg);
                eval.apply(&mut cfg);
                crosstab.apply(&mut cfg);
                truth.apply(&mut cfg);
            }
        }
        Ok(cfg)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring the thread pool")?;
    }
    let cfg = cli.effective_config()?;
    let ctx = commands::Context::new(cfg, &cli.out_dir)?;
    match &cli.command {
        Command::Synth(_) => commands::synth::run(&ctx),
        Command::Ingest(_) => commands::ingest::run(&ctx),
        Command::Modules { .. } => commands::modules::run(&ctx),
        Command::Select { .. } => commands::select::run(&ctx),
        Command::Evaluate { forest, .. } => commands::evaluate::run(&ctx, forest.as_deref()),
        Command::Crosstab { .. } => commands::crosstab::run(&ctx),
        Command::Report { .. } => commands::report::run(&ctx),
    }
}
