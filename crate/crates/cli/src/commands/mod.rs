//! Subcommands. Each splits into a compute step and a write step so that
//! `report` can chain them without recomputing shared stages.

pub mod crosstab;
pub mod evaluate;
pub mod ingest;
pub mod modules;
pub mod report;
pub mod select;
pub mod synth;

use std::path::Path;

use anyhow::Result;

use crate::config::RunConfig;
use crate::output::{Header, OutDir};
use crate::prepare::{load_table, prepare, Prepared};

pub struct Context {
    pub cfg: RunConfig,
    pub seed: u64,
    pub out: OutDir,
}

impl Context {
    pub fn new(cfg: RunConfig, out_dir: &Path) -> Result<Context> {
        let seed = cfg.seed()?;
        Ok(Context {
            cfg,
            seed,
            out: OutDir::new(out_dir)?,
        })
    }

    pub fn header(&self, command: &str) -> Result<Header> {
        Header::new(command, self.seed, &self.cfg)
    }

    /// Loads and prepares the configured input file.
    pub fn prepared(&self) -> Result<Prepared> {
        let table = load_table(&self.cfg, self.cfg.input()?)?;
        prepare(table, &self.cfg, self.seed)
    }
}
