//! Artifact writers. Every file starts with a header recording the command,
//! seed and effective configuration, in the comment syntax of its format.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

#[derive(Clone, Debug)]
pub struct Header {
    command: String,
    seed: u64,
    config: Value,
    extra: Vec<(String, Value)>,
}

impl Header {
    pub fn new(command: &str, seed: u64, config: &RunConfig) -> Result<Header> {
        Ok(Header {
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config)?,
            extra: Vec::new(),
        })
    }

    /// A copy with one more `key: value` line.
    pub fn with(&self, key: &str, value: impl Serialize) -> Header {
        let mut h = self.clone();
        h.extra
            .push((key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null)));
        h
    }

    fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("fuzzyforest {} {}", env!("CARGO_PKG_VERSION"), self.command),
            format!("seed: {}", self.seed),
            format!("config: {}", self.config),
        ];
        for (k, v) in &self.extra {
            out.push(format!("{k}: {v}"));
        }
        out
    }

    pub fn json(&self) -> Value {
        let mut map = Map::new();
        map.insert("tool".into(), json!("fuzzyforest"));
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        map.insert("command".into(), json!(self.command));
        map.insert("seed".into(), json!(self.seed));
        map.insert("config".into(), self.config.clone());
        for (k, v) in &self.extra {
            map.insert(k.clone(), v.clone());
        }
        Value::Object(map)
    }

    pub fn csv_block(&self) -> String {
        self.lines().iter().map(|l| format!("# {l}\n")).collect()
    }

    pub fn svg_comment(&self) -> String {
        // "--" may not appear inside an XML comment.
        let body: Vec<String> = self.lines().iter().map(|l| l.replace("--", "- -")).collect();
        format!("<!--\n{}\n-->\n", body.join("\n"))
    }
}

/// Where artifacts go; creates the directory on first use.
#[derive(Clone, Debug)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: &Path) -> Result<OutDir> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        log::info!("wrote {}", path.display());
        Ok(path)
    }

    /// CSV with the header as `#` lines, then a column row and records.
    pub fn csv(&self, name: &str, header: &Header, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(columns)?;
        for row in rows {
            w.write_record(row)?;
        }
        let body = String::from_utf8(w.into_inner().context("flushing csv")?)?;
        self.write(name, &format!("{}{}", header.csv_block(), body))
    }

    /// A JSON object `{"header": ..., key: value}`.
    pub fn json(&self, name: &str, header: &Header, key: &str, value: &impl Serialize) -> Result<PathBuf> {
        let mut map = Map::new();
        map.insert("header".into(), header.json());
        map.insert(key.into(), serde_json::to_value(value)?);
        self.json_value(name, Value::Object(map))
    }

    /// Writes an already-built object, adding the header to it.
    pub fn json_with_header(&self, name: &str, header: &Header, mut doc: Value) -> Result<PathBuf> {
        if let Value::Object(map) = &mut doc {
            map.insert("header".into(), header.json());
        }
        self.json_value(name, doc)
    }

    fn json_value(&self, name: &str, doc: Value) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// An SVG document with the header as a comment after the prolog.
    pub fn svg(&self, name: &str, header: &Header, svg: &str) -> Result<PathBuf> {
        let text = format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n{}{}",
            header.svg_comment(),
            svg
        );
        self.write(name, &text)
    }
}

/// Shortest round-trip formatting, so re-reading gives the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}
