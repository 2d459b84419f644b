//! Artifacts, their JSON and CSV renderings, and error reporting.

use std::fs;
use std::io::Write;

use anyhow::Context;
use serde_json::{json, Value};

use crate::{Format, RunConfig};

/// One CSV table; written to `<name>.csv` under `--out`.
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<&'static str>) -> Self {
        Table {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// What a subcommand produced.
pub struct Artifact {
    pub command: &'static str,
    pub json: Value,
    pub tables: Vec<Table>,
    /// A hypothesis was found violated; the run still produced its report.
    pub violation: bool,
}

impl Artifact {
    pub fn new(command: &'static str, json: Value) -> Self {
        Artifact {
            command,
            json,
            tables: Vec::new(),
            violation: false,
        }
    }
}

pub fn emit(artifact: &Artifact, cfg: &RunConfig) -> anyhow::Result<()> {
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{}.json", artifact.command));
        fs::write(&path, pretty(&artifact.json)?).with_context(|| format!("writing {}", path.display()))?;
        for table in &artifact.tables {
            let path = dir.join(format!("{}.csv", table.name));
            fs::write(&path, table.render()?).with_context(|| format!("writing {}", path.display()))?;
        }
        return Ok(());
    }
    let text = match cfg.format {
        Format::Json => pretty(&artifact.json)?,
        Format::Csv => match artifact.tables.first() {
            Some(t) => t.render()?,
            None => anyhow::bail!("`{}` has no tabular output; use --format json", artifact.command),
        },
    };
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    Ok(())
}

fn pretty(value: &Value) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn core_error(err: &anyhow::Error) -> Option<&qdiff_core::Error> {
    err.chain().find_map(|e| e.downcast_ref::<qdiff_core::Error>())
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    match core_error(err) {
        Some(e) if e.is_hypothesis_violation() => 2,
        _ => 1,
    }
}

pub fn report_error(err: &anyhow::Error, code: u8, as_json: bool) {
    if as_json {
        let kind = core_error(err).map(|e| format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("").to_string());
        let body = json!({
            "error": format!("{err:#}"),
            "kind": kind,
            "hypothesis_violation": code == 2,
            "exit_code": code,
        });
        eprintln!("{body}");
    } else {
        eprintln!("error: {err:#}");
    }
}
