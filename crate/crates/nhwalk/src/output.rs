//! CSV tables with a `#`-prefixed TOML metadata block.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Experiment, RunConfig};
use crate::error::{RunError, TableError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }

    /// Integers verbatim, reals with 17 significant digits.
    pub fn render(self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:.16e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Metadata,
}

fn is_int_column(name: &str) -> bool {
    matches!(name, "index" | "x" | "t")
}

impl OutputTable {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            header: config.experiment.columns().iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Metadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: config.clone(),
                notes: BTreeMap::new(),
            },
        }
    }

    pub fn experiment(&self) -> Experiment {
        self.metadata.config.experiment
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let meta = toml::to_string(&self.metadata).expect("metadata serializes");
        let mut out = String::new();
        for line in meta.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render())).expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("ascii output"));
        out
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut meta = String::new();
        let mut body_start = 0;
        let mut meta_lines = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            meta.push_str(rest.strip_prefix(' ').unwrap_or(rest));
            body_start += line.len();
            meta_lines += 1;
        }
        let metadata: Metadata = toml::from_str(&meta).map_err(|e| TableError::Parse {
            line: 1,
            reason: format!("metadata: {}", e.message()),
        })?;

        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(&text.as_bytes()[body_start..]);
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| TableError::Parse {
                line: meta_lines + 1,
                reason: e.to_string(),
            })?
            .iter()
            .map(str::to_string)
            .collect();
        let expected: Vec<String> = metadata
            .config
            .experiment
            .columns()
            .iter()
            .map(|c| c.to_string())
            .collect();
        if header != expected {
            return Err(TableError::SchemaMismatch {
                expected,
                found: header,
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let line = meta_lines + 2 + i;
            let rec = rec.map_err(|e| TableError::Parse {
                line,
                reason: e.to_string(),
            })?;
            if rec.len() != header.len() {
                return Err(TableError::Parse {
                    line,
                    reason: format!("expected {} fields, found {}", header.len(), rec.len()),
                });
            }
            let row = rec
                .iter()
                .zip(&header)
                .map(|(field, name)| {
                    let bad = |e: &dyn std::fmt::Display| TableError::Parse {
                        line,
                        reason: format!("column {name}: {e}"),
                    };
                    if is_int_column(name) {
                        field.parse().map(Cell::Int).map_err(|e| bad(&e))
                    } else {
                        field.parse().map(Cell::Real).map_err(|e| bad(&e))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self {
            header,
            rows,
            metadata,
        })
    }

    /// Writes to `path` through a temporary file in the same directory, so a failed write
    /// never leaves a partial table behind.
    pub fn write_atomic(&self, path: &Path) -> Result<(), RunError> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(self.to_csv().as_bytes())?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| RunError::Io(e.error))?;
        Ok(())
    }
}
