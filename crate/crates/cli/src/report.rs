use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Config;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // shortest string that parses back exactly, exponent form at the extremes
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// `ok`, or the error kind of a failed sweep point.
pub fn status<T>(r: &Result<T, anisolab::Error>) -> Cell {
    Cell::Text(match r {
        Ok(_) => "ok".into(),
        Err(e) => e.kind().into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Column summarized in the sidecar.
    pub metric: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub metric: String,
    pub rows: usize,
    pub ok_rows: usize,
    pub max: Option<f64>,
    pub min: Option<f64>,
    /// `max / min` when both exist and `min > 0`.
    pub ratio: Option<f64>,
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    seed: u64,
    scenario: &'static str,
    csv: &'a str,
    columns: &'a [String],
    summary: &'a Summary,
    config: &'a Config,
}

impl Report {
    pub fn new(columns: Vec<String>, metric: &str) -> Self {
        debug_assert!(columns.iter().any(|c| c == metric));
        Self {
            columns,
            rows: Vec::new(),
            metric: metric.to_string(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn summary(&self) -> Summary {
        let idx = self.column(&self.metric).expect("metric column exists");
        let status = self.column("status");
        let ok: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| status.is_none_or(|s| r[s] == Cell::Text("ok".into())))
            .filter_map(|r| match r[idx] {
                Cell::Num(v) if v.is_finite() => Some(v),
                _ => None,
            })
            .collect();
        let max = ok.iter().copied().reduce(f64::max);
        let min = ok.iter().copied().reduce(f64::min);
        let ratio = match (max, min) {
            (Some(a), Some(b)) if b > 0.0 => Some(a / b),
            _ => None,
        };
        Summary {
            metric: self.metric.clone(),
            rows: self.rows.len(),
            ok_rows: ok.len(),
            max,
            min,
            ratio,
        }
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.json`, each through a
    /// temporary file and a rename.
    pub fn write(&self, dir: &Path, name: &str, cfg: &Config) -> Result<(PathBuf, PathBuf), CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let csv_name = format!("{name}.csv");
        let csv_path = dir.join(&csv_name);
        let meta_path = dir.join(format!("{name}.meta.json"));
        let summary = self.summary();
        let meta = Meta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: anisolab::VERSION,
            seed: cfg.seed,
            scenario: cfg.scenario.name(),
            csv: &csv_name,
            columns: &self.columns,
            summary: &summary,
            config: cfg,
        };
        let mut meta_text = serde_json::to_string_pretty(&meta).expect("meta serializes");
        meta_text.push('\n');
        write_atomic(&csv_path, self.to_csv().as_bytes())?;
        write_atomic(&meta_path, meta_text.as_bytes())?;
        Ok((csv_path, meta_path))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    drop(file);
    fs::rename(&tmp, path).map_err(io)
}
