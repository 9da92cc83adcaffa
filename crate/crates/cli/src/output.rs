//! CSV files with a leading `#` block echoing the run parameters, and the
//! `manifest.json` written next to them.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Command;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub parameters: Value,
    pub results: Map<String, Value>,
    pub files: Vec<String>,
}

pub struct RunDir {
    dir: PathBuf,
    header: Vec<String>,
    files: Vec<String>,
}

impl RunDir {
    pub fn create(dir: &Path, command: &Command) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        let params = serde_json::to_value(command)?;
        let mut header = vec![format!(
            "# {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        )];
        if let Value::Object(map) = &params {
            for (k, v) in map {
                header.push(format!("# {k} = {v}"));
            }
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            header,
            files: Vec::new(),
        })
    }

    /// Writes `name` with the parameter block, `extra` comment lines, a header
    /// row and `rows`.
    pub fn csv<I>(
        &mut self,
        name: &str,
        extra: &[String],
        columns: &[&str],
        rows: I,
    ) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut file = BufWriter::new(File::create(self.dir.join(name))?);
        for line in self.header.iter().chain(extra) {
            writeln!(file, "{line}")?;
        }
        let mut w = csv::Writer::from_writer(file);
        w.write_record(columns)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(
        self,
        command: &Command,
        results: Map<String, Value>,
    ) -> Result<Manifest, CliError> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            parameters: serde_json::to_value(command)?,
            results,
            files: self.files,
        };
        let mut f = BufWriter::new(File::create(self.dir.join(MANIFEST))?);
        serde_json::to_writer_pretty(&mut f, &manifest)?;
        writeln!(f)?;
        f.flush()?;
        Ok(manifest)
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
