use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use offload_core::GenParams;
use serde::Serialize;

pub const TOOL: &str = "offload-game";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every JSON artifact carries the tool version and the full invocation config.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'a str,
    pub version: &'a str,
    pub command: &'a str,
    pub config: &'a C,
    /// Generator parameters after defaults are applied; `n` is the first
    /// swept size for sweeps. Absent when the scenario was loaded from a file.
    pub generator: Option<GenParams>,
    pub result: R,
}

pub fn envelope<'a, C: Serialize, R: Serialize>(
    command: &'a str,
    config: &'a C,
    generator: Option<GenParams>,
    result: R,
) -> Envelope<'a, C, R> {
    Envelope { tool: TOOL, version: VERSION, command, config, generator, result }
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self> {
        fs::create_dir_all(path).with_context(|| format!("creating output directory {}", path.display()))?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_json<V: Serialize>(&self, name: &str, value: &V) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn csv(&self, name: &str) -> Result<csv::Writer<fs::File>> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        Ok(csv_writer(file))
    }
}

pub fn csv_writer<W: std::io::Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
