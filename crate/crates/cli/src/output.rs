//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub config_snapshot: serde_json::Value,
    /// File names relative to the output directory, in write order.
    pub outputs: Vec<String>,
    pub versions: String,
}

pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    /// Write `rows` under `header`; every row must match the header width.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write the manifest last; it lists everything written before it.
    pub fn finish(mut self, command: &str, config_snapshot: serde_json::Value) -> Result<()> {
        let outputs = self.written.clone();
        for name in &outputs {
            anyhow::ensure!(self.dir.join(name).is_file(), "output {name} is missing");
        }
        let manifest = RunManifest {
            command,
            config_snapshot,
            outputs,
            versions: format!("mechprep {}", env!("CARGO_PKG_VERSION")),
        };
        self.json("manifest.json", &manifest)
    }
}

pub fn num(v: f64) -> String {
    v.to_string()
}
