//! Deterministic CSV and manifest writing. CSVs use '.' decimals, '\n' rows
//! and a mandatory header row; floats print in shortest round-trip form so
//! identical runs are byte-identical.

use crate::config::ExperimentConfig;
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

pub struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: PathBuf) -> std::io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, written: Vec::new() })
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        for row in rows {
            buf.push_str(&row.join(","));
            buf.push('\n');
        }
        fs::write(&path, buf)?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &serde_json::Value) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        let text = serde_json::to_string_pretty(value).expect("serializable");
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        self.written.push(name.to_string());
        Ok(path)
    }

    /// Manifest echoing the fully resolved configuration and library version.
    pub fn write_manifest(&mut self, config: &ExperimentConfig) -> std::io::Result<()> {
        let value = json!({
            "experiment": config.experiment,
            "seed": config.seed,
            "config": serde_json::to_value(config).expect("serializable"),
            "library_version": env!("CARGO_PKG_VERSION"),
            "outputs": self.written,
        });
        let path = self.dir.join("manifest.json");
        let mut f = fs::File::create(path)?;
        let text = serde_json::to_string_pretty(&value).expect("serializable");
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")
    }
}

pub fn fmt(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
