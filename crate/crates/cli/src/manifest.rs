use std::path::{Path, PathBuf};
use std::time::Instant;

use flatscape::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
struct Digest256 {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: &'a [String],
    seed: u64,
    version: &'static str,
    inputs: Vec<Digest256>,
    outputs: Vec<Digest256>,
    wall_clock_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects inputs and outputs of one run and writes its manifest.
pub struct Run {
    out: PathBuf,
    command: String,
    stem: String,
    seed: u64,
    start: Instant,
    inputs: Vec<Digest256>,
    outputs: Vec<Digest256>,
}

impl Run {
    /// `stem` names the manifest, `<stem>.manifest.json`.
    pub fn new(out: &Path, command: &str, stem: &str, seed: u64) -> Result<Self> {
        std::fs::create_dir_all(out)?;
        Ok(Run { out: out.to_path_buf(), command: command.into(), stem: stem.into(), seed, start: Instant::now(), inputs: vec![], outputs: vec![] })
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.push(Digest256 { path: name.into(), sha256: sha256_hex(bytes) });
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.out.join(name);
        std::fs::write(&path, bytes)?;
        self.outputs.push(Digest256 { path: name.into(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(&r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        self.write(name, &bytes)
    }

    pub fn finish(self, argv: &[String]) -> Result<()> {
        let m = Manifest {
            command: &self.command,
            argv,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            inputs: self.inputs,
            outputs: self.outputs,
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
        };
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        std::fs::write(self.out.join(format!("{}.manifest.json", self.stem)), text)?;
        Ok(())
    }
}
