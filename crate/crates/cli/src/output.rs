use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped on every artifact.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stamp {
    pub config_hash: String,
    pub seed: u64,
    pub version: &'static str,
    pub command: String,
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    result: &'a T,
}

/// Round-trip float text with 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Sink {
    dir: PathBuf,
    pub stamp: Stamp,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, stamp: Stamp) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), stamp, written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&Envelope { stamp: &self.stamp, result })?;
        text.push('\n');
        let p = self.path(name);
        fs::write(&p, text)?;
        self.written.push(p);
        Ok(())
    }

    /// CSV with a leading `#` provenance line.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut buf = format!("# configHash={} seed={} version={}\n", self.stamp.config_hash, self.stamp.seed, self.stamp.version).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        let p = self.path(name);
        fs::write(&p, buf)?;
        self.written.push(p);
        Ok(())
    }

    pub fn binary(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, bytes)?;
        self.written.push(p);
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
