use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// The `--out` directory. Every write failure is an internal error.
#[derive(Debug, Clone)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::internal(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
        Ok(OutDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Opens `name` for writing, hands it to `f`, and flushes.
    pub fn write_with<F, E>(&mut self, name: &str, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<(), E>,
        E: std::fmt::Display,
    {
        let path = self.path(name);
        let file = File::create(&path)
            .map_err(|e| CliError::internal(anyhow::anyhow!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        f(&mut w).map_err(|e| CliError::internal(anyhow::anyhow!("writing {}: {e}", path.display())))?;
        w.flush()
            .map_err(|e| CliError::internal(anyhow::anyhow!("writing {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn jsonl<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
        self.write_with(name, |w| -> anyhow::Result<()> {
            for row in rows {
                serde_json::to_writer(&mut *w, &row)?;
                w.write_all(b"\n")?;
            }
            Ok(())
        })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_with(name, |w| -> anyhow::Result<()> {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
        self.write_with(name, |w| -> anyhow::Result<()> {
            let mut writer = csv::Writer::from_writer(w);
            for row in rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
            Ok(())
        })
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        self.write_with(name, |w| w.write_all(body.as_bytes()))
    }
}
