use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Files rendered in memory, written only once every one is ready.
#[derive(Default)]
pub struct PendingFiles {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl PendingFiles {
    pub fn add(&mut self, path: impl Into<PathBuf>, contents: Vec<u8>) {
        self.files.push((path.into(), contents));
    }

    pub fn paths(&self) -> Vec<&Path> {
        self.files.iter().map(|(p, _)| p.as_path()).collect()
    }

    pub fn commit(self) -> Result<()> {
        for (path, contents) in &self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
            log::info!("wrote {}", path.display());
        }
        Ok(())
    }
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// `None` for infinities so JSON stays valid.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
