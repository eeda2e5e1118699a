//! Run reports: human lines on a terminal, `key=value` lines in a file.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn set(&mut self, key: impl Into<String>, value: impl Display) {
        let key = key.into();
        let value = value.to_string().replace('\n', " ");
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn input(&mut self, name: &str, path: &Path, bytes: &[u8]) {
        self.set(format!("input.{name}"), path.display());
        self.set(format!("input.{name}.sha256"), hex::encode(Sha256::digest(bytes)));
    }

    pub fn human(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.entries {
            writeln!(out, "{k:<width$}  {v}")?;
        }
        Ok(())
    }

    pub fn machine(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
