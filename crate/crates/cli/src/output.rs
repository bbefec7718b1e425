use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fracvar::grid::io::write_csv;
use fracvar::SampledField;

use crate::error::CliResult;

/// Artifact directory of one run.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn text(&self, name: &str, text: &str) -> CliResult<()> {
        fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn field(&self, name: &str, field: &SampledField) -> CliResult<()> {
        write_csv(field, &self.path(name))?;
        Ok(())
    }

    /// CSV from a header and rows of numbers.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.text(name, &text)
    }
}
