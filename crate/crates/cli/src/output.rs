//! Output plumbing: atomic tracked file writes and stdout tables.
//!
//! Files land via write-to-temp-then-rename so a crash never leaves a
//! half-written artifact, and every path written during a command is
//! remembered so a failing command can sweep its outputs away — the
//! filesystem either holds the command's complete results or none of them.

use std::cell::RefCell;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Records every file a command writes, for all-or-nothing semantics.
#[derive(Default)]
pub struct Outputs {
    written: RefCell<Vec<PathBuf>>,
}

impl Outputs {
    /// Atomically write `contents` to `path`, creating parent directories.
    pub fn write(&self, path: &Path, contents: &str) -> Result<()> {
        let parent = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&parent)
            .with_context(|| format!("cannot create directory {}", parent.display()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&parent)
            .with_context(|| format!("cannot create temporary file in {}", parent.display()))?;
        tmp.write_all(contents.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))?;
        tmp.persist(path)
            .with_context(|| format!("cannot move output into place at {}", path.display()))?;
        self.written.borrow_mut().push(path.to_path_buf());
        Ok(())
    }

    /// Paths written so far, in order.
    pub fn paths(&self) -> Vec<PathBuf> {
        self.written.borrow().clone()
    }

    /// Remove everything written so far (used when a command fails after
    /// producing some of its outputs).
    pub fn discard_all(&self) {
        for path in self.written.borrow_mut().drain(..) {
            let _ = std::fs::remove_file(path);
        }
    }
}

/// Render an aligned text table for stdout.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let fmt_row = |cells: Vec<String>, widths: &[usize]| -> String {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{:<width$}", cell, width = widths[i]));
        }
        line.trim_end().to_string()
    };
    out.push_str(&fmt_row(
        headers.iter().map(|h| h.to_string()).collect(),
        &widths,
    ));
    out.push('\n');
    out.push_str(&fmt_row(
        widths.iter().map(|w| "-".repeat(*w)).collect(),
        &widths,
    ));
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row.clone(), &widths));
        out.push('\n');
    }
    out
}

/// Quote a CSV field when it contains separators or quotes.
pub fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}
