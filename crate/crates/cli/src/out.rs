//! Output files. Every CSV opens with a `# linlif <schema> v<N>` line
//! followed by the column header.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliResult;

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(schema: &str, version: u32, columns: &[&str]) -> Self {
        let mut text = format!("# linlif {schema} v{version}\n");
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv { text }
    }

    /// Wraps an already-headed CSV body from the core library.
    pub fn with_body(schema: &str, version: u32, body: &str) -> Self {
        Csv {
            text: format!("# linlif {schema} v{version}\n{body}"),
        }
    }

    pub fn row<I>(&mut self, fields: I)
    where
        I: IntoIterator,
        I::Item: std::fmt::Display,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            first = false;
            let _ = write!(self.text, "{f}");
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Empty field for a missing value.
pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| linlif::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

pub fn write(dir: &Path, file: &str, contents: impl AsRef<[u8]>) -> CliResult<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(file);
    fs::write(&path, contents).map_err(|e| linlif::Error::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, file: &str, value: &T) -> CliResult<PathBuf> {
    let text = serde_json::to_string_pretty(value).map_err(linlif::Error::from)? + "\n";
    write(dir, file, text)
}

pub fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| {
            linlif::Error::Io {
                path: path.to_path_buf(),
                source: e,
            }
            .into()
        })
}
