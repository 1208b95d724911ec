//! Error classification and file output.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use mxmap_core::{Error, GraphFormat};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl CliError {
    /// 2 usage, 3 data, 4 numerical degeneracy.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Parameter(_)) => 2,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub fn io_error(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes to a temporary file beside `path` and renames it into place, so readers never see
/// a partial file. With no path the contents go to stdout.
pub fn write_output(path: Option<&Path>, contents: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(contents)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Io(format!("stdout: {e}")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

/// `.json` and `.dot` by extension, otherwise an adjacency matrix CSV.
pub fn format_for(path: &Path) -> GraphFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => GraphFormat::Json,
        Some("dot" | "gv") => GraphFormat::Dot,
        _ => GraphFormat::MatrixCsv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Parameter("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Data("x".into())).exit_code(), 3);
        assert_eq!(CliError::Core(Error::Degenerate("x".into())).exit_code(), 4);
        assert_eq!(
            CliError::Core(Error::SingularConditioning("x".into())).exit_code(),
            4
        );
        assert_eq!(CliError::Io("x".into()).exit_code(), 3);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        write_output(Some(&path), b"first").unwrap();
        write_output(Some(&path), b"second").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn graph_format_from_extension() {
        assert_eq!(format_for(Path::new("a.json")), GraphFormat::Json);
        assert_eq!(format_for(Path::new("a.dot")), GraphFormat::Dot);
        assert_eq!(format_for(Path::new("a.csv")), GraphFormat::MatrixCsv);
    }
}
