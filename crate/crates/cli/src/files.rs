use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Resolves relative paths against an optional data directory.
pub struct Paths {
    base: Option<PathBuf>,
}

impl Paths {
    pub fn new(base: Option<PathBuf>) -> Self {
        Self { base }
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// An existing, readable file.
    pub fn input(&self, p: &Path) -> Result<PathBuf, CliError> {
        let path = self.resolve(p);
        if !path.is_file() {
            return Err(CliError::Validation(format!("{}: no such file", path.display())));
        }
        Ok(path)
    }

    /// A path whose parent directory exists.
    pub fn output(&self, p: &Path) -> Result<PathBuf, CliError> {
        let path = self.resolve(p);
        if path.is_dir() {
            return Err(CliError::Validation(format!("{}: is a directory", path.display())));
        }
        let parent = parent_dir(&path);
        if !parent.is_dir() {
            return Err(CliError::Validation(format!(
                "{}: directory {} does not exist",
                path.display(),
                parent.display()
            )));
        }
        Ok(path)
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Writes via a temporary file in the target directory and an atomic
/// rename, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Validation(format!("{}: {e}", path.display()));
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(parent_dir(path)).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("value serializes");
    out.push(b'\n');
    out
}
