//! All-or-nothing writes of a set of output files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

/// Writes every `(name, contents)` pair under `dir`. Each file is staged in a
/// temporary file in the same directory and renamed into place; if any step
/// fails, files already renamed by this call are removed again.
pub fn write_all(dir: &Path, files: &[(&str, &str)]) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let mut tmp = NamedTempFile::new_in(dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(name)));
    }
    let mut written: Vec<PathBuf> = Vec::with_capacity(staged.len());
    for (tmp, path) in staged {
        if let Err(e) = tmp.persist(&path) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e.error);
        }
        written.push(path);
    }
    Ok(written)
}
