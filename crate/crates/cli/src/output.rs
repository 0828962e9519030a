use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// Writes every file through a temporary in `dir`, then renames them all.
/// Nothing is renamed until every temporary has been written.
pub fn write_all_atomic(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, body) in files {
        let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("staging {name}"))?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, path) in staged {
        tmp.persist(&path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
