//! One JSON file per digit system under a cache directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dsum_core::certify::{AttractorAtlas, CertifyError};
use dsum_core::{enumerate_attractors, DigitSystem};

use crate::record::AtlasCacheRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    /// Computed and written.
    Stored,
    /// Computed; no cache directory in use.
    Uncached,
    /// Computed; the cached file was unreadable or invalid.
    Replaced,
    /// Computed; the cache file could not be written.
    WriteFailed,
}

pub fn cache_file(dir: &Path, sys: DigitSystem) -> PathBuf {
    dir.join(format!("atlas-b{}-e{}.json", sys.base(), sys.exponent()))
}

/// `$XDG_CACHE_HOME/dsum`, falling back to `$HOME/.cache/dsum`.
pub fn default_cache_dir() -> Option<PathBuf> {
    let xdg = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty());
    let base = match xdg {
        Some(x) => PathBuf::from(x),
        None => PathBuf::from(std::env::var_os("HOME").filter(|v| !v.is_empty())?).join(".cache"),
    };
    Some(base.join("dsum"))
}

fn load(path: &Path, sys: DigitSystem) -> Result<AttractorAtlas, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let record = AtlasCacheRecord::from_json(&text).map_err(|e| e.to_string())?;
    let atlas = record.to_atlas().map_err(|e| e.to_string())?;
    if atlas.system() != sys {
        return Err(format!("file holds the atlas for {}", atlas.system()));
    }
    Ok(atlas)
}

fn store(path: &Path, atlas: &AttractorAtlas) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, AtlasCacheRecord::from_atlas(atlas).to_json())?;
    fs::rename(&tmp, path)
}

/// Load the atlas for `sys` from `dir`, or enumerate it and write it back.
/// Cache problems are reported on `warn` and never fail the call.
pub fn load_or_compute(
    dir: Option<&Path>,
    sys: DigitSystem,
    warn: &mut dyn Write,
) -> Result<(AttractorAtlas, CacheStatus), CertifyError> {
    let Some(dir) = dir else {
        return Ok((enumerate_attractors(sys)?, CacheStatus::Uncached));
    };
    let path = cache_file(dir, sys);
    let mut status = CacheStatus::Stored;
    if path.exists() {
        match load(&path, sys) {
            Ok(atlas) => return Ok((atlas, CacheStatus::Hit)),
            Err(e) => {
                let _ = writeln!(warn, "warning: ignoring corrupt cache {}: {e}", path.display());
                status = CacheStatus::Replaced;
            }
        }
    }
    let atlas = enumerate_attractors(sys)?;
    if let Err(e) = store(&path, &atlas) {
        let _ = writeln!(warn, "warning: could not write cache {}: {e}", path.display());
        status = CacheStatus::WriteFailed;
    }
    Ok((atlas, status))
}
