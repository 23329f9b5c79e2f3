use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use umod_core::coloring::Variety;
use umod_core::document::ModelDocument;
use umod_core::universal::{build_universal_model, LayeredModel, Limits};

/// Cache directory: `$UMOD_CACHE`, else `$XDG_CACHE_HOME/umod`, else
/// `$HOME/.cache/umod`. `None` if none of these is set.
pub fn cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os("UMOD_CACHE") {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(Path::new(&dir).join("umod"));
    }
    std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache").join("umod"))
}

fn entry_name(n: usize, variety: Variety, limits: Limits) -> String {
    format!("{variety}-n{n}-layers{}-elements{}.json", limits.max_layer, limits.max_elements)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Loads a universal model from the cache, building and storing it on a
/// miss. Unreadable or stale entries are rebuilt.
pub fn universal_model(n: usize, variety: Variety, limits: Limits, use_cache: bool) -> Result<LayeredModel> {
    let path = use_cache.then(cache_dir).flatten().map(|d| d.join(entry_name(n, variety, limits)));
    if let Some(path) = &path {
        if let Ok(text) = fs::read_to_string(path) {
            if let Ok(lm) = ModelDocument::from_json(&text).and_then(|d| d.to_layered()) {
                if lm.variety() == variety && lm.n() == n {
                    return Ok(lm);
                }
            }
        }
    }
    let lm = build_universal_model(n, variety, limits)?;
    if let Some(path) = &path {
        // a failed cache write only costs a rebuild next time
        if let Err(e) = write_atomic(path, &ModelDocument::from_layered(&lm).to_json()) {
            eprintln!("warning: could not cache model: {e:#}");
        }
    }
    Ok(lm)
}
