//! On-disk cache of generated tables keyed by `(L, tool version)`.
//!
//! Cached tables are trusted as loaded at `none` and `cheap` validation;
//! `full` re-validates them like freshly computed ones.

use std::fs;
use std::path::{Path, PathBuf};

use mandel_laurent::generator::validate_pair;
use mandel_laurent::{generate, GeneratorConfig, GeneratorError, Tables, ValidationLevel};

use crate::{CACHE_DIR_ENV, TOOL_VERSION};

#[derive(Debug)]
pub enum TableError {
    /// The generator contradicted its own cross-checks.
    Inconsistent(GeneratorError),
    /// A cache entry exists but does not decode to a table pair.
    CorruptCache { path: PathBuf, reason: String },
    Io(std::io::Error),
}

impl std::fmt::Display for TableError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableError::Inconsistent(e) => write!(f, "internal inconsistency: {e}"),
            TableError::CorruptCache { path, reason } => {
                write!(f, "unreadable cache entry {}: {reason}", path.display())
            }
            TableError::Io(e) => write!(f, "cache I/O: {e}"),
        }
    }
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

pub fn entry_path(dir: &Path, terms: usize) -> PathBuf {
    dir.join(format!("tables-L{terms}-v{TOOL_VERSION}.json"))
}

/// Tables for `0..=terms`, from the cache when present.
pub fn tables(terms: usize, validation: ValidationLevel) -> Result<(Tables, bool), TableError> {
    let dir = cache_dir();
    if let Some(dir) = &dir {
        let path = entry_path(dir, terms);
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(TableError::Io)?;
            let tables: Tables =
                serde_json::from_str(&text).map_err(|e| TableError::CorruptCache {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
            let shape_ok = tables.phi.truncation() == terms
                && tables.psi.as_ref().is_some_and(|p| p.truncation() == terms);
            if !shape_ok {
                return Err(TableError::CorruptCache {
                    path,
                    reason: format!("expected both tables truncated at {terms}"),
                });
            }
            if validation == ValidationLevel::Full {
                let psi = tables.psi.as_ref().expect("shape checked");
                validate_pair(&tables.phi, psi, validation).map_err(TableError::Inconsistent)?;
            }
            return Ok((tables, true));
        }
    }
    let config = GeneratorConfig {
        terms,
        emit_psi: true,
        validation,
    };
    let tables = generate(&config).map_err(TableError::Inconsistent)?;
    if let Some(dir) = &dir {
        fs::create_dir_all(dir).map_err(TableError::Io)?;
        let path = entry_path(dir, terms);
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string(&tables).expect("tables serialize");
        fs::write(&tmp, text).map_err(TableError::Io)?;
        fs::rename(&tmp, &path).map_err(TableError::Io)?;
    }
    Ok((tables, false))
}
