//! Deterministic artifact writing: pretty JSON with stable key order
//! (struct declaration order) and plain-text/CSV helpers.

use serde::Serialize;
use std::path::Path;

use crate::AppError;

/// Pretty JSON with a trailing newline.
pub fn json_string<T: Serialize>(value: &T) -> Result<String, AppError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Io(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes text to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| AppError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Serializes `value` as JSON into `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    write_text(path, &json_string(value)?)
}
