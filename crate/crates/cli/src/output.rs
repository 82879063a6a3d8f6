//! Output-directory resolution and CSV emission.

use std::path::{Path, PathBuf};

/// 17 significant decimal digits: lossless f64 round-trip, diff-able output.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutDir(PathBuf);

impl OutDir {
    /// Resolution order: explicit flag/config value, then $STRONGSPLIT_OUT,
    /// then the working directory. The directory is created if missing.
    pub fn resolve(explicit: Option<PathBuf>) -> Result<OutDir, String> {
        let dir = explicit
            .or_else(|| std::env::var_os("STRONGSPLIT_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)
            .map_err(|e| format!("creating output dir {}: {e}", dir.display()))?;
        Ok(OutDir(dir))
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), String> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
}
