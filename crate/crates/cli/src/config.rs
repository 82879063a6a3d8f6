//! Flat key=value config files with strict unknown-key rejection.

use std::path::{Path, PathBuf};

#[derive(Default)]
pub struct ConfigFile {
    pub scheme: Option<String>,
    pub beta: Option<String>,
    pub x0: Option<String>,
    pub v0: Option<String>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    /// Parse `key = value` lines; `#` starts a comment. Unknown keys and
    /// malformed values are errors with a line diagnostic.
    pub fn load(path: &Path) -> Result<ConfigFile, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("reading {}: {e}", path.display()))?;
        let mut cfg = ConfigFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("line {lineno}: expected `key = value`, got `{line}`"))?;
            if value.is_empty() {
                return Err(format!("line {lineno}: empty value for key `{key}`"));
            }
            let bad = |what: &str| format!("line {lineno}: invalid {what} `{value}`");
            match key {
                "scheme" => cfg.scheme = Some(value.to_string()),
                "beta" => cfg.beta = Some(value.to_string()),
                "x0" => cfg.x0 = Some(value.to_string()),
                "v0" => cfg.v0 = Some(value.to_string()),
                "tau" => cfg.tau = Some(value.parse().map_err(|_| bad("number"))?),
                "sigma" => cfg.sigma = Some(value.parse().map_err(|_| bad("number"))?),
                "lambda" => cfg.lambda = Some(value.parse().map_err(|_| bad("number"))?),
                "n" => cfg.n = Some(value.parse().map_err(|_| bad("integer"))?),
                "tol" => cfg.tol = Some(value.parse().map_err(|_| bad("number"))?),
                "max_iter" => cfg.max_iter = Some(value.parse().map_err(|_| bad("integer"))?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("integer"))?),
                other => return Err(format!("line {lineno}: unknown key `{other}`")),
            }
        }
        Ok(cfg)
    }
}
