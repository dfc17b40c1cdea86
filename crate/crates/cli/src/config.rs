use std::path::{Path, PathBuf};

use crate::CliError;

/// Settings shared by all subcommands. Command-line flags override these.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub vocab: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
    pub contacts: Option<PathBuf>,
    pub g2g: Option<PathBuf>,
    pub proj: Option<PathBuf>,
    pub scorer: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub lambda: f64,
    pub beam: usize,
    pub max_symbols: usize,
    pub nbest: usize,
    pub oov_weight: f64,
    pub order: usize,
    pub k_g2g: usize,
    pub p: f64,
    pub l: usize,
    pub alpha: f64,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            vocab: None,
            patterns: None,
            contacts: None,
            g2g: None,
            proj: None,
            scorer: None,
            graph: None,
            corpus: None,
            lambda: 1.0,
            beam: 8,
            max_symbols: 4,
            nbest: 1,
            oov_weight: 6.0,
            order: 4,
            k_g2g: 2,
            p: 0.2,
            l: 5,
            alpha: 0.25,
            seed: 0,
            jobs: 1,
        }
    }
}

pub(crate) fn check_lambda(x: f64) -> Result<f64, String> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("lambda must be finite and >= 0, got {x}"))
    }
}

pub(crate) fn check_positive(name: &str, x: usize) -> Result<usize, String> {
    if x >= 1 {
        Ok(x)
    } else {
        Err(format!("{name} must be at least 1"))
    }
}

pub(crate) fn check_oov(x: f64) -> Result<f64, String> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("oov_weight must be finite and >= 0, got {x}"))
    }
}

pub(crate) fn check_probability(x: f64) -> Result<f64, String> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("probability must be in [0, 1], got {x}"))
    }
}

pub(crate) fn check_alpha(x: f64) -> Result<f64, String> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("alpha must be finite and >= 0, got {x}"))
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: cannot parse {value:?}"))
}

/// Reads a `key=value` file (`#` starts a comment). Relative paths are
/// resolved against the file's directory and must exist.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_config(&text, base).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn parse_config(text: &str, base: &Path) -> Result<Config, String> {
    let mut c = Config::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| format!("line {}: {msg}", lineno + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at("expected key=value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let file = |value: &str| -> Result<Option<PathBuf>, String> {
            let p = base.join(value);
            if p.exists() {
                Ok(Some(p))
            } else {
                Err(format!("{key}: no such file {}", p.display()))
            }
        };
        let set: Result<(), String> = (|| {
            match key {
                "vocab" => c.vocab = file(value)?,
                "patterns" => c.patterns = file(value)?,
                "contacts" => c.contacts = file(value)?,
                "g2g" => c.g2g = file(value)?,
                "proj" => c.proj = file(value)?,
                "scorer" => c.scorer = file(value)?,
                "graph" => c.graph = file(value)?,
                "corpus" => c.corpus = file(value)?,
                "lambda" => c.lambda = check_lambda(number(key, value)?)?,
                "beam" => c.beam = check_positive(key, number(key, value)?)?,
                "max_symbols" => c.max_symbols = check_positive(key, number(key, value)?)?,
                "nbest" => c.nbest = check_positive(key, number(key, value)?)?,
                "oov_weight" => c.oov_weight = check_oov(number(key, value)?)?,
                "order" => c.order = check_positive(key, number(key, value)?)?,
                "k_g2g" => c.k_g2g = number(key, value)?,
                "p" => c.p = check_probability(number(key, value)?)?,
                "l" => c.l = check_positive(key, number(key, value)?)?,
                "alpha" => c.alpha = check_alpha(number(key, value)?)?,
                "seed" => c.seed = number(key, value)?,
                "jobs" => c.jobs = check_positive(key, number(key, value)?)?,
                _ => return Err(format!("unknown key {key:?}")),
            }
            Ok(())
        })();
        set.map_err(at)?;
    }
    Ok(c)
}
