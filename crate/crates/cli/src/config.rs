//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment line, list values are
//! comma-separated. Every diagnostic carries the offending line number so a
//! malformed file can be fixed without guesswork.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// A configuration error with its file position, rendered as
/// `path:line: message` (line 0 means the file as a whole).
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "{}:{}: {}", self.path, self.line, self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

pub type Result<T> = std::result::Result<T, ConfigError>;

/// Parsed configuration: a key to (value, line) map plus bookkeeping of the
/// keys the experiment actually consumed, so leftovers are reported as typos.
pub struct Config {
    path: String,
    entries: HashMap<String, (String, usize)>,
    used: RefCell<Vec<String>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: display.clone(),
            line: 0,
            message: format!("cannot read config: {e}"),
        })?;
        let mut entries = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
                path: display.clone(),
                line: lineno,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError {
                    path: display.clone(),
                    line: lineno,
                    message: "empty key or value".into(),
                });
            }
            if let Some((_, first)) = entries.insert(key.to_string(), (value.to_string(), lineno))
            {
                return Err(ConfigError {
                    path: display.clone(),
                    line: lineno,
                    message: format!("duplicate key `{key}` (first set on line {first})"),
                });
            }
        }
        Ok(Self {
            path: display,
            entries,
            used: RefCell::new(Vec::new()),
        })
    }

    fn err(&self, line: usize, message: String) -> ConfigError {
        ConfigError {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn raw(&self, key: &str) -> Result<(&str, usize)> {
        self.used.borrow_mut().push(key.to_string());
        self.entries
            .get(key)
            .map(|(v, l)| (v.as_str(), *l))
            .ok_or_else(|| self.err(0, format!("missing required key `{key}`")))
    }

    pub fn str_value(&self, key: &str) -> Result<&str> {
        self.raw(key).map(|(v, _)| v)
    }

    pub fn f64_value(&self, key: &str) -> Result<f64> {
        let (v, line) = self.raw(key)?;
        v.parse()
            .map_err(|_| self.err(line, format!("key `{key}`: `{v}` is not a number")))
    }

    pub fn usize_value(&self, key: &str) -> Result<usize> {
        let (v, line) = self.raw(key)?;
        v.parse()
            .map_err(|_| self.err(line, format!("key `{key}`: `{v}` is not a nonnegative integer")))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let (v, line) = self.raw(key)?;
        v.split(',')
            .map(|part| {
                let part = part.trim();
                part.parse().map_err(|_| {
                    self.err(line, format!("key `{key}`: `{part}` is not a number"))
                })
            })
            .collect()
    }

    /// Optional numeric key; `None` when absent.
    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.used.borrow_mut().push(key.to_string());
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| self.err(*line, format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    pub fn bool_opt(&self, key: &str, default: bool) -> Result<bool> {
        self.used.borrow_mut().push(key.to_string());
        match self.entries.get(key) {
            None => Ok(default),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => {
                    Err(self.err(*line, format!("key `{key}`: `{other}` is not true/false")))
                }
            },
        }
    }

    pub fn str_opt<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.used.borrow_mut().push(key.to_string());
        self.entries
            .get(key)
            .map(|(v, _)| v.as_str())
            .unwrap_or(default)
    }

    pub fn u64_opt(&self, key: &str, default: u64) -> Result<u64> {
        self.used.borrow_mut().push(key.to_string());
        match self.entries.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| {
                self.err(*line, format!("key `{key}`: `{v}` is not a nonnegative integer"))
            }),
        }
    }

    /// Reject keys never consumed by the selected experiment; a misspelled
    /// key would otherwise silently fall back to a default.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for (key, (_, line)) in &self.entries {
            if !used.iter().any(|u| u == key) {
                return Err(self.err(*line, format!("unknown key `{key}` for this experiment")));
            }
        }
        Ok(())
    }
}
