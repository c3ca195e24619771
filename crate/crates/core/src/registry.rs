//! Plain-text registry of known optima.
//!
//! One entry per line: `name optimum [max_trials]`. Blank lines and `#` comments are
//! ignored. `name` is either a bare instance name, resolved to `<dir>/<name>.tsp`
//! relative to the registry file, or a path to a `.tsp` file.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("could not read registry `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("registry line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub name: String,
    pub path: PathBuf,
    pub optimum: i64,
    pub max_trials: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

impl Registry {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, RegistryError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(RegistryError::Malformed {
                    line: i + 1,
                    message: format!("expected `name optimum [max_trials]`, got `{line}`"),
                });
            }
            let optimum: i64 = fields[1]
                .parse()
                .ok()
                .filter(|v| *v > 0)
                .ok_or_else(|| RegistryError::Malformed {
                    line: i + 1,
                    message: format!("optimum `{}` is not a positive integer", fields[1]),
                })?;
            let max_trials = match fields.get(2) {
                Some(s) => Some(s.parse().map_err(|_| RegistryError::Malformed {
                    line: i + 1,
                    message: format!("max_trials `{s}` is not a count"),
                })?),
                None => None,
            };
            let target = fields[0];
            let (name, path) = if target.contains('/') || target.ends_with(".tsp") {
                let p = base.join(target);
                let stem = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| target.to_string());
                (stem, p)
            } else {
                (target.to_string(), base.join(format!("{target}.tsp")))
            };
            entries.push(RegistryEntry {
                name,
                path,
                optimum,
                max_trials,
            });
        }
        Ok(Registry { entries })
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&RegistryEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn optimum_of(&self, name: &str) -> Option<i64> {
        self.get(name).map(|e| e.optimum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_paths_and_overrides() {
        let text = "# comment\natt532 27686\n\nsub/u574.tsp 36905 100 # trailing\n";
        let reg = Registry::parse(text, Path::new("/data")).unwrap();
        assert_eq!(reg.entries().len(), 2);
        assert_eq!(reg.entries()[0].path, PathBuf::from("/data/att532.tsp"));
        assert_eq!(reg.entries()[1].name, "u574");
        assert_eq!(reg.entries()[1].max_trials, Some(100));
        assert_eq!(reg.optimum_of("att532"), Some(27686));
        assert_eq!(reg.optimum_of("nope"), None);
    }

    #[test]
    fn rejects_non_positive_optimum() {
        assert!(Registry::parse("x 0\n", Path::new(".")).is_err());
        assert!(Registry::parse("x -5\n", Path::new(".")).is_err());
        assert!(Registry::parse("x\n", Path::new(".")).is_err());
    }
}
