use std::collections::BTreeMap;
use std::fmt;

/// Configuration parse error with position information.
#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Flat key=value store with dotted keys, `#` comments, blank lines ignored.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    map: BTreeMap<String, (String, usize)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let eq = line.find('=').ok_or(ConfigError {
                line: line_no,
                column: line.len(),
                message: "expected key = value".to_string(),
            })?;
            let key = line[..eq].trim();
            if key.is_empty() {
                return Err(ConfigError {
                    line: line_no,
                    column: 1,
                    message: "empty key".to_string(),
                });
            }
            let value = line[eq + 1..].trim();
            if map.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
                return Err(ConfigError {
                    line: line_no,
                    column: 1,
                    message: format!("duplicate key {key}"),
                });
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(v, _)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or(ConfigError {
            line: 0,
            column: 0,
            message: format!("missing required key {key}"),
        })
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some((v, line)) => v.parse().map_err(|_| ConfigError {
                line: *line,
                column: 1,
                message: format!("key {key}: expected a number, got {v:?}"),
            }),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.map.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| ConfigError {
                line: *line,
                column: 1,
                message: format!("key {key}: expected an integer, got {v:?}"),
            }),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(|s| s.as_str())
    }
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
    Table,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "csv" => Ok(Self::Csv),
            "jsonl" | "json-lines" => Ok(Self::JsonLines),
            "table" | "text-table" => Ok(Self::Table),
            other => Err(format!("unknown format {other:?}; expected csv, jsonl or table")),
        }
    }
}
