//! Input handling: utility matrices from plain text or JSON, priors from
//! comma lists, and the error type that maps failures onto exit codes.

use std::fmt;
use std::path::Path;

use signalgames::behavioral::Prior;
use signalgames::{parse_rational, GameError, Rat, UtilityMatrix};

/// Everything the driver can fail with. `Game` wraps library errors and
/// inherits their classification; `Message` covers I/O and file-format
/// problems, which count as bad input.
#[derive(Debug)]
pub enum CliError {
    Game(GameError),
    Message(String),
}

impl CliError {
    pub fn msg(text: impl Into<String>) -> Self {
        CliError::Message(text.into())
    }

    /// Process exit code: 2 for bad input (parse, dimension, domain, I/O,
    /// usage), 3 when the instance is valid but exceeds an exact-solver
    /// limit.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Game(GameError::SizeLimit(_)) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Game(e) => e.fmt(f),
            CliError::Message(text) => f.write_str(text),
        }
    }
}

impl std::error::Error for CliError {}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Game(e)
    }
}

/// Reads a utility matrix. Files starting with `{` or `[` are JSON — either
/// a bare array of rows or an object with a `"u"` field, so a JSON report
/// emitted by `analyze` feeds straight back in. Anything else is plain
/// text: one row per line, whitespace-separated rationals, `#` comments.
pub fn read_matrix(path: &Path) -> Result<UtilityMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::msg(format!("{}: {e}", path.display())))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        parse_json_matrix(path, &text)
    } else {
        parse_text_matrix(path, &text)
    }
}

fn parse_text_matrix(path: &Path, text: &str) -> Result<UtilityMatrix, CliError> {
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let value = parse_rational(token)
                .map_err(|e| CliError::msg(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::msg(format!(
            "{}: no matrix rows found",
            path.display()
        )));
    }
    UtilityMatrix::new(rows).map_err(|e| CliError::msg(format!("{}: {e}", path.display())))
}

fn parse_json_matrix(path: &Path, text: &str) -> Result<UtilityMatrix, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::msg(format!("{}: {e}", path.display())))?;
    let rows_value = match &value {
        serde_json::Value::Object(map) => map.get("u").ok_or_else(|| {
            CliError::msg(format!("{}: JSON object has no \"u\" field", path.display()))
        })?,
        other @ serde_json::Value::Array(_) => other,
        _ => {
            return Err(CliError::msg(format!(
                "{}: expected an array of rows or an object with a \"u\" field",
                path.display()
            )))
        }
    };
    let outer = rows_value.as_array().ok_or_else(|| {
        CliError::msg(format!("{}: \"u\" must be an array of rows", path.display()))
    })?;
    let mut rows = Vec::with_capacity(outer.len());
    for (i, row_value) in outer.iter().enumerate() {
        let cells = row_value
            .as_array()
            .ok_or_else(|| CliError::msg(format!("{}: row {i} is not an array", path.display())))?;
        let mut row = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            let value = json_rational(cell).map_err(|why| {
                CliError::msg(format!("{}: row {i}, column {j}: {why}", path.display()))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if let Some(declared) = value.get("q").and_then(|v| v.as_u64()) {
        if declared as usize != rows.len() {
            return Err(CliError::msg(format!(
                "{}: declared q = {declared} but found {} rows",
                path.display(),
                rows.len()
            )));
        }
    }
    UtilityMatrix::new(rows).map_err(|e| CliError::msg(format!("{}: {e}", path.display())))
}

fn json_rational(cell: &serde_json::Value) -> Result<Rat, String> {
    match cell {
        serde_json::Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(|k| Rat::from_integer(k.into()))
            .ok_or_else(|| "exact rationals required; write \"1/3\", not a float".to_string()),
        _ => Err("expected a rational string or an integer".to_string()),
    }
}

/// Parses `--prior "1/2,1/4,1/4"` against the alphabet size.
pub fn parse_prior(spec: &str, q: usize) -> Result<Prior, CliError> {
    let mut weights = Vec::new();
    for part in spec.split(',') {
        let token = part.trim();
        if token.is_empty() {
            return Err(CliError::msg(format!("--prior: empty entry in \"{spec}\"")));
        }
        let value =
            parse_rational(token).map_err(|e| CliError::msg(format!("--prior: {e}")))?;
        weights.push(value);
    }
    if weights.len() != q {
        return Err(CliError::msg(format!(
            "--prior: expected {q} entries, got {}",
            weights.len()
        )));
    }
    Prior::new(weights).map_err(CliError::from)
}
