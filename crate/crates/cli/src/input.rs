//! Matrix and vector files.
//!
//! Plain text is `n` followed by `n·n` row-major tokens; `-inf` and `*` stand
//! for the semiring zero. JSON is `{"n": n, "rows": [[...], ...]}` with `null`
//! for the zero. In max-times mode entries are nonnegative reals and are
//! stored as their logarithms.

use std::fmt;

use serde_json::Value;
use tropical_core::{TropicalMatrix, TropicalVector, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// Pick JSON if the text starts with `{` or `[`, plain otherwise.
    #[default]
    Auto,
    Plain,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Semiring {
    #[default]
    Maxplus,
    Maxtimes,
}

impl Semiring {
    pub fn name(self) -> &'static str {
        match self {
            Semiring::Maxplus => "maxplus",
            Semiring::Maxtimes => "maxtimes",
        }
    }

    /// Internal (max-plus) value of an entry read from a file.
    fn ingest(self, x: f64) -> Result<f64, &'static str> {
        match self {
            Semiring::Maxplus if x.is_nan() || x == f64::INFINITY => {
                Err("entry must be finite or -inf")
            }
            Semiring::Maxplus => Ok(x),
            Semiring::Maxtimes if x.is_nan() || x < 0.0 || x.is_infinite() => {
                Err("max-times entries must be finite and nonnegative")
            }
            Semiring::Maxtimes if x == 0.0 => Ok(ZERO),
            Semiring::Maxtimes => Ok(x.ln()),
        }
    }

    /// Value to report for an internal scalar.
    pub fn export(self, x: f64) -> f64 {
        match self {
            Semiring::Maxplus => x,
            Semiring::Maxtimes => x.exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let mut start = None;
        for (c, ch) in line
            .char_indices()
            .chain(std::iter::once((line.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(c),
                (true, Some(s)) => {
                    out.push(Token {
                        text: &line[s..c],
                        line: l + 1,
                        column: line[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
    }
    out
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn plain_entry(tok: &Token<'_>, semiring: Semiring) -> Result<f64, ParseError> {
    let x = match tok.text {
        "*" | "-inf" => return Ok(ZERO),
        s => s
            .parse::<f64>()
            .ok()
            .filter(|_| !s.eq_ignore_ascii_case("nan") && !s.to_ascii_lowercase().contains("inf"))
            .ok_or_else(|| err(tok.line, tok.column, format!("bad token `{s}`")))?,
    };
    semiring
        .ingest(x)
        .map_err(|m| err(tok.line, tok.column, format!("{m}, found `{}`", tok.text)))
}

fn plain_size(toks: &[Token<'_>], text: &str) -> Result<usize, ParseError> {
    let first = toks.first().ok_or_else(|| {
        let (l, c) = end_position(text);
        err(l, c, "empty input")
    })?;
    first.text.parse::<usize>().map_err(|_| {
        err(
            first.line,
            first.column,
            format!("expected a size, found `{}`", first.text),
        )
    })
}

fn parse_plain_entries(
    text: &str,
    semiring: Semiring,
    want: impl Fn(usize) -> usize,
) -> Result<(usize, Vec<f64>), ParseError> {
    let toks = tokens(text);
    let n = plain_size(&toks, text)?;
    let need = want(n);
    let body = &toks[1..];
    if body.len() < need {
        let (l, c) = end_position(text);
        return Err(err(
            l,
            c,
            format!("expected {need} entries for n = {n}, found {}", body.len()),
        ));
    }
    if let Some(extra) = body.get(need) {
        return Err(err(
            extra.line,
            extra.column,
            format!("expected {need} entries for n = {n}, found more"),
        ));
    }
    let entries = body
        .iter()
        .map(|t| plain_entry(t, semiring))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((n, entries))
}

fn json_value(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| err(e.line(), e.column(), e.to_string()))
}

/// `serde_json` keeps no positions for values, so JSON diagnostics point at
/// the start of the document and name the offending path instead.
fn json_entry(v: &Value, path: &str, semiring: Semiring) -> Result<f64, ParseError> {
    match v {
        Value::Null => Ok(ZERO),
        Value::Number(x) => {
            let x = x
                .as_f64()
                .ok_or_else(|| err(1, 1, format!("{path}: not a number")))?;
            semiring
                .ingest(x)
                .map_err(|m| err(1, 1, format!("{path}: {m}")))
        }
        Value::String(s) if s == "-inf" => Ok(ZERO),
        other => Err(err(
            1,
            1,
            format!("{path}: expected a number or null, found {other}"),
        )),
    }
}

fn detect(text: &str, format: Format) -> Format {
    match format {
        Format::Auto => match text.trim_start().chars().next() {
            Some('{') | Some('[') => Format::Json,
            _ => Format::Plain,
        },
        f => f,
    }
}

pub fn parse_matrix(
    text: &str,
    format: Format,
    semiring: Semiring,
) -> Result<TropicalMatrix, ParseError> {
    let rows = match detect(text, format) {
        Format::Json => {
            let v = json_value(text)?;
            let rows = match &v {
                Value::Object(m) => m.get("rows").ok_or_else(|| err(1, 1, "missing `rows`"))?,
                Value::Array(_) => &v,
                _ => return Err(err(1, 1, "expected an object with `rows`")),
            };
            let rows = rows
                .as_array()
                .ok_or_else(|| err(1, 1, "`rows` must be an array"))?;
            if let Some(n) = v.get("n") {
                let n = n
                    .as_u64()
                    .ok_or_else(|| err(1, 1, "`n` must be a nonnegative integer"))?;
                if n as usize != rows.len() {
                    return Err(err(
                        1,
                        1,
                        format!("`n` is {n} but there are {} rows", rows.len()),
                    ));
                }
            }
            let n = rows.len();
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    let row = row
                        .as_array()
                        .ok_or_else(|| err(1, 1, format!("rows[{i}] must be an array")))?;
                    if row.len() != n {
                        return Err(err(
                            1,
                            1,
                            format!("rows[{i}] has {} entries, expected {n}", row.len()),
                        ));
                    }
                    row.iter()
                        .enumerate()
                        .map(|(j, x)| json_entry(x, &format!("rows[{i}][{j}]"), semiring))
                        .collect()
                })
                .collect::<Result<Vec<Vec<f64>>, _>>()?
        }
        _ => {
            let (n, entries) = parse_plain_entries(text, semiring, |n| n * n)?;
            entries
                .chunks(n.max(1))
                .map(<[f64]>::to_vec)
                .take(n)
                .collect()
        }
    };
    if rows.is_empty() {
        return Err(err(1, 1, "matrix must have at least one row"));
    }
    TropicalMatrix::from_rows(rows).map_err(|e| err(1, 1, e.to_string()))
}

/// Plain: `n` then `n` entries. JSON: an array, or `{"n": n, "entries": [...]}`.
pub fn parse_vector(
    text: &str,
    format: Format,
    semiring: Semiring,
) -> Result<TropicalVector, ParseError> {
    let entries = match detect(text, format) {
        Format::Json => {
            let v = json_value(text)?;
            let list = match &v {
                Value::Object(m) => m
                    .get("entries")
                    .ok_or_else(|| err(1, 1, "missing `entries`"))?,
                _ => &v,
            };
            list.as_array()
                .ok_or_else(|| err(1, 1, "expected an array of entries"))?
                .iter()
                .enumerate()
                .map(|(i, x)| json_entry(x, &format!("entries[{i}]"), semiring))
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => parse_plain_entries(text, semiring, |n| n)?.1,
    };
    if entries.is_empty() {
        return Err(err(1, 1, "vector must have at least one entry"));
    }
    TropicalVector::new(entries).map_err(|e| err(1, 1, e.to_string()))
}

fn plain_token(x: f64, semiring: Semiring) -> String {
    match semiring {
        Semiring::Maxplus if x == ZERO => "-inf".to_string(),
        Semiring::Maxtimes if x == ZERO => "0".to_string(),
        s => format!("{}", s.export(x)),
    }
}

/// Plain-text form read back exactly by [`parse_matrix`] in max-plus mode.
pub fn emit_plain(a: &TropicalMatrix, semiring: Semiring) -> String {
    let mut out = format!("{}\n", a.dim());
    for row in a.rows() {
        let line: Vec<String> = row.iter().map(|&x| plain_token(x, semiring)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
