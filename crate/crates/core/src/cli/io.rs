//! Reading instance files and writing result files.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use crate::pipeline::QueryResult;

#[derive(Debug)]
pub enum CliError {
    /// Bad or unreadable input; exit code 2.
    Input(String),
    /// Verification found a difference; exit code 1.
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Mismatch(msg) => f.write_str(msg),
        }
    }
}

pub(crate) fn input_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// 1-based line number in the file.
    pub line: u64,
    pub id: u64,
    pub coords: Vec<f64>,
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// Coordinate columns declared by the header; `None` for an empty file.
    pub dims: Option<usize>,
    pub weighted: bool,
    pub rows: Vec<Row>,
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| input_error(path, e))?;
    parse_table(&text).map_err(|e| input_error(path, e))
}

pub fn parse_table(text: &str) -> Result<Table, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = match records.next() {
        None => return Ok(Table::default()),
        Some(h) => h.map_err(|e| e.to_string())?,
    };
    if !header.get(0).is_some_and(|h| h.eq_ignore_ascii_case("id")) {
        return Err("line 1: header must start with an `id` column".into());
    }
    let weighted = header.len() > 1 && header[header.len() - 1].eq_ignore_ascii_case("weight");
    let dims = header.len() - 1 - usize::from(weighted);
    let width = header.len();

    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| e.to_string())?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(format!("line {line}: expected {width} fields, found {}", record.len()));
        }
        let id = record[0]
            .parse::<u64>()
            .map_err(|_| format!("line {line}: invalid id `{}`", &record[0]))?;
        let mut coords = Vec::with_capacity(dims);
        for field in record.iter().skip(1).take(dims) {
            match field.parse::<f64>() {
                Ok(x) if x.is_finite() => coords.push(x),
                _ => return Err(format!("line {line}: invalid coordinate `{field}`")),
            }
        }
        let weight = if weighted {
            let field = &record[width - 1];
            match field.parse::<f64>() {
                Ok(w) if !w.is_nan() => Some(w),
                _ => return Err(format!("line {line}: invalid weight `{field}`")),
            }
        } else {
            None
        };
        rows.push(Row {
            line,
            id,
            coords,
            weight,
        });
    }
    Ok(Table {
        dims: Some(dims),
        weighted,
        rows,
    })
}

/// Values the CLI can print and read back.
pub trait CliValue: Sized {
    fn render(&self) -> String;
    fn parse(text: &str) -> Option<Self>;
    fn to_json(&self) -> serde_json::Value;
}

impl CliValue for u64 {
    fn render(&self) -> String {
        self.to_string()
    }
    fn parse(text: &str) -> Option<Self> {
        text.parse().ok()
    }
    fn to_json(&self) -> serde_json::Value {
        (*self).into()
    }
}

impl CliValue for f64 {
    fn render(&self) -> String {
        format_significant(*self, 12)
    }
    fn parse(text: &str) -> Option<Self> {
        match text {
            "+inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            _ => text.parse().ok().filter(|x: &f64| x.is_finite()),
        }
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self).map_or_else(|| self.render().into(), serde_json::Value::Number)
    }
}

/// `printf("%.{digits}g")`, with `+inf` / `-inf` for infinities.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "+inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // exponent after rounding to `digits` significant digits
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_results<A: CliValue>(results: &[QueryResult<A>]) -> String {
    let mut out = String::from("id,value\n");
    for r in results {
        let _ = writeln!(out, "{},{}", r.id, r.value.render());
    }
    out
}

/// Reads an `id,value` file.
pub fn read_results<A: CliValue>(path: &Path) -> Result<Vec<QueryResult<A>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "id,value" => {}
        Some(_) => return Err(input_error(path, "line 1: expected header `id,value`")),
        None => return Ok(Vec::new()),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || input_error(path, format!("line {}: malformed row `{line}`", i + 1));
        let (id, value) = line.split_once(',').ok_or_else(bad)?;
        let id = id.trim().parse::<u64>().map_err(|_| bad())?;
        let value = A::parse(value.trim()).ok_or_else(bad)?;
        out.push(QueryResult { id, value });
    }
    Ok(out)
}

pub fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn io::Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| input_error(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}
