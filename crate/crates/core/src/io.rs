//! Point-cloud file formats.
//!
//! * CSV: one point per row, comma-separated reals with `.` as decimal
//!   separator and a uniform column count. A first row containing any
//!   non-numeric token is treated as a header. Blank lines are skipped.
//! * OFF: the `OFF` keyword, a `V F E` counts line, then `V` vertex lines whose
//!   first three tokens are the coordinates. Faces and anything after the
//!   vertices are ignored. `#` starts a comment.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::cloud::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Csv,
    Off,
}

impl CloudFormat {
    /// `.off` (any case) selects OFF, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("off") => CloudFormat::Off,
            _ => CloudFormat::Csv,
        }
    }
}

/// A line-numbered parse failure (lines are 1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn parse_real(tok: &str) -> Option<f64> {
    tok.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_csv(text: &str) -> Result<PointCloud, ParseError> {
    let mut data = Vec::new();
    let mut dim = None;
    let mut first_content = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = row.split(',').collect();
        let values: Vec<Option<f64>> = tokens.iter().map(|t| parse_real(t)).collect();
        if first_content {
            first_content = false;
            if values.iter().any(Option::is_none) {
                // header row
                continue;
            }
        }
        let d = *dim.get_or_insert(tokens.len());
        if tokens.len() != d {
            return Err(err(line, format!("expected {d} columns, found {}", tokens.len())));
        }
        for (tok, v) in tokens.iter().zip(values) {
            data.push(v.ok_or_else(|| err(line, format!("not a finite number: {:?}", tok.trim())))?);
        }
    }
    let dim = dim.ok_or_else(|| err(1, "no data rows"))?;
    PointCloud::new(data, dim).map_err(|e| err(1, e.to_string()))
}

pub fn parse_off(text: &str) -> Result<PointCloud, ParseError> {
    // (line number, tokens) of every non-empty, non-comment line
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then(|| (i + 1, content.split_whitespace().collect::<Vec<_>>()))
    });

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty file, expected OFF header"))?;
    let mut counts: Vec<&str> = Vec::new();
    match header.first() {
        Some(&"OFF") => counts.extend_from_slice(&header[1..]),
        Some(tok) if tok.starts_with("OFF") => {
            return Err(err(line, format!("unsupported OFF variant {tok:?}")));
        }
        _ => return Err(err(line, "missing OFF header")),
    }
    let mut counts_line = line;
    if counts.is_empty() {
        let (l, toks) = lines.next().ok_or_else(|| err(line + 1, "missing vertex/face/edge counts"))?;
        counts = toks;
        counts_line = l;
    }
    if counts.len() < 2 {
        return Err(err(counts_line, "counts line must hold V F E"));
    }
    let vertices: usize = counts[0]
        .parse()
        .map_err(|_| err(counts_line, format!("invalid vertex count {:?}", counts[0])))?;
    if vertices == 0 {
        return Err(err(counts_line, "vertex count is zero"));
    }
    let mut data = Vec::with_capacity(vertices * 3);
    for k in 0..vertices {
        let (l, toks) = lines
            .next()
            .ok_or_else(|| err(counts_line, format!("expected {vertices} vertices, found {k}")))?;
        if toks.len() < 3 {
            return Err(err(l, format!("vertex line needs 3 coordinates, found {}", toks.len())));
        }
        for tok in &toks[..3] {
            data.push(parse_real(tok).ok_or_else(|| err(l, format!("not a finite number: {tok:?}")))?);
        }
    }
    PointCloud::new(data, 3).map_err(|e| err(counts_line, e.to_string()))
}

pub fn parse_cloud(text: &str, format: CloudFormat) -> Result<PointCloud, ParseError> {
    match format {
        CloudFormat::Csv => parse_csv(text),
        CloudFormat::Off => parse_off(text),
    }
}

/// Reads a cloud, choosing the format from the file extension.
pub fn load_cloud(path: &Path) -> Result<PointCloud, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    parse_cloud(&text, CloudFormat::from_path(path)).map_err(|source| LoadError::Parse { path: path.to_path_buf(), source })
}

/// Real number with 17 significant digits, enough to round-trip any `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a cloud as header-less CSV.
pub fn to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|v| format_real(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes a cloud as an OFF file without faces (3D clouds only).
pub fn to_off(cloud: &PointCloud) -> Option<String> {
    if cloud.dim() != 3 {
        return None;
    }
    let mut out = format!("OFF\n{} 0 0\n", cloud.len());
    for p in cloud.points() {
        out.push_str(&format!("{} {} {}\n", format_real(p[0]), format_real(p[1]), format_real(p[2])));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_and_without_header() {
        let c = parse_csv("x,y\n1,2\n3.5,-4e-1\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[3.5, -0.4]);
        let c = parse_csv("1, 2\n\n3,4\n").unwrap();
        assert_eq!(c.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        assert_eq!(parse_csv("1,2\n3\n").unwrap_err().line, 2);
        assert_eq!(parse_csv("a,b\n1,2\n3,zz\n").unwrap_err().line, 3);
        assert!(parse_csv("x,y\n").is_err());
        assert_eq!(parse_csv("1,2\n1,nan\n").unwrap_err().line, 2);
    }

    #[test]
    fn off_vertices_only() {
        let text = "OFF\n# a comment\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 2 3\n";
        let c = parse_off(text).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.dim(), 3);
        assert_eq!(c.point(3), &[0.0, 0.0, 1.0]);
        // counts on the header line
        let c = parse_off("OFF 1 0 0\n1.5 2 3\n").unwrap();
        assert_eq!(c.point(0), &[1.5, 2.0, 3.0]);
    }

    #[test]
    fn off_malformed_headers() {
        assert_eq!(parse_off("PLY\n1 0 0\n0 0 0\n").unwrap_err().line, 1);
        assert_eq!(parse_off("\n\nCOFF\n1 0 0\n").unwrap_err().line, 3);
        assert_eq!(parse_off("OFF\nx 0 0\n").unwrap_err().line, 2);
        let e = parse_off("OFF\n3 0 0\n0 0 0\n1 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.to_string().starts_with("line 4:"));
        assert!(parse_off("OFF\n3 0 0\n0 0 0\n").is_err());
    }

    #[test]
    fn writers_round_trip() {
        let c = PointCloud::from_rows(&[vec![0.1, 1.0 / 3.0, -2.5e-300], vec![1e10, 7.0, 0.0]]).unwrap();
        assert_eq!(parse_csv(&to_csv(&c)).unwrap(), c);
        assert_eq!(parse_off(&to_off(&c).unwrap()).unwrap(), c);
        assert_eq!(format_real(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
