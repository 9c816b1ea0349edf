//! MatrixMarket I/O (coordinate and array flavours, real general) and
//! plain-text vectors with one value per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::markov::dense::DenseMatrix;
use crate::markov::sparse::CsrMatrix;

pub const COORDINATE_HEADER: &str = "%%MatrixMarket matrix coordinate real general";
pub const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
}

fn parse_header(line: &str) -> Result<Header> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::parse(
            "MatrixMarket header",
            format!("unrecognised header `{line}`"),
        ));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => {
            return Err(Error::parse(
                "MatrixMarket header",
                format!("unsupported format `{other}`"),
            ))
        }
    };
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::parse(
            "MatrixMarket header",
            format!("unsupported field `{}`", tokens[3]),
        ));
    }
    if tokens[4] != "general" {
        return Err(Error::parse(
            "MatrixMarket header",
            format!("unsupported symmetry `{}`", tokens[4]),
        ));
    }
    Ok(Header { layout })
}

/// Data lines with comments and blank lines removed, numbered from 1.
fn content_lines<R: BufRead>(reader: R) -> Result<(String, Vec<(usize, String)>)> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse("MatrixMarket", "empty input"))??;
    let mut body = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        body.push((k + 2, trimmed.to_string()));
    }
    Ok((header, body))
}

fn parse_usize(tok: Option<&str>, line_no: usize) -> Result<usize> {
    tok.ok_or_else(|| Error::parse(format!("line {line_no}"), "missing integer"))?
        .parse()
        .map_err(|e| Error::parse(format!("line {line_no}"), format!("{e}")))
}

fn parse_f64(tok: Option<&str>, line_no: usize) -> Result<f64> {
    let v: f64 = tok
        .ok_or_else(|| Error::parse(format!("line {line_no}"), "missing value"))?
        .parse()
        .map_err(|e| Error::parse(format!("line {line_no}"), format!("{e}")))?;
    if !v.is_finite() {
        return Err(Error::parse(format!("line {line_no}"), "non-finite value"));
    }
    Ok(v)
}

/// Reads a sparse matrix in coordinate format (1-based indices).
pub fn read_coordinate<R: Read>(reader: R) -> Result<CsrMatrix> {
    let (header, body) = content_lines(BufReader::new(reader))?;
    if parse_header(&header)?.layout != Layout::Coordinate {
        return Err(Error::parse("MatrixMarket", "expected coordinate format"));
    }
    let mut it = body.into_iter();
    let (size_no, size_line) = it
        .next()
        .ok_or_else(|| Error::parse("MatrixMarket", "missing size line"))?;
    let mut toks = size_line.split_whitespace();
    let rows = parse_usize(toks.next(), size_no)?;
    let cols = parse_usize(toks.next(), size_no)?;
    let nnz = parse_usize(toks.next(), size_no)?;
    let mut triplets = Vec::with_capacity(nnz);
    for (line_no, line) in it {
        let mut toks = line.split_whitespace();
        let i = parse_usize(toks.next(), line_no)?;
        let j = parse_usize(toks.next(), line_no)?;
        let v = parse_f64(toks.next(), line_no)?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::parse(
                format!("line {line_no}"),
                format!("index ({i}, {j}) outside {rows}x{cols}"),
            ));
        }
        triplets.push((i - 1, j - 1, v));
    }
    if triplets.len() != nnz {
        return Err(Error::parse(
            "MatrixMarket",
            format!(
                "size line announces {nnz} entries, found {}",
                triplets.len()
            ),
        ));
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}

pub fn read_coordinate_file(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    read_coordinate(File::open(path)?)
}

/// Writes a sparse matrix in coordinate format, entries in row-major storage order.
pub fn write_coordinate<W: Write>(m: &CsrMatrix, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{COORDINATE_HEADER}")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coordinate_file(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_coordinate(m, File::create(path)?)
}

/// Reads a dense matrix in array format (column-major values).
pub fn read_array<R: Read>(reader: R) -> Result<DenseMatrix> {
    let (header, body) = content_lines(BufReader::new(reader))?;
    if parse_header(&header)?.layout != Layout::Array {
        return Err(Error::parse("MatrixMarket", "expected array format"));
    }
    let mut it = body.into_iter();
    let (size_no, size_line) = it
        .next()
        .ok_or_else(|| Error::parse("MatrixMarket", "missing size line"))?;
    let mut toks = size_line.split_whitespace();
    let rows = parse_usize(toks.next(), size_no)?;
    let cols = parse_usize(toks.next(), size_no)?;
    let mut m = DenseMatrix::zeros(rows, cols);
    let mut count = 0usize;
    for (line_no, line) in it {
        for tok in line.split_whitespace() {
            if count >= rows * cols {
                return Err(Error::parse(format!("line {line_no}"), "too many values"));
            }
            let v = parse_f64(Some(tok), line_no)?;
            m[(count % rows, count / rows)] = v;
            count += 1;
        }
    }
    if count != rows * cols {
        return Err(Error::parse(
            "MatrixMarket",
            format!("expected {} values, found {count}", rows * cols),
        ));
    }
    Ok(m)
}

pub fn read_array_file(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_array(File::open(path)?)
}

pub fn write_array<W: Write>(m: &DenseMatrix, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "{ARRAY_HEADER}")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            writeln!(w, "{:e}", m[(i, j)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_array_file(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_array(m, File::create(path)?)
}

/// Reads a vector stored as one value per line; blank lines and `#` comments are skipped.
pub fn read_vector<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_f64(Some(t), k + 1)?);
    }
    Ok(out)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    read_vector(File::open(path)?)
}

pub fn write_vector<W: Write>(v: &[f64], writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_vector_file(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_vector(v, File::create(path)?)
}
