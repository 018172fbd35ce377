//! CSV matrices (two columns `re,im` per complex entry, row-major, optional
//! header) and CSV export of sampled functions.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::function_spaces::SampledFunction;
use crate::linalg::{CMat, CVec, C64};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        column,
        message: message.into(),
    }
}

/// Load a complex matrix. A first row that does not parse as numbers is taken
/// as a header. `expected` is `(rows, cols)` in complex entries.
pub fn load_matrix(path: impl AsRef<Path>, expected: Option<(usize, usize)>) -> Result<CMat> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, 0, e.to_string())
        })?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = rec.iter().map(str::parse::<f64>).collect();
        if i == 0 && parsed.iter().any(|p| p.is_err()) {
            continue;
        }
        if rec.len() % 2 != 0 {
            return Err(parse_err(
                path,
                line,
                rec.len(),
                format!("{} fields; complex entries need re,im pairs", rec.len()),
            ));
        }
        let mut vals = Vec::with_capacity(rec.len());
        for (col, (p, raw)) in parsed.into_iter().zip(rec.iter()).enumerate() {
            match p {
                Ok(v) if v.is_finite() => vals.push(v),
                Ok(_) => return Err(parse_err(path, line, col + 1, format!("non-finite value {raw:?}"))),
                Err(_) => return Err(parse_err(path, line, col + 1, format!("not a number: {raw:?}"))),
            }
        }
        let n = vals.len() / 2;
        match width {
            None => width = Some(n),
            Some(w) if w != n => {
                return Err(parse_err(
                    path,
                    line,
                    rec.len(),
                    format!("row has {n} complex entries, expected {w}"),
                ))
            }
            _ => {}
        }
        rows.push(vals.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let cols = width.unwrap_or(0);
    if rows.is_empty() {
        return Err(parse_err(path, 1, 0, "no data rows"));
    }
    if let Some((er, ec)) = expected {
        if (rows.len(), cols) != (er, ec) {
            return Err(Error::Dimension(format!(
                "{}: matrix is {}x{}, expected {er}x{ec}",
                path.display(),
                rows.len(),
                cols
            )));
        }
    }
    Ok(CMat::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

/// Load a column vector stored as one `re,im` row per entry.
pub fn load_vector(path: impl AsRef<Path>, expected_len: Option<usize>) -> Result<CVec> {
    let m = load_matrix(path.as_ref(), expected_len.map(|n| (n, 1)))?;
    if m.ncols() != 1 {
        return Err(Error::Dimension(format!(
            "{}: expected a single complex column",
            path.as_ref().display()
        )));
    }
    Ok(m.column(0).into_owned())
}

/// Save with shortest round-trip formatting, so `load_matrix(save_matrix(x)) == x` bitwise.
pub fn save_matrix(path: impl AsRef<Path>, m: &CMat) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let header: Vec<String> = (1..=m.ncols())
        .flat_map(|j| [format!("re{j}"), format!("im{j}")])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in 0..m.nrows() {
        let fields: Vec<String> = m
            .row(r)
            .iter()
            .flat_map(|z| [z.re.to_string(), z.im.to_string()])
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn save_vector(path: impl AsRef<Path>, v: &CVec) -> Result<()> {
    save_matrix(path, &CMat::from_column_slice(v.len(), 1, v.as_slice()))
}

/// `x,re,im` rows.
pub fn save_sampled_function(path: impl AsRef<Path>, f: &SampledFunction) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = String::from("x,re,im\n");
    for (x, re, im) in f.rows() {
        out.push_str(&format!("{x},{re},{im}\n"));
    }
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}
