//! Plain-text tensor records.
//!
//! ```text
//! tensor
//! row_dims 2 2
//! col_dims 2 2
//! entries 16
//! 1 0
//! 0.5 -0.25
//! ...
//! ```
//!
//! One `re im` pair per line, row-major over `(i₁…i_M, j₁…j_N)`. Floats are
//! written in Rust's shortest round-trip form so reading back is exact.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::C64;

use super::{Tensor, TensorShape};

pub fn to_text(t: &Tensor) -> String {
    let mut out = String::from("tensor\n");
    let join = |d: &[usize]| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "row_dims {}", join(t.shape().row_dims()));
    let _ = writeln!(out, "col_dims {}", join(t.shape().col_dims()));
    let entries = t.entries();
    let _ = writeln!(out, "entries {}", entries.len());
    for z in entries {
        let _ = writeln!(out, "{} {}", z.re, z.im);
    }
    out
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("tensor record line {line}: {msg}"))
}

pub fn from_text(text: &str) -> Result<Tensor> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::Config(format!("tensor record ended before {what}")))
    };

    let (n, magic) = next("header")?;
    if magic != "tensor" {
        return Err(parse_err(n, format!("expected `tensor`, found `{magic}`")));
    }
    let mut dims = |key: &str| -> Result<Vec<usize>> {
        let (n, line) = next(key)?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(parse_err(n, format!("expected `{key}`")));
        }
        parts
            .map(|p| p.parse::<usize>().map_err(|e| parse_err(n, e)))
            .collect()
    };
    let row_dims = dims("row_dims")?;
    let col_dims = dims("col_dims")?;
    let shape = TensorShape::new(row_dims, col_dims)?;

    let (n, line) = next("entries")?;
    let count = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["entries", c] => c.parse::<usize>().map_err(|e| parse_err(n, e))?,
        _ => return Err(parse_err(n, "expected `entries <count>`")),
    };
    if count != shape.unfold_rows() * shape.unfold_cols() {
        return Err(parse_err(
            n,
            format!("{count} entries do not fit shape {shape:?}"),
        ));
    }
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, line) = next("all entries")?;
        let mut parts = line.split_whitespace();
        let mut num = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| parse_err(n, "expected `re im`"))?
                .parse::<f64>()
                .map_err(|e| parse_err(n, e))
        };
        let re = num()?;
        let im = num()?;
        entries.push(C64::new(re, im));
    }
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "trailing content after entries"));
    }
    Tensor::from_entries(shape, entries)
}

pub fn write_file(path: &Path, t: &Tensor) -> Result<()> {
    std::fs::write(path, to_text(t))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Tensor> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{random, rng};

    #[test]
    fn round_trip_is_exact() {
        let mut r = rng::seeded(3);
        let shape = TensorShape::new(vec![2, 2], vec![2, 2]).unwrap();
        let t = random::gaussian_tensor(&mut r, &shape);
        let back = from_text(&to_text(&t)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        let t = Tensor::from_diagonal(&[3], &[1.0, -0.1, 1e-300]).unwrap();
        write_file(&path, &t).unwrap();
        assert_eq!(read_file(&path).unwrap(), t);
    }

    #[test]
    fn rejects_wrong_count() {
        let text = "tensor\nrow_dims 2\ncol_dims 2\nentries 3\n1 0\n0 0\n0 0\n";
        assert!(matches!(from_text(text), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_truncated_record() {
        let text = "tensor\nrow_dims 1\ncol_dims 1\nentries 1\n";
        assert!(from_text(text).is_err());
    }
}
