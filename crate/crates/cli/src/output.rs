//! CSV output: LF line endings, numbers at nine significant digits.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use csv::{Terminator, WriterBuilder};

use crate::error::CliError;

/// Significant digits kept in every written number.
pub const SIG_DIGITS: usize = 9;

/// Magnitudes outside `[SCI_LOW, SCI_HIGH)` are written in exponent form.
const SCI_LOW: f64 = 1e-6;
const SCI_HIGH: f64 = 1e15;

/// Shortest decimal form of `x` rounded to nine significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("valid float literal");
    // normalise -0 so identical runs never differ in sign of zero
    if rounded == 0.0 {
        return "0".into();
    }
    if (SCI_LOW..SCI_HIGH).contains(&rounded.abs()) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

/// A header and rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, sink: W, label: &str) -> Result<(), CliError> {
        let csv_err = |source| CliError::Csv {
            path: label.to_owned(),
            source,
        };
        let mut w = WriterBuilder::new().terminator(Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| csv_err(e.into()))
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => {
                let file = File::create(p).map_err(|source| CliError::Io {
                    path: p.to_owned(),
                    source,
                })?;
                self.write_to(io::BufWriter::new(file), &p.display().to_string())
            }
            None => self.write_to(io::stdout().lock(), "<stdout>"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(format_number(1.0 / 3.0), "0.333333333");
        assert_eq!(format_number(123456789.4), "123456789");
        assert_eq!(format_number(2.5), "2.5");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.110223024625e-16), "1.11022302e-16");
        assert_eq!(format_number(0.000123), "0.000123");
        assert_eq!(format_number(-2.5e20), "-2.5e20");
    }

    #[test]
    fn lf_only() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        let mut buf = Vec::new();
        t.write_to(&mut buf, "mem").unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2\n");
    }
}
