//! Tabular output. CSV carries every value at full round-trip precision;
//! the text form is for reading at a terminal.

use std::io::Write;

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // `{:?}` is the shortest representation that round-trips
            Cell::Real(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn text(&self, decimals: usize) -> String {
        match self {
            Cell::Real(v) => format!("{v:.decimals$}"),
            other => other.csv(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Decimal places in text output.
    pub decimals: usize,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new(), decimals: 6 }
    }

    pub fn with_decimals(mut self, decimals: usize) -> Self {
        self.decimals = decimals;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Text => self.write_text(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush().map_err(CliError::Stdout)?;
        Ok(())
    }

    fn write_text<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|c| c.text(self.decimals)).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|k| cells.iter().map(|r| r[k].len()).chain([self.header[k].len()]).max().unwrap_or(0))
            .collect();
        let line = |fields: Vec<&str>| {
            let padded: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:>w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let io = CliError::Stdout;
        writeln!(out, "{}", line(self.header.clone())).map_err(io)?;
        for row in &cells {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect())).map_err(io)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec!["n", "value", "flag", "note"]);
        t.push(vec![3usize.into(), 1.25.into(), true.into(), Cell::Empty]);
        t.push(vec![4usize.into(), (1.0 + 2f64.sqrt()).into(), false.into(), "a,b".into()]);
        t
    }

    #[test]
    fn csv_round_trips_reals() {
        let mut buf = Vec::new();
        sample().write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,value,flag,note\n3,1.25,true,\n4,2.414213562373095,false,\"a,b\"\n");
        let v: f64 = "2.414213562373095".parse().unwrap();
        assert_eq!(v, 1.0 + 2f64.sqrt());
    }

    #[test]
    fn text_is_aligned() {
        let mut buf = Vec::new();
        sample().with_decimals(3).write(&mut buf, Format::Text).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n  value   flag  note\n3  1.250   true\n4  2.414  false   a,b\n");
    }
}
