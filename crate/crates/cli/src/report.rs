//! Rendering of small result tables as CSV or as aligned text.

use std::io::{self, Write};

use idle_otto::output::{format_number, write_meta, Meta};

use crate::args::Format;

pub const TABLE_NOTICE: &str = "(human-readable table; use --format csv for the stable interface)";

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Missing, Cell::Num)
    }

    pub fn flag(b: bool) -> Cell {
        Cell::Int(u64::from(b))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn pretty(&self) -> String {
        match self {
            Cell::Num(x) if *x == 0.0 || !x.is_finite() => format!("{x}"),
            Cell::Num(x) if (1e-4..1e6).contains(&x.abs()) => format!("{x:.8}"),
            Cell::Num(x) => format!("{x:.8e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => "undefined".to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub meta: Meta,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn single(meta: Meta, fields: Vec<(&str, Cell)>) -> Report {
        let (header, row): (Vec<_>, Vec<_>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        Report {
            meta,
            header,
            rows: vec![row],
        }
    }

    pub fn render<W: Write>(&self, format: Format, w: &mut W) -> io::Result<()> {
        match format {
            Format::Csv => self.csv(w),
            Format::Table => self.table(w),
        }
    }

    fn csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_meta(w, &self.meta)?;
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let fields: Vec<_> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    fn table<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{TABLE_NOTICE}")?;
        for (k, v) in &self.meta {
            writeln!(w, "{k}: {v}")?;
        }
        if self.rows.len() == 1 {
            let width = self.header.iter().map(String::len).max().unwrap_or(0);
            for (k, v) in self.header.iter().zip(&self.rows[0]) {
                writeln!(w, "{k:<width$}  {}", v.pretty())?;
            }
            return Ok(());
        }
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::pretty).collect()).collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                cells
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.header[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: &[String]| {
            fields
                .iter()
                .zip(&widths)
                .map(|(f, &wd)| format!("{f:>wd$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(w, "{}", line(&self.header))?;
        for r in &cells {
            writeln!(w, "{}", line(r))?;
        }
        Ok(())
    }
}
