use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

/// One field of an output row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Signed(i64),
    /// Exact integer in full decimal; a string in JSON so no digits are lost.
    Big(String),
    Bool(bool),
    List(Vec<u64>),
    Text(String),
}

impl Cell {
    fn to_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Signed(v) => v.to_string(),
            Cell::Big(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::List(v) => v.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Signed(v) => Value::from(*v),
            Cell::Big(s) | Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::List(v) => Value::from(v.clone()),
        }
    }
}

pub fn open_sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Streams rows with a fixed header in one of the three formats.
///
/// CSV keeps stdout to a single schema, so its summary goes to stderr;
/// JSON ends with a `{"type":"summary"}` object and pretty text appends it.
pub struct TableWriter {
    format: Format,
    header: Vec<&'static str>,
    csv: Option<csv::Writer<Box<dyn Write>>>,
    out: Option<Box<dyn Write>>,
}

impl TableWriter {
    pub fn new(format: Format, header: Vec<&'static str>, sink: Box<dyn Write>) -> io::Result<Self> {
        if format == Format::Csv {
            let mut w = csv::Writer::from_writer(sink);
            w.write_record(&header)?;
            return Ok(TableWriter { format, header, csv: Some(w), out: None });
        }
        Ok(TableWriter { format, header, csv: None, out: Some(sink) })
    }

    pub fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.header.len());
        match self.format {
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record(cells.iter().map(Cell::to_text))?;
            }
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("type".into(), Value::from("row"));
                for (name, cell) in self.header.iter().zip(cells) {
                    obj.insert((*name).into(), cell.to_json());
                }
                let out = self.out.as_mut().expect("json sink");
                writeln!(out, "{}", Value::Object(obj))?;
            }
            Format::Pretty => {
                let line = self
                    .header
                    .iter()
                    .zip(cells)
                    .map(|(name, cell)| format!("{name}={}", cell.to_text()))
                    .collect::<Vec<_>>()
                    .join("  ");
                let out = self.out.as_mut().expect("pretty sink");
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }

    pub fn finish(self, summary: &[(&str, Cell)]) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                self.csv.expect("csv writer").flush()?;
                let line =
                    summary.iter().map(|(k, v)| format!("{k}={}", v.to_text())).collect::<Vec<_>>().join(" ");
                eprintln!("summary: {line}");
            }
            Format::Json => {
                let mut out = self.out.expect("json sink");
                let mut obj = Map::new();
                obj.insert("type".into(), Value::from("summary"));
                for (k, v) in summary {
                    obj.insert((*k).into(), v.to_json());
                }
                writeln!(out, "{}", Value::Object(obj))?;
                out.flush()?;
            }
            Format::Pretty => {
                let mut out = self.out.expect("pretty sink");
                writeln!(out, "--")?;
                for (k, v) in summary {
                    writeln!(out, "{k}: {}", v.to_text())?;
                }
                out.flush()?;
            }
        }
        Ok(())
    }
}

/// Key/value report for single-shot commands.
pub struct Report {
    entries: Vec<(String, Cell)>,
}

impl Report {
    pub fn new() -> Self {
        Report { entries: Vec::new() }
    }

    pub fn put(&mut self, key: impl Into<String>, value: Cell) -> &mut Self {
        self.entries.push((key.into(), value));
        self
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.put(key, Cell::Text(value.into()))
    }

    pub fn write(&self, format: Format, mut sink: Box<dyn Write>) -> io::Result<()> {
        match format {
            Format::Json => {
                let obj: Map<String, Value> =
                    self.entries.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
                writeln!(sink, "{}", Value::Object(obj))?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(sink);
                w.write_record(self.entries.iter().map(|(k, _)| k.as_str()))?;
                w.write_record(self.entries.iter().map(|(_, v)| v.to_text()))?;
                return w.flush();
            }
            Format::Pretty => {
                let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.entries {
                    writeln!(sink, "{k:<width$}  {}", v.to_text())?;
                }
            }
        }
        sink.flush()
    }
}
