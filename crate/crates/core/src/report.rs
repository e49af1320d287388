//! Tabular output: CSV, JSON and plot data files.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

/// Formats with 17 significant digits, `.` as the decimal separator, and
/// `nan` / `inf` / `-inf` for non-finite values. Plain decimal notation is
/// used for exponents in `[-5, 17)`, scientific otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    /// Numeric view for plotting; `None` for text.
    pub fn as_plot_value(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
            Cell::Empty => Some(f64::NAN),
            Cell::Text(_) => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::from(*x + 0.0),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<usize>> for Cell {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Cell::Empty, |t| Cell::Int(t as i64))
    }
}

/// Column-named rows; the first `axes` columns are independent variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub axes: usize,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S], axes: usize) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            axes,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn to_json_string(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, cell) in self.columns.iter().zip(row) {
                    obj.insert(c.clone(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("json serializes");
        s.push('\n');
        s
    }
}

/// Contents of the plot files for `table`, one per numeric dependent column,
/// as `(column name, file text)`.
pub fn plot_data(table: &Table) -> Vec<(String, String)> {
    let axes = table.axes.min(2);
    let mut files = Vec::new();
    for (col, name) in table.columns.iter().enumerate().skip(table.axes) {
        if name == "error_code" {
            continue;
        }
        let numeric = table
            .rows
            .iter()
            .all(|row| row[col].as_plot_value().is_some());
        if !numeric || table.rows.is_empty() {
            continue;
        }
        let mut text = String::new();
        let header: Vec<&str> = table.columns[..axes]
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(name.as_str()))
            .collect();
        text.push_str(&format!("# {}\n", header.join(" ")));
        for row in &table.rows {
            let fields: Vec<String> = row[..axes]
                .iter()
                .chain(std::iter::once(&row[col]))
                .map(|c| fmt_f64(c.as_plot_value().unwrap_or(f64::NAN)))
                .collect();
            text.push_str(&fields.join(" "));
            text.push('\n');
        }
        files.push((name.clone(), text));
    }
    files
}

/// Writes one whitespace-separated file per dependent variable, named
/// `<stem>_<column>.dat` next to `path`.
pub fn emit_plot_data(table: &Table, path: &Path) -> io::Result<Vec<PathBuf>> {
    if table.rows.is_empty() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "empty table"));
    }
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot".into());
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, text) in plot_data(table) {
        let file = dir.join(format!("{stem}_{name}.dat"));
        std::fs::write(&file, text)?;
        written.push(file);
    }
    Ok(written)
}
