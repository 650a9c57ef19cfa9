//! Flat-file output: tables as CSV or JSON arrays, and branch files with
//! a matching reader.
//!
//! Floats are written with 17 significant digits so that every value reads
//! back bit for bit. Non-finite values become an empty CSV field or JSON
//! `null`.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use sphere_re::continuation::{Branch, EventKind, Family};

pub const BRANCH_COLUMNS: [&str; 6] = ["arclength", "sigma1", "sigma2", "sigma3", "family", "event_flag"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn json_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
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

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => csv_field(s),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Float(v) => json_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => json_string(s),
            Cell::Empty => "null".into(),
        }
    }
}

/// Rows under named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for r in &self.rows {
                    let fields: Vec<String> = r.iter().map(Cell::csv).collect();
                    out.push_str(&fields.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let objects: Vec<String> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let fields: Vec<String> = self
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| format!("{}: {}", json_string(c), v.json()))
                            .collect();
                        format!("  {{{}}}", fields.join(", "))
                    })
                    .collect();
                if objects.is_empty() {
                    "[]\n".into()
                } else {
                    format!("[\n{}\n]\n", objects.join(",\n"))
                }
            }
        }
    }
}

/// One line of a branch file: a traced point, or an event when
/// `event` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRow {
    pub arclength: f64,
    pub sigma: [f64; 3],
    pub family: Family,
    pub event: Option<EventKind>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub kind: EventKind,
    pub arclength: f64,
    pub sigma: [f64; 3],
    pub value: f64,
}

/// Contents of a branch file. CSV files carry only `rows`; JSON files
/// also carry the masses, the closed flag and the event values.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchFile {
    pub family: Family,
    pub masses: Option<[f64; 3]>,
    pub closed: Option<bool>,
    pub rows: Vec<BranchRow>,
    pub events: Vec<EventRecord>,
}

impl BranchFile {
    /// Points in order with each event inserted after the points at or
    /// before its arclength.
    pub fn from_branch(b: &Branch) -> Self {
        let mut events: Vec<EventRecord> = b
            .events
            .iter()
            .map(|e| EventRecord {
                kind: e.kind,
                arclength: e.arclength,
                sigma: e.location.as_array(),
                value: e.value,
            })
            .collect();
        events.sort_by(|a, b| a.arclength.total_cmp(&b.arclength));
        let mut rows = Vec::with_capacity(b.points.len() + events.len());
        let mut next = events.iter().peekable();
        for p in &b.points {
            while let Some(e) = next.next_if(|e| e.arclength < p.arclength) {
                rows.push(event_row(b.family, e));
            }
            rows.push(BranchRow {
                arclength: p.arclength,
                sigma: p.shape.as_array(),
                family: b.family,
                event: None,
            });
        }
        rows.extend(next.map(|e| event_row(b.family, e)));
        Self {
            family: b.family,
            masses: Some(b.masses.as_array()),
            closed: Some(b.closed),
            rows,
            events,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = &BranchRow> {
        self.rows.iter().filter(|r| r.event.is_none())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = BRANCH_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let flag = r.event.map(|k| k.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                float(r.arclength),
                float(r.sigma[0]),
                float(r.sigma[1]),
                float(r.sigma[2]),
                r.family,
                flag
            );
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"family\": {},", json_string(&self.family.to_string()));
        match self.masses {
            Some(m) => {
                let _ = writeln!(out, "  \"masses\": [{}, {}, {}],", json_float(m[0]), json_float(m[1]), json_float(m[2]));
            }
            None => out.push_str("  \"masses\": null,\n"),
        }
        match self.closed {
            Some(c) => {
                let _ = writeln!(out, "  \"closed\": {c},");
            }
            None => out.push_str("  \"closed\": null,\n"),
        }
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let flag = r.event.map(|k| k.to_string()).unwrap_or_default();
                format!(
                    "    {{\"arclength\": {}, \"sigma1\": {}, \"sigma2\": {}, \"sigma3\": {}, \"family\": {}, \"event_flag\": {}}}",
                    json_float(r.arclength),
                    json_float(r.sigma[0]),
                    json_float(r.sigma[1]),
                    json_float(r.sigma[2]),
                    json_string(&r.family.to_string()),
                    json_string(&flag)
                )
            })
            .collect();
        let events: Vec<String> = self
            .events
            .iter()
            .map(|e| {
                format!(
                    "    {{\"kind\": {}, \"arclength\": {}, \"sigma1\": {}, \"sigma2\": {}, \"sigma3\": {}, \"value\": {}}}",
                    json_string(&e.kind.to_string()),
                    json_float(e.arclength),
                    json_float(e.sigma[0]),
                    json_float(e.sigma[1]),
                    json_float(e.sigma[2]),
                    json_float(e.value)
                )
            })
            .collect();
        push_array(&mut out, "rows", &rows, true);
        push_array(&mut out, "events", &events, false);
        out.push_str("}\n");
        out
    }

    pub fn parse(text: &str, format: Format) -> Result<Self> {
        match format {
            Format::Csv => parse_csv(text),
            Format::Json => parse_json(text),
        }
    }
}

fn event_row(family: Family, e: &EventRecord) -> BranchRow {
    BranchRow {
        arclength: e.arclength,
        sigma: e.sigma,
        family,
        event: Some(e.kind),
    }
}

fn push_array(out: &mut String, key: &str, items: &[String], comma: bool) {
    let tail = if comma { "," } else { "" };
    if items.is_empty() {
        let _ = writeln!(out, "  \"{key}\": []{tail}");
    } else {
        let _ = writeln!(out, "  \"{key}\": [\n{}\n  ]{tail}", items.join(",\n"));
    }
}

fn parse_float(s: &str) -> Result<f64> {
    if s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse().with_context(|| format!("bad number '{s}'"))
}

fn parse_kind(s: &str) -> Result<Option<EventKind>> {
    if s.is_empty() {
        Ok(None)
    } else {
        Ok(Some(EventKind::from_str(s)?))
    }
}

fn parse_csv(text: &str) -> Result<BranchFile> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty branch file"))?;
    if header != BRANCH_COLUMNS.join(",") {
        bail!("unexpected header '{header}'");
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != BRANCH_COLUMNS.len() {
            bail!("line {}: expected {} fields, got {}", n + 2, BRANCH_COLUMNS.len(), f.len());
        }
        rows.push(BranchRow {
            arclength: parse_float(f[0])?,
            sigma: [parse_float(f[1])?, parse_float(f[2])?, parse_float(f[3])?],
            family: Family::from_str(f[4])?,
            event: parse_kind(f[5])?,
        });
    }
    let family = rows.first().map(|r| r.family).ok_or_else(|| anyhow!("branch file without rows"))?;
    let events = rows
        .iter()
        .filter_map(|r| {
            r.event.map(|kind| EventRecord {
                kind,
                arclength: r.arclength,
                sigma: r.sigma,
                value: f64::NAN,
            })
        })
        .collect();
    Ok(BranchFile {
        family,
        masses: None,
        closed: None,
        rows,
        events,
    })
}

#[derive(Deserialize)]
struct JsonRow {
    arclength: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    sigma3: Option<f64>,
    family: String,
    event_flag: String,
}

#[derive(Deserialize)]
struct JsonEvent {
    kind: String,
    arclength: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    sigma3: Option<f64>,
    value: Option<f64>,
}

#[derive(Deserialize)]
struct JsonBranch {
    family: String,
    masses: Option<[Option<f64>; 3]>,
    closed: Option<bool>,
    rows: Vec<JsonRow>,
    events: Vec<JsonEvent>,
}

fn nan(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn parse_json(text: &str) -> Result<BranchFile> {
    let b: JsonBranch = serde_json::from_str(text).context("malformed branch JSON")?;
    let rows = b
        .rows
        .into_iter()
        .map(|r| {
            Ok(BranchRow {
                arclength: nan(r.arclength),
                sigma: [nan(r.sigma1), nan(r.sigma2), nan(r.sigma3)],
                family: Family::from_str(&r.family)?,
                event: parse_kind(&r.event_flag)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let events = b
        .events
        .into_iter()
        .map(|e| {
            Ok(EventRecord {
                kind: EventKind::from_str(&e.kind)?,
                arclength: nan(e.arclength),
                sigma: [nan(e.sigma1), nan(e.sigma2), nan(e.sigma3)],
                value: nan(e.value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BranchFile {
        family: Family::from_str(&b.family)?,
        masses: b.masses.map(|m| m.map(nan)),
        closed: b.closed,
        rows,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_every_bit() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(float(f64::NAN), "");
    }

    #[test]
    fn tables_render_both_formats() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.5.into(), 3usize.into(), "x,y".into()]);
        t.push(vec![Cell::Empty, true.into(), Cell::Float(f64::INFINITY)]);
        assert_eq!(t.render(Format::Csv), "a,b,c\n5.0000000000000000e-1,3,\"x,y\"\n,true,\n");
        let j: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(j[0]["a"], 0.5);
        assert_eq!(j[0]["c"], "x,y");
        assert!(j[1]["a"].is_null() && j[1]["c"].is_null());
        assert_eq!(Table::new(&["a"]).render(Format::Json), "[]\n");
    }

    #[test]
    fn malformed_branch_files_are_rejected() {
        assert!(BranchFile::parse("", Format::Csv).is_err());
        assert!(BranchFile::parse("a,b\n", Format::Csv).is_err());
        let head = BRANCH_COLUMNS.join(",");
        assert!(BranchFile::parse(&format!("{head}\n1,2,3\n"), Format::Csv).is_err());
        assert!(BranchFile::parse(&format!("{head}\n0,1,1,1,lre-nothing,\n"), Format::Csv).is_err());
        assert!(BranchFile::parse("{}", Format::Json).is_err());
    }
}
