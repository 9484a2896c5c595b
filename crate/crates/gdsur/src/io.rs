//! CSV panels: factor-model return files described by a [`CsvPanelSchema`],
//! and the plain `t,y1..yN,x1..xr` layout written by `gdsur simulate`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use gdsur_core::dgp::Panel;
use gdsur_core::Mat;
use serde::{Deserialize, Serialize};

use crate::error::DataError;

fn default_missing() -> Vec<String> {
    ["", "NA", "NaN", "-99.99", "-999"].iter().map(|s| s.to_string()).collect()
}

/// Column layout of a return file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvPanelSchema {
    pub date_column: String,
    /// One column per equation, in order.
    pub portfolio_columns: Vec<String>,
    pub factor_columns: Vec<String>,
    /// Subtracted from every portfolio column when present.
    #[serde(default)]
    pub risk_free_column: Option<String>,
    /// Values are in percent and get divided by 100.
    #[serde(default)]
    pub percent: bool,
    /// Cell contents treated as missing. The defaults include the Kenneth
    /// French library's `-99.99` and `-999` codes.
    #[serde(default = "default_missing")]
    pub missing_values: Vec<String>,
}

impl CsvPanelSchema {
    pub fn new(date_column: &str, portfolios: &[&str], factors: &[&str]) -> Self {
        Self {
            date_column: date_column.into(),
            portfolio_columns: portfolios.iter().map(|s| s.to_string()).collect(),
            factor_columns: factors.iter().map(|s| s.to_string()).collect(),
            risk_free_column: None,
            percent: false,
            missing_values: default_missing(),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io { path: path.into(), source })?;
        serde_json::from_str(&text)
            .map_err(|e| DataError::SchemaMismatch { path: path.into(), message: format!("bad schema file: {e}") })
    }
}

/// Inclusive date window. Bounds use the same notation as the file's date
/// column; separators `-`, `/` and `.` are ignored when comparing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DateRange {
    pub start: Option<String>,
    pub end: Option<String>,
}

impl DateRange {
    pub fn all() -> Self {
        Self::default()
    }
}

/// `"2008-10"` → `(200810, 6)`. Keys compare as integers; the digit count
/// guards against comparing a monthly bound with daily dates.
fn date_key(s: &str) -> Option<(u64, usize)> {
    let digits: String = s.chars().filter(|c| !matches!(c, '-' | '/' | '.')).collect();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((digits.parse().ok()?, digits.len()))
}

pub fn load_csv_panel(path: &Path, schema: &CsvPanelSchema, range: &DateRange) -> Result<Panel, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io { path: path.into(), source })?;
    read_csv_panel(file, path, schema, range)
}

/// Reads a panel from any reader; `label` names the source in errors.
pub fn read_csv_panel<R: Read>(reader: R, label: &Path, schema: &CsvPanelSchema, range: &DateRange) -> Result<Panel, DataError> {
    let path: PathBuf = label.into();
    let mismatch = |message: String| DataError::SchemaMismatch { path: path.clone(), message };
    if schema.portfolio_columns.is_empty() || schema.factor_columns.is_empty() {
        return Err(mismatch("schema needs at least one portfolio and one factor column".into()));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|source| DataError::Csv { path: path.clone(), source })?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| mismatch(format!("column {name:?} not found")))
    };
    let date_col = find(&schema.date_column)?;
    let y_cols = schema.portfolio_columns.iter().map(|c| find(c)).collect::<Result<Vec<_>, _>>()?;
    let x_cols = schema.factor_columns.iter().map(|c| find(c)).collect::<Result<Vec<_>, _>>()?;
    let rf_col = schema.risk_free_column.as_deref().map(find).transpose()?;

    let bound = |b: &Option<String>| -> Result<Option<(u64, usize)>, DataError> {
        b.as_deref()
            .map(|s| date_key(s).ok_or_else(|| mismatch(format!("bad date bound {s:?}"))))
            .transpose()
    };
    let (start, end) = (bound(&range.start)?, bound(&range.end)?);

    let scale = if schema.percent { 100.0 } else { 1.0 };
    let (n, r) = (y_cols.len(), x_cols.len());
    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut prev: Option<u64> = None;
    for (i, rec) in rdr.records().enumerate() {
        // 1-based data row, header excluded
        let row = i + 1;
        let rec = rec.map_err(|source| DataError::Csv { path: path.clone(), source })?;
        let raw_date = rec.get(date_col).unwrap_or("");
        let (key, len) = date_key(raw_date).ok_or_else(|| DataError::BadValue {
            path: path.clone(),
            row,
            column: schema.date_column.clone(),
            value: raw_date.into(),
        })?;
        if prev.is_some_and(|p| key <= p) {
            return Err(DataError::NonMonotoneDates { path: path.clone(), row });
        }
        prev = Some(key);
        // plain counters (`t = 1..T`) have no fixed width
        if len >= 6 && [start, end].iter().flatten().any(|&(_, bl)| bl != len) {
            return Err(mismatch(format!("date bound format does not match {raw_date:?}")));
        }
        if start.is_some_and(|(s, _)| key < s) || end.is_some_and(|(e, _)| key > e) {
            continue;
        }
        let value = |col: usize, name: &str| -> Result<f64, DataError> {
            let cell = rec.get(col).unwrap_or("");
            if schema.missing_values.iter().any(|m| m == cell) {
                return Err(DataError::MissingData { path: path.clone(), row, column: name.into() });
            }
            let v: f64 = cell.parse().map_err(|_| DataError::BadValue {
                path: path.clone(),
                row,
                column: name.into(),
                value: cell.into(),
            })?;
            if !v.is_finite() {
                return Err(DataError::MissingData { path: path.clone(), row, column: name.into() });
            }
            Ok(v / scale)
        };
        let rf = match (rf_col, &schema.risk_free_column) {
            (Some(c), Some(name)) => value(c, name)?,
            _ => 0.0,
        };
        for (c, name) in y_cols.iter().zip(&schema.portfolio_columns) {
            let v = value(*c, name)?;
            y.push(if rf_col.is_some() { v - rf } else { v });
        }
        for (c, name) in x_cols.iter().zip(&schema.factor_columns) {
            x.push(value(*c, name)?);
        }
    }
    let t = y.len() / n;
    if t == 0 {
        return Err(mismatch("no rows in the selected date range".into()));
    }
    let invalid = |e: gdsur_core::Error| mismatch(format!("invalid panel: {e}"));
    Panel::new(Mat::from_vec(t, n, y).map_err(invalid)?, Mat::from_vec(t, r, x).map_err(invalid)?).map_err(invalid)
}

/// Schema for the `t,y1..yN,x1..xr` layout, inferred from the header.
pub fn simulated_schema(headers: &[String]) -> Option<CsvPanelSchema> {
    let numbered = |prefix: char| -> Vec<String> {
        let mut cols: Vec<(usize, String)> = headers
            .iter()
            .filter_map(|h| {
                let rest = h.strip_prefix(prefix)?;
                rest.parse::<usize>().ok().map(|i| (i, h.clone()))
            })
            .collect();
        cols.sort();
        cols.into_iter().map(|(_, h)| h).collect()
    };
    let y = numbered('y');
    let x = numbered('x');
    if !headers.iter().any(|h| h == "t") || y.is_empty() || x.is_empty() {
        return None;
    }
    let mut schema = CsvPanelSchema::new("t", &[], &[]);
    schema.portfolio_columns = y;
    schema.factor_columns = x;
    Some(schema)
}

/// Reads a file in the `gdsur simulate` layout.
pub fn load_simulated_panel(path: &Path) -> Result<Panel, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io { path: path.into(), source })?;
    let headers: Vec<String> = {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let h = rdr.headers().map_err(|source| DataError::Csv { path: path.into(), source })?;
        h.iter().map(String::from).collect()
    };
    let schema = simulated_schema(&headers).ok_or_else(|| DataError::SchemaMismatch {
        path: path.into(),
        message: "expected columns t, y1..yN, x1..xr".into(),
    })?;
    read_csv_panel(text.as_bytes(), path, &schema, &DateRange::all())
}

/// Writes `t,y1..yN,x1..xr` with `t = 1..T`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_panel_csv<W: Write>(panel: &Panel, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=panel.n()).map(|i| format!("y{i}")));
    header.extend((1..=panel.r()).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for s in 0..panel.t() {
        let mut rec = vec![(s + 1).to_string()];
        rec.extend(panel.y.row(s).iter().map(|v| v.to_string()));
        rec.extend(panel.x.row(s).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
