//! Loading, validation and alignment of delimited price files.
//!
//! A file holds one observation per row. The price column is chosen by header
//! name or zero-based index; an optional timestamp column is carried through as
//! opaque text. Rows are taken in file order and gaps are not filled, so a
//! series with overnight or weekend breaks is simply the concatenation of its
//! sessions.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Selects a column either by header name or by zero-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    /// Integers are read as positions, anything else as a header name.
    pub fn parse(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.trim().to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ColumnSpec {
    pub price: ColumnRef,
    pub timestamp: Option<ColumnRef>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            price: ColumnRef::Name("price".to_string()),
            timestamp: None,
            delimiter: b',',
            has_header: true,
        }
    }
}

/// Uniformly sampled prices.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries<T> {
    pub label: String,
    values: Vec<T>,
    /// Minutes per step.
    pub sample_interval: f64,
    pub start_index: usize,
    pub timestamps: Option<Vec<String>>,
}

impl<T: Scalar> PriceSeries<T> {
    /// Builds a one-minute series starting at index 0.
    pub fn new(label: impl Into<String>, values: Vec<T>) -> Result<Self> {
        Self::with_interval(label, values, 1.0)
    }

    pub fn with_interval(
        label: impl Into<String>,
        values: Vec<T>,
        sample_interval: f64,
    ) -> Result<Self> {
        if !(sample_interval > 0.0 && sample_interval.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sample interval must be positive, got {sample_interval}"
            )));
        }
        if let Some(row) = values
            .iter()
            .position(|p| !(p.is_finite() && *p > T::zero()))
        {
            return Err(Error::NonPositivePrice { row: row + 1 });
        }
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len() });
        }
        Ok(Self {
            label: label.into(),
            values,
            sample_interval,
            start_index: 0,
            timestamps: None,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the first `len` samples.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.values.len());
        Self {
            label: self.label.clone(),
            values: self.values[..len].to_vec(),
            sample_interval: self.sample_interval,
            start_index: self.start_index,
            timestamps: self.timestamps.as_ref().map(|t| t[..len].to_vec()),
        }
    }
}

fn resolve(column: &ColumnRef, headers: Option<&csv::StringRecord>) -> Result<usize> {
    match column {
        ColumnRef::Index(i) => Ok(*i),
        ColumnRef::Name(name) => headers
            .and_then(|h| h.iter().position(|field| field.trim() == name))
            .ok_or_else(|| Error::ParseFailure {
                row: 0,
                message: format!("no column named {name:?} in header"),
            }),
    }
}

/// Reads a price series from any reader.
pub fn read_series<T: Scalar, R: Read>(
    reader: R,
    label: &str,
    spec: &ColumnSpec,
) -> Result<PriceSeries<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = if spec.has_header {
        Some(rdr.headers().map_err(|e| parse_failure(0, e))?.clone())
    } else {
        None
    };
    let price_col = resolve(&spec.price, headers.as_ref())?;
    let time_col = spec
        .timestamp
        .as_ref()
        .map(|c| resolve(c, headers.as_ref()))
        .transpose()?;

    let mut values = Vec::new();
    let mut stamps = time_col.map(|_| Vec::new());
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| parse_failure(row, e))?;
        let field = record.get(price_col).ok_or_else(|| Error::ParseFailure {
            row,
            message: format!("missing column {price_col}"),
        })?;
        let parsed: f64 = field.parse().map_err(|_| Error::ParseFailure {
            row,
            message: format!("{field:?} is not a decimal number"),
        })?;
        if !parsed.is_finite() || parsed <= 0.0 {
            return Err(Error::NonPositivePrice { row });
        }
        values.push(T::of(parsed));
        if let (Some(col), Some(stamps)) = (time_col, stamps.as_mut()) {
            stamps.push(record.get(col).unwrap_or_default().to_string());
        }
    }

    let mut series = PriceSeries::new(label, values)?;
    series.timestamps = stamps;
    Ok(series)
}

fn parse_failure(row: usize, e: csv::Error) -> Error {
    Error::ParseFailure {
        row,
        message: e.to_string(),
    }
}

pub fn load_series<T: Scalar>(
    path: impl AsRef<Path>,
    label: &str,
    spec: &ColumnSpec,
) -> Result<PriceSeries<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::FileUnreadable {
        path: path.to_path_buf(),
        source,
    })?;
    read_series(std::io::BufReader::new(file), label, spec)
}

/// Writes `index,price` rows with a header, in the format [`load_series`]
/// reads with the default [`ColumnSpec`]. Values use the shortest decimal
/// representation that parses back to the same float.
pub fn write_series<T: Scalar, W: Write>(
    writer: W,
    series: &PriceSeries<T>,
    delimiter: u8,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(writer);
    let io = |e: csv::Error| Error::io("<series writer>", std::io::Error::other(e));
    wtr.write_record(["index", "price"]).map_err(io)?;
    for (i, v) in series.values().iter().enumerate() {
        wtr.write_record([(series.start_index + i).to_string(), v.to_string()])
            .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::io("<series writer>", e))
}

/// Cuts every series to the length of the shortest one, dropping trailing samples.
pub fn truncate_to_common_length<T: Scalar>(
    series: &[PriceSeries<T>],
) -> Result<Vec<PriceSeries<T>>> {
    let common = series
        .iter()
        .map(PriceSeries::len)
        .min()
        .ok_or(Error::EmptySet)?;
    Ok(series.iter().map(|s| s.truncated(common)).collect())
}
