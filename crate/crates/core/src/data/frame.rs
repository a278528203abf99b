use std::collections::BTreeSet;
use std::io::Read;

use chrono::NaiveDate;

use super::series::OhlcvSeries;
use crate::error::{Error, Result};

/// Several instruments inner-joined on trading date. Columns keep insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedFrame {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl AlignedFrame {
    pub fn new(dates: Vec<NaiveDate>, columns: Vec<(String, Vec<f64>)>) -> Result<Self> {
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSplit(format!("dates not strictly increasing at {}", w[1])));
        }
        let mut names = Vec::with_capacity(columns.len());
        let mut values = Vec::with_capacity(columns.len());
        for (name, col) in columns {
            if col.len() != dates.len() {
                return Err(Error::ColumnLength { name, expected: dates.len(), got: col.len() });
            }
            if names.contains(&name) {
                return Err(Error::Config(format!("duplicate column `{name}`")));
            }
            names.push(name);
            values.push(col);
        }
        Ok(AlignedFrame { dates, names, columns: values })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names.iter().map(String::as_str).zip(self.columns.iter().map(Vec::as_slice))
    }

    /// Rows whose index satisfies `keep`, in order.
    fn select_rows(&self, keep: impl Fn(usize) -> bool) -> AlignedFrame {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        AlignedFrame {
            dates: idx.iter().map(|&i| self.dates[i]).collect(),
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect(),
        }
    }

    /// Contiguous row range `[start, end)`.
    pub fn slice_rows(&self, start: usize, end: usize) -> AlignedFrame {
        self.select_rows(|i| i >= start && i < end)
    }

    /// Rows whose date lies in `[first, last]`.
    pub fn between(&self, first: NaiveDate, last: NaiveDate) -> AlignedFrame {
        self.select_rows(|i| self.dates[i] >= first && self.dates[i] <= last)
    }

    /// Returns a copy with `name` replaced by (or extended with) `values`.
    pub fn with_column(&self, name: &str, values: Vec<f64>) -> Result<AlignedFrame> {
        if values.len() != self.len() {
            return Err(Error::ColumnLength { name: name.to_string(), expected: self.len(), got: values.len() });
        }
        let mut out = self.clone();
        match out.names.iter().position(|n| n == name) {
            Some(i) => out.columns[i] = values,
            None => {
                out.names.push(name.to_string());
                out.columns.push(values);
            }
        }
        Ok(out)
    }

    /// Inner join on date. Column names must be unique across frames.
    pub fn join(frames: &[AlignedFrame]) -> Result<AlignedFrame> {
        let first = frames.first().ok_or(Error::EmptyIntersection)?;
        let mut common: BTreeSet<NaiveDate> = first.dates.iter().copied().collect();
        for f in &frames[1..] {
            let other: BTreeSet<NaiveDate> = f.dates.iter().copied().collect();
            common = common.intersection(&other).copied().collect();
        }
        if common.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        let dates: Vec<NaiveDate> = common.into_iter().collect();
        let mut columns = Vec::new();
        for f in frames {
            // both date lists are sorted, so a merge walk picks the retained rows
            let mut rows = Vec::with_capacity(dates.len());
            let mut j = 0;
            for (i, d) in f.dates.iter().enumerate() {
                if j < dates.len() && *d == dates[j] {
                    rows.push(i);
                    j += 1;
                }
            }
            for (name, col) in f.columns() {
                columns.push((name.to_string(), rows.iter().map(|&i| col[i]).collect()));
            }
        }
        AlignedFrame::new(dates, columns)
    }
}

impl OhlcvSeries {
    /// One-series frame with columns `<symbol>.open` .. `<symbol>.close` (and `.volume` when every bar has one).
    pub fn to_frame(&self) -> Result<AlignedFrame> {
        if self.is_empty() {
            return Err(Error::EmptySeries(self.symbol.clone()));
        }
        let bars = self.bars();
        let mut cols = vec![
            (format!("{}.open", self.symbol), bars.iter().map(|b| b.open).collect()),
            (format!("{}.high", self.symbol), bars.iter().map(|b| b.high).collect()),
            (format!("{}.low", self.symbol), bars.iter().map(|b| b.low).collect()),
            (format!("{}.close", self.symbol), bars.iter().map(|b| b.close).collect()),
        ];
        if self.has_volume() {
            cols.push((format!("{}.volume", self.symbol), bars.iter().map(|b| b.volume.unwrap_or(0.0)).collect()));
        }
        AlignedFrame::new(self.dates().collect(), cols)
    }
}

/// Inner-joins several series on their common trading dates.
pub fn align(series: &[OhlcvSeries]) -> Result<AlignedFrame> {
    if series.is_empty() {
        return Err(Error::Config("align needs at least one series".into()));
    }
    let frames = series.iter().map(OhlcvSeries::to_frame).collect::<Result<Vec<_>>>()?;
    AlignedFrame::join(&frames)
}

/// Splits into a training frame (dates ≤ `train_last`) and a test frame (`test_first..=test_last`).
pub fn split_by_date(
    frame: &AlignedFrame,
    train_last: NaiveDate,
    test_first: NaiveDate,
    test_last: NaiveDate,
) -> Result<(AlignedFrame, AlignedFrame)> {
    if train_last >= test_first {
        return Err(Error::InvalidSplit(format!("train_last {train_last} must precede test_first {test_first}")));
    }
    if test_first > test_last {
        return Err(Error::InvalidSplit(format!("test_first {test_first} is after test_last {test_last}")));
    }
    let train = frame.select_rows(|i| frame.dates[i] <= train_last);
    let test = frame.between(test_first, test_last);
    if train.is_empty() {
        return Err(Error::InvalidSplit("empty training partition".into()));
    }
    if test.is_empty() {
        return Err(Error::InvalidSplit("empty test partition".into()));
    }
    Ok((train, test))
}

/// Reads a frame CSV: `date,<column>,<column>...`.
pub fn parse_frame_csv<R: Read>(reader: R) -> Result<AlignedFrame> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.first().map(|h| h.to_ascii_lowercase()) != Some("date".into()) || header.len() < 2 {
        return Err(Error::MalformedRow { line: 1, message: "expected header `date,<column>...`".into() });
    }
    let mut dates = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 1];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let malformed = |message: String| Error::MalformedRow { line, message };
        if record.len() != header.len() {
            return Err(malformed(format!("expected {} fields, got {}", header.len(), record.len())));
        }
        dates.push(NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| malformed(format!("bad date: {e}")))?);
        for (k, col) in cols.iter_mut().enumerate() {
            let v: f64 =
                record[k + 1].parse().map_err(|e| malformed(format!("bad value `{}`: {e}", &record[k + 1])))?;
            col.push(v);
        }
    }
    AlignedFrame::new(dates, header[1..].iter().cloned().zip(cols).collect())
}

pub fn serialize_frame_csv(frame: &AlignedFrame) -> String {
    let mut out = String::from("date");
    for n in frame.column_names() {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (i, d) in frame.dates().iter().enumerate() {
        out.push_str(&d.format("%Y-%m-%d").to_string());
        for c in &frame.columns {
            out.push_str(&format!(",{}", c[i]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::series::OhlcvBar;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, day).unwrap()
    }

    fn series(symbol: &str, days: &[u32]) -> OhlcvSeries {
        let bars = days
            .iter()
            .map(|&day| {
                let p = day as f64;
                OhlcvBar { date: d(day), open: p, high: p + 1.0, low: p - 0.5, close: p + 0.5, volume: None }
            })
            .collect();
        OhlcvSeries::new(symbol, bars).unwrap()
    }

    #[test]
    fn identical_dates_are_all_retained() {
        let f = align(&[series("A", &[2, 3, 4]), series("B", &[2, 3, 4])]).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.column_names().len(), 8);
        assert_eq!(f.column("B.close").unwrap(), &[2.5, 3.5, 4.5]);
    }

    #[test]
    fn partial_overlap_keeps_intersection() {
        let f = align(&[series("A", &[1, 2, 3]), series("B", &[2, 3, 4])]).unwrap();
        assert_eq!(f.dates(), &[d(2), d(3)]);
        assert_eq!(f.column("A.open").unwrap(), &[2.0, 3.0]);
    }

    #[test]
    fn disjoint_series_fail() {
        assert!(matches!(align(&[series("A", &[1, 2]), series("B", &[3, 4])]), Err(Error::EmptyIntersection)));
    }

    #[test]
    fn split_counts_rows() {
        let f = series("A", &(1..=10).collect::<Vec<_>>()).to_frame().unwrap();
        let (train, test) = split_by_date(&f, d(7), d(8), d(10)).unwrap();
        assert_eq!((train.len(), test.len()), (7, 3));
        assert!(split_by_date(&f, d(8), d(7), d(10)).is_err());
        assert!(split_by_date(&f, d(10), d(11), d(12)).is_err());
    }

    #[test]
    fn frame_csv_round_trip() {
        let f = align(&[series("A", &[1, 2, 3]), series("B", &[2, 3])]).unwrap();
        let text = serialize_frame_csv(&f);
        assert_eq!(parse_frame_csv(text.as_bytes()).unwrap(), f);
    }
}
