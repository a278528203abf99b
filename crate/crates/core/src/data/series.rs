use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header emitted by [`serialize_csv`] for series with volume.
pub const CSV_HEADER: [&str; 6] = ["date", "open", "high", "low", "close", "volume"];

/// One daily open/high/low/close bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhlcvBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: Option<f64>,
}

impl OhlcvBar {
    /// Checks positivity and the low/high envelope.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::InvalidBar { date: self.date, message });
        for (name, v) in [("open", self.open), ("high", self.high), ("low", self.low), ("close", self.close)] {
            if !v.is_finite() || v <= 0.0 {
                return bad(format!("{name} must be a positive finite price, got {v}"));
            }
        }
        if self.high < self.low {
            return bad(format!("high {} < low {}", self.high, self.low));
        }
        if self.low > self.open.min(self.close) {
            return bad(format!("low {} above open/close", self.low));
        }
        if self.high < self.open.max(self.close) {
            return bad(format!("high {} below open/close", self.high));
        }
        if let Some(v) = self.volume {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("volume must be non-negative, got {v}"));
            }
        }
        Ok(())
    }
}

/// Date-ascending daily bars for one instrument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvSeries {
    pub symbol: String,
    bars: Vec<OhlcvBar>,
}

impl OhlcvSeries {
    /// Builds a series from bars in any order. Bars are validated and sorted;
    /// duplicate dates are rejected.
    pub fn new(symbol: impl Into<String>, mut bars: Vec<OhlcvBar>) -> Result<Self> {
        for bar in &bars {
            bar.validate()?;
        }
        bars.sort_by_key(|b| b.date);
        if let Some(w) = bars.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(Error::DuplicateDate(w[0].date));
        }
        Ok(OhlcvSeries { symbol: symbol.into(), bars })
    }

    pub fn bars(&self) -> &[OhlcvBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.bars.iter().map(|b| b.date)
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }

    pub fn has_volume(&self) -> bool {
        !self.bars.is_empty() && self.bars.iter().all(|b| b.volume.is_some())
    }
}

/// Parses `date,open,high,low,close[,volume]` CSV text into a series.
pub fn parse_csv<R: Read>(symbol: &str, reader: R) -> Result<OhlcvSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    let with_volume = match header.len() {
        5 => false,
        6 => true,
        _ => {
            return Err(Error::MalformedRow {
                line: 1,
                message: format!("expected header `date,open,high,low,close[,volume]`, got `{}`", header.join(",")),
            })
        }
    };
    if header.iter().zip(CSV_HEADER.iter()).any(|(a, b)| a != b) {
        return Err(Error::MalformedRow {
            line: 1,
            message: format!("expected header `date,open,high,low,close[,volume]`, got `{}`", header.join(",")),
        });
    }

    let mut bars = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let malformed = |message: String| Error::MalformedRow { line, message };
        if record.len() != header.len() {
            return Err(malformed(format!("expected {} fields, got {}", header.len(), record.len())));
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| malformed(format!("bad date `{}`: {e}", &record[0])))?;
        let num = |i: usize| -> Result<f64> {
            record[i].parse::<f64>().map_err(|e| malformed(format!("bad {} `{}`: {e}", CSV_HEADER[i], &record[i])))
        };
        let volume = if with_volume && !record[5].is_empty() { Some(num(5)?) } else { None };
        let bar = OhlcvBar { date, open: num(1)?, high: num(2)?, low: num(3)?, close: num(4)?, volume };
        bar.validate()?;
        bars.push(bar);
    }
    OhlcvSeries::new(symbol, bars)
}

/// Reads a series CSV from disk, using the file stem as the symbol.
pub fn read_csv_file(path: &std::path::Path) -> Result<OhlcvSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let symbol = path.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    parse_csv(symbol, file)
}

/// Serializes a series in canonical form: ISO dates, shortest round-trip decimals.
pub fn serialize_csv(series: &OhlcvSeries) -> String {
    let with_volume = series.has_volume();
    let mut out = String::new();
    out.push_str(if with_volume { "date,open,high,low,close,volume\n" } else { "date,open,high,low,close\n" });
    for b in series.bars() {
        out.push_str(&format!("{},{},{},{},{}", b.date.format("%Y-%m-%d"), b.open, b.high, b.low, b.close));
        if with_volume {
            out.push_str(&format!(",{}", b.volume.unwrap_or_default()));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_out_of_order_rows() {
        let text = "date,open,high,low,close\n2020-01-03,2,3,1,2.5\n2020-01-02,1,2,0.5,1.5\n";
        let s = parse_csv("X", text.as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.bars()[0].date < s.bars()[1].date);
        assert_eq!(s.closes(), vec![1.5, 2.5]);
    }

    #[test]
    fn high_below_low_names_the_date() {
        let text = "date,open,high,low,close\n2020-01-02,1,0.5,2,1\n";
        let err = parse_csv("X", text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("2020-01-02"), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_non_positive_prices() {
        let dup = "date,open,high,low,close\n2020-01-02,1,2,1,1\n2020-01-02,1,2,1,1\n";
        assert!(matches!(parse_csv("X", dup.as_bytes()), Err(Error::DuplicateDate(_))));
        let neg = "date,open,high,low,close\n2020-01-02,0,2,1,1\n";
        assert!(matches!(parse_csv("X", neg.as_bytes()), Err(Error::InvalidBar { .. })));
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "date,open,high,low,close\n2020-01-02,1,2,1,1\n2020-01-03,1,abc,1,1\n";
        match parse_csv("X", text.as_bytes()) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn volume_column_round_trips() {
        let text = "date,open,high,low,close,volume\n2020-01-02,1,2,0.5,1.25,1000\n";
        let s = parse_csv("X", text.as_bytes()).unwrap();
        assert_eq!(serialize_csv(&s), text);
    }
}
