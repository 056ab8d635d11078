//! Series data model: CSV ingest, calendar-day gridding and differencing.
//!
//! A [`RawSeries`] is what the CSV file holds: dated observations, possibly
//! with calendar gaps. [`to_daily_grid`] turns it into a [`TimeSeries`] with
//! one slot per calendar day, where absent days become explicit missing slots.
//! Day offsets from the start date are the abscissae used by the spline code.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use chrono::{Duration, NaiveDate};

use crate::error::{Error, Result};

/// Dates are read and written in this format.
pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Dated observations of one column, sorted by date with no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub observations: Vec<(NaiveDate, f64)>,
    pub column_name: String,
}

impl RawSeries {
    /// Builds a series from unsorted observations, checking the invariants.
    pub fn new(mut observations: Vec<(NaiveDate, f64)>, column_name: impl Into<String>) -> Result<Self> {
        observations.sort_by_key(|(d, _)| *d);
        for (i, w) in observations.windows(2).enumerate() {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateDate {
                    row: i + 2,
                    date: w[1].0.format(DATE_FORMAT).to_string(),
                });
            }
        }
        if let Some(i) = observations.iter().position(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "observation {} is not finite",
                i + 1
            )));
        }
        Ok(Self {
            observations,
            column_name: column_name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Reads `column` keyed by `date_column` from a headered, comma-separated file.
///
/// Row numbers in errors are file line numbers (the header is line 1).
pub fn load_csv(path: impl AsRef<Path>, column: &str, date_column: &str) -> Result<RawSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, column, date_column)
}

/// [`load_csv`] over any reader.
pub fn read_csv<R: std::io::Read>(reader: R, column: &str, date_column: &str) -> Result<RawSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let available: Vec<String> = headers.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                name: name.to_string(),
                available: available.clone(),
            })
    };
    let date_idx = find(date_column)?;
    let value_idx = find(column)?;

    let mut seen: HashMap<NaiveDate, usize> = HashMap::new();
    let mut observations = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Csv {
            row,
            message: e.to_string(),
        })?;
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, DATE_FORMAT).map_err(|_| Error::BadDate {
            row,
            value: raw_date.to_string(),
        })?;
        let raw_value = record.get(value_idx).unwrap_or("");
        let value = raw_value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::NonNumeric {
                row,
                column: column.to_string(),
                value: raw_value.to_string(),
            })?;
        if seen.insert(date, row).is_some() {
            return Err(Error::DuplicateDate {
                row,
                date: raw_date.to_string(),
            });
        }
        observations.push((date, value));
    }
    RawSeries::new(observations, column)
}

/// One slot per consecutive calendar day; `None` marks a missing day.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub start_date: NaiveDate,
    pub values: Vec<Option<f64>>,
    pub column_name: String,
}

impl TimeSeries {
    /// A gap-free series starting at `start_date`.
    pub fn from_values(start_date: NaiveDate, values: &[f64], column_name: impl Into<String>) -> Self {
        Self {
            start_date,
            values: values.iter().copied().map(Some).collect(),
            column_name: column_name.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + Duration::days(index as i64)
    }

    pub fn end_date(&self) -> NaiveDate {
        self.date_at(self.len().saturating_sub(1))
    }

    pub fn missing_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.is_none().then_some(i))
            .collect()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// The values as a dense vector; fails if any slot is missing.
    pub fn dense(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|v| v.ok_or(Error::MissingValues))
            .collect()
    }

    /// Writes `date,value`, leaving the value field empty for missing slots.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "date,value")?;
        for (i, v) in self.values.iter().enumerate() {
            match v {
                Some(v) => writeln!(out, "{},{}", self.date_at(i).format(DATE_FORMAT), v)?,
                None => writeln!(out, "{},", self.date_at(i).format(DATE_FORMAT))?,
            }
        }
        Ok(())
    }
}

/// Spreads the observations over a calendar-day grid from the first to the last date.
pub fn to_daily_grid(raw: &RawSeries) -> Result<TimeSeries> {
    let (first, last) = match (raw.observations.first(), raw.observations.last()) {
        (Some(f), Some(l)) => (f.0, l.0),
        _ => return Err(Error::EmptySeries),
    };
    let span = (last - first).num_days() as usize + 1;
    let mut values = vec![None; span];
    for (date, value) in &raw.observations {
        values[(*date - first).num_days() as usize] = Some(*value);
    }
    Ok(TimeSeries {
        start_date: first,
        values,
        column_name: raw.column_name.clone(),
    })
}

/// Result of differencing `d` times, with what is needed to invert it.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencedSeries {
    pub values: Vec<f64>,
    pub d: usize,
    /// The first `d` values of the source series.
    pub origin: Vec<f64>,
}

/// Applies first differencing `d` times.
pub fn difference(values: &[f64], d: usize) -> Result<DifferencedSeries> {
    if values.len() <= d {
        return Err(Error::TooShort {
            needed: d + 1,
            got: values.len(),
        });
    }
    let origin = values[..d].to_vec();
    let mut current = values.to_vec();
    for _ in 0..d {
        current = current.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(DifferencedSeries {
        values: current,
        d,
        origin,
    })
}

/// Inverse of [`difference`].
pub fn undifference(diff: &DifferencedSeries) -> Result<Vec<f64>> {
    if diff.origin.len() != diff.d {
        return Err(Error::OriginMismatch {
            expected: diff.d,
            got: diff.origin.len(),
        });
    }
    // starts[k] = first value of the k-times differenced series
    let mut starts = Vec::with_capacity(diff.d);
    let mut lead = diff.origin.clone();
    while let Some(&first) = lead.first() {
        starts.push(first);
        lead = lead.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let mut current = diff.values.clone();
    for &start in starts.iter().rev() {
        // Neumaier-compensated running sum keeps the round trip within 1e-9
        let mut level = Vec::with_capacity(current.len() + 1);
        let (mut acc, mut comp) = (start, 0.0);
        level.push(acc);
        for &v in &current {
            let t = acc + v;
            comp += if acc.abs() >= v.abs() { (acc - t) + v } else { (v - t) + acc };
            acc = t;
            level.push(acc + comp);
        }
        current = level;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FORMAT).unwrap()
    }

    #[test]
    fn reads_two_rows() {
        let csv = "Date,Open\n2010-01-04,10.0\n2010-01-05,10.5\n";
        let raw = read_csv(csv.as_bytes(), "Open", "Date").unwrap();
        assert_eq!(raw.len(), 2);
        assert_eq!(raw.observations[1], (date("2010-01-05"), 10.5));
    }

    #[test]
    fn unsorted_rows_are_sorted() {
        let csv = "Date,Open\n2010-01-06,3\n2010-01-04,1\n";
        let raw = read_csv(csv.as_bytes(), "Open", "Date").unwrap();
        assert_eq!(raw.observations[0].0, date("2010-01-04"));
    }

    #[test]
    fn duplicate_date_names_row() {
        let csv = "Date,Open\n2010-01-04,10.0\n2010-01-05,1\n2010-01-04,10.5\n";
        match read_csv(csv.as_bytes(), "Open", "Date") {
            Err(Error::DuplicateDate { row, .. }) => assert_eq!(row, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_lists_available() {
        let csv = "Date,Open,Close\n2010-01-04,1,2\n";
        let err = read_csv(csv.as_bytes(), "High", "Date").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Open") && msg.contains("Close"), "{msg}");
    }

    #[test]
    fn non_numeric_value_reports_row() {
        let csv = "Date,Open\n2010-01-04,1\n2010-01-05,abc\n";
        match read_csv(csv.as_bytes(), "Open", "Date") {
            Err(Error::NonNumeric { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_date_rejected() {
        let csv = "Date,Open\n04/01/2010,1\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), "Open", "Date"),
            Err(Error::BadDate { row: 2, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "Open", "Date"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn grid_with_one_gap() {
        let d0 = date("2020-03-01");
        let raw = RawSeries::new(vec![(d0, 1.0), (d0 + Duration::days(2), 3.0)], "x").unwrap();
        let grid = to_daily_grid(&raw).unwrap();
        assert_eq!(grid.values, vec![Some(1.0), None, Some(3.0)]);
        assert_eq!(grid.missing_indices(), vec![1]);
    }

    #[test]
    fn consecutive_dates_have_no_gaps() {
        let d0 = date("2020-03-01");
        let obs = (0..10).map(|i| (d0 + Duration::days(i), i as f64)).collect();
        let grid = to_daily_grid(&RawSeries::new(obs, "x").unwrap()).unwrap();
        assert_eq!(grid.missing_count(), 0);
        assert_eq!(grid.len(), 10);
    }

    #[test]
    fn grid_span_matches_day_count() {
        let raw = RawSeries::new(
            vec![(date("2010-01-04"), 1.0), (date("2022-12-03"), 2.0)],
            "x",
        )
        .unwrap();
        let grid = to_daily_grid(&raw).unwrap();
        // 2010-01-04 ..= 2022-12-03: 4716 days apart, inclusive count 4717
        assert_eq!(grid.len(), 4717);
        assert_eq!(grid.end_date(), date("2022-12-03"));
    }

    #[test]
    fn empty_grid_rejected() {
        let raw = RawSeries::new(vec![], "x").unwrap();
        assert!(matches!(to_daily_grid(&raw), Err(Error::EmptySeries)));
    }

    #[test]
    fn grid_csv_leaves_missing_empty() {
        let ts = TimeSeries {
            start_date: date("2020-01-01"),
            values: vec![Some(1.5), None, Some(3.0)],
            column_name: "x".into(),
        };
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "date,value\n2020-01-01,1.5\n2020-01-02,\n2020-01-03,3\n"
        );
    }

    #[test]
    fn difference_examples() {
        let x = [1.0, 3.0, 6.0, 10.0];
        let d1 = difference(&x, 1).unwrap();
        assert_eq!(d1.values, vec![2.0, 3.0, 4.0]);
        assert_eq!(d1.origin, vec![1.0]);
        let d2 = difference(&x, 2).unwrap();
        assert_eq!(d2.values, vec![1.0, 1.0]);
        assert_eq!(d2.origin, vec![1.0, 3.0]);
        let d0 = difference(&x, 0).unwrap();
        assert_eq!(d0.values, x.to_vec());
        assert!(d0.origin.is_empty());
    }

    #[test]
    fn difference_too_short() {
        assert!(matches!(
            difference(&[1.0, 2.0], 2),
            Err(Error::TooShort { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn undifference_examples() {
        let a = DifferencedSeries {
            values: vec![2.0, 3.0, 4.0],
            d: 1,
            origin: vec![1.0],
        };
        assert_eq!(undifference(&a).unwrap(), vec![1.0, 3.0, 6.0, 10.0]);
        let b = DifferencedSeries {
            values: vec![1.0, 1.0],
            d: 2,
            origin: vec![1.0, 3.0],
        };
        assert_eq!(undifference(&b).unwrap(), vec![1.0, 3.0, 6.0, 10.0]);
    }

    #[test]
    fn undifference_origin_mismatch() {
        let bad = DifferencedSeries {
            values: vec![1.0],
            d: 2,
            origin: vec![1.0],
        };
        assert!(matches!(
            undifference(&bad),
            Err(Error::OriginMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn second_difference_is_first_applied_twice() {
        let x: Vec<f64> = (0..20).map(|i| ((i * 7) % 11) as f64).collect();
        let once = difference(&difference(&x, 1).unwrap().values, 1).unwrap();
        assert_eq!(once.values, difference(&x, 2).unwrap().values);
    }

    proptest! {
        #[test]
        fn difference_round_trip(x in prop::collection::vec(-10f64..10.0, 3..1000), d in 0usize..3) {
            let diff = difference(&x, d).unwrap();
            prop_assert_eq!(diff.values.len(), x.len() - d);
            let back = undifference(&diff).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}
