use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::multi::MultiSeries;
use crate::armodel::TimeSeries;
use crate::error::{Error, Result};
use crate::num::C;

/// Model time per day of a daily index record.
pub const DAY_DT: f64 = 12.0 / 365.0;

const UNIFORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFormat {
    /// Decide from the header.
    #[default]
    Auto,
    /// `t,re,im`.
    Complex,
    /// `date,rmm1,rmm2` with consecutive days.
    Rmm,
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Format { line, msg: format!("{kind:?}") },
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

fn field<'a>(rec: &'a csv::StringRecord, idx: usize, line: usize) -> Result<&'a str> {
    rec.get(idx).map(str::trim).ok_or_else(|| Error::Format { line, msg: format!("missing column {}", idx + 1) })
}

fn number(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<f64> {
    let s = field(rec, idx, line)?;
    s.parse().map_err(|_| Error::Format { line, msg: format!("not a number: {s:?}") })
}

/// Step of a time column, checked uniform; errors name the first bad row.
fn uniform_step(times: &[(f64, usize)]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::InvalidArgument("need at least two samples to infer dt".into()));
    }
    let n = times.len();
    let dt = (times[n - 1].0 - times[0].0) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Format { line: times[1].1, msg: "time column is not increasing".into() });
    }
    for w in times.windows(2) {
        let d = w[1].0 - w[0].0;
        if (d - dt).abs() > UNIFORM_TOL * dt.max(w[1].0.abs()) {
            return Err(Error::Format { line: w[1].1, msg: format!("nonuniform sampling: step {d} vs {dt}") });
        }
    }
    Ok(dt)
}

pub fn read_timeseries<R: Read>(reader: R, format: SeriesFormat) -> Result<TimeSeries<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let format = match format {
        SeriesFormat::Auto if column(&headers, "date").is_some() => SeriesFormat::Rmm,
        SeriesFormat::Auto => SeriesFormat::Complex,
        f => f,
    };
    let names: [&str; 3] = match format {
        SeriesFormat::Rmm => ["date", "rmm1", "rmm2"],
        _ => ["t", "re", "im"],
    };
    let idx: Vec<usize> = names
        .iter()
        .map(|n| column(&headers, n).ok_or_else(|| Error::Format { line: 1, msg: format!("missing column {n}") }))
        .collect::<Result<_>>()?;
    let mut values = Vec::new();
    let mut times = Vec::new();
    let mut prev_date: Option<NaiveDate> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        values.push(C::new(number(&rec, idx[1], line)?, number(&rec, idx[2], line)?));
        match format {
            SeriesFormat::Rmm => {
                let s = field(&rec, idx[0], line)?;
                let d = NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .map_err(|_| Error::Format { line, msg: format!("bad date {s:?}, expected YYYY-MM-DD") })?;
                if let Some(p) = prev_date {
                    if (d - p).num_days() != 1 {
                        return Err(Error::Format { line, msg: format!("gap in dates between {p} and {d}") });
                    }
                }
                prev_date = Some(d);
            }
            _ => times.push((number(&rec, idx[0], line)?, line)),
        }
    }
    match format {
        SeriesFormat::Rmm => TimeSeries::new(values, DAY_DT, 0.0),
        _ => {
            let dt = uniform_step(&times)?;
            TimeSeries::new(values, dt, times[0].0)
        }
    }
}

pub fn write_timeseries<W: Write>(series: &TimeSeries<f64>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| csv_error(e);
    w.write_record(["t", "re", "im"]).map_err(err)?;
    for (k, v) in series.values().iter().enumerate() {
        w.write_record([series.time(k).to_string(), v.re.to_string(), v.im.to_string()]).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_timeseries(path: &Path, format: SeriesFormat) -> Result<TimeSeries<f64>> {
    read_timeseries(File::open(path)?, format)
}

pub fn save_timeseries(series: &TimeSeries<f64>, path: &Path) -> Result<()> {
    write_timeseries(series, File::create(path)?)
}

/// `t,x1,…,xJ`.
pub fn write_multiseries<W: Write>(series: &MultiSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((1..=series.dimension()).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(csv_error)?;
    for (k, row) in series.rows().iter().enumerate() {
        let mut rec = vec![series.time(k).to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_multiseries<R: Read>(reader: R) -> Result<MultiSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let t_idx = column(&headers, "t").ok_or_else(|| Error::Format { line: 1, msg: "missing column t".into() })?;
    let mut rows = Vec::new();
    let mut times = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        times.push((number(&rec, t_idx, line)?, line));
        let row = (0..rec.len()).filter(|&i| i != t_idx).map(|i| number(&rec, i, line)).collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let dt = uniform_step(&times)?;
    MultiSeries::new(rows, dt, times[0].0)
}

pub fn save_multiseries(series: &MultiSeries, path: &Path) -> Result<()> {
    write_multiseries(series, File::create(path)?)
}

pub fn load_multiseries(path: &Path) -> Result<MultiSeries> {
    read_multiseries(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let values: Vec<C<f64>> = (0..1000).map(|k| C::new((k as f64 * 0.37).sin() / 3.0, 1.0 / (k as f64 + 0.7))).collect();
        let s = TimeSeries::new(values, 1.0 / 64.0, 0.0).unwrap();
        let mut buf = Vec::new();
        write_timeseries(&s, &mut buf).unwrap();
        let back = read_timeseries(buf.as_slice(), SeriesFormat::Auto).unwrap();
        assert_eq!(back.values(), s.values());
        assert_eq!(back.dt(), s.dt());
    }

    #[test]
    fn daily_index_maps_to_model_time() {
        let text = "date,rmm1,rmm2\n2001-01-30,0.5,-1.0\n2001-01-31,0.6,-0.9\n2001-02-01,0.7,-0.8\n";
        let s = read_timeseries(text.as_bytes(), SeriesFormat::Auto).unwrap();
        assert_eq!(s.dt(), 12.0 / 365.0);
        assert_eq!(s.values()[2], C::new(0.7, -0.8));
    }

    #[test]
    fn date_gap_is_named() {
        let text = "date,rmm1,rmm2\n2001-01-30,0.5,-1.0\n2001-02-02,0.6,-0.9\n";
        let err = read_timeseries(text.as_bytes(), SeriesFormat::Rmm).unwrap_err().to_string();
        assert!(err.contains("gap") && err.contains("2001-01-30") && err.contains("2001-02-02"), "{err}");
    }

    #[test]
    fn nonuniform_rows_report_line() {
        let text = "t,re,im\n0,1,0\n1,1,0\n2,1,0\n3.5,1,0\n4,1,0\n";
        match read_timeseries(text.as_bytes(), SeriesFormat::Complex) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "t,re,im\n0,1,0\n1,x,0\n";
        match read_timeseries(text.as_bytes(), SeriesFormat::Complex) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multiseries_round_trip() {
        let rows: Vec<Vec<f64>> = (0..20).map(|k| (0..5).map(|j| (k * 5 + j) as f64 / 7.0).collect()).collect();
        let s = MultiSeries::new(rows, 0.25, 0.0).unwrap();
        let mut buf = Vec::new();
        write_multiseries(&s, &mut buf).unwrap();
        assert_eq!(read_multiseries(buf.as_slice()).unwrap(), s);
    }
}
