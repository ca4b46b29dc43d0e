//! CSV records written by filtering experiments.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kalman::TrackRow;
use crate::error::{Error, Result};

/// One cell of an experiment grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model_tag: String,
    pub dt: f64,
    pub n: usize,
    #[serde(rename = "R_fraction")]
    pub r_fraction: f64,
    pub prior_rmse: f64,
    pub posterior_rmse: f64,
    pub diverged: bool,
    pub seed: u64,
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

pub fn write_rows<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    rd.deserialize().map(|r| r.map_err(csv_err)).collect()
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_rows(path, rows)
}

pub fn write_track(path: &Path, rows: &[TrackRow]) -> Result<()> {
    write_rows(path, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![ResultRow {
            model_tag: "SCAR-3".into(),
            dt: 0.0625,
            n: 10,
            r_fraction: 0.25,
            prior_rmse: 0.1 + 0.2,
            posterior_rmse: f64::INFINITY,
            diverged: true,
            seed: 7,
        }];
        write_results(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("model_tag,dt,n,R_fraction,prior_rmse,posterior_rmse,diverged,seed"));
        assert_eq!(read_rows::<ResultRow>(&path).unwrap(), rows);
    }
}
