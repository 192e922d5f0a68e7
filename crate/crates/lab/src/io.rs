//! Record persistence: CSV and JSON emission, parse-back, and two-column
//! plot-data export. Output is byte-stable for identical record sequences.

use crate::fit::field_value;
use crate::record::RunRecord;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("no records to write to {0}")]
    Empty(String),
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("plot field: {0}")]
    Field(String),
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv {
        path: path.display().to_string(),
        source,
    }
}

pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<(), IoError> {
    if records.is_empty() {
        return Err(IoError::Empty(path.display().to_string()));
    }
    let mut writer = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for rec in records {
        writer.serialize(rec).map_err(csv_err(path))?;
    }
    writer.flush().map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>, IoError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out = Vec::new();
    for row in reader.deserialize() {
        out.push(row.map_err(csv_err(path))?);
    }
    Ok(out)
}

pub fn emit_json(records: &[RunRecord], path: &Path) -> Result<(), IoError> {
    if records.is_empty() {
        return Err(IoError::Empty(path.display().to_string()));
    }
    let text = serde_json::to_string_pretty(records).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json(path: &Path) -> Result<Vec<RunRecord>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Two-column `x,y` CSV for one field pair, ready for plotting.
pub fn emit_plot_data(
    records: &[RunRecord],
    x_field: &str,
    y_field: &str,
    path: &Path,
) -> Result<(), IoError> {
    if records.is_empty() {
        return Err(IoError::Empty(path.display().to_string()));
    }
    let mut lines = vec![format!("{x_field},{y_field}")];
    for rec in records {
        let x = field_value(rec, x_field).map_err(|e| IoError::Field(e.to_string()))?;
        let y = field_value(rec, y_field).map_err(|e| IoError::Field(e.to_string()))?;
        lines.push(format!("{x},{y}"));
    }
    std::fs::write(path, lines.join("\n") + "\n").map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SweepConfig;
    use crate::sweep::run_sweep;

    fn sample_records() -> Vec<RunRecord> {
        let mut cfg = SweepConfig::default();
        cfg.n_list = vec![128, 256];
        cfg.theta = 0.25;
        cfg.lambda1 = 0.35;
        cfg.lambda2 = 0.45;
        cfg.preset1 = "unit".into();
        cfg.preset2 = "unit".into();
        run_sweep(&cfg, false).unwrap()
    }

    #[test]
    fn csv_roundtrip() {
        let records = sample_records();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        emit_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), records.len() + 1, "header plus rows");
        let back = read_csv(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn json_roundtrip() {
        let records = sample_records();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.json");
        emit_json(&records, &path).unwrap();
        let back = read_json(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn empty_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("none.csv");
        assert!(matches!(emit_csv(&[], &path), Err(IoError::Empty(_))));
        assert!(matches!(emit_json(&[], &path), Err(IoError::Empty(_))));
    }

    #[test]
    fn plot_data_columns() {
        let records = sample_records();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plot.csv");
        emit_plot_data(&records, "n", "j_over_nh2", &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,j_over_nh2");
        assert_eq!(lines.count(), records.len());
        assert!(matches!(
            emit_plot_data(&records, "n", "bogus", &path),
            Err(IoError::Field(_))
        ));
    }
}
