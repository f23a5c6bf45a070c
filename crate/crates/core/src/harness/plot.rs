//! Plot-ready aggregation of a metrics log: for each recorded metric, a
//! trailing-window mean, population standard deviation, and nearest-rank
//! 5th/95th percentiles over the training rows (evaluation rows are a
//! different population and are skipped).

use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, HarnessError, METRICS_HEADER};

/// Trailing window length, in training episodes.
pub const PLOT_WINDOW: usize = 50;

/// Header of every emitted series file.
pub const SERIES_HEADER: &str = "step,mean,std,p5,p95";

/// (metric name, column index in the metrics log)
const METRIC_COLUMNS: [(&str, usize); 5] = [
    ("arrived_distance", 4),
    ("finished_score", 5),
    ("return", 6),
    ("loss", 7),
    ("epsilon", 8),
];

/// Aggregate `metrics.csv` into one `plot_<metric>.csv` per metric under
/// `out_dir`, returning the paths written. Rows whose field is empty (loss
/// before the first update) are skipped for that metric only.
pub fn plot_series(metrics_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let bad = |reason: String| HarnessError::Metrics {
        path: metrics_path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(metrics_path).map_err(|e| io_err(metrics_path, e))?;
    let mut lines = text.lines().filter(|line| !line.trim().is_empty());
    match lines.next() {
        Some(header) if header == METRICS_HEADER => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let column_count = METRICS_HEADER.split(',').count();
    let mut rows: Vec<Vec<&str>> = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != column_count {
            return Err(bad(format!("row with {} fields: {line:?}", fields.len())));
        }
        if fields[2] != "eval" {
            rows.push(fields);
        }
    }

    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut written = Vec::with_capacity(METRIC_COLUMNS.len());
    for (name, column) in METRIC_COLUMNS {
        let mut series: Vec<(u64, f64)> = Vec::with_capacity(rows.len());
        for fields in &rows {
            if fields[column].is_empty() {
                continue;
            }
            let step: u64 = fields[0]
                .parse()
                .map_err(|_| bad(format!("unparseable step {:?}", fields[0])))?;
            let value: f64 = fields[column]
                .parse()
                .map_err(|_| bad(format!("unparseable {name} value {:?}", fields[column])))?;
            series.push((step, value));
        }
        let mut out = String::with_capacity(series.len() * 48 + SERIES_HEADER.len() + 1);
        out.push_str(SERIES_HEADER);
        out.push('\n');
        for (i, &(step, _)) in series.iter().enumerate() {
            let window: Vec<f64> = series[(i + 1).saturating_sub(PLOT_WINDOW)..=i]
                .iter()
                .map(|&(_, value)| value)
                .collect();
            let (mean, std) = mean_std(&window);
            let p5 = percentile(&window, 5.0);
            let p95 = percentile(&window, 95.0);
            out.push_str(&format!("{step},{mean},{std},{p5},{p95}\n"));
        }
        let path = out_dir.join(format!("plot_{name}.csv"));
        fs::write(&path, out).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Mean and population standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, variance.sqrt())
}

/// Nearest-rank percentile: the smallest value with at least p% of the
/// sample at or below it.
fn percentile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn write_metrics(dir: &Path, rows: &[&str]) -> PathBuf {
        let path = dir.join("metrics.csv");
        let mut text = String::from(METRICS_HEADER);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn trailing_window_statistics_are_exact() {
        let dir = TempDir::new().unwrap();
        let metrics = write_metrics(
            dir.path(),
            &[
                "1,1,normal,combination,1,0,1,,1",
                "2,2,normal,combination,2,0,2,,0.9",
                "3,2,eval,combination,1000,1,1000,,0.9",
                "4,3,anomaly,combination,3,0.5,3,0.5,0.8",
                "5,4,anomaly,combination,4,1,4,0.25,0.7",
                "6,5,anomaly,combination,5,1,5,0.125,0.6",
            ],
        );
        let out = dir.path().join("plots");
        let written = plot_series(&metrics, &out).unwrap();
        assert_eq!(written.len(), 5);

        let arrived = fs::read_to_string(out.join("plot_arrived_distance.csv")).unwrap();
        let lines: Vec<&str> = arrived.lines().collect();
        assert_eq!(lines[0], SERIES_HEADER);
        // Five training rows; the eval row's 1000 never appears.
        assert_eq!(lines.len(), 6);
        assert!(!arrived.contains("1000"));
        // Window over [1..=5]: mean 3, population std sqrt(2), nearest-rank
        // p5 = min, p95 = max.
        let last: Vec<&str> = lines[5].split(',').collect();
        assert_eq!(last[0], "6");
        assert_eq!(last[1], "3");
        assert_eq!(last[2], &f64::sqrt(2.0).to_string());
        assert_eq!(last[3], "1");
        assert_eq!(last[4], "5");
    }

    #[test]
    fn empty_loss_fields_are_skipped() {
        let dir = TempDir::new().unwrap();
        let metrics = write_metrics(
            dir.path(),
            &[
                "1,1,normal,combination,1,0,1,,1",
                "2,2,normal,combination,2,0,2,0.5,0.9",
            ],
        );
        let out = dir.path().join("plots");
        plot_series(&metrics, &out).unwrap();
        let loss = fs::read_to_string(out.join("plot_loss.csv")).unwrap();
        assert_eq!(loss.lines().count(), 2, "one loss row:\n{loss}");
        assert!(loss.lines().nth(1).unwrap().starts_with("2,0.5,0,"));
        let epsilon = fs::read_to_string(out.join("plot_epsilon.csv")).unwrap();
        assert_eq!(epsilon.lines().count(), 3);
    }

    #[test]
    fn malformed_logs_are_rejected_with_a_reason() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("metrics.csv");
        fs::write(&path, "step,wrong\n").unwrap();
        let err = plot_series(&path, dir.path()).unwrap_err();
        assert!(matches!(err, HarnessError::Metrics { .. }), "{err}");

        let truncated = write_metrics(dir.path(), &["1,1,normal,combination,1,0"]);
        let err = plot_series(&truncated, dir.path()).unwrap_err();
        assert!(err.to_string().contains("fields"), "{err}");
    }
}
