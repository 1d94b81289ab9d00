//! CSV export of aggregated learning curves.
//!
//! Files are UTF-8 with LF line endings. Floats are written in scientific
//! notation with 17 significant digits, so values round-trip exactly.
//!
//! `<stem>_train.csv` / `<stem>_test.csv`:
//!
//! | column           | meaning                                            |
//! |------------------|----------------------------------------------------|
//! | `iteration`      | 0-based sample index along the curve               |
//! | `mean_sq_err`    | `e²` averaged across trials                         |
//! | `mean_db`        | `10·log10(mean_sq_err)`                             |
//! | `mean_db_maW`    | optional: dB of the trailing `W`-sample mean        |
//!
//! `<stem>_summary.csv` has `metric,value` rows.

use std::fs;
use std::path::{Path, PathBuf};

use super::aggregate::{curve_db, AggregateResult, CompensatedSum};
use crate::error::{Error, Result};

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Trailing moving average; the first `window − 1` entries average what is
/// available.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    for k in 0..values.len() {
        let lo = (k + 1).saturating_sub(window);
        let mut acc = CompensatedSum::default();
        values[lo..=k].iter().for_each(|&v| acc.add(v));
        out.push(acc.value() / (k + 1 - lo) as f64);
    }
    out
}

pub fn curve_csv(curve: &[f64], ma_window: usize) -> String {
    let mut out = String::from("iteration,mean_sq_err,mean_db");
    if ma_window > 0 {
        out.push_str(&format!(",mean_db_ma{ma_window}"));
    }
    out.push('\n');
    let ma = (ma_window > 0).then(|| moving_average(curve, ma_window));
    for (k, &m) in curve.iter().enumerate() {
        out.push_str(&format!("{k},{},{}", fmt_f64(m), fmt_f64(curve_db(m))));
        if let Some(ma) = &ma {
            out.push(',');
            out.push_str(&fmt_f64(curve_db(ma[k])));
        }
        out.push('\n');
    }
    out
}

pub fn summary_csv(result: &AggregateResult) -> String {
    let (ref_train, ref_test) = result.model.reference_db();
    let rows: [(&str, String); 9] = [
        ("model", result.model.to_string()),
        ("final_train_mse", fmt_f64(result.final_train_mse)),
        ("final_train_mse_db", fmt_f64(result.final_train_mse_db)),
        ("mean_test_mse", fmt_f64(result.mean_test_mse)),
        ("mean_test_mse_db", fmt_f64(result.mean_test_mse_db)),
        ("trials_used", result.trials_used.to_string()),
        ("diverged_count", result.diverged_count.to_string()),
        ("reference_train_db", fmt_f64(ref_train)),
        ("reference_test_db", fmt_f64(ref_test)),
    ];
    let mut out = String::from("metric,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the train curve, test curve and summary of `result` into `dir`.
pub fn emit_csv(
    result: &AggregateResult,
    dir: &Path,
    stem: &str,
    ma_window: usize,
) -> Result<Vec<PathBuf>> {
    let files = [
        (dir.join(format!("{stem}_train.csv")), curve_csv(&result.mean_train_curve, ma_window)),
        (dir.join(format!("{stem}_test.csv")), curve_csv(&result.mean_test_curve, ma_window)),
        (dir.join(format!("{stem}_summary.csv")), summary_csv(result)),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (path, text) in files {
        write(&path, &text)?;
        written.push(path);
    }
    Ok(written)
}

/// One row per model: measured summary next to the published reference.
pub fn comparison_csv(results: &[AggregateResult]) -> String {
    let mut out = String::from(
        "model,final_train_mse_db,mean_test_mse_db,trials_used,diverged_count,reference_train_db,reference_test_db\n",
    );
    for r in results {
        let (rt, rs) = r.model.reference_db();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.model,
            fmt_f64(r.final_train_mse_db),
            fmt_f64(r.mean_test_mse_db),
            r.trials_used,
            r.diverged_count,
            fmt_f64(rt),
            fmt_f64(rs)
        ));
    }
    out
}

pub fn emit_comparison(results: &[AggregateResult], path: &Path) -> Result<()> {
    write(path, &comparison_csv(results))
}

/// Reads the `mean_sq_err` column back from a curve CSV.
pub fn read_curve_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let col = header
        .split(',')
        .position(|h| h == "mean_sq_err")
        .ok_or_else(|| parse_err(1, "no mean_sq_err column".into()))?;
    lines
        .enumerate()
        .map(|(i, line)| {
            let field = line
                .split(',')
                .nth(col)
                .ok_or_else(|| parse_err(i + 2, "short row".into()))?;
            field
                .parse::<f64>()
                .map_err(|e| parse_err(i + 2, format!("`{field}`: {e}")))
        })
        .collect()
}
