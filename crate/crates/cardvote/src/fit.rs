//! Least-squares power-law fits on log-log scale.

use cardvote_core::rational::parse_rational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log-scale residuals.
    pub residual: f64,
}

/// Fits `ln y = slope · ln x + intercept`.
///
/// Needs at least three points with strictly increasing positive `x` and
/// positive `y`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(Error::Data(format!("need at least 3 points, got {}", points.len())));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Data("x values must be strictly increasing".into()));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Data(format!("nonpositive value at ({x}, {y})")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = logs.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    Ok(Fit {
        slope,
        intercept,
        residual: (sse / len).sqrt(),
    })
}

fn cell_value(cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .or_else(|| parse_rational(cell).and_then(|r| r.to_f64()))
        .ok_or_else(|| Error::Data(format!("not a number: `{cell}`")))
}

/// Reads columns `x_col` and `y_col` from CSV with a header row (`#` lines skipped).
/// Cells may be decimals or exact `p/q` values.
pub fn read_points(text: &str, x_col: &str, y_col: &str) -> Result<Vec<(f64, f64)>> {
    read_points_where(text, x_col, y_col, None)
}

/// [`read_points`] restricted to rows whose `filter.0` column equals `filter.1`.
pub fn read_points_where(text: &str, x_col: &str, y_col: &str, filter: Option<(&str, &str)>) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("no column `{name}`")))
    };
    let (xi, yi) = (find(x_col)?, find(y_col)?);
    let filter = filter.map(|(col, value)| find(col).map(|i| (i, value))).transpose()?;
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if filter.is_some_and(|(i, value)| &rec[i] != value) {
            continue;
        }
        points.push((cell_value(&rec[xi])?, cell_value(&rec[yi])?));
    }
    Ok(points)
}
