//! Diophantine exponent estimates from record tables.
//!
//! Between records `ψ(t) = value_k` on `[t_k, t_{k+1})`, so the liminf of
//! `t^τ ψ(t)` is approached just before each jump. Every estimate here
//! pairs `value_k` with `t_{k+1}`; the last record has no successor and is
//! not used.

use std::fmt;

use thiserror::Error;

use crate::engine::RecordTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    TailSlope,
    MaxRatio,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::TailSlope => "TAIL_SLOPE",
            Method::MaxRatio => "MAX_RATIO",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TAIL_SLOPE" => Ok(Method::TailSlope),
            "MAX_RATIO" => Ok(Method::MaxRatio),
            other => Err(format!("unknown estimator method '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaveatFlag {
    TooFewRecords,
    ZeroValueSubject,
}

impl CaveatFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaveatFlag::TooFewRecords => "TOO_FEW_RECORDS",
            CaveatFlag::ZeroValueSubject => "ZERO_VALUE_SUBJECT",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentEstimate {
    /// Estimate from the requested method.
    pub omega_hat: f64,
    pub method: Method,
    /// Number of trailing `(value_k, t_{k+1})` pairs used.
    pub window: usize,
    /// RMS residual of the log-log fit (0 for a single pair).
    pub residual: f64,
    pub records_used: usize,
    pub tail_slope: f64,
    pub max_ratio: f64,
    pub caveat_flags: Vec<CaveatFlag>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error("need at least 2 records with positive value, found {0}")]
    InsufficientData(usize),
    #[error("the table closed at value 0; the exponent is infinite")]
    ZeroValueSubject,
    #[error("window {window} outside [2, {available}]")]
    InvalidWindow { window: usize, available: usize },
}

/// `(t_{k+1}, value_k)` for consecutive positive records.
fn pairs(table: &RecordTable) -> Result<Vec<(f64, f64)>, ExponentError> {
    if table.contains_integer_points {
        return Err(ExponentError::ZeroValueSubject);
    }
    let positive = table.positive_records();
    if positive.len() < 2 {
        return Err(ExponentError::InsufficientData(positive.len()));
    }
    Ok(positive.windows(2).map(|w| (w[1].t as f64, w[0].value)).collect())
}

/// `min(10, n/2)` trailing pairs for a table of `n` positive records.
pub fn default_window(records: usize) -> usize {
    (records / 2).min(10)
}

/// Least-squares slope and RMS residual of `y` against `x`.
fn fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (sse / n).sqrt())
}

/// Estimate `ω` from the tail of a record table.
///
/// `window = None` uses [`default_window`], falling back to every pair when
/// that is fewer than two; a single pair yields its ratio, flagged
/// `TOO_FEW_RECORDS`.
pub fn estimate_exponent(
    table: &RecordTable,
    method: Method,
    window: Option<usize>,
) -> Result<ExponentEstimate, ExponentError> {
    let all = pairs(table)?;
    let available = all.len();
    let mut flags = Vec::new();
    let window = match window {
        Some(w) if w < 2 || w > available => return Err(ExponentError::InvalidWindow { window: w, available }),
        Some(w) => w,
        None => {
            let w = default_window(available + 1).max(2);
            if w > available {
                flags.push(CaveatFlag::TooFewRecords);
                available
            } else {
                w
            }
        }
    };
    let tail: Vec<(f64, f64)> =
        all[available - window..].iter().map(|&(t, v)| (t.ln(), -v.ln())).collect();
    let max_ratio = tail.iter().map(|&(x, y)| y / x).fold(0.0, f64::max);
    let (tail_slope, residual) = if tail.len() >= 2 { fit(&tail) } else { (max_ratio, 0.0) };
    Ok(ExponentEstimate {
        omega_hat: match method {
            Method::TailSlope => tail_slope,
            Method::MaxRatio => max_ratio,
        },
        method,
        window,
        residual,
        records_used: window + 1,
        tail_slope,
        max_ratio,
        caveat_flags: flags,
    })
}

/// `(t_k, t_{k+1}^τ · value_k)` over consecutive positive records.
pub fn liminf_profile(table: &RecordTable, tau: f64) -> Vec<(u64, f64)> {
    table
        .positive_records()
        .windows(2)
        .map(|w| (w[0].t, (w[1].t as f64).powf(tau) * w[0].value))
        .collect()
}
