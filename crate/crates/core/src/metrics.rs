//! Stopband figures of merit extracted from a sampled response.

use serde::{Deserialize, Serialize};

use crate::circuit::{db, FrequencyResponse};
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopbandMetrics {
    pub f_notch_hz: f64,
    pub rejection_db: f64,
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    /// `(f_hi - f_lo) / f_notch`.
    pub fbw: f64,
    /// Worst insertion loss in the passband regions; `None` when the grid has
    /// no points outside the stopband margins.
    pub pb_il_db: Option<f64>,
    pub sb_rl_db: f64,
    pub modes_hz: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Fraction of the edge frequency kept clear on each side of the stopband.
    pub passband_margin: f64,
    pub mode_threshold_db: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            passband_margin: 0.2,
            mode_threshold_db: 20.0,
        }
    }
}

pub fn analyze(resp: &FrequencyResponse) -> Result<StopbandMetrics> {
    analyze_with(resp, &AnalysisOptions::default())
}

pub fn analyze_with(resp: &FrequencyResponse, opts: &AnalysisOptions) -> Result<StopbandMetrics> {
    let n = resp.len();
    if n < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "metrics need at least {MIN_POINTS} points, got {n}"
        )));
    }
    let f = &resp.freqs;
    let s21 = resp.s21_db();
    let i = (0..n)
        .min_by(|&a, &b| s21[a].total_cmp(&s21[b]))
        .expect("non-empty grid");
    if s21[i] > -3.0 {
        return Err(Error::NoStopband);
    }
    let (f_notch, depth) = refine_min(f, &s21, i);

    let mut lo = i;
    while lo > 0 && s21[lo] <= -3.0 {
        lo -= 1;
    }
    let mut hi = i;
    while hi < n - 1 && s21[hi] <= -3.0 {
        hi += 1;
    }
    if s21[lo] <= -3.0 || s21[hi] <= -3.0 {
        return Err(Error::SweepTooNarrow(format!(
            "-3 dB edges not bracketed by [{:e}, {:e}] Hz",
            f[0],
            f[n - 1]
        )));
    }
    let f_lo = cross(f[lo], s21[lo], f[lo + 1], s21[lo + 1], -3.0);
    let f_hi = cross(f[hi - 1], s21[hi - 1], f[hi], s21[hi], -3.0);

    let m = opts.passband_margin;
    let pb_il_db = (0..n)
        .filter(|&k| f[k] <= (1.0 - m) * f_lo || f[k] >= (1.0 + m) * f_hi)
        .map(|k| -s21[k])
        .reduce(f64::max);

    let s11 = interp(
        f,
        &resp.s11.iter().map(|v| v.norm()).collect::<Vec<_>>(),
        f_notch,
    );
    let modes_hz = (1..n - 1)
        .filter(|&k| {
            s21[k] < s21[k - 1] && s21[k] <= s21[k + 1] && s21[k] < -opts.mode_threshold_db
        })
        .map(|k| refine_min(f, &s21, k).0)
        .collect();

    Ok(StopbandMetrics {
        f_notch_hz: f_notch,
        rejection_db: -depth,
        f_lo_hz: f_lo,
        f_hi_hz: f_hi,
        fbw: (f_hi - f_lo) / f_notch,
        pb_il_db,
        sb_rl_db: -db(s11),
        modes_hz,
    })
}

/// Vertex of the parabola through the grid minimum and its neighbours.
fn refine_min(f: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 == f.len() {
        return (f[i], y[i]);
    }
    let (x0, x1, x2) = (f[i - 1], f[i], f[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a > 0.0 && a.is_finite()) {
        return (x1, y1);
    }
    let b = d01 - a * (x0 + x1);
    let xv = (-b / (2.0 * a)).clamp(x0, x2);
    let yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
    (xv, yv.min(y1))
}

fn cross(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    x0 + (x1 - x0) * (level - y0) / (y1 - y0)
}

fn interp(x: &[f64], y: &[f64], at: f64) -> f64 {
    let k = x.partition_point(|&v| v <= at).clamp(1, x.len() - 1);
    y[k - 1] + (y[k] - y[k - 1]) * (at - x[k - 1]) / (x[k] - x[k - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTolerances {
    /// Relative, applied to f_notch, f_lo and f_hi.
    pub freq_rel: f64,
    pub rejection_db: f64,
    pub fbw_abs: f64,
    pub pb_il_db: f64,
    pub sb_rl_db: f64,
}

impl Default for MetricTolerances {
    fn default() -> Self {
        Self {
            freq_rel: 0.01,
            rejection_db: 1.0,
            fbw_abs: 0.01,
            pb_il_db: 0.1,
            sb_rl_db: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldCheck {
    pub field: &'static str,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub fields: Vec<FieldCheck>,
}

impl ComparisonReport {
    pub fn pass(&self) -> bool {
        self.fields.iter().all(|c| c.pass)
    }

    pub fn field(&self, name: &str) -> Option<&FieldCheck> {
        self.fields.iter().find(|c| c.field == name)
    }
}

pub fn compare(
    a: &StopbandMetrics,
    b: &StopbandMetrics,
    tol: &MetricTolerances,
) -> ComparisonReport {
    let check = |field, x: Option<f64>, y: Option<f64>, tolerance: f64, relative: bool| {
        let deviation = match (x, y) {
            (Some(x), Some(y)) if relative => (x - y).abs() / y.abs().max(f64::MIN_POSITIVE),
            (Some(x), Some(y)) => (x - y).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        FieldCheck {
            field,
            a: x,
            b: y,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    };
    let fields = vec![
        check(
            "f_notch_hz",
            Some(a.f_notch_hz),
            Some(b.f_notch_hz),
            tol.freq_rel,
            true,
        ),
        check(
            "rejection_db",
            Some(a.rejection_db),
            Some(b.rejection_db),
            tol.rejection_db,
            false,
        ),
        check(
            "f_lo_hz",
            Some(a.f_lo_hz),
            Some(b.f_lo_hz),
            tol.freq_rel,
            true,
        ),
        check(
            "f_hi_hz",
            Some(a.f_hi_hz),
            Some(b.f_hi_hz),
            tol.freq_rel,
            true,
        ),
        check("fbw", Some(a.fbw), Some(b.fbw), tol.fbw_abs, false),
        check("pb_il_db", a.pb_il_db, b.pb_il_db, tol.pb_il_db, false),
        check(
            "sb_rl_db",
            Some(a.sb_rl_db),
            Some(b.sb_rl_db),
            tol.sb_rl_db,
            false,
        ),
    ];
    ComparisonReport { fields }
}
