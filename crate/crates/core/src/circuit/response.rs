use num_complex::Complex64;

use super::ac::SMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFlag {
    /// Evaluated slightly above the grid point to step off a line pole.
    Nudged,
    /// Evaluated at the minimum supported frequency instead.
    Clamped,
}

/// Sampled two-port S-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub freqs: Vec<f64>,
    pub s11: Vec<Complex64>,
    pub s21: Vec<Complex64>,
    pub s12: Vec<Complex64>,
    pub s22: Vec<Complex64>,
    pub z_ref: f64,
    /// Grid indices that were not evaluated exactly at their frequency.
    pub flags: Vec<(usize, SweepFlag)>,
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty frequency grid".into()));
    }
    if let Some(f) = grid.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::InvalidGrid(format!("frequency {f} is not positive")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!(
            "grid is not strictly ascending at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub max_deviation: f64,
    /// Frequency and S-matrix entry `(i, j)` of the largest deviation.
    pub at_freq: f64,
    pub entry: (usize, usize),
}

impl FrequencyResponse {
    pub fn new(
        freqs: Vec<f64>,
        s11: Vec<Complex64>,
        s21: Vec<Complex64>,
        s12: Vec<Complex64>,
        s22: Vec<Complex64>,
        z_ref: f64,
    ) -> Result<Self> {
        check_grid(&freqs)?;
        let n = freqs.len();
        if [s11.len(), s21.len(), s12.len(), s22.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(Error::InvalidGrid(
                "S-parameter columns differ in length from the grid".into(),
            ));
        }
        if !(z_ref.is_finite() && z_ref > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "reference impedance {z_ref} must be positive"
            )));
        }
        Ok(Self {
            freqs,
            s11,
            s21,
            s12,
            s22,
            z_ref,
            flags: Vec::new(),
        })
    }

    pub fn from_matrices(freqs: Vec<f64>, points: &[SMatrix], z_ref: f64) -> Result<Self> {
        let col = |i: usize, j: usize| points.iter().map(|s| s[i][j]).collect::<Vec<_>>();
        Self::new(freqs, col(0, 0), col(1, 0), col(0, 1), col(1, 1), z_ref)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn s(&self, k: usize) -> SMatrix {
        [[self.s11[k], self.s12[k]], [self.s21[k], self.s22[k]]]
    }

    pub fn s21_db(&self) -> Vec<f64> {
        self.s21.iter().map(|v| db(v.norm())).collect()
    }

    pub fn s11_db(&self) -> Vec<f64> {
        self.s11.iter().map(|v| db(v.norm())).collect()
    }

    /// Maximum `|S_a - S_b|` over the grid and all four entries.
    pub fn equivalent(&self, other: &FrequencyResponse, tol: f64) -> Result<EquivalenceReport> {
        if self.freqs != other.freqs {
            return Err(Error::GridMismatch(format!(
                "{} vs {} points (or differing frequencies)",
                self.len(),
                other.len()
            )));
        }
        let mut report = EquivalenceReport {
            equivalent: true,
            max_deviation: 0.0,
            at_freq: self.freqs[0],
            entry: (0, 0),
        };
        for k in 0..self.len() {
            let (a, b) = (self.s(k), other.s(k));
            for i in 0..2 {
                for j in 0..2 {
                    let d = (a[i][j] - b[i][j]).norm();
                    if d > report.max_deviation || d.is_nan() {
                        report.max_deviation = d;
                        report.at_freq = self.freqs[k];
                        report.entry = (i, j);
                    }
                }
            }
        }
        report.equivalent = report.max_deviation <= tol;
        Ok(report)
    }
}

/// `20 log10(mag)`, with an exact zero mapped to a finite floor.
pub fn db(mag: f64) -> f64 {
    20.0 * mag.max(1e-300).log10()
}
