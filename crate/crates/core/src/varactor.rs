//! Junction varactor C-V model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `c(v) = cj0 / (1 + v/vj)^m + cp` for reverse bias `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaractorModel {
    #[serde(rename = "cj0_f")]
    pub cj0: f64,
    #[serde(rename = "vj_v")]
    pub vj: f64,
    pub m: f64,
    #[serde(rename = "cp_f", default)]
    pub cp: f64,
    #[serde(rename = "rs_ohm", default)]
    pub rs: f64,
    #[serde(rename = "v_min_v")]
    pub v_min: f64,
    #[serde(rename = "v_max_v")]
    pub v_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasPoint {
    /// Bias of the `C_a` varactors (V).
    pub v1: f64,
    /// Bias of the anti-series `C_b` pairs (V).
    pub v2: f64,
}

impl BiasPoint {
    pub fn new(v1: f64, v2: f64) -> Self {
        Self { v1, v2 }
    }
}

impl VaractorModel {
    /// Generic hyperabrupt-like profile spanning roughly 0.5-10 pF over
    /// 0-35 V. Not fitted to any specific device.
    pub fn placeholder() -> Self {
        Self {
            cj0: 9.6e-12,
            vj: 0.7,
            m: 0.82,
            cp: 0.0,
            rs: 1.0,
            v_min: 0.0,
            v_max: 35.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidVaractor(msg));
        if !(self.cj0.is_finite() && self.cj0 > 0.0) {
            return bad(format!("cj0 must be > 0, got {}", self.cj0));
        }
        if !(self.vj.is_finite() && self.vj > 0.0) {
            return bad(format!("vj must be > 0, got {}", self.vj));
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return bad(format!("m must be > 0, got {}", self.m));
        }
        if !(self.cp.is_finite() && self.cp >= 0.0) || !(self.rs.is_finite() && self.rs >= 0.0) {
            return bad("cp and rs must be >= 0".into());
        }
        if !(self.v_min >= 0.0 && self.v_max.is_finite() && self.v_min < self.v_max) {
            return bad(format!(
                "need 0 <= v_min < v_max, got [{}, {}]",
                self.v_min, self.v_max
            ));
        }
        Ok(())
    }

    fn check_bias(&self, v: f64) -> Result<()> {
        if !(v >= self.v_min && v <= self.v_max) {
            return Err(Error::BiasOutOfRange {
                voltage: v,
                min: self.v_min,
                max: self.v_max,
                row: None,
            });
        }
        Ok(())
    }

    fn law(&self, v: f64) -> f64 {
        self.cj0 / (1.0 + v / self.vj).powf(self.m) + self.cp
    }

    pub fn capacitance(&self, v: f64) -> Result<f64> {
        self.check_bias(v)?;
        Ok(self.law(v))
    }

    /// Achievable `(min, max)` capacitance over the bias range.
    pub fn range(&self) -> (f64, f64) {
        (self.law(self.v_max), self.law(self.v_min))
    }

    /// Bias giving capacitance `c_target`.
    pub fn invert(&self, c_target: f64) -> Result<f64> {
        let (min, max) = self.range();
        if !(c_target >= min && c_target <= max) {
            return Err(Error::UnreachableCapacitance {
                target: c_target,
                min,
                max,
            });
        }
        let v = if self.cp == 0.0 {
            self.vj * ((self.cj0 / c_target).powf(1.0 / self.m) - 1.0)
        } else {
            let (mut lo, mut hi) = (self.v_min, self.v_max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.law(mid) > c_target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi.max(1.0) {
                    break;
                }
            }
            0.5 * (lo + hi)
        };
        Ok(v.clamp(self.v_min, self.v_max))
    }

    /// Two identical devices in series at equal bias: `(c/2, 2 rs)`.
    pub fn anti_series(&self, v: f64) -> Result<(f64, f64)> {
        Ok((self.capacitance(v)? / 2.0, 2.0 * self.rs))
    }

    /// `(C_a, C_b)` for a bias point; `C_b` is an anti-series pair.
    pub fn caps_for(&self, bias: BiasPoint) -> Result<(f64, f64)> {
        Ok((self.capacitance(bias.v1)?, self.anti_series(bias.v2)?.0))
    }
}
