//! Calibration of `(C_a, C_b)` against stopband targets and tuning curves.

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::circuit::{linspace, sweep, FrequencyResponse, Netlist};
use crate::error::{Error, Result};
use crate::metrics::{analyze, StopbandMetrics};
use crate::optim::{minimize, NelderMeadOptions};
use crate::synthesis::SynthesizedDesign;
use crate::topology::{build_practical_values, LossModel, PracticalValues, TopologyId};
use crate::varactor::{BiasPoint, VaractorModel};

/// Objective value assigned to probes without a stopband.
const NO_STOPBAND_PENALTY: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    #[serde(rename = "f0_target_hz")]
    pub f0_target: f64,
    pub fbw_target: f64,
    #[serde(default = "default_weight")]
    pub weight_fbw: f64,
}

fn default_weight() -> f64 {
    0.25
}

impl CalibrationTarget {
    pub fn new(f0_target: f64, fbw_target: f64) -> Self {
        Self {
            f0_target,
            fbw_target,
            weight_fbw: default_weight(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0_target.is_finite() && self.f0_target > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "f0 target must be > 0, got {}",
                self.f0_target
            )));
        }
        if !(self.fbw_target > 0.0 && self.fbw_target < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "FBW target must be in (0, 1), got {}",
                self.fbw_target
            )));
        }
        if !(self.weight_fbw.is_finite() && self.weight_fbw >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "FBW weight must be >= 0, got {}",
                self.weight_fbw
            )));
        }
        Ok(())
    }

    pub fn objective(&self, m: &StopbandMetrics) -> f64 {
        let df = (m.f_notch_hz - self.f0_target) / self.f0_target;
        let db = (m.fbw - self.fbw_target) / self.fbw_target;
        df * df + self.weight_fbw * db * db
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapBounds {
    pub ca_f: (f64, f64),
    pub cb_f: (f64, f64),
}

impl CapBounds {
    /// `[c / factor, c * factor]` around each value.
    pub fn around(ca: f64, cb: f64, factor: f64) -> Self {
        Self {
            ca_f: (ca / factor, ca * factor),
            cb_f: (cb / factor, cb * factor),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("ca", self.ca_f), ("cb", self.cb_f)] {
            if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!(
                    "{name} bounds [{lo:e}, {hi:e}] must be positive and ordered"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, ca: f64, cb: f64) -> bool {
        (self.ca_f.0..=self.ca_f.1).contains(&ca) && (self.cb_f.0..=self.cb_f.1).contains(&cb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    #[serde(rename = "ca_f")]
    pub ca: f64,
    #[serde(rename = "cb_f")]
    pub cb: f64,
    pub metrics: StopbandMetrics,
    pub objective: f64,
    pub initial_objective: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CbRule {
    /// Keep `C_b` at this value for every row.
    Fixed(f64),
    /// Refit `C_b` at every row so the -3 dB FBW matches `fbw_target`.
    Recalibrated {
        fbw_target: f64,
        cb_bounds: (f64, f64),
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuningRow {
    pub control: f64,
    #[serde(rename = "ca_f")]
    pub ca: f64,
    #[serde(rename = "cb_f")]
    pub cb: f64,
    /// `None` marks a gap: the row was simulated but had no usable stopband.
    pub metrics: Option<StopbandMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TuningCurve {
    pub rows: Vec<TuningRow>,
}

impl TuningCurve {
    pub fn covered(&self) -> impl Iterator<Item = (&TuningRow, &StopbandMetrics)> {
        self.rows
            .iter()
            .filter_map(|r| r.metrics.as_ref().map(|m| (r, m)))
    }

    pub fn gaps(&self) -> usize {
        self.rows.iter().filter(|r| r.metrics.is_none()).count()
    }

    /// `(min, max)` notch frequency over the non-gap rows.
    pub fn notch_span(&self) -> Option<(f64, f64)> {
        self.covered()
            .map(|(_, m)| m.f_notch_hz)
            .fold(None, |acc, f| match acc {
                None => Some((f, f)),
                Some((lo, hi)) => Some((lo.min(f), hi.max(f))),
            })
    }
}

/// Simulation context for one practical circuit with variable `C_a`, `C_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tuner {
    values: PracticalValues,
    topology: TopologyId,
    loss: LossModel,
    /// Sweep span relative to the centre frequency.
    pub span: (f64, f64),
    pub points: usize,
    pub f_center: f64,
    pub options: NelderMeadOptions,
}

impl Tuner {
    pub fn new(design: &SynthesizedDesign, topology: TopologyId, loss: LossModel) -> Result<Self> {
        Self::from_values(PracticalValues::from_design(design), topology, loss)
    }

    pub fn from_values(
        values: PracticalValues,
        topology: TopologyId,
        loss: LossModel,
    ) -> Result<Self> {
        if !topology.is_practical() {
            return Err(Error::UnknownVariant(format!(
                "{topology} has no tunable capacitors"
            )));
        }
        loss.validate()?;
        Ok(Self {
            values,
            topology,
            loss,
            span: (0.4, 1.6),
            points: 801,
            f_center: values.f0,
            options: NelderMeadOptions::default(),
        })
    }

    /// Reference operating point, used as the calibration start.
    pub fn with_caps(mut self, ca: f64, cb: f64) -> Self {
        self.values = self.values.with_caps(ca, cb);
        self
    }

    pub fn values(&self) -> &PracticalValues {
        &self.values
    }

    pub fn topology(&self) -> TopologyId {
        self.topology
    }

    pub fn loss(&self) -> &LossModel {
        &self.loss
    }

    pub fn netlist(&self, ca: f64, cb: f64) -> Result<Netlist> {
        build_practical_values(&self.values.with_caps(ca, cb), self.topology, &self.loss)
    }

    pub fn response(&self, ca: f64, cb: f64) -> Result<FrequencyResponse> {
        let (lo, hi) = self.span;
        sweep(
            &self.netlist(ca, cb)?,
            &linspace(lo * self.f_center, hi * self.f_center, self.points),
        )
    }

    /// Stopband metrics at `(ca, cb)`, widening the sweep up to three times
    /// when an edge falls outside it.
    pub fn metrics(&self, ca: f64, cb: f64) -> Result<StopbandMetrics> {
        let net = self.netlist(ca, cb)?;
        let (mut lo, mut hi) = self.span;
        let mut attempt = 0;
        loop {
            let grid = linspace(lo * self.f_center, hi * self.f_center, self.points);
            match sweep(&net, &grid).and_then(|r| analyze(&r)) {
                Err(Error::SweepTooNarrow(msg)) if attempt < 3 => {
                    debug!("widening sweep at ca={ca:e} cb={cb:e}: {msg}");
                    lo *= 0.5;
                    hi *= 1.5;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    pub fn calibrate(&self, target: &CalibrationTarget, bounds: &CapBounds) -> Result<Calibration> {
        self.calibrate_from(target, bounds, self.values.ca, self.values.cb)
    }

    /// Bounded simplex over `(C_a, C_b)`, normalized by the start point.
    pub fn calibrate_from(
        &self,
        target: &CalibrationTarget,
        bounds: &CapBounds,
        ca0: f64,
        cb0: f64,
    ) -> Result<Calibration> {
        target.validate()?;
        bounds.validate()?;
        let ca0 = ca0.clamp(bounds.ca_f.0, bounds.ca_f.1);
        let cb0 = cb0.clamp(bounds.cb_f.0, bounds.cb_f.1);
        let scale = [ca0, cb0];
        let lo = [bounds.ca_f.0 / ca0, bounds.cb_f.0 / cb0];
        let hi = [bounds.ca_f.1 / ca0, bounds.cb_f.1 / cb0];
        let mut last = (ca0, cb0);
        let mut feasible = false;
        let objective = |x: &[f64]| {
            let (ca, cb) = (x[0] * scale[0], x[1] * scale[1]);
            last = (ca, cb);
            match self.metrics(ca, cb) {
                Ok(m) => {
                    feasible = true;
                    target.objective(&m)
                }
                Err(e) => {
                    debug!("calibration probe ca={ca:e} cb={cb:e}: {e}");
                    NO_STOPBAND_PENALTY
                }
            }
        };
        // Restart from the best vertex while it keeps improving: the metric
        // surface has jumps where the deepest zero changes mode, and on a
        // lossless dual-mode response that choice is decided by which zero
        // falls closer to a grid point. The shared budget can run out first.
        let mut objective = objective;
        let mut best = minimize(&mut objective, &[1.0, 1.0], &lo, &hi, &self.options);
        let mut evals = best.evals;
        while evals < self.options.max_evals {
            let opts = NelderMeadOptions {
                max_evals: self.options.max_evals - evals,
                ..self.options
            };
            let next = minimize(&mut objective, &best.x, &lo, &hi, &opts);
            evals += next.evals;
            if next.fx >= best.fx * (1.0 - 1e-6) {
                break;
            }
            best = next;
        }
        best.evals = evals;
        best.converged &= evals < self.options.max_evals;
        if !feasible {
            return Err(Error::CalibrationInfeasible {
                ca: last.0,
                cb: last.1,
            });
        }
        let (ca, cb) = (
            (best.x[0] * scale[0]).clamp(bounds.ca_f.0, bounds.ca_f.1),
            (best.x[1] * scale[1]).clamp(bounds.cb_f.0, bounds.cb_f.1),
        );
        let metrics = self.metrics(ca, cb)?;
        let initial_objective = self
            .metrics(ca0, cb0)
            .map_or(NO_STOPBAND_PENALTY, |m| target.objective(&m));
        info!(
            "calibrated ca={ca:e} cb={cb:e} f_notch={:e} fbw={:.4} after {} evaluations",
            metrics.f_notch_hz, metrics.fbw, best.evals
        );
        Ok(Calibration {
            ca,
            cb,
            objective: target.objective(&metrics),
            metrics,
            initial_objective,
            evaluations: best.evals,
            converged: best.converged,
        })
    }

    /// One row per `C_a` value, in grid order.
    ///
    /// With [`CbRule::Recalibrated`] the FBW fit is continued outward from
    /// the grid point nearest the reference `C_a`, each row starting from its
    /// neighbour's `C_b`.
    pub fn tuning_curve_caps(&self, ca_grid: &[f64], rule: CbRule) -> Result<TuningCurve> {
        check_monotone(ca_grid, "C_a grid")?;
        if let Some(c) = ca_grid.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "C_a grid value {c:e} must be > 0"
            )));
        }
        let mut rows: Vec<Option<TuningRow>> = vec![None; ca_grid.len()];
        match rule {
            CbRule::Fixed(cb) => {
                for (k, &ca) in ca_grid.iter().enumerate() {
                    rows[k] = Some(self.row(ca, ca, cb)?);
                }
            }
            CbRule::Recalibrated {
                fbw_target,
                cb_bounds,
            } => {
                if !(fbw_target > 0.0 && fbw_target < 1.0)
                    || !(cb_bounds.0 > 0.0 && cb_bounds.0 <= cb_bounds.1)
                {
                    return Err(Error::InvalidArgument(
                        "invalid FBW target or C_b bounds".into(),
                    ));
                }
                let start = (0..ca_grid.len())
                    .min_by(|&a, &b| {
                        let d = |k: usize| (ca_grid[k] / self.values.ca).ln().abs();
                        d(a).total_cmp(&d(b))
                    })
                    .expect("non-empty grid");
                let cb_ref = self.values.cb.clamp(cb_bounds.0, cb_bounds.1);
                let up: Vec<usize> = (start..ca_grid.len()).collect();
                let down: Vec<usize> = (0..start).rev().collect();
                for path in [up, down] {
                    let mut cb_prev = cb_ref;
                    for k in path {
                        let ca = ca_grid[k];
                        let cb = self.fit_cb(ca, cb_prev, fbw_target, cb_bounds);
                        let row = self.row(ca, ca, cb)?;
                        if row.metrics.is_some() {
                            cb_prev = cb;
                        }
                        rows[k] = Some(row);
                    }
                }
            }
        }
        Ok(TuningCurve {
            rows: rows
                .into_iter()
                .map(|r| r.expect("every row visited"))
                .collect(),
        })
    }

    /// Rows for varactor bias points; `C_a` follows `v1`, `C_b` is an
    /// anti-series pair at `v2`. The device `rs` replaces the loss model's.
    pub fn tuning_curve_bias(
        &self,
        model: &VaractorModel,
        biases: &[BiasPoint],
    ) -> Result<TuningCurve> {
        model.validate()?;
        let v1: Vec<f64> = biases.iter().map(|b| b.v1).collect();
        check_monotone(&v1, "V1 bias grid")?;
        let mut caps = Vec::with_capacity(biases.len());
        for (row, b) in biases.iter().enumerate() {
            let with_row = |e: Error| match e {
                Error::BiasOutOfRange {
                    voltage, min, max, ..
                } => Error::BiasOutOfRange {
                    voltage,
                    min,
                    max,
                    row: Some(row),
                },
                other => other,
            };
            caps.push(model.caps_for(*b).map_err(with_row)?);
        }
        let tuner = Self {
            loss: LossModel {
                varactor_rs: model.rs,
                ..self.loss
            },
            ..self.clone()
        };
        let rows = biases
            .iter()
            .zip(caps)
            .map(|(b, (ca, cb))| tuner.row(b.v1, ca, cb))
            .collect::<Result<Vec<_>>>()?;
        Ok(TuningCurve { rows })
    }

    fn row(&self, control: f64, ca: f64, cb: f64) -> Result<TuningRow> {
        let (metrics, gap) = match self.metrics(ca, cb) {
            Ok(m) => (Some(m), None),
            Err(e @ (Error::NoStopband | Error::SweepTooNarrow(_))) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        Ok(TuningRow {
            control,
            ca,
            cb,
            metrics,
            gap,
        })
    }

    /// Golden-section fit of `C_b` in a +-30 % window around `cb_start`.
    fn fit_cb(&self, ca: f64, cb_start: f64, fbw_target: f64, bounds: (f64, f64)) -> f64 {
        let cost = |cb: f64| match self.metrics(ca, cb) {
            Ok(m) => (m.fbw - fbw_target).powi(2),
            Err(_) => NO_STOPBAND_PENALTY,
        };
        let (mut a, mut b) = (
            (0.7 * cb_start).max(bounds.0),
            (1.3 * cb_start).min(bounds.1),
        );
        if a >= b {
            return a.min(bounds.1);
        }
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - r * (b - a);
        let mut x2 = a + r * (b - a);
        let (mut f1, mut f2) = (cost(x1), cost(x2));
        while (b - a) > 1e-5 * cb_start {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = cost(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = cost(x2);
            }
        }
        if f1 <= f2 {
            x1
        } else {
            x2
        }
    }
}

fn check_monotone(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} is empty")));
    }
    let up = v.windows(2).all(|w| w[1] > w[0]);
    let down = v.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be strictly monotone"
        )));
    }
    Ok(())
}

pub fn calibrate(
    design: &SynthesizedDesign,
    topology: TopologyId,
    target: &CalibrationTarget,
    bounds: &CapBounds,
) -> Result<Calibration> {
    Tuner::new(design, topology, LossModel::lossless())?.calibrate(target, bounds)
}

pub fn tuning_curve_caps(
    design: &SynthesizedDesign,
    topology: TopologyId,
    ca_grid: &[f64],
    rule: CbRule,
) -> Result<TuningCurve> {
    Tuner::new(design, topology, LossModel::lossless())?.tuning_curve_caps(ca_grid, rule)
}

pub fn tuning_curve_bias(
    design: &SynthesizedDesign,
    topology: TopologyId,
    model: &VaractorModel,
    biases: &[BiasPoint],
) -> Result<TuningCurve> {
    Tuner::new(design, topology, LossModel::lossless())?.tuning_curve_bias(model, biases)
}

/// The five bias cases of the reference measurement, highest tuning first.
pub const REFERENCE_BIAS_CASES: [BiasPoint; 5] = [
    BiasPoint { v1: 15.0, v2: 35.0 },
    BiasPoint { v1: 8.5, v2: 30.0 },
    BiasPoint { v1: 6.0, v2: 11.0 },
    BiasPoint { v1: 4.2, v2: 5.0 },
    BiasPoint { v1: 1.7, v2: 0.2 },
];
