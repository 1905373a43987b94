//! Element-value synthesis for the second-order dual-mode bandstop filter.
//!
//! The chain runs from a lowpass prototype to the inverter impedance and
//! resonator `L`/`C`, splits the resonator into branch and coupling parts,
//! and finally re-expresses the capacitive coupling network with a chosen
//! series capacitor `C_C` so that the remaining capacitors are values a
//! varactor can realize. All quantities are SI (Hz, H, F, ohm).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Only second-order designs are synthesized: the circuit has exactly two
/// resonators and the inverter impedance uses `g0..g3`.
pub const SUPPORTED_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PrototypeKind {
    #[default]
    Butterworth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    #[serde(rename = "f0_hz")]
    pub f0: f64,
    /// Fractional bandwidth of the stopband.
    #[serde(rename = "fbw")]
    pub delta: f64,
    pub order: usize,
    #[serde(rename = "z0_ohm")]
    pub z0: f64,
    /// Series capacitor `C_C`.
    #[serde(rename = "cc_f")]
    pub cc: f64,
    #[serde(rename = "prototype", default)]
    pub prototype_kind: PrototypeKind,
}

impl FilterSpec {
    pub fn new(f0: f64, delta: f64, z0: f64, cc: f64) -> Self {
        Self {
            f0,
            delta,
            order: SUPPORTED_ORDER,
            z0,
            cc,
            prototype_kind: PrototypeKind::Butterworth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.f0) {
            return Err(Error::InvalidSpec(format!(
                "f0 must be positive, got {}",
                self.f0
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "fractional bandwidth must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !positive(self.z0) {
            return Err(Error::InvalidSpec(format!(
                "z0 must be positive, got {}",
                self.z0
            )));
        }
        if !positive(self.cc) {
            return Err(Error::InvalidSpec(format!(
                "C_C must be positive, got {}",
                self.cc
            )));
        }
        if self.order < 2 {
            return Err(Error::InvalidSpec(format!(
                "order must be at least 2, got {}",
                self.order
            )));
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f0
    }
}

/// Lowpass prototype element values `g0 ..= g(n+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrototypeCoefficients(Vec<f64>);

impl PrototypeCoefficients {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.len() < 3 {
            return Err(Error::InvalidSpec(format!(
                "prototype needs at least g0, g1, g2; got {} values",
                g.len()
            )));
        }
        if let Some(bad) = g.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidSpec(format!(
                "prototype value {bad} is not positive"
            )));
        }
        Ok(Self(g))
    }

    pub fn order(&self) -> usize {
        self.0.len() - 2
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn g(&self, i: usize) -> f64 {
        self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreDesign {
    /// Inverter (quarter-wave line) impedance.
    #[serde(rename = "zt_ohm")]
    pub zt: f64,
    #[serde(rename = "l_h")]
    pub l: f64,
    #[serde(rename = "c_f")]
    pub c: f64,
    /// Mode-splitting product `delta * k`.
    pub dk: f64,
    /// Normalized coupling coefficient.
    pub k: f64,
}

impl CoreDesign {
    pub fn resonance(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l * self.c).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledElements {
    #[serde(rename = "lm_h")]
    pub lm: f64,
    #[serde(rename = "l1_h")]
    pub l1: f64,
    #[serde(rename = "cm_f")]
    pub cm: f64,
    #[serde(rename = "c1_f")]
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PracticalElements {
    #[serde(rename = "ca_f")]
    pub ca: f64,
    #[serde(rename = "cb_f")]
    pub cb: f64,
    #[serde(rename = "ck_f")]
    pub ck: f64,
    #[serde(rename = "cj_f")]
    pub cj: f64,
    #[serde(rename = "cc_f")]
    pub cc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedDesign {
    pub spec: FilterSpec,
    pub g: PrototypeCoefficients,
    pub core: CoreDesign,
    pub coupled: CoupledElements,
    pub practical: PracticalElements,
}

/// Series combination of two capacitors.
pub fn series(a: f64, b: f64) -> f64 {
    a * b / (a + b)
}

/// Butterworth lowpass prototype: `g0 = g(n+1) = 1`, `gi = 2 sin((2i-1)pi/2n)`.
pub fn butterworth_g(order: usize) -> Result<PrototypeCoefficients> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    let n = order as f64;
    let mut g = Vec::with_capacity(order + 2);
    g.push(1.0);
    g.extend((1..=order).map(|i| 2.0 * ((2 * i - 1) as f64 * PI / (2.0 * n)).sin()));
    g.push(1.0);
    Ok(PrototypeCoefficients(g))
}

pub fn synth_core(spec: &FilterSpec, g: &PrototypeCoefficients) -> Result<CoreDesign> {
    spec.validate()?;
    if spec.order != SUPPORTED_ORDER {
        return Err(Error::UnsupportedOrder(spec.order));
    }
    if g.order() != SUPPORTED_ORDER {
        return Err(Error::UnsupportedOrder(g.order()));
    }
    let w0 = spec.omega0();
    let g12 = (g.g(1) * g.g(2)).sqrt();
    let zt = spec.z0 / (g.g(0) * g.g(3)).sqrt();
    let l = spec.z0 / (spec.delta * w0 * g12);
    let c = 1.0 / (w0 * w0 * l);
    let k = 1.0 / g12;
    Ok(CoreDesign {
        zt,
        l,
        c,
        dk: spec.delta * k,
        k,
    })
}

fn check_dk(dk: f64) -> Result<()> {
    if !(dk > 0.0) {
        return Err(Error::DegenerateCoupling(dk));
    }
    if dk >= 1.0 {
        return Err(Error::InfeasibleCoupling(dk));
    }
    Ok(())
}

pub fn split_coupled(core: &CoreDesign) -> Result<CoupledElements> {
    check_dk(core.dk)?;
    Ok(CoupledElements {
        lm: core.dk * core.l,
        l1: (1.0 - core.dk) * core.l,
        cm: core.dk * core.c,
        c1: (1.0 - core.dk) * core.c,
    })
}

/// Smallest series capacitor for which the practical network exists.
/// `C_C` must strictly exceed this value.
pub fn min_feasible_cc(core: &CoreDesign) -> f64 {
    (1.0 + core.dk) * core.c
}

pub fn practical_caps(core: &CoreDesign, cc: f64) -> Result<PracticalElements> {
    check_dk(core.dk)?;
    let arm = min_feasible_cc(core);
    if !(cc > arm) {
        return Err(Error::CcTooSmall { cc, min: arm });
    }
    let ck = arm * cc / (cc - arm);
    let cj = (1.0 - core.dk * core.dk) / core.dk * core.c;
    let (ca, cb) = tee_to_pi_caps(ck, cj)?;
    Ok(PracticalElements { ca, cb, ck, cj, cc })
}

/// Star-delta conversion of a capacitive pi `{ca, cb, ca}` (shunt, bridge,
/// shunt) into the tee `{ck, cj, ck}` (arm, shunt, arm).
pub fn pi_to_tee_caps(ca: f64, cb: f64) -> Result<(f64, f64)> {
    if !(ca > 0.0) {
        return Err(Error::DegenerateNetwork(format!(
            "pi shunt capacitance {ca} must be positive"
        )));
    }
    if !(cb > 0.0) {
        return Err(Error::DegenerateNetwork(
            "pi bridge capacitance is zero: shunt capacitors decouple and no tee exists".into(),
        ));
    }
    let ck = ca + 2.0 * cb;
    Ok((ck, ca * ck / cb))
}

/// Inverse of [`pi_to_tee_caps`].
pub fn tee_to_pi_caps(ck: f64, cj: f64) -> Result<(f64, f64)> {
    if !(ck > 0.0 && cj > 0.0) {
        return Err(Error::DegenerateNetwork(format!(
            "tee capacitances must be positive (ck={ck}, cj={cj})"
        )));
    }
    let den = 2.0 * ck + cj;
    Ok((ck * cj / den, ck * ck / den))
}

/// Runs the whole element-value chain for a spec.
pub fn synthesize(spec: &FilterSpec) -> Result<SynthesizedDesign> {
    spec.validate()?;
    if spec.order != SUPPORTED_ORDER {
        return Err(Error::UnsupportedOrder(spec.order));
    }
    let g = match spec.prototype_kind {
        PrototypeKind::Butterworth => butterworth_g(spec.order)?,
    };
    let core = synth_core(spec, &g)?;
    let coupled = split_coupled(&core)?;
    let practical = practical_caps(&core, spec.cc)?;
    Ok(SynthesizedDesign {
        spec: spec.clone(),
        g,
        core,
        coupled,
        practical,
    })
}
