//! Netlist builders for the notch, dual-mode and practical filter circuits.
//!
//! Node names shared by all builders: `A`/`B` are the ports at the two ends
//! of the quarter-wave inverter, `X` is the common node of the resonator
//! branches (grounded through `L_M`), `Y1`/`Y2` and `M1`/`M2` are internal
//! branch nodes.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{linspace, sweep, Netlist, NetlistBuilder};
use crate::error::{Error, Result};
use crate::metrics::analyze;
use crate::synthesis::{CoreDesign, CoupledElements, SynthesizedDesign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopologyId {
    #[serde(rename = "notch_fig1a")]
    Notch,
    #[serde(rename = "dualmode_fig1b")]
    Dualmode,
    #[serde(rename = "practical_fig2_v1")]
    PracticalV1,
    #[serde(rename = "practical_fig2_v2")]
    PracticalV2,
    #[serde(rename = "practical_fig2_v3")]
    PracticalV3,
}

pub const PRACTICAL_VARIANTS: [TopologyId; 3] = [
    TopologyId::PracticalV1,
    TopologyId::PracticalV2,
    TopologyId::PracticalV3,
];

impl TopologyId {
    pub const ALL: [TopologyId; 5] = [
        TopologyId::Notch,
        TopologyId::Dualmode,
        TopologyId::PracticalV1,
        TopologyId::PracticalV2,
        TopologyId::PracticalV3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyId::Notch => "notch_fig1a",
            TopologyId::Dualmode => "dualmode_fig1b",
            TopologyId::PracticalV1 => "practical_fig2_v1",
            TopologyId::PracticalV2 => "practical_fig2_v2",
            TopologyId::PracticalV3 => "practical_fig2_v3",
        }
    }

    pub fn is_practical(self) -> bool {
        PRACTICAL_VARIANTS.contains(&self)
    }
}

impl fmt::Display for TopologyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let short = match s {
            "notch" => Some(TopologyId::Notch),
            "dualmode" => Some(TopologyId::Dualmode),
            "v1" => Some(TopologyId::PracticalV1),
            "v2" => Some(TopologyId::PracticalV2),
            "v3" => Some(TopologyId::PracticalV3),
            _ => None,
        };
        short
            .or_else(|| Self::ALL.into_iter().find(|t| t.as_str() == s))
            .ok_or_else(|| Error::UnknownVariant(s.to_owned()))
    }
}

/// Bias decoration: a feed resistor from every varactor node to ground and
/// a DC block in series with each port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasNetwork {
    pub feed_ohm: f64,
    pub dc_block_f: f64,
}

impl Default for BiasNetwork {
    fn default() -> Self {
        Self {
            feed_ohm: 10e3,
            dc_block_f: 100e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossModel {
    /// Series resistance of one varactor (ohm).
    #[serde(rename = "varactor_rs_ohm")]
    pub varactor_rs: f64,
    /// Inductor quality factor at f0; loss is `w0 L / Q` in series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inductor_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<BiasNetwork>,
}

impl LossModel {
    pub fn lossless() -> Self {
        Self::default()
    }

    pub fn with_varactor_rs(rs: f64) -> Self {
        Self {
            varactor_rs: rs,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.varactor_rs.is_finite() && self.varactor_rs >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "varactor Rs must be >= 0, got {}",
                self.varactor_rs
            )));
        }
        if let Some(q) = self.inductor_q {
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "inductor Q must be > 0, got {q}"
                )));
            }
        }
        if let Some(b) = self.bias {
            if !(b.feed_ohm > 0.0 && b.dc_block_f > 0.0) {
                return Err(Error::InvalidArgument(
                    "bias network values must be > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Uncoupled notch: quarter-wave line with a series-LC shunt branch at each end.
pub fn build_notch(core: &CoreDesign, f_ref: f64) -> Result<Netlist> {
    let mut b = NetlistBuilder::new();
    b.line("TL", "A", "B", core.zt, FRAC_PI_2, f_ref)
        .capacitor("C1", "A", "Y1", core.c)
        .inductor("L1", "Y1", "0", core.l)
        .capacitor("C2", "B", "Y2", core.c)
        .inductor("L2", "Y2", "0", core.l)
        .port("A", core.zt)
        .port("B", core.zt);
    b.build()
}

/// Dual-mode circuit: branches `A-L1-Y1-C1-X` and `B-L1-Y2-C1-X`, `L_M` from `X` to
/// ground and `C_M` across `Y1-Y2`, so that `{C1, C_M, C1}` is a pi on
/// `(Y1, Y2, X)`.
pub fn build_dualmode(coupled: &CoupledElements, core: &CoreDesign, f_ref: f64) -> Result<Netlist> {
    let mut b = NetlistBuilder::new();
    b.line("TL", "A", "B", core.zt, FRAC_PI_2, f_ref)
        .inductor("L1a", "A", "Y1", coupled.l1)
        .capacitor("C1a", "Y1", "X", coupled.c1)
        .inductor("L1b", "B", "Y2", coupled.l1)
        .capacitor("C1b", "Y2", "X", coupled.c1)
        .inductor("LM", "X", "0", coupled.lm)
        .capacitor("CM", "Y1", "Y2", coupled.cm)
        .port("A", core.zt)
        .port("B", core.zt);
    b.build()
}

/// Element values of a practical circuit, independent of how they were
/// obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PracticalValues {
    #[serde(rename = "l1_h")]
    pub l1: f64,
    #[serde(rename = "lm_h")]
    pub lm: f64,
    #[serde(rename = "ca_f")]
    pub ca: f64,
    #[serde(rename = "cb_f")]
    pub cb: f64,
    #[serde(rename = "cc_f")]
    pub cc: f64,
    #[serde(rename = "zt_ohm")]
    pub zt: f64,
    /// Frequency at which the line is a quarter wave and inductor Q is quoted.
    #[serde(rename = "f0_hz")]
    pub f0: f64,
}

impl PracticalValues {
    pub fn from_design(design: &SynthesizedDesign) -> Self {
        Self {
            l1: design.coupled.l1,
            lm: design.coupled.lm,
            ca: design.practical.ca,
            cb: design.practical.cb,
            cc: design.practical.cc,
            zt: design.core.zt,
            f0: design.spec.f0,
        }
    }

    pub fn with_caps(self, ca: f64, cb: f64) -> Self {
        Self { ca, cb, ..self }
    }
}

/// Practical circuit at the synthesized `C_a`, `C_b`.
pub fn build_practical(
    design: &SynthesizedDesign,
    variant: TopologyId,
    loss: &LossModel,
) -> Result<Netlist> {
    build_practical_values(&PracticalValues::from_design(design), variant, loss)
}

pub fn build_practical_at(
    design: &SynthesizedDesign,
    variant: TopologyId,
    ca: f64,
    cb: f64,
    loss: &LossModel,
) -> Result<Netlist> {
    build_practical_values(
        &PracticalValues::from_design(design).with_caps(ca, cb),
        variant,
        loss,
    )
}

/// Practical circuit with `C_C` at the main-line end of each branch:
///
/// * v1: `A-CC-Y1-L1-M1-Ca-X`, `C_b` across `A-B`
/// * v2: as v1, `C_b` across `M1-M2`
/// * v3: `A-CC-Y1-L1-X`, `C_a` from `Y1` to ground, `C_b` across `Y1-Y2`
///
/// `C_a` sites carry `Rs`; `C_b` sites are anti-series pairs and carry `2 Rs`.
pub fn build_practical_values(
    v: &PracticalValues,
    variant: TopologyId,
    loss: &LossModel,
) -> Result<Netlist> {
    loss.validate()?;
    let rs = loss.varactor_rs;
    let w0 = 2.0 * std::f64::consts::PI * v.f0;
    let mut b = NetlistBuilder::new();
    let (pa, pb) = match loss.bias {
        Some(bias) => {
            b.capacitor("CBLK1", "P1", "A", bias.dc_block_f).capacitor(
                "CBLK2",
                "P2",
                "B",
                bias.dc_block_f,
            );
            ("P1", "P2")
        }
        None => ("A", "B"),
    };
    let ind = |b: &mut NetlistBuilder, name: &str, x: &str, y: &str, l: f64| match loss.inductor_q {
        Some(q) => {
            b.lossy_inductor(name, x, y, l, w0 * l / q);
        }
        None => {
            b.inductor(name, x, y, l);
        }
    };
    let cap = |b: &mut NetlistBuilder, name: &str, x: &str, y: &str, c: f64, r: f64| {
        if r > 0.0 {
            b.lossy_capacitor(name, x, y, c, r);
        } else {
            b.capacitor(name, x, y, c);
        }
    };

    b.line("TL", "A", "B", v.zt, FRAC_PI_2, v.f0)
        .capacitor("CC1", "A", "Y1", v.cc)
        .capacitor("CC2", "B", "Y2", v.cc);
    ind(&mut b, "LM", "X", "0", v.lm);
    let varactor_nodes: &[&str] = match variant {
        TopologyId::PracticalV1 | TopologyId::PracticalV2 => {
            ind(&mut b, "L1a", "Y1", "M1", v.l1);
            ind(&mut b, "L1b", "Y2", "M2", v.l1);
            cap(&mut b, "Ca1", "M1", "X", v.ca, rs);
            cap(&mut b, "Ca2", "M2", "X", v.ca, rs);
            if variant == TopologyId::PracticalV1 {
                cap(&mut b, "Cb", "A", "B", v.cb, 2.0 * rs);
            } else {
                cap(&mut b, "Cb", "M1", "M2", v.cb, 2.0 * rs);
            }
            &["M1", "M2"]
        }
        TopologyId::PracticalV3 => {
            ind(&mut b, "L1a", "Y1", "X", v.l1);
            ind(&mut b, "L1b", "Y2", "X", v.l1);
            cap(&mut b, "Ca1", "Y1", "0", v.ca, rs);
            cap(&mut b, "Ca2", "Y2", "0", v.ca, rs);
            cap(&mut b, "Cb", "Y1", "Y2", v.cb, 2.0 * rs);
            &["Y1", "Y2"]
        }
        other => return Err(Error::UnknownVariant(other.to_string())),
    };
    if let Some(bias) = loss.bias {
        for (k, node) in varactor_nodes.iter().enumerate() {
            b.resistor(&format!("RBIAS{}", k + 1), node, "0", bias.feed_ohm);
        }
    }
    b.port(pa, v.zt).port(pb, v.zt);
    b.build()
}

/// Builds any topology from a synthesized design.
pub fn build(design: &SynthesizedDesign, id: TopologyId, loss: &LossModel) -> Result<Netlist> {
    match id {
        TopologyId::Notch => build_notch(&design.core, design.spec.f0),
        TopologyId::Dualmode => build_dualmode(&design.coupled, &design.core, design.spec.f0),
        _ => build_practical(design, id, loss),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateReport {
    pub topology: TopologyId,
    /// At least two deep transmission zeros inside one stopband.
    pub split: bool,
    pub f_notch_hz: Option<f64>,
    pub fbw: Option<f64>,
    pub freq_error: Option<f64>,
    pub fbw_error: Option<f64>,
    /// `freq_error + fbw_error`; `None` when the candidate is not viable.
    pub score: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub winner: TopologyId,
    pub candidates: Vec<CandidateReport>,
}

/// Simulates every candidate at the synthesized values and keeps the viable
/// one closest to the design targets.
pub fn select_topology(design: &SynthesizedDesign, candidates: &[TopologyId]) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate topologies".into()));
    }
    let f0 = design.spec.f0;
    let grid = linspace(0.4 * f0, 1.6 * f0, 1201);
    let mut reports = Vec::with_capacity(candidates.len());
    for &id in candidates {
        let mut r = CandidateReport {
            topology: id,
            split: false,
            f_notch_hz: None,
            fbw: None,
            freq_error: None,
            fbw_error: None,
            score: None,
            failure: None,
        };
        let metrics = build(design, id, &LossModel::lossless())
            .and_then(|net| sweep(&net, &grid))
            .and_then(|resp| analyze(&resp));
        match metrics {
            Ok(m) => {
                let inside = m
                    .modes_hz
                    .iter()
                    .filter(|&&f| f > m.f_lo_hz && f < m.f_hi_hz)
                    .count();
                r.split = inside >= 2 && inside == m.modes_hz.len();
                r.f_notch_hz = Some(m.f_notch_hz);
                r.fbw = Some(m.fbw);
                let fe = (m.f_notch_hz - f0).abs() / f0;
                let be = (m.fbw - design.spec.delta).abs();
                r.freq_error = Some(fe);
                r.fbw_error = Some(be);
                if r.split {
                    r.score = Some(fe + be);
                } else {
                    r.failure = Some(format!(
                        "{} deep minima, {inside} inside the stopband",
                        m.modes_hz.len()
                    ));
                }
            }
            Err(e) => r.failure = Some(e.to_string()),
        }
        reports.push(r);
    }
    let winner = reports
        .iter()
        .filter_map(|r| r.score.map(|s| (s, r.topology)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, id)| id)
        .ok_or_else(|| {
            Error::NoViableTopology(
                reports
                    .iter()
                    .map(|r| format!("{}: {}", r.topology, r.failure.as_deref().unwrap_or("?")))
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
    Ok(Selection {
        winner,
        candidates: reports,
    })
}

/// Small two-ports used to check the network identities behind the
/// practical transformation. Ports are `P1`/`P2`, ground is the third
/// terminal.
pub mod equivalents {
    use super::*;

    /// Shunt `shunt` at each port, `bridge` between the ports.
    pub fn cap_pi(shunt: f64, bridge: f64, z_ref: f64) -> Result<Netlist> {
        let mut b = NetlistBuilder::new();
        b.capacitor("Cs1", "P1", "0", shunt)
            .capacitor("Cs2", "P2", "0", shunt)
            .capacitor("Cb", "P1", "P2", bridge)
            .port("P1", z_ref)
            .port("P2", z_ref);
        b.build()
    }

    /// Series `arm` from each port to a centre node, `shunt` to ground.
    pub fn cap_tee(arm: f64, shunt: f64, z_ref: f64) -> Result<Netlist> {
        let mut b = NetlistBuilder::new();
        b.capacitor("Ck1", "P1", "N", arm)
            .capacitor("Ck2", "P2", "N", arm)
            .capacitor("Cj", "N", "0", shunt)
            .port("P1", z_ref)
            .port("P2", z_ref);
        b.build()
    }

    /// `cc` in series with each arm of the tee `{ck, cj, ck}`.
    pub fn cap_split_tee(cc: f64, ck: f64, cj: f64, z_ref: f64) -> Result<Netlist> {
        let mut b = NetlistBuilder::new();
        b.capacitor("CC1", "P1", "Q1", cc)
            .capacitor("CC2", "P2", "Q2", cc)
            .capacitor("Ck1", "Q1", "N", ck)
            .capacitor("Ck2", "Q2", "N", ck)
            .capacitor("Cj", "N", "0", cj)
            .port("P1", z_ref)
            .port("P2", z_ref);
        b.build()
    }

    /// `cc` in series with each port of the pi `{ca, cb, ca}`.
    pub fn cap_split_pi(cc: f64, ca: f64, cb: f64, z_ref: f64) -> Result<Netlist> {
        let mut b = NetlistBuilder::new();
        b.capacitor("CC1", "P1", "Q1", cc)
            .capacitor("CC2", "P2", "Q2", cc)
            .capacitor("Ca1", "Q1", "0", ca)
            .capacitor("Ca2", "Q2", "0", ca)
            .capacitor("Cb", "Q1", "Q2", cb)
            .port("P1", z_ref)
            .port("P2", z_ref);
        b.build()
    }

    /// Magnetically coupled coils from each port to ground.
    pub fn coupled_pair(la: f64, lb: f64, m: f64, z_ref: f64) -> Result<Netlist> {
        let mut b = NetlistBuilder::new();
        b.coupled_inductors("K", ("P1", "0"), ("P2", "0"), la, lb, m)
            .port("P1", z_ref)
            .port("P2", z_ref);
        b.build()
    }

    /// Inductive tee `{la - m, m, lb - m}`.
    pub fn inductor_tee(la: f64, lb: f64, m: f64, z_ref: f64) -> Result<Netlist> {
        let mut b = NetlistBuilder::new();
        b.inductor("La", "P1", "N", la - m)
            .inductor("Lb", "P2", "N", lb - m)
            .inductor("Lm", "N", "0", m)
            .port("P1", z_ref)
            .port("P2", z_ref);
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{synthesize, FilterSpec};

    fn design() -> SynthesizedDesign {
        synthesize(&FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12)).unwrap()
    }

    #[test]
    fn ids_round_trip_through_strings() {
        for id in TopologyId::ALL {
            assert_eq!(id.as_str().parse::<TopologyId>().unwrap(), id);
        }
        assert!(matches!(
            "fig9".parse::<TopologyId>(),
            Err(Error::UnknownVariant(_))
        ));
    }

    #[test]
    fn practical_builder_rejects_other_ids() {
        let d = design();
        let r = build_practical(&d, TopologyId::Notch, &LossModel::lossless());
        assert!(matches!(r, Err(Error::UnknownVariant(_))));
    }

    #[test]
    fn lossy_sites_get_internal_nodes() {
        let d = design();
        let net = build_practical(
            &d,
            TopologyId::PracticalV2,
            &LossModel::with_varactor_rs(1.0),
        )
        .unwrap();
        match net.element("Cb.R").unwrap().kind {
            crate::circuit::ElementKind::Resistor { r, .. } => assert_eq!(r, 2.0),
            ref k => panic!("{k:?}"),
        }
        assert!(net.element("Ca1.R").is_some());
        assert!(!net.is_lossless());
    }

    #[test]
    fn bias_decoration_moves_ports() {
        let d = design();
        let loss = LossModel {
            bias: Some(BiasNetwork::default()),
            ..LossModel::default()
        };
        let net = build_practical(&d, TopologyId::PracticalV1, &loss).unwrap();
        assert_eq!(net.node_name(net.ports()[0].node), "P1");
        assert!(net.element("RBIAS2").is_some());
    }

    #[test]
    fn empty_candidate_list_is_rejected() {
        assert!(matches!(
            select_topology(&design(), &[]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
