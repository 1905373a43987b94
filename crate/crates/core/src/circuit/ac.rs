//! Nodal AC analysis of two-port netlists.
//!
//! For each port `j` an ideal source of open-circuit amplitude 2 sits behind
//! the port reference impedance while the other port is terminated in the
//! same impedance. With unit incident wave the reflected/transmitted waves
//! are `S_ij = V_i - delta_ij`.

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::netlist::{ElementKind, Netlist, NodeId, GROUND};
use super::response::{FrequencyResponse, SweepFlag};
use crate::error::{Error, Result};

pub type SMatrix = [[Complex64; 2]; 2];

/// `|sin(theta)|` below this means the line sits on a resonance pole.
pub const LINE_GUARD: f64 = 1e-9;

/// Relative frequency nudge applied when a sweep point lands on a line pole.
pub const LINE_NUDGE: f64 = 1e-6;

/// Sweeps never evaluate below this frequency.
pub const MIN_FREQUENCY: f64 = 1e3;

const J: Complex64 = Complex64::new(0.0, 1.0);

struct Stamper {
    y: DMatrix<Complex64>,
}

impl Stamper {
    fn add(&mut self, r: NodeId, c: NodeId, v: Complex64) {
        if r != GROUND && c != GROUND {
            self.y[(r - 1, c - 1)] += v;
        }
    }

    fn two_terminal(&mut self, a: NodeId, b: NodeId, y: Complex64) {
        self.add(a, a, y);
        self.add(b, b, y);
        self.add(a, b, -y);
        self.add(b, a, -y);
    }

    /// Mutual branch admittance: current into branch `p` per volt across `q`.
    fn branch_pair(&mut self, p: (NodeId, NodeId), q: (NodeId, NodeId), y: Complex64) {
        self.add(p.0, q.0, y);
        self.add(p.0, q.1, -y);
        self.add(p.1, q.0, -y);
        self.add(p.1, q.1, y);
    }
}

/// Nodal admittance matrix (ground row/column removed) including the port
/// terminations.
fn assemble(net: &Netlist, f: f64) -> Result<DMatrix<Complex64>> {
    let w = 2.0 * PI * f;
    let n = net.node_count() - 1;
    let mut st = Stamper {
        y: DMatrix::zeros(n, n),
    };
    for e in net.elements() {
        match e.kind {
            ElementKind::Resistor { a, b, r } => st.two_terminal(a, b, Complex64::from(1.0 / r)),
            ElementKind::Capacitor { a, b, c } => st.two_terminal(a, b, J * w * c),
            ElementKind::Inductor { a, b, l } => st.two_terminal(a, b, 1.0 / (J * w * l)),
            ElementKind::CoupledInductors { a, b, la, lb, m } => {
                // i = (1/jw) L^-1 v on the two branches
                let det = la * lb - m * m;
                let k = 1.0 / (J * w * det);
                st.branch_pair(a, a, k * lb);
                st.branch_pair(b, b, k * la);
                st.branch_pair(a, b, -k * m);
                st.branch_pair(b, a, -k * m);
            }
            ElementKind::TransmissionLine {
                a,
                b,
                z,
                theta_ref,
                f_ref,
            } => {
                let theta = theta_ref * f / f_ref;
                let s = theta.sin();
                if s.abs() < LINE_GUARD {
                    return Err(Error::LineResonance {
                        element: e.name.clone(),
                        freq: f,
                    });
                }
                let y11 = -J * (theta.cos() / s) / z;
                let y12 = J / (z * s);
                st.add(a, a, y11);
                st.add(b, b, y11);
                st.add(a, b, y12);
                st.add(b, a, y12);
            }
        }
    }
    for p in net.ports() {
        st.add(p.node, p.node, Complex64::from(1.0 / p.z_ref));
    }
    Ok(st.y)
}

/// Two-port S-matrix of `net` at frequency `f` (Hz).
pub fn ac_solve(net: &Netlist, f: f64) -> Result<SMatrix> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "frequency must be positive, got {f}"
        )));
    }
    let y = assemble(net, f)?;
    let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let n = y.nrows();
    let lu = y.lu();
    let u = lu.u();
    if let Some(k) = (0..u.nrows()).find(|&k| u[(k, k)].norm() <= 1e-14 * scale) {
        return Err(Error::SingularSystem {
            node: net.node_name(k + 1).to_owned(),
            freq: f,
        });
    }
    let ports = net.ports();
    let mut rhs = DMatrix::<Complex64>::zeros(n, 2);
    for (j, p) in ports.iter().enumerate() {
        rhs[(p.node - 1, j)] = Complex64::from(2.0 / p.z_ref);
    }
    let v = lu.solve(&rhs).ok_or_else(|| Error::SingularSystem {
        node: net.node_name(1).to_owned(),
        freq: f,
    })?;
    let s = |i: usize, j: usize| {
        let delta = if i == j { 1.0 } else { 0.0 };
        v[(ports[i].node - 1, j)] - delta
    };
    Ok([[s(0, 0), s(0, 1)], [s(1, 0), s(1, 1)]])
}

/// Evaluates `net` over an ascending grid. Points on a line pole are
/// nudged up by `LINE_NUDGE` relative and flagged; points below
/// `MIN_FREQUENCY` are evaluated at `MIN_FREQUENCY` and flagged.
pub fn sweep(net: &Netlist, grid: &[f64]) -> Result<FrequencyResponse> {
    super::response::check_grid(grid)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut flags = Vec::new();
    for (i, &f) in grid.iter().enumerate() {
        let mut fe = f;
        if fe < MIN_FREQUENCY {
            warn!("sweep point {f} Hz clamped to {MIN_FREQUENCY} Hz");
            flags.push((i, SweepFlag::Clamped));
            fe = MIN_FREQUENCY;
        }
        let s = match ac_solve(net, fe) {
            Err(Error::LineResonance { .. }) => {
                flags.push((i, SweepFlag::Nudged));
                ac_solve(net, fe * (1.0 + LINE_NUDGE))?
            }
            other => other?,
        };
        points.push(s);
    }
    let mut resp = FrequencyResponse::from_matrices(grid.to_vec(), &points, net.z_ref())?;
    resp.flags = flags;
    Ok(resp)
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::netlist::NetlistBuilder;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn series_resistor() {
        let mut b = NetlistBuilder::new();
        b.resistor("R", "P1", "P2", 50.0)
            .port("P1", 50.0)
            .port("P2", 50.0);
        let s = ac_solve(&b.build().unwrap(), 1e9).unwrap();
        assert!(close(s[0][0], Complex64::from(1.0 / 3.0), 1e-15));
        assert!(close(s[1][0], Complex64::from(2.0 / 3.0), 1e-15));
        assert!(close(s[0][1], Complex64::from(2.0 / 3.0), 1e-15));
    }

    #[test]
    fn matched_quarter_wave_line() {
        let mut b = NetlistBuilder::new();
        b.line("T", "P1", "P2", 50.0, PI / 2.0, 1e9)
            .port("P1", 50.0)
            .port("P2", 50.0);
        let s = ac_solve(&b.build().unwrap(), 1e9).unwrap();
        assert!(s[0][0].norm() < 1e-14);
        assert!(close(s[1][0], -J, 1e-14));
    }

    #[test]
    fn line_pole_is_guarded_and_sweep_nudges() {
        let mut b = NetlistBuilder::new();
        b.line("T", "P1", "P2", 50.0, PI / 2.0, 1e9)
            .port("P1", 50.0)
            .port("P2", 50.0);
        let net = b.build().unwrap();
        assert!(matches!(
            ac_solve(&net, 2e9),
            Err(Error::LineResonance { .. })
        ));
        let r = sweep(&net, &[1.9e9, 2e9, 2.1e9]).unwrap();
        assert_eq!(r.flags, vec![(1, SweepFlag::Nudged)]);
        assert!((r.s21[1].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn low_frequencies_are_clamped() {
        let mut b = NetlistBuilder::new();
        b.inductor("L", "P1", "P2", 1e-9)
            .port("P1", 50.0)
            .port("P2", 50.0);
        let r = sweep(&b.build().unwrap(), &[10.0, 2e3]).unwrap();
        assert_eq!(r.flags, vec![(0, SweepFlag::Clamped)]);
    }

    #[test]
    fn shunt_series_lc_notch() {
        let (l, c): (f64, f64) = (37.66e-9, 0.9763e-12);
        let f = 1.0 / (2.0 * PI * (l * c).sqrt());
        let mut b = NetlistBuilder::new();
        b.line("T", "P1", "P2", 50.0, 0.01, f)
            .capacitor("C", "P1", "Y", c)
            .inductor("L", "Y", "0", l)
            .port("P1", 50.0)
            .port("P2", 50.0);
        let s = ac_solve(&b.build().unwrap(), f).unwrap();
        assert!(s[1][0].norm() < 1e-6);
    }

    #[test]
    fn singular_system_names_a_node() {
        // Node `M` touches only a parallel LC tank, which is an open at resonance.
        let (l, c): (f64, f64) = (10e-9, 1e-12);
        let f = 1.0 / (2.0 * PI * (l * c).sqrt());
        let mut b = NetlistBuilder::new();
        b.resistor("R", "P1", "P2", 50.0)
            .inductor("L", "M", "M2", l)
            .capacitor("C", "M2", "M", c)
            .capacitor("Cg", "M2", "0", 1e-12);
        b.port("P1", 50.0).port("P2", 50.0);
        let net = b.build().unwrap();
        assert!(ac_solve(&net, 0.9 * f).is_ok());
        match ac_solve(&net, f) {
            Err(Error::SingularSystem { node, .. }) => {
                assert!(node == "M" || node == "M2", "{node}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(1.0, 2.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[10], 2.0);
        assert!((g[5] - 1.5).abs() < 1e-15);
    }
}
