mod common;

use std::f64::consts::PI;

use bandstop::circuit::{ac_solve, linspace, sweep, NetlistBuilder, SweepFlag, MIN_FREQUENCY};
use bandstop::synthesis::{synthesize, FilterSpec};
use bandstop::topology::{build, equivalents, LossModel, TopologyId};
use bandstop::Error;
use common::*;

fn one() -> C {
    C::new(1.0, 0.0)
}

#[test]
fn lossy_series_rlc_matches_cascade() {
    let (r, l, c, z0) = (7.5, 12e-9, 2.7e-12, 50.0);
    let mut b = NetlistBuilder::new();
    b.resistor("R", "P1", "N1", r)
        .inductor("L", "N1", "N2", l)
        .capacitor("C", "N2", "P2", c)
        .port("P1", z0)
        .port("P2", z0);
    let resp = sweep(&b.build().unwrap(), &linspace(1e8, 3e9, 400)).unwrap();
    let dev = max_deviation(&resp, |f| {
        abcd_to_s(
            &series_z(C::new(r, 0.0) + jw(f) * l + one() / (jw(f) * c)),
            z0,
        )
    });
    assert!(dev < 1e-10, "{dev}");
    assert!(reciprocity_error(&resp) < 1e-12);
}

#[test]
fn lossy_notch_matches_cascade() {
    let d = synthesize(&FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12)).unwrap();
    let q = 60.0;
    let w0 = 2.0 * PI * d.spec.f0;
    let rl = w0 * d.core.l / q;
    let mut b = NetlistBuilder::new();
    b.line("TL", "A", "B", d.core.zt, PI / 2.0, d.spec.f0)
        .capacitor("C1", "A", "Y1", d.core.c)
        .lossy_inductor("L1", "Y1", "0", d.core.l, rl)
        .capacitor("C2", "B", "Y2", d.core.c)
        .lossy_inductor("L2", "Y2", "0", d.core.l, rl)
        .port("A", 50.0)
        .port("B", 50.0);
    let resp = sweep(&b.build().unwrap(), &linspace(0.3e9, 1.5e9, 601)).unwrap();
    let dev = max_deviation(&resp, |f| {
        let zb = C::new(rl, 0.0) + jw(f) * d.core.l + one() / (jw(f) * d.core.c);
        let br = shunt_y(one() / zb);
        abcd_to_s(
            &chain(&[br, line(d.core.zt, PI / 2.0 * f / d.spec.f0), br]),
            50.0,
        )
    });
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn cascaded_lines_and_shunts() {
    let z0 = 50.0;
    let f_ref = 1e9;
    let mut b = NetlistBuilder::new();
    b.line("T1", "P1", "N", 70.0, 0.3, f_ref)
        .capacitor("Cs", "N", "0", 0.8e-12)
        .resistor("Rs", "N", "0", 400.0)
        .line("T2", "N", "P2", 30.0, 1.1, f_ref)
        .port("P1", z0)
        .port("P2", z0);
    let resp = sweep(&b.build().unwrap(), &linspace(0.05e9, 2.5e9, 500)).unwrap();
    let dev = max_deviation(&resp, |f| {
        let s = f / f_ref;
        abcd_to_s(
            &chain(&[
                line(70.0, 0.3 * s),
                shunt_y(jw(f) * 0.8e-12 + C::new(1.0 / 400.0, 0.0)),
                line(30.0, 1.1 * s),
            ]),
            z0,
        )
    });
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn impedance_scaling_leaves_s_unchanged() {
    let net = |k: f64| {
        let mut b = NetlistBuilder::new();
        b.resistor("R", "P1", "N", 20.0 * k)
            .inductor("L", "N", "0", 15e-9 * k)
            .capacitor("C", "N", "P2", 1.2e-12 / k)
            .line("T", "P2", "Q", 60.0 * k, 0.7, 1e9)
            .capacitor("Cq", "Q", "0", 0.5e-12 / k)
            .port("P1", 50.0 * k)
            .port("P2", 50.0 * k);
        b.build().unwrap()
    };
    let grid = linspace(0.2e9, 2e9, 181);
    let a = sweep(&net(1.0), &grid).unwrap();
    let b = sweep(&net(3.7), &grid).unwrap();
    assert!(a.equivalent(&b, 1e-11).unwrap().equivalent);
}

#[test]
fn symmetric_networks_have_equal_port_reflections() {
    let d = synthesize(&FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12)).unwrap();
    let grid = linspace(0.3e9, 1.4e9, 301);
    for id in TopologyId::ALL {
        let r = sweep(
            &build(&d, id, &LossModel::with_varactor_rs(1.0)).unwrap(),
            &grid,
        )
        .unwrap();
        let worst = r
            .s11
            .iter()
            .zip(&r.s22)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{id}: {worst}");
        assert!(reciprocity_error(&r) < 1e-12, "{id}");
    }
}

#[test]
fn lossy_networks_are_passive() {
    let d = synthesize(&FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12)).unwrap();
    let loss = LossModel {
        inductor_q: Some(40.0),
        ..LossModel::with_varactor_rs(2.0)
    };
    let r = sweep(
        &build(&d, TopologyId::PracticalV2, &loss).unwrap(),
        &linspace(0.3e9, 1.4e9, 301),
    )
    .unwrap();
    for k in 0..r.len() {
        let p = r.s11[k].norm_sqr() + r.s21[k].norm_sqr();
        assert!(p < 1.0 + 1e-12, "{}", r.freqs[k]);
    }
}

#[test]
fn coupled_inductors_match_tee_in_a_larger_circuit() {
    let mut a = NetlistBuilder::new();
    a.capacitor("C1", "P1", "X1", 1e-12)
        .capacitor("C2", "P2", "X2", 1e-12)
        .coupled_inductors("K", ("X1", "0"), ("X2", "0"), 30e-9, 22e-9, 9e-9)
        .port("P1", 50.0)
        .port("P2", 50.0);
    let mut b = NetlistBuilder::new();
    b.capacitor("C1", "P1", "X1", 1e-12)
        .capacitor("C2", "P2", "X2", 1e-12)
        .inductor("La", "X1", "N", 21e-9)
        .inductor("Lb", "X2", "N", 13e-9)
        .inductor("Lm", "N", "0", 9e-9)
        .port("P1", 50.0)
        .port("P2", 50.0);
    let grid = linspace(0.1e9, 2e9, 401);
    let ra = sweep(&a.build().unwrap(), &grid).unwrap();
    let rb = sweep(&b.build().unwrap(), &grid).unwrap();
    let rep = ra.equivalent(&rb, 1e-10).unwrap();
    assert!(rep.equivalent, "{rep:?}");
}

#[test]
fn negative_mutual_inductance_is_a_valid_coupling() {
    let grid = linspace(0.1e9, 2e9, 101);
    let a = sweep(
        &equivalents::coupled_pair(10e-9, 10e-9, -4e-9, 50.0).unwrap(),
        &grid,
    )
    .unwrap();
    let b = sweep(
        &equivalents::inductor_tee(10e-9, 10e-9, 4e-9, 50.0).unwrap(),
        &grid,
    )
    .unwrap();
    // flipping the sign of M flips the sign of the transfer term only
    for k in 0..grid.len() {
        assert!((a.s21[k] + b.s21[k]).norm() < 1e-10);
        assert!((a.s11[k] - b.s11[k]).norm() < 1e-10);
    }
}

#[test]
fn over_coupled_inductors_are_rejected() {
    let r = equivalents::coupled_pair(10e-9, 10e-9, 10e-9, 50.0);
    assert!(matches!(r, Err(Error::InvalidNetlist(_))));
}

#[test]
fn floating_nodes_are_named() {
    let mut b = NetlistBuilder::new();
    b.resistor("R", "P1", "P2", 10.0)
        .capacitor("Ca", "U", "V", 1e-12)
        .port("P1", 50.0)
        .port("P2", 50.0);
    match b.build() {
        Err(Error::FloatingNode(n)) => assert!(n == "U" || n == "V"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn ports_must_be_distinct() {
    let mut b = NetlistBuilder::new();
    b.resistor("R", "P1", "0", 10.0)
        .port("P1", 50.0)
        .port("P1", 50.0);
    assert!(matches!(b.build(), Err(Error::InvalidNetlist(_))));
}

#[test]
fn half_wave_pole_is_flagged_not_fatal() {
    let mut b = NetlistBuilder::new();
    b.line("T", "P1", "P2", 50.0, PI / 2.0, 1e9)
        .port("P1", 50.0)
        .port("P2", 50.0);
    let net = b.build().unwrap();
    let r = sweep(&net, &[1.5e9, 2e9, 2.5e9]).unwrap();
    assert_eq!(r.flags, vec![(1, SweepFlag::Nudged)]);
    // a matched line stays matched through the nudge
    assert!(r.s11[1].norm() < 1e-9);
    assert!((r.s21[1].norm() - 1.0).abs() < 1e-9);
}

#[test]
fn sub_kilohertz_points_are_clamped() {
    let net = equivalents::cap_pi(1e-12, 1e-12, 50.0).unwrap();
    let r = sweep(&net, &[10.0, 2e3]).unwrap();
    assert!(r.flags.contains(&(0, SweepFlag::Clamped)));
    let at_min = ac_solve(&net, MIN_FREQUENCY).unwrap();
    assert!((r.s21[0] - at_min[1][0]).norm() < 1e-15);
}

#[test]
fn invalid_grids_are_rejected() {
    let net = equivalents::cap_pi(1e-12, 1e-12, 50.0).unwrap();
    assert!(matches!(sweep(&net, &[]), Err(Error::InvalidGrid(_))));
    assert!(matches!(
        sweep(&net, &[2e9, 1e9]),
        Err(Error::InvalidGrid(_))
    ));
    assert!(matches!(
        sweep(&net, &[1e9, f64::NAN]),
        Err(Error::InvalidGrid(_))
    ));
}
