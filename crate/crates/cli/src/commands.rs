use std::io::Write;
use std::process::ExitCode;

use bandstop::circuit::{linspace, sweep, Netlist};
use bandstop::io::design::{DesignFile, OperatingPoint};
use bandstop::io::{curve_csv, quantity, touchstone};
use bandstop::metrics::{analyze_with, AnalysisOptions, StopbandMetrics};
use bandstop::synthesis::{FilterSpec, SynthesizedDesign};
use bandstop::topology::{self, BiasNetwork, LossModel, TopologyId, PRACTICAL_VARIANTS};
use bandstop::tuning::{CalibrationTarget, CapBounds, CbRule, Tuner, REFERENCE_BIAS_CASES};
use bandstop::varactor::{BiasPoint, VaractorModel};
use bandstop::{Error, Result};

use crate::{CalibrateArgs, CbRuleArg, LossArgs, MetricsArgs, SimulateArgs, SynthArgs, TuneArgs};

fn nh(v: f64) -> String {
    quantity::format(v, "H", 5)
}

fn pf(v: f64) -> String {
    quantity::format(v, "F", 5)
}

fn print_design(d: &SynthesizedDesign) {
    let rows: [(&str, String); 14] = [
        ("f0", quantity::format(d.spec.f0, "Hz", 5)),
        ("FBW", format!("{}", d.spec.delta)),
        ("g", format!("{:?}", d.g.values())),
        ("Z_T", quantity::format(d.core.zt, "Ohm", 5)),
        ("L", nh(d.core.l)),
        ("C", pf(d.core.c)),
        ("delta*k", format!("{:.5}", d.core.dk)),
        ("L_M", nh(d.coupled.lm)),
        ("L_1", nh(d.coupled.l1)),
        ("C_M", pf(d.coupled.cm)),
        ("C_1", pf(d.coupled.c1)),
        ("C_C", pf(d.practical.cc)),
        ("C_a", pf(d.practical.ca)),
        ("C_b", pf(d.practical.cb)),
    ];
    for (k, v) in rows {
        println!("{k:<8} {v}");
    }
    println!("{:<8} {}", "C_K", pf(d.practical.ck));
    println!("{:<8} {}", "C_J", pf(d.practical.cj));
}

pub fn synth(a: SynthArgs) -> Result<ExitCode> {
    let spec = FilterSpec {
        order: a.order,
        ..FilterSpec::new(a.f0, a.fbw, a.z0, a.cc)
    };
    let design = bandstop::synthesis::synthesize(&spec)?;
    print_design(&design);
    let chosen = match a.topology {
        Some(t) => t,
        None => {
            let sel = topology::select_topology(&design, &PRACTICAL_VARIANTS)?;
            println!();
            println!(
                "{:<10} {:>6} {:>12} {:>8} {:>10}  note",
                "variant", "split", "f_notch", "fbw", "score"
            );
            for c in &sel.candidates {
                let opt = |v: Option<f64>, f: &dyn Fn(f64) -> String| {
                    v.map(f).unwrap_or_else(|| "-".into())
                };
                println!(
                    "{:<10} {:>6} {:>12} {:>8} {:>10}  {}",
                    c.topology.as_str(),
                    if c.split { "yes" } else { "no" },
                    opt(c.f_notch_hz, &|f| quantity::format(f, "Hz", 5)),
                    opt(c.fbw, &|v| format!("{v:.4}")),
                    opt(c.score, &|v| format!("{v:.4}")),
                    c.failure.as_deref().unwrap_or("")
                );
            }
            println!("selected {}", sel.winner);
            sel.winner
        }
    };
    if let Some(out) = a.out {
        DesignFile::new(design, chosen).save(&out)?;
        log::info!("wrote {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// Applies command-line loss overrides on top of the design's loss model.
fn loss_from(base: &LossModel, a: &LossArgs) -> Result<LossModel> {
    let mut loss = *base;
    if let Some(rs) = a.rs {
        loss.varactor_rs = rs;
    }
    if let Some(q) = a.q {
        loss.inductor_q = Some(q);
    }
    if a.bias_network {
        loss.bias = Some(BiasNetwork::default());
    }
    loss.validate()?;
    Ok(loss)
}

fn netlist_for(file: &DesignFile, id: TopologyId, loss: &LossModel) -> Result<Netlist> {
    if id.is_practical() {
        let (ca, cb) = file.caps();
        Tuner::new(&file.design, id, *loss)?.netlist(ca, cb)
    } else {
        topology::build(&file.design, id, loss)
    }
}

pub fn simulate(a: SimulateArgs) -> Result<ExitCode> {
    let file = DesignFile::load(&a.design)?;
    let id = a.topology.unwrap_or(file.topology);
    let loss = loss_from(&file.loss, &a.loss)?;
    let f0 = file.spec().f0;
    let fmin = a.fmin.unwrap_or(0.4 * f0);
    let fmax = a.fmax.unwrap_or(1.6 * f0);
    if !(fmax > fmin) || a.points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need fmax > fmin and at least 2 points, got [{fmin}, {fmax}] Hz with {}",
            a.points
        )));
    }
    let net = netlist_for(&file, id, &loss)?;
    let resp = sweep(&net, &linspace(fmin, fmax, a.points))?;
    for (k, flag) in &resp.flags {
        log::warn!("{} Hz: {:?}", resp.freqs[*k], flag);
    }
    let (ca, cb) = file.caps();
    let mut comments = vec![
        format!("bandstop simulate: topology {id}"),
        format!("f0 {} Hz, fbw {}", f0, file.spec().delta),
        format!(
            "rs {} ohm, inductor Q {}, bias network {}",
            loss.varactor_rs,
            loss.inductor_q.map_or("none".into(), |q| q.to_string()),
            if loss.bias.is_some() { "yes" } else { "no" }
        ),
    ];
    if id.is_practical() {
        comments.push(format!("ca {ca:e} F, cb {cb:e} F"));
    }
    let out = std::fs::File::create(&a.out)?;
    touchstone::write(&resp, &comments, std::io::BufWriter::new(out))?;
    log::info!("wrote {} points to {}", resp.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn print_metrics(m: &StopbandMetrics) {
    let ghz = |f: f64| format!("{:.6} GHz", f / 1e9);
    println!("{:<12} {}", "f_notch", ghz(m.f_notch_hz));
    println!("{:<12} {:.2} dB", "rejection", m.rejection_db);
    println!("{:<12} {}", "f_lo", ghz(m.f_lo_hz));
    println!("{:<12} {}", "f_hi", ghz(m.f_hi_hz));
    println!("{:<12} {:.5}", "fbw", m.fbw);
    match m.pb_il_db {
        Some(v) => println!("{:<12} {:.4} dB", "pb_il", v),
        None => println!("{:<12} -", "pb_il"),
    }
    println!("{:<12} {:.4} dB", "sb_rl", m.sb_rl_db);
    let modes: Vec<String> = m.modes_hz.iter().map(|&f| ghz(f)).collect();
    println!(
        "{:<12} {}",
        "modes",
        if modes.is_empty() {
            "-".into()
        } else {
            modes.join(", ")
        }
    );
}

pub fn metrics(a: MetricsArgs) -> Result<ExitCode> {
    let resp = touchstone::read(&a.s2p)?;
    let opts = AnalysisOptions {
        passband_margin: a.margin,
        mode_threshold_db: a.mode_threshold,
    };
    let m = analyze_with(&resp, &opts)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&m).map_err(Error::from)?);
    } else {
        print_metrics(&m);
    }
    Ok(ExitCode::SUCCESS)
}

fn bound(lo: Option<f64>, hi: Option<f64>, default: (f64, f64)) -> (f64, f64) {
    (lo.unwrap_or(default.0), hi.unwrap_or(default.1))
}

pub fn calibrate(a: CalibrateArgs) -> Result<ExitCode> {
    let mut file = DesignFile::load(&a.design)?;
    if !file.topology.is_practical() {
        return Err(Error::UnknownVariant(format!(
            "{} has no tunable capacitors",
            file.topology
        )));
    }
    let target = CalibrationTarget {
        weight_fbw: a.weight_fbw,
        ..CalibrationTarget::new(
            a.f0.unwrap_or(file.spec().f0),
            a.fbw.unwrap_or(file.spec().delta),
        )
    };
    let (ca0, cb0) = file.caps();
    if !(a.bounds_factor >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "bounds factor must be >= 1, got {}",
            a.bounds_factor
        )));
    }
    let around = CapBounds::around(ca0, cb0, a.bounds_factor);
    let bounds = CapBounds {
        ca_f: bound(a.ca_min, a.ca_max, around.ca_f),
        cb_f: bound(a.cb_min, a.cb_max, around.cb_f),
    };
    let tuner = Tuner::new(&file.design, file.topology, file.loss)?;
    let cal = tuner.calibrate_from(&target, &bounds, ca0, cb0)?;
    println!("{:<10} {}", "C_a", pf(cal.ca));
    println!("{:<10} {}", "C_b", pf(cal.cb));
    println!(
        "{:<10} {:.4e} -> {:.4e}",
        "objective", cal.initial_objective, cal.objective
    );
    println!(
        "{:<10} {} ({})",
        "evals",
        cal.evaluations,
        if cal.converged {
            "converged"
        } else {
            "budget reached"
        }
    );
    println!();
    print_metrics(&cal.metrics);
    file.operating_point = Some(OperatingPoint {
        ca_f: cal.ca,
        cb_f: cal.cb,
    });
    let out = a.out.unwrap_or(a.design);
    file.save(&out)?;
    log::info!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn parse_bias_list(text: &str) -> Result<Vec<BiasPoint>> {
    text.split(',')
        .map(|pair| {
            let (v1, v2) = pair.split_once(':').ok_or_else(|| {
                Error::InvalidArgument(format!("bias point `{pair}` is not `v1:v2`"))
            })?;
            Ok(BiasPoint::new(
                quantity::parse(v1.trim(), "V")?,
                quantity::parse(v2.trim(), "V")?,
            ))
        })
        .collect()
}

fn varactor_for(a: &TuneArgs, file: &DesignFile) -> Result<VaractorModel> {
    if let Some(p) = &a.varactor {
        return bandstop::io::design::load_varactor(p);
    }
    if a.placeholder_varactor {
        log::warn!("using the placeholder varactor profile; results are indicative only");
        return Ok(VaractorModel::placeholder());
    }
    file.varactor(&a.design)?.ok_or_else(|| {
        Error::InvalidArgument(
            "bias tuning needs --varactor, --placeholder-varactor or a design varactor_profile"
                .into(),
        )
    })
}

pub fn tune(a: TuneArgs) -> Result<ExitCode> {
    let file = DesignFile::load(&a.design)?;
    let loss = loss_from(&file.loss, &a.loss)?;
    let (ca0, cb0) = file.caps();
    let tuner = Tuner::new(&file.design, file.topology, loss)?.with_caps(ca0, cb0);
    let curve = if let (Some(start), Some(stop)) = (a.ca_start, a.ca_stop) {
        if a.points < 2 {
            return Err(Error::InvalidArgument("--points must be at least 2".into()));
        }
        let rule = match a.cb_rule {
            CbRuleArg::Fixed => CbRule::Fixed(cb0),
            CbRuleArg::Recalibrated => CbRule::Recalibrated {
                fbw_target: a.fbw.unwrap_or(file.spec().delta),
                cb_bounds: (cb0 / 20.0, cb0 * 12.0),
            },
        };
        tuner.tuning_curve_caps(&linspace(start, stop, a.points), rule)?
    } else {
        let biases = if a.reference_cases {
            REFERENCE_BIAS_CASES.to_vec()
        } else if let Some(list) = &a.bias {
            parse_bias_list(list)?
        } else {
            return Err(Error::InvalidArgument(
                "give --ca-start/--ca-stop, --bias or --reference-cases".into(),
            ));
        };
        tuner.tuning_curve_bias(&varactor_for(&a, &file)?, &biases)?
    };
    for r in &curve.rows {
        if let Some(g) = &r.gap {
            log::warn!("gap at control {}: {g}", r.control);
        }
    }
    let out = std::fs::File::create(&a.out)?;
    curve_csv::write(&curve, std::io::BufWriter::new(out))?;
    match curve.notch_span() {
        Some((lo, hi)) => println!(
            "{} rows, {} gaps, f_notch {:.4}-{:.4} GHz",
            curve.rows.len(),
            curve.gaps(),
            lo / 1e9,
            hi / 1e9
        ),
        None => println!("{} rows, all gaps", curve.rows.len()),
    }
    std::io::stdout().flush()?;
    Ok(ExitCode::SUCCESS)
}
