//! Tuning curves as CSV. Gap rows keep their control and capacitor values
//! and leave the metric columns empty.

use std::io::Write;

use crate::error::Result;
use crate::tuning::TuningCurve;

pub const HEADER: [&str; 8] = [
    "control",
    "ca_f",
    "cb_f",
    "f_notch_hz",
    "rejection_db",
    "fbw",
    "pb_il_db",
    "sb_rl_db",
];

pub fn write<W: Write>(curve: &TuningCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let num = |v: f64| format!("{v:e}");
    for r in &curve.rows {
        let mut rec = vec![num(r.control), num(r.ca), num(r.cb)];
        match &r.metrics {
            Some(m) => rec.extend([
                num(m.f_notch_hz),
                num(m.rejection_db),
                num(m.fbw),
                m.pb_il_db.map(num).unwrap_or_default(),
                num(m.sb_rl_db),
            ]),
            None => rec.extend(std::iter::repeat_n(String::new(), 5)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_string(curve: &TuningCurve) -> String {
    let mut buf = Vec::new();
    write(curve, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
