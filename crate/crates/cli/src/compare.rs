//! dB comparison of two Touchstone files on the union of their grids.

use std::process::ExitCode;

use bandstop::circuit::{db, FrequencyResponse};
use bandstop::io::touchstone;
use bandstop::{Error, Result};
use num_complex::Complex64;

use crate::CompareArgs;

/// Magnitudes below this are compared as if equal to it.
pub const DB_FLOOR: f64 = -100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub max_db: f64,
    pub at_hz: f64,
}

fn interp(freqs: &[f64], vals: &[Complex64], f: f64) -> Complex64 {
    let k = freqs.partition_point(|&x| x < f);
    if k < freqs.len() && freqs[k] == f {
        return vals[k];
    }
    let (a, b) = (k - 1, k);
    let t = (f - freqs[a]) / (freqs[b] - freqs[a]);
    vals[a] + (vals[b] - vals[a]) * t
}

fn floored_db(v: Complex64) -> f64 {
    db(v.norm()).max(DB_FLOOR)
}

/// Largest |S21| and |S11| dB differences over the overlapping range.
pub fn deviations(a: &FrequencyResponse, b: &FrequencyResponse) -> Result<(Deviation, Deviation)> {
    let lo = a.freqs[0].max(b.freqs[0]);
    let hi = a.freqs[a.len() - 1].min(b.freqs[b.len() - 1]);
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!(
            "frequency ranges do not overlap ([{}, {}] vs [{}, {}] Hz)",
            a.freqs[0],
            a.freqs[a.len() - 1],
            b.freqs[0],
            b.freqs[b.len() - 1]
        )));
    }
    let mut grid: Vec<f64> = a
        .freqs
        .iter()
        .chain(&b.freqs)
        .copied()
        .filter(|f| (lo..=hi).contains(f))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut s21 = Deviation {
        max_db: 0.0,
        at_hz: grid[0],
    };
    let mut s11 = s21;
    for &f in &grid {
        let d21 = (floored_db(interp(&a.freqs, &a.s21, f))
            - floored_db(interp(&b.freqs, &b.s21, f)))
        .abs();
        let d11 = (floored_db(interp(&a.freqs, &a.s11, f))
            - floored_db(interp(&b.freqs, &b.s11, f)))
        .abs();
        if d21 > s21.max_db {
            s21 = Deviation {
                max_db: d21,
                at_hz: f,
            };
        }
        if d11 > s11.max_db {
            s11 = Deviation {
                max_db: d11,
                at_hz: f,
            };
        }
    }
    Ok((s21, s11))
}

pub fn run(a: CompareArgs) -> Result<ExitCode> {
    if !(a.tol_db >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be >= 0, got {}",
            a.tol_db
        )));
    }
    let ra = touchstone::read(&a.a)?;
    let rb = touchstone::read(&a.b)?;
    if ra.z_ref != rb.z_ref {
        log::warn!(
            "reference impedances differ: {} vs {} ohm",
            ra.z_ref,
            rb.z_ref
        );
    }
    let (s21, s11) = deviations(&ra, &rb)?;
    let pass = s21.max_db <= a.tol_db && s11.max_db <= a.tol_db;
    println!(
        "max |dS21| {:.6} dB at {:.6} GHz",
        s21.max_db,
        s21.at_hz / 1e9
    );
    println!(
        "max |dS11| {:.6} dB at {:.6} GHz",
        s11.max_db,
        s11.at_hz / 1e9
    );
    let verdict = if pass { "PASS" } else { "FAIL" };
    if crate::color() {
        let code = if pass { 32 } else { 31 };
        println!("\x1b[{code}m{verdict}\x1b[0m (tolerance {} dB)", a.tol_db);
    } else {
        println!("{verdict} (tolerance {} dB)", a.tol_db);
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(freqs: Vec<f64>, s21: Vec<Complex64>) -> FrequencyResponse {
        let n = freqs.len();
        FrequencyResponse::new(
            freqs,
            vec![Complex64::new(0.1, 0.0); n],
            s21.clone(),
            s21,
            vec![Complex64::new(0.1, 0.0); n],
            50.0,
        )
        .unwrap()
    }

    #[test]
    fn interpolates_between_grids() {
        let one = Complex64::new(1.0, 0.0);
        let a = resp(vec![1.0, 3.0], vec![one, one * 0.5]);
        let b = resp(vec![2.0], vec![one * 0.75]);
        let (s21, s11) = deviations(&a, &b).unwrap();
        assert!(s21.max_db < 1e-12);
        assert_eq!(s11.max_db, 0.0);
        assert_eq!(s21.at_hz, 2.0);
    }

    #[test]
    fn disjoint_ranges_are_rejected() {
        let one = Complex64::new(1.0, 0.0);
        let a = resp(vec![1.0, 2.0], vec![one, one]);
        let b = resp(vec![3.0, 4.0], vec![one, one]);
        assert!(matches!(deviations(&a, &b), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn deep_nulls_are_floored() {
        let a = resp(vec![1.0], vec![Complex64::new(1e-7, 0.0)]);
        let b = resp(vec![1.0], vec![Complex64::new(1e-9, 0.0)]);
        assert_eq!(deviations(&a, &b).unwrap().0.max_db, 0.0);
    }
}
