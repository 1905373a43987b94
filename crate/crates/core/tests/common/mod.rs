//! Shared oracles for integration tests. Nothing here calls into the
//! crate's solver: ABCD matrices are cascaded by hand and element values
//! are recomputed from closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

use bandstop::circuit::FrequencyResponse;
pub use num_complex::Complex64 as C;

pub type Abcd = [[C; 2]; 2];

pub fn series_z(z: C) -> Abcd {
    [[C::new(1.0, 0.0), z], [C::new(0.0, 0.0), C::new(1.0, 0.0)]]
}

pub fn shunt_y(y: C) -> Abcd {
    [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [y, C::new(1.0, 0.0)]]
}

/// Lossless line of impedance `z` and electrical length `theta`.
pub fn line(z: f64, theta: f64) -> Abcd {
    let (s, c) = theta.sin_cos();
    [
        [C::new(c, 0.0), C::new(0.0, z * s)],
        [C::new(0.0, s / z), C::new(c, 0.0)],
    ]
}

pub fn cascade(a: &Abcd, b: &Abcd) -> Abcd {
    let mut r = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn chain(parts: &[Abcd]) -> Abcd {
    parts
        .iter()
        .skip(1)
        .fold(parts[0], |acc, p| cascade(&acc, p))
}

/// `[[S11, S12], [S21, S22]]` for equal real reference impedances.
pub fn abcd_to_s(m: &Abcd, z0: f64) -> [[C; 2]; 2] {
    let [[a, b], [c, d]] = *m;
    let den = a + b / z0 + c * z0 + d;
    [
        [
            (a + b / z0 - c * z0 - d) / den,
            C::new(2.0, 0.0) * (a * d - b * c) / den,
        ],
        [C::new(2.0, 0.0) / den, (-a + b / z0 - c * z0 + d) / den],
    ]
}

pub fn jw(f: f64) -> C {
    C::new(0.0, 2.0 * PI * f)
}

/// Largest entry-wise |S - S_oracle| over the sweep.
pub fn max_deviation(resp: &FrequencyResponse, oracle: impl Fn(f64) -> [[C; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..resp.len() {
        let o = oracle(resp.freqs[k]);
        let got = [[resp.s11[k], resp.s12[k]], [resp.s21[k], resp.s22[k]]];
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((got[i][j] - o[i][j]).norm());
            }
        }
    }
    worst
}

/// Worst `| |S11|^2 + |S21|^2 - 1 |`, `| |S12|^2 + |S22|^2 - 1 |` and
/// `|S11 S12* + S21 S22*|`.
pub fn unitarity_error(resp: &FrequencyResponse) -> f64 {
    (0..resp.len())
        .map(|k| {
            let (s11, s12, s21, s22) = (resp.s11[k], resp.s12[k], resp.s21[k], resp.s22[k]);
            let c1 = (s11.norm_sqr() + s21.norm_sqr() - 1.0).abs();
            let c2 = (s12.norm_sqr() + s22.norm_sqr() - 1.0).abs();
            let x = (s11 * s12.conj() + s21 * s22.conj()).norm();
            c1.max(c2).max(x)
        })
        .fold(0.0, f64::max)
}

pub fn reciprocity_error(resp: &FrequencyResponse) -> f64 {
    resp.s12
        .iter()
        .zip(&resp.s21)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Element values of the 0.83 GHz, 18 %, 50 ohm, 2.2 pF design, recomputed
/// in closed form (Butterworth n = 2 gives g1 = g2 = sqrt 2).
pub struct Reference {
    pub f0: f64,
    pub delta: f64,
    pub z0: f64,
    pub cc: f64,
    pub zt: f64,
    pub l: f64,
    pub c: f64,
    pub dk: f64,
    pub lm: f64,
    pub l1: f64,
    pub cm: f64,
    pub c1: f64,
    pub ck: f64,
    pub cj: f64,
    pub ca: f64,
    pub cb: f64,
    pub cc_min: f64,
}

pub fn reference() -> Reference {
    let (f0, delta, z0, cc) = (0.83e9, 0.18, 50.0, 2.2e-12);
    let g1 = 2.0 * (PI / 4.0).sin();
    let g2 = g1;
    let w0 = 2.0 * PI * f0;
    let zt = z0;
    let l = z0 / (delta * w0 * (g1 * g2).sqrt());
    let c = 1.0 / (w0 * w0 * l);
    let dk = delta / (g1 * g2).sqrt();
    let ct = (1.0 + dk) * c;
    let ck = ct * cc / (cc - ct);
    let cj = (1.0 - dk * dk) * c / dk;
    Reference {
        f0,
        delta,
        z0,
        cc,
        zt,
        l,
        c,
        dk,
        lm: dk * l,
        l1: (1.0 - dk) * l,
        cm: dk * c,
        c1: (1.0 - dk) * c,
        ck,
        cj,
        ca: ck * cj / (2.0 * ck + cj),
        cb: ck * ck / (2.0 * ck + cj),
        cc_min: ct,
    }
}

/// High-precision values of the same design, computed once offline with
/// 30-digit arithmetic.
#[allow(clippy::excessive_precision)]
pub mod precise {
    pub const L: f64 = 3.7663835180601826872e-8;
    pub const C: f64 = 9.7624660788119935253e-13;
    pub const DK: f64 = 0.12727922061357855439;
    pub const LM: f64 = 4.7938235871052811979e-9;
    pub const L1: f64 = 3.2870011593496545674e-8;
    pub const CM: f64 = 1.2425590737776888865e-13;
    pub const C1: f64 = 8.5199070050343046388e-13;
    pub const CK: f64 = 2.2020109797158663269e-12;
    pub const CJ: f64 = 7.5458618319906810279e-12;
    pub const CA: f64 = 1.3904796812659651914e-12;
    pub const CB: f64 = 4.0576564922495056776e-13;
    pub const CC_MIN: f64 = 1.1005025152589682412e-12;
}
