//! Touchstone v1 two-port files (`.s2p`).
//!
//! The writer always emits `# HZ S RI R <z_ref>` with shortest round-trip
//! number formatting. The reader accepts HZ/KHZ/MHZ/GHZ and RI/MA/DB.

use std::io::Write;

use num_complex::Complex64;

use crate::circuit::FrequencyResponse;
use crate::error::{Error, Result};

pub fn option_line(z_ref: f64) -> String {
    format!("# HZ S RI R {z_ref}")
}

pub fn write<W: Write>(resp: &FrequencyResponse, comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "! {line}")?;
        }
    }
    writeln!(out, "{}", option_line(resp.z_ref))?;
    for k in 0..resp.len() {
        let s = [resp.s11[k], resp.s21[k], resp.s12[k], resp.s22[k]];
        write!(out, "{:e}", resp.freqs[k])?;
        for v in s {
            write!(out, " {:e} {:e}", v.re, v.im)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_string(resp: &FrequencyResponse, comments: &[String]) -> String {
    let mut buf = Vec::new();
    write(resp, comments, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Format {
    Ri,
    Ma,
    Db,
}

struct Options {
    scale: f64,
    format: Format,
    z_ref: f64,
}

fn parse_options(line: &str, lineno: usize) -> Result<Options> {
    let err = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let mut opts = Options {
        scale: 1e9,
        format: Format::Ma,
        z_ref: 50.0,
    };
    let mut tokens = line[1..].split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "HZ" => opts.scale = 1.0,
            "KHZ" => opts.scale = 1e3,
            "MHZ" => opts.scale = 1e6,
            "GHZ" => opts.scale = 1e9,
            "S" => {}
            p @ ("Y" | "Z" | "H" | "G") => {
                return Err(err(format!("only S parameters are supported, found {p}")))
            }
            "RI" => opts.format = Format::Ri,
            "MA" => opts.format = Format::Ma,
            "DB" => opts.format = Format::Db,
            "R" => {
                let v = tokens
                    .next()
                    .ok_or_else(|| err("missing reference resistance after R".into()))?;
                opts.z_ref = v
                    .parse::<f64>()
                    .ok()
                    .filter(|z| z.is_finite() && *z > 0.0)
                    .ok_or_else(|| err(format!("invalid reference resistance `{v}`")))?;
            }
            other => return Err(err(format!("unknown option `{other}`"))),
        }
    }
    Ok(opts)
}

fn to_complex(a: f64, b: f64, format: Format) -> Complex64 {
    match format {
        Format::Ri => Complex64::new(a, b),
        Format::Ma => Complex64::from_polar(a, b.to_radians()),
        Format::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
    }
}

pub fn parse(text: &str) -> Result<FrequencyResponse> {
    let mut opts: Option<Options> = None;
    let mut pending: Vec<f64> = Vec::with_capacity(9);
    let mut pending_line = 0;
    let mut freqs = Vec::new();
    let mut cols: [Vec<Complex64>; 4] = Default::default();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if opts.is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "second option line".into(),
                });
            }
            opts = Some(parse_options(line, lineno)?);
            continue;
        }
        let o = opts.as_ref().ok_or_else(|| Error::Parse {
            line: lineno,
            message: "data before the option line".into(),
        })?;
        if pending.is_empty() {
            pending_line = lineno;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{tok}` is not a number"),
            })?;
            pending.push(v);
        }
        if pending.len() > 9 {
            return Err(Error::Parse {
                line: lineno,
                message: format!(
                    "expected 9 values per two-port row, found {}",
                    pending.len()
                ),
            });
        }
        if pending.len() == 9 {
            let f = pending[0] * o.scale;
            if !(f > 0.0) || freqs.last().is_some_and(|&p| f <= p) {
                return Err(Error::Parse {
                    line: pending_line,
                    message: format!("frequency {f} Hz is not positive and ascending"),
                });
            }
            freqs.push(f);
            for (c, col) in cols.iter_mut().enumerate() {
                col.push(to_complex(pending[1 + 2 * c], pending[2 + 2 * c], o.format));
            }
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(Error::Parse {
            line: pending_line,
            message: format!("truncated row: {} of 9 values", pending.len()),
        });
    }
    let o = opts.ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        message: "missing option line".into(),
    })?;
    if freqs.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "no data rows".into(),
        });
    }
    let [s11, s21, s12, s22] = cols;
    FrequencyResponse::new(freqs, s11, s21, s12, s22, o.z_ref)
}

pub fn read(path: &std::path::Path) -> Result<FrequencyResponse> {
    parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_ma_ghz() {
        let text = "! c\n# GHz S MA R 50\n1.0 1 0  0.5 90  0.5 90  1 180\n";
        let r = parse(text).unwrap();
        assert_eq!(r.freqs, vec![1e9]);
        assert!((r.s21[0] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((r.s22[0] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn reads_db() {
        let r = parse("# MHZ S DB R 75\n100 -20 0 -6.020599913279624 0 0 0 -40 0\n").unwrap();
        assert_eq!(r.z_ref, 75.0);
        assert_eq!(r.freqs[0], 1e8);
        assert!((r.s11[0].norm() - 0.1).abs() < 1e-14);
        assert!((r.s21[0].norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn truncated_row_names_its_line() {
        let text = "# HZ S RI R 50\n1 0 0 1 0 1 0 0 0\n2 0 0 1\n";
        match parse(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("truncated"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tokens_and_order() {
        assert!(matches!(
            parse("# HZ S RI R 50\n1 0 0 x 0 1 0 0 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("1 0 0 1 0 1 0 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("# HZ S RI R 50\n2 0 0 1 0 1 0 0 0\n1 0 0 1 0 1 0 0 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse("# HZ Y RI R 50\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
