//! Engineering-notation quantities such as `0.83GHz`, `2.2pF` or `50`.
//!
//! Prefixes are case-sensitive: `G M k m u n p f` (`M` is mega, `m` milli).
//! A trailing unit symbol is optional but must match when present.

use crate::error::{Error, Result};

const PREFIXES: [(char, i32); 9] = [
    ('G', 9),
    ('M', 6),
    ('k', 3),
    ('m', -3),
    ('u', -6),
    ('µ', -6),
    ('n', -9),
    ('p', -12),
    ('f', -15),
];

/// Parses `text` as a quantity in `unit` (e.g. `"Hz"`, `"F"`, `"H"`,
/// `"ohm"`, `"V"`; pass `""` for dimensionless values).
pub fn parse(text: &str, unit: &str) -> Result<f64> {
    let bad = || Error::Quantity(text.to_owned());
    let mut s = text.trim();
    if !unit.is_empty() {
        if let Some(rest) = s.strip_suffix(unit) {
            s = rest.trim_end();
        } else if unit == "ohm" {
            s = s.strip_suffix('Ω').map(str::trim_end).unwrap_or(s);
        }
    }
    let (number, shift) = match s.char_indices().last() {
        Some((i, c)) => match PREFIXES.iter().find(|(p, _)| *p == c) {
            Some(&(_, shift)) => (&s[..i], shift),
            None => (s, 0),
        },
        None => return Err(bad()),
    };
    // fold the prefix into the decimal exponent so `2.2p` is exactly 2.2e-12
    let (mantissa, exp) = match number.find(['e', 'E']) {
        Some(i) => (
            &number[..i],
            number[i + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (number, 0),
    };
    if mantissa.is_empty()
        || !mantissa
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '+' | '-'))
    {
        return Err(bad());
    }
    let v: f64 = format!("{mantissa}e{}", exp + shift)
        .parse()
        .map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// Like [`parse`] but also requires a strictly positive result.
pub fn parse_positive(text: &str, unit: &str) -> Result<f64> {
    let v = parse(text, unit)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Quantity(format!("{text} (must be positive)")))
    }
}

/// Formats `v` with an engineering prefix and `sig` significant digits,
/// e.g. `format(3.7664e-8, "H", 5)` gives `"37.664 nH"`.
pub fn format(v: f64, unit: &str, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v} {unit}");
    }
    let exp3 = ((v.abs().log10() / 3.0).floor() as i32).clamp(-5, 3);
    let prefix = match exp3 {
        3 => "G",
        2 => "M",
        1 => "k",
        0 => "",
        -1 => "m",
        -2 => "u",
        -3 => "n",
        -4 => "p",
        _ => "f",
    };
    let scaled = v / 10f64.powi(3 * exp3);
    let int_digits = (scaled.abs().log10().floor() as i64 + 1).max(1) as usize;
    let decimals = sig.saturating_sub(int_digits);
    format!("{scaled:.decimals$} {prefix}{unit}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prefixes_and_units() {
        assert_eq!(parse("0.83GHz", "Hz").unwrap(), 0.83e9);
        assert_eq!(parse("2.2pF", "F").unwrap(), 2.2e-12);
        assert_eq!(parse("2.2p", "F").unwrap(), 2.2e-12);
        assert_eq!(parse("50", "ohm").unwrap(), 50.0);
        assert_eq!(parse("50ohm", "ohm").unwrap(), 50.0);
        assert_eq!(parse("27nH", "H").unwrap(), 27e-9);
        assert_eq!(parse("1e9", "Hz").unwrap(), 1e9);
        assert_eq!(parse("1.5e-3k", "").unwrap(), 1.5);
        assert_eq!(parse("0.18", "").unwrap(), 0.18);
    }

    #[test]
    fn prefixes_are_case_sensitive() {
        assert_eq!(parse("1M", "Hz").unwrap(), 1e6);
        assert_eq!(parse("1m", "").unwrap(), 1e-3);
        assert!(parse("1K", "Hz").is_err());
        assert!(parse("1g", "Hz").is_err());
        assert!(parse("1ghz", "Hz").is_err());
    }

    #[test]
    fn rejects_junk() {
        for s in ["", "GHz", "abc", "1..2p", "nan", "inf", "1xF"] {
            assert!(parse(s, "F").is_err(), "{s}");
        }
        assert!(parse_positive("-1p", "F").is_err());
        assert!(parse_positive("0", "F").is_err());
    }

    #[test]
    fn formats_with_prefix() {
        assert_eq!(format(3.76638e-8, "H", 5), "37.664 nH");
        assert_eq!(format(1.39048e-12, "F", 5), "1.3905 pF");
        assert_eq!(format(0.83e9, "Hz", 4), "830.0 MHz");
        assert_eq!(format(50.0, "ohm", 4), "50.00 ohm");
    }
}
