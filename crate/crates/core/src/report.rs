//! Locale-independent text output.

use crate::analysis::TradeoffPoint;

pub const SWEEP_CSV_HEADER: &str = "nu,mi_bits,guess_prob,escape_prob,flat_mass";

/// Formats `x` with 12 significant digits, `%.12g` style: fixed notation for
/// moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    format_sig_digits(x, 12)
}

pub fn format_sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn sweep_csv_row(p: &TradeoffPoint) -> String {
    [
        p.nu,
        p.mutual_information,
        p.guess_probability,
        p.escape_probability,
        p.flat_mass,
    ]
    .iter()
    .map(|&v| format_sig(v))
    .collect::<Vec<_>>()
    .join(",")
}

/// Header plus one LF-terminated row per point.
pub fn sweep_csv(points: &[TradeoffPoint]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&sweep_csv_row(p));
        out.push('\n');
    }
    out
}
