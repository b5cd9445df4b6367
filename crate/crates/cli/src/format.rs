//! Plain-text number formatting and the one-value-per-line sample format.

use std::io::BufRead;

use lnratio::SampleAccumulator;

use crate::error::CliError;

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// dropped. Every finite double survives a print/parse round trip.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Reads a sample file: one positive real per line, blank lines and lines
/// starting with `#` ignored. Errors carry the 1-based line number.
pub fn read_sample<R: BufRead>(reader: R) -> Result<SampleAccumulator, CliError> {
    let mut acc = SampleAccumulator::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let x: f64 = text.parse().map_err(|_| {
            CliError::Data(format!("line {lineno}: cannot parse {text:?} as a number"))
        })?;
        acc.push(x)
            .map_err(|e| CliError::Data(format!("line {lineno}: {e}")))?;
    }
    Ok(acc)
}
