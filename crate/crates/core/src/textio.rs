//! Plain-text number and matrix formatting.
//!
//! Numbers are written like C's `%.17g`, which round-trips every `f64`.

use nalgebra::DMatrix;

use crate::scalar::Real;

/// Formats `x` exactly as `printf("%.17g", x)` would.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x.is_nan() {
        return if x.is_sign_negative() { "-nan".into() } else { "nan".into() };
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf".into() } else { "inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = strip_trailing_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_trailing_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_trailing_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Row-major dump: first line `rows cols`, then one line per row.
pub fn matrix_to_text<T: Real>(m: &DMatrix<T>) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_g17(m[(i, j)].as_f64())).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Inverse of [`matrix_to_text`]; `None` on malformed input.
pub fn matrix_from_text(text: &str) -> Option<DMatrix<f64>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut header = lines.next()?.split_whitespace();
    let rows: usize = header.next()?.parse().ok()?;
    let cols: usize = header.next()?.parse().ok()?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let row: Vec<f64> = lines.next()?.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
        if row.len() != cols {
            return None;
        }
        data.extend(row);
    }
    Some(DMatrix::from_row_slice(rows, cols, &data))
}
