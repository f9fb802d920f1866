//! Number formatting shared by every CSV writer.

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that reproduces the rounded value.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

/// Output formatting for analysis series: 12 significant digits.
pub fn num(x: f64) -> String {
    sig(x, 12)
}

/// `num`, or an empty cell for undefined values.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
