//! Number formatting shared by the CSV and JSON writers.

/// `%.{digits}g`-style formatting: shortest of fixed or scientific notation
/// with trailing zeros removed.
pub fn fmt_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV cells use 12 significant digits.
pub fn csv_num(x: f64) -> String {
    fmt_g(x, 12)
}

/// Compact JSON. serde_json prints floats in their shortest round-trip form.
pub fn to_json_string(v: &serde_json::Value) -> String {
    serde_json::to_string(v).expect("serializing a Value cannot fail")
}
