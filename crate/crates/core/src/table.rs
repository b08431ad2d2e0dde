//! Shared output formatting: one float format and one quoting rule, used by
//! every CSV, markdown, and JSON emitter so identical inputs produce
//! byte-identical files.

/// Format `x` with six significant digits, plain decimal notation.
///
/// The number of fractional digits is derived from the magnitude, so values
/// like 0.746 print as `0.746000` and 123.4 as `123.400`. Integer-scale
/// values beyond six digits keep all integer digits.
pub fn fmt_float(x: f64) -> String {
    const SIG: i32 = 6;
    if !x.is_finite() {
        // Should not reach output files; keep a stable spelling if it does.
        return if x.is_nan() {
            "NaN".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if x == 0.0 {
        return format!("{:.*}", (SIG - 1) as usize, 0.0);
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (SIG - 1 - mag).clamp(0, 17) as usize;
    format!("{:.*}", decimals, x)
}

/// Quote a CSV field per RFC 4180 when it contains a delimiter, quote, or
/// line break; otherwise pass it through unchanged.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Join already-formatted fields into one CSV record line.
pub fn csv_record(fields: &[String]) -> String {
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    quoted.join(",")
}
