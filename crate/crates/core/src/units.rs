//! Unit-suffix parsing and exact decimal formatting.
//!
//! Configuration files write dimensioned values with an explicit suffix
//! (`632 nm`, `2.97 mrad`); internally everything is SI (metres, radians).
//! Scan files store positions in millimetres. To keep file round-trips
//! bit-exact, the metre<->millimetre conversion is done *textually*, by
//! moving the decimal point of the shortest base-10 representation, never
//! by multiplying the float (multiplying by 1000 and dividing again can
//! land one ulp away).

use crate::error::{Error, Result};

/// Parse a length with a mandatory unit suffix; returns metres.
///
/// Accepted suffixes: `nm`, `um` (also `µm`/`μm`), `mm`, `m`. The unit
/// factor is applied as an exact decimal-exponent shift, so `2.97 mm`
/// parses to the same bits as the literal `2.97e-3` (multiplying by a
/// rounded power of ten can land one ulp away).
pub fn parse_length(text: &str) -> Result<f64> {
    let (number, suffix) = split_suffix(text)?;
    let shift = match suffix {
        "nm" => -9,
        "um" | "µm" | "μm" => -6,
        "mm" => -3,
        "m" => 0,
        "" => {
            return Err(Error::Domain(format!(
                "length `{text}` is missing a unit suffix (nm, um, mm, m)"
            )))
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown length unit `{other}` in `{text}`"
            )))
        }
    };
    parse_shifted(number, shift, text)
}

/// Parse an angle with a mandatory unit suffix; returns radians.
///
/// Accepted suffixes: `mrad`, `rad`; the factor is an exact decimal shift
/// as in [`parse_length`].
pub fn parse_angle(text: &str) -> Result<f64> {
    let (number, suffix) = split_suffix(text)?;
    let shift = match suffix {
        "mrad" => -3,
        "rad" => 0,
        "" => {
            return Err(Error::Domain(format!(
                "angle `{text}` is missing a unit suffix (mrad, rad)"
            )))
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown angle unit `{other}` in `{text}`"
            )))
        }
    };
    parse_shifted(number, shift, text)
}

/// Parse a dimensionless number; any unit suffix is an error.
pub fn parse_number(text: &str) -> Result<f64> {
    let (number, suffix) = split_suffix(text)?;
    if !suffix.is_empty() {
        return Err(Error::Domain(format!(
            "`{text}` should be a bare number, found suffix `{suffix}`"
        )));
    }
    parse_shifted(number, 0, text)
}

/// Parse a validated numeral scaled by `10^shift`, exactly.
fn parse_shifted(number: &str, shift: i32, original: &str) -> Result<f64> {
    let text = if shift == 0 {
        number.to_string()
    } else {
        shift_decimal(number, shift)
    };
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Domain(format!("cannot parse number from `{original}`")))
}

/// Split `"2.97 mrad"` into `("2.97", "mrad")`, validating that the
/// numeric part parses to a finite float. The suffix may be absent.
fn split_suffix(text: &str) -> Result<(&str, &str)> {
    let text = text.trim();
    let split = text
        .find(|c: char| c != '+' && c != '-' && c != '.' && !c.is_ascii_digit() && c != 'e' && c != 'E')
        .unwrap_or(text.len());
    // Guard against `e` actually starting a suffix rather than an exponent
    // (e.g. there is no digit after it), by re-splitting at the last parse
    // failure if needed.
    let (mut num, mut suffix) = text.split_at(split);
    if num.is_empty() {
        return Err(Error::Domain(format!("`{text}` has no numeric part")));
    }
    let mut value: std::result::Result<f64, _> = num.trim().parse();
    if value.is_err() {
        // Retry without a trailing exponent marker that belonged to a suffix.
        if let Some(stripped) = num.strip_suffix(['e', 'E']) {
            let moved = &text[stripped.len()..];
            num = stripped;
            suffix = moved;
            value = num.trim().parse();
        }
    }
    match value {
        Ok(v) if v.is_finite() => Ok((num.trim(), suffix.trim())),
        Ok(_) => Err(Error::Domain(format!("`{text}` is not finite"))),
        Err(_) => Err(Error::Domain(format!("cannot parse number from `{text}`"))),
    }
}

/// Format a length in metres as a millimetre string, exactly.
///
/// The value is rendered with the standard shortest-round-trip formatter and
/// the decimal point is then moved three places, so the printed millimetre
/// number is exactly `metres x 10^3` as a decimal numeral.
pub fn metres_to_mm_string(metres: f64) -> String {
    debug_assert!(metres.is_finite());
    shift_decimal(&format!("{metres}"), 3)
}

/// Parse a millimetre string back to metres, exactly undoing
/// [`metres_to_mm_string`].
pub fn mm_string_to_metres(text: &str) -> Result<f64> {
    let shifted = shift_decimal(text.trim(), -3);
    shifted
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Domain(format!("cannot parse position `{text}`")))
}

/// Move the decimal point of a base-10 numeral `shift` places to the right.
///
/// Works on plain decimals (`"0.574"`) and scientific notation
/// (`"5.74e-1"`, where only the exponent changes). The transformation is
/// exact: it never converts through floating point.
fn shift_decimal(text: &str, shift: i32) -> String {
    debug_assert!(!text.is_empty());
    if let Some(epos) = text.find(['e', 'E']) {
        let (mantissa, exp) = text.split_at(epos);
        let exp: i64 = exp[1..].parse().unwrap_or(0);
        return format!("{}e{}", mantissa, exp + i64::from(shift));
    }
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = match body.find('.') {
        Some(p) => (&body[..p], &body[p + 1..]),
        None => (body, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    let point = int_part.len() as i64 + i64::from(shift);
    let out = if point <= 0 {
        format!("0.{}{}", "0".repeat(point.unsigned_abs() as usize), digits)
    } else if (point as usize) >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    let trimmed = trim_zeros(&out);
    format!("{sign}{trimmed}")
}

/// Remove redundant leading/trailing zeros without changing the value.
fn trim_zeros(s: &str) -> String {
    let mut out = s.to_string();
    if out.contains('.') {
        out = out.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    let out = out.trim_start_matches('0');
    if out.is_empty() || out.starts_with('.') {
        format!("0{out}")
    } else {
        out.to_string()
    }
}
