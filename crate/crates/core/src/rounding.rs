//! Two-decimal, half-up rounding applied when scores leave the process.
//!
//! Rounding works on the shortest round-trip decimal form of the value, so
//! `1.005` becomes `1.01` even though its binary value is slightly below the
//! midpoint. Results are identical on every IEEE-754 platform.

use serde::Serializer;

/// Formats `x` with exactly two decimals, rounding half away from zero.
///
/// # Panics
///
/// Panics if `x` is not finite. Scores and summary statistics are always finite.
pub fn fixed2(x: f64) -> String {
    assert!(x.is_finite(), "cannot format non-finite value {x}");
    let shortest = format!("{}", x.abs());
    let (int_part, frac_part) = shortest.split_once('.').unwrap_or((&shortest, ""));

    let mut digits: Vec<u8> = int_part.bytes().collect();
    let frac = frac_part.as_bytes();
    for i in 0..2 {
        digits.push(frac.get(i).copied().unwrap_or(b'0'));
    }
    if frac.get(2).is_some_and(|&d| d >= b'5') {
        let mut carry = true;
        for digit in digits.iter_mut().rev() {
            if *digit == b'9' {
                *digit = b'0';
            } else {
                *digit += 1;
                carry = false;
                break;
            }
        }
        if carry {
            digits.insert(0, b'1');
        }
    }

    let split = digits.len() - 2;
    let mut out = String::with_capacity(digits.len() + 2);
    if x.is_sign_negative() && digits.iter().any(|&d| d != b'0') {
        out.push('-');
    }
    out.push_str(std::str::from_utf8(&digits[..split]).expect("ascii digits"));
    out.push('.');
    out.push_str(std::str::from_utf8(&digits[split..]).expect("ascii digits"));
    out
}

/// `x` rounded half-up to two decimals, as the nearest `f64`.
pub fn round2(x: f64) -> f64 {
    fixed2(x)
        .parse()
        .expect("fixed2 yields a valid float literal")
}

pub(crate) fn serialize_score<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_f64(round2(*x))
}

pub(crate) fn serialize_opt_score<S: Serializer>(
    x: &Option<f64>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serializer.serialize_some(&round2(*v)),
        None => serializer.serialize_none(),
    }
}
