//! Canonical JSON fragments shared by trace events, snapshots and the
//! generated Python program's state dump.

/// JSON string literal. Escapes exactly `"`, `\` and control characters,
/// matching Python's `json.dumps(s, ensure_ascii=False)`.
pub fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Shortest round-trip decimal form of a real, laid out the way Python's
/// `repr(float)` does: positional notation when the decimal exponent is in
/// `-4..16`, otherwise scientific with a signed two-digit-minimum exponent.
pub fn real(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // `{:e}` yields the shortest round-trip digits, e.g. "-1.25e-7".
    let sci = format!("{:e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    // Position of the decimal point relative to the first digit.
    let point = exp + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if -4 < point && point <= 16 {
        if point <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-point) as usize));
            out.push_str(&digits);
        } else if point as usize >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
            out.push_str(".0");
        } else {
            out.push_str(&digits[..point as usize]);
            out.push('.');
            out.push_str(&digits[point as usize..]);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let e = point - 1;
        out.push('e');
        out.push(if e < 0 { '-' } else { '+' });
        out.push_str(&format!("{:02}", e.abs()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_python_repr() {
        // Expected strings are Python 3 `repr(float(x))` outputs.
        let cases: &[(f64, &str)] = &[
            (0.0, "0.0"),
            (-0.0, "-0.0"),
            (1.5, "1.5"),
            (3.0, "3.0"),
            (0.1, "0.1"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (1.25e-7, "1.25e-07"),
            (1e16, "1e+16"),
            (1234567890123456.0, "1234567890123456.0"),
            (12345678901234567.0, "1.2345678901234568e+16"),
            (-2.5e300, "-2.5e+300"),
            (1.0 / 3.0, "0.3333333333333333"),
            (100.0, "100.0"),
            (f64::MAX, "1.7976931348623157e+308"),
            (5e-324, "5e-324"),
        ];
        for (v, expected) in cases {
            assert_eq!(real(*v), *expected, "{v:e}");
        }
    }

    #[test]
    fn string_escapes() {
        assert_eq!(string("a\"b"), r#""a\"b""#);
        assert_eq!(string("\u{1}\n\u{7f}é"), "\"\\u0001\\n\u{7f}é\"");
    }
}
