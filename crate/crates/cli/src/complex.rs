use std::fmt;

use scar_core::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Parse `a`, `bi`, `a+bi` or `a-bi` (exponents allowed, `j` accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('\u{2212}', "-");
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse {text:?} as a complex number (expected e.g. -8.312-8.569i)");
    let num = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that does not start the string or an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, num(&body[k..])?)),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

pub fn format_complex(z: Complex64, decimals: usize) -> String {
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { '-' } else { '+' };
    format!("{:.*}{}{:.*}i", decimals, z.re, sign, decimals, z.im.abs())
}

/// Complex value in a config file: `"-8.312-8.569i"` or `[-8.312, -8.569]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue(pub Complex64);

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_complex(self.0, 6))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Pair([f64; 2]),
    Real(f64),
    Text(String),
}

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawComplex::deserialize(d)? {
            RawComplex::Pair([re, im]) => Ok(ComplexValue(Complex64::new(re, im))),
            RawComplex::Real(re) => Ok(ComplexValue(Complex64::new(re, 0.0))),
            RawComplex::Text(t) => parse_complex(&t).map(ComplexValue).map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for ComplexValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_complex("-8.312-8.569i").unwrap(), Complex64::new(-8.312, -8.569));
        assert_eq!(parse_complex("-0.4458+3.7161i").unwrap(), Complex64::new(-0.4458, 3.7161));
        assert_eq!(parse_complex("1.0").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2E+1j").unwrap(), Complex64::new(1e-3, 20.0));
        assert_eq!(parse_complex(" -1 - 2i ").unwrap(), Complex64::new(-1.0, -2.0));
    }

    #[test]
    fn rejects_garbage() {
        for t in ["", "abc", "1+2", "1+xi"] {
            assert!(parse_complex(t).is_err(), "{t}");
        }
    }

    #[test]
    fn formats_with_sign() {
        assert_eq!(format_complex(Complex64::new(-0.25049, 3.14716), 4), "-0.2505+3.1472i");
        assert_eq!(format_complex(Complex64::new(4.0, -2.0), 1), "4.0-2.0i");
    }
}
