//! Exact parsing and printing of nonnegative rationals such as `7/4` or `1.6`.

use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Parses `p/q`, an integer, or a plain decimal into an exact ratio.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = |msg: &str| Error::Domain(format!("invalid rational {s:?}: {msg}"));
    let int = |t: &str| -> Result<u64> {
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected digits"));
        }
        t.parse().map_err(|_| bad("too large"))
    };
    if let Some((p, q)) = s.split_once('/') {
        let q = int(q.trim())?;
        if q == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Ratio::new(int(p.trim())?, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let whole = if whole.is_empty() { 0 } else { int(whole)? };
        if frac.is_empty() {
            return Ok(Ratio::from_integer(whole));
        }
        let den = 10u64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| bad("too many decimals"))?;
        let num = whole
            .checked_mul(den)
            .and_then(|w| w.checked_add(int(frac).ok()?))
            .ok_or_else(|| bad("too large"))?;
        return Ok(Ratio::new(num, den));
    }
    Ok(Ratio::from_integer(int(s)?))
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serializes a ratio as the string `p/q`.
pub fn serialize<S: serde::Serializer>(
    r: &Ratio<u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

pub fn serialize_opt<S: serde::Serializer>(
    r: &Option<Ratio<u64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => serialize(r, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_ratio("7/4").unwrap(), Ratio::new(7, 4));
        assert_eq!(parse_ratio(" 14 / 8 ").unwrap(), Ratio::new(7, 4));
        assert_eq!(parse_ratio("1.6").unwrap(), Ratio::new(8, 5));
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert_eq!(parse_ratio(".25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("3.").unwrap(), Ratio::from_integer(3));
    }

    #[test]
    fn rejects_garbage() {
        for s in [
            "",
            "1/0",
            "a",
            "-1",
            "1e3",
            "1/2/3",
            "1.2.3",
            "99999999999999999999",
        ] {
            assert!(parse_ratio(s).is_err(), "{s}");
        }
    }

    #[test]
    fn serializes_as_fraction() {
        #[derive(serde::Serialize)]
        struct W {
            #[serde(serialize_with = "serialize")]
            k: Ratio<u64>,
            #[serde(serialize_with = "serialize_opt")]
            g: Option<Ratio<u64>>,
        }
        let w = W {
            k: Ratio::new(6, 4),
            g: None,
        };
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"k":"3/2","g":null}"#
        );
    }
}
