//! Bit-exact text encoding of `f64` as C-style hexadecimal floats
//! (`0x1.8p+1`, `-0x0p+0`, `0x0.0000000000001p-1022`, `inf`, `nan`).
//!
//! The module doubles as a `#[serde(with = "crate::hexfloat")]` adapter;
//! [`vec`], [`option`] and [`history`] cover the container shapes in use.

use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

const MANTISSA_BITS: u32 = 52;
const MANTISSA_MASK: u64 = (1 << MANTISSA_BITS) - 1;
const EXP_BIAS: i64 = 1023;

pub fn to_hex(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let biased = ((bits >> MANTISSA_BITS) & 0x7ff) as i64;
    let mantissa = bits & MANTISSA_MASK;
    let (lead, exp) = match (biased, mantissa) {
        (0, 0) => (0, 0),
        (0, _) => (0, 1 - EXP_BIAS),
        _ => (1, biased - EXP_BIAS),
    };
    let digits = format!("{mantissa:013x}");
    let digits = digits.trim_end_matches('0');
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    format!("{sign}0x{lead}{frac}p{exp:+}")
}

pub fn from_hex(s: &str) -> Result<f64> {
    let bad = || Error::Malformed(format!("not a hex float: {s:?}"));
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let signed = |v: f64| if negative { -v } else { v };
    match body {
        "inf" => return Ok(signed(f64::INFINITY)),
        "nan" if !negative => return Ok(f64::NAN),
        _ => {}
    }
    let body = body.strip_prefix("0x").ok_or_else(bad)?;
    let (mant, exp) = body.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exp.parse().map_err(|_| bad())?;
    let (lead, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if frac.len() > 13 || (mant.contains('.') && frac.is_empty()) {
        return Err(bad());
    }
    if !frac.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(bad());
    }
    let frac_bits = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(frac, 16).map_err(|_| bad())? << (4 * (13 - frac.len()))
    };
    let bits = match lead {
        "1" if (1 - EXP_BIAS..=EXP_BIAS).contains(&exp) => (((exp + EXP_BIAS) as u64) << MANTISSA_BITS) | frac_bits,
        "0" if frac_bits == 0 && exp == 0 => 0,
        "0" if frac_bits != 0 && exp == 1 - EXP_BIAS => frac_bits,
        _ => return Err(bad()),
    };
    let sign_bit = if negative { 1u64 << 63 } else { 0 };
    Ok(f64::from_bits(sign_bit | bits))
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_hex(*x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    from_hex(&s).map_err(D::Error::custom)
}

/// `f64` wrapper that serializes as a hex float.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Hex(#[serde(with = "self")] pub f64);

pub mod vec {
    use super::Hex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let h: Vec<Hex> = v.iter().map(|&x| Hex(x)).collect();
        h.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Hex>::deserialize(d)?.into_iter().map(|h| h.0).collect())
    }
}

pub mod option {
    use super::Hex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Hex).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Hex>::deserialize(d)?.map(|h| h.0))
    }
}

/// `[(evaluations, best value)]` optimizer traces.
pub mod history {
    use super::Hex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(u64, f64)], s: S) -> Result<S::Ok, S::Error> {
        let h: Vec<(u64, Hex)> = v.iter().map(|&(e, x)| (e, Hex(x))).collect();
        h.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(u64, f64)>, D::Error> {
        Ok(Vec::<(u64, Hex)>::deserialize(d)?
            .into_iter()
            .map(|(e, h)| (e, h.0))
            .collect())
    }
}
