//! Exact rational edge weights.
//!
//! Every cost in the reductions is a small rational (halves, quarters, the
//! ATSP constant λ, path pieces `w/L`), so all arithmetic is done in
//! `Ratio<i64>` with no floating point anywhere on a cost path.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Weight = Ratio<i64>;

pub fn w(n: i64) -> Weight {
    Weight::from_integer(n)
}

pub fn frac(n: i64, d: i64) -> Weight {
    Weight::new(n, d)
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"1.5"`.
pub fn parse_weight(s: &str) -> Result<Weight> {
    let s = s.trim();
    let bad = || Error::input(format!("bad rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Weight::new(p, q));
    }
    if let Some((int, dec)) = s.split_once('.') {
        if dec.is_empty() || dec.len() > 12 || !dec.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(dec.len() as u32);
        let num: i64 = dec.parse().map_err(|_| bad())?;
        let mag = Weight::from_integer(int.abs()) + Weight::new(num, den);
        return Ok(if neg { -mag } else { mag });
    }
    s.parse::<i64>().map(Weight::from_integer).map_err(|_| bad())
}

pub fn format_weight(x: &Weight) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Least common multiple of the denominators; multiplying by it makes every
/// entry integral.
pub fn common_scale<'a>(xs: impl IntoIterator<Item = &'a Weight>) -> i64 {
    xs.into_iter().fold(1i64, |acc, x| acc.lcm(x.denom()))
}

pub fn to_scaled(x: &Weight, scale: i64) -> i64 {
    let y = *x * Weight::from_integer(scale);
    debug_assert!(y.is_integer());
    y.to_integer()
}

pub fn is_positive(x: &Weight) -> bool {
    *x > Weight::zero()
}

pub fn half() -> Weight {
    Weight::new(1, 2)
}

pub fn one() -> Weight {
    Weight::one()
}

/// Serde adapter storing weights as `"p/q"` strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Weight, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_weight(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Weight, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Weight::from_integer(n)),
            Raw::Str(s) => parse_weight(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Like [`serde_str`] for optional weights (`null` when absent).
pub mod serde_opt {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Weight>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_weight(x)),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_weight("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse_weight("1.5").unwrap(), frac(3, 2));
        assert_eq!(parse_weight("0.125").unwrap(), frac(1, 8));
        assert_eq!(parse_weight("7").unwrap(), w(7));
        assert_eq!(parse_weight("-2.25").unwrap(), frac(-9, 4));
        assert!(parse_weight("1/0").is_err());
        assert!(parse_weight("abc").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for x in [frac(3, 2), w(4), frac(-1, 8), frac(123, 122)] {
            assert_eq!(parse_weight(&format_weight(&x)).unwrap(), x);
        }
    }

    #[test]
    fn scale_is_lcm_of_denominators() {
        let xs = [frac(1, 2), frac(1, 8), frac(3, 10), w(2)];
        assert_eq!(common_scale(xs.iter()), 40);
        assert_eq!(to_scaled(&frac(3, 10), 40), 12);
    }
}
