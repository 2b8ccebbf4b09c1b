//! Exact rational scalars used for grid geometry, linear maps and polytope
//! vertices.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n)
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational converts to f64")
}

pub fn to_big(r: &Rat) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Narrows a big rational back to `i64` parts, if it fits.
pub fn from_big(r: &BigRational) -> Option<Rat> {
    Some(Rat::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn to_f64_vec(a: &[Rat]) -> Vec<f64> {
    a.iter().map(to_f64).collect()
}

/// Parses `"3"`, `"-1/2"` or a terminating decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::Invalid(format!("cannot parse rational `{s}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ipv: i64 = if ip.is_empty() || ip == "-" {
            0
        } else {
            ip.parse().map_err(|_| bad())?
        };
        if fp.is_empty() || fp.len() > 12 || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(fp.len() as u32);
        let frac = Rat::new(fp.parse::<i64>().map_err(|_| bad())?, den);
        let base = Rat::from_integer(ipv.abs()) + frac;
        return Ok(if neg { -base } else { base });
    }
    t.parse::<i64>().map(Rat::from_integer).map_err(|_| bad())
}

/// `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn fmt_point(p: &[Rat]) -> String {
    let parts: Vec<String> = p.iter().map(fmt_rat).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rat("3").unwrap(), int(3));
        assert_eq!(parse_rat("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn formats_points() {
        assert_eq!(fmt_point(&[int(1), rat(-1, 2)]), "(1, -1/2)");
    }
}
