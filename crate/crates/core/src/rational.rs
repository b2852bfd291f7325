//! Exact rational scalars.
//!
//! Every coefficient in the crate is a [`Scalar`], an arbitrary-precision
//! rational kept in lowest terms with a positive denominator (the
//! normalization `num_rational::Ratio` maintains).

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"`, `"p/q"` (q > 0) or a finite decimal such as `"-0.125"`.
pub fn parse(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if !q.is_positive() {
            return Err(Error::Parse(format!("denominator must be a positive integer: {s:?}")));
        }
        return Ok(Scalar::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = ip.starts_with('-');
        let ip = if ip.is_empty() || ip == "-" || ip == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(ip).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        let frac_part = BigInt::from_str(fp).map_err(|_| bad())?;
        let magnitude = ip.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Scalar::new(numer, scale));
    }
    BigInt::from_str(t).map(Scalar::from_integer).map_err(|_| bad())
}

pub fn to_f64(x: &Scalar) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    // Big operands: shift both to ~60 significant bits before dividing.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (x.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Scalar> {
    Scalar::from_float(x).ok_or(Error::NonFiniteParameter(x))
}

/// Nearest multiple of `2^-bits` (ties round up). The rounding error is
/// at most `2^-(bits+1)`.
pub fn round_dyadic(x: &Scalar, bits: u32) -> Scalar {
    let scale = BigInt::one() << bits as usize;
    let scaled = x.numer() * &scale;
    let (q, r) = scaled.div_mod_floor(x.denom());
    let twice_r: BigInt = r * 2;
    let q = if &twice_r >= x.denom() { q + 1 } else { q };
    Scalar::new(q, scale)
}

/// Upper bound on `|x|` as a float, inflated to absorb conversion rounding.
pub fn abs_upper(x: &Scalar) -> f64 {
    to_f64(&x.abs()) * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("6/4").unwrap(), frac(3, 2));
        assert_eq!(format(&parse("6/4").unwrap()), "3/2");
        assert_eq!(format(&parse("-4/2").unwrap()), "-2");
        assert_eq!(parse("-0.125").unwrap(), frac(-1, 8));
        assert_eq!(parse("0.5").unwrap(), frac(1, 2));
        assert_eq!(parse(" 7 ").unwrap(), int(7));
        assert!(parse("1/0").is_err());
        assert!(parse("1/-2").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn float_roundtrip() {
        let x = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&x), 0.1);
        assert!(from_f64(f64::NAN).is_err());
        assert!(from_f64(f64::INFINITY).is_err());
        let big = Scalar::new(BigInt::from(10).pow(400) + 1, BigInt::from(10).pow(399));
        assert!((to_f64(&big) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn dyadic_rounding_error_is_bounded() {
        let x = frac(1, 3);
        let r = round_dyadic(&x, 20);
        let err = (&x - &r).abs();
        assert!(err <= Scalar::new(BigInt::one(), BigInt::one() << 21usize));
        assert_eq!(round_dyadic(&frac(-5, 4), 1), frac(-1, 1));
    }
}
