//! Exact complex-rational scalars.
//!
//! Coefficients of every symbolic object in the crate are pairs of
//! arbitrary-precision rationals. Floating point only enters at SDP assembly
//! and in the numeric oracles.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Cq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Cq { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Cq {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Cq::real(BigRational::from_integer(BigInt::from(v)))
    }

    /// `p/q` as a real value. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Cq::real(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Self {
        Cq::default()
    }

    pub fn one() -> Self {
        Cq::from_int(1)
    }

    pub fn i() -> Self {
        Cq::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Cq {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Cq {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Cq {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact rational copy of a double (every finite double is a dyadic rational).
    pub fn from_c64(z: Complex64) -> Self {
        Cq::new(rat_from_f64(z.re), rat_from_f64(z.im))
    }

    /// Modulus in double precision.
    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) => v,
        None => {
            // Very large numerators/denominators: fall back to a scaled division.
            let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

/// Exact conversion of a finite double. Non-finite values map to zero.
pub fn rat_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(BigRational::zero)
}

/// Parse `"-3"`, `"1/4"`, `"0.25"`, `"2.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty numeric entry".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = parse_decimal(p)?;
        let q = parse_decimal(q)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{t}'")));
        }
        return Ok(p / q);
    }
    parse_decimal(t)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("non-numeric entry '{s}'"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = body[pos + 1..].parse().map_err(|_| bad())?;
            (&body[..pos], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// `p/q` text form used by the serialization formats (`q` always present).
pub fn rat_to_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &Cq {
    type Output = Cq;
    fn add(self, o: &Cq) -> Cq {
        Cq {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &Cq {
    type Output = Cq;
    fn sub(self, o: &Cq) -> Cq {
        Cq {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &Cq {
    type Output = Cq;
    fn mul(self, o: &Cq) -> Cq {
        Cq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&Cq> for Cq {
    fn add_assign(&mut self, o: &Cq) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Cq> for Cq {
    fn sub_assign(&mut self, o: &Cq) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(
            parse_rational("0.25").unwrap(),
            BigRational::new(1.into(), 4.into())
        );
        assert_eq!(
            parse_rational("-4.46875").unwrap(),
            BigRational::new((-143).into(), 32.into())
        );
        assert_eq!(
            parse_rational("1/3").unwrap(),
            BigRational::new(1.into(), 3.into())
        );
        assert_eq!(
            parse_rational("2.5e-3").unwrap(),
            BigRational::new(1.into(), 400.into())
        );
        assert_eq!(parse_rational("+7").unwrap(), BigRational::from_integer(7.into()));
        assert_eq!(parse_rational(".5").unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn garbage_is_rejected() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "1e", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn inverse_and_conj() {
        let z = Cq::new(
            BigRational::from_integer(3.into()),
            BigRational::from_integer(4.into()),
        );
        let p = &z * &z.inv().unwrap();
        assert_eq!(p, Cq::one());
        assert_eq!(z.conj().im, BigRational::from_integer((-4).into()));
        assert!(Cq::zero().inv().is_none());
    }

    #[test]
    fn float_round_trip_is_exact() {
        for v in [0.1, -3.375, 1e-300, 123456.789] {
            assert_eq!(rat_to_f64(&rat_from_f64(v)), v);
        }
    }
}
