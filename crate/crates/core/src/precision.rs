//! Working-precision scalars and a small complex type on top of them.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

pub type Real = Float;

pub const DEFAULT_PRECISION: u32 = 256;

pub fn real(prec: u32, v: f64) -> Real {
    Float::with_val(prec, v)
}

pub fn int(prec: u32, v: i64) -> Real {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Real {
    Float::with_val(prec, Constant::Pi)
}

/// Parses a decimal literal or a ratio `p/q` at the given precision.
pub fn parse_real(prec: u32, s: &str) -> Result<Real> {
    let s = s.trim();
    let one = |t: &str| -> Result<Real> {
        let t = t.trim();
        Float::parse(t)
            .map(|p| Float::with_val(prec, p))
            .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = one(den)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("`{s}`: zero denominator")));
            }
            Ok(one(num)? / d)
        }
        None => one(s),
    }
}

/// Number of significant decimal digits written for precision `prec`.
pub fn decimal_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 3
}

/// Deterministic decimal rendering with enough digits to round-trip.
pub fn to_decimal(x: &Real) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(decimal_digits(x.prec())))
}

pub fn abs(x: &Real) -> Real {
    Float::with_val(x.prec(), x.abs_ref())
}

pub fn sq(x: &Real) -> Real {
    Float::with_val(x.prec(), x.square_ref())
}

/// `x^e` for real exponents.
pub fn powf(x: &Real, e: &Real) -> Real {
    use rug::ops::Pow;
    Float::with_val(x.prec().max(e.prec()), x.pow(e))
}

/// `2^e` at the given precision.
pub fn pow2(prec: u32, e: i32) -> Real {
    let mut x = Float::with_val(prec, 1);
    x <<= e;
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cplx {
    pub re: Real,
    pub im: Real,
}

impl Cplx {
    pub fn new(re: Real, im: Real) -> Self {
        Cplx { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Float::new(re.prec());
        Cplx { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Cplx::new(real(prec, re), real(prec, im))
    }

    pub fn zero(prec: u32) -> Self {
        Cplx::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Cplx::from_f64(prec, 1.0, 0.0)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Cplx {
        Cplx::new(self.re.clone(), Float::with_val(self.im.prec(), -&self.im))
    }

    pub fn norm_sqr(&self) -> Real {
        let p = self.prec();
        let mut n = Float::with_val(p, self.re.square_ref());
        n += sq(&self.im);
        n
    }

    pub fn abs(&self) -> Real {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Real {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn ln(&self) -> Cplx {
        Cplx::new(self.abs().ln(), self.arg())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Cplx {
        let p = self.prec();
        let r = self.abs();
        if r.is_zero() {
            return Cplx::zero(p);
        }
        // re = sqrt((r + x)/2), im = sign(y) sqrt((r - x)/2)
        let mut a = Float::with_val(p, &r + &self.re);
        a /= 2;
        let a = a.sqrt();
        let mut b = Float::with_val(p, &r - &self.re);
        b /= 2;
        let mut b = b.sqrt();
        if self.im.is_sign_negative() {
            b = -b;
        }
        Cplx::new(a, b)
    }

    pub fn recip(&self) -> Cplx {
        let n = self.norm_sqr();
        let re = Float::with_val(n.prec(), &self.re / &n);
        let im = -Float::with_val(n.prec(), &self.im / &n);
        Cplx::new(re, im)
    }

    pub fn scale(&self, s: &Real) -> Cplx {
        let p = self.prec().max(s.prec());
        Cplx::new(
            Float::with_val(p, &self.re * s),
            Float::with_val(p, &self.im * s),
        )
    }

    pub fn add_real(&self, s: &Real) -> Cplx {
        Cplx::new(Float::with_val(self.prec(), &self.re + s), self.im.clone())
    }

    pub fn sub_real(&self, s: &Real) -> Cplx {
        Cplx::new(Float::with_val(self.prec(), &self.re - s), self.im.clone())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Parses `3`, `-1.5i`, `5+2i`, `0.5-0.25i`.
    pub fn parse(prec: u32, s: &str) -> Result<Cplx> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty complex literal".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Cplx::from_real(parse_real(prec, &t)?));
        };
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut cut = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                cut = Some(i);
                break;
            }
        }
        let (re, im) = match cut {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        Ok(Cplx::new(parse_real(prec, re)?, parse_real(prec, im)?))
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        if im == 0.0 {
            write!(f, "{re}")
        } else if im < 0.0 {
            write!(f, "{re}{im}i")
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

impl Add for &Cplx {
    type Output = Cplx;
    fn add(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }
}

impl Sub for &Cplx {
    type Output = Cplx;
    fn sub(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        Cplx::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }
}

impl Mul for &Cplx {
    type Output = Cplx;
    fn mul(self, o: &Cplx) -> Cplx {
        let p = self.prec().max(o.prec());
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= Float::with_val(p, &self.im * &o.im);
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += Float::with_val(p, &self.im * &o.re);
        Cplx::new(re, im)
    }
}

impl Div for &Cplx {
    type Output = Cplx;
    fn div(self, o: &Cplx) -> Cplx {
        self * &o.recip()
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx::new(
            Float::with_val(self.re.prec(), -&self.re),
            Float::with_val(self.im.prec(), -&self.im),
        )
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Cplx {
            type Output = Cplx;
            fn $m(self, o: Cplx) -> Cplx {
                (&self).$m(&o)
            }
        }
        impl $tr<&Cplx> for Cplx {
            type Output = Cplx;
            fn $m(self, o: &Cplx) -> Cplx {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

/// Relative discrepancy `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: &Cplx, b: &Cplx) -> Real {
    let d = (a - b).abs();
    let s = a.abs().max(&b.abs());
    if s.is_zero() {
        d
    } else {
        d / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ratios_and_decimals() {
        let x = parse_real(128, "-1/2").unwrap();
        assert_eq!(x.to_f64(), -0.5);
        let y = parse_real(128, "2.25").unwrap();
        assert_eq!(y.to_f64(), 2.25);
        assert!(parse_real(128, "1/0").is_err());
        assert!(parse_real(128, "abc").is_err());
    }

    #[test]
    fn parses_complex_literals() {
        let z = Cplx::parse(64, "5+2i").unwrap();
        assert_eq!(z.to_f64(), (5.0, 2.0));
        let z = Cplx::parse(64, "-1.5e-1-0.25i").unwrap();
        assert_eq!(z.to_f64(), (-0.15, -0.25));
        let z = Cplx::parse(64, "-i").unwrap();
        assert_eq!(z.to_f64(), (0.0, -1.0));
        let z = Cplx::parse(64, "3").unwrap();
        assert_eq!(z.to_f64(), (3.0, 0.0));
    }

    #[test]
    fn complex_arithmetic() {
        let a = Cplx::from_f64(128, 1.0, 2.0);
        let b = Cplx::from_f64(128, 3.0, -1.0);
        assert_eq!((&a * &b).to_f64(), (5.0, 5.0));
        let q = &(&a * &b) / &b;
        let (re, im) = q.to_f64();
        assert!((re - 1.0).abs() < 1e-30 && (im - 2.0).abs() < 1e-30);
        let s = Cplx::from_f64(128, -4.0, 0.0).sqrt();
        assert_eq!(s.to_f64(), (0.0, 2.0));
        let s = Cplx::from_f64(128, 3.0, -4.0).sqrt();
        assert_eq!(s.to_f64(), (2.0, -1.0));
    }

    #[test]
    fn decimal_round_trip() {
        let x = parse_real(256, "1/3").unwrap();
        let back = parse_real(256, &to_decimal(&x)).unwrap();
        assert_eq!(x, back);
        assert_eq!(decimal_digits(256), 81);
    }
}
