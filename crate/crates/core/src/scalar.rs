//! Scalar arithmetic: exact Gaussian rationals and double-precision complex numbers
//! behind a common trait so polynomial and matrix code can be written once.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Common interface for the two coefficient domains.
///
/// `EXACT` distinguishes the Gaussian-rational domain (equality is exact,
/// division by nonzero always succeeds) from `f64` complex arithmetic.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        rhs.inv()
            .map(|r| self.clone() * r)
            .ok_or(Error::DivisionByZero)
    }
}

/// A Gaussian rational: `re + im*i` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Exact {
    pub re: BigRational,
    pub im: BigRational,
}

impl Exact {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Exact { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Exact {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Exact {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |z|^2 as a rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Parses entries such as `"3"`, `"-1/2"`, `"1/2+3/4i"`, `"2-i"`, `"3/5i"`.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::BadRational(s.to_string()));
        }
        // Split off an imaginary part: find a '+' or '-' that is not leading.
        let bytes = compact.as_bytes();
        let mut split = None;
        for (i, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[i - 1] != b'/' {
                split = Some(i);
            }
        }
        let (re_str, im_str) = match split {
            Some(i) if compact.ends_with('i') => (&compact[..i], &compact[i..]),
            _ if compact.ends_with('i') => ("", compact.as_str()),
            _ => (compact.as_str(), ""),
        };
        let re = if re_str.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(re_str).ok_or_else(|| Error::BadRational(s.to_string()))?
        };
        let im = if im_str.is_empty() {
            BigRational::zero()
        } else {
            let body = &im_str[..im_str.len() - 1];
            match body {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rational(body).ok_or_else(|| Error::BadRational(s.to_string()))?,
            }
        };
        Ok(Exact { re, im })
    }

    /// Nearest rational reconstruction of a float within `tol`, denominators
    /// capped at `max_den`. Returns `None` when no small rational is that close.
    pub fn snap_real(x: f64, tol: f64, max_den: i64) -> Option<BigRational> {
        if !x.is_finite() {
            return None;
        }
        // Continued-fraction convergents.
        let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, x.floor() as i128, 1i128);
        let mut frac = x - x.floor();
        for _ in 0..64 {
            let approx = p1 as f64 / q1 as f64;
            if (approx - x).abs() <= tol {
                return Some(BigRational::new(BigInt::from(p1), BigInt::from(q1)));
            }
            if frac.abs() < 1e-18 {
                break;
            }
            let r = 1.0 / frac;
            let a = r.floor();
            frac = r - a;
            let a = a as i128;
            let (p2, q2) = (a * p1 + p0, a * q1 + q0);
            if q2 > max_den as i128 {
                break;
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
        }
        let approx = p1 as f64 / q1 as f64;
        if q1 <= max_den as i128 && (approx - x).abs() <= tol {
            Some(BigRational::new(BigInt::from(p1), BigInt::from(q1)))
        } else {
            None
        }
    }

    pub fn snap(z: Complex64, tol: f64, max_den: i64) -> Option<Self> {
        Some(Exact {
            re: Self::snap_real(z.re, tol, max_den)?,
            im: Self::snap_real(z.im, tol, max_den)?,
        })
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.parse().ok()?;
            let den: BigInt = b.parse().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(BigRational::new(num, den))
            }
        }
        None => {
            let num: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(num))
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rational(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}{}i", fmt_rational(&self.re), fmt_rational(&self.im))
        } else {
            write!(f, "{}+{}i", fmt_rational(&self.re), fmt_rational(&self.im))
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        Exact {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        Exact {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        Exact {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Coeff for Exact {
    const EXACT: bool = true;

    fn zero() -> Self {
        Exact::from_ints(0, 0)
    }

    fn one() -> Self {
        Exact::from_ints(1, 0)
    }

    fn from_int(v: i64) -> Self {
        Exact::from_ints(v, 0)
    }

    fn i() -> Self {
        Exact::from_ints(0, 1)
    }

    fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Exact {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    fn conj(&self) -> Self {
        Exact {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Coeff for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn inv(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }

    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["3", "-1/2", "1/2+3/4i", "2-i", "3/5i", "-i", "0"] {
            let v = Exact::parse(s).unwrap();
            let again = Exact::parse(&v.to_string()).unwrap();
            assert_eq!(v, again, "{s}");
        }
        assert_eq!(Exact::parse("1/2").unwrap(), Exact::from_ratio(1, 2));
        assert_eq!(
            Exact::parse("-3+2i").unwrap(),
            Exact::from_ints(-3, 2)
        );
        assert!(Exact::parse("1/0").is_err());
        assert!(Exact::parse("").is_err());
    }

    #[test]
    fn field_ops() {
        let a = Exact::from_ratio(2, 3);
        let b = Exact::from_ints(0, 1);
        let prod = a.clone() * b.clone();
        assert_eq!(prod, Exact::parse("2/3i").unwrap());
        let q = prod.div(&b).unwrap();
        assert_eq!(q, a);
        assert!(Exact::zero().inv().is_none());
    }

    #[test]
    fn snap_recovers_small_rationals() {
        let r = Exact::snap_real(0.5 + 1e-12, 1e-9, 1000).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(
            Exact::snap_real(-2.0, 1e-9, 1000).unwrap(),
            BigRational::from_integer(BigInt::from(-2))
        );
        assert!(Exact::snap_real(std::f64::consts::SQRT_2, 1e-12, 1000).is_none());
    }
}
