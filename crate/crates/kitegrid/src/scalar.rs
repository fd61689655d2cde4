//! Exact scalars of the form `a + b*sqrt(3)` with rational `a`, `b`.
//!
//! All geometric predicates in this crate reduce to sign computations on
//! these scalars, so nothing here ever rounds. Floating point only appears
//! in `to_f64`, which callers use for diagnostics and rendering estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Element of the field Q(sqrt 3), kept in lowest terms by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QS3 {
    /// rational part
    pub a: BigRational,
    /// coefficient of sqrt(3)
    pub b: BigRational,
}

impl QS3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QS3 { a, b }
    }

    pub fn from_int(n: i64) -> Self {
        QS3 {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigRational::zero(),
        }
    }

    /// `num/den`, with `den != 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        QS3 {
            a: BigRational::new(BigInt::from(num), BigInt::from(den)),
            b: BigRational::zero(),
        }
    }

    /// `(anum/aden) + (bnum/bden) * sqrt(3)`
    pub fn from_parts(anum: i64, aden: i64, bnum: i64, bden: i64) -> Self {
        assert!(aden != 0 && bden != 0, "zero denominator");
        QS3 {
            a: BigRational::new(BigInt::from(anum), BigInt::from(aden)),
            b: BigRational::new(BigInt::from(bnum), BigInt::from(bden)),
        }
    }

    pub fn zero() -> Self {
        QS3::from_int(0)
    }

    pub fn one() -> Self {
        QS3::from_int(1)
    }

    pub fn sqrt3() -> Self {
        QS3 {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Exact sign: -1, 0 or 1.
    ///
    /// For mixed-sign coefficients the sign follows from comparing `a^2`
    /// with `3 b^2`, since `a + b*sqrt(3)` and `a - b*sqrt(3)` multiply to
    /// `a^2 - 3 b^2`.
    pub fn sign(&self) -> i32 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        match (sa, sb) {
            (0, 0) => 0,
            (0, s) | (s, 0) => s,
            (1, 1) => 1,
            (-1, -1) => -1,
            _ => {
                // a and b have strictly opposite signs
                let a2 = &self.a * &self.a;
                let b2 = BigRational::from_integer(BigInt::from(3)) * &self.b * &self.b;
                match a2.cmp(&b2) {
                    Ordering::Equal => 0,
                    Ordering::Greater => sa,
                    Ordering::Less => sb,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        // 1/(a + b s) = (a - b s) / (a^2 - 3 b^2)
        let norm = &self.a * &self.a - BigRational::from_integer(BigInt::from(3)) * &self.b * &self.b;
        QS3 {
            a: &self.a / &norm,
            b: -(&self.b) / &norm,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * 3f64.sqrt()
    }

    /// Largest integer `n` with `n <= self`, computed exactly.
    pub fn floor_i64(&self) -> i64 {
        let mut n = self.to_f64().floor() as i64;
        // fix up the float estimate with exact comparisons
        while (self - &QS3::from_int(n)).sign() < 0 {
            n -= 1;
        }
        while (self - &QS3::from_int(n + 1)).sign() >= 0 {
            n += 1;
        }
        n
    }

    /// Decimal rendering with `digits` fractional digits, round half to even.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.sign() < 0;
        let v = self.abs();
        let pow = QS3::from_int(10i64.pow(digits));
        let scaled = &v * &pow;
        let mut n = scaled.floor_i64();
        let frac2 = (&scaled - &QS3::from_int(n)) * &QS3::from_int(2);
        let half = (&frac2 - &QS3::one()).sign();
        if half > 0 || (half == 0 && n % 2 == 1) {
            n += 1;
        }
        let base = 10i64.pow(digits);
        let (ip, fp) = (n / base, n % base);
        let mut s = if digits == 0 {
            format!("{ip}")
        } else {
            format!("{ip}.{fp:0width$}", width = digits as usize)
        };
        if neg && n != 0 {
            s.insert(0, '-');
        }
        s
    }
}

fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for QS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}v3", self.b)
        } else {
            write!(f, "{}+{}v3", self.a, self.b)
        }
    }
}

impl fmt::Display for QS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialOrd for QS3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QS3 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, |$x:ident, $y:ident| $body:expr) => {
        impl<'a, 'b> $trait<&'b QS3> for &'a QS3 {
            type Output = QS3;
            fn $method(self, rhs: &'b QS3) -> QS3 {
                let $x = self;
                let $y = rhs;
                $body
            }
        }
        impl $trait<QS3> for QS3 {
            type Output = QS3;
            fn $method(self, rhs: QS3) -> QS3 {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a QS3> for QS3 {
            type Output = QS3;
            fn $method(self, rhs: &'a QS3) -> QS3 {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<QS3> for &'a QS3 {
            type Output = QS3;
            fn $method(self, rhs: QS3) -> QS3 {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QS3 {
    a: &x.a + &y.a,
    b: &x.b + &y.b,
});

forward_binop!(Sub, sub, |x, y| QS3 {
    a: &x.a - &y.a,
    b: &x.b - &y.b,
});

forward_binop!(Mul, mul, |x, y| {
    let three = BigRational::from_integer(BigInt::from(3));
    QS3 {
        a: &x.a * &y.a + &three * &x.b * &y.b,
        b: &x.a * &y.b + &x.b * &y.a,
    }
});

forward_binop!(Div, div, |x, y| x * &y.recip());

impl Neg for &QS3 {
    type Output = QS3;
    fn neg(self) -> QS3 {
        QS3 {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl Neg for QS3 {
    type Output = QS3;
    fn neg(self) -> QS3 {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(an: i64, ad: i64, bn: i64, bd: i64) -> QS3 {
        QS3::from_parts(an, ad, bn, bd)
    }

    #[test]
    fn field_ops_match_floats() {
        let xs = [
            q(0, 1, 0, 1),
            q(1, 2, -1, 3),
            q(-7, 5, 2, 1),
            q(3, 1, -2, 1),
            q(-1, 1, 1, 1),
        ];
        for x in &xs {
            for y in &xs {
                let s = (x + y).to_f64();
                assert!((s - (x.to_f64() + y.to_f64())).abs() < 1e-9);
                let p = (x * y).to_f64();
                assert!((p - (x.to_f64() * y.to_f64())).abs() < 1e-9);
                if !y.is_zero() {
                    let d = (x / y).to_f64();
                    assert!((d - (x.to_f64() / y.to_f64())).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn sign_handles_mixed_coefficients() {
        // 2 - sqrt(3) > 0, 3 - 2 sqrt(3) < 0, 3 - sqrt(3)*sqrt(3) has b=0
        assert_eq!(q(2, 1, -1, 1).sign(), 1);
        assert_eq!(q(3, 1, -2, 1).sign(), -1);
        assert_eq!(q(-2, 1, 1, 1).sign(), -1);
        assert_eq!(q(-3, 1, 2, 1).sign(), 1);
        assert_eq!((QS3::sqrt3() * QS3::sqrt3() - QS3::from_int(3)).sign(), 0);
        // 71/41 < sqrt(3) < 97/56 (continued fraction convergents)
        assert_eq!((QS3::sqrt3() - q(71, 41, 0, 1)).sign(), 1);
        assert_eq!((QS3::sqrt3() - q(97, 56, 0, 1)).sign(), -1);
    }

    #[test]
    fn recip_is_exact() {
        let x = q(-7, 5, 2, 3);
        let y = x.recip();
        assert!((x * y - QS3::one()).is_zero());
    }

    #[test]
    fn floor_respects_exact_bounds() {
        assert_eq!(QS3::sqrt3().floor_i64(), 1);
        assert_eq!((-QS3::sqrt3()).floor_i64(), -2);
        assert_eq!(q(0, 1, 2, 1).floor_i64(), 3); // 2 sqrt 3 = 3.46..
        assert_eq!(QS3::from_int(5).floor_i64(), 5);
        assert_eq!(q(-7, 2, 0, 1).floor_i64(), -4);
    }

    #[test]
    fn decimal_rounds_half_to_even() {
        assert_eq!(QS3::from_ratio(1, 2).to_decimal(0), "0");
        assert_eq!(QS3::from_ratio(3, 2).to_decimal(0), "2");
        assert_eq!(QS3::from_ratio(5, 2).to_decimal(0), "2");
        assert_eq!(QS3::from_ratio(-3, 2).to_decimal(0), "-2");
        assert_eq!(QS3::from_ratio(1, 8).to_decimal(2), "0.12");
        assert_eq!(QS3::from_ratio(3, 8).to_decimal(2), "0.38");
        assert_eq!(QS3::sqrt3().to_decimal(6), "1.732051");
        assert_eq!(QS3::from_int(2).to_decimal(6), "2.000000");
    }
}
