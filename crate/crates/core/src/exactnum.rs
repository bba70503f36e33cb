//! Exact rational coefficients.
//!
//! [`Rational`] is a thin newtype over [`num_rational::BigRational`], which
//! keeps every value reduced with a positive denominator after each
//! operation. The wrapper adds the textual literal forms used by the parser
//! (`-3`, `5/6`, `1.25`) and turns division by zero into an error.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Builds `num/den`, reducing to lowest terms.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::one().checked_div(self)
    }

    pub fn pow(&self, e: u32) -> Rational {
        Rational(num_traits::pow(self.0.clone(), e as usize))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Positive rational `g` such that every value divided by `g` is an
    /// integer and the resulting integers are coprime. `None` if all are zero.
    pub fn content<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        let mut any = false;
        for v in values {
            if v.is_zero() {
                continue;
            }
            any = true;
            num_gcd = num_gcd.gcd(v.numer());
            den_lcm = den_lcm.lcm(v.denom());
        }
        any.then(|| Rational(BigRational::new(num_gcd, den_lcm)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(q: BigRational) -> Self {
        Rational(q)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `[+-]digits`, `[+-]digits/digits` or `[+-]digits.digits`.
/// Whitespace inside a literal is rejected.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLiteral(s.to_string());
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let value = if let Some((n, d)) = body.split_once('/') {
            if !digits(n) || !digits(d) {
                return Err(bad());
            }
            let den: BigInt = d.parse().map_err(|_| bad())?;
            Rational::new(n.parse::<BigInt>().map_err(|_| bad())?, den)?
        } else if let Some((int, frac)) = body.split_once('.') {
            if !digits(int) || !digits(frac) {
                return Err(bad());
            }
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            Rational::new(num, scale)?
        } else {
            if !digits(body) {
                return Err(bad());
            }
            Rational::from_int(body.parse::<BigInt>().map_err(|_| bad())?)
        };
        Ok(if negative { -value } else { value })
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $assign_tr<&Rational> for Rational {
            fn $assign(&mut self, rhs: &Rational) {
                self.0.$assign(&rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn add_fractions() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
    }

    #[test]
    fn normalizes_on_construction() {
        let r = Rational::new(2, 4).unwrap();
        assert_eq!(r.numer(), &BigInt::from(1));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(Rational::new(0, -7).unwrap(), Rational::zero());
        assert_eq!(Rational::new(3, -6).unwrap().to_string(), "-1/2");
    }

    #[test]
    fn large_products_are_exact() {
        let big = q("10000000000000000000000000000000000000000");
        let product = &big * &big;
        assert_eq!(product.to_string(), format!("1{}", "0".repeat(80)));
        // the same identity at small scale, via repeated addition
        let small = Rational::from(37);
        let mut acc = Rational::zero();
        for _ in 0..37 {
            acc += &small;
        }
        assert_eq!(acc, &small * &small);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(q("3").checked_div(&Rational::zero()), Err(Error::DivisionByZero)));
        assert!(Rational::new(1, 0).is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn literal_forms() {
        assert_eq!(q("-3"), Rational::from(-3));
        assert_eq!(q("1.25"), q("5/4"));
        assert_eq!(q("-0.5"), q("-1/2"));
        assert_eq!(q("+7/14"), q("1/2"));
        for bad in ["", "1 /2", "1/ 2", "a", "1.", ".5", "1/2/3", "--1"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn content_of_mixed_values() {
        let vals = [q("6/5"), q("-9/10"), q("0")];
        assert_eq!(Rational::content(vals.iter()), Some(q("3/10")));
        assert_eq!(Rational::content([Rational::zero()].iter()), None);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (any::<i128>(), 1i128..=i128::MAX)
            .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)).unwrap())
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a - &a, Rational::zero());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.recip().unwrap(), Rational::one());
            }
        }

        #[test]
        fn display_parse_round_trip(a in arb_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
