//! Exact arithmetic in a real quadratic field `Q(√D)`.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `a + b√d` with rational `a`, `b` and square-free `d > 1`.
///
/// Values with `b = 0` are plain rationals and combine with any field; mixing two
/// irrational values from different fields panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: BigRational,
    b: BigRational,
    d: u64,
}

/// Bits of fixed-point precision used for floors and `f64` conversion.
const FIXED_BITS: usize = 128;

impl QuadraticNumber {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        assert!(
            d > 1 && squarefree_part(d) == d,
            "radicand {d} must be square-free and > 1"
        );
        Self { a, b, d }
    }

    pub fn rational(a: BigRational, d: u64) -> Self {
        Self::new(a, BigRational::zero(), d)
    }

    pub fn int(v: i64, d: u64) -> Self {
        Self::rational(BigRational::from_integer(v.into()), d)
    }

    pub fn frac(num: i64, den: i64, d: u64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()), d)
    }

    /// `√d` itself.
    pub fn sqrt_d(d: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a - b√d`.
    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d,
        }
    }

    /// Field norm `a² - d b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.into())
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of a² and d b² wins.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.into());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `value · 2^FIXED_BITS` up to an error below 2 units.
    fn fixed(&self) -> BigInt {
        let scale = BigInt::one() << FIXED_BITS;
        let a = (self.a.numer() * &scale).div_floor(self.a.denom());
        if self.b.is_zero() {
            return a;
        }
        let num = self.b.numer().abs();
        let root = (&num * &num * BigInt::from(self.d) * &scale * &scale).sqrt() / self.b.denom();
        if self.b.numer().sign() == Sign::Minus {
            a - root
        } else {
            a + root
        }
    }

    fn fixed_to_f64(x: &BigInt) -> f64 {
        // Keep 64 significant bits before the final rounding.
        let bits = x.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (x >> drop as usize).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi((drop - FIXED_BITS as i64) as i32)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        self.floor_with_fixed(&self.fixed())
    }

    fn floor_with_fixed(&self, x: &BigInt) -> BigInt {
        let n: BigInt = x >> FIXED_BITS;
        let frac: BigInt = x - (&n << FIXED_BITS);
        let margin = BigInt::from(4);
        if frac >= margin && frac <= (BigInt::one() << FIXED_BITS) - &margin {
            return n;
        }
        let mut n = n;
        loop {
            let rest = self - &Self::rational(BigRational::from_integer(n.clone()), self.d);
            if rest.signum() == Ordering::Less {
                n -= 1;
            } else if (rest - Self::int(1, self.d)).signum() != Ordering::Less {
                n += 1;
            } else {
                return n;
            }
        }
    }

    /// Representative in `[0, 1)` together with the subtracted integer.
    pub fn reduce_mod_one(&self) -> (Self, BigInt) {
        let (r, n, _) = self.reduce_mod_one_approx();
        (r, n)
    }

    /// As [`reduce_mod_one`](Self::reduce_mod_one), plus an accurate `f64` of the result.
    pub fn reduce_mod_one_approx(&self) -> (Self, BigInt, f64) {
        let x = self.fixed();
        let n = self.floor_with_fixed(&x);
        let approx = Self::fixed_to_f64(&(x - (&n << FIXED_BITS))).clamp(0.0, 1.0 - f64::EPSILON / 2.0);
        let r = if n.is_zero() {
            self.clone()
        } else {
            self - &Self::rational(BigRational::from_integer(n.clone()), self.d)
        };
        (r, n, approx)
    }

    /// Accurate to roughly `f64` precision even when `a` and `b√d` nearly cancel.
    pub fn to_f64(&self) -> f64 {
        if self.b.is_zero() {
            return self.a.to_f64().unwrap_or(f64::NAN);
        }
        Self::fixed_to_f64(&self.fixed())
    }

    pub fn recip(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in Q(√{})", self.d);
        Self {
            a: &self.a / &n,
            b: -&self.b / &n,
            d: self.d,
        }
    }

    fn field(&self, other: &Self) -> u64 {
        if self.d == other.d || other.b.is_zero() {
            self.d
        } else if self.b.is_zero() {
            other.d
        } else {
            panic!("mixed quadratic fields √{} and √{}", self.d, other.d)
        }
    }
}

/// Square-free part of `n` (product of primes with odd exponent).
pub fn squarefree_part(mut n: u64) -> u64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * n
}

/// Largest `s` with `s² | n`.
pub fn square_factor(n: u64) -> u64 {
    let sf = squarefree_part(n);
    let q = n / sf;
    let s = (q as f64).sqrt().round() as u64;
    debug_assert_eq!(s * s, q);
    s
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a QuadraticNumber> for &'a QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &'a QuadraticNumber) -> QuadraticNumber {
                let f: fn(&QuadraticNumber, &QuadraticNumber) -> QuadraticNumber = $body;
                f(self, rhs)
            }
        }
        impl $tr<QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: QuadraticNumber) -> QuadraticNumber {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $method(self, rhs: &'a QuadraticNumber) -> QuadraticNumber {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QuadraticNumber {
    a: &x.a + &y.a,
    b: &x.b + &y.b,
    d: x.field(y)
});
forward_binop!(Sub, sub, |x, y| QuadraticNumber {
    a: &x.a - &y.a,
    b: &x.b - &y.b,
    d: x.field(y)
});
forward_binop!(Mul, mul, |x, y| {
    let d = x.field(y);
    let dd = BigRational::from_integer(d.into());
    QuadraticNumber {
        a: &x.a * &y.a + &x.b * &y.b * dd,
        b: &x.a * &y.b + &x.b * &y.a,
        d,
    }
});
forward_binop!(Div, div, |x, y| x * &y.recip());

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Mul<i64> for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, k: i64) -> QuadraticNumber {
        let k = BigRational::from_integer(k.into());
        QuadraticNumber {
            a: &self.a * &k,
            b: &self.b * &k,
            d: self.d,
        }
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt({})", self.b, self.d);
        }
        let (op, b) = if self.b.is_negative() {
            ("-", -&self.b)
        } else {
            ("+", self.b.clone())
        };
        write!(f, "{} {op} {}*sqrt({})", self.a, b, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> QuadraticNumber {
        (QuadraticNumber::int(1, 5) + QuadraticNumber::sqrt_d(5)) / QuadraticNumber::int(2, 5)
    }

    #[test]
    fn golden_ratio_identities() {
        let g = golden();
        assert_eq!(&g * &g, &g + &QuadraticNumber::int(1, 5));
        assert_eq!(g.recip(), &g - &QuadraticNumber::int(1, 5));
        assert!((g.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(g.floor(), BigInt::from(1));
    }

    #[test]
    fn ordering_and_floor_near_cancellation() {
        // F_42·γ - F_43 = -γ^-42, about -1.7e-9; both floor and f64 must see the sign.
        let (f42, f43) = (267_914_296_i64, 433_494_437_i64);
        let x = &golden() * f42 - QuadraticNumber::int(f43, 5);
        let expected = -(1.0f64 / 1.618_033_988_749_895f64).powi(42);
        assert!((x.to_f64() - expected).abs() < 1e-22);
        assert_eq!(x.floor(), BigInt::from(-1));
        assert!(x < QuadraticNumber::int(0, 5));
        let (r, n) = x.reduce_mod_one();
        assert_eq!(n, BigInt::from(-1));
        assert!(r.to_f64() > 0.999_999);
    }

    #[test]
    fn squarefree_helpers() {
        assert_eq!(squarefree_part(20), 5);
        assert_eq!(square_factor(20), 2);
        assert_eq!(squarefree_part(45), 5);
        assert_eq!(squarefree_part(7), 7);
    }
}
