//! Arbitrary-precision rationals with an inline `i128` fast path.
//!
//! Every value is kept in lowest terms with a positive denominator. A value is
//! stored inline iff its numerator and denominator both fit in `i128` (and the
//! numerator is not `i128::MIN`); otherwise it lives in a [`BigRational`].
//! Because that choice is a function of the value alone, the derived `Eq` and
//! `Hash` are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: i128, den: i128 },
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar(Repr);

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if a <= 1 {
        return if a == 0 { b } else { 1 };
    }
    // One hardware division first: operands here are often far apart in size.
    b %= a;
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// A single 128-bit remainder when the smaller operand fits in 64 bits,
/// otherwise binary GCD until it does.
fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if a == 0 {
        return b;
    }
    if a <= u64::MAX as u128 {
        return gcd_u64(a as u64, (b % a) as u64) as u128;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
        if b <= u64::MAX as u128 {
            // Both odd parts remain; the common power of two is `shift`.
            return (gcd_u64(b as u64, (a % b) as u64) as u128) << shift;
        }
    }
}

pub(super) fn gcd_i128(a: i128, b: i128) -> i128 {
    // Callers guarantee neither operand is i128::MIN.
    let (a, b) = (a.unsigned_abs(), b.unsigned_abs());
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        gcd_u64(a as u64, b as u64) as i128
    } else {
        gcd_u128(a, b) as i128
    }
}

/// `x / g` for a positive divisor `g` of `x`, avoiding 128-bit division.
///
/// Exact division by an odd number is multiplication by its inverse modulo
/// `2^128`; powers of two are shifted out first.
fn div_exact(x: i128, g: i128) -> i128 {
    debug_assert!(g > 0 && x % g == 0);
    if g == 1 {
        x
    } else if let (Ok(x), Ok(g)) = (i64::try_from(x), i64::try_from(g)) {
        (x / g) as i128
    } else {
        let tz = g.trailing_zeros();
        let odd = (g >> tz) as u128;
        // Newton iteration doubles the number of correct low bits each round.
        let mut inv = odd;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(odd.wrapping_mul(inv)));
        }
        ((x >> tz) as u128).wrapping_mul(inv) as i128
    }
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        ExactScalar(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        ExactScalar(Repr::Small { num: n as i128, den: 1 })
    }

    /// `num / den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::small_or_big(num as i128, den as i128)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i128(), r.denom().to_i128()) {
            (Some(num), Some(den)) if num != i128::MIN => ExactScalar(Repr::Small { num, den }),
            _ => ExactScalar(Repr::Big(Box::new(r))),
        }
    }

    fn small_or_big(num: i128, den: i128) -> Self {
        if num == i128::MIN || den == i128::MIN {
            return Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)));
        }
        if num == 0 {
            return Self::zero();
        }
        let g = gcd_i128(num, den);
        let (mut num, mut den) = (div_exact(num, g), div_exact(den, g));
        if den < 0 {
            num = -num;
            den = -den;
        }
        ExactScalar(Repr::Small { num, den })
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(r) => (**r).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small { num: 1, den: 1 })
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    /// Numerator and denominator when stored inline.
    pub(crate) fn as_small(&self) -> Option<(i128, i128)> {
        match self.0 {
            Repr::Small { num, den } => Some((num, den)),
            Repr::Big(_) => None,
        }
    }

    /// `num / den` for any nonzero `den`, reduced.
    pub(crate) fn from_i128_ratio(num: i128, den: i128) -> Self {
        Self::small_or_big(num, den)
    }

    pub fn square(&self) -> Self {
        if let Repr::Small { num, den } = self.0 {
            // A reduced fraction stays reduced when squared.
            if let (Some(n), Some(d)) = (num.checked_mul(num), den.checked_mul(den)) {
                return ExactScalar(Repr::Small { num: n, den: d });
            }
        }
        self * self
    }

    /// `sum_i a_i * b_i`, reduced once at the end when everything fits inline.
    pub fn dot<'a>(pairs: impl IntoIterator<Item = (&'a ExactScalar, &'a ExactScalar)> + Clone) -> Self {
        let mut num: i128 = 0;
        let mut den: i128 = 1;
        let mut inline = || -> Option<Self> {
            for (a, b) in pairs.clone() {
                let (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) = (&a.0, &b.0)
                else {
                    return None;
                };
                if *an == 0 || *bn == 0 {
                    continue;
                }
                let (pn, pd) = match (
                    i64::try_from(*an),
                    i64::try_from(*ad),
                    i64::try_from(*bn),
                    i64::try_from(*bd),
                ) {
                    // Products of 64-bit operands cannot overflow 128 bits.
                    (Ok(an), Ok(ad), Ok(bn), Ok(bd)) => {
                        (an as i128 * bn as i128, ad as i128 * bd as i128)
                    }
                    _ => (an.checked_mul(*bn)?, ad.checked_mul(*bd)?),
                };
                if pd == den {
                    num = num.checked_add(pn)?;
                } else {
                    let g = gcd_i128(pd, den);
                    let (pg, dg) = (div_exact(pd, g), div_exact(den, g));
                    num = num.checked_mul(pg)?.checked_add(pn.checked_mul(dg)?)?;
                    den = den.checked_mul(pg)?;
                }
            }
            Some(Self::small_or_big(num, den))
        };
        if let Some(r) = inline() {
            return r;
        }
        pairs.into_iter().map(|(a, b)| a * b).sum()
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self, Error> {
        match &self.0 {
            Repr::Small { num: 0, .. } => Err(Error::DivisionByZero),
            Repr::Small { num, den } => Ok(Self::small_or_big(*den, *num)),
            Repr::Big(r) => Ok(Self::from_big(r.as_ref().recip())),
        }
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Result<Self, Error> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.square();
            }
        }
        Ok(acc)
    }

    /// `(1/3)^k`.
    pub fn third_pow(k: u32) -> Self {
        Self::new(1, 3).pow(k as i32).expect("nonzero base")
    }

    /// Approximate value. Only for display and sampling weights.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(r) => {
                // Scale into range before dividing so tiny/huge values survive.
                let nb = r.numer().bits() as i64;
                let db = r.denom().bits() as i64;
                let shift = nb - db;
                let (n, d) = if shift > 0 {
                    (r.numer().clone(), r.denom() << (shift as usize))
                } else {
                    (r.numer() << ((-shift) as usize), r.denom().clone())
                };
                let q = n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN);
                q * 2f64.powi(shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
            }
        }
    }

    fn add_small(a: i128, b: i128, c: i128, d: i128) -> Option<Self> {
        if b == d {
            let n = a.checked_add(c)?;
            return Some(Self::small_or_big(n, b));
        }
        let g = gcd_i128(b, d);
        if g == 1 {
            let n = a.checked_mul(d)?.checked_add(c.checked_mul(b)?)?;
            let den = b.checked_mul(d)?;
            return Some(Self::reduced_small(n, den));
        }
        let (bg, dg) = (div_exact(b, g), div_exact(d, g));
        let n = a.checked_mul(dg)?.checked_add(c.checked_mul(bg)?)?;
        if n == 0 {
            return Some(Self::zero());
        }
        let g2 = gcd_i128(n, g);
        let den = bg.checked_mul(div_exact(d, g2))?;
        Some(Self::reduced_small(div_exact(n, g2), den))
    }

    fn mul_small(a: i128, b: i128, c: i128, d: i128) -> Option<Self> {
        if a == 0 || c == 0 {
            return Some(Self::zero());
        }
        if b == 1 && a == 1 {
            return Some(ExactScalar(Repr::Small { num: c, den: d }));
        }
        if d == 1 && c == 1 {
            return Some(ExactScalar(Repr::Small { num: a, den: b }));
        }
        let g1 = gcd_i128(a, d);
        let g2 = gcd_i128(c, b);
        let n = div_exact(a, g1).checked_mul(div_exact(c, g2))?;
        let den = div_exact(b, g2).checked_mul(div_exact(d, g1))?;
        Some(Self::reduced_small(n, den))
    }

    /// Already in lowest terms with `den > 0`.
    fn reduced_small(num: i128, den: i128) -> Self {
        if num == i128::MIN {
            return Self::from_big(BigRational::new_raw(BigInt::from(num), BigInt::from(den)));
        }
        if num == 0 {
            return Self::zero();
        }
        ExactScalar(Repr::Small { num, den })
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactScalar {
    fn from(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if *a == 0 {
                return rhs.clone();
            }
            if *c == 0 {
                return self.clone();
            }
            if let Some(r) = ExactScalar::add_small(*a, *b, *c, *d) {
                return r;
            }
        }
        ExactScalar::from_big(self.to_big() + rhs.to_big())
    }
}

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        *self = &*self + rhs;
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if let Some(r) = ExactScalar::mul_small(*a, *b, *c, *d) {
                return r;
            }
        }
        ExactScalar::from_big(self.to_big() * rhs.to_big())
    }
}

impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    /// Panics on division by zero; use [`ExactScalar::recip`] to handle it.
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        self * &rhs.recip().expect("division by zero")
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match &self.0 {
            Repr::Small { num, den } => ExactScalar(Repr::Small { num: -num, den: *den }),
            Repr::Big(r) => ExactScalar::from_big(-(**r).clone()),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &ExactScalar) -> ExactScalar { (&self).$m(rhs) }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a ExactScalar> for ExactScalar {
    fn sum<I: Iterator<Item = &'a ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| &acc + x)
    }
}

impl Product for ExactScalar {
    fn product<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::one(), |acc, x| &acc * &x)
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &other.0) {
            if b == d {
                return a.cmp(c);
            }
            if let (Some(l), Some(r)) = (a.checked_mul(*d), c.checked_mul(*b)) {
                return l.cmp(&r);
            }
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Always `num/den`, including integers (`1/1`).
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `n`, `n/d`, or a plain decimal such as `0.001` or `1e-6`.
impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse {
            token: s.to_string(),
            position: 0,
            reason: "expected an integer, a fraction n/d, or a decimal".into(),
        };
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Self::from_bigints(n, d);
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Self::from(n));
        }
        // Decimal with optional exponent, converted exactly.
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if frac_part.chars().any(|c| !c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let scale = exp - frac_part.len() as i32;
        let ten = Self::from_integer(10);
        Ok(&Self::from(n) * &ten.pow(scale)?)
    }
}

/// `x / g` when `g > 0` divides `x`.
fn div_if_divisible(x: i128, g: i128) -> Option<i128> {
    if x == i128::MIN {
        return None;
    }
    let q = div_exact(x, g);
    (q.checked_mul(g) == Some(x)).then_some(q)
}

/// A running sum of scalars kept over one common denominator and reduced
/// only when read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Tally {
    num: i128,
    den: i128,
    /// Terms that did not fit the common denominator.
    rest: ExactScalar,
}

impl Default for Tally {
    fn default() -> Self {
        Tally { num: 0, den: 1, rest: ExactScalar::zero() }
    }
}

impl Tally {
    pub(crate) fn add(&mut self, x: &ExactScalar) {
        if let Some((c, d)) = x.as_small() {
            if self.try_add(c, d).is_some() {
                return;
            }
        }
        self.rest += x;
    }

    fn try_add(&mut self, c: i128, d: i128) -> Option<()> {
        if d == self.den {
            self.num = self.num.checked_add(c)?;
        } else if d > self.den {
            let f = div_if_divisible(d, self.den)?;
            self.num = self.num.checked_mul(f)?.checked_add(c)?;
            self.den = d;
        } else {
            let f = div_if_divisible(self.den, d)?;
            self.num = self.num.checked_add(c.checked_mul(f)?)?;
        }
        Some(())
    }

    pub(crate) fn value(&self) -> ExactScalar {
        &ExactScalar::from_i128_ratio(self.num, self.den) + &self.rest
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_exact_matches_division() {
        let big = 3i128.pow(30) * 7;
        for g in [3i128, 6, 7, 21, 3i128.pow(40), 2 * 3i128.pow(41), 1 << 70] {
            let x = (big * (g >> g.trailing_zeros())) << g.trailing_zeros();
            assert_eq!(div_exact(x, g), x / g, "{x} / {g}");
            assert_eq!(div_exact(-x, g), -x / g);
        }
        assert_eq!(div_if_divisible(3i128.pow(60), 3i128.pow(45)), Some(3i128.pow(15)));
        assert_eq!(div_if_divisible(3i128.pow(60) + 1, 3i128.pow(45)), None);
        assert_eq!(div_if_divisible(1 << 100, 3), None);
    }

    #[test]
    fn gcd_agrees_with_euclid() {
        fn euclid(a: u128, b: u128) -> u128 {
            if b == 0 { a } else { euclid(b, a % b) }
        }
        let xs = [0u128, 1, 2, 6, 81, 3u128.pow(54), 2u128.pow(90) * 9, u64::MAX as u128 * 5, 12345678901234567890123];
        for &a in &xs {
            for &b in &xs {
                assert_eq!(gcd_u128(a, b), euclid(a, b), "gcd({a}, {b})");
            }
        }
    }

    #[test]
    fn tally_sums_exactly() {
        let terms = [
            ExactScalar::third_pow(4),
            ExactScalar::new(2, 3),
            ExactScalar::third_pow(60),
            ExactScalar::new(1, 2),
            ExactScalar::third_pow(90),
            ExactScalar::new(-5, 7),
        ];
        let mut tally = Tally::default();
        let mut plain = ExactScalar::zero();
        for t in &terms {
            tally.add(t);
            plain += t;
            assert_eq!(tally.value(), plain);
        }
    }
}
