//! Certified rational enclosures of the real constants used as generators
//! of archimedean components, and of real roots of rationals.

use std::cmp::Ordering;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Sign of every point of the interval, if it is uniform.
    pub fn sign(&self) -> Option<Ordering> {
        let zero = BigRational::zero();
        if self.lo > zero {
            Some(Ordering::Greater)
        } else if self.hi < zero {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn scale(&self, k: &BigRational) -> RatInterval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, rhs: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, rhs: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

/// `sum_{k} (-1)^k / ((2k+1) x^(2k+1))` scaled by `scale`, with an upper
/// bound on the absolute error in units of the result.
fn arctan_inv_scaled(x: u32, scale: &BigInt) -> (BigInt, BigInt) {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = scale / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &x2;
        k += 1;
    }
    // each term is off by < 3 units; the neglected tail is < 1 unit
    (sum, BigInt::from(3 * k + 1))
}

/// Enclosure of pi of width at most about `10^-digits`, by Machin's formula
/// evaluated in fixed point with a rigorous error bound.
pub fn pi_enclosure(digits: u32) -> RatInterval {
    let guard = 6;
    let scale = num_traits::pow(BigInt::from(10), (digits + guard) as usize);
    let (a5, e5) = arctan_inv_scaled(5, &scale);
    let (a239, e239) = arctan_inv_scaled(239, &scale);
    let val = BigInt::from(16) * a5 - BigInt::from(4) * a239;
    let err = BigInt::from(16) * e5 + BigInt::from(4) * e239;
    let lo = BigRational::new(&val - &err, scale.clone());
    let hi = BigRational::new(&val + &err, scale);
    RatInterval::new(lo, hi)
}

/// Exact rational `p`-th root of `c`, if one exists.
pub fn exact_rational_root(c: &BigRational, p: u32) -> Option<BigRational> {
    if c.is_zero() {
        return Some(BigRational::zero());
    }
    if c.is_negative() && p.is_multiple_of(2) {
        return None;
    }
    let root_int = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(p);
        (num_traits::pow(r.clone(), p as usize) == n.abs()).then_some(r)
    };
    let n = root_int(c.numer())?;
    let d = root_int(c.denom())?;
    let r = BigRational::new(n, d);
    Some(if c.is_negative() { -r } else { r })
}

/// Enclosure of the real `p`-th root of `c` of width at most `2^-bits`.
/// For even `p` the argument must be non-negative.
pub fn root_enclosure(c: &BigRational, p: u32, bits: u32) -> RatInterval {
    assert!(p >= 1);
    assert!(
        !(c.is_negative() && p.is_multiple_of(2)),
        "even root of a negative number"
    );
    if let Some(r) = exact_rational_root(c, p) {
        return RatInterval::point(r);
    }
    let neg = c.is_negative();
    let a = c.abs();
    // a^(1/p) = (numer * denom^(p-1))^(1/p) / denom
    let den = a.denom().clone();
    let radicand = a.numer() * num_traits::pow(den.clone(), (p - 1) as usize);
    let shift = BigInt::one() << (bits as usize);
    let scaled = radicand * num_traits::pow(shift.clone(), p as usize);
    let r = scaled.nth_root(p);
    let base = den * shift;
    let lo = BigRational::new(r.clone(), base.clone());
    let hi = BigRational::new(r + 1, base);
    if neg {
        RatInterval::new(-hi, -lo)
    } else {
        RatInterval::new(lo, hi)
    }
}

/// The `q`-adic valuation of a nonzero rational.
pub fn padic_valuation(x: &BigRational, q: u64) -> i64 {
    assert!(!x.is_zero());
    let q = BigInt::from(q);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut v = 0i64;
        loop {
            let (d, r) = n.div_rem(&q);
            if r.is_zero() {
                v += 1;
                n = d;
            } else {
                return v;
            }
        }
    };
    count(x.numer()) - count(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pi_is_enclosed() {
        let e = pi_enclosure(3);
        assert!(e.lo > rat(314, 100) && e.hi < rat(315, 100));
        let fine = pi_enclosure(60);
        assert!(fine.width() < rat(1, 1_000_000_000_000));
        // 3.14159265358979323846 lies inside
        let known = BigRational::new(
            BigInt::parse_bytes(b"314159265358979323846", 10).unwrap(),
            num_traits::pow(BigInt::from(10), 20),
        );
        assert!(
            fine.lo < known + rat(1, 1_000_000_000) && fine.hi > rat(31415926535, 10_000_000_000)
        );
    }

    #[test]
    fn roots() {
        assert_eq!(exact_rational_root(&rat(9, 4), 2), Some(rat(3, 2)));
        assert_eq!(exact_rational_root(&rat(-8, 27), 3), Some(rat(-2, 3)));
        assert_eq!(exact_rational_root(&rat(2, 1), 2), None);
        let r = root_enclosure(&rat(2, 1), 2, 30);
        assert!(&r.lo * &r.lo <= rat(2, 1) && &r.hi * &r.hi >= rat(2, 1));
        assert!(r.width() <= rat(1, 1 << 30));
        let m = root_enclosure(&rat(-5, 1), 3, 20);
        assert!(&(&m.lo * &m.lo) * &m.lo <= rat(-5, 1));
    }

    #[test]
    fn padic() {
        assert_eq!(padic_valuation(&rat(12, 5), 2), 2);
        assert_eq!(padic_valuation(&rat(3, 8), 2), -3);
        assert_eq!(padic_valuation(&rat(7, 1), 3), 0);
    }
}
