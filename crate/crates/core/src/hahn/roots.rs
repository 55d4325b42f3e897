use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::HahnSeries;
use crate::error::{Error, Result};
use crate::interval::{exact_rational_root, root_enclosure, RatInterval};
use crate::oag::{add_unchecked, neg_unchecked, GroupElement};
use crate::primes::is_prime;

/// A root known up to its leading coefficient: `y = s · unit` for some real
/// `s` inside `scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnclosedRoot {
    pub scale: RatInterval,
    pub unit: HahnSeries,
}

impl HahnSeries {
    /// Whether `y^p = a` (or `y^p = ±a` when `allow_negation`) has a solution
    /// in `R((G))` for a real closed `R`: the valuation must lie in `pG` and,
    /// for even `p`, the leading coefficient must have the right sign.
    pub fn root_exists(&self, p: u64, allow_negation: bool) -> Result<bool> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let v = self.v_of()?;
        let c = self.leading_coeff()?;
        let sign_ok = p % 2 == 1 || c.is_positive() || allow_negation;
        Ok(sign_ok && self.group.p_divisible(&v, p)?)
    }

    /// Splits `self = c · t^(p·h) · b` with `b` a 1-unit.
    fn root_parts(&self, p: u64) -> Result<(BigRational, GroupElement, HahnSeries)> {
        if !self.root_exists(p, false)? {
            return Err(Error::NoRoot { p });
        }
        let v = self.v_of()?;
        let c = self.leading_coeff()?;
        let h = self.group.divide(&v, p)?.expect("checked divisibility");
        let inv_lead = HahnSeries::monomial(self.group.clone(), c.recip(), neg_unchecked(&v))?;
        let b = self.mul(&inv_lead)?;
        Ok((c, h, b))
    }

    /// `y` with `y^p = self + O(t^cutoff)`, by Hensel lifting of the 1-unit
    /// part. The leading coefficient must be a rational `p`-th power. When
    /// the truncated root is exact, it is returned without truncation.
    pub fn pth_root(&self, p: u64, cutoff: &GroupElement) -> Result<HahnSeries> {
        let (c, h, b) = self.root_parts(p)?;
        let r =
            exact_rational_root(&c, p as u32).ok_or_else(|| Error::InexactRoot(c.to_string()))?;
        let z = self.unit_root(&b, p, cutoff)?;
        HahnSeries::monomial(self.group.clone(), r, h)?.mul(&z)
    }

    /// Like [`pth_root`](Self::pth_root) for any leading coefficient: the
    /// coefficient's root is only enclosed, to `bits` binary digits.
    pub fn pth_root_enclosed(
        &self,
        p: u64,
        cutoff: &GroupElement,
        bits: u32,
    ) -> Result<EnclosedRoot> {
        let (c, h, b) = self.root_parts(p)?;
        let scale = root_enclosure(&c, p as u32, bits);
        let z = self.unit_root(&b, p, cutoff)?;
        let unit = HahnSeries::monomial(self.group.clone(), BigRational::one(), h)?.mul(&z)?;
        Ok(EnclosedRoot { scale, unit })
    }

    /// Root of the 1-unit `b`, modulo `t^(cutoff - v(self))`.
    ///
    /// Hensel lifting one term at a time: if `z` agrees with the root below
    /// `γ` and `b - z^p` leads with `c·t^γ`, adding `(c/p)·t^γ` fixes the
    /// coefficient at `γ`. A root with finite support is reached exactly.
    fn unit_root(&self, b: &HahnSeries, p: u64, cutoff: &GroupElement) -> Result<HahnSeries> {
        const MAX_STEPS: usize = 256;
        let g = self.group.clone();
        let v = self.v_of()?;
        let mut bound = add_unchecked(cutoff, &neg_unchecked(&v));
        if let Some(t) = b.trunc() {
            bound = self.min_elem(Some(bound), Some(t.clone())).unwrap();
        }
        let target = b.truncate(&bound);
        let pq = BigRational::from_integer(BigInt::from(p));
        let mut z = HahnSeries::one(g.clone())?;
        for _ in 0..MAX_STEPS {
            let resid = target.sub(&pow_truncated(&z, p as u32, &bound)?)?;
            let Some((gamma, c)) = resid.terms.first() else {
                if b.is_exact() && z.pow(p as u32)? == *b {
                    return Ok(z);
                }
                return Ok(z.truncate(&bound));
            };
            let step = HahnSeries::monomial(g.clone(), c / &pq, gamma.clone())?;
            z = z.add(&step)?;
        }
        Err(Error::Precision(format!(
            "root not determined below t^{bound} within {MAX_STEPS} terms"
        )))
    }
}

fn pow_truncated(z: &HahnSeries, k: u32, bound: &GroupElement) -> Result<HahnSeries> {
    let mut acc = HahnSeries::one(z.group.clone())?.truncate(bound);
    for _ in 0..k {
        acc = acc.mul(z)?.truncate(bound);
    }
    Ok(acc)
}
