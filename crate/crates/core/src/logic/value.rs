use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hahn::HahnSeries;
use crate::oag::{GroupElement, LexWord};

/// An element of the fraction field of finitely supported series. Quotients
/// stay exact, so valuations and leading coefficients never depend on a
/// truncated inverse.
#[derive(Clone, Debug)]
pub(crate) struct Val {
    num: HahnSeries,
    den: HahnSeries,
}

fn is_one(s: &HahnSeries) -> bool {
    s.is_exact() && s.terms().len() == 1 && s.terms()[0].0.is_zero() && s.terms()[0].1.is_one()
}

impl Val {
    pub fn of(s: HahnSeries) -> Result<Val> {
        let den = HahnSeries::one(s.group().clone())?;
        Ok(Val { num: s, den })
    }

    pub fn group(&self) -> &LexWord {
        self.num.group()
    }

    fn make(num: HahnSeries, den: HahnSeries) -> Result<Val> {
        // clear monomial denominators
        if den.is_exact() && den.terms().len() == 1 && !is_one(&den) {
            let (e, c) = &den.terms()[0];
            let inv = HahnSeries::monomial(den.group().clone(), c.recip(), den.group().neg(e)?)?;
            return Val::of(num.mul(&inv)?);
        }
        Ok(Val { num, den })
    }

    pub fn add(&self, o: &Val) -> Result<Val> {
        if self.den == o.den {
            return Val::make(self.num.add(&o.num)?, self.den.clone());
        }
        let num = self.num.mul(&o.den)?.add(&o.num.mul(&self.den)?)?;
        Val::make(num, self.den.mul(&o.den)?)
    }

    pub fn neg(&self) -> Val {
        Val {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Val) -> Result<Val> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Val) -> Result<Val> {
        Val::make(self.num.mul(&o.num)?, self.den.mul(&o.den)?)
    }

    /// `None` when dividing by zero.
    pub fn div(&self, o: &Val) -> Result<Option<Val>> {
        if o.is_zero()? {
            return Ok(None);
        }
        Val::make(self.num.mul(&o.den)?, self.den.mul(&o.num)?).map(Some)
    }

    pub fn pow(&self, k: u32) -> Result<Val> {
        Val::make(self.num.pow(k)?, self.den.pow(k)?)
    }

    pub fn is_zero(&self) -> Result<bool> {
        if !self.num.terms().is_empty() {
            Ok(false)
        } else if self.num.is_exact() {
            Ok(true)
        } else {
            Err(Error::UnknownLeadingTerm)
        }
    }

    pub fn v(&self) -> Result<GroupElement> {
        if is_one(&self.den) {
            return self.num.v_of();
        }
        // both valuations come from series over this group
        Ok(crate::oag::sub_unchecked(
            &self.num.v_of()?,
            &self.den.v_of()?,
        ))
    }

    pub fn lead(&self) -> Result<BigRational> {
        Ok(self.num.leading_coeff()? / self.den.leading_coeff()?)
    }

    /// Whether `y^p = self` (or `y^p = ±self`) is solvable in `R((G))`.
    pub fn root_exists(&self, p: u64, allow_negation: bool) -> Result<bool> {
        if self.is_zero()? {
            return Ok(true);
        }
        let sign_ok = p % 2 == 1 || allow_negation || self.lead()? > BigRational::zero();
        Ok(sign_ok && self.group().p_divisible(&self.v()?, p)?)
    }

    /// The value as a series, dividing to precision `cutoff` if needed.
    pub fn to_series(&self, cutoff: &GroupElement) -> Result<HahnSeries> {
        if is_one(&self.den) {
            Ok(self.num.clone())
        } else {
            self.num.mul(&self.den.invert(cutoff)?)
        }
    }
}
