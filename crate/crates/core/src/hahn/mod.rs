//! Hahn series `R((G))` with finite support and exact rational coefficients.
//!
//! A series may carry a truncation bound `O(t^b)`: its terms at exponents
//! `>= b` are unknown. Every operation propagates the bound so that the
//! stored terms are always correct.

mod parse;
mod roots;
mod sample;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::convex::ConvexCut;
use crate::error::{Error, Result};
use crate::oag::{add_unchecked, neg_unchecked, scale_unchecked, Coord, GroupElement, LexWord};

pub use parse::parse_series;
pub(crate) use parse::series;
pub use roots::EnclosedRoot;
pub use sample::{sample_series, SampleParams};

/// A finite-support Hahn series, possibly truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HahnSeries {
    group: Arc<LexWord>,
    terms: Vec<(GroupElement, BigRational)>,
    trunc: Option<GroupElement>,
}

// Series over different groups never meet in one hash set. Rationals are
// kept reduced, so hashing numerator and denominator is consistent with `Eq`
// and much cheaper than `Ratio`'s own hash.
impl std::hash::Hash for HahnSeries {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        fn rat<H: std::hash::Hasher>(q: &BigRational, state: &mut H) {
            q.numer().hash(state);
            q.denom().hash(state);
        }
        fn elem<H: std::hash::Hasher>(e: &GroupElement, state: &mut H) {
            for c in &e.coords {
                match c {
                    Coord::Scalar(q) => rat(q, state),
                    Coord::Free(v) => v.hash(state),
                }
            }
        }
        self.terms.len().hash(state);
        for (e, c) in &self.terms {
            elem(e, state);
            rat(c, state);
        }
        if let Some(t) = &self.trunc {
            elem(t, state);
        }
    }
}

impl HahnSeries {
    /// Builds a series from arbitrary terms: sorts, merges equal exponents,
    /// drops zero coefficients and everything at or above `trunc`.
    pub fn new(
        group: Arc<LexWord>,
        terms: Vec<(GroupElement, BigRational)>,
        trunc: Option<GroupElement>,
    ) -> Result<Self> {
        for (e, _) in &terms {
            group.validate(e)?;
        }
        if let Some(b) = &trunc {
            group.validate(b)?;
        }
        Ok(Self::normalised(group, terms, trunc))
    }

    fn normalised(
        group: Arc<LexWord>,
        mut terms: Vec<(GroupElement, BigRational)>,
        trunc: Option<GroupElement>,
    ) -> Self {
        terms.sort_by(|a, b| group.cmp_unchecked(&a.0, &b.0));
        let mut merged: Vec<(GroupElement, BigRational)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(e, c)| {
            !c.is_zero()
                && trunc
                    .as_ref()
                    .is_none_or(|b| group.cmp_unchecked(e, b) == Ordering::Less)
        });
        HahnSeries {
            group,
            terms: merged,
            trunc,
        }
    }

    pub fn zero(group: Arc<LexWord>) -> Self {
        HahnSeries {
            group,
            terms: Vec::new(),
            trunc: None,
        }
    }

    pub fn constant(group: Arc<LexWord>, c: BigRational) -> Result<Self> {
        let zero = group.zero()?;
        Ok(Self::normalised(group, vec![(zero, c)], None))
    }

    pub fn one(group: Arc<LexWord>) -> Result<Self> {
        Self::constant(group, BigRational::one())
    }

    /// `c · t^e`
    pub fn monomial(group: Arc<LexWord>, c: BigRational, e: GroupElement) -> Result<Self> {
        group.validate(&e)?;
        Ok(Self::normalised(group, vec![(e, c)], None))
    }

    /// `O(t^b)`: a series known to be zero below `b` and nothing more.
    pub fn big_o(group: Arc<LexWord>, b: GroupElement) -> Result<Self> {
        group.validate(&b)?;
        Ok(HahnSeries {
            group,
            terms: Vec::new(),
            trunc: Some(b),
        })
    }

    pub fn group(&self) -> &Arc<LexWord> {
        &self.group
    }

    pub fn terms(&self) -> &[(GroupElement, BigRational)] {
        &self.terms
    }

    pub fn trunc(&self) -> Option<&GroupElement> {
        self.trunc.as_ref()
    }

    /// The exact zero series.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Forgets the terms at or above `b`.
    pub fn truncate(&self, b: &GroupElement) -> Self {
        let b = match &self.trunc {
            Some(t) if self.group.cmp_unchecked(t, b) == Ordering::Less => t.clone(),
            _ => b.clone(),
        };
        Self::normalised(self.group.clone(), self.terms.clone(), Some(b))
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group.components == other.group.components
        {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    fn min_elem(&self, a: Option<GroupElement>, b: Option<GroupElement>) -> Option<GroupElement> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if self.group.cmp_unchecked(&a, &b) == Ordering::Less {
                a
            } else {
                b
            }),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        let trunc = self.min_elem(self.trunc.clone(), other.trunc.clone());
        Ok(Self::normalised(self.group.clone(), terms, trunc))
    }

    pub fn neg(&self) -> Self {
        HahnSeries {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return HahnSeries {
                group: self.group.clone(),
                terms: Vec::new(),
                trunc: self.trunc.clone(),
            };
        }
        HahnSeries {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// A lower bound for the valuation: the leading exponent, or the
    /// truncation bound of a series with no known terms. `None` for zero.
    fn v_lower(&self) -> Option<&GroupElement> {
        self.terms.first().map(|(e, _)| e).or(self.trunc.as_ref())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(HahnSeries::zero(self.group.clone()));
        }
        if self.terms.is_empty() && other.terms.is_empty() {
            return Err(Error::UnknownLeadingTerm);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                terms.push((add_unchecked(ea, eb), ca * cb));
            }
        }
        let bound = |t: &Option<GroupElement>, other: &HahnSeries| {
            t.as_ref()
                .map(|t| add_unchecked(t, other.v_lower().expect("nonzero")))
        };
        let trunc = self.min_elem(bound(&self.trunc, other), bound(&other.trunc, self));
        Ok(Self::normalised(self.group.clone(), terms, trunc))
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = HahnSeries::one(self.group.clone())?;
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The valuation: the exponent of the leading term.
    pub fn v_of(&self) -> Result<GroupElement> {
        match self.terms.first() {
            Some((e, _)) => Ok(e.clone()),
            None if self.trunc.is_some() => Err(Error::UnknownLeadingTerm),
            None => Err(Error::ZeroSeries("valuation")),
        }
    }

    pub fn leading_coeff(&self) -> Result<BigRational> {
        match self.terms.first() {
            Some((_, c)) => Ok(c.clone()),
            None if self.trunc.is_some() => Err(Error::UnknownLeadingTerm),
            None => Err(Error::ZeroSeries("leading coefficient")),
        }
    }

    /// The inverse, known modulo `O(t^cutoff)` after multiplying back:
    /// `self · b = 1 + O(t^cutoff)`.
    pub fn invert(&self, cutoff: &GroupElement) -> Result<Self> {
        self.group.validate(cutoff)?;
        let g = &self.group;
        let v = self.v_of()?;
        let c = self.leading_coeff()?;
        let lead_inv = HahnSeries::monomial(g.clone(), c.recip(), neg_unchecked(&v))?;
        // self = c t^v (1 + u) with v(u) > 0
        let u = self.mul(&lead_inv)?.sub(&HahnSeries::one(g.clone())?)?;
        if u.is_zero() {
            return Ok(lead_inv);
        }
        let mut bound = add_unchecked(cutoff, &neg_unchecked(&v));
        if let Some(t) = &self.trunc {
            let t = add_unchecked(t, &scale_unchecked(&v, &BigInt::from(-2)));
            if g.cmp_unchecked(&t, &bound) == Ordering::Less {
                bound = t;
            }
        }
        let series = geometric(&u.neg(), &bound)?;
        series.mul(&lead_inv)
    }

    /// The `(coarse, residue)` split at a convex subgroup: `coarse` is the
    /// image of the valuation in `G/Δ`, `residue` the series over `Δ` formed
    /// by the terms sharing the leading term's coarse part.
    pub fn decompose(&self, c: ConvexCut) -> Result<(GroupElement, HahnSeries)> {
        crate::convex::validate_cut(&self.group, c)?;
        if c.inner.is_some() {
            return Err(Error::NonEffective(c.seg));
        }
        let v = self.v_of()?;
        let seg = c.seg;
        let head = GroupElement {
            coords: v.coords[..seg].to_vec(),
        };
        let sub = Arc::new(self.group.suffix(seg));
        let tail = |e: &GroupElement| GroupElement {
            coords: e.coords[seg..].to_vec(),
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.coords[..seg] == head.coords[..])
            .map(|(e, c)| (tail(e), c.clone()))
            .collect();
        let trunc = self
            .trunc
            .as_ref()
            .filter(|t| t.coords[..seg] == head.coords[..])
            .map(tail);
        Ok((head, HahnSeries::normalised(sub, terms, trunc)))
    }
}

/// `1 + x + x^2 + ...` modulo `O(t^bound)`, for `v(x) > 0`.
fn geometric(x: &HahnSeries, bound: &GroupElement) -> Result<HahnSeries> {
    const MAX_TERMS: usize = 256;
    let g = x.group.clone();
    let mut sum = HahnSeries::one(g.clone())?.truncate(bound);
    let mut power = HahnSeries::one(g)?.truncate(bound);
    for _ in 0..MAX_TERMS {
        power = power.mul(x)?.truncate(bound);
        if power.terms.is_empty() {
            return Ok(sum);
        }
        sum = sum.add(&power)?;
    }
    Err(Error::Precision(format!(
        "geometric series does not reach t^{bound} within {MAX_TERMS} terms"
    )))
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && self.trunc.is_none() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if e.is_zero() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "t^{e}")?;
            } else {
                write!(f, "{a}*t^{e}")?;
            }
        }
        if let Some(b) = &self.trunc {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(t^{b})")?;
        }
        Ok(())
    }
}

/// A Hahn field `R((G))` together with the precision used for inversions and
/// root extraction.
#[derive(Clone, Debug)]
pub struct HahnField {
    pub group: Arc<LexWord>,
    pub cutoff: GroupElement,
}

impl HahnField {
    /// Precision `O(t^(k·u))` for the positive unit `u` of the most
    /// significant component.
    pub fn new(group: LexWord, k: i64) -> Result<Self> {
        let cutoff = group.scale(&group.unit(0)?, k)?;
        Ok(HahnField {
            group: Arc::new(group),
            cutoff,
        })
    }

    pub fn zero(&self) -> HahnSeries {
        HahnSeries::zero(self.group.clone())
    }

    pub fn one(&self) -> HahnSeries {
        HahnSeries::one(self.group.clone()).expect("effective group")
    }

    pub fn constant(&self, c: BigRational) -> HahnSeries {
        HahnSeries::constant(self.group.clone(), c).expect("effective group")
    }

    pub fn monomial(&self, c: BigRational, e: GroupElement) -> Result<HahnSeries> {
        HahnSeries::monomial(self.group.clone(), c, e)
    }

    pub fn parse(&self, text: &str) -> Result<HahnSeries> {
        parse_series(&self.group, text)
    }
}

#[cfg(test)]
mod tests;
