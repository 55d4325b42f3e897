use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::HahnSeries;
use crate::error::Result;
use crate::oag::{GroupElement, LexWord};
use crate::syntax::Cursor;

/// Parses a series literal such as `1 + 2*t^(1,1/2) - t^(2,0) + O(t^(3,0))`.
/// Exponents list the flat coordinates of a group element.
pub fn parse_series(group: &Arc<LexWord>, text: &str) -> Result<HahnSeries> {
    let mut cur = Cursor::new(text);
    let s = series(group, &mut cur)?;
    cur.expect_end()?;
    Ok(s)
}

pub(crate) fn series(group: &Arc<LexWord>, cur: &mut Cursor) -> Result<HahnSeries> {
    let mut terms = Vec::new();
    let mut trunc: Option<GroupElement> = None;
    let mut negative = cur.eat("-");
    loop {
        if cur.eat("O(") {
            let b = monomial_exponent(group, cur)?;
            cur.expect(")")?;
            trunc = match trunc {
                Some(t) if group.cmp(&t, &b)?.is_lt() => Some(t),
                _ => Some(b),
            };
        } else {
            let (e, mut c) = term(group, cur)?;
            if negative {
                c = -c;
            }
            terms.push((e, c));
        }
        if cur.eat("+") {
            negative = false;
        } else if cur.eat("-") {
            negative = true;
        } else {
            break;
        }
    }
    HahnSeries::new(group.clone(), terms, trunc)
}

fn term(group: &Arc<LexWord>, cur: &mut Cursor) -> Result<(GroupElement, BigRational)> {
    if cur.peek() == Some('t') {
        return Ok((monomial_exponent(group, cur)?, BigRational::one()));
    }
    let c = cur.rational()?;
    if cur.eat("*") {
        Ok((monomial_exponent(group, cur)?, c))
    } else {
        Ok((group.zero()?, c))
    }
}

fn monomial_exponent(group: &LexWord, cur: &mut Cursor) -> Result<GroupElement> {
    if !cur.eat("t") {
        return cur.error("expected `t^(...)`");
    }
    cur.expect("^")?;
    cur.expect("(")?;
    let mut flat = Vec::new();
    loop {
        flat.push(cur.rational()?);
        if cur.eat(")") {
            break;
        }
        cur.expect(",")?;
    }
    group.element(&flat)
}
