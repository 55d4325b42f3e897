use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HahnSeries;
use crate::error::Result;
use crate::oag::{ComponentKind, GroupElement, LexWord};

/// Shape of randomly sampled series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleParams {
    /// Maximum number of terms.
    pub support: usize,
    /// Bound on exponent numerators.
    pub exponent: i64,
    /// Bound on coefficient numerators.
    pub coeff: i64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            support: 3,
            exponent: 3,
            coeff: 5,
        }
    }
}

fn small_rational(rng: &mut ChaCha8Rng, bound: i64, avoid: Option<u64>) -> BigRational {
    let n = rng.gen_range(-bound..=bound);
    let mut d: i64 = rng.gen_range(1..=4);
    if avoid.is_some_and(|q| (d as u64).is_multiple_of(q)) {
        d = 1;
    }
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A random element with coordinates bounded by `bound`.
pub(crate) fn sample_element(
    w: &LexWord,
    rng: &mut ChaCha8Rng,
    bound: i64,
) -> Result<GroupElement> {
    let mut flat = Vec::with_capacity(w.width());
    for c in &w.components {
        match c {
            ComponentKind::Rat => flat.push(small_rational(rng, bound, None)),
            ComponentKind::LocZ(q) => flat.push(small_rational(rng, bound, Some(*q))),
            _ => {
                for _ in 0..c.width() {
                    flat.push(BigRational::from_integer(
                        rng.gen_range(-bound..=bound).into(),
                    ));
                }
            }
        }
    }
    w.element(&flat)
}

/// A deterministic pseudo-random nonzero series with at most
/// `params.support` terms.
pub fn sample_series(group: &Arc<LexWord>, seed: u64, params: SampleParams) -> Result<HahnSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(1..=params.support.max(1));
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let e = sample_element(group, &mut rng, params.exponent)?;
            let mut num = 0;
            while num == 0 {
                num = rng.gen_range(-params.coeff..=params.coeff);
            }
            let den: i64 = rng.gen_range(1..=3);
            terms.push((e, BigRational::new(num.into(), den.into())));
        }
        let s = HahnSeries::normalised(group.clone(), terms, None);
        if !s.is_zero() {
            return Ok(s);
        }
    }
}
