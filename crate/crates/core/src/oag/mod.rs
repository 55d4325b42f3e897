//! Ordered abelian groups given as lexicographic words of components.
//!
//! Component 0 is the most significant: an element is positive iff its first
//! nonzero coordinate is positive. Every suffix of the word is a convex
//! subgroup, so `lex(Z, Q)` has `Q` as its only proper nontrivial convex
//! subgroup.

mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval::{padic_valuation, pi_enclosure, RatInterval};
use crate::primes::{nth_prime, prime_index, PrimeRef, PrimeSet};

pub use parse::parse_group;

/// A generator of a finitely generated archimedean subgroup of the reals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    Rational(BigRational),
    Pi,
}

impl Gen {
    /// Enclosure of the generator's real value, at least `digits` decimal digits tight.
    pub fn enclosure(&self, digits: u32) -> RatInterval {
        match self {
            Gen::Rational(q) => RatInterval::point(q.clone()),
            Gen::Pi => cached_pi(digits),
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Gen::Rational(q) => q.is_positive(),
            Gen::Pi => true,
        }
    }
}

fn cached_pi(digits: u32) -> RatInterval {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, RatInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(digits)
        .or_insert_with(|| pi_enclosure(digits))
        .clone()
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Rational(q) => write!(f, "{q}"),
            Gen::Pi => write!(f, "pi"),
        }
    }
}

/// `|C/pC| = p^e` with `e` possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuotientExponent {
    Finite(u32),
    Infinite,
}

impl QuotientExponent {
    pub const ZERO: QuotientExponent = QuotientExponent::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, QuotientExponent::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            QuotientExponent::Finite(n) => Some(n),
            QuotientExponent::Infinite => None,
        }
    }

    /// `self <= n`
    pub fn at_most(self, n: u32) -> bool {
        matches!(self, QuotientExponent::Finite(e) if e <= n)
    }
}

impl Add for QuotientExponent {
    type Output = QuotientExponent;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (QuotientExponent::Finite(a), QuotientExponent::Finite(b)) => {
                QuotientExponent::Finite(a + b)
            }
            _ => QuotientExponent::Infinite,
        }
    }
}

impl std::iter::Sum for QuotientExponent {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(QuotientExponent::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for QuotientExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientExponent::Finite(n) => write!(f, "{n}"),
            QuotientExponent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for QuotientExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QuotientExponent::Finite(n) => s.serialize_u32(*n),
            QuotientExponent::Infinite => s.serialize_str("inf"),
        }
    }
}

/// One component of a lexicographic word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    /// The integers.
    Zed,
    /// The rationals.
    Rat,
    /// Rationals whose denominator is coprime to the prime `q`.
    LocZ(u64),
    /// The subgroup of the reals generated over the integers by
    /// rationally independent generators.
    FreeReal(Vec<Gen>),
    /// The lexicographic sum of `LocZ(p_k)` over `k >= max(start, 1)`, most
    /// significant summand first. Analysis only.
    OmegaTower { start: u64 },
    /// The polynomials over `LocZ(base)` evaluated at a transcendental real,
    /// as an archimedean subgroup of the reals. Analysis only.
    PolyModule { base: u64, gen: Gen },
}

impl ComponentKind {
    /// Elements can be constructed over this component.
    pub fn is_effective(&self) -> bool {
        !matches!(
            self,
            ComponentKind::OmegaTower { .. } | ComponentKind::PolyModule { .. }
        )
    }

    pub fn is_tower(&self) -> bool {
        matches!(self, ComponentKind::OmegaTower { .. })
    }

    /// Index of the first summand of a tower. Summands are indexed from 1,
    /// so the tower never contains `LocZ(2)`.
    pub fn tower_first(&self) -> Option<u64> {
        match self {
            ComponentKind::OmegaTower { start } => Some((*start).max(1)),
            _ => None,
        }
    }

    /// Primes mentioned by the component; every other prime behaves alike.
    pub fn special_primes(&self) -> BTreeSet<u64> {
        match self {
            ComponentKind::LocZ(q) => [*q].into(),
            ComponentKind::PolyModule { base, .. } => [*base].into(),
            ComponentKind::OmegaTower { .. } => {
                (0..self.tower_first().unwrap()).map(nth_prime).collect()
            }
            _ => BTreeSet::new(),
        }
    }

    /// Primes `p` for which the whole component is `p`-divisible.
    pub fn divisible_primes(&self) -> PrimeSet {
        match self {
            ComponentKind::Zed | ComponentKind::FreeReal(_) => PrimeSet::empty(),
            ComponentKind::Rat => PrimeSet::all(),
            ComponentKind::LocZ(q) | ComponentKind::PolyModule { base: q, .. } => {
                PrimeSet::all_except([*q])
            }
            ComponentKind::OmegaTower { .. } => PrimeSet::Finite(self.special_primes()),
        }
    }

    /// The exponent `e` with `|C/pC| = p^e`.
    pub fn quotient_exponent(&self, p: u64) -> QuotientExponent {
        self.exponent_at(PrimeRef::Exact(p))
    }

    /// Quotient exponent at a concrete prime or at a prime outside
    /// `special_primes`.
    pub fn exponent_at(&self, p: PrimeRef) -> QuotientExponent {
        use QuotientExponent::{Finite, Infinite};
        match self {
            ComponentKind::Zed => Finite(1),
            ComponentKind::Rat => Finite(0),
            ComponentKind::LocZ(q) => Finite((p == PrimeRef::Exact(*q)) as u32),
            ComponentKind::FreeReal(g) => Finite(g.len() as u32),
            ComponentKind::OmegaTower { .. } => match p {
                PrimeRef::Exact(p) => {
                    Finite((prime_index(p) >= self.tower_first().unwrap()) as u32)
                }
                PrimeRef::Generic => Finite(1),
            },
            ComponentKind::PolyModule { base, .. } => {
                if p == PrimeRef::Exact(*base) {
                    Infinite
                } else {
                    Finite(0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let check_prime = |q: u64| {
            if crate::primes::is_prime(q) {
                Ok(())
            } else {
                Err(Error::InvalidComponent(format!("{q} is not prime")))
            }
        };
        match self {
            ComponentKind::LocZ(q) => check_prime(*q),
            ComponentKind::PolyModule { base, gen } => {
                check_prime(*base)?;
                if *gen != Gen::Pi {
                    return Err(Error::InvalidComponent(
                        "poly_module needs a transcendental generator".into(),
                    ));
                }
                Ok(())
            }
            ComponentKind::FreeReal(gens) => {
                if gens.is_empty() {
                    return Err(Error::InvalidComponent(
                        "real() needs at least one generator".into(),
                    ));
                }
                let rationals = gens
                    .iter()
                    .filter(|g| matches!(g, Gen::Rational(_)))
                    .count();
                let pis = gens.len() - rationals;
                if rationals > 1 || pis > 1 {
                    return Err(Error::InvalidComponent(
                        "real() generators must be linearly independent over Q".into(),
                    ));
                }
                if gens
                    .iter()
                    .any(|g| matches!(g, Gen::Rational(q) if q.is_zero()))
                {
                    return Err(Error::InvalidComponent("zero generator".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of flat coordinates an element uses in this component.
    pub fn width(&self) -> usize {
        match self {
            ComponentKind::FreeReal(g) => g.len(),
            _ => 1,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::Zed => write!(f, "Z"),
            ComponentKind::Rat => write!(f, "Q"),
            ComponentKind::LocZ(q) => write!(f, "Zloc({q})"),
            ComponentKind::FreeReal(gens) => {
                let g: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
                write!(f, "real({})", g.join(", "))
            }
            ComponentKind::OmegaTower { start } => write!(f, "omega_tower(start={start})"),
            ComponentKind::PolyModule { base, gen } => {
                write!(f, "poly_module(Zloc({base}), {gen})")
            }
        }
    }
}

/// An ordered abelian group `C_0 ⊕ C_1 ⊕ ... ⊕ C_{n-1}` with the
/// lexicographic order, `C_0` most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexWord {
    pub components: Vec<ComponentKind>,
    pub name: Option<String>,
}

/// One coordinate of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    /// `Zed`, `Rat` and `LocZ` coordinates.
    Scalar(BigRational),
    /// Integer coefficients of the generators of a `FreeReal` component.
    Free(Vec<BigInt>),
}

impl Coord {
    pub fn is_zero(&self) -> bool {
        match self {
            Coord::Scalar(q) => q.is_zero(),
            Coord::Free(v) => v.iter().all(Zero::is_zero),
        }
    }
}

/// An element of a `LexWord`, one coordinate per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub coords: Vec<Coord>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Coord::is_zero)
    }

    /// Coordinates flattened to one rational per slot.
    pub fn flat(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        for c in &self.coords {
            match c {
                Coord::Scalar(q) => out.push(q.clone()),
                Coord::Free(v) => {
                    out.extend(v.iter().map(|n| BigRational::from_integer(n.clone())))
                }
            }
        }
        out
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.flat().iter().map(|q| q.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn sign_of_free(gens: &[Gen], d: &[BigInt]) -> Ordering {
    if d.iter().all(Zero::is_zero) {
        return Ordering::Equal;
    }
    if let Some(o) = sign_of_free_f64(gens, d) {
        return o;
    }
    // generators are independent over Q, so a nonzero combination is a
    // nonzero real and refinement terminates
    let mut digits = 16;
    loop {
        let mut acc = RatInterval::point(BigRational::zero());
        for (g, c) in gens.iter().zip(d) {
            if !c.is_zero() {
                let term = g
                    .enclosure(digits)
                    .scale(&BigRational::from_integer(c.clone()));
                acc = &acc + &term;
            }
        }
        if let Some(s) = acc.sign() {
            return s;
        }
        digits *= 2;
    }
}

/// Sign from a double-precision sum, when the rounding error bound is
/// clearly below its magnitude.
fn sign_of_free_f64(gens: &[Gen], d: &[BigInt]) -> Option<Ordering> {
    let (mut sum, mut mag) = (0f64, 0f64);
    for (g, c) in gens.iter().zip(d) {
        if c.is_zero() {
            continue;
        }
        let gv = match g {
            Gen::Rational(q) => q.to_f64()?,
            Gen::Pi => std::f64::consts::PI,
        };
        let t = c.to_f64()? * gv;
        if !t.is_finite() {
            return None;
        }
        sum += t;
        mag += t.abs();
    }
    let err = mag * 16.0 * f64::EPSILON * (gens.len() as f64 + 1.0);
    (sum.abs() > err && sum.is_finite()).then(|| sum.partial_cmp(&0.0).unwrap_or(Ordering::Equal))
}

impl LexWord {
    pub fn new(components: Vec<ComponentKind>) -> Result<Self> {
        for c in &components {
            c.validate()?;
        }
        if components.is_empty() {
            return Err(Error::InvalidComponent(
                "a word needs at least one component".into(),
            ));
        }
        Ok(LexWord {
            components,
            name: None,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.components.iter().all(ComponentKind::is_effective)
    }

    fn require_effective(&self) -> Result<()> {
        match self.components.iter().position(|c| !c.is_effective()) {
            Some(i) => Err(Error::NonEffective(i)),
            None => Ok(()),
        }
    }

    /// Primes mentioned by any component.
    pub fn special_primes(&self) -> BTreeSet<u64> {
        self.components
            .iter()
            .flat_map(|c| c.special_primes())
            .collect()
    }

    /// The convex subgroup made of components `seg..`, as a word of its own.
    pub fn suffix(&self, seg: usize) -> LexWord {
        LexWord {
            components: self.components[seg..].to_vec(),
            name: None,
        }
    }

    /// Total number of flat coordinates.
    pub fn width(&self) -> usize {
        self.components.iter().map(ComponentKind::width).sum()
    }

    pub fn zero(&self) -> Result<GroupElement> {
        self.require_effective()?;
        let coords = self
            .components
            .iter()
            .map(|c| match c {
                ComponentKind::FreeReal(g) => Coord::Free(vec![BigInt::zero(); g.len()]),
                _ => Coord::Scalar(BigRational::zero()),
            })
            .collect();
        Ok(GroupElement { coords })
    }

    /// Builds an element from its flat coordinate list.
    pub fn element(&self, flat: &[BigRational]) -> Result<GroupElement> {
        self.require_effective()?;
        if flat.len() != self.width() {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                self.width(),
                flat.len()
            )));
        }
        let mut it = flat.iter();
        let mut coords = Vec::with_capacity(self.len());
        for c in &self.components {
            match c {
                ComponentKind::FreeReal(g) => {
                    let mut v = Vec::with_capacity(g.len());
                    for q in it.by_ref().take(g.len()) {
                        if !q.is_integer() {
                            return Err(Error::Shape(format!("{q} is not an integer")));
                        }
                        v.push(q.to_integer());
                    }
                    coords.push(Coord::Free(v));
                }
                _ => coords.push(Coord::Scalar(it.next().unwrap().clone())),
            }
        }
        let e = GroupElement { coords };
        self.validate(&e)?;
        Ok(e)
    }

    /// Convenience constructor from integer pairs `(numerator, denominator)`.
    pub fn element_from(&self, flat: &[(i64, i64)]) -> Result<GroupElement> {
        let v: Vec<BigRational> = flat
            .iter()
            .map(|&(n, d)| BigRational::new(n.into(), d.into()))
            .collect();
        self.element(&v)
    }

    /// Checks that `a` has the shape of this word and that every coordinate
    /// lies in its component.
    pub fn validate(&self, a: &GroupElement) -> Result<()> {
        self.require_effective()?;
        if a.coords.len() != self.len() {
            return Err(Error::Shape(format!(
                "expected {} components, got {}",
                self.len(),
                a.coords.len()
            )));
        }
        for (i, (c, x)) in self.components.iter().zip(&a.coords).enumerate() {
            match (c, x) {
                (ComponentKind::Zed, Coord::Scalar(q)) if !q.is_integer() => {
                    return Err(Error::Shape(format!(
                        "component {i}: {q} is not an integer"
                    )));
                }
                (ComponentKind::LocZ(p), Coord::Scalar(q))
                    if (q.denom() % BigInt::from(*p)).is_zero() =>
                {
                    return Err(Error::Shape(format!(
                        "component {i}: denominator of {q} is divisible by {p}"
                    )));
                }
                (ComponentKind::FreeReal(g), Coord::Free(v)) if v.len() != g.len() => {
                    return Err(Error::Shape(format!(
                        "component {i}: wrong generator count"
                    )));
                }
                (ComponentKind::FreeReal(_), Coord::Free(_)) => {}
                (ComponentKind::FreeReal(_), _) | (_, Coord::Free(_)) => {
                    return Err(Error::Shape(format!(
                        "component {i}: coordinate kind mismatch"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn check_pair(&self, a: &GroupElement, b: &GroupElement) -> Result<()> {
        self.validate(a)?;
        self.validate(b)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_pair(a, b)?;
        Ok(add_unchecked(a, b))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        Ok(neg_unchecked(a))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_pair(a, b)?;
        Ok(sub_unchecked(a, b))
    }

    /// `k · a` for an integer `k`.
    pub fn scale(&self, a: &GroupElement, k: i64) -> Result<GroupElement> {
        self.validate(a)?;
        Ok(scale_unchecked(a, &BigInt::from(k)))
    }

    /// Lexicographic comparison, most significant component first.
    pub fn cmp(&self, a: &GroupElement, b: &GroupElement) -> Result<Ordering> {
        self.check_pair(a, b)?;
        Ok(self.cmp_unchecked(a, b))
    }

    pub(crate) fn cmp_unchecked(&self, a: &GroupElement, b: &GroupElement) -> Ordering {
        for (c, (x, y)) in self.components.iter().zip(a.coords.iter().zip(&b.coords)) {
            let o = match (c, x, y) {
                (_, Coord::Scalar(x), Coord::Scalar(y)) => x.cmp(y),
                (ComponentKind::FreeReal(g), Coord::Free(x), Coord::Free(y)) => {
                    let d: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    sign_of_free(g, &d)
                }
                _ => unreachable!("validated shapes"),
            };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    /// Sign of `a` as an ordering against zero.
    pub(crate) fn sign_unchecked(&self, a: &GroupElement) -> Ordering {
        for (c, x) in self.components.iter().zip(&a.coords) {
            let o = match (c, x) {
                (_, Coord::Scalar(x)) => x.cmp(&BigRational::zero()),
                (ComponentKind::FreeReal(g), Coord::Free(x)) => sign_of_free(g, x),
                _ => unreachable!(),
            };
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }

    /// Whether `a ∈ pG`.
    pub fn p_divisible(&self, a: &GroupElement, p: u64) -> Result<bool> {
        self.validate(a)?;
        if !crate::primes::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let pb = BigInt::from(p);
        Ok(self
            .components
            .iter()
            .zip(&a.coords)
            .all(|(c, x)| match (c, x) {
                (ComponentKind::Zed, Coord::Scalar(q)) => (q.numer() % &pb).is_zero(),
                (ComponentKind::Rat, _) => true,
                (ComponentKind::LocZ(q), Coord::Scalar(x)) => {
                    *q != p || x.is_zero() || padic_valuation(x, *q) >= 1
                }
                (ComponentKind::FreeReal(_), Coord::Free(v)) => {
                    v.iter().all(|n| (n % &pb).is_zero())
                }
                _ => unreachable!(),
            }))
    }

    /// The unique `b` with `p · b = a`, when `a ∈ pG`.
    pub fn divide(&self, a: &GroupElement, p: u64) -> Result<Option<GroupElement>> {
        if !self.p_divisible(a, p)? {
            return Ok(None);
        }
        let pb = BigInt::from(p);
        let coords = a
            .coords
            .iter()
            .map(|x| match x {
                Coord::Scalar(q) => Coord::Scalar(q / BigRational::from_integer(pb.clone())),
                Coord::Free(v) => Coord::Free(v.iter().map(|n| n.div_floor(&pb)).collect()),
            })
            .collect();
        Ok(Some(GroupElement { coords }))
    }

    /// A positive element of component `seg` with all other coordinates zero.
    pub fn unit(&self, seg: usize) -> Result<GroupElement> {
        let mut e = self.zero()?;
        e.coords[seg] = match &self.components[seg] {
            ComponentKind::FreeReal(g) => {
                let mut v = vec![BigInt::zero(); g.len()];
                v[0] = if g[0].is_positive() {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                Coord::Free(v)
            }
            _ => Coord::Scalar(BigRational::one()),
        };
        Ok(e)
    }

    /// Whether all coordinates before `seg` vanish, i.e. `a` lies in the
    /// convex subgroup formed by components `seg..`.
    pub fn in_suffix(&self, a: &GroupElement, seg: usize) -> bool {
        a.coords[..seg].iter().all(Coord::is_zero)
    }

    /// Sign of the coordinate prefix before `seg`, i.e. the sign of the image
    /// of `a` in the quotient by the suffix subgroup.
    pub fn prefix_sign(&self, a: &GroupElement, seg: usize) -> Ordering {
        let head = LexWord {
            components: self.components[..seg].to_vec(),
            name: None,
        };
        let e = GroupElement {
            coords: a.coords[..seg].to_vec(),
        };
        head.sign_unchecked(&e)
    }
}

pub(crate) fn add_unchecked(a: &GroupElement, b: &GroupElement) -> GroupElement {
    let coords = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| match (x, y) {
            (Coord::Scalar(x), Coord::Scalar(y)) => Coord::Scalar(x + y),
            (Coord::Free(x), Coord::Free(y)) => {
                Coord::Free(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            _ => unreachable!("validated shapes"),
        })
        .collect();
    GroupElement { coords }
}

pub(crate) fn neg_unchecked(a: &GroupElement) -> GroupElement {
    let coords = a
        .coords
        .iter()
        .map(|x| match x {
            Coord::Scalar(x) => Coord::Scalar(-x),
            Coord::Free(x) => Coord::Free(x.iter().map(|a| -a).collect()),
        })
        .collect();
    GroupElement { coords }
}

pub(crate) fn sub_unchecked(a: &GroupElement, b: &GroupElement) -> GroupElement {
    let coords = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| match (x, y) {
            (Coord::Scalar(x), Coord::Scalar(y)) => Coord::Scalar(x - y),
            (Coord::Free(x), Coord::Free(y)) => {
                Coord::Free(x.iter().zip(y).map(|(a, b)| a - b).collect())
            }
            _ => unreachable!("validated shapes"),
        })
        .collect();
    GroupElement { coords }
}

pub(crate) fn scale_unchecked(a: &GroupElement, k: &BigInt) -> GroupElement {
    let kq = BigRational::from_integer(k.clone());
    let coords = a
        .coords
        .iter()
        .map(|x| match x {
            Coord::Scalar(q) => Coord::Scalar(q * &kq),
            Coord::Free(v) => Coord::Free(v.iter().map(|n| n * k).collect()),
        })
        .collect();
    GroupElement { coords }
}

impl fmt::Display for LexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "lex({})", parts.join(", "))
    }
}

impl Serialize for LexWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests;
