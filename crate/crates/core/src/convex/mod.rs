//! The chain of convex subgroups of a lexicographic word.
//!
//! A cut marks where a suffix of the word begins; the suffix is the convex
//! subgroup. Inside an `OmegaTower` there is one cut before each summand, so
//! the chain is infinite but every question asked about it here is answered
//! in closed form.
//!
//! Statements "for every prime" are evaluated with [`PrimeMap`]: once at each
//! prime the word or the cuts mention, and once at a generic prime standing
//! for all the others.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oag::{ComponentKind, LexWord, QuotientExponent};
use crate::primes::{is_prime, nth_prime, prime_index, PrimeMap, PrimeRef, PrimeSet};

/// A convex subgroup, given by the position where its suffix begins.
///
/// `seg = 0, inner = None` is the whole group, `seg = len` the trivial one.
/// `inner = Some(m)` is only used inside a tower and means the suffix starts
/// at the summand with prime index `m`. The derived order puts deeper
/// (smaller) subgroups later.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ConvexCut {
    pub seg: usize,
    pub inner: Option<u64>,
}

impl ConvexCut {
    pub const TOP: ConvexCut = ConvexCut {
        seg: 0,
        inner: None,
    };

    pub fn seg(seg: usize) -> Self {
        ConvexCut { seg, inner: None }
    }

    pub fn bottom(w: &LexWord) -> Self {
        ConvexCut::seg(w.len())
    }

    /// The cut before tower summand `m` of component `seg`, normalised so
    /// that a cut above the first summand is the plain component cut.
    pub fn inner(w: &LexWord, seg: usize, m: u64) -> Result<Self> {
        let first = w
            .components
            .get(seg)
            .and_then(ComponentKind::tower_first)
            .ok_or_else(|| Error::InvalidCut(format!("component {seg} is not a tower")))?;
        Ok(if m <= first {
            ConvexCut::seg(seg)
        } else {
            ConvexCut {
                seg,
                inner: Some(m),
            }
        })
    }

    pub fn is_top(&self) -> bool {
        *self == ConvexCut::TOP
    }

    pub fn is_bottom(&self, w: &LexWord) -> bool {
        *self == ConvexCut::bottom(w)
    }

    /// Human-readable name: `Top`, `Bottom`, `cut{seg=1}` or
    /// `cut{seg=0,inner=3}`.
    pub fn label(&self, w: &LexWord) -> String {
        if self.is_top() {
            "Top".into()
        } else if self.is_bottom(w) {
            "Bottom".into()
        } else {
            match self.inner {
                None => format!("cut{{seg={}}}", self.seg),
                Some(m) => format!("cut{{seg={},inner={m}}}", self.seg),
            }
        }
    }
}

/// Checks that `c` names a cut of `w` in normal form.
pub fn validate_cut(w: &LexWord, c: ConvexCut) -> Result<()> {
    if c.seg > w.len() {
        return Err(Error::InvalidCut(format!("segment {} past the end", c.seg)));
    }
    if let Some(m) = c.inner {
        let first = w
            .components
            .get(c.seg)
            .and_then(ComponentKind::tower_first)
            .ok_or_else(|| Error::InvalidCut(format!("component {} is not a tower", c.seg)))?;
        if m <= first {
            return Err(Error::InvalidCut(format!(
                "inner({m}) is the component cut itself"
            )));
        }
    }
    Ok(())
}

/// The next deeper cut. `None` for Bottom.
pub fn lower_neighbour(w: &LexWord, c: ConvexCut) -> Option<ConvexCut> {
    if c.is_bottom(w) {
        return None;
    }
    match (c.inner, w.components[c.seg].tower_first()) {
        (Some(m), _) => Some(ConvexCut {
            seg: c.seg,
            inner: Some(m + 1),
        }),
        (None, Some(first)) => Some(ConvexCut {
            seg: c.seg,
            inner: Some(first + 1),
        }),
        (None, None) => Some(ConvexCut::seg(c.seg + 1)),
    }
}

/// The next shallower cut. `None` for Top and for a cut lying directly below
/// a tower, which is a limit of the tower's cuts.
pub fn upper_neighbour(w: &LexWord, c: ConvexCut) -> Option<ConvexCut> {
    match c.inner {
        Some(m) => Some(ConvexCut::inner(w, c.seg, m - 1).expect("tower")),
        None if c.seg == 0 => None,
        None if w.components[c.seg - 1].is_tower() => None,
        None => Some(ConvexCut::seg(c.seg - 1)),
    }
}

/// Lazy walk down the chain of cuts, from Top.
///
/// With no limit, a tower that is not last keeps the walk inside it forever.
/// With `Some(k)`, at most `k` inner cuts of each tower are produced.
pub struct Cuts<'a> {
    word: &'a LexWord,
    next: Option<ConvexCut>,
    limit: Option<u64>,
}

impl Iterator for Cuts<'_> {
    type Item = ConvexCut;

    fn next(&mut self) -> Option<ConvexCut> {
        let c = self.next?;
        let mut succ = lower_neighbour(self.word, c);
        if let (
            Some(k),
            Some(ConvexCut {
                seg,
                inner: Some(m),
            }),
        ) = (self.limit, succ)
        {
            let first = self.word.components[seg].tower_first().unwrap();
            if m - first > k {
                succ = Some(ConvexCut::seg(seg + 1));
            }
        }
        self.next = succ;
        Some(c)
    }
}

pub fn convex_cuts(w: &LexWord) -> Cuts<'_> {
    Cuts {
        word: w,
        next: Some(ConvexCut::TOP),
        limit: None,
    }
}

/// Like [`convex_cuts`], keeping `per_tower` inner cuts of each tower. The
/// result is finite and ends with Bottom.
pub fn convex_cuts_bounded(w: &LexWord, per_tower: u64) -> Vec<ConvexCut> {
    Cuts {
        word: w,
        next: Some(ConvexCut::TOP),
        limit: Some(per_tower),
    }
    .collect()
}

/// A stretch of the word between two cuts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Piece {
    Component(usize),
    /// Tower summands with prime index in `[from, to)`.
    TowerRange {
        seg: usize,
        from: u64,
        to: Option<u64>,
    },
}

fn pieces(w: &LexWord, low: ConvexCut, high: ConvexCut) -> Vec<Piece> {
    let mut out = Vec::new();
    if high.seg == low.seg {
        if let Some(to) = low.inner {
            let first = w.components[high.seg].tower_first().unwrap();
            out.push(Piece::TowerRange {
                seg: high.seg,
                from: high.inner.unwrap_or(first),
                to: Some(to),
            });
        }
        return out;
    }
    match high.inner {
        Some(m) => out.push(Piece::TowerRange {
            seg: high.seg,
            from: m,
            to: None,
        }),
        None => out.push(Piece::Component(high.seg)),
    }
    out.extend((high.seg + 1..low.seg).map(Piece::Component));
    if let Some(m) = low.inner {
        let first = w.components[low.seg].tower_first().unwrap();
        out.push(Piece::TowerRange {
            seg: low.seg,
            from: first,
            to: Some(m),
        });
    }
    out
}

fn piece_exponent(w: &LexWord, piece: Piece, p: PrimeRef) -> QuotientExponent {
    match piece {
        Piece::Component(j) => w.components[j].exponent_at(p),
        Piece::TowerRange { seg, from, to } => {
            let first = w.components[seg].tower_first().unwrap();
            let inside = match p {
                PrimeRef::Exact(p) => {
                    let k = prime_index(p);
                    k >= first.max(from) && to.is_none_or(|t| k < t)
                }
                // a generic prime lies beyond every index the cuts mention
                PrimeRef::Generic => to.is_none(),
            };
            QuotientExponent::Finite(inside as u32)
        }
    }
}

fn piece_divisible_primes(w: &LexWord, piece: Piece) -> PrimeSet {
    match piece {
        Piece::Component(j) => w.components[j].divisible_primes(),
        Piece::TowerRange { seg, from, to } => {
            let first = w.components[seg].tower_first().unwrap().max(from);
            match to {
                None => PrimeSet::of((0..first).map(nth_prime)),
                Some(t) => PrimeSet::all_except((first..t).map(nth_prime)),
            }
        }
    }
}

fn check_order(w: &LexWord, low: ConvexCut, high: ConvexCut, strict: bool) -> Result<()> {
    validate_cut(w, low)?;
    validate_cut(w, high)?;
    if low < high || (strict && low == high) {
        return Err(Error::Precondition(format!(
            "{} must be {}deeper than {}",
            low.label(w),
            if strict { "strictly " } else { "" },
            high.label(w)
        )));
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Primes at which a question about `w` and `cuts` can behave differently
/// from a generic prime.
pub fn special_primes_for(w: &LexWord, cuts: &[ConvexCut]) -> BTreeSet<u64> {
    let mut s = w.special_primes();
    for c in cuts {
        if let Some(m) = c.inner {
            s.extend((0..=m).map(nth_prime));
        }
    }
    s
}

pub(crate) fn segment_exponent(
    w: &LexWord,
    low: ConvexCut,
    high: ConvexCut,
    p: PrimeRef,
) -> QuotientExponent {
    pieces(w, low, high)
        .into_iter()
        .map(|pc| piece_exponent(w, pc, p))
        .sum()
}

/// The exponent `e` with `|high/low : p| = p^e`, for `low` at or below `high`.
pub fn quotient_exponent(
    w: &LexWord,
    low: ConvexCut,
    high: ConvexCut,
    p: u64,
) -> Result<QuotientExponent> {
    check_prime(p)?;
    check_order(w, low, high, false)?;
    Ok(segment_exponent(w, low, high, PrimeRef::Exact(p)))
}

/// `n_p`: the exponent of `G/pG`.
pub fn n_p(w: &LexWord, p: u64) -> Result<QuotientExponent> {
    quotient_exponent(w, ConvexCut::bottom(w), ConvexCut::TOP, p)
}

pub(crate) fn n_p_at(w: &LexWord, p: PrimeRef) -> QuotientExponent {
    segment_exponent(w, ConvexCut::bottom(w), ConvexCut::TOP, p)
}

/// `n_p` for every prime.
pub fn n_p_map(w: &LexWord) -> PrimeMap<QuotientExponent> {
    PrimeMap::build(&w.special_primes(), |p| n_p_at(w, p))
}

/// Primes `p` for which the subgroup at `c` is `p`-divisible.
pub fn suffix_divisible_primes(w: &LexWord, c: ConvexCut) -> Result<PrimeSet> {
    validate_cut(w, c)?;
    Ok(pieces(w, ConvexCut::bottom(w), c)
        .into_iter()
        .fold(PrimeSet::all(), |acc, pc| {
            acc.intersection(&piece_divisible_primes(w, pc))
        }))
}

/// A cut that may depend on the prime it is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutRule {
    Fixed(ConvexCut),
    /// Inside the tower at `seg`, just below the summand of the prime:
    /// `inner(index(p) + 1)`.
    TowerTail {
        seg: usize,
    },
}

impl CutRule {
    pub fn resolve(&self, w: &LexWord, p: u64) -> ConvexCut {
        match *self {
            CutRule::Fixed(c) => c,
            CutRule::TowerTail { seg } => {
                ConvexCut::inner(w, seg, prime_index(p) + 1).expect("tower")
            }
        }
    }

    pub fn fixed(&self) -> Option<ConvexCut> {
        match self {
            CutRule::Fixed(c) => Some(*c),
            CutRule::TowerTail { .. } => None,
        }
    }

    pub fn label(&self, w: &LexWord) -> String {
        match self {
            CutRule::Fixed(c) => c.label(w),
            CutRule::TowerTail { seg } => format!("cut{{seg={seg},inner=k+1}} at p = p_k"),
        }
    }
}

/// `G_(p,n)` as a rule: the largest convex subgroup `H` with `|H/pH| <= p^n`.
pub(crate) fn g_pn_at(w: &LexWord, p: PrimeRef, n: u32) -> CutRule {
    let mut e = QuotientExponent::ZERO;
    for j in (0..w.len()).rev() {
        let comp = &w.components[j];
        let step = comp.exponent_at(p);
        if (e + step).at_most(n) {
            e = e + step;
            continue;
        }
        // a tower adds its exponent through a single summand, the one of p
        return if comp.is_tower() {
            CutRule::TowerTail { seg: j }
        } else {
            CutRule::Fixed(ConvexCut::seg(j + 1))
        };
    }
    CutRule::Fixed(ConvexCut::TOP)
}

/// `G_(p,n)`, the largest convex subgroup `H` with `|H/pH| <= p^n`.
pub fn g_pn(w: &LexWord, p: u64, n: u32) -> Result<ConvexCut> {
    check_prime(p)?;
    Ok(g_pn_at(w, PrimeRef::Exact(p), n).resolve(w, p))
}

/// `G_p`, the largest convex `p`-divisible subgroup.
pub fn max_p_divisible(w: &LexWord, p: u64) -> Result<ConvexCut> {
    g_pn(w, p, 0)
}

/// `G_p` for every prime.
pub fn max_p_divisible_map(w: &LexWord) -> PrimeMap<CutRule> {
    PrimeMap::build(&w.special_primes(), |p| g_pn_at(w, p, 0))
}

/// `G_0`, the largest convex divisible subgroup.
pub fn max_divisible(w: &LexWord) -> ConvexCut {
    match w
        .components
        .iter()
        .rposition(|c| !c.divisible_primes().is_all())
    {
        Some(j) => ConvexCut::seg(j + 1),
        None => ConvexCut::TOP,
    }
}

/// Primes `p` with `G_p = G_0`.
pub fn thm_condition_prime(w: &LexWord) -> PrimeSet {
    let g0 = max_divisible(w);
    max_p_divisible_map(w).primes_where(|r| *r == CutRule::Fixed(g0))
}

/// Whether every `G/pG` is finite.
pub fn is_dp_minimal(w: &LexWord) -> bool {
    n_p_map(w).primes_where(|e| !e.is_finite()).is_empty()
}

pub(crate) fn is_p_regular_at(w: &LexWord, low: ConvexCut, high: ConvexCut, p: PrimeRef) -> bool {
    let mut ps = pieces(w, low, high);
    // the deepest piece may be skipped when it is archimedean: no cut lies
    // inside it
    match ps.last().copied() {
        Some(Piece::Component(j)) if !w.components[j].is_tower() => {
            ps.pop();
        }
        Some(Piece::TowerRange {
            seg,
            from,
            to: Some(t),
        }) => {
            ps.pop();
            if t - 1 > from {
                ps.push(Piece::TowerRange {
                    seg,
                    from,
                    to: Some(t - 1),
                });
            }
        }
        _ => {}
    }
    ps.into_iter()
        .all(|pc| piece_exponent(w, pc, p) == QuotientExponent::ZERO)
}

/// Whether `high/low` is `p`-regular: its quotient by every nonzero convex
/// subgroup is `p`-divisible.
pub fn is_p_regular(w: &LexWord, low: ConvexCut, high: ConvexCut, p: u64) -> Result<bool> {
    check_prime(p)?;
    check_order(w, low, high, true)?;
    Ok(is_p_regular_at(w, low, high, PrimeRef::Exact(p)))
}

/// How a certificate witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `low ⊊ target ⊊ high` with a `p`-regular quotient.
    Straddle,
    /// Target is the trivial subgroup: `low = {0}` and `high = G_p ≠ {0}`,
    /// which is `p`-divisible.
    BottomDivisible,
}

/// One piece of a certificate: a witness pair for every prime in `primes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub primes: PrimeSet,
    pub low: ConvexCut,
    pub high: CutRule,
    pub convention: Convention,
}

/// Evidence that the convex subgroup at `target` is not definable: for every
/// prime a regular quotient straddling it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub target: ConvexCut,
    pub entries: Vec<CertificateEntry>,
}

impl Certificate {
    /// The witness pair `(low, high)` used at `p`.
    pub fn witness(&self, w: &LexWord, p: u64) -> (ConvexCut, ConvexCut, Convention) {
        let e = self
            .entries
            .iter()
            .find(|e| e.primes.contains(p))
            .expect("entries cover all primes");
        (e.low, e.high.resolve(w, p), e.convention)
    }

    /// Re-checks the witness at `p` from scratch.
    pub fn holds_at(&self, w: &LexWord, p: u64) -> bool {
        let (low, high, conv) = self.witness(w, p);
        let straddles = low >= self.target && high < self.target;
        let strict_low = conv == Convention::BottomDivisible || low > self.target;
        let regular = is_p_regular(w, low, high, p).unwrap_or(false);
        let divisible = conv == Convention::Straddle
            || suffix_divisible_primes(w, high).is_ok_and(|s| s.contains(p));
        straddles && strict_low && regular && divisible
    }
}

type Witness = Option<(ConvexCut, CutRule, Convention)>;

/// A certificate of non-definability for the cut `c`, or `None` when some
/// prime admits no witness.
pub fn non_definability_certificate(w: &LexWord, c: ConvexCut) -> Result<Option<Certificate>> {
    validate_cut(w, c)?;
    if c.is_top() {
        return Ok(None);
    }
    let bottom = ConvexCut::bottom(w);
    let upper = upper_neighbour(w, c);
    let specials = special_primes_for(w, &[c]);
    let witnesses: PrimeMap<Witness> = PrimeMap::build(&specials, |p| {
        if c == bottom {
            let gp = g_pn_at(w, p, 0);
            return (gp != CutRule::Fixed(bottom)).then_some((
                bottom,
                gp,
                Convention::BottomDivisible,
            ));
        }
        let low = lower_neighbour(w, c).expect("not bottom");
        match upper {
            Some(u) => (segment_exponent(w, c, u, p) == QuotientExponent::ZERO).then_some((
                low,
                CutRule::Fixed(u),
                Convention::Straddle,
            )),
            // directly below a tower: its tail above the summand of p is p-divisible
            None => Some((
                low,
                CutRule::TowerTail { seg: c.seg - 1 },
                Convention::Straddle,
            )),
        }
    });
    if witnesses.special.values().any(Option::is_none) || witnesses.generic.is_none() {
        return Ok(None);
    }
    let entries = witnesses
        .partition()
        .into_iter()
        .map(|(primes, wit)| {
            let (low, high, convention) = wit.unwrap();
            CertificateEntry {
                primes,
                low,
                high,
                convention,
            }
        })
        .collect();
    Ok(Some(Certificate { target: c, entries }))
}

/// One value of the map `(p, n) -> G_(p,n)` with all the labels producing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefinableFamily {
    pub rule: CutRule,
    pub labels: Vec<PnLabel>,
}

/// The pairs `(p, n)` with `p` in `primes` and `n_lo <= n <= n_hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PnLabel {
    pub primes: PrimeSet,
    pub n_lo: u32,
    pub n_hi: u32,
}

impl fmt::Display for PnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = if self.primes.is_all() {
            "p".to_string()
        } else {
            format!("p in {}", self.primes)
        };
        if self.n_lo == self.n_hi {
            write!(f, "({p},{})", self.n_lo)
        } else {
            write!(f, "({p},{}..{})", self.n_lo, self.n_hi)
        }
    }
}

/// Largest `n` worth asking about at `p`: `n_p` when finite, otherwise one
/// past the sum of the finite exponents, beyond which `G_(p,n)` is constant.
fn n_range_at(w: &LexWord, p: PrimeRef) -> u32 {
    match n_p_at(w, p) {
        QuotientExponent::Finite(n) => n,
        QuotientExponent::Infinite => {
            w.components
                .iter()
                .filter_map(|c| c.exponent_at(p).finite())
                .sum::<u32>()
                + 1
        }
    }
}

/// The image of `(p, n) -> G_(p,n)` over all primes `p` and `0 <= n <= n_p`,
/// grouped by value.
pub fn definable_families(w: &LexWord) -> Vec<DefinableFamily> {
    let specials = w.special_primes();
    let table: PrimeMap<Vec<CutRule>> = PrimeMap::build(&specials, |p| {
        (0..=n_range_at(w, p)).map(|n| g_pn_at(w, p, n)).collect()
    });
    let max_n = std::iter::once(&table.generic)
        .chain(table.special.values())
        .map(Vec::len)
        .max()
        .unwrap();
    let mut families: Vec<DefinableFamily> = Vec::new();
    for n in 0..max_n as u32 {
        let at_n = table.map(|v| v.get(n as usize).copied());
        for (primes, rule) in at_n.partition() {
            let Some(rule) = rule else { continue };
            let fam = match families.iter_mut().find(|f| f.rule == rule) {
                Some(f) => f,
                None => {
                    families.push(DefinableFamily {
                        rule,
                        labels: Vec::new(),
                    });
                    families.last_mut().unwrap()
                }
            };
            match fam
                .labels
                .iter_mut()
                .find(|l| l.primes == primes && l.n_hi + 1 == n)
            {
                Some(l) => l.n_hi = n,
                None => fam.labels.push(PnLabel {
                    primes,
                    n_lo: n,
                    n_hi: n,
                }),
            }
        }
    }
    // deepest first
    families.sort_by_key(|f| {
        std::cmp::Reverse(match f.rule {
            CutRule::Fixed(c) => (c.seg, c.inner.is_some(), c.inner.unwrap_or(0)),
            CutRule::TowerTail { seg } => (seg, true, u64::MAX),
        })
    });
    families
}

/// The `(p, n)` labels under which the concrete cut `c` is `G_(p,n)`, as
/// `(primes, n)` pairs with `n` explicit.
pub fn labels_of(w: &LexWord, c: ConvexCut) -> Vec<(PrimeSet, u32)> {
    let mut out: Vec<(PrimeSet, u32)> = Vec::new();
    for fam in definable_families(w) {
        for l in fam.labels {
            let primes = match fam.rule {
                CutRule::Fixed(f) if f == c => l.primes.clone(),
                CutRule::Fixed(_) => PrimeSet::empty(),
                CutRule::TowerTail { seg } => match c.inner {
                    Some(m) if c.seg == seg => {
                        let p = nth_prime(m - 1);
                        if l.primes.contains(p) {
                            PrimeSet::of([p])
                        } else {
                            PrimeSet::empty()
                        }
                    }
                    _ => PrimeSet::empty(),
                },
            };
            if primes.is_empty() {
                continue;
            }
            for n in l.n_lo..=l.n_hi {
                match out.iter_mut().find(|(_, m)| *m == n) {
                    Some((s, _)) => *s = s.union(&primes),
                    None => out.push((primes.clone(), n)),
                }
            }
        }
    }
    out.sort_by_key(|(_, n)| *n);
    out
}

/// Whether `c` is `G_(p,n)` for some prime `p` and `n <= n_p`.
pub fn in_definable_image(w: &LexWord, c: ConvexCut) -> bool {
    !labels_of(w, c).is_empty()
}

#[cfg(test)]
mod tests;
