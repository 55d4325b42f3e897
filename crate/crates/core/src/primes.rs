//! Primes, finite-or-cofinite prime sets, and maps that are constant on all
//! but finitely many primes.
//!
//! Every "for all primes" question asked by this crate is answered through
//! these types: a value group only ever mentions finitely many primes
//! explicitly, so any per-prime quantity is determined by its values at
//! those primes plus one value shared by every other prime.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

/// Trial-division primality test; the primes this crate handles are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime `p_k` in the enumeration `p_0 = 2 < p_1 = 3 < p_2 = 5 < ...`.
pub fn nth_prime(k: u64) -> u64 {
    let mut seen = 0u64;
    let mut n = 1u64;
    loop {
        n += 1;
        if is_prime(n) {
            if seen == k {
                return n;
            }
            seen += 1;
        }
    }
}

/// Index of `p` in the prime enumeration, so `nth_prime(prime_index(p)) == p`.
///
/// Panics if `p` is not prime.
pub fn prime_index(p: u64) -> u64 {
    assert!(is_prime(p), "{p} is not prime");
    (2..p).filter(|&n| is_prime(n)).count() as u64
}

/// First `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    (0..count as u64).map(nth_prime).collect()
}

/// A set of primes that is either finite or cofinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrimeSet {
    /// Exactly the listed primes.
    Finite(BTreeSet<u64>),
    /// Every prime except the listed ones.
    Cofinite(BTreeSet<u64>),
}

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet::Finite(BTreeSet::new())
    }

    pub fn all() -> Self {
        PrimeSet::Cofinite(BTreeSet::new())
    }

    pub fn of<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        PrimeSet::Finite(primes.into_iter().collect())
    }

    pub fn all_except<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        PrimeSet::Cofinite(primes.into_iter().collect())
    }

    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimeSet::Finite(s) => s.contains(&p),
            PrimeSet::Cofinite(s) => !s.contains(&p),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PrimeSet::Finite(s) if s.is_empty())
    }

    pub fn is_all(&self) -> bool {
        matches!(self, PrimeSet::Cofinite(s) if s.is_empty())
    }

    pub fn complement(&self) -> Self {
        match self {
            PrimeSet::Finite(s) => PrimeSet::Cofinite(s.clone()),
            PrimeSet::Cofinite(s) => PrimeSet::Finite(s.clone()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use PrimeSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.union(b).copied().collect()),
            (Cofinite(a), Cofinite(b)) => Cofinite(a.intersection(b).copied().collect()),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => {
                Cofinite(c.difference(f).copied().collect())
            }
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    /// The explicitly listed primes (members when finite, exclusions when cofinite).
    pub fn listed(&self) -> &BTreeSet<u64> {
        match self {
            PrimeSet::Finite(s) | PrimeSet::Cofinite(s) => s,
        }
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<u64>| {
            s.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            PrimeSet::Finite(s) if s.is_empty() => write!(f, "none"),
            PrimeSet::Finite(s) => write!(f, "{{{}}}", list(s)),
            PrimeSet::Cofinite(s) if s.is_empty() => write!(f, "all"),
            PrimeSet::Cofinite(s) => write!(f, "all except {{{}}}", list(s)),
        }
    }
}

impl Serialize for PrimeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A prime argument to a symbolic computation: either a concrete prime or
/// "any prime outside the special set" of the group at hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeRef {
    Exact(u64),
    Generic,
}

impl PrimeRef {
    pub fn exact(self) -> Option<u64> {
        match self {
            PrimeRef::Exact(p) => Some(p),
            PrimeRef::Generic => None,
        }
    }
}

/// A function on primes that takes the `generic` value everywhere except at
/// the finitely many primes listed in `special`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeMap<T> {
    pub special: BTreeMap<u64, T>,
    pub generic: T,
}

impl<T> PrimeMap<T> {
    /// Evaluates `f` at every special prime and once generically.
    pub fn build<F: FnMut(PrimeRef) -> T>(specials: &BTreeSet<u64>, mut f: F) -> Self {
        let special = specials
            .iter()
            .map(|&p| (p, f(PrimeRef::Exact(p))))
            .collect();
        PrimeMap {
            special,
            generic: f(PrimeRef::Generic),
        }
    }

    pub fn get(&self, p: u64) -> &T {
        self.special.get(&p).unwrap_or(&self.generic)
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, mut f: F) -> PrimeMap<U> {
        PrimeMap {
            special: self.special.iter().map(|(&p, v)| (p, f(v))).collect(),
            generic: f(&self.generic),
        }
    }

    /// Primes at which the predicate holds, as a finite-or-cofinite set.
    pub fn primes_where<F: FnMut(&T) -> bool>(&self, mut pred: F) -> PrimeSet {
        if pred(&self.generic) {
            PrimeSet::all_except(
                self.special
                    .iter()
                    .filter(|(_, v)| !pred(v))
                    .map(|(&p, _)| p),
            )
        } else {
            PrimeSet::of(
                self.special
                    .iter()
                    .filter(|(_, v)| pred(v))
                    .map(|(&p, _)| p),
            )
        }
    }
}

impl<T: Clone + PartialEq> PrimeMap<T> {
    /// Groups primes by value. Pieces are disjoint and cover every prime;
    /// the piece holding the generic value comes last.
    pub fn partition(&self) -> Vec<(PrimeSet, T)> {
        let mut values: Vec<T> = Vec::new();
        for v in self.special.values() {
            if *v != self.generic && !values.contains(v) {
                values.push(v.clone());
            }
        }
        let mut out: Vec<(PrimeSet, T)> = values
            .into_iter()
            .map(|v| (self.primes_where(|x| *x == v), v))
            .collect();
        out.push((
            self.primes_where(|x| *x == self.generic),
            self.generic.clone(),
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_enumeration() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(prime_index(2), 0);
        assert_eq!(prime_index(13), 5);
        assert!(!is_prime(1) && !is_prime(9) && is_prime(97));
    }

    #[test]
    fn set_algebra() {
        let a = PrimeSet::of([2, 3]);
        let b = PrimeSet::all_except([3, 5]);
        assert_eq!(a.union(&b), PrimeSet::all_except([5]));
        assert_eq!(a.intersection(&b), PrimeSet::of([2]));
        assert_eq!(b.complement(), PrimeSet::of([3, 5]));
        assert!(a.intersection(&a.complement()).is_empty());
        assert!(b.union(&b.complement()).is_all());
        assert_eq!(b.to_string(), "all except {3,5}");
    }

    #[test]
    fn map_partition_covers_everything() {
        let specials: BTreeSet<u64> = [2, 3, 7].into_iter().collect();
        let m = PrimeMap::build(&specials, |p| match p {
            PrimeRef::Exact(2) => 1,
            PrimeRef::Exact(3) => 0,
            _ => 0,
        });
        let parts = m.partition();
        assert_eq!(
            parts,
            vec![(PrimeSet::of([2]), 1), (PrimeSet::all_except([2]), 0)]
        );
    }
}
