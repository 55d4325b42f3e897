use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::{ring_member, v_p_descriptor, v_pn_descriptor, ValuationDescriptor};
use crate::convex::n_p;
use crate::error::{Error, Result};
use crate::hahn::{sample_series, HahnField, HahnSeries, SampleParams};
use crate::logic::{
    build_phi_p, build_phi_pn, choose_params, phi_clause_on, psi_pn_clauses, Assignment,
    EvalOutcome, Formula, Prepared, Term,
};
use crate::oag::{scale_unchecked, GroupElement, LexWord};

/// Sampling knobs for [`differential_verify_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DifferentialConfig {
    /// Random series tested, on top of the boundary monomials.
    pub samples: usize,
    pub seed: u64,
    /// Candidates per `forall` in the sampled falsification; 0 skips it.
    pub witness_samples: usize,
    pub checks: Checks,
}

impl Default for DifferentialConfig {
    fn default() -> Self {
        DifferentialConfig {
            samples: 200,
            seed: 42,
            witness_samples: 200,
            checks: Checks::Both,
        }
    }
}

/// Which formulas a differential run covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Checks {
    /// `φ_p` and its `forall` clause.
    PhiP,
    /// `φ_(p,n)` and the two `forall` clauses of `ψ_(p,n)`.
    PhiPn,
    #[default]
    Both,
}

impl Checks {
    fn phi_p(self) -> bool {
        self != Checks::PhiPn
    }

    fn phi_pn(self) -> bool {
        self != Checks::PhiP
    }
}

/// A disagreement found by the differential suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// `phi_p`, `phi_pn`, `phi_p clause`, `psi_pn clause 1` or `psi_pn clause 2`.
    pub check: String,
    pub x: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialReport {
    pub group: String,
    pub p: u64,
    pub n: u32,
    pub samples: usize,
    /// Boundary monomials tested besides the random samples.
    pub boundary: usize,
    /// Clause instances the decision rejected and sampling also refuted.
    pub refuted: usize,
    /// Clause instances the decision rejected but sampling could not refute.
    pub unrefuted: usize,
    pub mismatches: Vec<Mismatch>,
}

impl DifferentialReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Exponents where ring membership or `p`-divisibility can change: small
/// multiples and `p`-th parts of each component unit, and elements just on
/// either side of every cut.
pub fn boundary_exponents(w: &LexWord, primes: &[u64]) -> Result<Vec<GroupElement>> {
    let mut out = vec![w.zero()?];
    let mut mults: BTreeSet<i64> = [1, -1, 2, -2].into();
    for &p in primes {
        mults.extend([p as i64, -(p as i64)]);
    }
    let units: Vec<GroupElement> = (0..w.len()).map(|j| w.unit(j)).collect::<Result<_>>()?;
    for u in &units {
        for &m in &mults {
            out.push(scale_unchecked(u, &BigInt::from(m)));
        }
        for &p in primes {
            for s in [u.clone(), w.neg(u)?] {
                if let Some(d) = w.divide(&s, p)? {
                    out.push(d);
                }
            }
        }
    }
    for j in 1..w.len() {
        // prefix zero, prefix negative and prefix positive around the cut before j
        let deep = scale_unchecked(&units[j], &BigInt::from(3));
        out.push(w.neg(&deep)?);
        out.push(w.sub(&deep, &units[j - 1])?);
        out.push(w.sub(&units[j - 1], &deep)?);
    }
    let mut seen = BTreeSet::new();
    out.retain(|e| seen.insert(e.to_string()));
    Ok(out)
}

fn boundary_series(k: &HahnField, primes: &[u64]) -> Result<Vec<HahnSeries>> {
    let mut out = Vec::new();
    for e in boundary_exponents(&k.group, primes)? {
        for c in [BigRational::one(), -BigRational::one()] {
            let m = k.monomial(c, e.clone())?;
            if k.group.sign_unchecked(&e).is_gt() {
                out.push(k.one().add(&m)?);
            }
            out.push(m);
        }
    }
    Ok(out)
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(i as u64)
}

fn bind(x: &HahnSeries) -> Assignment {
    [("x".to_string(), x.clone())].into()
}

fn show(r: &Result<bool>) -> String {
    match r {
        Ok(b) => b.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// Compares `formula` (free in `x`) with membership in the ring of `v` on
/// every element of `xs`.
pub fn compare_with_ring(
    k: &HahnField,
    check: &str,
    formula: &Formula,
    v: &ValuationDescriptor,
    xs: &[HahnSeries],
) -> Vec<Mismatch> {
    let formula = Prepared::new(formula);
    xs.par_iter()
        .filter_map(|x| {
            let want = ring_member(v, x);
            let got = formula.decide(&bind(x), k);
            match (&want, &got) {
                (Ok(a), Ok(b)) if a == b => None,
                _ => Some(Mismatch {
                    check: check.into(),
                    x: x.to_string(),
                    expected: show(&want),
                    got: show(&got),
                }),
            }
        })
        .collect()
}

#[derive(Default)]
struct ClauseTally {
    refuted: usize,
    unrefuted: usize,
    mismatches: Vec<Mismatch>,
}

/// Decides `clause` at `x` and, when it holds, makes sure sampling finds no
/// counterexample.
fn falsify(
    k: &HahnField,
    check: &str,
    clause: &Prepared,
    x: &HahnSeries,
    budget: usize,
    seed: u64,
) -> ClauseTally {
    let env = bind(x);
    let mut t = ClauseTally::default();
    let decided = clause.decide(&env, k);
    let sampled = clause.sample(&env, k, budget, seed);
    let mismatch = |got: String| Mismatch {
        check: check.into(),
        x: x.to_string(),
        expected: show(&decided),
        got,
    };
    match (&decided, sampled) {
        (Ok(true), Ok(EvalOutcome::FalsifiedBy(a))) => {
            let w: Vec<String> = a
                .iter()
                .filter(|(v, _)| *v != "x")
                .map(|(v, s)| format!("{v} = {s}"))
                .collect();
            t.mismatches
                .push(mismatch(format!("refuted by {}", w.join(", "))));
        }
        (Ok(true), Ok(_)) => {}
        (Ok(false), Ok(EvalOutcome::FalsifiedBy(_))) => t.refuted += 1,
        (Ok(false), Ok(_)) => t.unrefuted += 1,
        (_, Err(e)) => t.mismatches.push(mismatch(format!("sampling error: {e}"))),
        (Err(_), _) => t.mismatches.push(mismatch("no decision".into())),
    }
    t
}

/// [`differential_verify_with`] with `witness_samples = samples`.
pub fn differential_verify(
    k: &HahnField,
    p: u64,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<DifferentialReport> {
    differential_verify_with(
        k,
        p,
        n,
        DifferentialConfig {
            samples,
            seed,
            witness_samples: samples,
            checks: Checks::Both,
        },
    )
}

/// Checks `φ_p` against `v_p` and `φ_(p,n)` against `v_(p,n)` (or one of
/// them, per `cfg.checks`) on the
/// boundary monomials and `samples` random series, and tries to refute the
/// `forall` clauses wherever the decision says they hold.
///
/// ```
/// use arclab::hahn::HahnField;
/// use arclab::oag::parse_group;
/// use arclab::valuations::differential_verify;
/// let k = HahnField::new(parse_group("lex(Z, Q)").unwrap(), 8).unwrap();
/// let r = differential_verify(&k, 2, 1, 10, 7).unwrap();
/// assert!(r.passed());
/// ```
pub fn differential_verify_with(
    k: &HahnField,
    p: u64,
    n: u32,
    cfg: DifferentialConfig,
) -> Result<DifferentialReport> {
    let w = &k.group;
    let np = n_p(w, p)?;
    if !np.finite().is_some_and(|m| n <= m) {
        return Err(Error::Precondition(format!("n = {n} exceeds n_{p} = {np}")));
    }
    let params = choose_params(k, p, n)?;
    let phi_p = build_phi_p(p)?;
    let phi_pn = build_phi_pn(p, n, &params)?;
    let vp = v_p_descriptor(w, p)?;
    let vpn = v_pn_descriptor(w, p, n)?;

    let mut xs = boundary_series(k, &[p])?;
    let boundary = xs.len();
    for i in 0..cfg.samples {
        xs.push(sample_series(
            w,
            sample_seed(cfg.seed, i),
            SampleParams::default(),
        )?);
    }

    let mut mismatches = Vec::new();
    if cfg.checks.phi_p() {
        mismatches.extend(compare_with_ring(k, "phi_p", &phi_p, &vp, &xs));
    }
    if cfg.checks.phi_pn() {
        mismatches.extend(compare_with_ring(k, "phi_pn", &phi_pn, &vpn, &xs));
    }

    let x = Term::var("x");
    let param_terms: Vec<Term> = params.into_iter().map(Term::Const).collect();
    let (c1, c2) = psi_pn_clauses(p, &x, &param_terms);
    let clause_phi = phi_clause_on(p, x);
    let mut clauses = Vec::new();
    if cfg.checks.phi_p() {
        clauses.push(("phi_p clause", Prepared::new(&clause_phi)));
    }
    if cfg.checks.phi_pn() {
        clauses.push(("psi_pn clause 1", Prepared::new(&c1)));
        clauses.push(("psi_pn clause 2", Prepared::new(&c2)));
    }
    let probed = if cfg.witness_samples > 0 {
        &xs[..]
    } else {
        &[]
    };
    let tallies: Vec<ClauseTally> = probed
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, x)| {
            clauses.iter().map(move |(name, c)| {
                falsify(
                    k,
                    name,
                    c,
                    x,
                    cfg.witness_samples,
                    sample_seed(cfg.seed ^ 0x5bd1, i),
                )
            })
        })
        .collect();
    let (mut refuted, mut unrefuted) = (0, 0);
    for t in tallies {
        refuted += t.refuted;
        unrefuted += t.unrefuted;
        mismatches.extend(t.mismatches);
    }
    Ok(DifferentialReport {
        group: w.to_string(),
        p,
        n,
        samples: cfg.samples,
        boundary,
        refuted,
        unrefuted,
        mismatches,
    })
}
