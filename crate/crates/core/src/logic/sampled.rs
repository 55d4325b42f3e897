use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use super::eval::{decide_shape, env_of, eval_atom, eval_term, Env, Shape, Shapes};
use super::value::Val;
use super::{Assignment, Formula, Prepared};
use crate::error::Result;
use crate::hahn::{sample_series, HahnField, HahnSeries, SampleParams};
use crate::oag::{scale_unchecked, GroupElement};

/// Result of sampled evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    /// Holds: every sampled instance of a `forall` held, or no sampling was needed.
    True,
    /// Holds, with the sampled witness that settled it.
    Witnessed(Assignment),
    False,
    /// A sampled instance refutes the formula.
    FalsifiedBy(Assignment),
    /// An `exists` found no witness among the samples.
    UnknownOnSample,
}

impl EvalOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, EvalOutcome::True | EvalOutcome::Witnessed(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    T,
    F,
    U,
}

#[derive(Clone, Debug)]
struct Res {
    tri: Tri,
    /// Sampled bindings that settled the value.
    witness: Option<Vec<(String, HahnSeries)>>,
}

impl Res {
    fn plain(tri: Tri) -> Res {
        Res { tri, witness: None }
    }

    fn from(r: Result<bool>) -> Res {
        match r {
            Ok(b) => Res::plain(if b { Tri::T } else { Tri::F }),
            Err(_) => Res::plain(Tri::U),
        }
    }

    fn not(self) -> Res {
        let tri = match self.tri {
            Tri::T => Tri::F,
            Tri::F => Tri::T,
            Tri::U => Tri::U,
        };
        Res { tri, ..self }
    }
}

struct Sampler<'s, 'a> {
    k: &'s HahnField,
    shapes: &'s Shapes<'a>,
    budget: usize,
    seed: u64,
    primes: &'s [u64],
    constants: &'s [HahnSeries],
}

fn mix(seed: u64, depth: usize, var: &str, i: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in var
        .bytes()
        .chain((depth as u64).to_le_bytes())
        .chain((i as u64).to_le_bytes())
    {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl Sampler<'_, '_> {
    fn eval(&self, f: &Formula, env: &Env, trail: &[(String, HahnSeries)], depth: usize) -> Res {
        match f {
            Formula::True => Res::plain(Tri::T),
            Formula::False => Res::plain(Tri::F),
            Formula::Eq(..) | Formula::Ne(..) => Res::from(eval_atom(f, env, self.k)),
            Formula::Not(g) => self.eval(g, env, trail, depth).not(),
            Formula::And(gs) => self.fold(gs, env, trail, depth, Tri::F),
            Formula::Or(gs) => self.fold(gs, env, trail, depth, Tri::T),
            Formula::Implies(a, b) => {
                let a = self.eval(a, env, trail, depth).not();
                if a.tri == Tri::T {
                    return a;
                }
                let b = self.eval(b, env, trail, depth);
                match (a.tri, b.tri) {
                    (_, Tri::T) => b,
                    (Tri::U, _) | (_, Tri::U) => Res::plain(Tri::U),
                    _ => b,
                }
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let universal = matches!(f, Formula::Forall(..));
                match self.shapes.get(f) {
                    Some(&Shape::Fraction {
                        w,
                        body: rest,
                        a,
                        b,
                    }) => match self.quotient(a, b, env) {
                        Ok(Some(q)) => {
                            let mut inner = env.clone();
                            inner.insert(w.to_string(), q);
                            self.eval(rest, &inner, trail, depth)
                        }
                        Ok(None) => Res::plain(Tri::F),
                        Err(_) => Res::plain(Tri::U),
                    },
                    Some(&Shape::Root { p, u, signed }) if depth == 0 => {
                        let r = Res::from(decide_shape(
                            &Shape::Root { p, u, signed },
                            env,
                            self.k,
                            &mut |_, _| Ok(false),
                        ));
                        if r.tri != Tri::T {
                            return r;
                        }
                        let witness = self.root_witness(u, env, p, signed).map(|y| {
                            let mut t = trail.to_vec();
                            t.push((v.clone(), y));
                            t
                        });
                        Res {
                            tri: Tri::T,
                            witness,
                        }
                    }
                    Some(shape) if depth > 0 || !shape.is_reduction() => {
                        Res::from(decide_shape(shape, env, self.k, &mut |_, _| Ok(false)))
                    }
                    _ => self.sample(v, body, universal, env, trail, depth),
                }
            }
        }
    }

    fn quotient(&self, a: &super::Term, b: &super::Term, env: &Env) -> Result<Option<Val>> {
        match (eval_term(a, env, self.k)?, eval_term(b, env, self.k)?) {
            (Some(a), Some(b)) => a.div(&b),
            _ => Ok(None),
        }
    }

    /// `And` when `stop = F`, `Or` when `stop = T`.
    fn fold(
        &self,
        gs: &[Formula],
        env: &Env,
        trail: &[(String, HahnSeries)],
        depth: usize,
        stop: Tri,
    ) -> Res {
        let mut unknown = false;
        let mut last = None;
        for g in gs {
            let r = self.eval(g, env, trail, depth);
            if r.tri == stop {
                return r;
            }
            unknown |= r.tri == Tri::U;
            last = Some(r);
        }
        if unknown {
            return Res::plain(Tri::U);
        }
        let other = if stop == Tri::F { Tri::T } else { Tri::F };
        last.filter(|r| r.tri == other).unwrap_or(Res::plain(other))
    }

    fn root_witness(&self, u: &super::Term, env: &Env, p: u64, signed: bool) -> Option<HahnSeries> {
        let u = eval_term(u, env, self.k)
            .ok()??
            .to_series(&self.k.cutoff)
            .ok()?;
        if u.is_zero() {
            return Some(u);
        }
        let target = if signed && u.leading_coeff().ok()?.is_negative() && p.is_multiple_of(2) {
            u.neg()
        } else {
            u
        };
        target.pth_root(p, &self.k.cutoff).ok()
    }

    fn sample(
        &self,
        v: &str,
        body: &Formula,
        universal: bool,
        env: &Env,
        trail: &[(String, HahnSeries)],
        depth: usize,
    ) -> Res {
        let random = if depth == 0 {
            self.budget
        } else {
            self.budget / 10
        };
        let mut cands = self.structured(env);
        let mut seen: HashSet<HahnSeries> = cands.iter().cloned().collect();
        for i in 0..random {
            if let Ok(s) = sample_series(
                &self.k.group,
                mix(self.seed, depth, v, i),
                SampleParams::default(),
            ) {
                if !seen.contains(&s) {
                    seen.insert(s.clone());
                    cands.push(s);
                }
            }
        }
        let run = |c: &HahnSeries| -> Option<Res> {
            let mut inner = env.clone();
            inner.insert(v.to_string(), Val::of(c.clone()).ok()?);
            let mut t = trail.to_vec();
            t.push((v.to_string(), c.clone()));
            let r = self.eval(body, &inner, &t, depth + 1);
            let decisive = if universal { Tri::F } else { Tri::T };
            (r.tri == decisive || r.tri == Tri::U).then(|| Res {
                tri: r.tri,
                witness: Some(r.witness.unwrap_or(t)),
            })
        };
        // the first decisive sample in candidate order wins; unknowns only
        // matter if nothing is decisive
        let hits: Vec<Res> = if depth == 0 {
            cands.par_iter().filter_map(run).collect()
        } else {
            cands.iter().filter_map(run).collect()
        };
        if let Some(r) = hits.iter().find(|r| r.tri != Tri::U) {
            return r.clone();
        }
        if universal && hits.is_empty() {
            Res::plain(Tri::T)
        } else {
            Res::plain(Tri::U)
        }
    }

    /// Candidates shaped like the usual clause witnesses: `±1`, the
    /// values in scope and the constants, roots of the monomials among
    /// them, and monomials at small combinations of their valuations and
    /// of the component units, divided by the primes that occur as
    /// exponents.
    fn structured(&self, env: &Env) -> Vec<HahnSeries> {
        let w = &*self.k.group;
        let mut out: Vec<HahnSeries> = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |s: HahnSeries, out: &mut Vec<HahnSeries>| {
            if seen.insert(s.clone()) {
                out.push(s);
            }
        };
        let one = self.k.one();
        push(one.clone(), &mut out);
        push(one.neg(), &mut out);
        let mut base: Vec<GroupElement> = Vec::new();
        let values = env
            .values()
            .filter_map(|v| v.to_series(&self.k.cutoff).ok())
            .chain(self.constants.iter().cloned());
        for s in values {
            if s.is_zero() {
                continue;
            }
            if let Ok(g) = s.v_of() {
                base.push(g);
            }
            for &q in self.primes.iter().filter(|_| s.terms().len() == 1) {
                for t in [s.clone(), s.neg()] {
                    if t.root_exists(q, false).unwrap_or(false) {
                        if let Ok(r) = t.pth_root(q, &self.k.cutoff) {
                            push(r.neg(), &mut out);
                            push(r, &mut out);
                        }
                    }
                }
            }
            push(s.neg(), &mut out);
            push(s, &mut out);
        }
        let mut exps: Vec<GroupElement> = vec![w.zero().expect("effective group")];
        for b in &base {
            for m in [1i64, -1, 2, -2, 3, -3, 4, -4] {
                exps.push(scale_unchecked(b, &BigInt::from(m)));
            }
        }
        for (i, a) in base.iter().enumerate() {
            for b in &base[i + 1..] {
                exps.extend(
                    [w.add(a, b), w.sub(a, b), w.sub(b, a)]
                        .into_iter()
                        .flatten(),
                );
            }
        }
        for seg in 0..w.len() {
            if let Ok(u) = w.unit(seg) {
                exps.push(w.neg(&u).expect("valid"));
                exps.push(u);
            }
        }
        let mut divided = Vec::new();
        for e in &exps {
            for &q in self.primes {
                if let Ok(Some(d)) = w.divide(e, q) {
                    divided.push(d);
                }
            }
        }
        exps.extend(divided);
        for e in exps {
            for c in [BigRational::one(), -BigRational::one()] {
                if let Ok(m) = self.k.monomial(c, e.clone()) {
                    push(m, &mut out);
                }
            }
        }
        out
    }
}

/// Evaluates `f` with the reductions replaced by sampling.
///
/// Each outermost quantifier whose decision relies on a reduction (the
/// clauses of `φ_p` and `ψ_(p,n)` and the unit-class test) is instantiated
/// with structured candidates and `budget` seeded random series; nested
/// quantifiers are decided. Fractions and root atoms are always computed
/// exactly. A `forall` with a failing instance gives `FalsifiedBy`; an
/// `exists` with no witness gives `UnknownOnSample`.
pub fn eval_sampled(
    f: &Formula,
    env: &Assignment,
    k: &HahnField,
    budget: usize,
    seed: u64,
) -> Result<EvalOutcome> {
    Prepared::new(f).sample(env, k, budget, seed)
}

pub(crate) fn sample_prepared(
    f: &Prepared,
    env: &Assignment,
    k: &HahnField,
    budget: usize,
    seed: u64,
) -> Result<EvalOutcome> {
    let scope = env_of(f, env, k)?;
    let s = Sampler {
        k,
        shapes: &f.shapes,
        budget,
        seed,
        primes: &f.primes,
        constants: &f.constants,
    };
    let r = s.eval(f.formula, &scope, &[], 0);
    let with = |trail: Vec<(String, HahnSeries)>| {
        let mut a = env.clone();
        a.extend(trail);
        a
    };
    Ok(match (r.tri, r.witness) {
        (Tri::T, Some(t)) if !t.is_empty() => EvalOutcome::Witnessed(with(t)),
        (Tri::T, _) => EvalOutcome::True,
        (Tri::F, Some(t)) if !t.is_empty() => EvalOutcome::FalsifiedBy(with(t)),
        (Tri::F, _) => EvalOutcome::False,
        (Tri::U, _) => EvalOutcome::UnknownOnSample,
    })
}
