use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::build::{phi_frac, psi_on, psi_pn_clauses};
use super::value::Val;
use super::{Assignment, Formula, Prepared, Term};
use crate::convex::{g_pn, max_p_divisible, quotient_exponent, ConvexCut};
use crate::error::{Error, Result};
use crate::hahn::HahnField;
use crate::primes::is_prime;

pub(crate) type Env = BTreeMap<String, Val>;

pub(crate) fn env_of(f: &Prepared, env: &Assignment, k: &HahnField) -> Result<Env> {
    if let Some(v) = f.free.iter().find(|v| !env.contains_key(*v)) {
        return Err(Error::UnboundVariable(v.clone()));
    }
    env.iter()
        .map(|(name, s)| {
            if s.group().components != k.group.components {
                return Err(Error::GroupMismatch);
            }
            Ok((name.clone(), Val::of(s.clone())?))
        })
        .collect()
}

/// Value of a term; `None` when a division by zero occurs.
pub(crate) fn eval_term(t: &Term, env: &Env, k: &HahnField) -> Result<Option<Val>> {
    let bin = |a: &Term, b: &Term| -> Result<Option<(Val, Val)>> {
        Ok(match (eval_term(a, env, k)?, eval_term(b, env, k)?) {
            (Some(x), Some(y)) => Some((x, y)),
            _ => None,
        })
    };
    Ok(match t {
        Term::Var(v) => Some(
            env.get(v)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        ),
        Term::Zero => Some(Val::of(k.zero())?),
        Term::One => Some(Val::of(k.one())?),
        Term::Int(n) => Some(Val::of(k.constant(BigRational::from_integer(n.clone())))?),
        Term::Const(c) => {
            if c.group().components != k.group.components {
                return Err(Error::GroupMismatch);
            }
            Some(Val::of(c.clone())?)
        }
        Term::Neg(a) => eval_term(a, env, k)?.map(|x| x.neg()),
        Term::Pow(a, e) => eval_term(a, env, k)?.map(|x| x.pow(*e)).transpose()?,
        Term::Add(a, b) => bin(a, b)?.map(|(x, y)| x.add(&y)).transpose()?,
        Term::Sub(a, b) => bin(a, b)?.map(|(x, y)| x.sub(&y)).transpose()?,
        Term::Mul(a, b) => bin(a, b)?.map(|(x, y)| x.mul(&y)).transpose()?,
        Term::Div(a, b) => match bin(a, b)? {
            Some((x, y)) => x.div(&y)?,
            None => None,
        },
    })
}

/// Truth of an atom; atoms with an undefined fraction are false.
pub(crate) fn eval_atom(f: &Formula, env: &Env, k: &HahnField) -> Result<bool> {
    let (a, b, want_eq) = match f {
        Formula::Eq(a, b) => (a, b, true),
        Formula::Ne(a, b) => (a, b, false),
        _ => unreachable!("atoms only"),
    };
    match (eval_term(a, env, k)?, eval_term(b, env, k)?) {
        (Some(x), Some(y)) => Ok(x.sub(&y)?.is_zero()? == want_eq),
        _ => Ok(false),
    }
}

/// A recognised quantifier shape.
#[derive(Clone)]
pub(crate) enum Shape<'a> {
    /// `exists w. (w*b = a and b != 0 and body)`
    Fraction {
        w: &'a str,
        a: &'a Term,
        b: &'a Term,
        body: &'a Formula,
    },
    /// `exists y. y^p = u or y^p = -u`, or `exists z. z^p = u`.
    Root { p: u64, u: &'a Term, signed: bool },
    /// `exists z. φ_p(u/z^p) and φ_p(z^p/u)`
    UnitClass { p: u64, u: &'a Term },
    /// `forall z. ψ_p(z) -> ψ_p(u*z)`
    PsiClause { p: u64, u: &'a Term },
    /// One of the two `forall y` clauses of `ψ_(p,n)(x)`.
    PnClause {
        p: u64,
        x: &'a Term,
        params: Vec<&'a Term>,
        second: bool,
    },
}

impl Shape<'_> {
    /// Fractions and roots are decided by exact computation; the other
    /// shapes are decided by reductions that the sampled evaluator checks.
    pub fn is_reduction(&self) -> bool {
        matches!(
            self,
            Shape::UnitClass { .. } | Shape::PsiClause { .. } | Shape::PnClause { .. }
        )
    }
}

fn same(a: &Formula, b: &Formula) -> bool {
    a.canonical() == b.canonical()
}

fn prime_of(k: u32) -> Option<u64> {
    is_prime(k as u64).then_some(k as u64)
}

fn var_is(t: &Term, name: &str) -> bool {
    matches!(t, Term::Var(v) if v == name)
}

/// `(p, t)` when `f` has the outer shape of `ψ_p(t)`.
fn psi_parts(f: &Formula) -> Option<(u64, &Term)> {
    let Formula::And(cs) = f else { return None };
    let Formula::Not(inner) = cs.first()? else {
        return None;
    };
    let Formula::Exists(_, body) = &**inner else {
        return None;
    };
    let Formula::Or(ds) = &**body else {
        return None;
    };
    let Formula::Eq(Term::Pow(_, k), t) = ds.first()? else {
        return None;
    };
    Some((prime_of(*k)?, t))
}

fn phi_parts(f: &Formula) -> Option<(u64, &Term)> {
    let Formula::Or(ds) = f else { return None };
    psi_parts(ds.first()?)
}

/// `(w, a, b, body)` for `exists w. (w*b = a and b != 0 and body)`.
fn fraction_parts(f: &Formula) -> Option<(&str, &Term, &Term, &Formula)> {
    let Formula::Exists(w, body) = f else {
        return None;
    };
    let Formula::And(cs) = &**body else {
        return None;
    };
    let [Formula::Eq(Term::Mul(wv, b), a), Formula::Ne(b2, Term::Zero), rest] = cs.as_slice()
    else {
        return None;
    };
    let fresh_ok = !a.free_vars().contains(w) && !b.free_vars().contains(w);
    (var_is(wv, w) && **b == *b2 && fresh_ok).then_some((w.as_str(), a, &**b, rest))
}

fn root_shape<'a>(v: &str, body: &'a Formula) -> Option<Shape<'a>> {
    let pow_of = |t: &Term| match t {
        Term::Pow(b, k) if var_is(b, v) => prime_of(*k),
        _ => None,
    };
    let free = |u: &Term| !u.free_vars().contains(v);
    match body {
        Formula::Eq(l, u) if pow_of(l).is_some() && free(u) => Some(Shape::Root {
            p: pow_of(l)?,
            u,
            signed: false,
        }),
        Formula::Eq(u, r) if pow_of(r).is_some() && free(u) => Some(Shape::Root {
            p: pow_of(r)?,
            u,
            signed: false,
        }),
        Formula::Or(ds) => match ds.as_slice() {
            [Formula::Eq(l1, u), Formula::Eq(l2, Term::Neg(u2))]
                if l1 == l2 && u == &**u2 && free(u) =>
            {
                Some(Shape::Root {
                    p: pow_of(l1)?,
                    u,
                    signed: true,
                })
            }
            _ => None,
        },
        _ => None,
    }
}

fn unit_class_shape<'a>(f: &'a Formula, z: &str, body: &'a Formula) -> Option<Shape<'a>> {
    let Formula::And(cs) = body else { return None };
    let (_, u, b, _) = fraction_parts(cs.first()?)?;
    let Term::Pow(zv, k) = b else { return None };
    if !var_is(zv, z) || u.free_vars().contains(z) {
        return None;
    }
    let p = prime_of(*k)?;
    let zp = Term::var(z).pow(*k);
    let rebuilt = Formula::exists(
        z,
        Formula::And(vec![
            phi_frac(p, u.clone(), zp.clone()),
            phi_frac(p, zp, u.clone()),
        ]),
    );
    same(f, &rebuilt).then_some(Shape::UnitClass { p, u })
}

fn psi_clause_shape<'a>(f: &'a Formula, z: &str, body: &'a Formula) -> Option<Shape<'a>> {
    let Formula::Implies(a, b) = body else {
        return None;
    };
    let (p, zt) = psi_parts(a)?;
    let (_, prod) = psi_parts(b)?;
    let Term::Mul(u, zt2) = prod else { return None };
    if !var_is(zt, z) || !var_is(zt2, z) || u.free_vars().contains(z) {
        return None;
    }
    let zv = Term::var(z);
    let rebuilt = Formula::forall(
        z,
        Formula::implies(psi_on(p, zv.clone()), psi_on(p, (**u).clone() * zv)),
    );
    same(f, &rebuilt).then_some(Shape::PsiClause { p, u })
}

fn pn_clause_shape<'a>(f: &'a Formula, y: &str, body: &'a Formula) -> Option<Shape<'a>> {
    let Formula::Implies(lhs, rhs) = body else {
        return None;
    };
    let Formula::And(cs) = &**lhs else {
        return None;
    };
    let [Formula::Ne(yv, Term::Zero), guard, frac] = cs.as_slice() else {
        return None;
    };
    if !var_is(yv, y) {
        return None;
    }
    let (second, phi) = match guard {
        Formula::Not(g) => (true, &**g),
        g => (false, g),
    };
    let (p, _) = phi_parts(phi)?;
    let (_, a, b, _) = fraction_parts(frac)?;
    let x = if second { b } else { a };
    let mut params = Vec::new();
    for d in rhs.disjuncts() {
        let Formula::Exists(_, inner) = d else {
            return None;
        };
        let Formula::And(parts) = &**inner else {
            return None;
        };
        let (_, cy, _, _) = fraction_parts(parts.first()?)?;
        let Term::Mul(c, _) = cy else { return None };
        params.push(&**c);
    }
    let owned: Vec<Term> = params.iter().map(|t| (*t).clone()).collect();
    let (first_clause, second_clause) = psi_pn_clauses(p, x, &owned);
    let rebuilt = if second { second_clause } else { first_clause };
    same(f, &rebuilt).then_some(Shape::PnClause {
        p,
        x,
        params,
        second,
    })
}

/// Shapes of every quantifier node of a formula, found once up front so
/// that repeated evaluation does not match patterns again.
pub(crate) struct Shapes<'a>(HashMap<usize, Option<Shape<'a>>>);

impl<'a> Shapes<'a> {
    pub(crate) fn of(f: &'a Formula) -> Self {
        fn walk<'a>(f: &'a Formula, out: &mut HashMap<usize, Option<Shape<'a>>>) {
            match f {
                Formula::True | Formula::False | Formula::Eq(..) | Formula::Ne(..) => {}
                Formula::Not(g) => walk(g, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| walk(g, out)),
                Formula::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Exists(_, body) | Formula::Forall(_, body) => {
                    out.insert(f as *const Formula as usize, shape_of(f));
                    walk(body, out);
                }
            }
        }
        let mut out = HashMap::new();
        walk(f, &mut out);
        Shapes(out)
    }

    /// The shape of a quantifier node of the formula this was built from.
    pub(crate) fn get(&self, f: &Formula) -> Option<&Shape<'a>> {
        self.0
            .get(&(f as *const Formula as usize))
            .and_then(Option::as_ref)
    }
}

/// Classifies a quantified formula, or `None` for unsupported shapes.
fn shape_of(f: &Formula) -> Option<Shape<'_>> {
    if let Some((w, a, b, body)) = fraction_parts(f) {
        return Some(Shape::Fraction { w, a, b, body });
    }
    match f {
        Formula::Exists(v, body) => root_shape(v, body).or_else(|| unit_class_shape(f, v, body)),
        Formula::Forall(v, body) => {
            psi_clause_shape(f, v, body).or_else(|| pn_clause_shape(f, v, body))
        }
        _ => None,
    }
}

fn unsupported(f: &Formula) -> Error {
    let mut text = f.to_string();
    if text.len() > 120 {
        let cut = (0..=117)
            .rev()
            .find(|&i| text.is_char_boundary(i))
            .unwrap_or(0);
        text.truncate(cut);
        text.push_str("...");
    }
    Error::UnsupportedQuantifierPattern(text)
}

/// Whether `v_p(g) >= 0`, i.e. `g >= 0` or `g` lies in `G_p`.
fn nonneg_mod(k: &HahnField, g: &crate::oag::GroupElement, c: ConvexCut) -> bool {
    k.group.prefix_sign(g, c.seg) != Ordering::Less
}

/// Decides a recognised shape.
pub(crate) fn decide_shape(
    shape: &Shape<'_>,
    env: &Env,
    k: &HahnField,
    body: &mut dyn FnMut(&str, Val) -> Result<bool>,
) -> Result<bool> {
    let w = &*k.group;
    match *shape {
        Shape::Fraction { w: var, a, b, .. } => {
            let (Some(a), Some(b)) = (eval_term(a, env, k)?, eval_term(b, env, k)?) else {
                return Ok(false);
            };
            match a.div(&b)? {
                Some(q) => body(var, q),
                None => Ok(false),
            }
        }
        Shape::Root { p, u, signed } => match eval_term(u, env, k)? {
            Some(u) => u.root_exists(p, signed),
            None => Ok(false),
        },
        Shape::UnitClass { p, u } => match eval_term(u, env, k)? {
            Some(u) if !u.is_zero()? => w.p_divisible(&u.v()?, p),
            _ => Ok(false),
        },
        Shape::PsiClause { p, u } => {
            let gp = max_p_divisible(w, p)?;
            if gp.is_top() {
                // ψ_p never holds
                return Ok(true);
            }
            let u = match eval_term(u, env, k)? {
                Some(u) if !u.is_zero()? => u,
                _ => return Ok(false),
            };
            let g = u.v()?;
            Ok(w.p_divisible(&g, p)? && nonneg_mod(k, &g, gp))
        }
        Shape::PnClause {
            p,
            x,
            ref params,
            second,
        } => {
            let n = params_exponent(p, params.len()).ok_or_else(|| {
                Error::UnsupportedQuantifierPattern(format!(
                    "{} parameters is not a power of {p}",
                    params.len()
                ))
            })?;
            let h = g_pn(w, p, n)?;
            check_params(k, env, p, h, params)?;
            let gp = max_p_divisible(w, p)?;
            let x = match eval_term(x, env, k)? {
                None => return Ok(true),
                Some(x) => x,
            };
            if x.is_zero()? {
                return Ok(second || h.is_top());
            }
            let g = x.v()?;
            if nonneg_mod(k, &g, gp) == second {
                // the guard of the clause is never met
                return Ok(true);
            }
            Ok(w.in_suffix(&g, h.seg))
        }
    }
}

fn params_exponent(p: u64, count: usize) -> Option<u32> {
    let mut n = 0;
    let mut c = 1usize;
    while c < count {
        c = c.checked_mul(p as usize)?;
        n += 1;
    }
    (c == count).then_some(n)
}

/// The reduction for `ψ_(p,n)` needs parameters inside `H = G_(p,n)`
/// meeting every coset of `pH`.
fn check_params(k: &HahnField, env: &Env, p: u64, h: ConvexCut, params: &[&Term]) -> Result<()> {
    let w = &*k.group;
    let mut reps: Vec<crate::oag::GroupElement> = Vec::new();
    for t in params {
        let Some(v) = eval_term(t, env, k)? else {
            continue;
        };
        if v.is_zero()? {
            continue;
        }
        let g = v.v()?;
        if !w.in_suffix(&g, h.seg) {
            return Err(Error::UnsupportedQuantifierPattern(format!(
                "parameter {t} has value outside G_({p},n) = {}",
                h.label(w)
            )));
        }
        let mut new = true;
        for r in &reps {
            if w.p_divisible(&w.sub(&g, r)?, p)? {
                new = false;
                break;
            }
        }
        if new {
            reps.push(g);
        }
    }
    let e = quotient_exponent(w, ConvexCut::bottom(w), h, p)?
        .finite()
        .ok_or_else(|| Error::Precondition("infinite quotient".into()))?;
    if BigInt::from(reps.len()) != BigInt::from(p).pow(e) {
        return Err(Error::UnsupportedQuantifierPattern(format!(
            "parameters meet {} of the {p}^{e} cosets of pH in H = {}",
            reps.len(),
            h.label(w)
        )));
    }
    Ok(())
}

fn decide(f: &Formula, env: &Env, k: &HahnField, shapes: &Shapes) -> Result<bool> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Eq(..) | Formula::Ne(..) => eval_atom(f, env, k),
        Formula::Not(g) => Ok(!decide(g, env, k, shapes)?),
        Formula::And(gs) => {
            for g in gs {
                if !decide(g, env, k, shapes)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(gs) => {
            for g in gs {
                if decide(g, env, k, shapes)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Implies(a, b) => Ok(!decide(a, env, k, shapes)? || decide(b, env, k, shapes)?),
        Formula::Exists(..) | Formula::Forall(..) => {
            let shape = shapes.get(f).ok_or_else(|| unsupported(f))?;
            let rest = match shape {
                Shape::Fraction { body, .. } => Some(*body),
                _ => None,
            };
            decide_shape(shape, env, k, &mut |var, val| {
                let mut inner = env.clone();
                inner.insert(var.to_string(), val);
                decide(rest.expect("fraction body"), &inner, k, shapes)
            })
        }
    }
}

/// Decides `f` at `env` over `k`.
///
/// Quantifiers must have one of the shapes produced by the builders:
/// fractions, `p`-th root atoms, the `forall z` clause of `φ_p`, the
/// `forall y` clauses of `ψ_(p,n)` (with parameters as produced by
/// [`choose_params`](super::choose_params)) and their inner unit-class
/// test. Anything else fails with `UnsupportedQuantifierPattern`.
///
/// ```
/// use arclab::hahn::HahnField;
/// use arclab::logic::{build_psi_p, eval_decidable, Assignment};
/// use arclab::oag::parse_group;
///
/// let k = HahnField::new(parse_group("lex(Z, Q)").unwrap(), 8).unwrap();
/// let mut env = Assignment::new();
/// env.insert("x".into(), k.parse("t^(1,0)").unwrap());
/// assert!(eval_decidable(&build_psi_p(2).unwrap(), &env, &k).unwrap());
/// ```
pub fn eval_decidable(f: &Formula, env: &Assignment, k: &HahnField) -> Result<bool> {
    Prepared::new(f).decide(env, k)
}

pub(crate) fn decide_prepared(f: &Prepared, env: &Assignment, k: &HahnField) -> Result<bool> {
    let env = env_of(f, env, k)?;
    decide(f.formula, &env, k, &f.shapes)
}

/// Used by tests comparing a fraction with its computed quotient.
#[cfg(test)]
pub(crate) fn value_series(
    t: &Term,
    env: &Assignment,
    k: &HahnField,
) -> Result<Option<crate::hahn::HahnSeries>> {
    let env: Env = env
        .iter()
        .map(|(n, s)| Ok((n.clone(), Val::of(s.clone())?)))
        .collect::<Result<_>>()?;
    eval_term(t, &env, k)?
        .map(|v| v.to_series(&k.cutoff))
        .transpose()
}
