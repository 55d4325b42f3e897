//! First-order formulas in the language of rings, evaluated over Hahn fields.
//!
//! Quantifiers are decided by recognising a fixed set of shapes (see
//! [`eval_decidable`]); [`eval_sampled`] instantiates them with sampled
//! witnesses instead and serves as an independent falsifier.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::error::Result;
use crate::hahn::{HahnField, HahnSeries};

mod build;
mod eval;
mod parse;
mod sampled;
mod value;

pub use build::{
    build_phi_p, build_phi_pn, build_psi_p, build_psi_pn, choose_params, frac_apply, phi_clause_on,
    phi_frac, phi_on, phi_pn_on, psi_on, psi_pn_clauses, psi_pn_on,
};
pub use eval::eval_decidable;
pub use parse::{parse_formula, parse_formula_over};
pub use sampled::{eval_sampled, EvalOutcome};

/// A formula with its quantifier shapes matched once, for evaluating it at
/// many points.
pub struct Prepared<'a> {
    formula: &'a Formula,
    shapes: eval::Shapes<'a>,
    free: BTreeSet<String>,
    primes: Vec<u64>,
    constants: Vec<HahnSeries>,
}

impl<'a> Prepared<'a> {
    pub fn new(formula: &'a Formula) -> Self {
        let primes = formula
            .exponents()
            .into_iter()
            .map(u64::from)
            .filter(|&p| crate::primes::is_prime(p))
            .collect();
        let constants = formula.constants().into_iter().cloned().collect();
        Prepared {
            formula,
            shapes: eval::Shapes::of(formula),
            free: formula.free_vars(),
            primes,
            constants,
        }
    }

    pub fn formula(&self) -> &'a Formula {
        self.formula
    }

    /// Same as [`eval_decidable`].
    pub fn decide(&self, env: &Assignment, k: &HahnField) -> Result<bool> {
        eval::decide_prepared(self, env, k)
    }

    /// Same as [`eval_sampled`].
    pub fn sample(
        &self,
        env: &Assignment,
        k: &HahnField,
        budget: usize,
        seed: u64,
    ) -> Result<EvalOutcome> {
        sampled::sample_prepared(self, env, k, budget, seed)
    }
}

/// Values of the free variables of a formula.
pub type Assignment = BTreeMap<String, HahnSeries>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Zero,
    One,
    /// Numeral `n >= 2`, shorthand for `1 + ... + 1`.
    Int(BigInt),
    /// A series constant, such as a parameter.
    Const(HahnSeries),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// `a/b`, read with an implicit guard `b != 0`.
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Ne(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn pow(self, k: u32) -> Term {
        Term::Pow(Box::new(self), k)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One | Term::Int(_) | Term::Const(_) => {}
            Term::Neg(a) | Term::Pow(a, _) => a.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn has_div(&self) -> bool {
        match self {
            Term::Div(..) => true,
            Term::Var(_) | Term::Zero | Term::One | Term::Int(_) | Term::Const(_) => false,
            Term::Neg(a) | Term::Pow(a, _) => a.has_div(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.has_div() || b.has_div(),
        }
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        let r = |t: &Term| Box::new(t.rename(map));
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Zero | Term::One | Term::Int(_) | Term::Const(_) => self.clone(),
            Term::Neg(a) => Term::Neg(r(a)),
            Term::Pow(a, k) => Term::Pow(r(a), *k),
            Term::Add(a, b) => Term::Add(r(a), r(b)),
            Term::Sub(a, b) => Term::Sub(r(a), r(b)),
            Term::Mul(a, b) => Term::Mul(r(a), r(b)),
            Term::Div(a, b) => Term::Div(r(a), r(b)),
        }
    }

    fn constants<'a>(&'a self, out: &mut Vec<&'a HahnSeries>) {
        match self {
            Term::Const(c) => out.push(c),
            Term::Var(_) | Term::Zero | Term::One | Term::Int(_) => {}
            Term::Neg(a) | Term::Pow(a, _) => a.constants(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.constants(out);
                b.constants(out);
            }
        }
    }

    fn exponents(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Pow(a, k) => {
                out.insert(*k);
                a.exponents(out);
            }
            Term::Var(_) | Term::Zero | Term::One | Term::Int(_) | Term::Const(_) => {}
            Term::Neg(a) => a.exponents(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.exponents(out);
                b.exponents(out);
            }
        }
    }
}

impl std::ops::Add for Term {
    type Output = Term;

    fn add(self, other: Term) -> Term {
        Term::Add(Box::new(self), Box::new(other))
    }
}

impl std::ops::Sub for Term {
    type Output = Term;

    fn sub(self, other: Term) -> Term {
        Term::Sub(Box::new(self), Box::new(other))
    }
}

impl std::ops::Mul for Term {
    type Output = Term;

    fn mul(self, other: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(other))
    }
}

impl std::ops::Div for Term {
    type Output = Term;

    fn div(self, other: Term) -> Term {
        Term::Div(Box::new(self), Box::new(other))
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::Ne(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// A disjunction; a single disjunct is returned as is.
    pub fn or_all(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::Or(fs)
        }
    }

    /// The disjuncts of a top-level disjunction, or the formula itself.
    pub fn disjuncts(&self) -> &[Formula] {
        match self {
            Formula::Or(fs) => fs,
            f => std::slice::from_ref(f),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Ne(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            Formula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let mut inner = BTreeSet::new();
                f.collect_vars(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    /// Checks that every free variable is among `params`.
    pub fn check_scope<'a>(&self, params: impl IntoIterator<Item = &'a str>) -> crate::Result<()> {
        let known: BTreeSet<&str> = params.into_iter().collect();
        match self
            .free_vars()
            .into_iter()
            .find(|v| !known.contains(v.as_str()))
        {
            Some(v) => Err(crate::Error::UnboundVariable(v)),
            None => Ok(()),
        }
    }

    /// Number of quantifiers, including those introduced by fraction sugar.
    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Ne(..) => 0,
            Formula::Not(f) => f.quantifier_count(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_count).sum(),
            Formula::Implies(a, b) => a.quantifier_count() + b.quantifier_count(),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_count(),
        }
    }

    /// Whether any atom still contains a fraction `a/b`.
    pub fn has_fractions(&self) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Eq(a, b) | Formula::Ne(a, b) => a.has_div() || b.has_div(),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.has_fractions(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_fractions),
            Formula::Implies(a, b) => a.has_fractions() || b.has_fractions(),
        }
    }

    /// Series constants occurring in the formula.
    pub fn constants(&self) -> Vec<&HahnSeries> {
        let mut out = Vec::new();
        self.walk_terms(&mut |t| t.constants(&mut out));
        out
    }

    /// Exponents of all powers `t^k` occurring in the formula.
    pub fn exponents(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.walk_terms(&mut |t| t.exponents(&mut out));
        out
    }

    fn walk_terms<'a>(&'a self, f: &mut dyn FnMut(&'a Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) | Formula::Ne(a, b) => {
                f(a);
                f(b);
            }
            Formula::Not(g) | Formula::Exists(_, g) | Formula::Forall(_, g) => g.walk_terms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.walk_terms(f)),
            Formula::Implies(a, b) => {
                a.walk_terms(f);
                b.walk_terms(f);
            }
        }
    }

    /// Rewrites every atom `A(a/b)` as `exists w. (w*b = a and b != 0 and A(w))`,
    /// innermost fractions first.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(..) | Formula::Ne(..) => desugar_atom(self.clone()),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(fs) => Formula::And(fs.iter().map(Formula::desugar).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(Formula::desugar).collect()),
            Formula::Implies(a, b) => Formula::implies(a.desugar(), b.desugar()),
            Formula::Exists(v, f) => Formula::exists(v, f.desugar()),
            Formula::Forall(v, f) => Formula::forall(v, f.desugar()),
        }
    }

    /// Alpha-normal form: bound variables renamed by binding depth, so that
    /// formulas differing only in bound names compare equal.
    pub fn canonical(&self) -> Formula {
        self.canon(&BTreeMap::new(), 0)
    }

    fn canon(&self, map: &BTreeMap<String, String>, depth: usize) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.rename(map), b.rename(map)),
            Formula::Ne(a, b) => Formula::Ne(a.rename(map), b.rename(map)),
            Formula::Not(f) => Formula::not(f.canon(map, depth)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.canon(map, depth)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.canon(map, depth)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.canon(map, depth), b.canon(map, depth)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let name = format!("#{depth}");
                let mut inner = map.clone();
                inner.insert(v.clone(), name.clone());
                let body = Box::new(f.canon(&inner, depth + 1));
                match self {
                    Formula::Exists(..) => Formula::Exists(name, body),
                    _ => Formula::Forall(name, body),
                }
            }
        }
    }
}

fn first_div(t: &Term) -> Option<(Term, Term)> {
    match t {
        Term::Div(a, b) => first_div(a)
            .or_else(|| first_div(b))
            .or_else(|| Some((*a.clone(), *b.clone()))),
        Term::Var(_) | Term::Zero | Term::One | Term::Int(_) | Term::Const(_) => None,
        Term::Neg(a) | Term::Pow(a, _) => first_div(a),
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
            first_div(a).or_else(|| first_div(b))
        }
    }
}

fn replace_div(t: &Term, a: &Term, b: &Term, w: &Term) -> Term {
    let r = |x: &Term| Box::new(replace_div(x, a, b, w));
    match t {
        Term::Div(x, y) if **x == *a && **y == *b => w.clone(),
        Term::Div(x, y) => Term::Div(r(x), r(y)),
        Term::Var(_) | Term::Zero | Term::One | Term::Int(_) | Term::Const(_) => t.clone(),
        Term::Neg(x) => Term::Neg(r(x)),
        Term::Pow(x, k) => Term::Pow(r(x), *k),
        Term::Add(x, y) => Term::Add(r(x), r(y)),
        Term::Sub(x, y) => Term::Sub(r(x), r(y)),
        Term::Mul(x, y) => Term::Mul(r(x), r(y)),
    }
}

fn desugar_atom(atom: Formula) -> Formula {
    let (l, r, eq) = match &atom {
        Formula::Eq(l, r) => (l, r, true),
        Formula::Ne(l, r) => (l, r, false),
        _ => unreachable!("atoms only"),
    };
    let Some((a, b)) = first_div(l).or_else(|| first_div(r)) else {
        return atom;
    };
    let avoid = atom.free_vars();
    let w = fresh("w", &avoid);
    let wt = Term::Var(w.clone());
    let (l, r) = (replace_div(l, &a, &b, &wt), replace_div(r, &a, &b, &wt));
    let inner = if eq {
        Formula::Eq(l, r)
    } else {
        Formula::Ne(l, r)
    };
    Formula::exists(
        &w,
        Formula::And(vec![
            Formula::eq(wt * b.clone(), a),
            Formula::ne(b, Term::Zero),
            desugar_atom(inner),
        ]),
    )
}

/// `base`, or `base1`, `base2`, ... avoiding the given names.
pub(crate) fn fresh(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

// Printer. Precedences: quantifier 0, -> 1, or 2, and 3, not 4, atom 5.

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) | Term::Div(..) => 2,
        Term::Neg(_) => 3,
        Term::Pow(..) => 4,
        _ => 5,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let prec = term_prec(t);
    if prec < min {
        write!(f, "(")?;
        write_term(f, t, 0)?;
        return write!(f, ")");
    }
    match t {
        Term::Var(v) => write!(f, "{v}"),
        Term::Zero => write!(f, "0"),
        Term::One => write!(f, "1"),
        Term::Int(n) => write!(f, "{n}"),
        Term::Const(c) => write!(f, "{{{c}}}"),
        Term::Neg(a) => {
            write!(f, "-")?;
            write_term(f, a, 3)
        }
        Term::Pow(a, k) => {
            write_term(f, a, 5)?;
            write!(f, "^{k}")
        }
        Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
            let op = match t {
                Term::Add(..) => " + ",
                Term::Sub(..) => " - ",
                Term::Mul(..) => "*",
                _ => "/",
            };
            write_term(f, a, prec)?;
            write!(f, "{op}")?;
            write_term(f, b, prec + 1)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

fn formula_prec(g: &Formula) -> u8 {
    match g {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(fs) if fs.len() >= 2 => 2,
        Formula::And(fs) if fs.len() >= 2 => 3,
        Formula::Not(_) => 4,
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => formula_prec(&fs[0]),
        _ => 5,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, g: &Formula, min: u8) -> fmt::Result {
    let prec = formula_prec(g);
    if prec < min {
        write!(f, "(")?;
        write_formula(f, g, 0)?;
        return write!(f, ")");
    }
    match g {
        Formula::True => write!(f, "true"),
        Formula::False => write!(f, "false"),
        Formula::Eq(a, b) => write!(f, "{a} = {b}"),
        Formula::Ne(a, b) => write!(f, "{a} != {b}"),
        Formula::Not(a) => {
            write!(f, "not ")?;
            write_formula(f, a, 5)
        }
        Formula::And(fs) | Formula::Or(fs) if fs.len() < 2 => match fs.first() {
            Some(h) => write_formula(f, h, min),
            None if matches!(g, Formula::And(_)) => write!(f, "true"),
            None => write!(f, "false"),
        },
        Formula::And(fs) | Formula::Or(fs) => {
            let sep = if matches!(g, Formula::And(_)) {
                " and "
            } else {
                " or "
            };
            for (i, h) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write_formula(f, h, prec + 1)?;
            }
            Ok(())
        }
        Formula::Implies(a, b) => {
            write_formula(f, a, 2)?;
            write!(f, " -> ")?;
            write_formula(f, b, 1)
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let kw = if matches!(g, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            write!(f, "{kw} {v}. ")?;
            write_formula(f, body, 0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}
