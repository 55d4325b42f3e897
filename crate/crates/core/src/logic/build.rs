use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{fresh, Formula, Term};
use crate::convex::g_pn;
use crate::error::{Error, Result};
use crate::hahn::{HahnField, HahnSeries};
use crate::oag::ComponentKind;
use crate::primes::is_prime;

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) && p <= u32::MAX as u64 {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn root_atom(y: &str, p: u64, t: &Term) -> Formula {
    let yp = Term::var(y).pow(p as u32);
    Formula::Or(vec![
        Formula::eq(yp.clone(), t.clone()),
        Formula::eq(yp, t.clone().neg()),
    ])
}

/// `ψ_p(t) = not (exists y. y^p = t or y^p = -t) and exists z. z^p = 1 + t`,
/// with bound names chosen away from the variables of `t`.
pub fn psi_on(p: u64, t: Term) -> Formula {
    let avoid = t.free_vars();
    let (y, z) = (fresh("y", &avoid), fresh("z", &avoid));
    Formula::And(vec![
        Formula::not(Formula::exists(&y, root_atom(&y, p, &t))),
        Formula::exists(&z, Formula::eq(Term::var(&z).pow(p as u32), Term::One + t)),
    ])
}

/// `forall z. (ψ_p(z) -> ψ_p(t*z))`, the clause of `φ_p(t)` that carries
/// the reduction to the value group.
pub fn phi_clause_on(p: u64, t: Term) -> Formula {
    let z = fresh("z", &t.free_vars());
    let zt = Term::var(&z);
    Formula::forall(
        &z,
        Formula::implies(psi_on(p, zt.clone()), psi_on(p, t * zt)),
    )
}

/// `φ_p(t) = ψ_p(t) or ((exists y. y^p = ±t) and forall z. (ψ_p(z) -> ψ_p(t*z))) or t = 0`.
pub fn phi_on(p: u64, t: Term) -> Formula {
    let y = fresh("y", &t.free_vars());
    Formula::Or(vec![
        psi_on(p, t.clone()),
        Formula::And(vec![
            Formula::exists(&y, root_atom(&y, p, &t)),
            phi_clause_on(p, t.clone()),
        ]),
        Formula::eq(t, Term::Zero),
    ])
}

/// `f(a/b)` written without division: `exists w. (w*b = a and b != 0 and f(w))`.
pub fn frac_apply(a: Term, b: Term, f: impl FnOnce(Term) -> Formula) -> Formula {
    let mut avoid = a.free_vars();
    avoid.extend(b.free_vars());
    let w = fresh("w", &avoid);
    let wt = Term::var(&w);
    Formula::exists(
        &w,
        Formula::And(vec![
            Formula::eq(wt.clone() * b.clone(), a),
            Formula::ne(b, Term::Zero),
            f(wt),
        ]),
    )
}

/// `φ_p(a/b)`, desugared.
pub fn phi_frac(p: u64, a: Term, b: Term) -> Formula {
    frac_apply(a, b, |w| phi_on(p, w))
}

/// The two `forall y` clauses of `ψ_(p,n)(x)` for the given parameters.
pub fn psi_pn_clauses(p: u64, x: &Term, params: &[Term]) -> (Formula, Formula) {
    let mut avoid: BTreeSet<String> = x.free_vars();
    for c in params {
        avoid.extend(c.free_vars());
    }
    let y = fresh("y", &avoid);
    let yt = Term::var(&y);
    avoid.insert(y.clone());
    let z = fresh("z", &avoid);
    let zp = Term::var(&z).pow(p as u32);
    let big_or = Formula::or_all(
        params
            .iter()
            .map(|c| {
                let cy = c.clone() * yt.clone();
                Formula::exists(
                    &z,
                    Formula::And(vec![
                        phi_frac(p, cy.clone(), zp.clone()),
                        phi_frac(p, zp.clone(), cy),
                    ]),
                )
            })
            .collect(),
    );
    let nonzero = Formula::ne(yt.clone(), Term::Zero);
    let first = Formula::forall(
        &y,
        Formula::implies(
            Formula::And(vec![
                nonzero.clone(),
                phi_on(p, yt.clone()),
                phi_frac(p, x.clone(), yt.clone()),
            ]),
            big_or.clone(),
        ),
    );
    let second = Formula::forall(
        &y,
        Formula::implies(
            Formula::And(vec![
                nonzero,
                Formula::not(phi_on(p, yt.clone())),
                phi_frac(p, yt, x.clone()),
            ]),
            big_or,
        ),
    );
    (first, second)
}

fn param_count(p: u64, n: u32) -> Result<usize> {
    p.checked_pow(n)
        .filter(|&c| c <= 1 << 16)
        .map(|c| c as usize)
        .ok_or_else(|| Error::Precondition(format!("{p}^{n} parameters is too many")))
}

/// `ψ_(p,n)(t)` with the parameters given as terms.
pub fn psi_pn_on(p: u64, n: u32, params: &[Term], t: Term) -> Result<Formula> {
    check_prime(p)?;
    let expected = param_count(p, n)?;
    if params.len() != expected {
        return Err(Error::ParamCount {
            expected,
            got: params.len(),
        });
    }
    let (first, second) = psi_pn_clauses(p, &t, params);
    Ok(Formula::Or(vec![
        Formula::And(vec![phi_on(p, t.clone()), first]),
        Formula::And(vec![Formula::not(phi_on(p, t)), second]),
    ]))
}

/// `φ_(p,n)(t) = φ_p(t) or ψ_(p,n)(t)`.
pub fn phi_pn_on(p: u64, n: u32, params: &[Term], t: Term) -> Result<Formula> {
    let psi = psi_pn_on(p, n, params, t.clone())?;
    Ok(Formula::Or(vec![phi_on(p, t), psi]))
}

/// `ψ_p(x)`.
pub fn build_psi_p(p: u64) -> Result<Formula> {
    check_prime(p)?;
    Ok(psi_on(p, Term::var("x")))
}

/// `φ_p(x)`, which defines the valuation ring of `v_p`.
pub fn build_phi_p(p: u64) -> Result<Formula> {
    check_prime(p)?;
    Ok(phi_on(p, Term::var("x")))
}

/// `ψ_(p,n)(x)` with series parameters.
pub fn build_psi_pn(p: u64, n: u32, params: &[HahnSeries]) -> Result<Formula> {
    let params: Vec<Term> = params.iter().cloned().map(Term::Const).collect();
    psi_pn_on(p, n, &params, Term::var("x"))
}

/// `φ_(p,n)(x)`, which defines the valuation ring of `v_(p,n)` when the
/// parameters come from [`choose_params`].
pub fn build_phi_pn(p: u64, n: u32, params: &[HahnSeries]) -> Result<Formula> {
    let params: Vec<Term> = params.iter().cloned().map(Term::Const).collect();
    phi_pn_on(p, n, &params, Term::var("x"))
}

/// `p^n` monomials whose exponents meet every coset of `pH` in
/// `H = G_(p,n)`, the first coordinate varying fastest. The list is padded
/// with `1` when `H/pH` has fewer than `p^n` elements.
pub fn choose_params(k: &HahnField, p: u64, n: u32) -> Result<Vec<HahnSeries>> {
    check_prime(p)?;
    let want = param_count(p, n)?;
    let w = &*k.group;
    let h = g_pn(w, p, n)?;
    if h.inner.is_some() {
        return Err(Error::NonEffective(h.seg));
    }
    // per flat coordinate: the residues it ranges over
    let mut ranges: Vec<u64> = Vec::with_capacity(w.width());
    for (j, c) in w.components.iter().enumerate() {
        let in_h = j >= h.seg;
        let (width, reps) = match c {
            ComponentKind::Zed => (1, p),
            ComponentKind::Rat => (1, 1),
            ComponentKind::LocZ(q) => (1, if *q == p { p } else { 1 }),
            ComponentKind::FreeReal(g) => (g.len(), p),
            _ => return Err(Error::NonEffective(j)),
        };
        ranges.extend(std::iter::repeat_n(if in_h { reps } else { 1 }, width));
    }
    let total: u64 = ranges.iter().product();
    if total as usize > want {
        return Err(Error::Precondition(format!(
            "|H/pH| = {total} exceeds {p}^{n}"
        )));
    }
    let mut out = Vec::with_capacity(want);
    let mut digits = vec![0u64; ranges.len()];
    for _ in 0..total {
        let flat: Vec<BigRational> = digits
            .iter()
            .map(|&d| BigRational::from_integer(BigInt::from(d)))
            .collect();
        out.push(k.monomial(BigRational::one(), w.element(&flat)?)?);
        for (d, r) in digits.iter_mut().zip(&ranges) {
            *d += 1;
            if *d < *r {
                break;
            }
            *d = 0;
        }
    }
    while out.len() < want {
        out.push(k.monomial(BigRational::one(), w.zero()?)?);
    }
    debug_assert!(out.iter().all(|s| !s.terms()[0].1.is_zero()));
    Ok(out)
}
