use std::sync::Arc;

use super::build::{frac_apply, phi_on, phi_pn_on, psi_on, psi_pn_on};
use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::hahn::series;
use crate::oag::LexWord;
use crate::syntax::Cursor;

const KEYWORDS: [&str; 7] = ["exists", "forall", "and", "or", "not", "true", "false"];

/// Parses the formula DSL:
///
/// ```text
/// formula := ("exists" | "forall") var ("," var)* "." formula | imp
/// imp     := or ["->" (imp | quantified formula)]
/// or      := and ("or" and)*        and := unary ("and" unary)*
/// unary   := "not" unary | "true" | "false" | "(" formula ")" | macro | term ("=" | "!=") term
/// macro   := ("psi_p" | "phi_p") "[" p "]" "(" term ")"
///          | ("psi_pn" | "phi_pn") "[" p "," n "]" "(" "params" "=" "[" term,* "]" ")" "(" term ")"
/// term    := sums and products of  "-" term | atom ["^" nat] ,  with "/" for fractions
/// atom    := nat | var | "(" term ")" | "{" series "}"
/// ```
///
/// Free variables are allowed; series constants in braces need
/// [`parse_formula_over`].
///
/// ```
/// use arclab::logic::{build_phi_p, parse_formula};
/// assert_eq!(parse_formula("phi_p[3](x)").unwrap(), build_phi_p(3).unwrap());
/// let f = parse_formula("exists y. y^2 = x").unwrap();
/// assert_eq!(f.to_string(), "exists y. y^2 = x");
/// ```
pub fn parse_formula(text: &str) -> Result<Formula> {
    Parser {
        cur: Cursor::new(text),
        group: None,
    }
    .run()
}

/// Like [`parse_formula`], with `{...}` series constants over `group`.
pub fn parse_formula_over(text: &str, group: &Arc<LexWord>) -> Result<Formula> {
    Parser {
        cur: Cursor::new(text),
        group: Some(group),
    }
    .run()
}

struct Parser<'a> {
    cur: Cursor<'a>,
    group: Option<&'a Arc<LexWord>>,
}

impl Parser<'_> {
    fn run(mut self) -> Result<Formula> {
        let f = self.formula()?;
        self.cur.expect_end()?;
        Ok(f)
    }

    fn quantifier(&mut self) -> Option<bool> {
        if self.cur.eat_keyword("exists") {
            Some(false)
        } else if self.cur.eat_keyword("forall") {
            Some(true)
        } else {
            None
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let Some(universal) = self.quantifier() else {
            return self.implication();
        };
        let mut vars = vec![self.variable()?];
        while self.cur.eat(",") {
            vars.push(self.variable()?);
        }
        self.cur.expect(".")?;
        let mut body = self.formula()?;
        for v in vars.iter().rev() {
            body = if universal {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            };
        }
        Ok(body)
    }

    fn variable(&mut self) -> Result<String> {
        match self.cur.peek_ident() {
            Some(id) if !KEYWORDS.contains(&id) => Ok(self.cur.ident().unwrap().to_string()),
            _ => self.cur.error("expected a variable"),
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let a = self.disjunction()?;
        if !self.cur.eat("->") {
            return Ok(a);
        }
        let pos = self.cur.pos();
        let b = if self.quantifier().is_some() {
            self.cur.reset(pos);
            self.formula()?
        } else {
            self.implication()?
        };
        Ok(Formula::implies(a, b))
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut items = vec![self.conjunction()?];
        while self.cur.eat_keyword("or") {
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut items = vec![self.unary()?];
        while self.cur.eat_keyword("and") {
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.cur.eat_keyword("not") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.cur.eat_keyword("true") {
            return Ok(Formula::True);
        }
        if self.cur.eat_keyword("false") {
            return Ok(Formula::False);
        }
        if let Some(name @ ("psi_p" | "phi_p" | "psi_pn" | "phi_pn")) = self.cur.peek_ident() {
            self.cur.ident();
            return self.macro_call(name);
        }
        if self.cur.peek() == Some('(') {
            // either a parenthesised formula or a comparison of terms
            let start = self.cur.pos();
            match self.comparison() {
                Ok(f) => return Ok(f),
                Err(term_err) => {
                    let term_pos = self.cur.pos();
                    self.cur.reset(start);
                    self.cur.expect("(")?;
                    return match self.formula().and_then(|f| self.cur.expect(")").map(|_| f)) {
                        Ok(f) => Ok(f),
                        Err(e) if error_pos(&e) >= term_pos => Err(e),
                        Err(_) => Err(term_err),
                    };
                }
            }
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Formula> {
        let l = self.term()?;
        if self.cur.eat("!=") {
            return Ok(Formula::ne(l, self.term()?));
        }
        if self.cur.eat("=") {
            return Ok(Formula::eq(l, self.term()?));
        }
        self.cur.error("expected `=` or `!=`")
    }

    fn macro_call(&mut self, name: &str) -> Result<Formula> {
        self.cur.expect("[")?;
        let p = self.cur.natural_u64()?;
        let n = if name.ends_with("pn") {
            self.cur.expect(",")?;
            let n = self.cur.natural_u64()?;
            Some(u32::try_from(n).or_else(|_| self.cur.error("n too large"))?)
        } else {
            None
        };
        self.cur.expect("]")?;
        let mut params = Vec::new();
        if n.is_some() {
            self.cur.expect("(")?;
            if !self.cur.eat_keyword("params") {
                return self.cur.error("expected `params=[...]`");
            }
            self.cur.expect("=")?;
            self.cur.expect("[")?;
            if !self.cur.eat("]") {
                loop {
                    params.push(self.term()?);
                    if self.cur.eat("]") {
                        break;
                    }
                    self.cur.expect(",")?;
                }
            }
            self.cur.expect(")")?;
        }
        self.cur.expect("(")?;
        let arg = self.term()?;
        self.cur.expect(")")?;
        if !crate::primes::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let build = |t: Term| -> Result<Formula> {
            Ok(match (name, n) {
                ("psi_p", _) => psi_on(p, t),
                ("phi_p", _) => phi_on(p, t),
                ("psi_pn", Some(n)) => psi_pn_on(p, n, &params, t)?,
                (_, Some(n)) => phi_pn_on(p, n, &params, t)?,
                _ => unreachable!(),
            })
        };
        match arg {
            Term::Div(a, b) => {
                build(Term::Zero)?;
                Ok(frac_apply(*a, *b, |w| build(w).expect("validated above")))
            }
            t => build(t),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.product()?;
        loop {
            if self.cur.rest().trim_start().starts_with("->") {
                return Ok(t);
            }
            if self.cur.eat("+") {
                t = t + self.product()?;
            } else if self.cur.eat("-") {
                t = t - self.product()?;
            } else {
                return Ok(t);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut t = self.signed()?;
        loop {
            if self.cur.eat("*") {
                t = t * self.signed()?;
            } else if self.cur.eat("/") {
                t = t / self.signed()?;
            } else {
                return Ok(t);
            }
        }
    }

    fn signed(&mut self) -> Result<Term> {
        if self.cur.rest().trim_start().starts_with("->") {
            return self.cur.error("expected a term");
        }
        if self.cur.eat("-") {
            return Ok(self.signed()?.neg());
        }
        let base = self.primary()?;
        if self.cur.eat("^") {
            let k = self.cur.natural_u64()?;
            let k = u32::try_from(k).or_else(|_| self.cur.error("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Term> {
        if self.cur.eat("(") {
            let t = self.term()?;
            self.cur.expect(")")?;
            return Ok(t);
        }
        if self.cur.eat("{") {
            let Some(g) = self.group else {
                return self.cur.error("series constants need a group");
            };
            let s = series(g, &mut self.cur)?;
            self.cur.expect("}")?;
            return Ok(Term::Const(s));
        }
        if let Some(n) = self.cur.natural() {
            return Ok(match u8::try_from(&n) {
                Ok(0) => Term::Zero,
                Ok(1) => Term::One,
                _ => Term::Int(n),
            });
        }
        Ok(Term::Var(self.variable()?))
    }
}

fn error_pos(e: &Error) -> usize {
    match e {
        Error::Syntax { pos, .. } => *pos,
        _ => usize::MAX,
    }
}
