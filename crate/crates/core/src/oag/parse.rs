use super::{ComponentKind, Gen, LexWord};
use crate::error::{Error, Result};
use crate::syntax::Cursor;

/// Parses the group DSL:
///
/// ```text
/// word := "lex(" comp ("," comp)* ")"
/// comp := "Z" | "Q" | "Zloc(" prime ")" | "real(" gen ("," gen)* ")"
///       | "omega_tower(" ["start="] nat ")" | "poly_module(Zloc(" prime ")," gen ")"
/// gen  := "pi" | rational
/// ```
pub fn parse_group(text: &str) -> Result<LexWord> {
    let mut cur = Cursor::new(text);
    if !cur.eat_keyword("lex") {
        return cur.error("expected `lex(`");
    }
    cur.expect("(")?;
    let mut comps = Vec::new();
    loop {
        comps.push(component(&mut cur)?);
        if cur.eat(")") {
            break;
        }
        cur.expect(",")?;
    }
    cur.expect_end()?;
    LexWord::new(comps)
}

fn prime_arg(cur: &mut Cursor) -> Result<u64> {
    let pos = cur.pos();
    let q = cur.natural_u64()?;
    if !crate::primes::is_prime(q) {
        return Err(Error::Syntax {
            pos,
            msg: format!("{q} is not prime"),
        });
    }
    Ok(q)
}

fn generator(cur: &mut Cursor) -> Result<Gen> {
    if cur.eat_keyword("pi") {
        Ok(Gen::Pi)
    } else {
        Ok(Gen::Rational(cur.rational()?))
    }
}

fn component(cur: &mut Cursor) -> Result<ComponentKind> {
    let Some(name) = cur.ident() else {
        return cur.error("expected a component");
    };
    let kind = match name {
        "Z" => ComponentKind::Zed,
        "Q" => ComponentKind::Rat,
        "Zloc" => {
            cur.expect("(")?;
            let q = prime_arg(cur)?;
            cur.expect(")")?;
            ComponentKind::LocZ(q)
        }
        "real" => {
            cur.expect("(")?;
            let mut gens = Vec::new();
            if cur.eat(")") {
                return Err(Error::InvalidComponent(
                    "real() needs at least one generator".into(),
                ));
            }
            loop {
                gens.push(generator(cur)?);
                if cur.eat(")") {
                    break;
                }
                cur.expect(",")?;
            }
            ComponentKind::FreeReal(gens)
        }
        "omega_tower" => {
            cur.expect("(")?;
            if cur.eat_keyword("start") {
                cur.expect("=")?;
            }
            let start = cur.natural_u64()?;
            cur.expect(")")?;
            ComponentKind::OmegaTower { start }
        }
        "poly_module" => {
            cur.expect("(")?;
            if !cur.eat_keyword("Zloc") {
                return cur.error("expected `Zloc(`");
            }
            cur.expect("(")?;
            let base = prime_arg(cur)?;
            cur.expect(")")?;
            cur.expect(",")?;
            let gen = generator(cur)?;
            cur.expect(")")?;
            ComponentKind::PolyModule { base, gen }
        }
        other => return Err(Error::UnknownComponent(other.to_string())),
    };
    Ok(kind)
}
