use super::*;
use proptest::prelude::*;

fn g(s: &str) -> LexWord {
    parse_group(s).unwrap()
}

#[test]
fn parses_library_words() {
    assert_eq!(
        g("lex(Z, Q)").components,
        vec![ComponentKind::Zed, ComponentKind::Rat]
    );
    assert_eq!(g("lex(Q)").components, vec![ComponentKind::Rat]);
    assert_eq!(
        g("lex(real(1, pi))").components,
        vec![ComponentKind::FreeReal(vec![
            Gen::Rational(BigRational::one()),
            Gen::Pi
        ])]
    );
    assert_eq!(g("lex(omega_tower(0))"), g("lex(omega_tower(start=0))"));
    assert_eq!(
        g("lex(poly_module(Zloc(2), pi))").components,
        vec![ComponentKind::PolyModule {
            base: 2,
            gen: Gen::Pi
        }]
    );
}

#[test]
fn parse_errors() {
    assert!(matches!(
        parse_group("lex(Z, W)"),
        Err(Error::UnknownComponent(_))
    ));
    assert!(matches!(
        parse_group("lex(real())"),
        Err(Error::InvalidComponent(_))
    ));
    assert!(matches!(
        parse_group("lex(Z,"),
        Err(Error::Syntax { pos: 6, .. })
    ));
    assert!(matches!(
        parse_group("lex(Zloc(4))"),
        Err(Error::Syntax { .. })
    ));
    assert!(matches!(
        parse_group("lex(real(1, 2))"),
        Err(Error::InvalidComponent(_))
    ));
    assert!(matches!(parse_group("lex(Z) x"), Err(Error::Syntax { .. })));
}

#[test]
fn addition_examples() {
    let zq = g("lex(Z, Q)");
    let a = zq.element_from(&[(1, 1), (1, 2)]).unwrap();
    let b = zq.element_from(&[(2, 1), (-1, 2)]).unwrap();
    assert_eq!(
        zq.add(&a, &b).unwrap(),
        zq.element_from(&[(3, 1), (0, 1)]).unwrap()
    );
    assert!(zq.add(&a, &zq.neg(&a).unwrap()).unwrap().is_zero());

    let zpi = g("lex(real(1, pi))");
    let one = zpi.element_from(&[(1, 1), (0, 1)]).unwrap();
    let pi = zpi.element_from(&[(0, 1), (1, 1)]).unwrap();
    assert_eq!(
        zpi.add(&one, &pi).unwrap(),
        zpi.element_from(&[(1, 1), (1, 1)]).unwrap()
    );
}

#[test]
fn comparison_examples() {
    let zq = g("lex(Z, Q)");
    let a = zq.element_from(&[(1, 1), (-100, 1)]).unwrap();
    let b = zq.element_from(&[(0, 1), (100, 1)]).unwrap();
    assert_eq!(zq.cmp(&a, &b).unwrap(), Ordering::Greater);
    assert_eq!(zq.cmp(&a, &a).unwrap(), Ordering::Equal);

    let zpi = g("lex(real(1, pi))");
    let x = zpi.element_from(&[(4, 1), (-1, 1)]).unwrap();
    assert_eq!(
        zpi.cmp(&x, &zpi.zero().unwrap()).unwrap(),
        Ordering::Greater
    );
    let x = zpi.element_from(&[(3, 1), (-1, 1)]).unwrap();
    assert_eq!(zpi.cmp(&x, &zpi.zero().unwrap()).unwrap(), Ordering::Less);
    // 355 − 113π is positive but about 3e-5
    let close = zpi.element_from(&[(355, 1), (-113, 1)]).unwrap();
    assert_eq!(
        zpi.cmp(&close, &zpi.zero().unwrap()).unwrap(),
        Ordering::Greater
    );
    let x = zpi.element_from(&[(-22, 1), (7, 1)]).unwrap();
    assert_eq!(zpi.cmp(&x, &zpi.zero().unwrap()).unwrap(), Ordering::Less);
}

#[test]
fn divisibility_examples() {
    let zq = g("lex(Z, Q)");
    assert!(zq
        .p_divisible(&zq.element_from(&[(2, 1), (1, 3)]).unwrap(), 2)
        .unwrap());
    assert!(!zq
        .p_divisible(&zq.element_from(&[(1, 1), (0, 1)]).unwrap(), 2)
        .unwrap());
    let zpi = g("lex(real(1, pi))");
    assert!(zpi
        .p_divisible(&zpi.element_from(&[(2, 1), (4, 1)]).unwrap(), 2)
        .unwrap());

    let loc = g("lex(Zloc(3))");
    assert!(loc
        .p_divisible(&loc.element_from(&[(1, 2)]).unwrap(), 5)
        .unwrap());
    assert!(!loc
        .p_divisible(&loc.element_from(&[(1, 2)]).unwrap(), 3)
        .unwrap());
    assert!(loc
        .p_divisible(&loc.element_from(&[(6, 5)]).unwrap(), 3)
        .unwrap());
    assert!(matches!(
        loc.p_divisible(&loc.zero().unwrap(), 4),
        Err(Error::NotPrime(4))
    ));
}

#[test]
fn element_validation() {
    let zq = g("lex(Z, Q)");
    assert!(matches!(
        zq.element_from(&[(1, 2), (0, 1)]),
        Err(Error::Shape(_))
    ));
    assert!(matches!(zq.element_from(&[(1, 1)]), Err(Error::Shape(_))));
    let loc = g("lex(Zloc(2))");
    assert!(matches!(loc.element_from(&[(1, 4)]), Err(Error::Shape(_))));
    let tower = g("lex(Z, omega_tower(0))");
    assert!(matches!(tower.zero(), Err(Error::NonEffective(1))));
}

#[test]
fn free_real_matches_rational_order_on_unit_coordinate() {
    let zpi = g("lex(real(1, pi))");
    for (a, b) in [(3, 5), (-2, 7), (4, 4), (0, -1)] {
        let x = zpi.element_from(&[(a, 1), (0, 1)]).unwrap();
        let y = zpi.element_from(&[(b, 1), (0, 1)]).unwrap();
        assert_eq!(zpi.cmp(&x, &y).unwrap(), a.cmp(&b));
    }
}

#[test]
fn component_closed_forms() {
    use QuotientExponent::*;
    assert_eq!(ComponentKind::Zed.quotient_exponent(5), Finite(1));
    assert_eq!(ComponentKind::Rat.quotient_exponent(5), Finite(0));
    assert_eq!(ComponentKind::LocZ(3).quotient_exponent(3), Finite(1));
    assert_eq!(ComponentKind::LocZ(3).quotient_exponent(2), Finite(0));
    let tower = ComponentKind::OmegaTower { start: 0 };
    assert_eq!(tower.quotient_exponent(2), Finite(0));
    assert_eq!(tower.quotient_exponent(3), Finite(1));
    assert_eq!(tower.divisible_primes(), PrimeSet::of([2]));
    let poly = ComponentKind::PolyModule {
        base: 2,
        gen: Gen::Pi,
    };
    assert_eq!(poly.quotient_exponent(2), Infinite);
    assert_eq!(poly.quotient_exponent(3), Finite(0));
}

fn arb_word() -> impl Strategy<Value = LexWord> {
    let comp = prop_oneof![
        Just(ComponentKind::Zed),
        Just(ComponentKind::Rat),
        prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(ComponentKind::LocZ),
        Just(ComponentKind::FreeReal(vec![
            Gen::Rational(BigRational::one()),
            Gen::Pi
        ])),
        Just(ComponentKind::FreeReal(vec![Gen::Pi])),
        (0u64..4).prop_map(|start| ComponentKind::OmegaTower { start }),
        prop::sample::select(vec![2u64, 3])
            .prop_map(|base| ComponentKind::PolyModule { base, gen: Gen::Pi }),
    ];
    prop::collection::vec(comp, 1..5).prop_map(|c| LexWord::new(c).unwrap())
}

fn effective_word() -> impl Strategy<Value = LexWord> {
    prop::sample::select(vec![
        "lex(Z, Q)",
        "lex(Z, Z)",
        "lex(real(1, pi))",
        "lex(Zloc(2), Q)",
        "lex(Q, real(pi), Zloc(3))",
    ])
    .prop_map(g)
}

fn arb_element(w: &LexWord) -> impl Strategy<Value = GroupElement> {
    let w = w.clone();
    let n = w.width();
    prop::collection::vec((-12i64..12, prop::sample::select(vec![1i64, 3, 5, 9])), n).prop_map(
        move |v| {
            let mut flat = Vec::new();
            let mut i = 0;
            for c in &w.components {
                for _ in 0..c.width() {
                    let (num, den) = v[i];
                    let den = match c {
                        ComponentKind::Rat => den,
                        ComponentKind::LocZ(q) if !(den as u64).is_multiple_of(*q) => den,
                        _ => 1,
                    };
                    flat.push(BigRational::new(num.into(), den.into()));
                    i += 1;
                }
            }
            w.element(&flat).unwrap()
        },
    )
}

fn word_and_three() -> impl Strategy<Value = (LexWord, GroupElement, GroupElement, GroupElement)> {
    effective_word().prop_flat_map(|w| {
        (arb_element(&w), arb_element(&w), arb_element(&w))
            .prop_map(move |(a, b, c)| (w.clone(), a, b, c))
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(w in arb_word()) {
        prop_assert_eq!(parse_group(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn order_is_translation_invariant((w, a, b, c) in word_and_three()) {
        let lhs = w.cmp(&a, &b).unwrap();
        let rhs = w.cmp(&w.add(&a, &c).unwrap(), &w.add(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn group_laws((w, a, b, c) in word_and_three()) {
        let ab_c = w.add(&w.add(&a, &b).unwrap(), &c).unwrap();
        let a_bc = w.add(&a, &w.add(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(w.add(&a, &b).unwrap(), w.add(&b, &a).unwrap());
        prop_assert_eq!(w.add(&a, &w.zero().unwrap()).unwrap(), a.clone());
    }

    #[test]
    fn divisibility_is_constructive((w, a, _b, _c) in word_and_three(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let div = w.p_divisible(&a, p).unwrap();
        let q = w.divide(&a, p).unwrap();
        prop_assert_eq!(div, q.is_some());
        if let Some(b) = q {
            prop_assert_eq!(w.scale(&b, p as i64).unwrap(), a.clone());
        }
        // p·a is always divisible
        let pa = w.scale(&a, p as i64).unwrap();
        prop_assert!(w.p_divisible(&pa, p).unwrap());
    }
}
