use super::*;
use crate::oag::{parse_group, GroupElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use QuotientExponent::{Finite, Infinite};

fn g(s: &str) -> LexWord {
    parse_group(s).unwrap()
}

fn seg(j: usize) -> ConvexCut {
    ConvexCut::seg(j)
}

fn inner(m: u64) -> ConvexCut {
    ConvexCut {
        seg: 0,
        inner: Some(m),
    }
}

#[test]
fn chains() {
    let zq = g("lex(Z, Q)");
    assert_eq!(
        convex_cuts(&zq).collect::<Vec<_>>(),
        vec![ConvexCut::TOP, seg(1), seg(2)]
    );
    let q = g("lex(Q)");
    assert_eq!(
        convex_cuts(&q).collect::<Vec<_>>(),
        vec![ConvexCut::TOP, seg(1)]
    );
    let c2 = g("lex(omega_tower(0))");
    let head: Vec<_> = convex_cuts(&c2).take(4).collect();
    assert_eq!(head, vec![ConvexCut::TOP, inner(2), inner(3), inner(4)]);
    let bounded = convex_cuts_bounded(&c2, 3);
    assert_eq!(
        bounded,
        vec![ConvexCut::TOP, inner(2), inner(3), inner(4), seg(1)]
    );
    // the chain is strictly decreasing
    assert!(bounded.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn tower_cuts_normalise() {
    let c2 = g("lex(omega_tower(0))");
    assert_eq!(ConvexCut::inner(&c2, 0, 1).unwrap(), ConvexCut::TOP);
    assert_eq!(ConvexCut::inner(&c2, 0, 0).unwrap(), ConvexCut::TOP);
    assert!(validate_cut(
        &c2,
        ConvexCut {
            seg: 0,
            inner: Some(1)
        }
    )
    .is_err());
    let zq = g("lex(Z, Q)");
    assert!(ConvexCut::inner(&zq, 0, 3).is_err());
    assert!(validate_cut(&zq, seg(3)).is_err());
}

#[test]
fn divisible_suffixes() {
    let zq = g("lex(Z, Q)");
    assert!(suffix_divisible_primes(&zq, seg(1)).unwrap().is_all());
    assert!(suffix_divisible_primes(&zq, ConvexCut::TOP)
        .unwrap()
        .is_empty());
    assert!(suffix_divisible_primes(&zq, seg(2)).unwrap().is_all());
    let c2 = g("lex(omega_tower(0))");
    assert_eq!(
        suffix_divisible_primes(&c2, inner(3)).unwrap(),
        PrimeSet::of([2, 3, 5])
    );
    assert_eq!(
        suffix_divisible_primes(&c2, ConvexCut::TOP).unwrap(),
        PrimeSet::of([2])
    );
}

#[test]
fn maximal_divisible_subgroups() {
    let zq = g("lex(Z, Q)");
    assert_eq!(max_p_divisible(&zq, 3).unwrap(), seg(1));
    assert_eq!(max_divisible(&zq), seg(1));
    let zpi = g("lex(real(1, pi))");
    for p in [2, 3, 5, 7] {
        assert_eq!(max_p_divisible(&zpi, p).unwrap(), seg(1));
    }
    let c2 = g("lex(omega_tower(0))");
    assert_eq!(max_p_divisible(&c2, 2).unwrap(), ConvexCut::TOP);
    assert_eq!(max_p_divisible(&c2, 3).unwrap(), inner(2));
    assert_eq!(max_p_divisible(&c2, 5).unwrap(), inner(3));
    assert_eq!(max_p_divisible(&c2, 29).unwrap(), inner(10));
    assert_eq!(max_divisible(&c2), seg(1));
    assert_eq!(max_divisible(&g("lex(Q)")), ConvexCut::TOP);
}

#[test]
fn quotient_exponents() {
    let zq = g("lex(Z, Q)");
    assert_eq!(n_p(&zq, 5).unwrap(), Finite(1));
    let zpi = g("lex(real(1, pi))");
    for p in [2, 3, 5, 7, 11] {
        assert_eq!(n_p(&zpi, p).unwrap(), Finite(2));
    }
    let c2 = g("lex(omega_tower(0))");
    assert_eq!(n_p(&c2, 2).unwrap(), Finite(0));
    for p in [3, 5, 7, 101] {
        assert_eq!(n_p(&c2, p).unwrap(), Finite(1));
    }
    assert_eq!(
        quotient_exponent(&c2, inner(3), ConvexCut::TOP, 3).unwrap(),
        Finite(1)
    );
    assert_eq!(
        quotient_exponent(&c2, inner(3), ConvexCut::TOP, 7).unwrap(),
        Finite(0)
    );
    let c0 = g("lex(poly_module(Zloc(2), pi))");
    assert_eq!(n_p(&c0, 2).unwrap(), Infinite);
    assert_eq!(n_p(&c0, 3).unwrap(), Finite(0));
    assert!(quotient_exponent(&zq, ConvexCut::TOP, seg(1), 2).is_err());
    assert!(matches!(n_p(&zq, 6), Err(Error::NotPrime(6))));
}

#[test]
fn g_pn_values() {
    let zq = g("lex(Z, Q)");
    assert_eq!(g_pn(&zq, 2, 0).unwrap(), seg(1));
    assert_eq!(g_pn(&zq, 2, 1).unwrap(), ConvexCut::TOP);
    let zpi = g("lex(real(1, pi))");
    assert_eq!(g_pn(&zpi, 2, 1).unwrap(), seg(1));
    assert_eq!(g_pn(&zpi, 2, 2).unwrap(), ConvexCut::TOP);
    let c0 = g("lex(poly_module(Zloc(2), pi))");
    assert_eq!(g_pn(&c0, 2, 40).unwrap(), seg(1));
    let zz = g("lex(Z, Z)");
    assert_eq!(g_pn(&zz, 3, 1).unwrap(), seg(1));
}

#[test]
fn dp_minimality() {
    assert!(is_dp_minimal(&g("lex(Z, Q)")));
    assert!(is_dp_minimal(&g("lex(omega_tower(0))")));
    assert!(is_dp_minimal(&g("lex(real(1, pi))")));
    assert!(!is_dp_minimal(&g("lex(poly_module(Zloc(2), pi))")));
    assert!(!is_dp_minimal(&g("lex(Z, poly_module(Zloc(7), pi))")));
}

#[test]
fn divisibility_condition() {
    assert!(thm_condition_prime(&g("lex(Z, Q)")).is_all());
    assert!(thm_condition_prime(&g("lex(omega_tower(0))")).is_empty());
    assert!(thm_condition_prime(&g("lex(real(1, pi))")).is_all());
    assert_eq!(
        thm_condition_prime(&g("lex(Zloc(2), Q)")),
        PrimeSet::of([2])
    );
    assert_eq!(
        thm_condition_prime(&g("lex(Q, Zloc(3))")),
        PrimeSet::of([3])
    );
}

#[test]
fn regularity() {
    let zq = g("lex(Z, Q)");
    let zz = g("lex(Z, Z)");
    for p in [2, 3, 5] {
        assert!(is_p_regular(&zq, seg(2), seg(1), p).unwrap());
        assert!(!is_p_regular(&zz, seg(2), ConvexCut::TOP, p).unwrap());
        assert!(is_p_regular(&zq, seg(1), ConvexCut::TOP, p).unwrap());
    }
    assert!(matches!(
        is_p_regular(&zq, seg(1), seg(1), 2),
        Err(Error::Precondition(_))
    ));
    let c2 = g("lex(omega_tower(0))");
    assert!(is_p_regular(&c2, seg(1), inner(3), 5).unwrap());
    assert!(!is_p_regular(&c2, seg(1), inner(3), 7).unwrap());
    // one summand is archimedean
    assert!(is_p_regular(&c2, inner(4), inner(3), 5).unwrap());
}

#[test]
fn certificates() {
    let zq = g("lex(Z, Q)");
    let cert = non_definability_certificate(&zq, seg(2)).unwrap().unwrap();
    assert_eq!(cert.entries.len(), 1);
    assert!(cert.entries[0].primes.is_all());
    assert_eq!(cert.entries[0].low, seg(2));
    assert_eq!(cert.entries[0].high, CutRule::Fixed(seg(1)));
    assert_eq!(cert.entries[0].convention, Convention::BottomDivisible);
    assert!(non_definability_certificate(&zq, seg(1)).unwrap().is_none());
    assert!(non_definability_certificate(&zq, ConvexCut::TOP)
        .unwrap()
        .is_none());

    let c2 = g("lex(omega_tower(0))");
    let cert = non_definability_certificate(&c2, seg(1)).unwrap().unwrap();
    for (j, p) in [(0, 2), (1, 3), (2, 5), (3, 7), (9, 29)] {
        let (low, high, _) = cert.witness(&c2, p);
        assert_eq!(low, seg(1));
        assert_eq!(high, ConvexCut::inner(&c2, 0, j + 1).unwrap());
        assert!(cert.holds_at(&c2, p));
    }

    // v_K on lex(Z, Z) is definable, so no certificate may exist
    let zz = g("lex(Z, Z)");
    assert!(non_definability_certificate(&zz, seg(2)).unwrap().is_none());
}

#[test]
fn certificate_below_a_tower() {
    let w = g("lex(omega_tower(0), Z, Q)");
    let cert = non_definability_certificate(&w, seg(1)).unwrap().unwrap();
    for p in [2, 3, 5, 7, 11] {
        assert!(cert.holds_at(&w, p), "p = {p}");
    }
    // the Q cut sits below Z, which is not divisible for any prime
    assert!(non_definability_certificate(&w, seg(2)).unwrap().is_none());
}

#[test]
fn definable_image() {
    let zq = g("lex(Z, Q)");
    let fams = definable_families(&zq);
    assert_eq!(fams.len(), 2);
    assert_eq!(fams[0].rule, CutRule::Fixed(seg(1)));
    assert_eq!(
        fams[0].labels,
        vec![PnLabel {
            primes: PrimeSet::all(),
            n_lo: 0,
            n_hi: 0
        }]
    );
    assert_eq!(fams[1].rule, CutRule::Fixed(ConvexCut::TOP));
    assert!(!in_definable_image(&zq, seg(2)));

    let zpi = g("lex(real(1, pi))");
    let fams = definable_families(&zpi);
    assert_eq!(
        fams[0].labels,
        vec![PnLabel {
            primes: PrimeSet::all(),
            n_lo: 0,
            n_hi: 1
        }]
    );

    let c2 = g("lex(omega_tower(0))");
    assert!(in_definable_image(&c2, inner(2)));
    assert!(in_definable_image(&c2, inner(7)));
    assert!(in_definable_image(&c2, ConvexCut::TOP));
    assert!(!in_definable_image(&c2, seg(1)));
    let top = labels_of(&c2, ConvexCut::TOP);
    assert_eq!(
        top,
        vec![(PrimeSet::of([2]), 0), (PrimeSet::all_except([2]), 1)]
    );
    assert_eq!(labels_of(&c2, inner(3)), vec![(PrimeSet::of([5]), 0)]);
}

/// `|G/pG|` counted by brute force: classes of `sum c_i e_i` with
/// `0 <= c_i < p` over the generators `e_i`, modulo `pG`.
fn brute_n_p(w: &LexWord, p: u64) -> u32 {
    let gens: Vec<GroupElement> = (0..w.width())
        .map(|i| {
            let mut flat = vec![BigRational::from_integer(BigInt::from(0)); w.width()];
            flat[i] = BigRational::from_integer(BigInt::from(1));
            w.element(&flat).unwrap()
        })
        .collect();
    let mut reps: Vec<GroupElement> = vec![w.zero().unwrap()];
    for e in &gens {
        let mut next = Vec::new();
        for r in &reps {
            for c in 0..p as i64 {
                let cand = w.add(r, &w.scale(e, c).unwrap()).unwrap();
                let new = next
                    .iter()
                    .all(|x: &GroupElement| !w.p_divisible(&w.sub(x, &cand).unwrap(), p).unwrap());
                if new {
                    next.push(cand);
                }
            }
        }
        reps = next;
    }
    let mut n = 0;
    let mut size = reps.len() as u64;
    while size > 1 {
        assert_eq!(size % p, 0);
        size /= p;
        n += 1;
    }
    n
}

/// Largest suffix whose component generators are all `p`-divisible.
fn brute_max_p_divisible(w: &LexWord, p: u64) -> ConvexCut {
    let divisible = |j: usize| {
        let e = w.unit(j).unwrap();
        let second = match &w.components[j] {
            ComponentKind::FreeReal(gens) if gens.len() > 1 => {
                let mut flat = vec![BigRational::from_integer(BigInt::from(0)); w.width()];
                let offset: usize = w.components[..j].iter().map(ComponentKind::width).sum();
                flat[offset + 1] = BigRational::from_integer(BigInt::from(1));
                Some(w.element(&flat).unwrap())
            }
            _ => None,
        };
        w.p_divisible(&e, p).unwrap() && second.is_none_or(|s| w.p_divisible(&s, p).unwrap())
    };
    let mut j = w.len();
    while j > 0 && divisible(j - 1) {
        j -= 1;
    }
    seg(j)
}

/// `is_p_regular` straight from the definition, over an explicit chain long
/// enough to contain every cut where the exponent at `p` can change.
fn brute_regular(w: &LexWord, low: ConvexCut, high: ConvexCut, p: u64) -> bool {
    let chain = convex_cuts_bounded(w, prime_index(p) + 3);
    chain
        .iter()
        .filter(|m| **m > high && **m < low)
        .all(|m| quotient_exponent(w, *m, high, p).unwrap() == Finite(0))
}

fn effective_word() -> impl Strategy<Value = LexWord> {
    let comp = prop_oneof![
        Just("Z".to_string()),
        Just("Q".to_string()),
        prop::sample::select(vec![2u64, 3, 5]).prop_map(|q| format!("Zloc({q})")),
        Just("real(1, pi)".to_string()),
        Just("real(pi)".to_string()),
    ];
    prop::collection::vec(comp, 1..4)
        .prop_map(|c| g(&format!("lex({})", c.join(", "))))
        .prop_filter("small quotients", |w| w.width() <= 4)
}

fn any_word() -> impl Strategy<Value = LexWord> {
    let comp = prop_oneof![
        3 => Just("Z".to_string()),
        3 => Just("Q".to_string()),
        2 => prop::sample::select(vec![2u64, 3, 5]).prop_map(|q| format!("Zloc({q})")),
        2 => Just("real(1, pi)".to_string()),
        2 => (0u64..3).prop_map(|s| format!("omega_tower({s})")),
        1 => prop::sample::select(vec![2u64, 3]).prop_map(|q| format!("poly_module(Zloc({q}), pi)")),
    ];
    prop::collection::vec(comp, 1..5).prop_map(|c| g(&format!("lex({})", c.join(", "))))
}

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

proptest! {
    #[test]
    fn n_p_matches_brute_force(w in effective_word(), p in prop::sample::select(vec![2u64, 3, 5])) {
        prop_assert_eq!(n_p(&w, p).unwrap(), Finite(brute_n_p(&w, p)));
    }

    #[test]
    fn g_p_matches_brute_force(w in effective_word(), p in prop::sample::select(PRIMES.to_vec())) {
        prop_assert_eq!(max_p_divisible(&w, p).unwrap(), brute_max_p_divisible(&w, p));
    }

    #[test]
    fn chain_of_subgroups(w in any_word(), p in prop::sample::select(PRIMES.to_vec())) {
        let g0 = max_divisible(&w);
        let gp = max_p_divisible(&w, p).unwrap();
        prop_assert!(g0 >= gp);
        let mut prev = gp;
        for n in 1..6 {
            let next = g_pn(&w, p, n).unwrap();
            prop_assert!(next <= prev);
            prev = next;
        }
        if let Some(np) = n_p(&w, p).unwrap().finite() {
            prop_assert_eq!(g_pn(&w, p, np).unwrap(), ConvexCut::TOP);
        }
        if is_dp_minimal(&w) {
            for n in 0..4 {
                let c = g_pn(&w, p, n).unwrap();
                for q in PRIMES {
                    prop_assert!(quotient_exponent(&w, ConvexCut::bottom(&w), c, q).unwrap().is_finite());
                }
            }
        }
    }

    #[test]
    fn g_pn_is_maximal(w in any_word(), p in prop::sample::select(PRIMES.to_vec()), n in 0u32..4) {
        let c = g_pn(&w, p, n).unwrap();
        let bottom = ConvexCut::bottom(&w);
        prop_assert!(quotient_exponent(&w, bottom, c, p).unwrap().at_most(n));
        if let Some(u) = upper_neighbour(&w, c) {
            prop_assert!(!quotient_exponent(&w, bottom, u, p).unwrap().at_most(n));
        }
    }

    #[test]
    fn condition_prime_is_definitional(w in any_word()) {
        let set = thm_condition_prime(&w);
        let g0 = max_divisible(&w);
        for p in PRIMES {
            prop_assert_eq!(set.contains(p), max_p_divisible(&w, p).unwrap() == g0);
        }
        let some = PRIMES.iter().any(|&p| max_p_divisible(&w, p).unwrap() == g0);
        // the listed primes cover every special prime of these words
        prop_assert_eq!(!set.is_empty(), some || !set.listed().iter().all(|p| PRIMES.contains(p)) && set.is_all());
    }

    #[test]
    fn regularity_matches_definition(w in any_word(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let chain = convex_cuts_bounded(&w, prime_index(p) + 3);
        for (i, &high) in chain.iter().enumerate() {
            for &low in &chain[i + 1..] {
                prop_assert_eq!(is_p_regular(&w, low, high, p).unwrap(), brute_regular(&w, low, high, p));
            }
        }
    }

    #[test]
    fn certificates_check_out(w in any_word()) {
        for c in convex_cuts_bounded(&w, 4) {
            let cert = non_definability_certificate(&w, c).unwrap();
            if let Some(cert) = &cert {
                for p in PRIMES {
                    prop_assert!(cert.holds_at(&w, p));
                }
            }
            // labelled cuts are never certified
            if in_definable_image(&w, c) {
                prop_assert!(cert.is_none());
            }
        }
    }
}
