use super::*;
use crate::oag::parse_group;
use proptest::prelude::*;

fn grp(s: &str) -> Arc<LexWord> {
    Arc::new(parse_group(s).unwrap())
}

fn s(g: &Arc<LexWord>, text: &str) -> HahnSeries {
    parse_series(g, text).unwrap()
}

fn e(g: &LexWord, flat: &[(i64, i64)]) -> GroupElement {
    g.element_from(flat).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn addition() {
    let g = grp("lex(Z, Q)");
    assert_eq!(
        s(&g, "1 + t^(1,0)").add(&s(&g, "-t^(1,0)")).unwrap(),
        s(&g, "1")
    );
    let a = s(&g, "3*t^(0,1/2) - 1/2");
    assert_eq!(HahnSeries::zero(g.clone()).add(&a).unwrap(), a);
    let trunc = s(&g, "1 + O(t^(1,0))").add(&s(&g, "t^(2,0)")).unwrap();
    assert_eq!(trunc, s(&g, "1 + O(t^(1,0))"));
    assert!(s(&g, "1").add(&s(&grp("lex(Z)"), "1")).is_err());
}

#[test]
fn multiplication() {
    let g = grp("lex(Z, Q)");
    assert_eq!(
        s(&g, "1 + t^(1,0)").mul(&s(&g, "1 - t^(1,0)")).unwrap(),
        s(&g, "1 - t^(2,0)")
    );
    assert_eq!(
        s(&g, "t^(1,2)").mul(&s(&g, "t^(3,-1/2)")).unwrap(),
        s(&g, "t^(4,3/2)")
    );
    assert_eq!(
        s(&g, "2*t^(1,0)").mul(&s(&g, "1/2*t^(-1,0)")).unwrap(),
        s(&g, "1")
    );
    // (1 + O(t^g)) · 2t^h = 2t^h + O(t^(g+h))
    let p = s(&g, "1 + O(t^(1,0))").mul(&s(&g, "2*t^(0,3)")).unwrap();
    assert_eq!(p, s(&g, "2*t^(0,3) + O(t^(1,3))"));
    assert!(matches!(
        s(&g, "O(t^(1,0))").mul(&s(&g, "O(t^(2,0))")),
        Err(Error::UnknownLeadingTerm)
    ));
}

#[test]
fn inversion() {
    let g = grp("lex(Z, Q)");
    let inv = s(&g, "1 - t^(1,0)")
        .invert(&e(&g, &[(3, 1), (0, 1)]))
        .unwrap();
    assert_eq!(inv, s(&g, "1 + t^(1,0) + t^(2,0) + O(t^(3,0))"));
    let mono = s(&g, "t^(1,1)").invert(&e(&g, &[(5, 1), (0, 1)])).unwrap();
    assert_eq!(mono, s(&g, "t^(-1,-1)"));
    assert_eq!(
        s(&g, "2").invert(&e(&g, &[(1, 1), (0, 1)])).unwrap(),
        s(&g, "1/2")
    );
    assert!(matches!(
        HahnSeries::zero(g.clone()).invert(&g.zero().unwrap()),
        Err(Error::ZeroSeries(_))
    ));
    // the Q direction never reaches the Z direction
    let stuck = s(&g, "1 + t^(0,1)").invert(&e(&g, &[(1, 1), (0, 1)]));
    assert!(matches!(stuck, Err(Error::Precision(_))));
}

#[test]
fn valuation() {
    let g = grp("lex(Z, Q)");
    assert_eq!(
        s(&g, "t^(1,0) + 2*t^(2,0)").v_of().unwrap(),
        e(&g, &[(1, 1), (0, 1)])
    );
    assert_eq!(s(&g, "7").v_of().unwrap(), g.zero().unwrap());
    assert_eq!(
        s(&g, "t^(0,-7/2)").v_of().unwrap(),
        e(&g, &[(0, 1), (-7, 2)])
    );
    assert!(matches!(
        HahnSeries::zero(g.clone()).v_of(),
        Err(Error::ZeroSeries(_))
    ));
    assert!(matches!(
        s(&g, "O(t^(1,0))").v_of(),
        Err(Error::UnknownLeadingTerm)
    ));
}

#[test]
fn root_oracle() {
    let g = grp("lex(Z, Q)");
    assert!(s(&g, "t^(0,1/3)").root_exists(3, false).unwrap());
    assert!(!s(&g, "t^(1,0)").root_exists(2, true).unwrap());
    assert!(s(&g, "-t^(0,1/2)").root_exists(2, true).unwrap());
    assert!(!s(&g, "-t^(0,1/2)").root_exists(2, false).unwrap());
    assert!(s(&g, "-8*t^(3,0)").root_exists(3, false).unwrap());
    assert!(matches!(
        s(&g, "1").root_exists(4, false),
        Err(Error::NotPrime(4))
    ));
}

#[test]
fn roots() {
    let g = grp("lex(Z, Q)");
    let cut = e(&g, &[(3, 1), (0, 1)]);
    let sq = s(&g, "1 + t^(1,0)").pow(2).unwrap();
    assert_eq!(sq.pth_root(2, &cut).unwrap(), s(&g, "1 + t^(1,0)"));
    let r = s(&g, "1 + t^(1,0)").pth_root(2, &cut).unwrap();
    assert_eq!(r, s(&g, "1 + 1/2*t^(1,0) - 1/8*t^(2,0) + O(t^(3,0))"));
    assert_eq!(
        r.pow(2).unwrap().truncate(&cut),
        s(&g, "1 + t^(1,0) + O(t^(3,0))")
    );
    assert_eq!(
        s(&g, "4*t^(2,0)").pth_root(2, &cut).unwrap(),
        s(&g, "2*t^(1,0)")
    );
    assert_eq!(
        s(&g, "-27*t^(0,1)").pth_root(3, &cut).unwrap(),
        s(&g, "-3*t^(0,1/3)")
    );
    assert!(matches!(
        s(&g, "2").pth_root(2, &cut),
        Err(Error::InexactRoot(_))
    ));
    assert!(matches!(
        s(&g, "t^(1,0)").pth_root(2, &cut),
        Err(Error::NoRoot { p: 2 })
    ));
    let enc = s(&g, "2 + 2*t^(1,0)")
        .pth_root_enclosed(2, &cut, 40)
        .unwrap();
    assert!(enc.scale.contains(&q(1414213562, 1_000_000_000)) || enc.scale.lo > q(14142, 10000));
    assert_eq!(enc.unit, r);
}

#[test]
fn decomposition() {
    let g = grp("lex(Z, Q)");
    let a = s(&g, "2*t^(1,1/2) + 3*t^(1,2) + 5*t^(2,0)");
    let (head, res) = a.decompose(ConvexCut::seg(1)).unwrap();
    assert_eq!(head.to_string(), "(1)");
    assert_eq!(res.to_string(), "2*t^(1/2) + 3*t^(2)");
    assert_eq!(res.group().to_string(), "lex(Q)");
    let (head, res) = s(&g, "7").decompose(ConvexCut::seg(1)).unwrap();
    assert_eq!(
        (head.to_string(), res.to_string()),
        ("(0)".into(), "7".into())
    );
    let (head, res) = s(&g, "t^(0,5)").decompose(ConvexCut::seg(1)).unwrap();
    assert_eq!(
        (head.to_string(), res.to_string()),
        ("(0)".into(), "t^(5)".into())
    );
}

#[test]
fn literals_round_trip() {
    let g = grp("lex(Z, Q)");
    for text in [
        "0",
        "1",
        "-1/2 + 3*t^(0,1/2) - t^(2,-1) + O(t^(3,0))",
        "O(t^(1,0))",
        "t^(1,1)",
    ] {
        assert_eq!(s(&g, text).to_string(), text);
    }
    assert!(parse_series(&g, "t^(1)").is_err());
    assert!(parse_series(&g, "1 +").is_err());
}

#[test]
fn sampling_is_deterministic() {
    let g = grp("lex(Z, Q)");
    let p = SampleParams::default();
    assert_eq!(
        sample_series(&g, 7, p).unwrap(),
        sample_series(&g, 7, p).unwrap()
    );
    let mono = sample_series(&g, 7, SampleParams { support: 1, ..p }).unwrap();
    assert_eq!(mono.terms().len(), 1);
    let a = sample_series(&g, 11, p).unwrap();
    let v = a.v_of().unwrap();
    assert_eq!(a.mul(&a).unwrap().v_of().unwrap(), g.add(&v, &v).unwrap());
    assert!(sample_series(&grp("lex(omega_tower(0))"), 1, p).is_err());
}

const GROUPS: [&str; 5] = [
    "lex(Z, Q)",
    "lex(Z, Z)",
    "lex(real(1, pi))",
    "lex(Zloc(2), Q)",
    "lex(Q)",
];

fn group_and_seed() -> impl Strategy<Value = (Arc<LexWord>, u64)> {
    (prop::sample::select(GROUPS.to_vec()), any::<u64>()).prop_map(|(g, seed)| (grp(g), seed))
}

fn params() -> SampleParams {
    SampleParams {
        support: 3,
        exponent: 3,
        coeff: 4,
    }
}

proptest! {
    #[test]
    fn field_axioms((g, seed) in group_and_seed()) {
        let a = sample_series(&g, seed, params()).unwrap();
        let b = sample_series(&g, seed ^ 1, params()).unwrap();
        let c = sample_series(&g, seed ^ 2, params()).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn inverse_to_cutoff((g, seed) in group_and_seed()) {
        let a = sample_series(&g, seed, SampleParams { support: 1, ..params() }).unwrap();
        let cutoff = g.scale(&g.unit(0).unwrap(), 4).unwrap();
        let b = a.invert(&cutoff).unwrap();
        let one = HahnSeries::one(g.clone()).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap().truncate(&cutoff), one.truncate(&cutoff));
    }

    #[test]
    fn ultrametric((g, seed) in group_and_seed()) {
        let a = sample_series(&g, seed, params()).unwrap();
        let b = sample_series(&g, seed.wrapping_add(17), params()).unwrap();
        let s = a.add(&b).unwrap();
        let (va, vb) = (a.v_of().unwrap(), b.v_of().unwrap());
        let m = if g.cmp(&va, &vb).unwrap().is_le() { va.clone() } else { vb.clone() };
        if !s.is_zero() {
            let vs = s.v_of().unwrap();
            prop_assert!(g.cmp(&vs, &m).unwrap().is_ge());
            if va != vb {
                prop_assert_eq!(vs, m);
            }
        }
        prop_assert_eq!(a.mul(&b).unwrap().v_of().unwrap(), g.add(&va, &vb).unwrap());
    }

    #[test]
    fn roots_of_powers((g, seed) in group_and_seed(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let y = sample_series(&g, seed, SampleParams { support: 2, ..params() }).unwrap();
        // make the leading coefficient positive so the principal root is y itself
        let y = if y.leading_coeff().unwrap().is_negative() { y.neg() } else { y };
        let a = y.pow(p as u32).unwrap();
        prop_assert!(a.root_exists(p, false).unwrap());
        let top = &y.terms().last().unwrap().0;
        let cutoff = g.scale(&g.add(top, &g.unit(0).unwrap()).unwrap(), p as i64).unwrap();
        prop_assert_eq!(a.pth_root(p, &cutoff).unwrap(), y);
    }

    #[test]
    fn decompose_round_trip((g, seed) in group_and_seed()) {
        let a = sample_series(&g, seed, params()).unwrap();
        for seg in 0..=g.len() {
            let (head, res) = a.decompose(ConvexCut::seg(seg)).unwrap();
            let mut coords = head.coords.clone();
            coords.extend(res.v_of().unwrap().coords);
            prop_assert_eq!(GroupElement { coords }, a.v_of().unwrap());
        }
    }
}
