use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;

use uqqn::actions::{derive_action, ActionKind};
use uqqn::presentations::{Elem, Family, Gen, Presentation};
use uqqn::texpr::{parse, universe_of, Expr, Label, Symbol};
use uqqn::{QField, Scalar, Q73};

fn scalar() -> impl Strategy<Value = Scalar> {
    (prop::collection::vec(-6i64..=6, 1..4), prop::collection::vec(-4i64..=4, 1..3))
        .prop_filter_map("zero denominator", |(n, d)| Scalar::from_coeffs(&n, &d).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert!((a.clone() - a.clone()).is_zero());
        if !a.is_zero() {
            prop_assert!((a.clone() * (Scalar::one() / a.clone())).is_one());
        }
    }

    #[test]
    fn normalize_is_idempotent(a in scalar()) {
        let once = a.normalize();
        prop_assert_eq!(once.normalize(), once.clone());
        prop_assert_eq!(once, a);
    }

    #[test]
    fn render_parse_round_trip(a in scalar()) {
        let back: Scalar = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn classical_limit_is_a_ring_map(a in scalar(), b in scalar()) {
        if let (Ok(x), Ok(y)) = (a.eval_at_one(), b.eval_at_one()) {
            prop_assert_eq!((a.clone() + b.clone()).eval_at_one().unwrap(), x.clone() + y.clone());
            prop_assert_eq!((a * b).eval_at_one().unwrap(), x * y);
        }
    }

    #[test]
    fn specialisation_commutes_with_arithmetic(a in scalar(), b in scalar()) {
        if let (Ok(x), Ok(y)) = (Q73::from_scalar(&a), Q73::from_scalar(&b)) {
            prop_assert_eq!(Q73::from_scalar(&(a.clone() + b.clone())).unwrap(), x.clone() + y.clone());
            prop_assert_eq!(Q73::from_scalar(&(a.clone() * b.clone())).unwrap(), x.clone() * y.clone());
            if !b.is_zero() && !y.is_zero() {
                prop_assert_eq!(Q73::from_scalar(&(a / b)).unwrap(), x / y);
            }
        }
    }
}

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![
        (1u32..=9).prop_map(Label::Leg),
        (1u32..=9, any::<bool>()).prop_map(|(idx, primed)| Label::Slot { idx, primed }),
    ]
}

fn symbol() -> impl Strategy<Value = Symbol> {
    (
        prop::sample::select(vec!["S", "Sinv", "SJ", "R+", "R-", "T", "Tbarcheck", "L"]),
        prop::collection::vec(label(), 1..4),
    )
        .prop_map(|(name, raw)| {
            let key = |l: &Label| match *l {
                Label::Leg(i) => (i, false),
                Label::Slot { idx, primed } => (idx, primed),
            };
            let mut labels: Vec<Label> = Vec::new();
            for l in raw {
                if labels.iter().all(|m| key(m) != key(&l)) {
                    labels.push(l);
                }
            }
            Symbol { name: name.to_string(), labels }
        })
}

fn expr() -> impl Strategy<Value = Expr> {
    let prod = || prop::collection::vec(symbol(), 1..4);
    prop_oneof![prod().prop_map(Expr::Product), (prod(), prod()).prop_map(|(l, r)| Expr::Equation(l, r))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_inverts_render(e in expr()) {
        prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
    }
}

fn leg_factor() -> impl Strategy<Value = Symbol> {
    let pair = prop::sample::select(vec![(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]);
    prop_oneof![
        (prop::sample::select(vec!["S", "Sinv", "SJ"]), pair)
            .prop_map(|(n, (a, b))| Symbol { name: n.into(), labels: vec![Label::Leg(a), Label::Leg(b)] }),
        (1u32..=3).prop_map(|a| Symbol { name: "J".into(), labels: vec![Label::Leg(a)] }),
        (prop::sample::select(vec!["T", "Tcheck"]), 1u32..=3).prop_map(|(n, a)| Symbol {
            name: n.into(),
            labels: vec![Label::Leg(a), Label::Slot { idx: 4, primed: false }]
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn evaluation_is_associative(syms in prop::collection::vec(leg_factor(), 3..5), n in 1usize..=2) {
        let env = uqqn::cli::texpr_env(1, n).unwrap();
        let uni = universe_of(&Expr::Product(syms.clone())).unwrap();
        let single: Vec<_> = syms.iter().map(|s| env.eval_free(std::slice::from_ref(s), &uni).unwrap()).collect();
        let left = single[1..].iter().fold(single[0].clone(), |acc, t| acc.mul(t).unwrap());
        let right = single[..single.len() - 1]
            .iter()
            .rev()
            .fold(single[single.len() - 1].clone(), |acc, t| t.mul(&acc).unwrap());
        prop_assert!(left.first_difference(&right).is_none());
        let whole = env.eval_free(&syms, &uni).unwrap();
        prop_assert!(whole.first_difference(&left).is_none());
    }
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn word_in(p: &Presentation<Scalar>, picks: &[usize]) -> Vec<Gen> {
    picks.iter().map(|&i| p.gens()[i % p.gens().len()]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn normal_form_is_a_projection(fam in family(), frames in 1usize..=2, n in 1usize..=2,
                                   u in prop::collection::vec(0usize..64, 0..4),
                                   v in prop::collection::vec(0usize..64, 0..4)) {
        let p = Presentation::<Scalar>::new(fam, frames, n).unwrap();
        let (u, v) = (word_in(&p, &u), word_in(&p, &v));
        let nu = p.normal_form(&u);
        prop_assert_eq!(p.reduce(&nu), nu.clone());
        let uv: Vec<Gen> = u.iter().chain(v.iter()).copied().collect();
        prop_assert_eq!(p.normal_form(&uv), p.elem_mul(&nu, &p.normal_form(&v)));
    }

    #[test]
    fn actions_respect_reduction(kind in prop::sample::select(ActionKind::ALL.to_vec()), n in 1usize..=2,
                                 w in prop::collection::vec(0usize..64, 1..4), ab in (0usize..16, 0usize..16)) {
        let p = Arc::new(Presentation::<Scalar>::new(kind.family(), 2, n).unwrap());
        let act = derive_action(kind, p.clone()).unwrap();
        let w = word_in(&p, &w);
        let pairs = act.pairs();
        let (a, b) = pairs[(ab.0 * 16 + ab.1) % pairs.len()];
        let via_nf = act.apply(a, b, &p.normal_form(&w)).unwrap();
        let free = act.apply(a, b, &Elem::from_word(w.clone())).unwrap();
        prop_assert_eq!(via_nf, free);
    }
}

#[test]
fn odd_generators_square_to_zero() {
    for fam in Family::ALL {
        for (frames, n) in [(1, 1), (2, 2)] {
            let p = Presentation::<Scalar>::new(fam, frames, n).unwrap();
            for &g in p.gens().iter().filter(|g| g.parity() == 1) {
                assert!(p.normal_form(&[g, g]).is_zero(), "{} {g}", fam.name());
            }
        }
    }
}

#[test]
fn alias_spellings_reduce_alike() {
    let p = Presentation::<Scalar>::new(Family::A, 2, 2).unwrap();
    for &g in p.gens() {
        for &h in p.gens() {
            let alias = |x: Gen| Gen::new(x.fam, -x.frame, -x.weight);
            let direct = p.reduce(&Elem::from_word(vec![g, h]));
            let via_alias = p.reduce(&Elem::from_word(vec![alias(g), alias(h)]).resolve_aliases());
            assert_eq!(direct, via_alias);
        }
    }
    assert_eq!(Scalar::xi() * Scalar::q(), Scalar::qpow(2) - Scalar::one());
}
