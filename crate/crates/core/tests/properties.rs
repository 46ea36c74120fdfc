use std::path::PathBuf;

use proptest::prelude::*;

use polysum::corpus::load_manifest;
use polysum::dsl::parse;
use polysum::model::{load_identity, save_identity, substitute_neg_t, Side};
use polysum::special::{gamma_half, gen_binom, harmonic, BinomValue};
use polysum::{HalfInt, Rational, SymConst};

fn half() -> impl Strategy<Value = HalfInt> {
    (-20i64..=20).prop_map(HalfInt::from_twice)
}

fn sym() -> impl Strategy<Value = SymConst> {
    (-30i64..30, 1i64..12, -5i64..5, 1i64..7, -3i32..=3).prop_map(|(a, b, c, d, p)| {
        let q = |x: i64, y: i64| Rational::new(x.into(), y.into());
        SymConst::rational(q(a, b))
            + SymConst::ln2().scale(&q(c, d))
            + SymConst::sqrt_pi_pow(p).scale(&q(c + 1, b))
    })
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i64..20).prop_map(|n| n.to_string()),
        Just("n".to_string()),
        Just("k".to_string()),
        Just("r".to_string()),
        Just("s".to_string()),
        (1i64..5, 2i64..7).prop_map(|(a, b)| format!("{a}/{b}")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, e)| format!("({a})^{e}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("binom({a}, {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("rbinom({a}, {b})")),
            inner.clone().prop_map(|a| format!("H({a})")),
            (inner.clone(), 1u32..4).prop_map(|(a, m)| format!("Hm({a}, {m})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("sum(k, 0, {a}, {b})")),
        ]
    })
}

proptest! {
    #[test]
    fn pascal_rule(x in half(), y in half()) {
        let one = HalfInt::from_int(1);
        let (xm, ym) = (&x - &one, &y - &one);
        if let (BinomValue::Finite(a), BinomValue::Finite(b), BinomValue::Finite(c)) =
            (gen_binom(&x, &y), gen_binom(&xm, &ym), gen_binom(&xm, &y))
        {
            prop_assert_eq!(a, &b + &c);
        }
    }

    #[test]
    fn gamma_recurrence(x in half()) {
        prop_assume!(!x.is_negative_integer() && !x.is_zero());
        let next = &x + &HalfInt::from_int(1);
        prop_assert_eq!(gamma_half(&next).unwrap(), gamma_half(&x).unwrap().scale(&x.to_rational()));
    }

    #[test]
    fn harmonic_step(x in half()) {
        prop_assume!(!x.is_zero());
        let prev = &x - &HalfInt::from_int(1);
        prop_assume!(!prev.is_negative_integer() && !x.is_negative_integer());
        let step = harmonic(&x).unwrap() - harmonic(&prev).unwrap();
        prop_assert_eq!(step, SymConst::rational(x.to_rational()).inverse().unwrap());
    }

    #[test]
    fn field_operations(a in sym(), b in sym()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &b, &b * &a);
        let text = a.to_string();
        prop_assert_eq!(text.parse::<SymConst>().unwrap(), a.clone());
        if let Ok(inv) = a.inverse() {
            prop_assert_eq!(&a * &inv, SymConst::one());
        }
    }

    #[test]
    fn parse_render_round_trip(text in expr()) {
        let e = parse(&text).unwrap();
        let again = parse(&e.to_string()).unwrap();
        prop_assert_eq!(again.to_string(), e.to_string());
    }
}

fn corpus_identities() -> Vec<polysum::Identity> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    load_manifest(&dir)
        .unwrap()
        .into_iter()
        .map(|e| e.identity)
        .collect()
}

#[test]
fn documents_survive_a_save_load_cycle() {
    for id in corpus_identities() {
        let back = load_identity(&save_identity(&id)).unwrap();
        assert_eq!(back, id, "{}", id.name);
    }
}

#[test]
fn negating_t_twice_is_the_identity() {
    let mut seen = 0;
    for id in corpus_identities() {
        if matches!((&id.lhs, &id.rhs), (Side::Standard(_), Side::Standard(_))) {
            let twice = substitute_neg_t(&substitute_neg_t(&id).unwrap()).unwrap();
            let cycle = |x: &polysum::Identity| polysum::verify_poly_range(x, 0..=8);
            assert_eq!(twice.lhs, id.lhs, "{}", id.name);
            assert_eq!(twice.rhs, id.rhs, "{}", id.name);
            assert_eq!(cycle(&twice).count_equal(), 9);
            seen += 1;
        }
    }
    assert!(seen > 10);
}
