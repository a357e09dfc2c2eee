use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use slopeforge_core::ledger::ledger_fiber_sum;
use slopeforge_core::signature::{meyer_cocycle, signature_of_word};
use slopeforge_core::symplectic::transvection_class;
use slopeforge_core::word::inverse_hurwitz_move;
use slopeforge_core::*;

fn class_strategy(g: usize, bound: i64) -> impl Strategy<Value = HomologyClass> {
    prop::collection::vec(-bound..=bound, 2 * g).prop_map(|c| HomologyClass::from_i64s(&c))
}

fn primitive(g: usize) -> impl Strategy<Value = HomologyClass> {
    class_strategy(g, 6).prop_filter("primitive", |c| c.is_primitive())
}

fn matrix(g: usize) -> impl Strategy<Value = SymplecticMatrix> {
    prop::collection::vec((class_strategy(g, 2), prop::bool::ANY), 1..5).prop_map(move |ts| {
        ts.iter().fold(SymplecticMatrix::identity(g), |m, (v, s)| {
            m.mul(&transvection_class(v, if *s { 1 } else { -1 }))
        })
    })
}

fn triple() -> impl Strategy<Value = (SymplecticMatrix, SymplecticMatrix, SymplecticMatrix)> {
    (1usize..=3).prop_flat_map(|g| (matrix(g), matrix(g), matrix(g)))
}

fn relator_word(kind: RelatorKind, g: usize) -> TwistWord {
    build_relator(&CurveCatalog::builtin(g), kind, g).unwrap().word().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cocycle_identity((a, b, c) in triple()) {
        let t = |x: &SymplecticMatrix, y: &SymplecticMatrix| meyer_cocycle(x, y).unwrap();
        prop_assert_eq!(t(&a, &b) + t(&a.mul(&b), &c), t(&a, &b.mul(&c)) + t(&b, &c));
    }

    #[test]
    fn products_stay_symplectic((a, b, _c) in triple()) {
        prop_assert!(a.is_symplectic());
        prop_assert!(a.mul(&b).is_symplectic());
        prop_assert!(a.mul(&a.inverse()).is_identity());
    }

    #[test]
    fn cocycle_is_symmetric_and_normalized((a, b, _c) in triple()) {
        let id = SymplecticMatrix::identity(a.genus());
        prop_assert_eq!(meyer_cocycle(&a, &b).unwrap(), meyer_cocycle(&b, &a).unwrap());
        prop_assert_eq!(meyer_cocycle(&a, &id).unwrap(), 0);
        prop_assert_eq!(meyer_cocycle(&a, &a.inverse()).unwrap(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transporter_lands_on_target(
        (v, w) in (1usize..=4).prop_flat_map(|g| (primitive(g), primitive(g)))
    ) {
        let phi = symplectic_transporter(&v, &w).unwrap();
        prop_assert!(evaluate(&phi).apply(&v).eq_up_to_sign(&w));
        prop_assert!(phi.letters().iter().all(|l| !l.is_separating() && l.exponent() == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hurwitz_moves_keep_signature(moves in prop::collection::vec((0usize..64, prop::bool::ANY), 50)) {
        for (kind, g, want) in [(RelatorKind::Matsumoto, 2, -4), (RelatorKind::Hyperelliptic, 2, -12)] {
            let mut w = relator_word(kind, g);
            for &(i, forward) in &moves {
                let i = i % (w.len() - 1);
                w = if forward { hurwitz_move(&w, i).unwrap() } else { inverse_hurwitz_move(&w, i).unwrap() };
            }
            prop_assert!(is_homologically_trivial(&w));
            prop_assert_eq!(signature_of_word(&w).unwrap().sigma, want);
        }
    }

    #[test]
    fn conjugation_keeps_signature(v in primitive(2), w in primitive(2)) {
        let phi = symplectic_transporter(&v, &w).unwrap();
        let h = relator_word(RelatorKind::Hyperelliptic, 2);
        let c = global_conjugate(&h, &phi).unwrap();
        prop_assert_eq!(c.len(), h.len());
        prop_assert_eq!(signature_of_word(&c).unwrap().sigma, -12);
        let s = fiber_sum(&h, &relator_word(RelatorKind::Matsumoto, 2), &phi).unwrap();
        prop_assert_eq!(signature_of_word(&s).unwrap().sigma, -16);
    }

    #[test]
    fn slope_below_eight_iff_negative_signature(
        g in 3usize..12, k in 0i64..40, l in 0i64..40, h in 1usize..3
    ) {
        prop_assume!(k + l > 0 && h <= g - 2);
        let low = ledger::fiber_sum_copies(&ledger::hyperelliptic_invariants(g).unwrap(), &BigInt::from(k + 1)).unwrap();
        let mut acc = low;
        if l > 0 {
            let high = ledger::theorem_ledger(g, h).unwrap();
            acc = ledger_fiber_sum(&acc, &ledger::fiber_sum_copies(&high, &BigInt::from(l)).unwrap()).unwrap();
        }
        let lam = acc.slope().unwrap();
        prop_assert_eq!(lam < BigRational::from_integer(8.into()), acc.sigma().is_negative());
        prop_assert!(lam < BigRational::from_integer(8.into()));
    }

    #[test]
    fn word_text_round_trip(picks in prop::collection::vec((0usize..7, 1i64..4), 1..12)) {
        let g = 3;
        let cat = CurveCatalog::builtin(g);
        let names = ["c1", "c2", "c3", "c4", "c5", "c6", "c7"];
        let text: Vec<String> = picks.iter().map(|(i, e)| format!("{}^{}", names[*i], e)).collect();
        let w = parse_word(&text.join(" "), &cat, g).unwrap();
        let back = parse_word(&serialize_word(&w), &cat, g).unwrap();
        prop_assert_eq!(serialize_word(&back), serialize_word(&w));
        prop_assert_eq!(evaluate(&back), evaluate(&w));
    }
}

#[test]
fn star_substitution_round_trip() {
    for (g, h) in [(3usize, 1usize), (4, 2)] {
        let r = build_relator(&CurveCatalog::builtin(g), RelatorKind::Star { h }, g).unwrap();
        let x = r.left();
        let y = substitute(&x, 0, &r).unwrap();
        assert_eq!(evaluate(&y), evaluate(&x));
        let back = substitute(&y, 0, &r.reversed()).unwrap();
        assert_eq!(serialize_word(&back), serialize_word(&x));
    }
}
