use num_bigint::BigInt;
use num_rational::Rational64;
use proptest::prelude::*;
use virpath::{QExponent, QPoly, Series};

fn poly(max_terms: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((-40i64..40, -50i64..50), 0..max_terms).prop_map(|terms| {
        QPoly::from_terms(
            terms
                .into_iter()
                .map(|(e, c)| (QExponent::from_eighths(e), BigInt::from(c))),
        )
    })
}

/// Polynomials whose exponents are all multiples of `step` eighths.
fn poly_on_grid(step: i64) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((-10i64..10, -20i64..20), 0..6).prop_map(move |terms| {
        QPoly::from_terms(
            terms
                .into_iter()
                .map(|(e, c)| (QExponent::from_eighths(step * e), BigInt::from(c))),
        )
    })
}

proptest! {
    #[test]
    fn addition_is_associative_and_commutative(a in poly(6), b in poly(6), c in poly(6)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a - &a), &QPoly::zero());
    }

    #[test]
    fn multiplication_is_a_commutative_ring_product(a in poly(5), b in poly(5), c in poly(5)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &QPoly::one(), a.clone());
    }

    #[test]
    fn no_zero_coefficient_is_stored(a in poly(8), b in poly(8)) {
        for (_, c) in (&a * &b).terms().chain((&a - &b).terms()) {
            prop_assert!(*c != BigInt::from(0));
        }
    }

    #[test]
    fn exact_division_undoes_multiplication(a in poly(5), b in poly(5)) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }

    #[test]
    fn substitution_round_trip(a in poly_on_grid(2)) {
        let doubled = a.substitute_power(Rational64::from_integer(2)).unwrap();
        prop_assert_eq!(doubled.substitute_power(Rational64::new(1, 2)).unwrap(), a);
    }

    #[test]
    fn evaluation_at_one_is_a_ring_map(a in poly(5), b in poly(5)) {
        prop_assert_eq!((&a * &b).eval_at_one(), a.eval_at_one() * b.eval_at_one());
        prop_assert_eq!((&a + &b).eval_at_one(), a.eval_at_one() + b.eval_at_one());
    }

    #[test]
    fn truncation_is_idempotent_and_additive(a in poly(8), b in poly(8), order in -40i64..40) {
        let o = QExponent::from_eighths(order);
        let ta = a.truncate(o);
        prop_assert!(ta.poly().terms().all(|(e, _)| e <= o));
        prop_assert_eq!(ta.truncate(o), ta.clone());
        prop_assert_eq!(&(&a + &b).truncate(o), &(&ta + &b.truncate(o)));
    }

    #[test]
    fn truncated_products_keep_the_smaller_order(a in poly_on_grid(8), b in poly_on_grid(8), oa in 0i64..10, ob in 0i64..10) {
        // Non-negative valuations: the product order is the smaller operand order.
        let shift = |p: &QPoly| p.shift(QExponent::from_int(-p.min_exponent().map_or(0, |e| e.as_ratio().0)));
        let (a, b) = (shift(&a), shift(&b));
        let (sa, sb) = (a.truncate(QExponent::from_int(oa)), b.truncate(QExponent::from_int(ob)));
        let prod: Series = &sa * &sb;
        let o = QExponent::from_int(oa.min(ob));
        prop_assert_eq!(prod.order(), o);
        prop_assert_eq!(prod, (&a * &b).truncate(o));
    }

    #[test]
    fn wire_format_round_trips(a in poly(8)) {
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<QPoly>(&json).unwrap(), a);
    }
}
