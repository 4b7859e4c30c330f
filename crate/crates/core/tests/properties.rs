use proptest::prelude::*;
use sbo_core::dsl::{parse_op_on, pretty_print, Bindings};
use sbo_core::operators::op_equal_bounded;
use sbo_core::{family, op_equal, ops_equal, Atom, FamilySpec, GaussianRational, OpExpr, Presentation, Rational, Scalar, Sig};

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(a, b)| Rational::frac(a, b))
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (rational(), prop_oneof![3 => Just(Rational::from_int(0)), 1 => rational()]).prop_map(|(re, im)| GaussianRational::new(re, im))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(gaussian(), 0..4).prop_map(Scalar::from_coeffs)
}

fn source() -> impl Strategy<Value = Sig> {
    (3usize..=4, 0i32..=4, any::<bool>()).prop_map(|(n, p, amb)| {
        let p = p.min(n as i32 - 1);
        if amb {
            Sig::ambient(n, p)
        } else {
            Sig::slice(n, p)
        }
    })
}

fn word() -> impl Strategy<Value = Vec<Atom>> {
    prop::collection::vec(prop::sample::select(Atom::ALL.to_vec()), 1..=3)
}

/// A typed sum of scaled words on a random source; summands whose target differs from the first are dropped.
fn expression() -> impl Strategy<Value = OpExpr> {
    (source(), prop::collection::vec((scalar(), word()), 1..=3)).prop_filter_map("no typable summand", |(src, terms)| {
        let mut typed = terms.into_iter().filter_map(|(c, w)| OpExpr::chain(src, &w).ok().map(|e| OpExpr::scale(c, e)));
        let first = typed.next()?;
        let target = first.target();
        let rest: Vec<_> = typed.filter(|e| e.target() == target).collect();
        Some(rest.iter().fold(first, |acc, e| acc.plus(e).expect("same signature")))
    })
}

fn bindings(sig: Sig) -> Bindings {
    Bindings::new(sig.ambient_dim, sig.degree as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_expressions_parse_back(e in expression()) {
        let text = pretty_print(&e);
        let again = parse_op_on(&text, e.source(), &bindings(e.source())).unwrap();
        prop_assert_eq!(&again, &e, "{}", text);
    }

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b), &(&b + &a));
        prop_assert_eq!(&(&a * &b), &(&b * &a));
        prop_assert_eq!(&(&(&a + &b) + &c), &(&a + &(&b + &c)));
        prop_assert_eq!(&(&(&a * &b) * &c), &(&a * &(&b * &c)));
        prop_assert_eq!(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)));
        prop_assert_eq!(&(&a + &Scalar::zero()), &a);
        prop_assert_eq!(&(&a * &Scalar::one()), &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a + &(-&a)).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b).checked_div(&b).unwrap(), &a);
        }
    }

    #[test]
    fn evaluation_is_a_ring_map(a in scalar(), b in scalar(), x in gaussian()) {
        prop_assert_eq!((&a * &b).eval_at(&x), &a.eval_at(&x) * &b.eval_at(&x));
        prop_assert_eq!((&a + &b).eval_at(&x), &a.eval_at(&x) + &b.eval_at(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// Testing on forms of polynomial degree up to the order decides equality; doubling the bound changes nothing.
    #[test]
    fn degree_bound_is_sound(a in expression(), extra in (scalar(), word())) {
        let (c, w) = extra;
        let b = match OpExpr::chain(a.source(), &w) {
            Ok(x) if x.target() == a.target() => a.plus(&OpExpr::scale(c, x)).unwrap(),
            _ => OpExpr::scale(Scalar::from_int(2), a.clone()).minus(&a).unwrap(),
        };
        let order = a.order().max(b.order());
        let exact = op_equal(&a, &b).unwrap();
        let bounded = op_equal_bounded(&a, &b, order).unwrap();
        let doubled = op_equal_bounded(&a, &b, 2 * order).unwrap();
        prop_assert_eq!(exact.is_none(), bounded.is_none());
        prop_assert_eq!(bounded.is_none(), doubled.is_none());
        if let Some(wit) = exact {
            prop_assert!(!wit.residual.is_zero());
            let diff = a.apply(&wit.basis_form).unwrap().sub(&b.apply(&wit.basis_form).unwrap()).unwrap();
            prop_assert_eq!(diff, wit.residual);
        }
    }
}

#[test]
fn printed_families_parse_back() {
    for n in 3..=5 {
        for ty in 1..=4u8 {
            for p in 0..=n {
                for m in 0..=4 {
                    for presentation in [Presentation::Normal, Presentation::Geometric] {
                        let Ok(e) = family(&FamilySpec::new(ty, n, p, m, presentation)) else { continue };
                        let text = pretty_print(&e);
                        let again = parse_op_on(&text, e.source(), &Bindings::new(n, p)).unwrap();
                        assert!(ops_equal(&again, &e).unwrap(), "type {ty} n {n} p {p} N {m}: {text}");
                    }
                }
            }
        }
    }
}
