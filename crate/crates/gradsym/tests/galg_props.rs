mod common;

use common::*;
use gradsym::galg::{parse_poly, Poly, Rat};
use proptest::prelude::*;
use std::collections::HashMap;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn graded_commutativity(a in raw_poly(10, 4, 3), b in raw_poly(10, 4, 3)) {
        let alg = mixed_chart().algebra().clone();
        let x = homogeneous(&alg, &a);
        let y = homogeneous(&alg, &b);
        let s = sign(deg(&x) * deg(&y));
        prop_assert_eq!(&x * &y, (&y * &x).scale(&s));
    }

    #[test]
    fn associativity(a in raw_poly(10, 3, 3), b in raw_poly(10, 3, 3), c in raw_poly(10, 3, 3)) {
        let alg = mixed_chart().algebra().clone();
        let (x, y, z) = (build(&alg, &a), build(&alg, &b), build(&alg, &c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn left_leibniz(a in raw_poly(10, 4, 3), b in raw_poly(10, 4, 3), g in 0usize..10) {
        let alg = mixed_chart().algebra().clone();
        let x = homogeneous(&alg, &a);
        let y = build(&alg, &b);
        let lhs = (&x * &y).partial_left(g);
        let s = sign(alg.degree(g) * deg(&x));
        let rhs = &(&x.partial_left(g) * &y) + &(&x * &y.partial_left(g)).scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_multiplicative(a in raw_poly(10, 3, 3), b in raw_poly(10, 3, 3),
                                      imgs in prop::collection::vec(raw_poly(10, 2, 2), 10)) {
        let alg = mixed_chart().algebra().clone();
        let mut map = HashMap::new();
        for (g, r) in imgs.iter().enumerate() {
            let d = alg.degree(g);
            let img = build(&alg, r).degree_part(d);
            map.insert(g, img);
        }
        let (x, y) = (build(&alg, &a), build(&alg, &b));
        let lhs = (&x * &y).substitute(&alg, &map).unwrap();
        let rhs = &x.substitute(&alg, &map).unwrap() * &y.substitute(&alg, &map).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn normalize_is_idempotent_and_text_round_trips(a in raw_poly(10, 5, 4)) {
        let alg = mixed_chart().algebra().clone();
        let x = build(&alg, &a);
        let again = Poly::from_terms(&alg, x.terms().map(|(m, c)| (m.clone(), c.clone())));
        prop_assert_eq!(&again, &x);
        let back: Poly<Rat> = parse_poly(&alg, &x.to_string()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn truncation_is_a_projection(a in raw_poly(10, 5, 4), d in 0u32..5) {
        let alg = mixed_chart().algebra().clone();
        let x = build(&alg, &a);
        let t = x.truncate(d);
        prop_assert_eq!(t.truncate(d), t.clone());
        prop_assert!(t.max_word_len() <= d);
    }
}
