mod common;

use common::*;
use gradsym::phase::{ham_vf, poisson};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn graded_antisymmetry(a in raw_poly(10, 3, 3), b in raw_poly(10, 3, 3)) {
        let ch = mixed_chart();
        let f = homogeneous(ch.algebra(), &a);
        let g = homogeneous(ch.algebra(), &b);
        let s = -sign(deg(&f) * deg(&g));
        prop_assert_eq!(poisson(&f, &g, &ch), poisson(&g, &f, &ch).scale(&s));
    }

    #[test]
    fn graded_jacobi(a in raw_poly(10, 2, 3), b in raw_poly(10, 2, 3), c in raw_poly(10, 2, 3)) {
        let ch = mixed_chart();
        let f = homogeneous(ch.algebra(), &a);
        let g = homogeneous(ch.algebra(), &b);
        let h = homogeneous(ch.algebra(), &c);
        let lhs = poisson(&f, &poisson(&g, &h, &ch), &ch);
        let s = sign(deg(&f) * deg(&g));
        let rhs = &poisson(&poisson(&f, &g, &ch), &h, &ch) + &poisson(&g, &poisson(&f, &h, &ch), &ch).scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_a_biderivation(a in raw_poly(10, 2, 3), b in raw_poly(10, 2, 3), c in raw_poly(10, 2, 3)) {
        let ch = mixed_chart();
        let f = homogeneous(ch.algebra(), &a);
        let g = homogeneous(ch.algebra(), &b);
        let h = homogeneous(ch.algebra(), &c);
        let lhs = poisson(&f, &(&g * &h), &ch);
        let s = sign(deg(&f) * deg(&g));
        let rhs = &(&poisson(&f, &g, &ch) * &h) + &(&g * &poisson(&f, &h, &ch)).scale(&s);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hamiltonian_field_matches_bracket(a in raw_poly(10, 3, 3), b in raw_poly(10, 3, 3)) {
        let ch = mixed_chart();
        let f = homogeneous(ch.algebra(), &a);
        let g = build(ch.algebra(), &b);
        prop_assert_eq!(ham_vf(&f, &ch).apply(&g), poisson(&f, &g, &ch));
    }
}
