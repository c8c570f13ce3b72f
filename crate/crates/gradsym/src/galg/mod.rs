//! Exact graded-commutative polynomials in finitely many Z-graded generators.
//!
//! Monomials are stored sorted by declaration index, so every element has a unique
//! canonical form; Koszul signs are absorbed into coefficients when factors are reordered.

pub mod coeff;
mod parse;
mod poly;

pub use coeff::{rat, rat_to_f64, rint, Coeff, Embed, Gauss, QiH, Rat};
pub use parse::parse_poly;
pub use poly::{monomial_basis, same_algebra, sum, Algebra, Generator, Mono, Poly};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GalgError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("degree mismatch for `{generator}`: expected {expected}, found {found:?}")]
    DegreeMismatch { generator: String, expected: i32, found: Option<i32> },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::sync::Arc;

    fn alg() -> Arc<Algebra> {
        Algebra::new(vec![
            Generator::new("x", 0),
            Generator::new("t1", 1),
            Generator::new("t2", 1),
            Generator::new("y", 0),
        ])
        .unwrap()
    }

    fn p(a: &Arc<Algebra>, s: &str) -> Poly {
        parse_poly(a, s).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let a = alg();
        let r = Poly::<Rat>::normalize(&a, &[(rint(1), vec![("t2", 1), ("t1", 1)])]).unwrap();
        assert_eq!(r, p(&a, "-1 * t1 t2"));
        let r = Poly::<Rat>::normalize(&a, &[(rint(1), vec![("x", 1)]), (rint(1), vec![("x", 1)])]).unwrap();
        assert_eq!(r, p(&a, "2 * x"));
        let r = Poly::<Rat>::normalize(&a, &[(rint(1), vec![("t1", 1), ("t1", 1)])]).unwrap();
        assert!(r.is_zero());
        assert!(matches!(
            Poly::<Rat>::normalize(&a, &[(rint(1), vec![("zz", 1)])]),
            Err(GalgError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn multiply_examples() {
        let a = alg();
        let t1 = p(&a, "t1");
        let t2 = p(&a, "t2");
        assert_eq!(&t1 * &t2, -&(&t2 * &t1));
        assert_eq!(&p(&a, "x + t1 t2") * &p(&a, "x"), p(&a, "x^2 + x t1 t2"));
        // odd cross terms cancel: t1 t2 + t2 t1 = 0
        let s = &t1 + &t2;
        assert!((&s * &s).is_zero());
        let e = p(&a, "x + y");
        assert_eq!(&e * &e, p(&a, "x^2 + 2 x y + y^2"));
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = alg();
        let b = Algebra::new(vec![Generator::new("z", 0)]).unwrap();
        let x = p(&a, "x");
        let z: Poly = parse_poly(&b, "z").unwrap();
        assert_eq!(x.try_mul(&z), Err(GalgError::MixedAlgebras));
    }

    #[test]
    fn partial_left_examples() {
        let a = alg();
        let t1 = a.index_of("t1").unwrap();
        let t2 = a.index_of("t2").unwrap();
        let x = a.index_of("x").unwrap();
        assert_eq!(p(&a, "t1 t2").partial_left(t1), p(&a, "t2"));
        assert_eq!(p(&a, "t1 t2").partial_left(t2), p(&a, "-t1"));
        assert_eq!(p(&a, "x^2 t1").partial_left(x), p(&a, "2 x t1"));
    }

    #[test]
    fn substitute_examples() {
        let a = alg();
        let x = a.index_of("x").unwrap();
        let t2 = a.index_of("t2").unwrap();
        let q = p(&a, "x^2");
        let m: HashMap<usize, Poly> = [(x, p(&a, "x + 1"))].into_iter().collect();
        assert_eq!(q.substitute(&a, &m).unwrap(), p(&a, "x^2 + 2x + 1"));
        assert_eq!(q.substitute(&a, &HashMap::new()).unwrap(), q);
        let s = p(&a, "t1 x + t1 t2 y");
        let m: HashMap<usize, Poly> = [(t2, Poly::zero(&a))].into_iter().collect();
        assert_eq!(s.substitute(&a, &m).unwrap(), p(&a, "t1 x"));
        let bad: HashMap<usize, Poly> = [(x, p(&a, "t1"))].into_iter().collect();
        assert!(matches!(q.substitute(&a, &bad), Err(GalgError::DegreeMismatch { .. })));
    }

    #[test]
    fn truncate_examples() {
        let a = alg();
        assert_eq!(p(&a, "x^3 + x").truncate(2), p(&a, "x"));
        assert_eq!(p(&a, "t1 t2").truncate(2), p(&a, "t1 t2"));
        assert_eq!(p(&a, "3 + x + t1 t2").truncate(0), p(&a, "3"));
    }

    #[test]
    fn text_round_trip() {
        let a = alg();
        let q: Poly = p(&a, "-3/2 * t2 t1 x + 7 y^3 - 1/5");
        let back: Poly = parse_poly(&a, &q.to_string()).unwrap();
        assert_eq!(q, back);
        let h: Poly<QiH> = parse_poly(&a, "(1/2 + i) * hbar^2 * x t1 - i hbar y").unwrap();
        let back: Poly<QiH> = parse_poly(&a, &h.to_string()).unwrap();
        assert_eq!(h, back);
        assert!(parse_poly::<Rat>(&a, "i * x").is_err());
        assert!(matches!(parse_poly::<Rat>(&a, "x + @"), Err(GalgError::Parse { pos: 4, .. })));
    }

    #[test]
    fn lift_into_extension() {
        let a = alg();
        let b = a.extend(vec![Generator::new("w", 1)]).unwrap();
        let q = p(&a, "t1 t2 x");
        let l = q.lift(&b).unwrap();
        assert_eq!(l, parse_poly(&b, "t1 t2 x").unwrap());
    }
}
