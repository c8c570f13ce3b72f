#![allow(dead_code)]

use gradsym::galg::{rint, Algebra, Generator, Poly, Rat};
use gradsym::phase::PhaseChart;
use proptest::prelude::*;
use std::sync::Arc;

/// Mixed-degree chart: two even pairs, two odd pairs, and one degree-2 pair.
pub fn mixed_chart() -> PhaseChart {
    let alg = Algebra::new(vec![
        Generator::new("q1", 0),
        Generator::new("p1", 0),
        Generator::new("c1", 1),
        Generator::new("b1", -1),
        Generator::new("q2", 0),
        Generator::new("p2", 0),
        Generator::new("c2", 1),
        Generator::new("b2", -1),
        Generator::new("m", 2),
        Generator::new("n", -2),
    ])
    .unwrap();
    PhaseChart::new(&alg, &[("q1", "p1"), ("c1", "b1"), ("q2", "p2"), ("c2", "b2"), ("m", "n")]).unwrap()
}

pub type RawPoly = Vec<(i8, Vec<usize>)>;

pub fn raw_poly(ngens: usize, max_terms: usize, max_len: usize) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec((-3i8..=3, prop::collection::vec(0..ngens, 0..=max_len)), 1..=max_terms)
}

/// Build a polynomial by multiplying the listed generators in the given (unsorted) order.
pub fn build(alg: &Arc<Algebra>, raw: &RawPoly) -> Poly<Rat> {
    let mut out = Poly::zero(alg);
    for (c, word) in raw {
        let mut t = Poly::from_rat(alg, rint(*c as i64));
        for &g in word {
            t = &t * &Poly::gen(alg, g);
        }
        out = &out + &t;
    }
    out
}

/// Homogeneous part of the degree carried by the first nonzero term.
pub fn homogeneous(alg: &Arc<Algebra>, raw: &RawPoly) -> Poly<Rat> {
    let p = build(alg, raw);
    let d = p.terms().next().map(|(m, _)| m.degree(alg));
    match d {
        Some(d) => p.degree_part(d),
        None => p,
    }
}

pub fn sign(d: i32) -> Rat {
    if d.rem_euclid(2) == 0 {
        rint(1)
    } else {
        rint(-1)
    }
}

pub fn deg(p: &Poly<Rat>) -> i32 {
    p.homogeneous_degree().unwrap_or(0)
}
