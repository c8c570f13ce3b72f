//! Canonical graded-commutative polynomials.

use super::coeff::{Coeff, Embed, Rat};
use super::GalgError;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: i32,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: i32) -> Self {
        Generator { id: id.into(), degree }
    }
    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
    pub fn parity(&self) -> u8 {
        self.degree.rem_euclid(2) as u8
    }
}

/// An ordered list of generators. The declaration order is the monomial order.
#[derive(Debug)]
pub struct Algebra {
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}

impl Algebra {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Algebra>, GalgError> {
        let mut index = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(GalgError::DuplicateGenerator(g.id.clone()));
            }
        }
        Ok(Arc::new(Algebra { gens, index }))
    }

    /// A new algebra whose first generators are those of `self`, in order.
    pub fn extend(&self, more: Vec<Generator>) -> Result<Arc<Algebra>, GalgError> {
        let mut gens = self.gens.clone();
        gens.extend(more);
        Algebra::new(gens)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }
    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }
    pub fn index_of(&self, id: &str) -> Result<usize, GalgError> {
        self.index.get(id).copied().ok_or_else(|| GalgError::UnknownGenerator(id.to_string()))
    }
    pub fn degree(&self, i: usize) -> i32 {
        self.gens[i].degree
    }
    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].is_odd()
    }
}

pub fn same_algebra(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sorted list of `(generator index, exponent)`; odd generators have exponent 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub(crate) Vec<(u32, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }
    pub fn single(i: usize) -> Self {
        Mono(vec![(i as u32, 1)])
    }
    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }
    pub fn word_len(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }
    pub fn degree(&self, alg: &Algebra) -> i32 {
        self.0.iter().map(|&(g, e)| alg.degree(g as usize) * e as i32).sum()
    }
    pub fn is_odd(&self, alg: &Algebra) -> bool {
        self.degree(alg).rem_euclid(2) == 1
    }
    pub fn exponent(&self, i: usize) -> u32 {
        self.0
            .binary_search_by_key(&(i as u32), |&(g, _)| g)
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }
    pub fn contains(&self, i: usize) -> bool {
        self.exponent(i) > 0
    }

    /// Product of canonical monomials. Returns `None` if an odd generator repeats,
    /// otherwise the product and whether the Koszul sign is negative.
    pub fn mul(&self, other: &Mono, alg: &Algebra) -> Option<(Mono, bool)> {
        let a = &self.0;
        let b = &other.0;
        // number of odd factors in a[k..]
        let mut suffix_odd = vec![0u32; a.len() + 1];
        for k in (0..a.len()).rev() {
            suffix_odd[k] = suffix_odd[k + 1] + u32::from(alg.is_odd(a[k].0 as usize));
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut swaps = 0u32;
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                if alg.is_odd(b[j].0 as usize) {
                    swaps += suffix_odd[i];
                }
                out.push(b[j]);
                j += 1;
            } else {
                let g = a[i].0;
                if alg.is_odd(g as usize) {
                    return None;
                }
                out.push((g, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        Some((Mono(out), swaps % 2 == 1))
    }
}

/// Exact graded-commutative polynomial with coefficients in `C`.
#[derive(Clone)]
pub struct Poly<C: Coeff = Rat> {
    alg: Arc<Algebra>,
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> PartialEq for Poly<C> {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.alg, &other.alg) && self.terms == other.terms
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero(alg: &Arc<Algebra>) -> Self {
        Poly { alg: alg.clone(), terms: BTreeMap::new() }
    }
    pub fn constant(alg: &Arc<Algebra>, c: C) -> Self {
        let mut p = Poly::zero(alg);
        p.add_term(Mono::one(), c);
        p
    }
    pub fn one(alg: &Arc<Algebra>) -> Self {
        Poly::constant(alg, C::one())
    }
    pub fn from_rat(alg: &Arc<Algebra>, r: Rat) -> Self {
        Poly::constant(alg, C::from_rat(r))
    }
    pub fn gen(alg: &Arc<Algebra>, i: usize) -> Self {
        let mut p = Poly::zero(alg);
        p.add_term(Mono::single(i), C::one());
        p
    }
    pub fn var(alg: &Arc<Algebra>, id: &str) -> Result<Self, GalgError> {
        Ok(Poly::gen(alg, alg.index_of(id)?))
    }
    /// Build from already-canonical monomials.
    pub fn from_terms(alg: &Arc<Algebra>, terms: impl IntoIterator<Item = (Mono, C)>) -> Self {
        let mut p = Poly::zero(alg);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Canonical form of a list of raw terms, each a coefficient times an arbitrary-order
    /// word of `(generator id, exponent)` factors.
    pub fn normalize(alg: &Arc<Algebra>, raw: &[(C, Vec<(&str, u32)>)]) -> Result<Self, GalgError> {
        let mut out = Poly::zero(alg);
        for (c, word) in raw {
            let mut t = Poly::constant(alg, c.clone());
            for &(id, e) in word {
                let g = Poly::var(alg, id)?;
                t = &t * &g.pow(e);
            }
            out = &out + &t;
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }
    pub fn into_terms(self) -> BTreeMap<Mono, C> {
        self.terms
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }
    pub fn constant_term(&self) -> C {
        self.coeff(&Mono::one())
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_poly(&mut self, other: &Poly<C>) {
        self.check_same(other).expect("polynomials from different algebras");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    fn check_same(&self, other: &Poly<C>) -> Result<(), GalgError> {
        if same_algebra(&self.alg, &other.alg) {
            Ok(())
        } else {
            Err(GalgError::MixedAlgebras)
        }
    }

    /// Degree if every term has the same degree; `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| m.degree(&self.alg));
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }
    pub fn max_word_len(&self) -> u32 {
        self.terms.keys().map(|m| m.word_len()).max().unwrap_or(0)
    }
    pub fn min_word_len(&self) -> u32 {
        self.terms.keys().map(|m| m.word_len()).min().unwrap_or(0)
    }
    /// Part of the given degree.
    pub fn degree_part(&self, d: i32) -> Self {
        self.filter(|m| m.degree(&self.alg) == d)
    }
    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        Poly {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.contains(i))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.alg);
        }
        Poly {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).filter(|(_, x)| !x.is_zero()).collect(),
        }
    }
    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&C::from_rat(r.clone()))
    }

    /// Multiply each term by `(-1)^(k * deg(term))`.
    pub fn parity_twist(&self, k: i32) -> Self {
        if k.rem_euclid(2) == 0 {
            return self.clone();
        }
        Poly {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), if m.is_odd(&self.alg) { c.neg() } else { c.clone() }))
                .collect(),
        }
    }

    pub fn try_mul(&self, other: &Poly<C>) -> Result<Self, GalgError> {
        self.check_same(other)?;
        let mut out = Poly::zero(&self.alg);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb, &self.alg) {
                    let c = ca.mul(cb);
                    out.add_term(m, if neg { c.neg() } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Poly::one(&self.alg);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Left derivative with respect to generator `i`.
    pub fn partial_left(&self, i: usize) -> Self {
        let gi = i as u32;
        let odd_g = self.alg.is_odd(i);
        let mut out = Poly::zero(&self.alg);
        for (m, c) in &self.terms {
            let Ok(pos) = m.0.binary_search_by_key(&gi, |&(g, _)| g) else { continue };
            let e = m.0[pos].1;
            let mut neg = false;
            if odd_g {
                let before: u32 = m.0[..pos]
                    .iter()
                    .filter(|&&(g, _)| self.alg.is_odd(g as usize))
                    .map(|&(_, e)| e)
                    .sum();
                neg = before % 2 == 1;
            }
            let mut f = m.0.clone();
            if e == 1 {
                f.remove(pos);
            } else {
                f[pos].1 = e - 1;
            }
            let mut cc = c.mul(&C::from_rat(super::coeff::rint(e as i64)));
            if neg {
                cc = cc.neg();
            }
            out.add_term(Mono(f), cc);
        }
        out
    }

    /// Algebra morphism into `target`: generators in `map` go to their images, the rest
    /// go to the same-named generator of `target`.
    pub fn substitute(&self, target: &Arc<Algebra>, map: &HashMap<usize, Poly<C>>) -> Result<Poly<C>, GalgError> {
        let mut images: HashMap<u32, Poly<C>> = HashMap::new();
        for (m, _) in &self.terms {
            for &(g, _) in &m.0 {
                if images.contains_key(&g) {
                    continue;
                }
                let gi = g as usize;
                let img = match map.get(&gi) {
                    Some(p) => {
                        if !same_algebra(p.algebra(), target) {
                            return Err(GalgError::MixedAlgebras);
                        }
                        let d = self.alg.degree(gi);
                        if !p.is_zero() && p.homogeneous_degree() != Some(d) {
                            return Err(GalgError::DegreeMismatch {
                                generator: self.alg.generator(gi).id.clone(),
                                expected: d,
                                found: p.homogeneous_degree(),
                            });
                        }
                        p.clone()
                    }
                    None => {
                        let src = self.alg.generator(gi);
                        let t = target.index_of(&src.id)?;
                        if target.degree(t) != src.degree {
                            return Err(GalgError::DegreeMismatch {
                                generator: src.id.clone(),
                                expected: src.degree,
                                found: Some(target.degree(t)),
                            });
                        }
                        Poly::gen(target, t)
                    }
                };
                images.insert(g, img);
            }
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for &(g, e) in &m.0 {
                t = &t * &images[&g].pow(e);
                if t.is_zero() {
                    break;
                }
            }
            out.add_assign_poly(&t);
        }
        Ok(out)
    }

    /// Set the listed generators to zero.
    pub fn kill(&self, gens: &[usize]) -> Self {
        self.filter(|m| gens.iter().all(|&g| !m.contains(g)))
    }

    /// Same element viewed in `target`, which must contain every generator by name with
    /// the same degree.
    pub fn lift(&self, target: &Arc<Algebra>) -> Result<Poly<C>, GalgError> {
        if same_algebra(&self.alg, target) {
            return Ok(Poly { alg: target.clone(), terms: self.terms.clone() });
        }
        let mut remap = Vec::with_capacity(self.alg.len());
        let mut monotone = true;
        for (i, g) in self.alg.gens().iter().enumerate() {
            let t = target.index_of(&g.id)?;
            if target.degree(t) != g.degree {
                return Err(GalgError::DegreeMismatch { generator: g.id.clone(), expected: g.degree, found: Some(target.degree(t)) });
            }
            if i > 0 && t <= remap[i - 1] {
                monotone = false;
            }
            remap.push(t);
        }
        if monotone {
            let terms = self
                .terms
                .iter()
                .map(|(m, c)| (Mono(m.0.iter().map(|&(g, e)| (remap[g as usize] as u32, e)).collect()), c.clone()))
                .collect();
            return Ok(Poly { alg: target.clone(), terms });
        }
        self.substitute(target, &HashMap::new())
    }

    /// Drop monomials of word length greater than `d`.
    pub fn truncate(&self, d: u32) -> Self {
        self.filter(|m| m.word_len() <= d)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(&self.alg);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn embed<D: Coeff>(&self) -> Poly<D>
    where
        C: Embed<D>,
    {
        self.map_coeffs(|c| c.embed())
    }

    pub fn mono_string(&self, m: &Mono) -> String {
        m.0.iter()
            .map(|&(g, e)| {
                let id = &self.alg.generator(g as usize).id;
                if e == 1 {
                    id.clone()
                } else {
                    format!("{}^{}", id, e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = if c.is_compound() { format!("({})", c) } else { c.to_string() };
            if m.0.is_empty() {
                write!(f, "{}", cs)?;
            } else {
                write!(f, "{} * {}", cs, self.mono_string(m))?;
            }
        }
        Ok(())
    }
}

impl<'a, C: Coeff> Add<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        out.add_assign_poly(rhs);
        out
    }
}

impl<'a, C: Coeff> Sub<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        out.add_assign_poly(&-rhs);
        out
    }
}

impl<'a, C: Coeff> Neg for &'a Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { alg: self.alg.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }
}

impl<'a, C: Coeff> Mul<&'a Poly<C>> for &'a Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        self.try_mul(rhs).expect("polynomials from different algebras")
    }
}

/// All monomials in the generators `gens` (indices ascending) of word length at most `max_len`.
pub fn monomial_basis(alg: &Algebra, gens: &[usize], max_len: u32) -> Vec<Mono> {
    let mut gens = gens.to_vec();
    gens.sort_unstable();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(alg: &Algebra, gens: &[usize], k: usize, left: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Mono>) {
        if k == gens.len() {
            out.push(Mono(cur.clone()));
            return;
        }
        let g = gens[k];
        let max_e = if alg.is_odd(g) { left.min(1) } else { left };
        for e in 0..=max_e {
            if e > 0 {
                cur.push((g as u32, e));
            }
            rec(alg, gens, k + 1, left - e, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    rec(alg, &gens, 0, max_len, &mut cur, &mut out);
    out.sort();
    out
}

/// Sum of an iterator of polynomials over `alg`.
pub fn sum<C: Coeff>(alg: &Arc<Algebra>, it: impl IntoIterator<Item = Poly<C>>) -> Poly<C> {
    let mut out = Poly::zero(alg);
    for p in it {
        out.add_assign_poly(&p);
    }
    out
}
