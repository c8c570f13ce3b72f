//! Formal quantisation in a vertical polarisation: functions on a graded Darboux chart
//! become differential operators with coefficients in `Q(i)[hbar]` acting on polynomials
//! in the leaf coordinates.

use crate::check::Check;
use crate::galg::{monomial_basis, rint, Algebra, Coeff, Embed, GalgError, Gauss, Generator, Mono, Poly, QiH, Rat};
use crate::dbfv::DoubleBfv;
use crate::phase::{poisson, PhaseChart};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantError {
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error("pair ({0}, {1}) must have exactly one leaf coordinate")]
    NotLagrangian(String, String),
    #[error("term `{term}` has fibre order {order}, at most {max} allowed")]
    FibreOrder { term: String, order: u32, max: u32 },
    #[error("operators act on different state spaces")]
    Mismatch,
}

#[derive(Clone, Debug)]
enum Slot {
    Leaf(usize),
    /// Fibre conjugate to the given leaf, with the constant in front of its derivative.
    Fibre(usize, QiH),
}

/// Choice of leaf coordinates, one in every Darboux pair. Each fibre coordinate `y` with
/// leaf partner `x` is represented by `i hbar {y, x} d/dx`, which for an even pair with
/// `{q, p} = 1` is `p -> -i hbar d/dq`.
#[derive(Clone, Debug)]
pub struct Polarization {
    chart: PhaseChart,
    leaves: Vec<usize>,
    leaf_alg: Arc<Algebra>,
    dual_alg: Arc<Algebra>,
    slots: Vec<Slot>,
}

impl Polarization {
    pub fn new(chart: &PhaseChart, leaves: &[&str]) -> Result<Self, QuantError> {
        let alg = chart.algebra();
        let mut is_leaf = vec![false; alg.len()];
        for id in leaves {
            is_leaf[alg.index_of(id)?] = true;
        }
        Polarization::from_mask(chart, &is_leaf)
    }

    /// Leaves are the first members of every pair.
    pub fn positions(chart: &PhaseChart) -> Self {
        let mut is_leaf = vec![false; chart.algebra().len()];
        for &(q, _) in chart.pairs() {
            is_leaf[q] = true;
        }
        Polarization::from_mask(chart, &is_leaf).expect("one leaf per pair")
    }

    fn from_mask(chart: &PhaseChart, is_leaf: &[bool]) -> Result<Self, QuantError> {
        let alg = chart.algebra();
        for &(a, b) in chart.pairs() {
            if is_leaf[a] == is_leaf[b] {
                return Err(QuantError::NotLagrangian(alg.generator(a).id.clone(), alg.generator(b).id.clone()));
            }
        }
        let leaves: Vec<usize> = (0..alg.len()).filter(|&i| is_leaf[i]).collect();
        let leaf_alg = Algebra::new(leaves.iter().map(|&i| alg.generator(i).clone()).collect())?;
        let dual_alg = Algebra::new(
            leaves.iter().map(|&i| Generator::new(format!("d/d{}", alg.generator(i).id), -alg.degree(i))).collect(),
        )?;
        let leaf_pos: HashMap<usize, usize> = leaves.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let i_hbar = QiH::imag_unit().unwrap().mul(&QiH::hbar().unwrap());
        let slots = (0..alg.len())
            .map(|i| {
                if is_leaf[i] {
                    Slot::Leaf(leaf_pos[&i])
                } else {
                    let x = chart.partner(i);
                    let br: Poly<Rat> = poisson(&Poly::gen(alg, i), &Poly::gen(alg, x), chart);
                    Slot::Fibre(leaf_pos[&x], i_hbar.mul(&QiH::from_rat(br.constant_term())))
                }
            })
            .collect();
        Ok(Polarization { chart: chart.clone(), leaves, leaf_alg, dual_alg, slots })
    }

    pub fn chart(&self) -> &PhaseChart {
        &self.chart
    }
    pub fn leaf_algebra(&self) -> &Arc<Algebra> {
        &self.leaf_alg
    }
    pub fn dual_algebra(&self) -> &Arc<Algebra> {
        &self.dual_alg
    }
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Leaf-only polynomial of the chart as a state.
    pub fn state<C: Coeff + Embed<QiH>>(&self, f: &Poly<C>) -> Result<Poly<QiH>, QuantError> {
        let f = f.lift(self.chart.algebra())?;
        let mut terms = Vec::new();
        for (m, c) in f.terms() {
            let mut out = Vec::new();
            for &(g, e) in m.factors() {
                match self.slots[g as usize] {
                    Slot::Leaf(k) => out.push((k as u32, e)),
                    Slot::Fibre(..) => {
                        return Err(GalgError::UnknownGenerator(self.chart.algebra().generator(g as usize).id.clone()).into())
                    }
                }
            }
            terms.push((Mono(out), c.embed()));
        }
        Ok(Poly::from_terms(&self.leaf_alg, terms))
    }
}

/// `sum c * x^A (d/dx)^B` with every derivative to the right of every multiplication.
#[derive(Clone, PartialEq)]
pub struct FormalOperator {
    alg: Arc<Algebra>,
    dual: Arc<Algebra>,
    terms: BTreeMap<(Mono, Mono), QiH>,
}

fn add_into(map: &mut HashMap<(Mono, Mono), QiH>, key: (Mono, Mono), c: QiH) {
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            e.get_mut().add_assign(&c);
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
    }
}

/// `d/dx_i` of a monomial: the result and the integer factor including the Koszul sign.
fn mono_partial(m: &Mono, i: usize, alg: &Algebra) -> Option<(Mono, i64)> {
    let f = m.factors();
    let pos = f.binary_search_by_key(&(i as u32), |&(g, _)| g).ok()?;
    let e = f[pos].1;
    let mut sign = 1;
    if alg.is_odd(i) {
        let before: u32 = f[..pos].iter().filter(|&&(g, _)| alg.is_odd(g as usize)).map(|&(_, e)| e).sum();
        if before % 2 == 1 {
            sign = -1;
        }
    }
    let mut out = f.to_vec();
    if e == 1 {
        out.remove(pos);
    } else {
        out[pos].1 = e - 1;
    }
    Some((Mono(out), sign * e as i64))
}

fn sign_coeff(c: &QiH, neg: bool) -> QiH {
    if neg {
        c.neg()
    } else {
        c.clone()
    }
}

impl FormalOperator {
    pub fn zero(pol: &Polarization) -> Self {
        FormalOperator { alg: pol.leaf_alg.clone(), dual: pol.dual_alg.clone(), terms: BTreeMap::new() }
    }
    pub fn identity(pol: &Polarization) -> Self {
        let mut o = FormalOperator::zero(pol);
        o.terms.insert((Mono::one(), Mono::one()), QiH::one());
        o
    }
    /// Multiplication by a leaf polynomial.
    pub fn multiplication(pol: &Polarization, f: &Poly<QiH>) -> Result<Self, QuantError> {
        let f = f.lift(&pol.leaf_alg)?;
        let mut o = FormalOperator::zero(pol);
        for (m, c) in f.terms() {
            o.terms.insert((m.clone(), Mono::one()), c.clone());
        }
        Ok(o)
    }
    /// `c * d/dx` for a leaf `x` given by its index among the leaves.
    pub fn derivative(pol: &Polarization, leaf: usize, c: QiH) -> Self {
        let mut o = FormalOperator::zero(pol);
        if !c.is_zero() {
            o.terms.insert((Mono::one(), Mono::single(leaf)), c);
        }
        o
    }
    /// `sum c * x^A (d/dx)^B` from `((x^A, (d/dx)^B), c)` entries.
    pub fn from_terms(pol: &Polarization, terms: impl IntoIterator<Item = ((Mono, Mono), QiH)>) -> Self {
        let mut map = HashMap::new();
        for (k, c) in terms {
            add_into(&mut map, k, c);
        }
        FormalOperator::zero(pol).from_map(map)
    }
    /// `self / (i hbar)`, defined when every coefficient is divisible by `hbar`.
    pub fn div_i_hbar(&self) -> Option<Self> {
        let minus_i = QiH::gauss(Gauss::new(rint(0), rint(-1)));
        let mut map = HashMap::new();
        for (k, v) in &self.terms {
            add_into(&mut map, k.clone(), v.lower_hbar()?.mul(&minus_i));
        }
        Some(self.from_map(map))
    }
    fn from_map(&self, map: HashMap<(Mono, Mono), QiH>) -> Self {
        FormalOperator { alg: self.alg.clone(), dual: self.dual.clone(), terms: map.into_iter().collect() }
    }
    fn same_space(&self, o: &FormalOperator) -> Result<(), QuantError> {
        if crate::galg::same_algebra(&self.alg, &o.alg) {
            Ok(())
        } else {
            Err(QuantError::Mismatch)
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Mono, Mono), &QiH)> {
        self.terms.iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn term_degree(&self, m: &Mono, d: &Mono) -> i32 {
        m.degree(&self.alg) + d.degree(&self.dual)
    }
    /// Ghost degree if all terms share one.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|(m, d)| self.term_degree(m, d));
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }
    fn parity_part(&self, odd: bool) -> FormalOperator {
        FormalOperator {
            alg: self.alg.clone(),
            dual: self.dual.clone(),
            terms: self
                .terms
                .iter()
                .filter(|((m, d), _)| (self.term_degree(m, d).rem_euclid(2) == 1) == odd)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }
    /// Highest power of `hbar` in any coefficient.
    pub fn hbar_order(&self) -> usize {
        self.terms.values().filter_map(|c| c.hbar_degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &QiH) -> Self {
        let mut map = HashMap::new();
        for (k, v) in &self.terms {
            add_into(&mut map, k.clone(), v.mul(c));
        }
        self.from_map(map)
    }
    pub fn add(&self, o: &FormalOperator) -> Self {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            let e = out.terms.entry(k.clone()).or_insert_with(QiH::zero);
            e.add_assign(v);
            if e.is_zero() {
                out.terms.remove(k);
            }
        }
        out
    }
    pub fn sub(&self, o: &FormalOperator) -> Self {
        self.add(&o.scale(&QiH::one().neg()))
    }

    /// `d/dx_b` composed on the left of `self`.
    fn derive_left(&self, b: usize, terms: &HashMap<(Mono, Mono), QiH>) -> HashMap<(Mono, Mono), QiH> {
        let mut out = HashMap::new();
        let b_odd = self.alg.is_odd(b);
        for ((m, d), c) in terms {
            if let Some((dm, k)) = mono_partial(m, b, &self.alg) {
                add_into(&mut out, (dm, d.clone()), c.mul(&QiH::from_rat(crate::galg::rint(k))));
            }
            let pass = b_odd && m.is_odd(&self.alg);
            if let Some((nd, neg)) = Mono::single(b).mul(d, &self.dual) {
                add_into(&mut out, (m.clone(), nd), sign_coeff(c, pass ^ neg));
            }
        }
        out
    }

    /// Operator product `self * o` in normal form.
    pub fn compose(&self, o: &FormalOperator) -> Result<FormalOperator, QuantError> {
        self.same_space(o)?;
        let base: HashMap<(Mono, Mono), QiH> = o.terms.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        // group by derivative part so each derivative word is pushed through once
        let mut by_d: BTreeMap<&Mono, Vec<(&Mono, &QiH)>> = BTreeMap::new();
        for ((m, d), c) in &self.terms {
            by_d.entry(d).or_default().push((m, c));
        }
        let partials: Vec<HashMap<(Mono, Mono), QiH>> = by_d
            .par_iter()
            .map(|(d, lefts)| {
                let mut p = base.clone();
                for &(g, e) in d.factors().iter().rev() {
                    for _ in 0..e {
                        p = self.derive_left(g as usize, &p);
                    }
                }
                let mut out = HashMap::new();
                for (am, ac) in lefts {
                    for ((m, dd), c) in &p {
                        if let Some((nm, neg)) = am.mul(m, &self.alg) {
                            add_into(&mut out, (nm, dd.clone()), sign_coeff(&ac.mul(c), neg));
                        }
                    }
                }
                out
            })
            .collect();
        let mut total = HashMap::new();
        for part in partials {
            for (k, v) in part {
                add_into(&mut total, k, v);
            }
        }
        Ok(self.from_map(total))
    }

    /// Graded commutator `[A, B] = AB - (-1)^{|A||B|} BA`, taken parity component-wise.
    pub fn commutator(&self, o: &FormalOperator) -> Result<FormalOperator, QuantError> {
        self.same_space(o)?;
        let mut out = FormalOperator { alg: self.alg.clone(), dual: self.dual.clone(), terms: BTreeMap::new() };
        for pa in [false, true] {
            let a = self.parity_part(pa);
            if a.is_zero() {
                continue;
            }
            for pb in [false, true] {
                let b = o.parity_part(pb);
                if b.is_zero() {
                    continue;
                }
                let ab = a.compose(&b)?;
                let ba = b.compose(&a)?;
                let part = if pa && pb { ab.add(&ba) } else { ab.sub(&ba) };
                out = out.add(&part);
            }
        }
        Ok(out)
    }

    /// Action on a leaf polynomial.
    pub fn apply(&self, f: &Poly<QiH>) -> Poly<QiH> {
        let mut out = Poly::zero(&self.alg);
        for ((m, d), c) in &self.terms {
            let mut g = f.clone();
            for &(k, e) in d.factors().iter().rev() {
                for _ in 0..e {
                    g = g.partial_left(k as usize);
                }
                if g.is_zero() {
                    break;
                }
            }
            if g.is_zero() {
                continue;
            }
            let left = Poly::from_terms(&self.alg, [(m.clone(), c.clone())]);
            out.add_assign_poly(&(&left * &g));
        }
        out
    }
}

impl fmt::Debug for FormalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FormalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let word = |m: &Mono, a: &Algebra| {
            m.factors()
                .iter()
                .map(|&(g, e)| {
                    let id = &a.generator(g as usize).id;
                    if e == 1 {
                        id.clone()
                    } else {
                        format!("({})^{}", id, e)
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((m, d), c)| {
                let coef = if c.is_compound() { format!("({})", c) } else { c.to_string() };
                let body = [word(m, &self.alg), word(d, &self.dual)].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>();
                if body.is_empty() {
                    coef
                } else {
                    format!("{} * {}", coef, body.join(" "))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Quantisation with fibre variables replaced by derivatives placed to the right, for
/// functions of fibre order at most `max_order`.
pub fn quantize<C: Coeff + Embed<QiH>>(f: &Poly<C>, pol: &Polarization, max_order: u32) -> Result<FormalOperator, QuantError> {
    let alg = pol.chart.algebra();
    let f = f.lift(alg)?;
    let mut map = HashMap::new();
    for (m, c) in f.terms() {
        let mut leaf = Vec::new();
        let mut fibre = Vec::new();
        let mut order = 0;
        for &(g, e) in m.factors() {
            match &pol.slots[g as usize] {
                Slot::Leaf(_) => leaf.push((g, e)),
                Slot::Fibre(..) => {
                    fibre.push((g, e));
                    order += e;
                }
            }
        }
        if order > max_order {
            return Err(QuantError::FibreOrder { term: f.mono_string(m), order, max: max_order });
        }
        let (leaf, fibre) = (Mono(leaf), Mono(fibre));
        let (_, neg) = leaf.mul(&fibre, alg).expect("split of a valid monomial");
        let mut coef = sign_coeff(&c.embed(), neg);
        let mut dmono = Mono::one();
        for &(g, e) in fibre.factors() {
            let Slot::Fibre(x, k) = &pol.slots[g as usize] else { unreachable!() };
            for _ in 0..e {
                coef = coef.mul(k);
                let (nd, ng) = dmono.mul(&Mono::single(*x), &pol.dual_alg).expect("fibre monomial is valid");
                if ng {
                    coef = coef.neg();
                }
                dmono = nd;
            }
        }
        let lm = Mono(leaf.factors().iter().map(|&(g, e)| {
            let Slot::Leaf(k) = pol.slots[g as usize] else { unreachable!() };
            (k as u32, e)
        }).collect());
        add_into(&mut map, (lm, dmono), coef);
    }
    Ok(FormalOperator { alg: pol.leaf_alg.clone(), dual: pol.dual_alg.clone(), terms: map.into_iter().collect() })
}

/// `f -> f_0 + sum (i hbar {y,x}) f_y d/dx` for `f` at most linear in the fibres.
pub fn quantize_linear<C: Coeff + Embed<QiH>>(f: &Poly<C>, pol: &Polarization) -> Result<FormalOperator, QuantError> {
    quantize(f, pol, 1)
}

/// As `quantize_linear`, allowing fibre order two, with both derivatives on the right.
pub fn quantize_quadratic<C: Coeff + Embed<QiH>>(f: &Poly<C>, pol: &Polarization) -> Result<FormalOperator, QuantError> {
    quantize(f, pol, 2)
}

/// Polynomials in the leaf coordinates of word length at most `max_len`.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub alg: Arc<Algebra>,
    pub max_len: u32,
    pub basis: Vec<Mono>,
}

/// Outcome of applying an operator to every basis state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowResult {
    pub states: usize,
    pub nonzero: usize,
    /// States whose image leaves the window; images are kept exact, never truncated.
    pub overflow: usize,
}

impl StateSpace {
    pub fn new(pol: &Polarization, max_len: u32) -> Self {
        let alg = pol.leaf_alg.clone();
        let all: Vec<usize> = (0..alg.len()).collect();
        let basis = monomial_basis(&alg, &all, max_len);
        StateSpace { alg, max_len, basis }
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn state(&self, k: usize) -> Poly<QiH> {
        Poly::from_terms(&self.alg, [(self.basis[k].clone(), QiH::one())])
    }
    /// Applies `ops` right to left (`ops[0]` acts last) to every basis state.
    pub fn apply_chain(&self, ops: &[&FormalOperator]) -> WindowResult {
        let results: Vec<(bool, bool)> = (0..self.dim())
            .into_par_iter()
            .map(|k| {
                let mut s = self.state(k);
                let mut over = false;
                for op in ops.iter().rev() {
                    s = op.apply(&s);
                    over |= s.max_word_len() > self.max_len;
                }
                (!s.is_zero(), over)
            })
            .collect();
        WindowResult {
            states: self.dim(),
            nonzero: results.iter().filter(|r| r.0).count(),
            overflow: results.iter().filter(|r| r.1).count(),
        }
    }
}

/// `[A, A] = 0` as an operator identity and `A(A(s)) = 0` on every state of the window.
pub fn nilpotency_checks(name: &str, anchor: &str, op: &FormalOperator, space: &StateSpace) -> Result<Vec<Check>, QuantError> {
    let sq = op.commutator(op)?;
    let w = space.apply_chain(&[op, op]);
    Ok(vec![
        op_zero(&format!("[{0},{0}] = 0", name), anchor, &sq),
        Check::new(
            format!("{0}({0}(s)) = 0 on window (len <= {1})", name, space.max_len),
            anchor,
            w.nonzero == 0,
            if w.nonzero == 0 {
                String::new()
            } else {
                format!("{} of {} states (overflow {})", w.nonzero, w.states, w.overflow)
            },
        ),
    ])
}

pub fn op_zero(name: &str, anchor: &str, op: &FormalOperator) -> Check {
    Check::new(name, anchor, op.is_zero(), if op.is_zero() { String::new() } else { op.to_string() })
}

/// Descent conditions: `[W, O] = 0` and `[W, W] = 0`; when the second fails and `ab` is
/// supplied, whether `[W, W] = A O + O B`.
pub fn check_descent(w: &FormalOperator, o: &FormalOperator, ab: Option<(&FormalOperator, &FormalOperator)>) -> Result<Vec<Check>, QuantError> {
    let c1 = w.commutator(o)?;
    let sq = w.commutator(w)?;
    let mut out = vec![op_zero("[W, O] = 0", "descent:commute", &c1), op_zero("[W, W] = 0", "descent:square", &sq)];
    if !sq.is_zero() {
        if let Some((a, b)) = ab {
            let rhs = a.compose(o)?.add(&o.compose(b)?);
            out.push(op_zero("[W, W] = A O + O B", "descent:square-mod-image", &sq.sub(&rhs)));
        }
    }
    Ok(out)
}

/// For `W' = W + [O, Z]` with `Z` even: given `[O,O] = 0`, `[W,O] = 0` and
/// `[W,W] = A O + O B`, checks `[W',O] = 0` and `[W',W'] = A' O + O B'` with
/// `A' = A + 2[Z,W] + [Z,[O,Z]]` and the same shift for `B`.
pub fn shift_check(w: &FormalOperator, z: &FormalOperator, o: &FormalOperator, a: &FormalOperator, b: &FormalOperator) -> Result<Vec<Check>, QuantError> {
    let two = QiH::from_rat(crate::galg::rint(2));
    let oz = o.commutator(z)?;
    let w2 = w.add(&oz);
    let shift = z.commutator(w)?.scale(&two).add(&z.commutator(&oz)?);
    let (a2, b2) = (a.add(&shift), b.add(&shift));
    let pre_sq = w.commutator(w)?.sub(&a.compose(o)?.add(&o.compose(b)?));
    let post_sq = w2.commutator(&w2)?.sub(&a2.compose(o)?.add(&o.compose(&b2)?));
    Ok(vec![
        op_zero("[O, O] = 0", "shift:hypothesis", &o.commutator(o)?),
        op_zero("[W, O] = 0", "shift:hypothesis", &w.commutator(o)?),
        op_zero("[W, W] = A O + O B", "shift:hypothesis", &pre_sq),
        op_zero("[W', O] = 0", "shift:commute", &w2.commutator(o)?),
        op_zero("[W', W'] = A' O + O B'", "shift:square", &post_sq),
    ])
}

/// Random even operator of degree 0 with `terms` entries `c hbar^k x^A (d/dx)^B`,
/// `len(A) <= 2`, `len(B) <= 1`, `c` a small nonzero integer, `k <= 1`.
pub fn random_degree_zero(pol: &Polarization, rng: &mut impl Rng, terms: usize) -> FormalOperator {
    let leaf = pol.leaf_algebra();
    let dual = pol.dual_algebra();
    let lm = monomial_basis(leaf, &(0..leaf.len()).collect::<Vec<_>>(), 2);
    let dm = monomial_basis(dual, &(0..dual.len()).collect::<Vec<_>>(), 1);
    let pairs: Vec<(Mono, Mono)> = lm
        .iter()
        .flat_map(|m| dm.iter().map(move |d| (m.clone(), d.clone())))
        .filter(|(m, d)| m.degree(leaf) + d.degree(dual) == 0 && !(m.word_len() == 0 && d.word_len() == 0))
        .collect();
    let picked = (0..terms).map(|_| {
        let key = pairs[rng.gen_range(0..pairs.len())].clone();
        let mut c = rng.gen_range(1..=3i64);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        (key, QiH::monomial(Gauss::new(rint(c), rint(0)), rng.gen_range(0..=1)))
    });
    FormalOperator::from_terms(pol, picked.collect::<Vec<_>>())
}

/// Quantum double layer of a constant-tensor system in the position polarisation:
/// nilpotency of the quantised double charge, descent of the quantised extension, and the
/// shift lemma for `samples` seeded random degree-0 `Z` with `A = B = 0`.
pub fn double_quantum_checks(d: &DoubleBfv, seed: u64, samples: usize) -> Result<Vec<Check>, QuantError> {
    let n = d.name();
    let pol = Polarization::positions(&d.jml.chart);
    let o = quantize_linear(&d.ss, &pol)?;
    let w = quantize_quadratic(&d.s_ext, &pol)?;
    let mut out = vec![op_zero(&format!("[Omega, Omega] = 0 [{}]", n), "quantum-double:nilpotency", &o.commutator(&o)?)];
    for mut c in check_descent(&w, &o, None)? {
        c.name = format!("{} [{}]", c.name, n);
        out.push(c);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = FormalOperator::zero(&pol);
    for k in 0..samples {
        let z = random_degree_zero(&pol, &mut rng, 3);
        for mut c in shift_check(&w, &z, &o, &zero, &zero)? {
            c.name = format!("{} [{}, Z#{}]", c.name, n, k);
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galg::parse_poly;

    fn chart() -> PhaseChart {
        let alg = Algebra::new(vec![
            Generator::new("q", 0),
            Generator::new("p", 0),
            Generator::new("c", 1),
            Generator::new("b", -1),
        ])
        .unwrap();
        PhaseChart::new(&alg, &[("q", "p"), ("c", "b")]).unwrap()
    }

    fn mih() -> QiH {
        QiH::minus_i_hbar()
    }

    #[test]
    fn canonical_examples() {
        let ch = chart();
        let pol = Polarization::new(&ch, &["q", "c"]).unwrap();
        let f: Poly = parse_poly(ch.algebra(), "q").unwrap();
        let qq = quantize_linear(&f, &pol).unwrap();
        let st = pol.state(&parse_poly::<Rat>(ch.algebra(), "q^2").unwrap()).unwrap();
        assert_eq!(qq.apply(&st), pol.state(&parse_poly::<Rat>(ch.algebra(), "q^3").unwrap()).unwrap());
        let p = quantize_linear(&parse_poly::<Rat>(ch.algebra(), "p").unwrap(), &pol).unwrap();
        assert_eq!(p, FormalOperator::derivative(&pol, 0, mih()));
        let p2 = quantize_quadratic(&parse_poly::<Rat>(ch.algebra(), "p^2").unwrap(), &pol).unwrap();
        assert_eq!(p2, FormalOperator::derivative(&pol, 0, mih()).compose(&FormalOperator::derivative(&pol, 0, QiH::one())).unwrap().scale(&mih()));
        assert_eq!(p2.to_string(), "-1*hbar^2 * (d/dq)^2");
        let qp = quantize_quadratic(&parse_poly::<Rat>(ch.algebra(), "q p").unwrap(), &pol).unwrap();
        assert_eq!(qp.to_string(), "-i*hbar * q d/dq");
        assert!(matches!(
            quantize_linear(&parse_poly::<Rat>(ch.algebra(), "p^2").unwrap(), &pol),
            Err(QuantError::FibreOrder { order: 2, .. })
        ));
    }

    #[test]
    fn commutator_examples() {
        let ch = chart();
        let pol = Polarization::new(&ch, &["q", "c"]).unwrap();
        let d = FormalOperator::derivative(&pol, 0, QiH::one());
        let q = FormalOperator::multiplication(&pol, &pol.state(&parse_poly::<Rat>(ch.algebra(), "q").unwrap()).unwrap()).unwrap();
        assert_eq!(d.commutator(&q).unwrap(), FormalOperator::identity(&pol));
        let c = FormalOperator::multiplication(&pol, &pol.state(&parse_poly::<Rat>(ch.algebra(), "c").unwrap()).unwrap()).unwrap();
        assert!(c.commutator(&c).unwrap().is_zero());
        let dc = FormalOperator::derivative(&pol, 1, QiH::one());
        assert_eq!(dc.commutator(&c).unwrap(), FormalOperator::identity(&pol));
    }

    #[test]
    fn lie_morphism_on_linear_functions() {
        let ch = chart();
        let alg = ch.algebra();
        let pol = Polarization::new(&ch, &["q", "c"]).unwrap();
        let fs = ["q^2 p", "c b", "q c b + p", "c p", "q^3 b", "c q^2", "b"];
        let ih = QiH::imag_unit().unwrap().mul(&QiH::hbar().unwrap());
        for a in fs {
            for b in fs {
                let (f, g): (Poly, Poly) = (parse_poly(alg, a).unwrap(), parse_poly(alg, b).unwrap());
                let lhs = quantize_linear(&f, &pol).unwrap().commutator(&quantize_linear(&g, &pol).unwrap()).unwrap();
                let rhs = quantize_linear(&poisson(&f, &g, &ch), &pol).unwrap().scale(&ih);
                assert_eq!(lhs, rhs, "[q({}), q({})]", a, b);
            }
        }
    }

    #[test]
    fn other_polarization() {
        let ch = chart();
        let pol = Polarization::new(&ch, &["p", "b"]).unwrap();
        let alg = ch.algebra();
        let ih = QiH::imag_unit().unwrap().mul(&QiH::hbar().unwrap());
        let (f, g): (Poly, Poly) = (parse_poly(alg, "q p^2 + c b").unwrap(), parse_poly(alg, "c p").unwrap());
        let lhs = quantize_linear(&f, &pol).unwrap().commutator(&quantize_linear(&g, &pol).unwrap()).unwrap();
        assert_eq!(lhs, quantize_linear(&poisson(&f, &g, &ch), &pol).unwrap().scale(&ih));
        assert!(matches!(Polarization::new(&ch, &["q", "p", "c"]), Err(QuantError::NotLagrangian(..))));
    }

    #[test]
    fn normal_form_sound_on_states() {
        let ch = chart();
        let alg = ch.algebra();
        let pol = Polarization::new(&ch, &["q", "c"]).unwrap();
        let a = quantize_quadratic(&parse_poly::<Rat>(alg, "q p^2 + c b p + q^2 b").unwrap(), &pol).unwrap();
        let b = quantize_quadratic(&parse_poly::<Rat>(alg, "c p + q^2 p b + 3").unwrap(), &pol).unwrap();
        let ab = a.compose(&b).unwrap();
        let space = StateSpace::new(&pol, 4);
        for k in 0..space.dim() {
            let s = space.state(k);
            assert_eq!(ab.apply(&s), a.apply(&b.apply(&s)));
        }
    }

    #[test]
    fn descent_and_shift_trivial() {
        let ch = chart();
        let pol = Polarization::new(&ch, &["q", "c"]).unwrap();
        let o = quantize_linear(&parse_poly::<Rat>(ch.algebra(), "c p").unwrap(), &pol).unwrap();
        let zero = FormalOperator::zero(&pol);
        assert!(check_descent(&zero, &o, None).unwrap().iter().all(|c| c.pass));
        let w = quantize_linear(&parse_poly::<Rat>(ch.algebra(), "c q").unwrap(), &pol).unwrap();
        assert!(shift_check(&w, &zero, &o, &zero, &zero).unwrap().iter().all(|c| c.pass));
        let z = quantize_linear(&parse_poly::<Rat>(ch.algebra(), "q^2 + c b").unwrap(), &pol).unwrap();
        for c in shift_check(&w, &z, &o, &zero, &zero).unwrap() {
            assert!(c.pass, "{}", c);
        }
        let _ = rint(0);
    }

    #[test]
    fn se2_random_shift() {
        let d = DoubleBfv::from_system(&crate::bfv::se2_nested()).unwrap();
        let cs = double_quantum_checks(&d, 7, 5).unwrap();
        for c in &cs {
            assert!(c.pass, "{}", c);
        }
        assert_eq!(cs.len(), 3 + 5 * 5);
    }
}
