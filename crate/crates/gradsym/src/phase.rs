//! Graded Darboux charts, the graded Poisson bracket, Hamiltonian vector fields, and the
//! master-equation and nilpotency checkers.

use crate::galg::{same_algebra, Algebra, Coeff, GalgError, Generator, Poly};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

/// Sign table of the bracket, frozen here and used by every identity check:
///
/// `{f,g} = sum over pairs (q,p) of
///     (-1)^(|q|(|f|+1)) (d_q f)(d_p g) - (-1)^(|q||f|) (d_p f)(d_q g)`
///
/// with left derivatives `d`. It gives `{q,p} = 1` for every pair, graded antisymmetry
/// `{f,g} = -(-1)^(|f||g|) {g,f}`, and graded Jacobi.
pub const BRACKET_SIGN_TABLE: &str =
    "{f,g} = sum_(q,p) (-1)^(|q|(|f|+1)) d_q f d_p g - (-1)^(|q||f|) d_p f d_q g; {q,p} = 1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error("momentum `{mom}` must have degree {expected} (minus the degree of `{pos}`)")]
    PairDegree { pos: String, mom: String, expected: i32 },
    #[error("generator `{0}` appears in more than one pair")]
    Repeated(String),
    #[error("generator `{0}` is not paired")]
    Unpaired(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Position(usize),
    Momentum(usize),
}

/// Darboux chart: every generator of the algebra sits in exactly one (position, momentum) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseChart {
    alg: Arc<Algebra>,
    pairs: Vec<(usize, usize)>,
    roles: Vec<Role>,
}

impl PhaseChart {
    pub fn new(alg: &Arc<Algebra>, pairs: &[(&str, &str)]) -> Result<Self, PhaseError> {
        let idx: Vec<(usize, usize)> = pairs
            .iter()
            .map(|(q, p)| Ok((alg.index_of(q)?, alg.index_of(p)?)))
            .collect::<Result<_, GalgError>>()?;
        Self::from_indices(alg, idx)
    }

    pub fn from_indices(alg: &Arc<Algebra>, pairs: Vec<(usize, usize)>) -> Result<Self, PhaseError> {
        let mut roles: Vec<Option<Role>> = vec![None; alg.len()];
        for (k, &(q, p)) in pairs.iter().enumerate() {
            if alg.degree(p) != -alg.degree(q) {
                return Err(PhaseError::PairDegree {
                    pos: alg.generator(q).id.clone(),
                    mom: alg.generator(p).id.clone(),
                    expected: -alg.degree(q),
                });
            }
            for (g, r) in [(q, Role::Position(k)), (p, Role::Momentum(k))] {
                if roles[g].is_some() {
                    return Err(PhaseError::Repeated(alg.generator(g).id.clone()));
                }
                roles[g] = Some(r);
            }
        }
        let roles = roles
            .into_iter()
            .enumerate()
            .map(|(g, r)| r.ok_or_else(|| PhaseError::Unpaired(alg.generator(g).id.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PhaseChart { alg: alg.clone(), pairs, roles })
    }

    /// Chart on an enlarged algebra with extra (position, momentum) pairs appended.
    pub fn extend(&self, more: &[(Generator, Generator)]) -> Result<Self, PhaseError> {
        let mut gens = Vec::new();
        for (q, p) in more {
            gens.push(q.clone());
            gens.push(p.clone());
        }
        let alg = self.alg.extend(gens)?;
        let mut pairs = self.pairs.clone();
        let base = self.alg.len();
        for k in 0..more.len() {
            pairs.push((base + 2 * k, base + 2 * k + 1));
        }
        Self::from_indices(&alg, pairs)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
    pub fn role(&self, g: usize) -> Role {
        self.roles[g]
    }
    pub fn positions(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(q, _)| q).collect()
    }
    pub fn momenta(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(_, p)| p).collect()
    }
    /// Conjugate generator of `g`.
    pub fn partner(&self, g: usize) -> usize {
        match self.roles[g] {
            Role::Position(k) => self.pairs[k].1,
            Role::Momentum(k) => self.pairs[k].0,
        }
    }
    pub fn var<C: Coeff>(&self, id: &str) -> Poly<C> {
        Poly::var(&self.alg, id).unwrap_or_else(|e| panic!("{}", e))
    }
    pub fn idx(&self, id: &str) -> usize {
        self.alg.index_of(id).unwrap_or_else(|e| panic!("{}", e))
    }
}

fn split_parity<C: Coeff>(f: &Poly<C>) -> [Poly<C>; 2] {
    let alg = f.algebra();
    [f.filter(|m| !m.is_odd(alg)), f.filter(|m| m.is_odd(alg))]
}

/// Graded Poisson bracket of the chart (see [`BRACKET_SIGN_TABLE`]).
pub fn poisson<C: Coeff>(f: &Poly<C>, g: &Poly<C>, chart: &PhaseChart) -> Poly<C> {
    assert!(same_algebra(f.algebra(), chart.algebra()), "bracket argument outside the chart");
    assert!(same_algebra(g.algebra(), chart.algebra()), "bracket argument outside the chart");
    let alg = chart.algebra();
    let mut out = Poly::zero(alg);
    if f.is_zero() || g.is_zero() {
        return out;
    }
    let fparts = split_parity(f);
    for &(q, p) in chart.pairs() {
        let gq = g.partial_left(q);
        let gp = g.partial_left(p);
        if gq.is_zero() && gp.is_zero() {
            continue;
        }
        let qodd = alg.is_odd(q);
        for (par, fpart) in fparts.iter().enumerate() {
            if fpart.is_zero() {
                continue;
            }
            let fodd = par == 1;
            if !gp.is_zero() {
                let fq = fpart.partial_left(q);
                if !fq.is_zero() {
                    let t = &fq * &gp;
                    // (-1)^(|q|(|f|+1))
                    if qodd && !fodd {
                        out = &out - &t;
                    } else {
                        out.add_assign_poly(&t);
                    }
                }
            }
            if !gq.is_zero() {
                let fp = fpart.partial_left(p);
                if !fp.is_zero() {
                    let t = &fp * &gq;
                    // -(-1)^(|q||f|)
                    if qodd && fodd {
                        out.add_assign_poly(&t);
                    } else {
                        out = &out - &t;
                    }
                }
            }
        }
    }
    out
}

/// Derivation of fixed degree, written as sum over generators of `component * d_gen`
/// with components on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<C: Coeff> {
    alg: Arc<Algebra>,
    pub degree: i32,
    pub components: BTreeMap<usize, Poly<C>>,
}

impl<C: Coeff> VectorField<C> {
    pub fn new(alg: &Arc<Algebra>, degree: i32) -> Self {
        VectorField { alg: alg.clone(), degree, components: BTreeMap::new() }
    }
    pub fn set(&mut self, g: usize, c: Poly<C>) {
        if c.is_zero() {
            self.components.remove(&g);
        } else {
            self.components.insert(g, c);
        }
    }
    pub fn component(&self, g: usize) -> Poly<C> {
        self.components.get(&g).cloned().unwrap_or_else(|| Poly::zero(&self.alg))
    }
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }
    pub fn apply(&self, f: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero(&self.alg);
        for (&g, c) in &self.components {
            let d = f.partial_left(g);
            if !d.is_zero() {
                out.add_assign_poly(&(c * &d));
            }
        }
        out
    }
}

/// Hamiltonian vector field `X_H = {H, -}`.
pub fn ham_vf<C: Coeff>(h: &Poly<C>, chart: &PhaseChart) -> VectorField<C> {
    let alg = chart.algebra();
    let deg = h.homogeneous_degree().unwrap_or(0);
    let mut v = VectorField::new(alg, deg);
    for g in 0..alg.len() {
        v.set(g, poisson(h, &Poly::gen(alg, g), chart));
    }
    v
}

#[derive(Clone, Debug)]
pub struct CmeReport<C: Coeff> {
    pub residual: Poly<C>,
    pub warning: Option<String>,
}

impl<C: Coeff> CmeReport<C> {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `{S,S}`; a charge that is not homogeneous of degree 1 is flagged but still evaluated.
pub fn check_cme<C: Coeff>(s: &Poly<C>, chart: &PhaseChart) -> CmeReport<C> {
    let warning = match s.homogeneous_degree() {
        Some(1) => None,
        Some(d) => Some(format!("charge has degree {}, expected 1", d)),
        None if s.is_zero() => None,
        None => Some("charge is not homogeneous".to_string()),
    };
    CmeReport { residual: poisson(s, s, chart), warning }
}

/// `Q(Q(x))` for every generator `x`; only nonzero residuals are returned.
pub fn check_nilpotent<C: Coeff>(q: &VectorField<C>) -> BTreeMap<usize, Poly<C>> {
    let mut out = BTreeMap::new();
    for g in 0..q.algebra().len() {
        let r = q.apply(&q.component(g));
        if !r.is_zero() {
            out.insert(g, r);
        }
    }
    out
}
