//! Constraint systems with constant structure tensors, their structure identities, the
//! single-layer BFV charge, and truncated degree-0 cohomology with an independent oracle.

use crate::check::Check;
use crate::galg::{monomial_basis, rat, rint, Algebra, Coeff, GalgError, Generator, Mono, Poly, Rat};
use crate::linalg::{rank, SparseVec};
use crate::phase::{check_cme, check_nilpotent, ham_vf, poisson, PhaseChart, PhaseError, VectorField};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BfvError {
    #[error(transparent)]
    Galg(#[from] GalgError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("tensor `{tensor}` has shape {found:?}, expected {expected:?}")]
    Shape { tensor: String, expected: [usize; 3], found: [usize; 3] },
    #[error("tensor `{0}` has non-constant entries")]
    NonConstant(String),
    #[error("base chart generator `{0}` must have degree 0")]
    BaseDegree(String),
    #[error("master equation fails: {0}")]
    Cme(String),
    #[error("vector field is not nilpotent on `{0}`")]
    NotNilpotent(String),
    #[error("word-length window not closed: Q lowers word length on `{0}`")]
    WindowNotClosed(String),
    #[error("unknown registry key `{0}`")]
    UnknownExample(String),
}

/// Dense three-index tensor `t[i][j][k]` read as `t_ij^k`, entries are polynomials on the
/// base chart (constants in every registered example).
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    pub dims: [usize; 3],
    data: Vec<Poly<Rat>>,
}

impl Tensor3 {
    pub fn zeros(alg: &Arc<Algebra>, dims: [usize; 3]) -> Self {
        Tensor3 { dims, data: vec![Poly::zero(alg); dims[0] * dims[1] * dims[2]] }
    }
    pub fn from_entries(alg: &Arc<Algebra>, dims: [usize; 3], entries: &[([usize; 3], Rat)]) -> Self {
        let mut t = Tensor3::zeros(alg, dims);
        for (ix, v) in entries {
            t.set(*ix, Poly::from_rat(alg, v.clone()));
        }
        t
    }
    fn off(&self, [i, j, k]: [usize; 3]) -> usize {
        assert!(i < self.dims[0] && j < self.dims[1] && k < self.dims[2], "tensor index out of range");
        (i * self.dims[1] + j) * self.dims[2] + k
    }
    pub fn get(&self, ix: [usize; 3]) -> &Poly<Rat> {
        &self.data[self.off(ix)]
    }
    pub fn set(&mut self, ix: [usize; 3], v: Poly<Rat>) {
        let o = self.off(ix);
        self.data[o] = v;
    }
    pub fn is_constant(&self) -> bool {
        self.data.iter().all(|p| p.terms().all(|(m, _)| m.factors().is_empty()))
    }
    /// Constant value of an entry (caller has checked constancy).
    pub fn c(&self, ix: [usize; 3]) -> Rat {
        self.get(ix).constant_term()
    }
    pub fn indices(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let [a, b, c] = self.dims;
        (0..a).flat_map(move |i| (0..b).flat_map(move |j| (0..c).map(move |k| [i, j, k])))
    }
    /// Nonzero entries as `((i,j,k), value)`.
    pub fn nonzero(&self) -> Vec<([usize; 3], Poly<Rat>)> {
        self.indices().filter(|&ix| !self.get(ix).is_zero()).map(|ix| (ix, self.get(ix).clone())).collect()
    }
}

/// Nested constraint data: `phi` (first block) and `psi` (second block) on a degree-0 chart
/// with structure tensors `f` (l1,l1,l1), `h` (l2,l2,l2), `g` (l1,l2,l2), `m` (l1,l2,l1).
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub name: String,
    pub chart: PhaseChart,
    pub phi: Vec<Poly<Rat>>,
    pub psi: Vec<Poly<Rat>>,
    pub f: Tensor3,
    pub h: Tensor3,
    pub g: Tensor3,
    pub m: Tensor3,
}

impl ConstraintSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        chart: PhaseChart,
        phi: Vec<Poly<Rat>>,
        psi: Vec<Poly<Rat>>,
        f: Tensor3,
        h: Tensor3,
        g: Tensor3,
        m: Tensor3,
    ) -> Result<Self, BfvError> {
        for gen in chart.algebra().gens() {
            if gen.degree != 0 {
                return Err(BfvError::BaseDegree(gen.id.clone()));
            }
        }
        let (l1, l2) = (phi.len(), psi.len());
        for (tname, t, exp) in
            [("f", &f, [l1, l1, l1]), ("h", &h, [l2, l2, l2]), ("g", &g, [l1, l2, l2]), ("m", &m, [l1, l2, l1])]
        {
            if t.dims != exp {
                return Err(BfvError::Shape { tensor: tname.into(), expected: exp, found: t.dims });
            }
        }
        Ok(ConstraintSystem { name: name.into(), chart, phi, psi, f, h, g, m })
    }
    pub fn l1(&self) -> usize {
        self.phi.len()
    }
    pub fn l2(&self) -> usize {
        self.psi.len()
    }
    pub fn is_constant(&self) -> bool {
        [&self.f, &self.h, &self.g, &self.m].iter().all(|t| t.is_constant())
    }
    fn require_constant(&self) -> Result<(), BfvError> {
        for (n, t) in [("f", &self.f), ("h", &self.h), ("g", &self.g), ("m", &self.m)] {
            if !t.is_constant() {
                return Err(BfvError::NonConstant(n.into()));
            }
        }
        Ok(())
    }
}

fn combo(terms: &[(&Poly<Rat>, &Poly<Rat>)], alg: &Arc<Algebra>) -> Poly<Rat> {
    let mut out = Poly::zero(alg);
    for (a, b) in terms {
        out.add_assign_poly(&(*a * *b));
    }
    out
}

/// Structure equations `{phi_i,phi_j} = f_ij^k phi_k`, `{psi_i,psi_j} = h_ij^k psi_k`,
/// `{phi_i,psi_j} = m_ij^k phi_k + g_ij^k psi_k`. Accepts non-constant tensors.
pub fn check_structure_equations(c: &ConstraintSystem) -> Vec<Check> {
    let alg = c.chart.algebra();
    let (l1, l2) = (c.l1(), c.l2());
    let mut pp = Vec::new();
    for i in 0..l1 {
        for j in 0..l1 {
            let lhs = poisson(&c.phi[i], &c.phi[j], &c.chart);
            let rhs = combo(&(0..l1).map(|k| (c.f.get([i, j, k]), &c.phi[k])).collect::<Vec<_>>(), alg);
            pp.push((format!("{{phi{},phi{}}}", i + 1, j + 1), &lhs - &rhs));
        }
    }
    let mut ss = Vec::new();
    for i in 0..l2 {
        for j in 0..l2 {
            let lhs = poisson(&c.psi[i], &c.psi[j], &c.chart);
            let rhs = combo(&(0..l2).map(|k| (c.h.get([i, j, k]), &c.psi[k])).collect::<Vec<_>>(), alg);
            ss.push((format!("{{psi{},psi{}}}", i + 1, j + 1), &lhs - &rhs));
        }
    }
    let mut ps = Vec::new();
    for i in 0..l1 {
        for j in 0..l2 {
            let lhs = poisson(&c.phi[i], &c.psi[j], &c.chart);
            let mut rhs = combo(&(0..l1).map(|k| (c.m.get([i, j, k]), &c.phi[k])).collect::<Vec<_>>(), alg);
            rhs.add_assign_poly(&combo(&(0..l2).map(|k| (c.g.get([i, j, k]), &c.psi[k])).collect::<Vec<_>>(), alg));
            ps.push((format!("{{phi{},psi{}}}", i + 1, j + 1), &lhs - &rhs));
        }
    }
    vec![
        Check::all_zero("structure equation phi-phi", "structure-equations", &pp),
        Check::all_zero("structure equation psi-psi", "structure-equations", &ss),
        Check::all_zero("structure equation phi-psi", "structure-equations", &ps),
    ]
}

fn tensor_check(name: &str, anchor: &str, dims: &[usize], eval: impl Fn(&[usize]) -> Rat) -> Check {
    let mut bad = Vec::new();
    let mut ix = vec![0usize; dims.len()];
    if dims.iter().all(|&d| d > 0) {
        loop {
            let v = eval(&ix);
            if !v.is_zero() {
                bad.push(format!("{:?} = {}", ix, v));
            }
            let mut k = dims.len();
            loop {
                if k == 0 {
                    let pass = bad.is_empty();
                    return Check::new(name, anchor, pass, bad.join("; "));
                }
                k -= 1;
                ix[k] += 1;
                if ix[k] < dims[k] {
                    break;
                }
                ix[k] = 0;
            }
        }
    }
    Check::new(name, anchor, true, "")
}

/// Structure equations plus the constant-coefficient identities that the graded Jacobi
/// identity imposes on `f, h, g, m`.
pub fn validate_structure(c: &ConstraintSystem) -> Result<Vec<Check>, BfvError> {
    c.require_constant()?;
    let mut out = check_structure_equations(c);
    let (l1, l2) = (c.l1(), c.l2());
    let (f, h, g, m) = (&c.f, &c.h, &c.g, &c.m);
    let s = |it: &mut dyn Iterator<Item = Rat>| it.fold(rint(0), |a, b| a + b);
    out.push(tensor_check("f antisymmetric", "structure-antisymmetry", &[l1, l1, l1], |x| {
        f.c([x[0], x[1], x[2]]) + f.c([x[1], x[0], x[2]])
    }));
    out.push(tensor_check("h antisymmetric", "structure-antisymmetry", &[l2, l2, l2], |x| {
        h.c([x[0], x[1], x[2]]) + h.c([x[1], x[0], x[2]])
    }));
    // cyclic over (p,i,j) of f_ij^l f_pl^k
    out.push(tensor_check("f Jacobi", "structure-identity:f-cycle", &[l1, l1, l1, l1], |x| {
        let (p, i, j, k) = (x[0], x[1], x[2], x[3]);
        s(&mut (0..l1).map(|l| {
            f.c([i, j, l]) * f.c([p, l, k]) + f.c([j, p, l]) * f.c([i, l, k]) + f.c([p, i, l]) * f.c([j, l, k])
        }))
    }));
    out.push(tensor_check("h Jacobi", "structure-identity:h-cycle", &[l2, l2, l2, l2], |x| {
        let (p, i, j, k) = (x[0], x[1], x[2], x[3]);
        s(&mut (0..l2).map(|l| {
            h.c([i, j, l]) * h.c([p, l, k]) + h.c([j, p, l]) * h.c([i, l, k]) + h.c([p, i, l]) * h.c([j, l, k])
        }))
    }));
    // Jacobi on (phi_p, phi_i, psi_j), phi_k component
    out.push(tensor_check("f-m-g cycle (phi part)", "structure-identity:fm-cycle", &[l1, l1, l2, l1], |x| {
        let (p, i, j, k) = (x[0], x[1], x[2], x[3]);
        let a = s(&mut (0..l1).map(|l| m.c([i, j, l]) * f.c([p, l, k]) - m.c([p, j, l]) * f.c([i, l, k])
            - f.c([p, i, l]) * m.c([l, j, k])));
        let b = s(&mut (0..l2).map(|l| g.c([i, j, l]) * m.c([p, l, k]) - g.c([p, j, l]) * m.c([i, l, k])));
        a + b
    }));
    // Jacobi on (phi_p, phi_i, psi_j), psi_k component
    out.push(tensor_check("g-g-f cycle", "structure-identity:gf-cycle", &[l1, l1, l2, l2], |x| {
        let (p, i, j, k) = (x[0], x[1], x[2], x[3]);
        s(&mut (0..l2).map(|l| g.c([i, j, l]) * g.c([p, l, k]) - g.c([p, j, l]) * g.c([i, l, k])))
            - s(&mut (0..l1).map(|l| f.c([p, i, l]) * g.c([l, j, k])))
    }));
    // Jacobi on (phi_p, psi_i, psi_j), phi_k component
    out.push(tensor_check("m-m-h cycle", "structure-identity:mh-cycle", &[l1, l2, l2, l1], |x| {
        let (p, i, j, k) = (x[0], x[1], x[2], x[3]);
        s(&mut (0..l2).map(|l| h.c([i, j, l]) * m.c([p, l, k])))
            + s(&mut (0..l1).map(|l| m.c([p, j, l]) * m.c([l, i, k]) - m.c([p, i, l]) * m.c([l, j, k])))
    }));
    // Jacobi on (phi_p, psi_i, psi_j), psi_k component
    out.push(tensor_check("m-g-h cycle", "structure-identity:mgh-cycle", &[l1, l2, l2, l2], |x| {
        let (p, i, j, k) = (x[0], x[1], x[2], x[3]);
        s(&mut (0..l2).map(|l| {
            h.c([i, j, l]) * g.c([p, l, k]) - g.c([p, j, l]) * h.c([i, l, k]) + g.c([p, i, l]) * h.c([j, l, k])
        })) + s(&mut (0..l1).map(|l| m.c([p, j, l]) * g.c([l, i, k]) - m.c([p, i, l]) * g.c([l, j, k])))
    }));
    Ok(out)
}

/// Single-layer BFV data: base chart plus ghosts `chi`, `lam` (degree 1) and their
/// conjugates `chid`, `lamd` (degree -1), the charge `s` and `q = {s, -}`.
#[derive(Clone, Debug)]
pub struct BfvData {
    pub system: ConstraintSystem,
    pub chart: PhaseChart,
    pub chi: Vec<usize>,
    pub chid: Vec<usize>,
    pub lam: Vec<usize>,
    pub lamd: Vec<usize>,
    pub s: Poly<Rat>,
    pub q: VectorField<Rat>,
}

pub fn ghost_chart(base: &PhaseChart, l1: usize, l2: usize) -> Result<PhaseChart, PhaseError> {
    let mut more = Vec::new();
    for i in 1..=l1 {
        more.push((Generator::new(format!("chi{}", i), 1), Generator::new(format!("chid{}", i), -1)));
    }
    for j in 1..=l2 {
        more.push((Generator::new(format!("lam{}", j), 1), Generator::new(format!("lamd{}", j), -1)));
    }
    base.extend(&more)
}

/// Ghost-number-one charge
/// `chi^i phi_i + lam^a psi_a - 1/2 f_ij^k chi^i chi^j chid_k - 1/2 h_ab^c lam^a lam^b lamd_c
///  - g_ia^b chi^i lam^a lamd_b - m_ia^k chi^i lam^a chid_k`.
///
/// The cubic terms carry a minus sign because the frozen bracket has `{chi, chid} = 1`.
pub fn bfv_charge(c: &ConstraintSystem, chart: &PhaseChart, chi: &[usize], chid: &[usize], lam: &[usize], lamd: &[usize]) -> Result<Poly<Rat>, BfvError> {
    let alg = chart.algebra();
    let v = |i: usize| Poly::<Rat>::gen(alg, i);
    let k = |r: &Rat| Poly::<Rat>::from_rat(alg, r.clone());
    let mut s = Poly::zero(alg);
    for (i, p) in c.phi.iter().enumerate() {
        s.add_assign_poly(&(&v(chi[i]) * &p.lift(alg)?));
    }
    for (a, p) in c.psi.iter().enumerate() {
        s.add_assign_poly(&(&v(lam[a]) * &p.lift(alg)?));
    }
    let half = rat(-1, 2);
    for ([i, j, l], x) in c.f.nonzero() {
        let x = x.constant_term() * &half;
        s.add_assign_poly(&(&(&k(&x) * &v(chi[i])) * &(&v(chi[j]) * &v(chid[l]))));
    }
    for ([a, b, e], x) in c.h.nonzero() {
        let x = x.constant_term() * &half;
        s.add_assign_poly(&(&(&k(&x) * &v(lam[a])) * &(&v(lam[b]) * &v(lamd[e]))));
    }
    for ([i, a, b], x) in c.g.nonzero() {
        let x = -x.constant_term();
        s.add_assign_poly(&(&(&k(&x) * &v(chi[i])) * &(&v(lam[a]) * &v(lamd[b]))));
    }
    for ([i, a, l], x) in c.m.nonzero() {
        let x = -x.constant_term();
        s.add_assign_poly(&(&(&k(&x) * &v(chi[i])) * &(&v(lam[a]) * &v(chid[l]))));
    }
    Ok(s)
}

pub fn build_bfv(c: &ConstraintSystem) -> Result<BfvData, BfvError> {
    c.require_constant()?;
    let chart = ghost_chart(&c.chart, c.l1(), c.l2())?;
    let idx = |p: &str, n: usize| (1..=n).map(|i| chart.idx(&format!("{}{}", p, i))).collect::<Vec<_>>();
    let (chi, chid, lam, lamd) = (idx("chi", c.l1()), idx("chid", c.l1()), idx("lam", c.l2()), idx("lamd", c.l2()));
    let s = bfv_charge(c, &chart, &chi, &chid, &lam, &lamd)?;
    let cme = check_cme(&s, &chart);
    if !cme.holds() {
        return Err(BfvError::Cme(cme.residual.to_string()));
    }
    let q = ham_vf(&s, &chart);
    Ok(BfvData { system: c.clone(), chart, chi, chid, lam, lamd, s, q })
}

impl BfvData {
    pub fn l1(&self) -> usize {
        self.chi.len()
    }
    pub fn l2(&self) -> usize {
        self.lam.len()
    }
    pub fn daggers(&self) -> Vec<usize> {
        self.chid.iter().chain(self.lamd.iter()).copied().collect()
    }

    /// Charge checks: master equation, nilpotency of `Q`, and restriction to zero daggers.
    pub fn checks(&self) -> Vec<Check> {
        let alg = self.chart.algebra();
        let cme = check_cme(&self.s, &self.chart);
        let nil = check_nilpotent(&self.q);
        let nil_res: Vec<(String, Poly<Rat>)> =
            nil.into_iter().map(|(g, p)| (alg.generator(g).id.clone(), p)).collect();
        let mut expect = Poly::zero(alg);
        for (i, p) in self.system.phi.iter().enumerate() {
            expect.add_assign_poly(&(&Poly::gen(alg, self.chi[i]) * &p.lift(alg).expect("base lifts")));
        }
        for (a, p) in self.system.psi.iter().enumerate() {
            expect.add_assign_poly(&(&Poly::gen(alg, self.lam[a]) * &p.lift(alg).expect("base lifts")));
        }
        let restricted = self.s.kill(&self.daggers());
        vec![
            Check::zero(format!("{{S,S}} = 0 [{}]", self.system.name), "cme:single-layer", &cme.residual),
            Check::all_zero(format!("Q^2 = 0 [{}]", self.system.name), "nilpotency:single-layer", &nil_res),
            Check::zero(
                format!("S restricted to zero daggers [{}]", self.system.name),
                "charge:restriction",
                &(&restricted - &expect),
            ),
        ]
    }
}

/// Built-in examples: `abelian`, `se2_nested`, `so3`.
pub fn registry(key: &str) -> Result<ConstraintSystem, BfvError> {
    match key {
        "abelian" => Ok(abelian()),
        "se2_nested" => Ok(se2_nested()),
        "so3" => Ok(so3()),
        other => Err(BfvError::UnknownExample(other.to_string())),
    }
}

pub const REGISTRY_KEYS: [&str; 3] = ["abelian", "se2_nested", "so3"];

pub fn cotangent_chart(n: usize) -> PhaseChart {
    let mut gens = Vec::new();
    for i in 1..=n {
        gens.push(Generator::new(format!("q{}", i), 0));
    }
    for i in 1..=n {
        gens.push(Generator::new(format!("p{}", i), 0));
    }
    let alg = Algebra::new(gens).expect("distinct names");
    PhaseChart::from_indices(&alg, (0..n).map(|i| (i, n + i)).collect()).expect("valid chart")
}

fn parse(chart: &PhaseChart, s: &str) -> Poly<Rat> {
    crate::galg::parse_poly(chart.algebra(), s).expect("registry polynomial")
}

/// `phi = p1`, `psi = p2` on T*R^2, all tensors zero.
pub fn abelian() -> ConstraintSystem {
    let ch = cotangent_chart(2);
    let alg = ch.algebra().clone();
    ConstraintSystem::new(
        "abelian",
        ch.clone(),
        vec![parse(&ch, "p1")],
        vec![parse(&ch, "p2")],
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [1, 1, 1]),
    )
    .expect("valid shapes")
}

/// Rotations after translations on T*R^2: `phi = {J = q1 p2 - q2 p1}`, `psi = {p1, p2}`,
/// `{J, p_a} = eps_ab p_b`.
pub fn se2_nested() -> ConstraintSystem {
    let ch = cotangent_chart(2);
    let alg = ch.algebra().clone();
    let g = Tensor3::from_entries(&alg, [1, 2, 2], &[([0, 0, 1], rint(1)), ([0, 1, 0], rint(-1))]);
    ConstraintSystem::new(
        "se2_nested",
        ch.clone(),
        vec![parse(&ch, "q1 p2 - q2 p1")],
        vec![parse(&ch, "p1"), parse(&ch, "p2")],
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [2, 2, 2]),
        g,
        Tensor3::zeros(&alg, [1, 2, 1]),
    )
    .expect("valid shapes")
}

/// Levi-Civita symbol on three indices.
pub fn eps3(i: usize, j: usize, k: usize) -> i64 {
    if i == j || j == k || i == k {
        0
    } else if (i, j, k) == (0, 1, 2) || (i, j, k) == (1, 2, 0) || (i, j, k) == (2, 0, 1) {
        1
    } else {
        -1
    }
}

/// Angular momenta `L_i = eps_ijk q_j p_k` on T*R^3 with `f = eps`, no second block.
pub fn so3() -> ConstraintSystem {
    let ch = cotangent_chart(3);
    let alg = ch.algebra().clone();
    let l = |i: usize| {
        let mut p = Poly::zero(&alg);
        for j in 0..3 {
            for k in 0..3 {
                let e = eps3(i, j, k);
                if e != 0 {
                    let t = &Poly::gen(&alg, j) * &Poly::gen(&alg, 3 + k);
                    p.add_assign_poly(&t.scale_rat(&rint(e)));
                }
            }
        }
        p
    };
    let mut entries = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if eps3(i, j, k) != 0 {
                    entries.push(([i, j, k], rint(eps3(i, j, k))));
                }
            }
        }
    }
    ConstraintSystem::new(
        "so3",
        ch.clone(),
        vec![l(0), l(1), l(2)],
        vec![],
        Tensor3::from_entries(&alg, [3, 3, 3], &entries),
        Tensor3::zeros(&alg, [0, 0, 0]),
        Tensor3::zeros(&alg, [3, 0, 0]),
        Tensor3::zeros(&alg, [3, 0, 3]),
    )
    .expect("valid shapes")
}

/// Single-entry mutations of a system's tensors: each nonzero entry is flipped in sign and
/// each structural zero gets `+1`, capped at `limit` mutations.
pub fn tensor_mutations(c: &ConstraintSystem, limit: usize) -> Vec<(String, ConstraintSystem)> {
    let mut out = Vec::new();
    let alg = c.chart.algebra().clone();
    for tname in ["f", "h", "g", "m"] {
        let t = match tname {
            "f" => &c.f,
            "h" => &c.h,
            "g" => &c.g,
            _ => &c.m,
        };
        for ix in t.indices().collect::<Vec<_>>() {
            if out.len() >= limit {
                return out;
            }
            let old = t.get(ix).clone();
            let new = if old.is_zero() { Poly::one(&alg) } else { -&old };
            let mut d = c.clone();
            let slot = match tname {
                "f" => &mut d.f,
                "h" => &mut d.h,
                "g" => &mut d.g,
                _ => &mut d.m,
            };
            slot.set(ix, new);
            out.push((format!("{}{:?}", tname, ix), d));
        }
    }
    out
}

/// Result of a truncated cohomology computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H0Window {
    pub max_weight: u32,
    /// Weight of each generator, in algebra order.
    pub weights: Vec<u32>,
    pub dim: usize,
    pub cocycles: usize,
    pub coboundaries: usize,
    pub window_size: usize,
}

fn coords(p: &Poly<Rat>, index: &mut BTreeMap<Mono, usize>) -> SparseVec {
    let mut v = SparseVec::new();
    for (m, c) in p.terms() {
        let n = index.len();
        let k = *index.entry(m.clone()).or_insert(n);
        v.insert(k, c.clone());
    }
    v
}

/// Weighted word length preserved by `q`: degree-0 generators weigh 1, every other weight
/// is propagated from `w(x) = w(m)` for each monomial `m` of `q(x)`, and weights left free
/// default to 1. Fails when no non-negative integer solution exists or when the windows
/// of fixed ghost degree would be infinite (see `degree_shift`).
pub fn preserved_weights(q: &VectorField<Rat>) -> Result<Vec<u32>, BfvError> {
    let alg = q.algebra().clone();
    let n = alg.len();
    let mut w: Vec<Option<i64>> = (0..n).map(|i| (alg.degree(i) == 0).then_some(1)).collect();
    let eqs: Vec<(usize, Vec<(usize, i64)>)> = q
        .components
        .iter()
        .flat_map(|(&x, c)| {
            c.terms().map(move |(m, _)| (x, m.factors().iter().map(|&(g, e)| (g as usize, e as i64)).collect())).collect::<Vec<_>>()
        })
        .collect();
    let fail = |x: usize| BfvError::WindowNotClosed(alg.generator(x).id.clone());
    loop {
        let mut progress = false;
        for (x, m) in &eqs {
            // w(x) - sum e_g w(g) = 0
            let mut coeffs: BTreeMap<usize, i64> = BTreeMap::new();
            *coeffs.entry(*x).or_default() += 1;
            for &(g, e) in m {
                *coeffs.entry(g).or_default() -= e;
            }
            coeffs.retain(|_, c| *c != 0);
            let unknown: Vec<usize> = coeffs.keys().copied().filter(|&g| w[g].is_none()).collect();
            if unknown.len() == 1 {
                let u = unknown[0];
                let rest: i64 = coeffs.iter().filter(|(&g, _)| g != u).map(|(&g, &c)| c * w[g].unwrap()).sum();
                let cu = coeffs[&u];
                if rest % cu != 0 {
                    return Err(fail(*x));
                }
                w[u] = Some(-rest / cu);
                progress = true;
            }
        }
        if !progress {
            match w.iter().position(|v| v.is_none()) {
                Some(i) => w[i] = Some(1),
                None => break,
            }
        }
    }
    let w: Vec<i64> = w.into_iter().map(|v| v.unwrap()).collect();
    for (x, m) in &eqs {
        let wm: i64 = m.iter().map(|&(g, e)| e * w[g]).sum();
        if wm != w[*x] {
            return Err(fail(*x));
        }
    }
    if let Some(i) = w.iter().position(|&v| v < 0) {
        return Err(fail(i));
    }
    let w: Vec<u32> = w.into_iter().map(|v| v as u32).collect();
    if degree_shift(&alg, &w).is_none() {
        let i = (0..n).find(|&i| !alg.is_odd(i) && w[i] == 0).unwrap_or(0);
        return Err(fail(i));
    }
    Ok(w)
}

/// A shift `t = num/den` with `w + t * degree > 0` on every even generator. At fixed ghost
/// degree this bounds the exponents of a weight window, so the window is finite.
pub fn degree_shift(alg: &Algebra, weights: &[u32]) -> Option<(i64, i64)> {
    const CANDIDATES: [(i64, i64); 9] = [(0, 1), (1, 2), (-1, 2), (1, 3), (-1, 3), (2, 3), (-2, 3), (1, 4), (-1, 4)];
    CANDIDATES.into_iter().find(|&(num, den)| {
        (0..alg.len()).all(|i| alg.is_odd(i) || den * weights[i] as i64 + num * alg.degree(i) as i64 > 0)
    })
}

/// Monomials of the given ghost degree and weighted word length `<= d`.
pub fn weighted_basis(alg: &Algebra, weights: &[u32], degree: i32, d: u32) -> Vec<Mono> {
    let (num, den) = degree_shift(alg, weights).expect("weights admit a finite window");
    let shifted: Vec<i64> = (0..alg.len()).map(|i| den * weights[i] as i64 + num * alg.degree(i) as i64).collect();
    let n = shifted.len();
    // slack[i]: budget that odd generators at positions >= i can give back
    let mut slack = vec![0i64; n + 1];
    for i in (0..n).rev() {
        slack[i] = slack[i + 1] + if alg.is_odd(i) { (-shifted[i]).max(0) } else { 0 };
    }
    struct Ctx<'a> {
        alg: &'a Algebra,
        weights: &'a [u32],
        shifted: Vec<i64>,
        slack: Vec<i64>,
        d: u32,
        target: i32,
    }
    fn go(c: &Ctx, i: usize, left: i64, w: u32, deg: i32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Mono>) {
        if i == c.shifted.len() {
            if deg == c.target && w <= c.d && left >= 0 {
                out.push(Mono(cur.clone()));
            }
            return;
        }
        let max_e = if c.alg.is_odd(i) {
            1
        } else {
            let room = left + c.slack[i + 1];
            if room < 0 {
                return;
            }
            (room / c.shifted[i]) as u32
        };
        for e in 0..=max_e {
            let nw = w + e * c.weights[i];
            if nw > c.d {
                break;
            }
            if e > 0 {
                cur.push((i as u32, e));
            }
            go(c, i + 1, left - e as i64 * c.shifted[i], nw, deg + c.alg.degree(i) * e as i32, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    let ctx = Ctx { alg, weights, shifted, slack, d, target: degree };
    let mut out = Vec::new();
    go(&ctx, 0, den * d as i64 + num * degree as i64, 0, 0, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Dimension of degree-0 cohomology of `q` on polynomials of weighted word length `<= d`.
/// The weights are those preserved by `q`, so the window is a subcomplex and the result
/// is the exact cohomology in weights `<= d`. With all weights 1 this is plain word length.
pub fn h0_truncated(q: &VectorField<Rat>, d: u32) -> Result<H0Window, BfvError> {
    let alg = q.algebra().clone();
    let nil = check_nilpotent(q);
    if let Some((&g, _)) = nil.iter().next() {
        return Err(BfvError::NotNilpotent(alg.generator(g).id.clone()));
    }
    let weights = preserved_weights(q)?;
    let deg0 = weighted_basis(&alg, &weights, 0, d);
    let degm1 = weighted_basis(&alg, &weights, -1, d);
    let mono = |m: &Mono| Poly::<Rat>::from_terms(&alg, [(m.clone(), Rat::one())]);

    let mut index = BTreeMap::new();
    let z_cols: Vec<SparseVec> = deg0.iter().map(|m| coords(&q.apply(&mono(m)), &mut index)).collect();
    let cocycles = deg0.len() - rank(z_cols);
    let mut index = BTreeMap::new();
    let b_cols: Vec<SparseVec> = degm1.iter().map(|m| coords(&q.apply(&mono(m)), &mut index)).collect();
    let coboundaries = rank(b_cols);
    Ok(H0Window { max_weight: d, weights, dim: cocycles - coboundaries, cocycles, coboundaries, window_size: deg0.len() })
}

/// Independent path: polynomials on the base of word length `<= d`, modulo the truncated
/// ideal generated by the constraints, that are invariant under every constraint flow
/// modulo the ideal.
pub fn invariant_oracle(c: &ConstraintSystem, d: u32) -> usize {
    let alg = c.chart.algebra().clone();
    let all: Vec<usize> = (0..alg.len()).collect();
    let cons: Vec<&Poly<Rat>> = c.phi.iter().chain(c.psi.iter()).collect();
    let ideal_span = |dd: u32| -> Vec<Poly<Rat>> {
        let mut out = Vec::new();
        for k in &cons {
            let kl = k.max_word_len();
            if kl > dd {
                continue;
            }
            for m in monomial_basis(&alg, &all, dd - kl) {
                out.push(&Poly::from_terms(&alg, [(m, Rat::one())]) * *k);
            }
        }
        out
    };
    let basis = monomial_basis(&alg, &all, d);
    let n = basis.len();
    let ideal_d = ideal_span(d);
    let mut index = BTreeMap::new();
    let ideal_rank = rank(ideal_d.iter().map(|p| coords(p, &mut index)).collect::<Vec<_>>());

    // columns: basis images under every ad_k (stacked), then ideal spans per constraint block
    let mut index = BTreeMap::new();
    let mut cols: Vec<SparseVec> = vec![SparseVec::new(); n];
    let mut ideal_cols: Vec<SparseVec> = Vec::new();
    let mut ideal_deficit = 0usize;
    for (b, k) in cons.iter().enumerate() {
        let dd = (d + k.max_word_len()).saturating_sub(2);
        for (j, m) in basis.iter().enumerate() {
            let img = poisson(k, &Poly::from_terms(&alg, [(m.clone(), Rat::one())]), &c.chart);
            for (mm, cc) in img.terms() {
                let len = index.len();
                let key = *index.entry((b, mm.clone())).or_insert(len);
                cols[j].insert(key, cc.clone());
            }
        }
        let span = ideal_span(dd);
        let mut local = BTreeMap::new();
        let local_rank = rank(span.iter().map(|p| coords(p, &mut local)).collect::<Vec<_>>());
        ideal_deficit += span.len() - local_rank;
        for p in span {
            let mut v = SparseVec::new();
            for (mm, cc) in p.terms() {
                let len = index.len();
                let key = *index.entry((b, mm.clone())).or_insert(len);
                v.insert(key, cc.clone());
            }
            ideal_cols.push(v);
        }
    }
    let total_cols = n + ideal_cols.len();
    let mut all_cols = cols;
    all_cols.extend(ideal_cols);
    let nullity = total_cols - rank(all_cols);
    let invariant = nullity - ideal_deficit;
    invariant - ideal_rank
}

/// Convenience: single-layer Q of a registered system.
pub fn registry_bfv(key: &str) -> Result<BfvData, BfvError> {
    build_bfv(&registry(key)?)
}

/// Factor `k` in `[[x, y]]^c = k f_ab^c y^a x^b`. Fixed once for the frozen bracket;
/// `bracket_factor` re-derives it from `{L, L}` on any system with `f != 0`. Reading the
/// components right to left is what makes `{L, M} = M^[[rho, mu]]` hold alongside the
/// odd-odd relations.
pub const DOUBLE_BRACKET_FACTOR: i64 = 1;

/// Sign in `m(x, lam)^c = s m_ab^c x^a lam^b`, fixed by requiring `J = L - M^{[[rho,chi]] + m(rho,lam)}`
/// to be free of `chid`.
pub const M_ACTION_SIGN: i64 = 1;

/// BFV chart extended by formal parameters `rho` (degree 1) and `mu` (degree 2) with their
/// conjugates `rhod`, `mud`.
pub fn double_chart(b: &BfvData) -> Result<(PhaseChart, Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>), BfvError> {
    let l1 = b.l1();
    let mut more = Vec::new();
    for i in 1..=l1 {
        more.push((Generator::new(format!("rho{}", i), 1), Generator::new(format!("rhod{}", i), -1)));
    }
    for i in 1..=l1 {
        more.push((Generator::new(format!("mu{}", i), 2), Generator::new(format!("mud{}", i), -2)));
    }
    let chart = b.chart.extend(&more)?;
    let idx = |p: &str| (1..=l1).map(|i| chart.idx(&format!("{}{}", p, i))).collect::<Vec<_>>();
    let (rho, rhod, mu, mud) = (idx("rho"), idx("rhod"), idx("mu"), idx("mud"));
    Ok((chart, rho, rhod, mu, mud))
}

/// `M`, `L`, `J` on the double chart, with the formal parameters used to build them.
#[derive(Clone, Debug)]
pub struct Jml {
    pub chart: PhaseChart,
    pub bfv: BfvData,
    /// Single-layer charge and field lifted to the double chart.
    pub s: Poly<Rat>,
    pub q: VectorField<Rat>,
    pub chi: Vec<usize>,
    pub chid: Vec<usize>,
    pub lam: Vec<usize>,
    pub lamd: Vec<usize>,
    pub rho: Vec<usize>,
    pub rhod: Vec<usize>,
    pub mu: Vec<usize>,
    pub mud: Vec<usize>,
    pub kappa: Rat,
    pub m_sign: Rat,
}

impl Jml {
    pub fn new(b: &BfvData) -> Result<Jml, BfvError> {
        let (chart, rho, rhod, mu, mud) = double_chart(b)?;
        let alg = chart.algebra().clone();
        let s = b.s.lift(&alg)?;
        let q = ham_vf(&s, &chart);
        let idx = |v: &[usize]| v.iter().map(|&i| chart.idx(&alg_id(&b.chart, i))).collect::<Vec<_>>();
        Ok(Jml {
            chi: idx(&b.chi),
            chid: idx(&b.chid),
            lam: idx(&b.lam),
            lamd: idx(&b.lamd),
            chart,
            bfv: b.clone(),
            s,
            q,
            rho,
            rhod,
            mu,
            mud,
            kappa: rint(DOUBLE_BRACKET_FACTOR),
            m_sign: rint(M_ACTION_SIGN),
        })
    }
    pub fn alg(&self) -> &Arc<Algebra> {
        self.chart.algebra()
    }
    pub fn v(&self, i: usize) -> Poly<Rat> {
        Poly::gen(self.alg(), i)
    }
    pub fn vars(&self, ix: &[usize]) -> Vec<Poly<Rat>> {
        ix.iter().map(|&i| self.v(i)).collect()
    }
    pub fn l1(&self) -> usize {
        self.rho.len()
    }
    pub fn l2(&self) -> usize {
        self.lam.len()
    }
    /// `<x, y> = sum_k x^k y_k` with the first factor on the left.
    pub fn pair(&self, x: &[Poly<Rat>], y: &[Poly<Rat>]) -> Poly<Rat> {
        let mut out = Poly::zero(self.alg());
        for (a, b) in x.iter().zip(y) {
            out.add_assign_poly(&(a * b));
        }
        out
    }
    /// `[[x, y]]^c = kappa f_ab^c y^a x^b`.
    pub fn dbracket(&self, x: &[Poly<Rat>], y: &[Poly<Rat>]) -> Vec<Poly<Rat>> {
        let alg = self.alg();
        let mut out = vec![Poly::zero(alg); self.l1()];
        for ([a, b, c], val) in self.bfv.system.f.nonzero() {
            let k = val.constant_term() * &self.kappa;
            out[c].add_assign_poly(&(&y[a] * &x[b]).scale_rat(&k));
        }
        out
    }
    /// `m(x, l)^c = s m_ab^c x^a l^b` with `x` in the first block and `l` in the second.
    pub fn m_act(&self, x: &[Poly<Rat>], l: &[Poly<Rat>]) -> Vec<Poly<Rat>> {
        let alg = self.alg();
        let mut out = vec![Poly::zero(alg); self.l1()];
        for ([a, b, c], val) in self.bfv.system.m.nonzero() {
            let k = val.constant_term() * &self.m_sign;
            out[c].add_assign_poly(&(&x[a] * &l[b]).scale_rat(&k));
        }
        out
    }
    /// `M^x = <x, chid>`.
    pub fn m_of(&self, x: &[Poly<Rat>]) -> Poly<Rat> {
        self.pair(x, &self.vars(&self.chid))
    }
    /// `L^x = Q_C(M^x)`.
    pub fn l_of(&self, x: &[Poly<Rat>]) -> Poly<Rat> {
        self.q.apply(&self.m_of(x))
    }
    /// `J^x = L^x - M^{[[x, chi]] + m(x, lam)}`.
    pub fn j_of(&self, x: &[Poly<Rat>]) -> Poly<Rat> {
        let br = self.dbracket(x, &self.vars(&self.chi));
        let ma = self.m_act(x, &self.vars(&self.lam));
        let arg: Vec<Poly<Rat>> = br.iter().zip(&ma).map(|(a, b)| a + b).collect();
        &self.l_of(x) - &self.m_of(&arg)
    }
    pub fn rho_vec(&self) -> Vec<Poly<Rat>> {
        self.vars(&self.rho)
    }
    pub fn mu_vec(&self) -> Vec<Poly<Rat>> {
        self.vars(&self.mu)
    }

    /// The five bracket relations of the Poisson subalgebra spanned by `M`, `L`, `J`.
    pub fn bracket_suite(&self) -> Vec<Check> {
        let ch = &self.chart;
        let (rho, mu) = (self.rho_vec(), self.mu_vec());
        let (m, l, j) = (self.m_of(&mu), self.l_of(&rho), self.j_of(&rho));
        let rr = self.dbracket(&rho, &rho);
        let rm = self.dbracket(&rho, &mu);
        let name = &self.bfv.system.name;
        vec![
            Check::zero(format!("{{M,M}} = 0 [{}]", name), "jml:MM", &poisson(&m, &m, ch)),
            Check::zero(format!("{{L,L}} = L^[[rho,rho]] [{}]", name), "jml:LL", &(&poisson(&l, &l, ch) - &self.l_of(&rr))),
            Check::zero(format!("{{L,M}} = M^[[rho,mu]] [{}]", name), "jml:LM", &(&poisson(&l, &m, ch) - &self.m_of(&rm))),
            Check::zero(format!("{{J,J}} = J^[[rho,rho]] [{}]", name), "jml:JJ", &(&poisson(&j, &j, ch) - &self.j_of(&rr))),
            Check::zero(format!("{{J,M}} = 0 [{}]", name), "jml:JM", &poisson(&j, &m, ch)),
            Check::zero(
                format!("J free of chid [{}]", name),
                "jml:J-expression",
                &j.filter(|mo| self.chid.iter().any(|&c| mo.contains(c))),
            ),
        ]
    }
}

fn alg_id(chart: &PhaseChart, i: usize) -> String {
    chart.algebra().generator(i).id.clone()
}

/// Solves `{L, L} = k L^{f(rho, rho)}` for `k`; `None` when `f = 0` or no such `k` exists.
pub fn bracket_factor(b: &BfvData) -> Option<Rat> {
    let mut jml = Jml::new(b).ok()?;
    jml.kappa = rint(1);
    let rho = jml.rho_vec();
    let l = jml.l_of(&rho);
    let lhs = poisson(&l, &l, &jml.chart);
    let rhs = jml.l_of(&jml.dbracket(&rho, &rho));
    let (m, c) = rhs.terms().next()?;
    let k = lhs.coeff(m) / c;
    (&lhs - &rhs.scale_rat(&k)).is_zero().then_some(k)
}

/// `phi = p1`, `psi = q1 p1 + p2` on T*R^2: the only nonzero tensor is `m_11^1 = -1`.
pub fn m_coupled() -> ConstraintSystem {
    let ch = cotangent_chart(2);
    let alg = ch.algebra().clone();
    let m = Tensor3::from_entries(&alg, [1, 1, 1], &[([0, 0, 0], rint(-1))]);
    ConstraintSystem::new(
        "m_coupled",
        ch.clone(),
        vec![parse(&ch, "p1")],
        vec![parse(&ch, "q1 p1 + p2")],
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [1, 1, 1]),
        m,
    )
    .expect("valid shapes")
}

/// `phi = p1` on T*R with no second block.
pub fn abelian_line() -> ConstraintSystem {
    let ch = cotangent_chart(1);
    let alg = ch.algebra().clone();
    ConstraintSystem::new(
        "abelian_line",
        ch.clone(),
        vec![parse(&ch, "p1")],
        vec![],
        Tensor3::zeros(&alg, [1, 1, 1]),
        Tensor3::zeros(&alg, [0, 0, 0]),
        Tensor3::zeros(&alg, [1, 0, 0]),
        Tensor3::zeros(&alg, [1, 0, 1]),
    )
    .expect("valid shapes")
}

fn residual_system(name: &str, base: usize, psi: &[&str]) -> ConstraintSystem {
    let ch = cotangent_chart(base);
    let alg = ch.algebra().clone();
    let l2 = psi.len();
    ConstraintSystem::new(
        name,
        ch.clone(),
        vec![],
        psi.iter().map(|s| parse(&ch, s)).collect(),
        Tensor3::zeros(&alg, [0, 0, 0]),
        Tensor3::zeros(&alg, [l2, l2, l2]),
        Tensor3::zeros(&alg, [0, l2, l2]),
        Tensor3::zeros(&alg, [0, l2, 0]),
    )
    .expect("valid shapes")
}

/// Translations left over after reducing `se2_nested` by its first block.
pub fn se2_residual() -> ConstraintSystem {
    residual_system("se2_residual", 2, &["p1", "p2"])
}

/// Second block of `abelian` on its own.
pub fn abelian_residual() -> ConstraintSystem {
    residual_system("abelian_residual", 2, &["p2"])
}

/// Whether `p` is a `q`-coboundary plus a multiple of 1 inside the weight window `<= d`.
pub fn is_trivial_class(q: &VectorField<Rat>, p: &Poly<Rat>, d: u32) -> Result<bool, BfvError> {
    let alg = q.algebra().clone();
    let weights = preserved_weights(q)?;
    let deg = p.homogeneous_degree().unwrap_or(0);
    let mut index = BTreeMap::new();
    let mut cols: Vec<SparseVec> = weighted_basis(&alg, &weights, deg - 1, d)
        .iter()
        .map(|m| coords(&q.apply(&Poly::from_terms(&alg, [(m.clone(), Rat::one())])), &mut index))
        .collect();
    cols.push(coords(&Poly::one(&alg), &mut index));
    let r = rank(cols.clone());
    cols.push(coords(p, &mut index));
    Ok(rank(cols) == r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_structure_passes() {
        for key in REGISTRY_KEYS {
            let c = registry(key).unwrap();
            for chk in validate_structure(&c).unwrap() {
                assert!(chk.pass, "{}: {}", key, chk);
            }
        }
        for chk in validate_structure(&m_coupled()).unwrap() {
            assert!(chk.pass, "{}", chk);
        }
    }

    #[test]
    fn se2_flipped_g_fails() {
        let mut c = se2_nested();
        let alg = c.chart.algebra().clone();
        c.g.set([0, 0, 1], Poly::from_rat(&alg, rint(-1)));
        assert!(!validate_structure(&c).unwrap().iter().all(|k| k.pass));
    }

    #[test]
    fn shape_and_constancy_errors() {
        let c = se2_nested();
        let alg = c.chart.algebra().clone();
        let r = ConstraintSystem::new("x", c.chart.clone(), c.phi.clone(), c.psi.clone(), c.f.clone(), c.h.clone(), Tensor3::zeros(&alg, [1, 1, 1]), c.m.clone());
        assert!(matches!(r, Err(BfvError::Shape { .. })));
        let mut d = c.clone();
        d.f.set([0, 0, 0], Poly::var(&alg, "q1").unwrap());
        assert!(matches!(validate_structure(&d), Err(BfvError::NonConstant(_))));
        assert!(matches!(build_bfv(&d), Err(BfvError::NonConstant(_))));
    }

    #[test]
    fn charges_satisfy_cme() {
        for key in REGISTRY_KEYS {
            let b = registry_bfv(key).unwrap();
            for chk in b.checks() {
                assert!(chk.pass, "{}", chk);
            }
        }
        let b = build_bfv(&m_coupled()).unwrap();
        assert!(b.checks().iter().all(|c| c.pass));
    }

    #[test]
    fn charge_examples() {
        let b = registry_bfv("abelian").unwrap();
        let alg = b.chart.algebra();
        assert_eq!(b.s, crate::galg::parse_poly(alg, "chi1 p1 + lam1 p2").unwrap());
        let b = registry_bfv("se2_nested").unwrap();
        let alg = b.chart.algebra();
        let expect = crate::galg::parse_poly(alg, "chi1 (q1 p2 - q2 p1) + lam1 p1 + lam2 p2 - chi1 lam1 lamd2 + chi1 lam2 lamd1").unwrap();
        assert_eq!(b.s, expect);
    }

    #[test]
    fn broken_f_breaks_cme() {
        let mut c = so3();
        let alg = c.chart.algebra().clone();
        c.f.set([0, 1, 2], Poly::from_rat(&alg, rint(2)));
        assert!(matches!(build_bfv(&c), Err(BfvError::Cme(_))));
    }

    #[test]
    fn bracket_factor_from_so3() {
        let b = registry_bfv("so3").unwrap();
        assert_eq!(bracket_factor(&b), Some(rint(DOUBLE_BRACKET_FACTOR)));
    }

    #[test]
    fn jml_suite_all_systems() {
        for c in [abelian(), se2_nested(), so3(), m_coupled()] {
            let j = Jml::new(&build_bfv(&c).unwrap()).unwrap();
            for chk in j.bracket_suite() {
                assert!(chk.pass, "{}", chk);
            }
        }
    }

    #[test]
    fn se2_j_expression() {
        let j = Jml::new(&registry_bfv("se2_nested").unwrap()).unwrap();
        let alg = j.alg();
        let expect =
            crate::galg::parse_poly(alg, "-rho1 (q1 p2 - q2 p1) + rho1 lam1 lamd2 - rho1 lam2 lamd1").unwrap();
        assert_eq!(j.j_of(&j.rho_vec()), expect);
    }

    #[test]
    fn h0_matches_oracle() {
        for c in [abelian(), abelian_line()] {
            let key = c.name.clone();
            let b = build_bfv(&c).unwrap();
            for d in 2..=4 {
                let h = h0_truncated(&b.q, d).unwrap();
                let o = invariant_oracle(&c, d);
                assert_eq!(h.dim, o, "{} D={} {:?}", key, d, h);
            }
        }
    }

    #[test]
    fn h0_examples() {
        let b = build_bfv(&abelian_line()).unwrap();
        assert_eq!(h0_truncated(&b.q, 3).unwrap().dim, 1);
        assert_eq!(invariant_oracle(&abelian_line(), 3), 1);
        let alg = Algebra::new(vec![Generator::new("x", 0), Generator::new("y", 0)]).unwrap();
        let h = h0_truncated(&VectorField::new(&alg, 1), 3).unwrap();
        assert_eq!(h.dim, 10);
    }

    #[test]
    fn se2_nested_has_reducibility_class() {
        let b = registry_bfv("se2_nested").unwrap();
        let alg = b.chart.algebra();
        let z = crate::galg::parse_poly(alg, "chi1 chid1 + q2 chi1 lamd1 - q1 chi1 lamd2").unwrap();
        assert!(b.q.apply(&z).is_zero());
        assert!(!is_trivial_class(&b.q, &z, 4).unwrap());
        for d in 2..=4 {
            assert_eq!(h0_truncated(&b.q, d).unwrap().dim, 2);
            assert_eq!(invariant_oracle(&registry("se2_nested").unwrap(), d), 1);
        }
    }

    #[test]
    fn nonnilpotent_rejected() {
        let b = registry_bfv("so3").unwrap();
        let mut q = b.q.clone();
        let g = b.chi[0];
        q.set(g, &q.component(g) + &Poly::gen(b.chart.algebra(), b.chi[1]));
        assert!(matches!(h0_truncated(&q, 2), Err(BfvError::NotNilpotent(_))));
    }
}
