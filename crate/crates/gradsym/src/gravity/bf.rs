//! BF theory on a finite surface model: form- and so(2,1)-valued fields are flattened to
//! scalar graded generators of a Darboux chart, and every functional is an exact polynomial.

use super::dga::{DgaModel, SurfaceSpec};
use super::so21::{structure, ETA};
use super::GravityError;
use crate::galg::{rat, rint, Algebra, Coeff, Generator, Poly, Rat};
use crate::linalg::inverse;
use crate::check::Check;
use crate::phase::{check_nilpotent, ham_vf, poisson, PhaseChart, VectorField};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BfField {
    B,
    A,
    Chi,
    Ad,
    Tau,
    Bd,
    Rho,
    Rhod,
    Mu,
    Mud,
}

impl BfField {
    pub const LEAVES: [BfField; 5] = [BfField::B, BfField::Chi, BfField::Tau, BfField::Rho, BfField::Mu];

    pub fn name(self) -> &'static str {
        match self {
            BfField::B => "B",
            BfField::A => "A",
            BfField::Chi => "chi",
            BfField::Ad => "Ad",
            BfField::Tau => "tau",
            BfField::Bd => "Bd",
            BfField::Rho => "rho",
            BfField::Rhod => "rhod",
            BfField::Mu => "mu",
            BfField::Mud => "mud",
        }
    }
    pub fn form_degree(self) -> u8 {
        match self {
            BfField::B | BfField::A => 1,
            BfField::Chi | BfField::Tau | BfField::Rho | BfField::Mu => 0,
            _ => 2,
        }
    }
    pub fn ghost(self) -> i32 {
        match self {
            BfField::B | BfField::A => 0,
            BfField::Chi | BfField::Tau | BfField::Rho => 1,
            BfField::Ad | BfField::Bd | BfField::Rhod => -1,
            BfField::Mu => 2,
            BfField::Mud => -2,
        }
    }
    pub fn conj(self) -> BfField {
        match self {
            BfField::B => BfField::A,
            BfField::A => BfField::B,
            BfField::Chi => BfField::Ad,
            BfField::Ad => BfField::Chi,
            BfField::Tau => BfField::Bd,
            BfField::Bd => BfField::Tau,
            BfField::Rho => BfField::Rhod,
            BfField::Rhod => BfField::Rho,
            BfField::Mu => BfField::Mud,
            BfField::Mud => BfField::Mu,
        }
    }
    pub fn is_leaf(self) -> bool {
        BfField::LEAVES.contains(&self)
    }
    fn is_double(self) -> bool {
        matches!(self, BfField::Rho | BfField::Rhod | BfField::Mu | BfField::Mud)
    }
}

/// Differential form with polynomial coefficients: `sum_a p_a e_a`, coefficient first.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub terms: BTreeMap<usize, Poly>,
}

/// so(2,1)-valued form, stored by vector component.
#[derive(Clone, Debug, PartialEq)]
pub struct Field(pub [Form; 3]);

impl Form {
    pub fn zero() -> Self {
        Form { terms: BTreeMap::new() }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_at(&mut self, a: usize, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&a) {
            Some(q) => {
                q.add_assign_poly(&p);
                if q.is_zero() {
                    self.terms.remove(&a);
                }
            }
            None => {
                self.terms.insert(a, p);
            }
        }
    }
}

impl Field {
    pub fn zero() -> Self {
        Field([Form::zero(), Form::zero(), Form::zero()])
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Form::is_zero)
    }
}

/// Form calculus over a surface model with coefficients in a fixed algebra. The
/// coefficient of `e_a` passing a coefficient `q` picks up `(-1)^(|e_a| |q|)`.
#[derive(Clone, Copy)]
pub struct Calc<'a> {
    pub dga: &'a DgaModel,
    pub alg: &'a Arc<Algebra>,
}

impl<'a> Calc<'a> {
    pub fn form_add(&self, x: &Form, y: &Form) -> Form {
        let mut out = x.clone();
        for (a, p) in &y.terms {
            out.add_at(*a, p.clone());
        }
        out
    }
    pub fn form_scale(&self, x: &Form, c: &Rat) -> Form {
        let mut out = Form::zero();
        for (a, p) in &x.terms {
            out.add_at(*a, p.scale_rat(c));
        }
        out
    }
    pub fn form_mul(&self, x: &Form, y: &Form) -> Form {
        let mut out = Form::zero();
        for (a, p) in &x.terms {
            for (b, q) in &y.terms {
                let prod = &self.dga.mult[*a][*b];
                if prod.is_empty() {
                    continue;
                }
                let pq = p * &q.parity_twist(self.dga.degree(*a) as i32);
                for (c, k) in prod {
                    out.add_at(*c, pq.scale_rat(k));
                }
            }
        }
        out
    }
    pub fn form_d(&self, x: &Form) -> Form {
        let mut out = Form::zero();
        for (a, p) in &x.terms {
            let tp = p.parity_twist(1);
            for (c, k) in &self.dga.d[*a] {
                out.add_at(*c, tp.scale_rat(k));
            }
        }
        out
    }
    pub fn integrate(&self, x: &Form) -> Poly {
        let mut out = Poly::zero(self.alg);
        for (a, p) in &x.terms {
            let w = &self.dga.integral[*a];
            if !Coeff::is_zero(w) {
                out.add_assign_poly(&p.scale_rat(w));
            }
        }
        out
    }

    pub fn add(&self, x: &Field, y: &Field) -> Field {
        Field([0, 1, 2].map(|k| self.form_add(&x.0[k], &y.0[k])))
    }
    pub fn sub(&self, x: &Field, y: &Field) -> Field {
        self.add(x, &self.scale(y, &rint(-1)))
    }
    pub fn scale(&self, x: &Field, c: &Rat) -> Field {
        Field([0, 1, 2].map(|k| self.form_scale(&x.0[k], c)))
    }
    pub fn bracket(&self, x: &Field, y: &Field) -> Field {
        let mut out = Field::zero();
        for i in 0..3 {
            for j in 0..3 {
                let prod = self.form_mul(&x.0[i], &y.0[j]);
                if prod.is_zero() {
                    continue;
                }
                for k in 0..3 {
                    let c = structure(i, j, k);
                    if c != 0 {
                        out.0[k] = self.form_add(&out.0[k], &self.form_scale(&prod, &rint(c)));
                    }
                }
            }
        }
        out
    }
    pub fn pair(&self, x: &Field, y: &Field) -> Form {
        let mut out = Form::zero();
        for i in 0..3 {
            out = self.form_add(&out, &self.form_scale(&self.form_mul(&x.0[i], &y.0[i]), &rint(ETA[i])));
        }
        out
    }
    pub fn d(&self, x: &Field) -> Field {
        Field([0, 1, 2].map(|k| self.form_d(&x.0[k])))
    }
    /// `d_A X = dX + [A, X]`.
    pub fn cov_d(&self, a: &Field, x: &Field) -> Field {
        self.add(&self.d(x), &self.bracket(a, x))
    }
    /// `F_A = dA + 1/2 [A, A]`.
    pub fn curvature(&self, a: &Field) -> Field {
        self.add(&self.d(a), &self.scale(&self.bracket(a, a), &rat(1, 2)))
    }
    pub fn int_pair(&self, x: &Field, y: &Field) -> Poly {
        self.integrate(&self.pair(x, y))
    }
    /// Coefficient-wise image under a linear map, e.g. a vector field.
    pub fn map(&self, x: &Field, f: impl Fn(&Poly) -> Poly) -> Field {
        let mut out = Field::zero();
        for k in 0..3 {
            for (a, p) in &x.0[k].terms {
                out.0[k].add_at(*a, f(p));
            }
        }
        out
    }
    /// Every nonzero coefficient, labelled by component and basis element.
    pub fn residuals(&self, x: &Field) -> Vec<(String, Poly)> {
        let mut out = Vec::new();
        for k in 0..3 {
            for (a, p) in &x.0[k].terms {
                out.push((format!("{}^{}", self.dga.basis[*a].name, k), p.clone()));
            }
        }
        out
    }
}

/// Sign `s` in `Y = s * (dual coordinates)` for the conjugate `Y` of each leaf field,
/// chosen so that the flattened bracket reproduces the field-theoretic one.
pub const PAIR_SIGNS: [(BfField, i64); 5] =
    [(BfField::B, -1), (BfField::Chi, 1), (BfField::Tau, 1), (BfField::Rho, 1), (BfField::Mu, 1)];

/// Signs of `int [chi, mu] mud`, `int mu rhod`, `int [chi, rho] rhod` in the extension of `S_BF`.
pub const EXT_SIGNS: [i64; 3] = [-1, -1, 1];
/// Signs of `int chi rhod` and `1/2 int [chi, chi] mud` in the gauge parameter.
pub const Y_SIGNS: [i64; 2] = [1, -1];
/// `{J^rho, J^rho} = JJ_FACTOR * J^{[rho, rho]}` in the flattened conventions.
pub const JJ_FACTOR: (i64, i64) = (-1, 1);

/// The BFV data of BF theory on a surface model, optionally with the Gauss-constraint
/// layer `rho, mu` and their conjugates adjoined.
#[derive(Clone, Debug)]
pub struct BfTheory {
    pub surface: SurfaceSpec,
    pub chart: PhaseChart,
    pub double: bool,
    fields: BTreeMap<BfField, Field>,
    leaf_gens: BTreeMap<BfField, Vec<usize>>,
    signs: BTreeMap<BfField, i64>,
}

impl BfTheory {
    pub fn build(surface: &SurfaceSpec, double: bool) -> Result<Self, GravityError> {
        BfTheory::with_signs(surface, double, &PAIR_SIGNS)
    }

    pub fn with_signs(surface: &SurfaceSpec, double: bool, signs: &[(BfField, i64)]) -> Result<Self, GravityError> {
        let dga = &surface.model;
        let leaves: Vec<BfField> = BfField::LEAVES.iter().copied().filter(|f| double || !f.is_double()).collect();
        let basis_for = |f: BfField, leaf: BfField| -> Vec<usize> {
            let modes = surface.support.iter().any(|s| s == leaf.name());
            dga.of_degree(f.form_degree()).into_iter().filter(|&a| modes || dga.basis[a].harmonic).collect()
        };
        let mut gens = Vec::new();
        let mut layout = Vec::new();
        for &f in &leaves {
            let (lb, cb) = (basis_for(f, f), basis_for(f.conj(), f));
            let start = gens.len();
            for &a in &lb {
                for i in 0..3 {
                    gens.push(Generator::new(format!("{}[{}]{}", f.name(), dga.basis[a].name, i), f.ghost()));
                }
            }
            for &a in &lb {
                for i in 0..3 {
                    gens.push(Generator::new(format!("p{}[{}]{}", f.name(), dga.basis[a].name, i), -f.ghost()));
                }
            }
            layout.push((f, lb, cb, start));
        }
        let alg = Algebra::new(gens)?;
        let mut pairs = Vec::new();
        let mut fields = BTreeMap::new();
        let mut leaf_gens = BTreeMap::new();
        let mut sign_map = BTreeMap::new();
        for (f, lb, cb, start) in layout {
            let n = lb.len() * 3;
            let coord = |k: usize, i: usize| start + 3 * k + i;
            let mom = |k: usize, i: usize| start + n + 3 * k + i;
            for k in 0..lb.len() {
                for i in 0..3 {
                    pairs.push((coord(k, i), mom(k, i)));
                }
            }
            leaf_gens.insert(f, (0..lb.len()).flat_map(|k| (0..3).map(move |i| coord(k, i))).collect());
            let mut x = Field::zero();
            for (k, &a) in lb.iter().enumerate() {
                for i in 0..3 {
                    x.0[i].add_at(a, Poly::gen(&alg, coord(k, i)));
                }
            }
            fields.insert(f, x);
            // int <X, Y> = s * sum x p
            let conj_odd = f.conj().ghost().rem_euclid(2) == 1;
            let mut sf = dga.pairing(&lb, &cb);
            for (k, &a) in lb.iter().enumerate() {
                if conj_odd && dga.degree(a) % 2 == 1 {
                    for c in sf[k].iter_mut() {
                        *c = -c.clone();
                    }
                }
            }
            let m = if sf.len() == cb.len() { inverse(&sf) } else { None };
            let m = m.ok_or_else(|| GravityError::Pairing(f.name().to_string()))?;
            let s = signs.iter().find(|(g, _)| *g == f).map(|(_, s)| *s).unwrap_or(1);
            sign_map.insert(f, s);
            let mut y = Field::zero();
            for (bi, &b) in cb.iter().enumerate() {
                for j in 0..3 {
                    let mut p = Poly::zero(&alg);
                    for k in 0..lb.len() {
                        let c = &m[bi][k];
                        if !Coeff::is_zero(c) {
                            p.add_assign_poly(&Poly::gen(&alg, mom(k, j)).scale_rat(&(c * rint(s * ETA[j]))));
                        }
                    }
                    y.0[j].add_at(b, p);
                }
            }
            fields.insert(f.conj(), y);
        }
        let chart = PhaseChart::from_indices(&alg, pairs)?;
        Ok(BfTheory { surface: surface.clone(), chart, double, fields, leaf_gens, signs: sign_map })
    }

    pub fn calc(&self) -> Calc<'_> {
        Calc { dga: &self.surface.model, alg: self.chart.algebra() }
    }
    pub fn alg(&self) -> &Arc<Algebra> {
        self.chart.algebra()
    }
    pub fn pair_sign(&self, f: BfField) -> i64 {
        self.signs.get(&f).copied().unwrap_or(1)
    }
    pub fn field(&self, f: BfField) -> &Field {
        &self.fields[&f]
    }
    pub fn leaf_generators(&self, f: BfField) -> &[usize] {
        self.leaf_gens.get(&f).map(Vec::as_slice).unwrap_or(&[])
    }
    pub fn generators_of(&self, f: BfField) -> Vec<usize> {
        let leaf = if f.is_leaf() { f } else { f.conj() };
        let xs = self.leaf_generators(leaf);
        if f.is_leaf() {
            xs.to_vec()
        } else {
            xs.iter().map(|&x| self.chart.partner(x)).collect()
        }
    }

    /// `S_BF = int chi d_A B + tau F_A + tau [chi, Bd] + 1/2 [chi, chi] Ad`.
    pub fn s_bf(&self) -> Poly {
        let c = self.calc();
        let f = |x| self.field(x);
        let (b, a, chi, ad, tau, bd) = (f(BfField::B), f(BfField::A), f(BfField::Chi), f(BfField::Ad), f(BfField::Tau), f(BfField::Bd));
        let mut s = c.int_pair(chi, &c.cov_d(a, b));
        s.add_assign_poly(&c.int_pair(tau, &c.curvature(a)));
        s.add_assign_poly(&c.int_pair(tau, &c.bracket(chi, bd)));
        s.add_assign_poly(&c.int_pair(&c.bracket(chi, chi), ad).scale_rat(&rat(1, 2)));
        s
    }

    /// Torsion-type constraint `d_A B + [tau, Bd]`.
    pub fn gauss_constraint(&self) -> Field {
        let c = self.calc();
        let f = |x| self.field(x);
        c.add(&c.cov_d(f(BfField::A), f(BfField::B)), &c.bracket(f(BfField::Tau), f(BfField::Bd)))
    }
    /// `J^x = int x (d_A B + [tau, Bd])`.
    pub fn j_of(&self, x: &Field) -> Poly {
        self.calc().int_pair(x, &self.gauss_constraint())
    }
    /// `M^x = int x Ad`.
    pub fn m_of(&self, x: &Field) -> Poly {
        self.calc().int_pair(x, self.field(BfField::Ad))
    }
    fn need_double(&self) {
        assert!(self.double, "double-layer functional on a single-layer theory");
    }
    /// `SS_BF = J^rho + M^mu + 1/2 int [rho, rho] rhod`.
    pub fn ss(&self) -> Poly {
        self.need_double();
        let c = self.calc();
        let (rho, rhod) = (self.field(BfField::Rho), self.field(BfField::Rhod));
        let mut s = self.j_of(rho);
        s.add_assign_poly(&self.m_of(self.field(BfField::Mu)));
        s.add_assign_poly(&c.int_pair(&c.bracket(rho, rho), rhod).scale_rat(&rat(1, 2)));
        s
    }
    /// `S_BF` extended by `int [chi, mu] mud, mu rhod, [chi, rho] rhod` with `EXT_SIGNS`.
    pub fn s_check(&self) -> Poly {
        self.need_double();
        let c = self.calc();
        let f = |x| self.field(x);
        let (chi, rho, rhod, mu, mud) = (f(BfField::Chi), f(BfField::Rho), f(BfField::Rhod), f(BfField::Mu), f(BfField::Mud));
        let mut s = self.s_bf();
        let terms = [c.int_pair(&c.bracket(chi, mu), mud), c.int_pair(mu, rhod), c.int_pair(&c.bracket(chi, rho), rhod)];
        for (t, sg) in terms.iter().zip(EXT_SIGNS) {
            s.add_assign_poly(&t.scale_rat(&rint(sg)));
        }
        s
    }
    /// Gauge parameter `int chi rhod, 1/2 [chi, chi] mud` with `Y_SIGNS`.
    pub fn y_gauge(&self) -> Poly {
        self.need_double();
        let c = self.calc();
        let f = |x| self.field(x);
        let chi = f(BfField::Chi);
        let mut s = c.int_pair(chi, f(BfField::Rhod)).scale_rat(&rint(Y_SIGNS[0]));
        s.add_assign_poly(&c.int_pair(&c.bracket(chi, chi), f(BfField::Mud)).scale_rat(&rat(Y_SIGNS[1], 2)));
        s
    }
    /// Generators of the `rho, mu` layer and their conjugates.
    pub fn layer_gens(&self) -> Vec<usize> {
        [BfField::Rho, BfField::Rhod, BfField::Mu, BfField::Mud].iter().flat_map(|&f| self.generators_of(f)).collect()
    }

    /// Residuals of `X(field) - expected` for every listed field.
    fn table(&self, name: &str, anchor: &str, x: &VectorField<Rat>, rows: Vec<(BfField, Field)>) -> Check {
        let c = self.calc();
        let mut res = Vec::new();
        for (f, want) in rows {
            let got = c.map(self.field(f), |p| x.apply(p));
            for (k, p) in c.residuals(&c.sub(&got, &want)) {
                res.push((format!("{}:{}", f.name(), k), p));
            }
        }
        Check::all_zero(format!("{} [{}]", name, self.surface.label()), anchor, &res)
    }

    /// Master equation, nilpotency and the component table of `Q_BF`.
    pub fn single_checks(&self) -> Vec<Check> {
        let c = self.calc();
        let f = |x| self.field(x);
        let (b, a, chi, tau, bd) = (f(BfField::B), f(BfField::A), f(BfField::Chi), f(BfField::Tau), f(BfField::Bd));
        let s = self.s_bf();
        let q = ham_vf(&s, &self.chart);
        let nil: Vec<(String, Poly)> = check_nilpotent(&q)
            .into_iter()
            .map(|(g, p)| (self.alg().generator(g).id.clone(), p))
            .collect();
        let label = self.surface.label();
        let zero: Poly = Poly::constant(self.alg(), s.constant_term());
        let rows = vec![
            (BfField::B, c.add(&c.bracket(chi, b), &c.cov_d(a, tau))),
            (BfField::A, c.cov_d(a, chi)),
            (BfField::Chi, c.scale(&c.bracket(chi, chi), &rat(1, 2))),
            (BfField::Tau, c.bracket(chi, tau)),
            (BfField::Ad, c.add(&c.add(&c.bracket(chi, f(BfField::Ad)), &c.cov_d(a, b)), &c.bracket(tau, bd))),
            (BfField::Bd, c.add(&c.bracket(chi, bd), &c.curvature(a))),
        ];
        vec![
            Check::zero(format!("{{S_BF,S_BF}} = 0 [{}]", label), "bf:cme", &poisson(&s, &s, &self.chart)),
            Check::all_zero(format!("Q_BF^2 = 0 [{}]", label), "bf:nilpotency", &nil),
            self.table("Q_BF component table", "bf:q-table", &q, rows),
            Check::zero(format!("S_BF at the zero field = 0 [{}]", label), "bf:zero-field", &zero),
        ]
    }

    /// Gauss-constraint brackets and the Hamiltonian vector fields of `J^rho`, `M^mu`.
    pub fn gauss_checks(&self) -> Vec<Check> {
        self.need_double();
        let c = self.calc();
        let ch = &self.chart;
        let f = |x| self.field(x);
        let (b, a, tau, bd, rho, mu) =
            (f(BfField::B), f(BfField::A), f(BfField::Tau), f(BfField::Bd), f(BfField::Rho), f(BfField::Mu));
        let (j, m) = (self.j_of(rho), self.m_of(mu));
        let jrr = self.j_of(&c.bracket(rho, rho)).scale_rat(&rat(JJ_FACTOR.0, JJ_FACTOR.1));
        let label = self.surface.label();
        let z = Field::zero;
        let xj = ham_vf(&j, ch);
        let xm = ham_vf(&m, ch);
        let j_rows = vec![
            (BfField::B, c.bracket(rho, b)),
            (BfField::A, c.cov_d(a, rho)),
            (BfField::Tau, c.bracket(rho, tau)),
            (BfField::Bd, c.bracket(rho, bd)),
            (BfField::Chi, z()),
            (BfField::Ad, z()),
        ];
        let m_rows = vec![
            (BfField::B, z()),
            (BfField::A, z()),
            (BfField::Tau, z()),
            (BfField::Bd, z()),
            (BfField::Chi, mu.clone()),
            (BfField::Ad, z()),
        ];
        vec![
            Check::zero(format!("{{J,J}} = -J^[rho,rho] [{}]", label), "gauss:jj", &(&poisson(&j, &j, ch) - &jrr)),
            Check::zero(format!("{{J,M}} = 0 [{}]", label), "gauss:jm", &poisson(&j, &m, ch)),
            Check::zero(format!("{{M,M}} = 0 [{}]", label), "gauss:mm", &poisson(&m, &m, ch)),
            self.table("X_J component table", "gauss:xj-table", &xj, j_rows),
            self.table("X_M component table", "gauss:xm-table", &xm, m_rows),
        ]
    }

    /// Double-layer charge, its table, the extension of `S_BF` and the gauge shift to `int tau F_A`.
    pub fn double_checks(&self) -> Vec<Check> {
        self.need_double();
        let c = self.calc();
        let ch = &self.chart;
        let f = |x| self.field(x);
        let (b, a, tau, bd, rho, rhod, mu) =
            (f(BfField::B), f(BfField::A), f(BfField::Tau), f(BfField::Bd), f(BfField::Rho), f(BfField::Rhod), f(BfField::Mu));
        let label = self.surface.label();
        let ss = self.ss();
        let sc = self.s_check();
        let qq = ham_vf(&ss, ch);
        let nil: Vec<(String, Poly)> =
            check_nilpotent(&qq).into_iter().map(|(g, p)| (self.alg().generator(g).id.clone(), p)).collect();
        let z = Field::zero;
        let rows = vec![
            (BfField::B, c.bracket(rho, b)),
            (BfField::A, c.cov_d(a, rho)),
            (BfField::Tau, c.bracket(rho, tau)),
            (BfField::Bd, c.bracket(rho, bd)),
            (BfField::Chi, mu.clone()),
            (BfField::Ad, z()),
            (BfField::Rho, c.scale(&c.bracket(rho, rho), &rat(1, 2))),
            (BfField::Rhod, c.add(&c.bracket(rho, rhod), &self.gauss_constraint())),
            (BfField::Mu, z()),
            (BfField::Mud, f(BfField::Ad).clone()),
        ];
        let tot = &sc + &ss;
        let shifted = &sc + &qq.apply(&self.y_gauge());
        vec![
            Check::zero(format!("{{SS_BF,SS_BF}} = 0 [{}]", label), "bf-double:cme", &poisson(&ss, &ss, ch)),
            Check::all_zero(format!("QQ_BF^2 = 0 [{}]", label), "bf-double:nilpotency", &nil),
            self.table("QQ_BF component table", "bf-double:qq-table", &qq, rows),
            Check::zero(format!("{{S_check,SS_BF}} = 0 [{}]", label), "bf-double:commute", &poisson(&sc, &ss, ch)),
            Check::zero(format!("{{S_check,S_check}} = 0 [{}]", label), "bf-double:extension-cme", &poisson(&sc, &sc, ch)),
            Check::zero(format!("{{S_check+SS,S_check+SS}} = 0 [{}]", label), "bf-double:total-cme", &poisson(&tot, &tot, ch)),
            Check::zero(
                format!("S_check at zero double layer = S_BF [{}]", label),
                "bf-double:zero-section",
                &(&sc.kill(&self.layer_gens()) - &self.s_bf()),
            ),
            Check::zero(
                format!("S_check + QQ(Y) = int tau F_A [{}]", label),
                "bf-double:rescheck",
                &(&shifted - &self.s_res()),
            ),
        ]
    }

    /// Every classical check for this theory.
    pub fn checks(&self) -> Vec<Check> {
        let mut out = self.single_checks();
        if self.double {
            out.extend(self.gauss_checks());
            out.extend(self.double_checks());
        }
        out
    }
    /// `int tau F_A`.
    pub fn s_res(&self) -> Poly {
        let c = self.calc();
        c.int_pair(self.field(BfField::Tau), &c.curvature(self.field(BfField::A)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;

    fn theory(spec: &str, double: bool) -> BfTheory {
        BfTheory::build(&SurfaceSpec::parse(spec).unwrap(), double).unwrap()
    }

    fn assert_checks(cs: &[Check]) {
        for c in cs {
            assert!(c.pass, "{}", c);
        }
    }

    #[test]
    fn single_layer_on_cohomology_model() {
        assert_checks(&theory("torus_h", false).single_checks());
    }

    #[test]
    fn single_layer_on_fourier_model() {
        assert_checks(&theory("torus_fourier(1, all)", false).single_checks());
    }

    #[test]
    fn double_layer_on_cohomology_model() {
        assert_checks(&theory("torus_h", true).checks());
    }

    #[test]
    fn double_layer_on_fourier_model() {
        assert_checks(&theory("torus_fourier(1, all)", true).checks());
    }

    #[test]
    fn dropping_a_term_breaks_the_master_equation() {
        let t = theory("torus_h", false);
        let c = t.calc();
        let half = c.int_pair(&c.bracket(t.field(BfField::Chi), t.field(BfField::Chi)), t.field(BfField::Ad)).scale_rat(&rat(1, 2));
        let broken = &t.s_bf() - &half;
        assert!(!poisson(&broken, &broken, &t.chart).is_zero());
    }

    #[test]
    fn flipped_b_pairing_breaks_the_table() {
        let sp = SurfaceSpec::parse("torus_h").unwrap();
        let t = BfTheory::with_signs(&sp, false, &[(BfField::B, 1)]).unwrap();
        assert!(!all_pass(&t.single_checks()));
    }

    #[test]
    fn fourier_model_has_active_differential() {
        let t = theory("torus_fourier(1, all)", false);
        let c = t.calc();
        assert!(!c.d(t.field(BfField::B)).is_zero());
        assert!(!c.d(t.field(BfField::Tau)).is_zero());
        let h = theory("torus_h", false);
        assert!(h.calc().d(h.field(BfField::B)).is_zero());
    }
}
