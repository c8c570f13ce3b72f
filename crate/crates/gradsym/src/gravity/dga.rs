//! Finite graded-commutative DGAs with an integration functional, standing in for the
//! de Rham complex of a closed surface.

use super::GravityError;
use crate::check::Check;
use crate::galg::{rint, Coeff, Rat};
use crate::linalg::{rank, SparseVec};
use std::collections::BTreeMap;

pub type Elem = BTreeMap<usize, Rat>;

#[derive(Clone, Debug, PartialEq)]
pub struct BasisElem {
    pub name: String,
    pub degree: u8,
    /// Cohomology representative; fields outside the mode support only use these.
    pub harmonic: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DgaModel {
    pub name: String,
    pub basis: Vec<BasisElem>,
    /// `mult[a][b]` is the product `e_a e_b` in the basis.
    pub mult: Vec<Vec<Elem>>,
    pub d: Vec<Elem>,
    pub integral: Vec<Rat>,
}

fn elem(entries: &[(usize, i64)]) -> Elem {
    entries.iter().filter(|e| e.1 != 0).map(|&(k, c)| (k, rint(c))).collect()
}

fn add_scaled(acc: &mut Elem, x: &Elem, c: &Rat) {
    for (k, v) in x {
        let e = acc.entry(*k).or_insert_with(Rat::zero);
        *e += c * v;
        if Coeff::is_zero(e) {
            acc.remove(k);
        }
    }
}

impl DgaModel {
    fn empty(name: &str, basis: Vec<(String, u8, bool)>) -> Self {
        let n = basis.len();
        DgaModel {
            name: name.to_string(),
            basis: basis.into_iter().map(|(name, degree, harmonic)| BasisElem { name, degree, harmonic }).collect(),
            mult: vec![vec![Elem::new(); n]; n],
            d: vec![Elem::new(); n],
            integral: vec![Rat::zero(); n],
        }
    }

    fn set_unit_and_top(&mut self, top: usize) {
        let n = self.basis.len();
        for a in 0..n {
            self.mult[0][a] = elem(&[(a, 1)]);
            self.mult[a][0] = elem(&[(a, 1)]);
        }
        self.integral[top] = rint(1);
    }

    fn set_pair(&mut self, a: usize, b: usize, c: usize, sign: i64) {
        let swap = if self.basis[a].degree % 2 == 1 && self.basis[b].degree % 2 == 1 { -sign } else { sign };
        self.mult[a][b] = elem(&[(c, sign)]);
        self.mult[b][a] = elem(&[(c, swap)]);
    }

    /// Cohomology of the torus: `1, a, b, ab` with `d = 0` and `int ab = 1`.
    pub fn torus_h() -> Self {
        let mut m = DgaModel::empty(
            "torus_h",
            vec![("1".into(), 0, true), ("a".into(), 1, true), ("b".into(), 1, true), ("ab".into(), 2, true)],
        );
        m.set_unit_and_top(3);
        m.set_pair(1, 2, 3, 1);
        m
    }

    /// Torus cohomology plus `n` truncated Fourier quartets `u, v = du, w, z = dw` with
    /// `u z = ab` and `v w = -ab`; every other product of non-constant modes vanishes.
    pub fn torus_fourier(n: usize) -> Self {
        let mut basis = vec![("1".into(), 0, true), ("a".into(), 1, true), ("b".into(), 1, true), ("ab".into(), 2, true)];
        for k in 1..=n {
            basis.push((format!("u{}", k), 0, false));
            basis.push((format!("v{}", k), 1, false));
            basis.push((format!("w{}", k), 1, false));
            basis.push((format!("z{}", k), 2, false));
        }
        let mut m = DgaModel::empty(&format!("torus_fourier({})", n), basis);
        m.set_unit_and_top(3);
        m.set_pair(1, 2, 3, 1);
        for k in 0..n {
            let (u, v, w, z) = (4 + 4 * k, 5 + 4 * k, 6 + 4 * k, 7 + 4 * k);
            m.d[u] = elem(&[(v, 1)]);
            m.d[w] = elem(&[(z, 1)]);
            m.set_pair(u, z, 3, 1);
            m.set_pair(v, w, 3, -1);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
    pub fn degree(&self, a: usize) -> u8 {
        self.basis[a].degree
    }
    pub fn of_degree(&self, k: u8) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.basis[a].degree == k).collect()
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn mul_elem(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::new();
        for (a, ca) in x {
            for (b, cb) in y {
                add_scaled(&mut out, &self.mult[*a][*b], &(ca * cb));
            }
        }
        out
    }
    pub fn d_elem(&self, x: &Elem) -> Elem {
        let mut out = Elem::new();
        for (a, c) in x {
            add_scaled(&mut out, &self.d[*a], c);
        }
        out
    }
    pub fn integrate(&self, x: &Elem) -> Rat {
        x.iter().fold(Rat::zero(), |acc, (a, c)| acc + c * &self.integral[*a])
    }
    fn basis_elem(&self, a: usize) -> Elem {
        elem(&[(a, 1)])
    }
    fn elem_degree_ok(&self, x: &Elem, k: u8) -> bool {
        x.keys().all(|&c| self.basis[c].degree == k)
    }

    /// Pairing matrix `int e_a e_b` for `a` of degree `k` and `b` of degree `2 - k`,
    /// restricted to the given basis subsets.
    pub fn pairing(&self, left: &[usize], right: &[usize]) -> Vec<Vec<Rat>> {
        left.iter()
            .map(|&a| right.iter().map(|&b| self.integrate(&self.mult[a][b])).collect())
            .collect()
    }
}

fn elem_string(m: &DgaModel, x: &Elem) -> String {
    if x.is_empty() {
        return "0".into();
    }
    x.iter().map(|(k, c)| format!("{}*{}", c, m.basis[*k].name)).collect::<Vec<_>>().join(" + ")
}

/// Checks every axiom the BF constructions rely on, exactly on the basis.
pub fn validate_dga(m: &DgaModel) -> Vec<Check> {
    let n = m.len();
    let e = |a| m.basis_elem(a);
    let mut grading = None;
    let mut comm = None;
    let mut assoc = None;
    let mut leib = None;
    for a in 0..n {
        let da = &m.d[a];
        if grading.is_none() && !m.elem_degree_ok(da, m.degree(a) + 1) {
            grading = Some(format!("d {} has wrong degree", m.basis[a].name));
        }
        for b in 0..n {
            let ab = &m.mult[a][b];
            if grading.is_none() && !m.elem_degree_ok(ab, m.degree(a) + m.degree(b)) {
                grading = Some(format!("{} {} has wrong degree", m.basis[a].name, m.basis[b].name));
            }
            let mut swapped = m.mult[b][a].clone();
            if m.degree(a) % 2 == 1 && m.degree(b) % 2 == 1 {
                swapped = swapped.into_iter().map(|(k, c)| (k, -c)).collect();
            }
            if comm.is_none() && *ab != swapped {
                comm = Some(format!("{} {}", m.basis[a].name, m.basis[b].name));
            }
            let sign = if m.degree(a) % 2 == 1 { rint(-1) } else { rint(1) };
            let mut rhs = m.mul_elem(da, &e(b));
            add_scaled(&mut rhs, &m.mul_elem(&e(a), &m.d[b]), &sign);
            if leib.is_none() && m.d_elem(ab) != rhs {
                leib = Some(format!("d({} {}) = {} vs {}", m.basis[a].name, m.basis[b].name, elem_string(m, &m.d_elem(ab)), elem_string(m, &rhs)));
            }
            for c in 0..n {
                if assoc.is_none() && m.mul_elem(ab, &e(c)) != m.mul_elem(&e(a), &m.mult[b][c]) {
                    assoc = Some(format!("({} {}) {}", m.basis[a].name, m.basis[b].name, m.basis[c].name));
                }
            }
        }
    }
    let dd = (0..n).find(|&a| !m.d_elem(&m.d[a]).is_empty());
    let stokes = (0..n).find(|&a| !Coeff::is_zero(&m.integrate(&m.d[a])));
    let mut pairing = None;
    for k in 0..=2u8 {
        let (l, r) = (m.of_degree(k), m.of_degree(2 - k));
        let rows: Vec<SparseVec> = m
            .pairing(&l, &r)
            .into_iter()
            .map(|row| row.into_iter().enumerate().filter(|(_, c)| !Coeff::is_zero(c)).collect())
            .collect();
        if l.len() != r.len() || rank(rows) != l.len() {
            pairing = Some(format!("degrees {} and {}", k, 2 - k));
        }
    }
    let named = |name: &str, anchor: &str, fail: Option<String>| Check::new(name, anchor, fail.is_none(), fail.unwrap_or_default());
    vec![
        named("grading", "dga:grading", grading),
        named("graded-commutative", "dga:graded-commutative", comm),
        named("associative", "dga:associative", assoc),
        named("d^2 = 0", "dga:d-squared", dd.map(|a| m.basis[a].name.clone())),
        named("leibniz", "dga:leibniz", leib),
        named("stokes", "dga:stokes", stokes.map(|a| format!("int d {} != 0", m.basis[a].name))),
        named("pairing nondegenerate", "dga:pairing", pairing),
    ]
}

/// Parsed `model = "..."` selector: a DGA and the leaf fields that carry
/// non-harmonic modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSpec {
    pub model: DgaModel,
    pub support: Vec<String>,
}

pub const LEAF_FIELDS: [&str; 5] = ["B", "chi", "tau", "rho", "mu"];

impl SurfaceSpec {
    /// `torus_h` or `torus_fourier(N, support)` with `support` either `all` or a
    /// `+`-separated list of leaf fields.
    pub fn parse(s: &str) -> Result<Self, GravityError> {
        let s = s.trim();
        if s == "torus_h" {
            return Ok(SurfaceSpec { model: DgaModel::torus_h(), support: vec![] });
        }
        let bad = || GravityError::Selector(s.to_string());
        let inner = s.strip_prefix("torus_fourier(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let mut parts = inner.splitn(2, ',');
        let n: usize = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let support = match parts.next().map(str::trim) {
            None | Some("all") => LEAF_FIELDS.iter().map(|f| f.to_string()).collect(),
            Some(list) => {
                let fs: Vec<String> = list.split('+').map(|f| f.trim().to_string()).collect();
                if fs.iter().any(|f| !LEAF_FIELDS.contains(&f.as_str())) {
                    return Err(bad());
                }
                fs
            }
        };
        if n == 0 {
            return Err(bad());
        }
        Ok(SurfaceSpec { model: DgaModel::torus_fourier(n), support })
    }

    /// Short name for reports, e.g. `torus_fourier(1; B+tau)`.
    pub fn label(&self) -> String {
        if self.support.is_empty() {
            self.model.name.clone()
        } else if self.support.len() == LEAF_FIELDS.len() {
            format!("{}; all", self.model.name)
        } else {
            format!("{}; {}", self.model.name, self.support.join("+"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;

    #[test]
    fn registered_models_valid() {
        for m in [DgaModel::torus_h(), DgaModel::torus_fourier(1), DgaModel::torus_fourier(2)] {
            let checks = validate_dga(&m);
            assert!(all_pass(&checks), "{}: {:?}", m.name, checks);
        }
        assert_eq!(DgaModel::torus_h().len(), 4);
    }

    #[test]
    fn broken_stokes_detected() {
        let mut m = DgaModel::torus_fourier(1);
        let z = m.index_of("z1").unwrap();
        m.integral[z] = rint(1);
        let checks = validate_dga(&m);
        let stokes = checks.iter().find(|c| c.anchor == "dga:stokes").unwrap();
        assert!(!stokes.pass);
    }

    #[test]
    fn broken_product_detected() {
        let mut m = DgaModel::torus_h();
        m.mult[2][1] = elem(&[(3, 1)]);
        assert!(!validate_dga(&m).iter().find(|c| c.anchor == "dga:graded-commutative").unwrap().pass);
        let mut m = DgaModel::torus_fourier(1);
        m.d[4] = elem(&[(5, 1), (1, 1)]);
        assert!(!validate_dga(&m).iter().find(|c| c.anchor == "dga:leibniz").unwrap().pass);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!(SurfaceSpec::parse("torus_h").unwrap().model.len(), 4);
        let s = SurfaceSpec::parse("torus_fourier(2, B+tau)").unwrap();
        assert_eq!(s.model.len(), 12);
        assert_eq!(s.support, vec!["B", "tau"]);
        assert_eq!(SurfaceSpec::parse("torus_fourier(1, all)").unwrap().support.len(), 5);
        assert!(SurfaceSpec::parse("torus_fourier(0, all)").is_err());
        assert!(SurfaceSpec::parse("sphere").is_err());
        assert!(SurfaceSpec::parse("torus_fourier(1, A)").is_err());
    }
}
