//! Double-BFV layer: the charge on the doubled chart, the extension of the single-layer
//! charge, the gauge shift to the residual charge, and body-level reduction flows.

use crate::bfv::{build_bfv, BfvData, BfvError, ConstraintSystem, Jml};
use crate::check::Check;
use crate::galg::{rat, rat_to_f64, rint, Poly, Rat};
use crate::phase::{check_cme, check_nilpotent, ham_vf, poisson, VectorField};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DbfvError {
    #[error(transparent)]
    Bfv(#[from] BfvError),
    #[error("double charge fails the master equation: {0}")]
    Cme(String),
    #[error("extension is not a cocycle: {0}")]
    Cocycle(String),
    #[error("step must be positive, got {0}")]
    Step(f64),
    #[error("non-finite value at t = {0}")]
    NonFinite(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Signs of the terms of the extension
/// `S_C + a1 <mu,rhod> + a2 <[[chi,mu]],mud> + a3 <[[chi,rho]],rhod> + a4 <m(rho,lam),rhod> + a5 <m(mu,lam),mud>`
/// and of the gauge parameter `Y = b1 <chi,rhod> + b2/2 <[[chi,chi]],mud> + b3 <m(chi,lam),mud>`
/// and the residual `S_res = <lam,psi> - 1/2 h lam lam lamd + c1 <m(rho,lam),rhod>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSigns {
    pub ext: [i64; 5],
    pub y: [i64; 3],
    pub res: i64,
}

/// The unique assignment for which every double-layer check holds on systems exercising
/// `f` and `m` (see the `layer_signs_unique` test).
pub const LAYER_SIGNS: LayerSigns = LayerSigns { ext: [1, -1, -1, -1, -1], y: [-1, 1, 1], res: -1 };

/// Double BFV data of a constraint system with constant tensors.
#[derive(Clone, Debug)]
pub struct DoubleBfv {
    pub jml: Jml,
    /// Charge `J^rho + M^mu + 1/2 <[[rho,rho]], rhod>`.
    pub ss: Poly<Rat>,
    pub qq: VectorField<Rat>,
    /// Extension of the single-layer charge.
    pub s_ext: Poly<Rat>,
    pub y: Poly<Rat>,
    pub s_res: Poly<Rat>,
    pub signs: LayerSigns,
}

pub fn build_double_charge(j: &Jml) -> Poly<Rat> {
    let rho = j.rho_vec();
    let mut s = &j.j_of(&rho) + &j.m_of(&j.mu_vec());
    let rr = j.dbracket(&rho, &rho);
    s.add_assign_poly(&j.pair(&rr, &j.vars(&j.rhod)).scale_rat(&rat(1, 2)));
    s
}

fn signed(p: Poly<Rat>, s: i64) -> Poly<Rat> {
    if s == 1 {
        p
    } else {
        p.scale_rat(&rint(s))
    }
}

pub fn build_extension(j: &Jml, signs: &LayerSigns) -> Poly<Rat> {
    let (chi, lam, rho, mu) = (j.vars(&j.chi), j.vars(&j.lam), j.rho_vec(), j.mu_vec());
    let (rhod, mud) = (j.vars(&j.rhod), j.vars(&j.mud));
    let a = signs.ext;
    let mut s = j.s.clone();
    s.add_assign_poly(&signed(j.pair(&mu, &rhod), a[0]));
    s.add_assign_poly(&signed(j.pair(&j.dbracket(&chi, &mu), &mud), a[1]));
    s.add_assign_poly(&signed(j.pair(&j.dbracket(&chi, &rho), &rhod), a[2]));
    s.add_assign_poly(&signed(j.pair(&j.m_act(&rho, &lam), &rhod), a[3]));
    s.add_assign_poly(&signed(j.pair(&j.m_act(&mu, &lam), &mud), a[4]));
    s
}

pub fn canonical_y(j: &Jml, signs: &LayerSigns) -> Poly<Rat> {
    let (chi, lam) = (j.vars(&j.chi), j.vars(&j.lam));
    let (rhod, mud) = (j.vars(&j.rhod), j.vars(&j.mud));
    let b = signs.y;
    let mut y = signed(j.pair(&chi, &rhod), b[0]);
    y.add_assign_poly(&signed(j.pair(&j.dbracket(&chi, &chi), &mud).scale_rat(&rat(1, 2)), b[1]));
    y.add_assign_poly(&signed(j.pair(&j.m_act(&chi, &lam), &mud), b[2]));
    y
}

/// `<lam, psi> - 1/2 h_ab^c lam^a lam^b lamd_c + c1 <m(rho, lam), rhod>` on the double chart.
pub fn residual_charge(j: &Jml, signs: &LayerSigns) -> Poly<Rat> {
    let alg = j.alg();
    let sys = &j.bfv.system;
    let lam = j.vars(&j.lam);
    let lamd = j.vars(&j.lamd);
    let mut s = Poly::zero(alg);
    for (a, p) in sys.psi.iter().enumerate() {
        s.add_assign_poly(&(&lam[a] * &p.lift(alg).expect("base lifts")));
    }
    for ([a, b, c], x) in sys.h.nonzero() {
        let k = x.constant_term() * rat(-1, 2);
        s.add_assign_poly(&(&(&lam[a] * &lam[b]) * &lamd[c]).scale_rat(&k));
    }
    s.add_assign_poly(&signed(j.pair(&j.m_act(&j.rho_vec(), &lam), &j.vars(&j.rhod)), signs.res));
    s
}

/// `S + {SS, Y}`.
pub fn gauge_shift(s: &Poly<Rat>, qq: &VectorField<Rat>, y: &Poly<Rat>) -> Poly<Rat> {
    s + &qq.apply(y)
}

impl DoubleBfv {
    pub fn new(b: &BfvData) -> Result<DoubleBfv, DbfvError> {
        DoubleBfv::with_signs(b, LAYER_SIGNS)
    }

    pub fn with_signs(b: &BfvData, signs: LayerSigns) -> Result<DoubleBfv, DbfvError> {
        let jml = Jml::new(b)?;
        let ss = build_double_charge(&jml);
        let cme = check_cme(&ss, &jml.chart);
        if !cme.holds() {
            return Err(DbfvError::Cme(cme.residual.to_string()));
        }
        let qq = ham_vf(&ss, &jml.chart);
        let s_ext = build_extension(&jml, &signs);
        let y = canonical_y(&jml, &signs);
        let s_res = residual_charge(&jml, &signs);
        Ok(DoubleBfv { jml, ss, qq, s_ext, y, s_res, signs })
    }

    pub fn from_system(c: &ConstraintSystem) -> Result<DoubleBfv, DbfvError> {
        DoubleBfv::new(&build_bfv(c)?)
    }

    pub fn name(&self) -> &str {
        &self.jml.bfv.system.name
    }

    /// Total charge `S_ext + SS`.
    pub fn total(&self) -> Poly<Rat> {
        &self.s_ext + &self.ss
    }

    /// Generators of the doubled layer: `rho, rhod, mu, mud`.
    pub fn layer_gens(&self) -> Vec<usize> {
        let j = &self.jml;
        j.rho.iter().chain(&j.rhod).chain(&j.mu).chain(&j.mud).copied().collect()
    }

    pub fn checks(&self) -> Vec<Check> {
        let ch = &self.jml.chart;
        let alg = ch.algebra();
        let n = self.name();
        let nil: Vec<(String, Poly<Rat>)> =
            check_nilpotent(&self.qq).into_iter().map(|(g, p)| (alg.generator(g).id.clone(), p)).collect();
        let tot = self.total();
        vec![
            Check::zero(format!("{{SS,SS}} = 0 [{}]", n), "cme:double-layer", &poisson(&self.ss, &self.ss, ch)),
            Check::all_zero(format!("QQ^2 = 0 [{}]", n), "nilpotency:double-layer", &nil),
            Check::zero(format!("QQ(S_ext) = 0 [{}]", n), "extension:cocycle", &self.qq.apply(&self.s_ext)),
            Check::zero(format!("{{S_ext,S_ext}} = 0 [{}]", n), "extension:cme", &poisson(&self.s_ext, &self.s_ext, ch)),
            Check::zero(format!("{{S_ext+SS,S_ext+SS}} = 0 [{}]", n), "extension:total-cme", &poisson(&tot, &tot, ch)),
            Check::zero(
                format!("S_ext at zero double layer = S_C [{}]", n),
                "extension:zero-section",
                &(&self.s_ext.kill(&self.layer_gens()) - &self.jml.s),
            ),
            Check::zero(
                format!("S_ext + QQ(Y) = S_res [{}]", n),
                "gauge-shift:residual",
                &(&gauge_shift(&self.s_ext, &self.qq, &self.y) - &self.s_res),
            ),
            Check::zero(
                format!("QQ(S_ext + QQ(Y)) = 0 [{}]", n),
                "gauge-shift:cocycle",
                &self.qq.apply(&gauge_shift(&self.s_ext, &self.qq, &self.y)),
            ),
        ]
    }
}

/// Compares the residual charge with the `rho` sector set to zero against the single-layer
/// charge of `residual`, whose constraints must be the `psi` block under the names
/// `lam{j}`, `lamd{j}`.
pub fn residual_bfv_compare(d: &DoubleBfv, residual: &ConstraintSystem) -> Result<Check, DbfvError> {
    let b = build_bfv(residual)?;
    let lhs = d.s_res.kill(&d.layer_gens());
    let target = lhs.algebra().clone();
    let mut map = std::collections::HashMap::new();
    for (i, g) in b.chart.algebra().gens().iter().enumerate() {
        match target.index_of(&g.id) {
            Ok(t) => {
                map.insert(i, Poly::gen(&target, t));
            }
            Err(_) => return Err(DbfvError::Dimension(format!("generator `{}` missing on the double chart", g.id))),
        }
    }
    let rhs = b.s.substitute(&target, &map).map_err(BfvError::from)?;
    Ok(Check::zero(format!("residual charge = BFV of residual system [{}]", d.name()), "residual:compare", &(&lhs - &rhs)))
}

/// Value of a polynomial in even generators at a numeric point (indexed like the algebra).
pub fn eval_f64(p: &Poly<Rat>, point: &[f64]) -> f64 {
    p.terms()
        .map(|(m, c)| m.factors().iter().fold(rat_to_f64(c), |acc, &(g, e)| acc * point[g as usize].powi(e as i32)))
        .sum()
}

/// Body-level state: base coordinates in algebra order, and coefficient vectors of the
/// second-block ghosts and their conjugates.
#[derive(Clone, Debug, PartialEq)]
pub struct BodyState {
    pub base: Vec<f64>,
    pub lam: Vec<f64>,
    pub lamd: Vec<f64>,
}

impl BodyState {
    pub fn dist(&self, other: &BodyState) -> f64 {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        d(&self.base, &other.base).max(d(&self.lam, &other.lam)).max(d(&self.lamd, &other.lamd))
    }
    fn axpy(&self, h: f64, k: &BodyState) -> BodyState {
        let f = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + h * y).collect();
        BodyState { base: f(&self.base, &k.base), lam: f(&self.lam, &k.lam), lamd: f(&self.lamd, &k.lamd) }
    }
    fn finite(&self) -> bool {
        self.base.iter().chain(&self.lam).chain(&self.lamd).all(|x| x.is_finite())
    }
}

/// Flow generated by `rho^a phi_a` with an even parameter path `rho(t)`:
/// `q' = -rho d phi/dp`, `p' = rho d phi/dq`, `lam' = rho g lam`, and the coadjoint action
/// `lamd'_b = -rho^i g_ib^c lamd_c` on the conjugates, which keeps `<lam, lamd>` fixed.
pub struct BodyFlow {
    chart: crate::phase::PhaseChart,
    /// `d phi_a / d x_j` for every base generator `x_j`.
    grads: Vec<Vec<Poly<Rat>>>,
    g: Vec<([usize; 3], f64)>,
    l1: usize,
    l2: usize,
}

impl BodyFlow {
    pub fn new(c: &ConstraintSystem) -> Result<BodyFlow, DbfvError> {
        if !c.is_constant() {
            return Err(DbfvError::Bfv(BfvError::NonConstant("g".into())));
        }
        let n = c.chart.algebra().len();
        let grads = c.phi.iter().map(|p| (0..n).map(|j| p.partial_left(j)).collect()).collect();
        let g = c.g.nonzero().into_iter().map(|(ix, v)| (ix, rat_to_f64(&v.constant_term()))).collect();
        Ok(BodyFlow { chart: c.chart.clone(), grads, g, l1: c.l1(), l2: c.l2() })
    }

    fn rhs(&self, x: &BodyState, rho: &[f64]) -> BodyState {
        let n = x.base.len();
        let mut base = vec![0.0; n];
        for (a, grad) in self.grads.iter().enumerate() {
            if rho[a] == 0.0 {
                continue;
            }
            for &(q, p) in self.chart.pairs() {
                base[q] -= rho[a] * eval_f64(&grad[p], &x.base);
                base[p] += rho[a] * eval_f64(&grad[q], &x.base);
            }
        }
        let mut lam = vec![0.0; self.l2];
        let mut lamd = vec![0.0; self.l2];
        for &([i, j, k], v) in &self.g {
            lam[k] += rho[i] * v * x.lam[j];
            lamd[j] -= rho[i] * v * x.lamd[k];
        }
        BodyState { base, lam, lamd }
    }

    /// RK4 from `t0` to `t0 + t` with steps no larger than `step`.
    pub fn run(&self, x0: &BodyState, rho: &dyn Fn(f64) -> Vec<f64>, t0: f64, t: f64, step: f64) -> Result<BodyState, DbfvError> {
        if !(step > 0.0) {
            return Err(DbfvError::Step(step));
        }
        if x0.base.len() != self.chart.algebra().len() || x0.lam.len() != self.l2 || x0.lamd.len() != self.l2 {
            return Err(DbfvError::Dimension("state does not match the constraint system".into()));
        }
        let n = (t.abs() / step).ceil().max(1.0) as usize;
        let h = t / n as f64;
        let mut x = x0.clone();
        for s in 0..n {
            let ts = t0 + s as f64 * h;
            let (r0, r1, r2) = (rho(ts), rho(ts + h / 2.0), rho(ts + h));
            if r0.len() != self.l1 {
                return Err(DbfvError::Dimension("parameter path has the wrong length".into()));
            }
            let k1 = self.rhs(&x, &r0);
            let k2 = self.rhs(&x.axpy(h / 2.0, &k1), &r1);
            let k3 = self.rhs(&x.axpy(h / 2.0, &k2), &r1);
            let k4 = self.rhs(&x.axpy(h, &k3), &r2);
            x = x.axpy(h / 6.0, &k1).axpy(h / 3.0, &k2).axpy(h / 3.0, &k3).axpy(h / 6.0, &k4);
            if !x.finite() {
                return Err(DbfvError::NonFinite(ts + h));
            }
        }
        Ok(x)
    }
}

/// One-shot form of `BodyFlow::run` starting at `t = 0`.
pub fn flow_reduce_body(c: &ConstraintSystem, x0: &BodyState, rho: &dyn Fn(f64) -> Vec<f64>, t: f64, step: f64) -> Result<BodyState, DbfvError> {
    BodyFlow::new(c)?.run(x0, rho, 0.0, t, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfv::{m_coupled, registry};

    fn systems() -> Vec<ConstraintSystem> {
        vec![registry("abelian").unwrap(), registry("se2_nested").unwrap(), registry("so3").unwrap(), m_coupled()]
    }

    #[test]
    fn layer_signs_unique() {
        let mut found = Vec::new();
        for code in 0..(1 << 9) {
            let bit = |k: usize| if code >> k & 1 == 1 { -1 } else { 1 };
            let signs = LayerSigns {
                ext: [bit(0), bit(1), bit(2), bit(3), bit(4)],
                y: [bit(5), bit(6), bit(7)],
                res: bit(8),
            };
            let ok = systems().iter().all(|c| {
                let d = DoubleBfv::with_signs(&build_bfv(c).unwrap(), signs).unwrap();
                d.checks().iter().all(|k| k.pass)
            });
            if ok {
                found.push(signs);
            }
        }
        assert_eq!(found, vec![LAYER_SIGNS]);
    }

    #[test]
    fn double_checks_all_systems() {
        for c in systems() {
            let d = DoubleBfv::from_system(&c).unwrap();
            for k in d.checks() {
                assert!(k.pass, "{}", k);
            }
        }
    }

    #[test]
    fn total_charge_cohomology() {
        let d = DoubleBfv::from_system(&registry("abelian").unwrap()).unwrap();
        let q = ham_vf(&d.total(), &d.jml.chart);
        assert_eq!(crate::bfv::h0_truncated(&q, 3).unwrap().dim, 1);
        // the reducibility class of SE(2) on T*R^2 survives the double layer
        let d = DoubleBfv::from_system(&registry("se2_nested").unwrap()).unwrap();
        let q = ham_vf(&d.total(), &d.jml.chart);
        assert_eq!(crate::bfv::h0_truncated(&q, 2).unwrap().dim, 2);
    }

    #[test]
    fn examples_of_extension() {
        let d = DoubleBfv::from_system(&registry("abelian").unwrap()).unwrap();
        let alg = d.jml.alg();
        let p = |s: &str| crate::galg::parse_poly(alg, s).unwrap();
        assert_eq!(d.ss, p("-rho1 p1 + mu1 chid1"));
        assert_eq!(d.s_ext, &d.jml.s + &p("mu1 rhod1"));
        assert_eq!(d.s_res, p("lam1 p2"));
        let d = DoubleBfv::from_system(&registry("se2_nested").unwrap()).unwrap();
        let alg = d.jml.alg();
        let p = |s: &str| crate::galg::parse_poly(alg, s).unwrap();
        assert_eq!(d.s_ext, &d.jml.s + &p("mu1 rhod1"));
        assert_eq!(d.s_res, p("lam1 p1 + lam2 p2"));
    }

    #[test]
    fn residual_compare_se2_and_abelian() {
        let d = DoubleBfv::from_system(&registry("se2_nested").unwrap()).unwrap();
        assert!(residual_bfv_compare(&d, &crate::bfv::se2_residual()).unwrap().pass);
        let d = DoubleBfv::from_system(&registry("abelian").unwrap()).unwrap();
        assert!(residual_bfv_compare(&d, &crate::bfv::abelian_residual()).unwrap().pass);
        let d = DoubleBfv::from_system(&registry("se2_nested").unwrap()).unwrap();
        assert!(!residual_bfv_compare(&d, &crate::bfv::abelian_residual()).map(|c| c.pass).unwrap_or(false));
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn zero_path_is_identity() {
        let c = registry("se2_nested").unwrap();
        let x0 = BodyState { base: vec![0.3, -1.2, 0.5, 0.7], lam: vec![1.0, 2.0], lamd: vec![-0.5, 0.25] };
        let x = flow_reduce_body(&c, &x0, &|_| vec![0.0], 1.0, 1e-3).unwrap();
        assert_eq!(x, x0);
    }

    #[test]
    fn se2_rotation_closed_form() {
        let c = registry("se2_nested").unwrap();
        let x0 = BodyState { base: vec![0.3, -1.2, 0.5, 0.7], lam: vec![1.0, 2.0], lamd: vec![-0.5, 0.25] };
        let w = 0.8;
        let x = flow_reduce_body(&c, &x0, &|_| vec![w], 1.0, 1e-3).unwrap();
        // q' = w (q2, -q1): clockwise rotation by angle w t
        let (cs, sn) = (w.cos(), w.sin());
        let rot = |a: f64, b: f64| (cs * a + sn * b, -sn * a + cs * b);
        let (q1, q2) = rot(0.3, -1.2);
        assert!((x.base[0] - q1).abs() < 1e-10 && (x.base[1] - q2).abs() < 1e-10);
        // lam' = w (-lam2, lam1): counter-clockwise
        let (l1, l2) = (cs * 1.0 - sn * 2.0, sn * 1.0 + cs * 2.0);
        assert!((x.lam[0] - l1).abs() < 1e-10 && (x.lam[1] - l2).abs() < 1e-10);
        assert!((norm(&x.lam) - norm(&x0.lam)).abs() < 1e-10);
        let pair = |s: &BodyState| s.lam.iter().zip(&s.lamd).map(|(a, b)| a * b).sum::<f64>();
        assert!((pair(&x) - pair(&x0)).abs() < 1e-10);
    }

    #[test]
    fn so3_momentum_norm_conserved() {
        let c = registry("so3").unwrap();
        let x0 = BodyState { base: vec![0.2, -0.4, 1.1, 0.9, 0.1, -0.6], lam: vec![], lamd: vec![] };
        let x = flow_reduce_body(&c, &x0, &|_| vec![0.3, -0.7, 0.5], 1.0, 1e-3).unwrap();
        assert!((norm(&x.base[3..]) - norm(&x0.base[3..])).abs() < 1e-10);
        assert!((norm(&x.base[..3]) - norm(&x0.base[..3])).abs() < 1e-10);
    }

    #[test]
    fn piecewise_flows_compose() {
        let c = registry("se2_nested").unwrap();
        let f = BodyFlow::new(&c).unwrap();
        let x0 = BodyState { base: vec![0.3, -1.2, 0.5, 0.7], lam: vec![1.0, 2.0], lamd: vec![-0.5, 0.25] };
        let path = |t: f64| vec![if t < 0.4 { 0.9 } else { -0.35 }];
        let whole = f.run(&x0, &path, 0.0, 1.0, 1e-3).unwrap();
        let half = f.run(&x0, &path, 0.0, 0.4, 1e-3).unwrap();
        let both = f.run(&half, &path, 0.4, 0.6, 1e-3).unwrap();
        assert!(whole.dist(&both) < 1e-8);
    }

    #[test]
    fn bad_step_rejected() {
        let c = registry("se2_nested").unwrap();
        let x0 = BodyState { base: vec![0.0; 4], lam: vec![0.0; 2], lamd: vec![0.0; 2] };
        assert!(matches!(flow_reduce_body(&c, &x0, &|_| vec![1.0], 1.0, 0.0), Err(DbfvError::Step(_))));
        assert!(matches!(flow_reduce_body(&c, &x0, &|_| vec![1.0], 1.0, -1.0), Err(DbfvError::Step(_))));
    }
}
