//! Quantisation of the double BFV data of BF theory in the polarisation with leaves
//! `B, chi, tau, rho, mu`.

use super::bf::{BfField, BfTheory};
use super::dga::SurfaceSpec;
use super::GravityError;
use crate::check::Check;
use crate::quant::{
    check_descent, nilpotency_checks, op_zero, quantize_linear, quantize_quadratic, shift_check, FormalOperator,
    Polarization, StateSpace,
};

#[derive(Clone, Debug)]
pub struct QuantumBf {
    pub theory: BfTheory,
    pub pol: Polarization,
    /// Quantised double-layer charge.
    pub omega: FormalOperator,
    /// Quantised `int tau F_A`.
    pub omega_res: FormalOperator,
}

impl QuantumBf {
    pub fn build(surface: &SurfaceSpec) -> Result<Self, GravityError> {
        let theory = BfTheory::build(surface, true)?;
        let alg = theory.alg().clone();
        let ids: Vec<String> = BfField::LEAVES
            .iter()
            .flat_map(|&f| theory.leaf_generators(f).to_vec())
            .map(|g| alg.generator(g).id.clone())
            .collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let pol = Polarization::new(&theory.chart, &refs)?;
        let omega = quantize_linear(&theory.ss(), &pol)?;
        let omega_res = quantize_quadratic(&theory.s_res(), &pol)?;
        Ok(QuantumBf { theory, pol, omega, omega_res })
    }

    /// Quantised `int rho dB` and `int tau dA`: the parts of the operators that need `d != 0`.
    pub fn differential_terms(&self) -> Result<(FormalOperator, FormalOperator), GravityError> {
        let t = &self.theory;
        let c = t.calc();
        let f = |x| t.field(x);
        let rho_db = quantize_linear(&c.int_pair(f(BfField::Rho), &c.d(f(BfField::B))), &self.pol)?;
        let tau_da = quantize_linear(&c.int_pair(f(BfField::Tau), &c.d(f(BfField::A))), &self.pol)?;
        Ok((rho_db, tau_da))
    }

    /// `q(S_check)` and `Z = q(Y) / (i hbar)`, so that `q(S_check) + [omega, Z] = omega_res`.
    pub fn check_and_shift(&self) -> Result<(FormalOperator, FormalOperator), GravityError> {
        let w = quantize_quadratic(&self.theory.s_check(), &self.pol)?;
        let z = quantize_linear(&self.theory.y_gauge(), &self.pol)?;
        let z = z.div_i_hbar().expect("linear quantisation carries one power of hbar");
        Ok((w, z))
    }

    /// Exact operator identities, the state-window check up to word length `window`, and the
    /// activity of the `d`-dependent terms.
    pub fn checks(&self, window: Option<u32>) -> Result<Vec<Check>, GravityError> {
        let label = self.theory.surface.label();
        let tag = |s: &str| format!("{} [{}]", s, label);
        let mut out = Vec::new();
        out.push(op_zero(&tag("[Omega, Omega] = 0"), "bf-quantum:nilpotency", &self.omega.commutator(&self.omega)?));
        out.push(op_zero(&tag("[Omega, Omega_res] = 0"), "bf-quantum:commute", &self.omega.commutator(&self.omega_res)?));
        out.push(op_zero(&tag("[Omega_res, Omega_res] = 0"), "bf-quantum:residual-square", &self.omega_res.commutator(&self.omega_res)?));
        if let Some(len) = window {
            let space = StateSpace::new(&self.pol, len);
            for mut c in nilpotency_checks("Omega", "bf-quantum:nilpotency", &self.omega, &space)? {
                c.name = tag(&c.name);
                out.push(c);
            }
        }
        let (rho_db, tau_da) = self.differential_terms()?;
        let d_zero = self.theory.calc().d(self.theory.field(BfField::B)).is_zero()
            && self.theory.calc().d(self.theory.field(BfField::Tau)).is_zero();
        let active = !rho_db.is_zero() && !tau_da.is_zero();
        let (name, pass) = if d_zero {
            ("rho dB and d tau terms vanish (d = 0)", rho_db.is_zero() && tau_da.is_zero())
        } else {
            ("rho dB and d tau terms active (d != 0)", active)
        };
        out.push(Check::new(tag(name), "bf-quantum:differential-terms", pass, ""));
        let one = crate::galg::Poly::one(self.pol.leaf_algebra());
        let on_one = self.omega.apply(&one);
        let want = self.pol.state(&self.theory.calc().int_pair(self.theory.field(BfField::Rho), &self.theory.calc().d(self.theory.field(BfField::B))))?;
        out.push(Check::zero(tag("Omega(1) = int rho dB"), "bf-quantum:constant-state", &(&on_one - &want)));
        let (w, z) = self.check_and_shift()?;
        out.push(op_zero(
            &tag("q(S_check) + [Omega, Z] = Omega_res"),
            "bf-quantum:gauge-shift",
            &w.add(&self.omega.commutator(&z)?).sub(&self.omega_res),
        ));
        for mut c in check_descent(&w, &self.omega, None)? {
            c.name = tag(&c.name);
            out.push(c);
        }
        let zero = FormalOperator::zero(&self.pol);
        for mut c in shift_check(&w, &z, &self.omega, &zero, &zero)? {
            c.name = tag(&c.name);
            out.push(c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(spec: &str) -> QuantumBf {
        QuantumBf::build(&SurfaceSpec::parse(spec).unwrap()).unwrap()
    }

    fn assert_all(cs: &[Check]) {
        for c in cs {
            assert!(c.pass, "{}", c);
        }
    }

    #[test]
    fn cohomology_model_identities() {
        assert_all(&build("torus_h").checks(Some(3)).unwrap());
    }

    #[test]
    fn fourier_model_identities() {
        assert_all(&build("torus_fourier(1, all)").checks(None).unwrap());
    }

    #[test]
    fn omega_res_has_second_order_part() {
        let q = build("torus_h");
        assert_eq!(q.omega_res.hbar_order(), 2);
        assert_eq!(q.omega.hbar_order(), 1);
        assert_eq!(q.omega.degree(), Some(1));
        assert_eq!(q.omega_res.degree(), Some(1));
    }

    #[test]
    fn perturbed_residual_fails_descent() {
        let q = build("torus_h");
        let tau0 = q.theory.leaf_generators(BfField::Tau)[0];
        let id = q.theory.alg().generator(tau0).id.clone();
        let t = crate::galg::Poly::var(q.pol.leaf_algebra(), &id).unwrap();
        let bad = q.omega_res.add(&FormalOperator::multiplication(&q.pol, &t).unwrap());
        let cs = check_descent(&bad, &q.omega, None).unwrap();
        assert!(!cs[0].pass);
    }
}
