//! Stage execution. Stages run in pipeline order; a stage whose prerequisite failed is
//! recorded as skipped.

use crate::report::{Report, Row, Status};
use crate::spec::{RunSpec, Stage, Target};
use gradsym::bfv::{
    abelian_residual, build_bfv, h0_truncated, invariant_oracle, se2_residual, tensor_mutations, validate_structure,
    BfvData, ConstraintSystem, Jml,
};
use gradsym::check::{all_pass, Check};
use gradsym::dbfv::{residual_bfv_compare, DoubleBfv};
use gradsym::gravity::bf::BfTheory;
use gradsym::gravity::dga::{validate_dga, SurfaceSpec};
use gradsym::gravity::eh::numerics_checks;
use gradsym::gravity::quantum::QuantumBf;
use gradsym::gravity::so21::so21_checks;
use gradsym::quant::double_quantum_checks;
use std::collections::BTreeSet;
use std::time::Instant;

type StageResult = Result<Vec<Check>, String>;

fn error_check(stage: Stage, e: impl std::fmt::Display) -> Check {
    Check::new(format!("{} stage completes", stage.name()), "pipeline:error", false, e.to_string())
}

/// Every single-entry mutation of the structure tensors must break the structure identities.
fn mutation_check(c: &ConstraintSystem, limit: usize) -> Check {
    let muts = tensor_mutations(c, limit);
    let survivors: Vec<String> = muts
        .iter()
        .filter(|(_, m)| validate_structure(m).map(|cs| all_pass(&cs)).unwrap_or(false))
        .map(|(k, _)| k.clone())
        .collect();
    Check::new(
        format!("{} single-entry tensor mutations rejected [{}]", muts.len(), c.name),
        "structure-identity:mutations",
        survivors.is_empty() && !muts.is_empty(),
        survivors.join(", "),
    )
}

struct SystemRun<'a> {
    spec: &'a RunSpec,
    system: &'a ConstraintSystem,
    bfv: Option<BfvData>,
    double: Option<DoubleBfv>,
}

impl SystemRun<'_> {
    fn stage(&mut self, s: Stage) -> StageResult {
        let err = |e: &dyn std::fmt::Display| e.to_string();
        match s {
            Stage::Validate => {
                let mut out = validate_structure(self.system).map_err(|e| err(&e))?;
                out.push(mutation_check(self.system, self.spec.mutations));
                Ok(out)
            }
            Stage::Bfv => {
                let b = build_bfv(self.system).map_err(|e| err(&e))?;
                let out = b.checks();
                self.bfv = Some(b);
                Ok(out)
            }
            Stage::Double => {
                let b = self.bfv.as_ref().ok_or("missing bfv data")?;
                let mut out = Jml::new(b).map_err(|e| err(&e))?.bracket_suite();
                let d = DoubleBfv::new(b).map_err(|e| err(&e))?;
                out.extend(d.checks());
                let residual = match self.system.name.as_str() {
                    "se2_nested" => Some(se2_residual()),
                    "abelian" => Some(abelian_residual()),
                    _ => None,
                };
                if let Some(r) = residual {
                    out.push(residual_bfv_compare(&d, &r).map_err(|e| err(&e))?);
                }
                self.double = Some(d);
                Ok(out)
            }
            Stage::Cohomology => {
                let b = self.bfv.as_ref().ok_or("missing bfv data")?;
                let mut out = Vec::new();
                for d in 2..=self.spec.max_degree.max(2) {
                    let h = h0_truncated(&b.q, d).map_err(|e| err(&e))?;
                    let o = invariant_oracle(self.system, d);
                    let residual = if h.dim == o { String::new() } else { format!("h0 {} vs oracle {}", h.dim, o) };
                    out.push(Check::new(format!("h0 = invariant oracle (D={}) [{}]", d, self.system.name), "cohomology:h0-oracle", h.dim == o, residual));
                }
                Ok(out)
            }
            Stage::Quantize => {
                let d = self.double.as_ref().ok_or("missing double data")?;
                double_quantum_checks(d, self.spec.seed, self.spec.shift_samples).map_err(|e| err(&e))
            }
            Stage::Gravity => Err("gravity applies to BF targets only".into()),
        }
    }
}

struct BfRun<'a> {
    spec: &'a RunSpec,
    surface: &'a SurfaceSpec,
    theory: Option<BfTheory>,
}

impl BfRun<'_> {
    fn stage(&mut self, s: Stage) -> StageResult {
        let err = |e: &dyn std::fmt::Display| e.to_string();
        match s {
            Stage::Validate => {
                let mut out = validate_dga(&self.surface.model);
                out.extend(so21_checks());
                Ok(out)
            }
            Stage::Bfv => {
                let t = BfTheory::build(self.surface, true).map_err(|e| err(&e))?;
                let out = t.single_checks();
                self.theory = Some(t);
                Ok(out)
            }
            Stage::Double => {
                let t = self.theory.as_ref().ok_or("missing BF theory")?;
                let mut out = t.gauss_checks();
                out.extend(t.double_checks());
                Ok(out)
            }
            Stage::Quantize => {
                let q = QuantumBf::build(self.surface).map_err(|e| err(&e))?;
                q.checks(Some(self.spec.window)).map_err(|e| err(&e))
            }
            Stage::Gravity => numerics_checks(&self.spec.numerics, self.spec.seed).map_err(|e| err(&e)),
            Stage::Cohomology => Err("cohomology applies to constraint-system targets only".into()),
        }
    }
}

/// Runs the requested stages in order.
pub fn run(spec: &RunSpec) -> Report {
    let names = spec.stages.iter().map(|s| s.name().to_string()).collect();
    let mut report = Report::new(spec.target.label(), spec.seed, spec.max_degree, names, spec.timings);
    let mut failed: BTreeSet<Stage> = BTreeSet::new();
    let (mut sys, mut bf) = (None, None);
    match &spec.target {
        Target::System(c) => sys = Some(SystemRun { spec, system: c, bfv: None, double: None }),
        Target::Bf(_, s) => bf = Some(BfRun { spec, surface: s, theory: None }),
    }
    for &stage in &spec.stages {
        if let Some(dep) = stage.ancestors().into_iter().find(|a| failed.contains(a)) {
            failed.insert(stage);
            report.push(Row {
                stage: stage.name().into(),
                check: format!("{} stage", stage.name()),
                anchor: "pipeline:skipped".into(),
                status: Status::Skip,
                residual: format!("prerequisite `{}` failed", dep.name()),
                ms: 0,
            });
            continue;
        }
        let t = Instant::now();
        let result = match (&mut sys, &mut bf) {
            (Some(r), _) => r.stage(stage),
            (_, Some(r)) => r.stage(stage),
            _ => unreachable!("one target kind is set"),
        };
        let ms = t.elapsed().as_millis() as u64;
        let checks = result.unwrap_or_else(|e| vec![error_check(stage, e)]);
        if !all_pass(&checks) {
            failed.insert(stage);
        }
        for c in checks {
            report.push(Row::from_check(stage.name(), c, ms));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    #[test]
    fn abelian_all_stages_pass() {
        let r = run(&parse_spec("target = \"abelian\"\n").unwrap());
        assert!(r.all_pass(), "{}", r.to_table());
        assert_eq!(r.stages.len(), 5);
    }

    #[test]
    fn se2_through_quantize_passes() {
        let spec = parse_spec("target = \"se2_nested\"\nstages = [\"validate\", \"bfv\", \"double\", \"quantize\"]\n").unwrap();
        let r = run(&spec);
        assert!(r.all_pass(), "{}", r.to_table());
    }

    #[test]
    fn failing_stage_skips_dependents() {
        let text = "target = \"inline\"\n[system]\ndim = 2\nphi = [\"q1 p2 - q2 p1\"]\npsi = [\"p1\", \"p2\"]\ng = [[1, 1, 2, 1]]\n";
        let r = run(&parse_spec(text).unwrap());
        assert_eq!(r.exit_code(), 1);
        let skipped: Vec<&str> = r.checks.iter().filter(|c| c.status == Status::Skip).map(|c| c.stage.as_str()).collect();
        assert_eq!(skipped, vec!["bfv", "double", "cohomology", "quantize"]);
    }

    #[test]
    fn runs_are_deterministic() {
        let spec = parse_spec("target = \"so3\"\nseed = 9\nstages = [\"quantize\"]\n").unwrap();
        assert_eq!(run(&spec).to_json(), run(&spec).to_json());
    }
}
