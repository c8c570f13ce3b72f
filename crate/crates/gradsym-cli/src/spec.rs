//! Run specifications: a TOML document of `key = value` lines and `[section]` tables.
//!
//! ```toml
//! target = "se2_nested"              # registry key, "inline", or "bf_<surface model>"
//! stages = ["validate", "bfv"]       # optional; defaults to every stage the target supports
//! max_degree = 4
//! tol = 1e-8
//! seed = 0
//!
//! [system]                           # only with target = "inline"
//! name = "toy"
//! dim = 2                            # cotangent chart q1..qn, p1..pn
//! phi = ["q1 p2 - q2 p1"]
//! psi = ["p1", "p2"]
//! g = [[1, 1, 2, 1], [1, 2, 1, -1]]  # 1-based [i, j, k, value]; values may be "a/b"
//! ```

use gradsym::bfv::{cotangent_chart, registry, ConstraintSystem, Tensor3, REGISTRY_KEYS};
use gradsym::galg::{parse_poly, rat, Algebra, Generator, Rat};
use gradsym::gravity::dga::SurfaceSpec;
use gradsym::gravity::eh::EhConfig;
use gradsym::phase::PhaseChart;
use serde::Deserialize;
use std::fmt;
use std::ops::Range;
use toml::Spanned;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Validate,
    Bfv,
    Double,
    Cohomology,
    Quantize,
    Gravity,
}

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Validate, Stage::Bfv, Stage::Double, Stage::Cohomology, Stage::Quantize, Stage::Gravity];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Validate => "validate",
            Stage::Bfv => "bfv",
            Stage::Double => "double",
            Stage::Cohomology => "cohomology",
            Stage::Quantize => "quantize",
            Stage::Gravity => "gravity",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.name() == s)
    }

    /// Direct prerequisite.
    pub fn requires(self) -> Option<Stage> {
        match self {
            Stage::Validate | Stage::Gravity => None,
            Stage::Bfv => Some(Stage::Validate),
            Stage::Double | Stage::Cohomology => Some(Stage::Bfv),
            Stage::Quantize => Some(Stage::Double),
        }
    }

    /// All transitive prerequisites.
    pub fn ancestors(self) -> Vec<Stage> {
        let mut out = Vec::new();
        let mut cur = self.requires();
        while let Some(s) = cur {
            out.push(s);
            cur = s.requires();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    /// Constraint system from the registry or an inline block.
    System(ConstraintSystem),
    /// BF theory on a surface model; the string is the selector after `bf_`.
    Bf(String, SurfaceSpec),
}

impl Target {
    pub fn supports(&self, s: Stage) -> bool {
        match self {
            Target::System(_) => s != Stage::Gravity,
            Target::Bf(..) => s != Stage::Cohomology,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Target::System(c) => c.name.clone(),
            Target::Bf(sel, _) => format!("bf_{}", sel),
        }
    }
}

/// Fully resolved run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub target: Target,
    /// Requested stages closed under prerequisites, in pipeline order.
    pub stages: Vec<Stage>,
    pub max_degree: u32,
    pub tol: f64,
    pub seed: u64,
    pub mutations: usize,
    pub window: u32,
    pub shift_samples: usize,
    pub numerics: EhConfig,
    pub out: Option<String>,
    /// Write measured wall times into the structured report (breaks byte-identity).
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "command line: {}", self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecErrors(pub Vec<SpecError>);

impl fmt::Display for SpecErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", e)?;
        }
        Ok(())
    }
}

impl std::error::Error for SpecErrors {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    target: Spanned<String>,
    stages: Option<Vec<Spanned<String>>>,
    max_degree: Option<u32>,
    tol: Option<f64>,
    seed: Option<u64>,
    mutations: Option<usize>,
    out: Option<String>,
    timings: Option<bool>,
    numerics: Option<RawNumerics>,
    quantum: Option<RawQuantum>,
    system: Option<Spanned<RawSystem>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    frame_samples: Option<usize>,
    structure_samples: Option<usize>,
    horizon: Option<f64>,
    step: Option<f64>,
    frame_tol: Option<f64>,
    drift_tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuantum {
    window: Option<u32>,
    shift_samples: Option<usize>,
}

type RawEntry = Spanned<Vec<Spanned<toml::Value>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    name: Option<String>,
    dim: Option<Spanned<usize>>,
    chart: Option<Spanned<Vec<(String, String)>>>,
    phi: Vec<Spanned<String>>,
    psi: Vec<Spanned<String>>,
    f: Option<Vec<RawEntry>>,
    h: Option<Vec<RawEntry>>,
    g: Option<Vec<RawEntry>>,
    m: Option<Vec<RawEntry>>,
}

struct Locator<'a> {
    text: &'a str,
    errors: Vec<SpecError>,
}

impl Locator<'_> {
    fn at(&self, offset: usize, message: impl Into<String>) -> SpecError {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SpecError { line, column, message: message.into() }
    }

    fn push(&mut self, span: Range<usize>, message: impl Into<String>) {
        let e = self.at(span.start, message);
        self.errors.push(e);
    }
}

/// Stage closure and order check: a listed stage may not precede one of its prerequisites.
/// `spans` locates each entry; `None` means the names came from the command line.
fn resolve_stages(names: &[(String, Option<Range<usize>>)], target: &Target, loc: &mut Locator) -> Vec<Stage> {
    let err = |span: &Option<Range<usize>>, msg: String, loc: &mut Locator| match span {
        Some(s) => loc.push(s.clone(), msg),
        None => loc.errors.push(SpecError { line: 0, column: 0, message: msg }),
    };
    let mut listed: Vec<(Stage, Option<Range<usize>>)> = Vec::new();
    for (name, span) in names {
        match Stage::parse(name) {
            None => {
                let known: Vec<&str> = Stage::ALL.iter().map(|s| s.name()).collect();
                err(span, format!("unknown stage `{}` (expected one of {})", name, known.join(", ")), loc);
            }
            Some(s) if listed.iter().any(|(t, _)| *t == s) => err(span, format!("stage `{}` listed twice", name), loc),
            Some(s) if !target.supports(s) => {
                err(span, format!("stage `{}` does not apply to target `{}`", name, target.label()), loc)
            }
            Some(s) => listed.push((s, span.clone())),
        }
    }
    for (i, (s, span)) in listed.iter().enumerate() {
        for (later, _) in &listed[i + 1..] {
            if s.ancestors().contains(later) {
                err(span, format!("cyclic stage order: `{}` must come after its prerequisite `{}`", s.name(), later.name()), loc);
            }
        }
    }
    let mut out: Vec<Stage> = listed.iter().flat_map(|(s, _)| std::iter::once(*s).chain(s.ancestors())).collect();
    out.sort();
    out.dedup();
    out
}

fn default_stages(target: &Target) -> Vec<Stage> {
    Stage::ALL.into_iter().filter(|s| target.supports(*s)).collect()
}

fn parse_value(v: &toml::Value) -> Option<Rat> {
    match v {
        toml::Value::Integer(n) => Some(rat(*n, 1)),
        toml::Value::String(s) => {
            let (n, d) = s.split_once('/').unwrap_or((s.as_str(), "1"));
            let (n, d) = (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?);
            (d != 0).then(|| rat(n, d))
        }
        _ => None,
    }
}

fn build_tensor(name: &str, raw: Option<Vec<RawEntry>>, dims: [usize; 3], alg: &std::sync::Arc<Algebra>, loc: &mut Locator) -> Tensor3 {
    let mut entries = Vec::new();
    for entry in raw.unwrap_or_default() {
        let span = entry.span();
        let items = entry.into_inner();
        if items.len() != 4 {
            loc.push(span, format!("bad tensor shape: `{}` entries are [i, j, k, value], found {} items", name, items.len()));
            continue;
        }
        let mut ix = [0usize; 3];
        let mut ok = true;
        for (slot, item) in items[..3].iter().enumerate() {
            match item.get_ref() {
                toml::Value::Integer(n) if *n >= 1 && (*n as usize) <= dims[slot] => ix[slot] = *n as usize - 1,
                v => {
                    loc.push(item.span(), format!("malformed tensor index `{}` in `{}`: position {} expects 1..={}", v, name, slot + 1, dims[slot]));
                    ok = false;
                }
            }
        }
        match parse_value(items[3].get_ref()) {
            Some(v) if ok => entries.push((ix, v)),
            Some(_) => {}
            None => loc.push(items[3].span(), format!("tensor value `{}` is not an integer or \"a/b\" rational", items[3].get_ref())),
        }
    }
    Tensor3::from_entries(alg, dims, &entries)
}

fn build_system(raw: Spanned<RawSystem>, loc: &mut Locator) -> Option<ConstraintSystem> {
    let span = raw.span();
    let raw = raw.into_inner();
    let chart = match (&raw.chart, &raw.dim) {
        (Some(c), None) => {
            let pairs = c.get_ref();
            let gens: Vec<Generator> = pairs.iter().map(|(q, _)| q).chain(pairs.iter().map(|(_, p)| p)).map(|s| Generator::new(s.clone(), 0)).collect();
            let built = Algebra::new(gens).map_err(|e| e.to_string()).and_then(|alg| {
                let refs: Vec<(&str, &str)> = pairs.iter().map(|(q, p)| (q.as_str(), p.as_str())).collect();
                PhaseChart::new(&alg, &refs).map_err(|e| e.to_string())
            });
            match built {
                Ok(ch) => ch,
                Err(e) => {
                    loc.push(c.span(), format!("invalid chart: {}", e));
                    return None;
                }
            }
        }
        (None, Some(d)) if *d.get_ref() > 0 => cotangent_chart(*d.get_ref()),
        (None, Some(d)) => {
            loc.push(d.span(), "dim must be positive");
            return None;
        }
        _ => {
            loc.push(span, "system block needs exactly one of `dim` or `chart`");
            return None;
        }
    };
    let alg = chart.algebra().clone();
    let polys = |list: &[Spanned<String>], loc: &mut Locator| -> Vec<_> {
        list.iter()
            .filter_map(|s| match parse_poly::<Rat>(&alg, s.get_ref()) {
                Ok(p) => Some(p),
                Err(e) => {
                    loc.push(s.span(), format!("bad constraint `{}`: {}", s.get_ref(), e));
                    None
                }
            })
            .collect()
    };
    let phi = polys(&raw.phi, loc);
    let psi = polys(&raw.psi, loc);
    let (l1, l2) = (raw.phi.len(), raw.psi.len());
    let f = build_tensor("f", raw.f, [l1, l1, l1], &alg, loc);
    let h = build_tensor("h", raw.h, [l2, l2, l2], &alg, loc);
    let g = build_tensor("g", raw.g, [l1, l2, l2], &alg, loc);
    let m = build_tensor("m", raw.m, [l1, l2, l1], &alg, loc);
    if phi.len() != l1 || psi.len() != l2 {
        return None;
    }
    let name = raw.name.unwrap_or_else(|| "inline".into());
    match ConstraintSystem::new(&name, chart, phi, psi, f, h, g, m) {
        Ok(c) => Some(c),
        Err(e) => {
            loc.push(span, e.to_string());
            None
        }
    }
}

fn resolve_target(raw: &Spanned<String>, system: Option<Spanned<RawSystem>>, loc: &mut Locator) -> Option<Target> {
    let key = raw.get_ref().as_str();
    let sys_span = system.as_ref().map(|s| s.span());
    if key != "inline" {
        if let Some(s) = sys_span {
            loc.push(s, format!("[system] block given but target is `{}`; use target = \"inline\"", key));
        }
    }
    if key == "inline" {
        return match system {
            Some(s) => build_system(s, loc).map(Target::System),
            None => {
                loc.push(raw.span(), "target `inline` needs a [system] block");
                None
            }
        };
    }
    if let Some(sel) = key.strip_prefix("bf_") {
        return match SurfaceSpec::parse(sel) {
            Ok(s) => Some(Target::Bf(sel.to_string(), s)),
            Err(e) => {
                loc.push(raw.span(), e.to_string());
                None
            }
        };
    }
    match registry(key) {
        Ok(c) => Some(Target::System(c)),
        Err(_) => {
            loc.push(raw.span(), format!("unknown target `{}` (registry: {}; or `inline`, `bf_torus_h`, `bf_torus_fourier(N, support)`)", key, REGISTRY_KEYS.join(", ")));
            None
        }
    }
}

/// Parses and resolves a spec document; every problem found is reported with its position.
pub fn parse_spec(text: &str) -> Result<RunSpec, SpecErrors> {
    let mut loc = Locator { text, errors: Vec::new() };
    let raw: RawSpec = match toml::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            let start = e.span().map_or(0, |s| s.start);
            let msg = e.message().trim().to_string();
            return Err(SpecErrors(vec![loc.at(start, msg)]));
        }
    };
    let target = resolve_target(&raw.target, raw.system, &mut loc);
    let stages = match (&target, &raw.stages) {
        (Some(t), Some(list)) => {
            let names: Vec<(String, Option<Range<usize>>)> = list.iter().map(|s| (s.get_ref().clone(), Some(s.span()))).collect();
            resolve_stages(&names, t, &mut loc)
        }
        (Some(t), None) => default_stages(t),
        (None, _) => Vec::new(),
    };
    let (Some(target), true) = (target, loc.errors.is_empty()) else {
        return Err(SpecErrors(loc.errors));
    };
    let d = EhConfig::default();
    let tol = raw.tol.unwrap_or(1e-8);
    let n = raw.numerics.unwrap_or(RawNumerics {
        frame_samples: None,
        structure_samples: None,
        horizon: None,
        step: None,
        frame_tol: None,
        drift_tol: None,
    });
    let q = raw.quantum.unwrap_or(RawQuantum { window: None, shift_samples: None });
    Ok(RunSpec {
        target,
        stages,
        max_degree: raw.max_degree.unwrap_or(4),
        tol,
        seed: raw.seed.unwrap_or(0),
        mutations: raw.mutations.unwrap_or(16),
        window: q.window.unwrap_or(4),
        shift_samples: q.shift_samples.unwrap_or(5),
        numerics: EhConfig {
            frame_samples: n.frame_samples.unwrap_or(d.frame_samples),
            structure_samples: n.structure_samples.unwrap_or(d.structure_samples),
            horizon: n.horizon.unwrap_or(d.horizon),
            step: n.step.unwrap_or(d.step),
            frame_tol: n.frame_tol.unwrap_or(d.frame_tol),
            drift_tol: n.drift_tol.unwrap_or(d.drift_tol),
            structure_tol: tol,
        },
        out: raw.out,
        timings: raw.timings.unwrap_or(false),
    })
}

impl RunSpec {
    /// Spec with default settings for a target given by key, as on the command line.
    pub fn for_target(key: &str) -> Result<RunSpec, SpecErrors> {
        let text = format!("target = {}", toml::Value::String(key.to_string()));
        parse_spec(&text).map_err(|SpecErrors(es)| {
            SpecErrors(es.into_iter().map(|e| SpecError { line: 0, column: 0, message: e.message }).collect())
        })
    }

    /// Replaces the stage list with names given on the command line.
    pub fn with_stages(mut self, names: &[String]) -> Result<RunSpec, SpecErrors> {
        let mut loc = Locator { text: "", errors: Vec::new() };
        let named: Vec<(String, Option<Range<usize>>)> = names.iter().map(|n| (n.clone(), None)).collect();
        self.stages = resolve_stages(&named, &self.target, &mut loc);
        if loc.errors.is_empty() {
            Ok(self)
        } else {
            Err(SpecErrors(loc.errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gradsym::bfv::se2_nested;

    #[test]
    fn minimal_spec_gets_defaults() {
        let s = parse_spec("target = \"se2_nested\"\nstages = [\"validate\",\"bfv\"]\n").unwrap();
        assert_eq!(s.stages, vec![Stage::Validate, Stage::Bfv]);
        assert_eq!(s.max_degree, 4);
        assert_eq!(s.tol, 1e-8);
        assert_eq!(s.target, Target::System(se2_nested()));
    }

    #[test]
    fn inline_system_round_trips() {
        let text = r#"target = "inline"
[system]
name = "se2_nested"
dim = 2
phi = ["q1 p2 - q2 p1"]
psi = ["p1", "p2"]
g = [[1, 1, 2, 1], [1, 2, 1, "-1"]]
"#;
        let s = parse_spec(text).unwrap();
        assert_eq!(s.target, Target::System(se2_nested()));
    }

    #[test]
    fn malformed_index_is_located() {
        let text = "target = \"inline\"\n[system]\ndim = 2\nphi = [\"p1\"]\npsi = [\"p2\"]\ng = [[1, 1, 3, 1]]\n";
        let e = parse_spec(text).unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!((e.0[0].line, e.0[0].column), (6, 13));
        assert!(e.0[0].message.contains("malformed tensor index"));
    }

    #[test]
    fn bad_tensor_shape_is_located() {
        let text = "target = \"inline\"\n[system]\ndim = 2\nphi = [\"p1\"]\npsi = [\"p2\"]\nm = [[1, 1, 1]]\n";
        let e = parse_spec(text).unwrap_err();
        assert_eq!((e.0[0].line, e.0[0].column), (6, 6));
        assert!(e.0[0].message.contains("bad tensor shape"));
    }

    #[test]
    fn unknown_key_is_located() {
        let e = parse_spec("target = \"abelian\"\ndegree = 3\n").unwrap_err();
        assert_eq!(e.0[0].line, 2);
        assert!(e.0[0].message.contains("unknown field"), "{}", e);
    }

    #[test]
    fn out_of_order_stages_rejected() {
        let e = parse_spec("target = \"abelian\"\nstages = [\"double\", \"bfv\"]\n").unwrap_err();
        assert_eq!((e.0[0].line, e.0[0].column), (2, 11));
        assert!(e.0[0].message.contains("cyclic stage order"));
    }

    #[test]
    fn prerequisites_are_added() {
        let s = parse_spec("target = \"abelian\"\nstages = [\"quantize\"]\n").unwrap();
        assert_eq!(s.stages, vec![Stage::Validate, Stage::Bfv, Stage::Double, Stage::Quantize]);
    }

    #[test]
    fn stage_target_mismatch_rejected() {
        assert!(parse_spec("target = \"abelian\"\nstages = [\"gravity\"]\n").is_err());
        assert!(parse_spec("target = \"bf_torus_h\"\nstages = [\"cohomology\"]\n").is_err());
        let s = parse_spec("target = \"bf_torus_fourier(1, all)\"\n").unwrap();
        assert!(s.stages.contains(&Stage::Gravity));
    }

    #[test]
    fn unknown_target_rejected() {
        let e = parse_spec("target = \"nope\"\n").unwrap_err();
        assert_eq!((e.0[0].line, e.0[0].column), (1, 10));
    }

    #[test]
    fn command_line_stages() {
        let s = RunSpec::for_target("so3").unwrap().with_stages(&["cohomology".into()]).unwrap();
        assert_eq!(s.stages, vec![Stage::Validate, Stage::Bfv, Stage::Cohomology]);
        let e = RunSpec::for_target("so3").unwrap().with_stages(&["bogus".into()]).unwrap_err();
        assert_eq!(e.0[0].line, 0);
    }
}
