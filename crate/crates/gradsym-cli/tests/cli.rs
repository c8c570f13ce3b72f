use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gradsym"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

#[test]
fn passing_spec_exits_zero_and_writes_both_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let st = bin().arg("--spec").arg(spec("se2_inline.toml")).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["target"], "se2_inline");
    assert!(std::fs::read_to_string(out.with_extension("txt")).unwrap().contains("passed"));
}

#[test]
fn failing_check_exits_one() {
    let st = bin().args(["--target", "se2_nested", "--stage", "cohomology", "--max-degree", "2"]).output().unwrap().status;
    assert_eq!(st.code(), Some(1));
}

#[test]
fn spec_error_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "target = \"abelian\"\nstages = [\"bfv\", \"validate\"]\n").unwrap();
    let o = bin().arg("--spec").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("2:11:"));
}

#[test]
fn missing_spec_file_exits_three() {
    let st = bin().args(["--spec", "/nonexistent/spec.toml"]).output().unwrap().status;
    assert_eq!(st.code(), Some(3));
}

#[test]
fn seed_flag_reaches_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = bin().args(["--target", "abelian", "--stage", "quantize", "--seed", "42", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 42);
}

#[test]
fn shipped_specs_parse() {
    for entry in std::fs::read_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs")).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(gradsym_cli::parse_spec(&text).is_ok(), "{}", p.display());
    }
}

#[test]
fn report_matches_schema_fields() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../report.schema.json")).unwrap();
    let spec = gradsym_cli::parse_spec("target = \"abelian\"\nstages = [\"validate\"]\n").unwrap();
    let v: serde_json::Value = serde_json::from_str(&gradsym_cli::run(&spec).to_json()).unwrap();
    let top: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap()).collect();
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), top.len());
    for k in top {
        assert!(obj.contains_key(k), "{}", k);
    }
    let row_keys = schema["properties"]["checks"]["items"]["required"].as_array().unwrap();
    for row in v["checks"].as_array().unwrap() {
        assert_eq!(row.as_object().unwrap().len(), row_keys.len());
        for k in row_keys {
            assert!(row.get(k.as_str().unwrap()).is_some());
        }
    }
}
