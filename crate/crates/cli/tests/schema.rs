use serde_json::{json, Value};

use darboux_cli::config::Config;
use darboux_cli::report::{analyze, gamma_probe, Input};
use darboux_core::rational::{frac, int};
use darboux_core::system::PlanarSystem;

fn schema() -> Value {
    serde_json::from_str(include_str!("../schema/analysis-report.schema.json")).unwrap()
}

fn check(schema: &Value, doc: &Value) -> Vec<String> {
    let v = jsonschema::validator_for(schema).expect("schema compiles");
    v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect()
}

fn report_json(input: Input) -> Value {
    serde_json::from_str(&analyze(&input, &Config::default()).to_json()).unwrap()
}

#[test]
fn family_reports_validate() {
    let s = schema();
    for p in [int(1), int(0), int(-1), frac(1, 2), int(-2)] {
        let doc = report_json(Input::Family(p.clone()));
        assert_eq!(check(&s, &doc), Vec::<String>::new(), "p = {p}");
    }
}

#[test]
fn reports_with_issues_validate() {
    let s = schema();
    for (p, q) in [("x + x^3 + x*y^2", "y + x^2*y + y^3"), ("x + x^2", "y"), ("x", "y")] {
        let desc = json!({ "p_comp": p, "q_comp": q }).to_string();
        let sys = PlanarSystem::from_json(&desc).unwrap();
        let doc = report_json(Input::System(sys));
        assert_eq!(check(&s, &doc), Vec::<String>::new(), "{p}, {q}");
    }
}

#[test]
fn gamma_probe_report_validates() {
    let mut s = schema();
    s["$ref"] = json!("#/$defs/gamma_probe_report");
    for key in ["required", "properties", "additionalProperties", "type"] {
        s.as_object_mut().unwrap().remove(key);
    }
    let cfg = Config::default();
    for algebraic in [false, true] {
        let r = gamma_probe(120, (0.3, 2.5), 6, algebraic, &cfg).unwrap();
        let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(check(&s, &doc), Vec::<String>::new());
    }
}

#[test]
fn schema_rejects_tampering() {
    let s = schema();
    let good = report_json(Input::Family(int(1)));
    let mut extra = good.clone();
    extra["unexpected"] = json!(1);
    let mut tag = good.clone();
    tag["finite_equilibria"][0]["tag"] = json!("whirlpool");
    let mut hash = good.clone();
    hash["config_hash"] = json!("abc");
    let mut missing = good;
    missing.as_object_mut().unwrap().remove("issues");
    for doc in [extra, tag, hash, missing] {
        assert!(!check(&s, &doc).is_empty());
    }
}
