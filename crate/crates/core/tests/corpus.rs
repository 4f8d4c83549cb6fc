//! Replays the fuzz seeds through the same checks the fuzz targets make.

use std::collections::HashMap;
use std::path::PathBuf;

use darboux_core::parse::{parse_param, parse_poly};
use darboux_core::poly::Vars;
use darboux_core::rational::{frac, parse_rational};
use darboux_core::system::PlanarSystem;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty(), "{}", dir.display());
    paths.into_iter().filter_map(|p| String::from_utf8(std::fs::read(p).unwrap()).ok()).collect()
}

#[test]
fn poly_seeds_round_trip() {
    let mut params = HashMap::new();
    params.insert("p".to_string(), frac(-3, 2));
    let mut parsed = 0;
    for text in seeds("parse_poly") {
        if let Ok(f) = parse_poly(&text, Vars::XY, &params) {
            assert_eq!(parse_poly(&f.render(), Vars::XY, &params).unwrap(), f, "{text}");
            parsed += 1;
        }
    }
    assert!(parsed >= 5);
}

#[test]
fn rational_seeds_round_trip() {
    for text in seeds("parse_rational") {
        if let Some(r) = parse_rational(&text) {
            assert_eq!(parse_rational(&r.to_string()), Some(r), "{text}");
        }
        let _ = parse_param(&text);
    }
}

#[test]
fn system_seeds_load_or_fail_cleanly() {
    let ok = seeds("system_json").iter().filter(|t| PlanarSystem::from_json(t).is_ok()).count();
    assert_eq!(ok, 3);
}
