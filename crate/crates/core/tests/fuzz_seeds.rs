//! Replays the checked-in fuzz corpus through the parsers with the same
//! round-trip assertions the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use divfilt::intersection::IntersectionForm;
use divfilt::monomial::{build_in, SigmaFiltration};
use divfilt::picard::{curve_from_json, qn_sequence};
use divfilt::quadfield::{format_rational, parse_rational, quad_from_json};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.display().to_string(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_rational_seeds() {
    let mut ok = 0;
    for (_, s) in seeds("parse_rational") {
        if let Ok(r) = parse_rational(&s) {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
            ok += 1;
        }
    }
    assert!(ok > 0);
}

#[test]
fn quad_json_seeds() {
    for (name, s) in seeds("quad_json") {
        if let Ok(x) = quad_from_json(&s) {
            let back = serde_json::to_string(&x).unwrap();
            assert_eq!(quad_from_json(&back).unwrap(), x, "{name}");
        }
    }
}

#[test]
fn intersection_json_seeds() {
    for (name, s) in seeds("intersection_json") {
        if let Ok(form) = IntersectionForm::from_json(&s) {
            assert_eq!(IntersectionForm::from_json(&form.to_json()).unwrap(), form, "{name}");
        }
    }
}

#[test]
fn sigma_json_seeds() {
    for (name, s) in seeds("sigma_json") {
        if let Ok(f) = SigmaFiltration::from_json(&s) {
            for n in 1..=f.len().min(8) {
                let ideal = build_in(&f, n).unwrap();
                assert_eq!(ideal.min_gens_count() as u64, f.sigma(n).unwrap() + 2, "{name}");
            }
        }
    }
}

#[test]
fn curve_json_seeds() {
    let mut parsed = 0;
    for (name, s) in seeds("curve_json") {
        if let Ok(input) = curve_from_json(&s) {
            parsed += 1;
            let c = &input.curve;
            for pt in qn_sequence(c, &input.p, &input.q, 4) {
                assert!(c.contains(&pt), "{name}");
            }
        }
    }
    assert!(parsed >= 3);
}
