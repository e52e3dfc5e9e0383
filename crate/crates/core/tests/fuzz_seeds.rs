//! Feeds the checked-in fuzz corpus through the decoders.

use std::fs;
use std::path::PathBuf;

use hardy_lane_emden::config::RunConfig;
use hardy_lane_emden::grid::io::{field_from_csv, FieldSidecar};
use hardy_lane_emden::grid::{build_domain, ShapeSpec};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("config_parse") {
        let r = RunConfig::parse(&text, None);
        assert_eq!(r.is_ok(), name != "broken.toml", "{name}: {r:?}");
    }
}

#[test]
fn field_csv_seeds() {
    let domain = build_domain(&ShapeSpec::unit_ball(2), 0.25).unwrap();
    for (name, text) in seeds("field_csv") {
        let r = field_from_csv(&domain, &text);
        assert_eq!(r.is_ok(), name == "disk_quarter.csv", "{name}");
    }
}

#[test]
fn sidecar_seeds() {
    for (name, text) in seeds("sidecar_json") {
        let r = FieldSidecar::from_json(&text);
        assert_eq!(r.is_ok(), name != "bad_version.json", "{name}: {r:?}");
    }
}
