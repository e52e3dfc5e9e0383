#![no_main]

use std::sync::{Arc, OnceLock};

use hardy_lane_emden::grid::io::field_from_csv;
use hardy_lane_emden::grid::{build_domain, GridDomain, ShapeSpec};
use libfuzzer_sys::fuzz_target;

fn domain() -> &'static Arc<GridDomain> {
    static D: OnceLock<Arc<GridDomain>> = OnceLock::new();
    D.get_or_init(|| build_domain(&ShapeSpec::unit_ball(2), 0.25).unwrap())
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = field_from_csv(domain(), text);
    }
});
