//! Round trips and malformed input for field files.

use std::sync::Arc;

use hardy_lane_emden::grid::io::{field_from_csv, field_to_csv, read_field, write_field, FieldSidecar};
use hardy_lane_emden::grid::{build_domain, GridDomain, ScalarField, ShapeSpec};
use proptest::prelude::*;

fn square() -> Arc<GridDomain> {
    build_domain(&ShapeSpec::rectangle(vec![0.0, 0.0], vec![1.0, 1.0]), 0.125).unwrap()
}

proptest! {
    #[test]
    fn files_round_trip_exactly(values in proptest::collection::vec(-1e12f64..1e12, 49)) {
        let domain = square();
        prop_assert_eq!(domain.len(), 49);
        let f = ScalarField::new(&domain, values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let sidecar = FieldSidecar::for_field(&f).with_label("random");
        let (csv, _) = write_field(dir.path(), "f", &f, &sidecar).unwrap();
        let (g, sc) = read_field(&csv).unwrap();
        prop_assert_eq!(f.values(), g.values());
        prop_assert_eq!(sc, sidecar);
    }

    #[test]
    fn csv_decoder_never_panics(text in "\\PC{0,400}") {
        let _ = field_from_csv(&square(), &text);
    }

    #[test]
    fn sidecar_decoder_never_panics(text in "\\PC{0,400}") {
        let _ = FieldSidecar::from_json(&text);
    }

    #[test]
    fn shuffled_rows_decode_to_the_same_field(seed in any::<u64>()) {
        let domain = square();
        let f = ScalarField::from_fn(&domain, |x| x[0] - 2.0 * x[1]).unwrap();
        let csv = field_to_csv(&f);
        let mut lines: Vec<&str> = csv.lines().collect();
        let header = lines.remove(0);
        let mut s = seed | 1;
        for i in (1..lines.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            lines.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let text = std::iter::once(header).chain(lines).collect::<Vec<_>>().join("\n");
        let g = field_from_csv(&domain, &text).unwrap();
        prop_assert_eq!(f.values(), g.values());
    }
}

#[test]
fn truncated_csv_is_rejected() {
    let domain = square();
    let csv = field_to_csv(&ScalarField::constant(&domain, 1.0));
    let short: String = csv.lines().take(10).collect::<Vec<_>>().join("\n");
    assert!(field_from_csv(&domain, &short).is_err());
}
