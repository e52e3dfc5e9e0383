//! Test fields for quadratic-form checks, all vanishing near the mask boundary.

use serde::Serialize;

use crate::error::Result;
use crate::grid::ScalarField;
use crate::lane_emden::LaneEmdenDensity;
use crate::rng::XorShift64Star;

/// Test fields vanish on nodes with boundary depth at most this value.
pub const SUPPORT_MARGIN: u32 = 2;
/// Number of seeded random fields in the default corpus.
pub const RANDOM_FIELDS: usize = 20;
const GAUSSIANS_PER_FIELD: usize = 4;

/// A named test field.
#[derive(Debug, Clone)]
pub struct TestField {
    pub id: String,
    pub field: ScalarField,
}

/// Corpus member names in generation order.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub seed: u64,
    pub ids: Vec<String>,
}

/// Zeroes `f` on nodes within [`SUPPORT_MARGIN`] layers of the boundary.
pub fn mask_support(f: &ScalarField) -> ScalarField {
    let depth = f.domain().boundary_depth();
    let vals = f
        .values()
        .iter()
        .zip(&depth)
        .map(|(v, &d)| if d <= SUPPORT_MARGIN { 0.0 } else { *v })
        .collect();
    ScalarField::new(f.domain(), vals).expect("masked values stay finite")
}

/// `eigenfunction`, `density`, four tensor bumps, and `random` seeded Gaussian mixtures.
pub fn build_corpus(
    density: &LaneEmdenDensity,
    eigenfunction: &ScalarField,
    seed: u64,
    random: usize,
) -> Result<Vec<TestField>> {
    let w = &density.field;
    let domain = w.domain();
    let dim = domain.dim();
    let mut out = vec![
        TestField {
            id: "eigenfunction".into(),
            field: mask_support(eigenfunction),
        },
        TestField {
            id: "density".into(),
            field: mask_support(w),
        },
    ];

    let (center_node, wmax) = w.argmax();
    let c = domain.coords(center_node);
    let feature = domain.shape().min_feature();
    let r = 0.35 * feature;
    let offsets: [(usize, f64); 4] = [(0, 0.0), (0, 0.25), (dim - 1, -0.25), (0, -0.15)];
    for (k, (axis, off)) in offsets.iter().enumerate() {
        let mut center = c;
        center[*axis] += off * feature;
        let field = ScalarField::from_fn(domain, |x| {
            let mut v = 1.0;
            for j in 0..dim {
                let t = (x[j] - center[j]) / r;
                v *= (1.0 - t * t).max(0.0).powi(2);
            }
            v
        })?;
        out.push(TestField {
            id: format!("bump-{k}"),
            field: mask_support(&field),
        });
    }

    let mut rng = XorShift64Star::new(seed);
    for k in 0..random {
        let mut centers = Vec::with_capacity(GAUSSIANS_PER_FIELD);
        for _ in 0..GAUSSIANS_PER_FIELD {
            let node = rng.below(domain.len());
            let sigma = rng.uniform(0.05, 0.2) * feature;
            let amp = rng.uniform(-1.0, 1.0);
            centers.push((domain.coords(node), sigma, amp));
        }
        let vals = (0..domain.len())
            .map(|i| {
                let x = domain.coords(i);
                let g: f64 = centers
                    .iter()
                    .map(|(p, s, a)| {
                        let d2: f64 = (0..dim).map(|j| (x[j] - p[j]).powi(2)).sum();
                        a * (-d2 / (2.0 * s * s)).exp()
                    })
                    .sum();
                g * w.values()[i] / wmax
            })
            .collect();
        out.push(TestField {
            id: format!("random-{k:02}"),
            field: mask_support(&ScalarField::new(domain, vals)?),
        });
    }
    Ok(out)
}
