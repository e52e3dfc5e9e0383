use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;

use super::shape::ShapeSpec;
use crate::error::{Error, Result};

/// Marker for "no interior neighbor" in the adjacency table.
pub(crate) const EXTERIOR: u32 = u32::MAX;

/// Smallest boundary-crossing fraction accepted by the stencil closure.
pub const THETA_MIN: f64 = 1e-3;

/// Minimal number of grid spacings across the narrowest feature of a shape.
pub const MIN_SPACINGS: f64 = 4.0;

/// Upper bound on the bounding-box node count of a grid.
pub const MAX_BOX_NODES: usize = 1 << 27;

/// Vectors longer than this are processed in parallel.
pub(crate) const PAR_THRESHOLD: usize = 1 << 14;

/// Uniform-grid discretization of an open set.
///
/// Nodes live on the lattice `h * Z^N` anchored at the origin, so two domains
/// built with the same `h` are always aligned. The discrete Laplacian is the
/// `(2N+1)`-point stencil with zero Dirichlet values; when a stencil arm leaves
/// the set at fraction `theta` of a cell, the exterior value is taken as the
/// linear ghost `-(1 - theta)/theta * u_i`, which only modifies the diagonal.
/// The matrix therefore stays symmetric, positive definite and an M-matrix.
#[derive(Debug)]
pub struct GridDomain {
    shape: ShapeSpec,
    dim: usize,
    h: f64,
    origin: [i64; 3],
    extents: [usize; 3],
    box_index: Vec<u32>,
    lattice: Vec<[i64; 3]>,
    neighbors: Vec<[u32; 6]>,
    diag: Vec<f64>,
}

/// Builds the grid for `spec` with spacing `h`.
pub fn build_domain(spec: &ShapeSpec, h: f64) -> Result<Arc<GridDomain>> {
    GridDomain::build(spec, h).map(Arc::new)
}

impl GridDomain {
    pub fn build(spec: &ShapeSpec, h: f64) -> Result<Self> {
        spec.validate()?;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        let spacings = spec.min_feature() / h;
        if spacings < MIN_SPACINGS {
            return Err(Error::SpacingTooCoarse {
                h,
                spacings,
                required: MIN_SPACINGS,
            });
        }
        let dim = spec.dim();
        let (lo, hi) = spec.bounding_box();
        let mut origin = [0i64; 3];
        let mut extents = [1usize; 3];
        let mut total_f = 1.0;
        for k in 0..dim {
            let first = (lo[k] / h).floor() - 1.0;
            let last = (hi[k] / h).ceil() + 1.0;
            total_f *= last - first + 1.0;
            if !(total_f <= MAX_BOX_NODES as f64) || first.abs() > 1e15 || last.abs() > 1e15 {
                return Err(Error::InvalidArgument(format!(
                    "grid with spacing {h} exceeds {MAX_BOX_NODES} box nodes"
                )));
            }
            origin[k] = first as i64;
            extents[k] = (last - first) as usize + 1;
        }
        let total: usize = extents.iter().product();
        let mut box_index = vec![EXTERIOR; total];
        let mut lattice = Vec::new();
        let mut x = [0.0; 3];
        for (b, slot) in box_index.iter_mut().enumerate() {
            let l = unflatten(b, &origin, &extents);
            for k in 0..dim {
                x[k] = l[k] as f64 * h;
            }
            if spec.contains(&x[..dim]) {
                *slot = lattice.len() as u32;
                lattice.push(l);
            }
        }
        if lattice.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if lattice.len() >= EXTERIOR as usize {
            return Err(Error::InvalidArgument("too many grid nodes".into()));
        }

        let strides = [1, extents[0], extents[0] * extents[1]];
        let arms: Vec<([u32; 6], f64)> = lattice
            .par_iter()
            .map(|l| {
                let b = flatten(l, &origin, &extents);
                let mut nb = [EXTERIOR; 6];
                let mut diag = 0.0;
                let mut x = [0.0; 3];
                for k in 0..dim {
                    x[k] = l[k] as f64 * h;
                }
                for k in 0..dim {
                    for (s, sign) in [(0usize, -1.0f64), (1, 1.0)] {
                        let nbox = if s == 0 { b - strides[k] } else { b + strides[k] };
                        let j = box_index[nbox];
                        if j != EXTERIOR {
                            nb[2 * k + s] = j;
                            diag += 1.0;
                        } else {
                            let theta = (spec.exit_distance(&x[..dim], k, sign) / h).clamp(THETA_MIN, 1.0);
                            diag += 1.0 / theta;
                        }
                    }
                }
                (nb, diag)
            })
            .collect();
        let (neighbors, diag) = arms.into_iter().unzip();

        Ok(GridDomain {
            shape: spec.clone(),
            dim,
            h,
            origin,
            extents,
            box_index,
            lattice,
            neighbors,
            diag,
        })
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of interior nodes `M`.
    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    /// Quadrature weight `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Lattice coordinates of the box corner.
    pub fn origin(&self) -> &[i64] {
        &self.origin[..self.dim]
    }

    /// Node counts of the bounding box along each axis (one exterior layer included).
    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dim]
    }

    /// Interior mask over the bounding box (axis 0 fastest).
    pub fn interior_mask(&self) -> Vec<bool> {
        self.box_index.iter().map(|&i| i != EXTERIOR).collect()
    }

    /// Integer lattice coordinates of interior node `i`.
    pub fn lattice_point(&self, i: usize) -> &[i64] {
        &self.lattice[i][..self.dim]
    }

    /// Physical coordinates of interior node `i`.
    pub fn coords(&self, i: usize) -> [f64; 3] {
        let l = &self.lattice[i];
        let mut x = [0.0; 3];
        for k in 0..self.dim {
            x[k] = l[k] as f64 * self.h;
        }
        x
    }

    /// Interior index of the node at lattice coordinates `l`, if any.
    pub fn node_at(&self, l: &[i64]) -> Option<usize> {
        let mut full = [0i64; 3];
        for k in 0..self.dim {
            let off = l[k] - self.origin[k];
            if off < 0 || off as usize >= self.extents[k] {
                return None;
            }
            full[k] = l[k];
        }
        full[self.dim..].copy_from_slice(&self.origin[self.dim..3]);
        let j = self.box_index[flatten(&full, &self.origin, &self.extents)];
        (j != EXTERIOR).then_some(j as usize)
    }

    /// Interior index of the node nearest to the physical point `x`, if it is interior.
    pub fn node_near(&self, x: &[f64]) -> Option<usize> {
        let l: Vec<i64> = x.iter().map(|xi| (xi / self.h).round() as i64).collect();
        self.node_at(&l)
    }

    /// Neighbor of node `i` along `axis` in direction `forward`; `None` if exterior.
    pub fn neighbor(&self, i: usize, axis: usize, forward: bool) -> Option<usize> {
        let j = self.neighbors[i][2 * axis + forward as usize];
        (j != EXTERIOR).then_some(j as usize)
    }

    pub(crate) fn neighbor_row(&self, i: usize) -> &[u32] {
        &self.neighbors[i][..2 * self.dim]
    }

    /// Stencil diagonal of node `i` in units of `1/h^2` (equals `2N` away from the boundary).
    pub fn stencil_diagonal(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub(crate) fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `true` when both domains use the same lattice.
    pub fn aligned_with(&self, other: &GridDomain) -> bool {
        self.dim == other.dim && self.h == other.h
    }

    /// `true` when both handles describe the same discretization.
    pub fn same_as(&self, other: &GridDomain) -> bool {
        std::ptr::eq(self, other) || (self.aligned_with(other) && self.shape == other.shape && self.len() == other.len())
    }

    /// Graph distance of every interior node to the exterior; 1 for nodes with an exterior neighbor.
    pub fn boundary_depth(&self) -> Vec<u32> {
        let mut depth = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        for i in 0..self.len() {
            if self.neighbor_row(i).contains(&EXTERIOR) {
                depth[i] = 1;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &j in self.neighbor_row(i) {
                if j != EXTERIOR && depth[j as usize] == u32::MAX {
                    depth[j as usize] = depth[i] + 1;
                    queue.push_back(j as usize);
                }
            }
        }
        depth
    }

    /// Applies the stencil `(-Delta_h u)_i = (d_i u_i - sum_j u_j) / h^2`, adding `extra_i * u_i` when given.
    pub(crate) fn apply(&self, u: &[f64], extra: Option<&[f64]>, out: &mut [f64]) {
        let inv_h2 = 1.0 / (self.h * self.h);
        let row = |i: usize| -> f64 {
            let mut s = self.diag[i] * u[i];
            for &j in self.neighbor_row(i) {
                if j != EXTERIOR {
                    s -= u[j as usize];
                }
            }
            let mut v = s * inv_h2;
            if let Some(e) = extra {
                v += e[i] * u[i];
            }
            v
        };
        if out.len() >= PAR_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
        } else {
            out.iter_mut().enumerate().for_each(|(i, o)| *o = row(i));
        }
    }
}

fn unflatten(b: usize, origin: &[i64; 3], extents: &[usize; 3]) -> [i64; 3] {
    let i0 = b % extents[0];
    let rest = b / extents[0];
    let i1 = rest % extents[1];
    let i2 = rest / extents[1];
    [origin[0] + i0 as i64, origin[1] + i1 as i64, origin[2] + i2 as i64]
}

fn flatten(l: &[i64; 3], origin: &[i64; 3], extents: &[usize; 3]) -> usize {
    let i0 = (l[0] - origin[0]) as usize;
    let i1 = (l[1] - origin[1]) as usize;
    let i2 = (l[2] - origin[2]) as usize;
    i0 + extents[0] * (i1 + extents[1] * i2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_has_seven_nodes() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 0.25).unwrap();
        assert_eq!(d.len(), 7);
        let mut xs: Vec<f64> = (0..d.len()).map(|i| d.coords(i)[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75]);
        // grid-aligned boundary: plain stencil everywhere
        assert!((0..d.len()).all(|i| d.stencil_diagonal(i) == 2.0));
    }

    #[test]
    fn coarse_disk_nodes() {
        // the diagonal points (+-0.5, +-0.5) have norm 0.707 and are interior
        let d = build_domain(&ShapeSpec::unit_ball(2), 0.5).unwrap();
        assert_eq!(d.len(), 9);
        for p in [[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, -1], [1, -1], [-1, 1]] {
            assert!(d.node_at(&p).is_some(), "{p:?}");
        }
    }

    #[test]
    fn too_coarse_spacing_is_rejected() {
        let err = build_domain(&ShapeSpec::unit_ball(2), 2.0).unwrap_err();
        assert!(matches!(err, Error::SpacingTooCoarse { .. }));
    }

    #[test]
    fn interior_nodes_are_strictly_inside() {
        let spec = ShapeSpec::ball(vec![0.1, -0.2, 0.05], 0.7);
        let d = build_domain(&spec, 0.1).unwrap();
        for i in 0..d.len() {
            assert!(spec.contains(&d.coords(i)[..3]));
        }
        // every boundary crossing closes the stencil with a diagonal at least 2N
        assert!((0..d.len()).all(|i| d.stencil_diagonal(i) >= 6.0));
    }

    #[test]
    fn depth_layers() {
        let d = build_domain(&ShapeSpec::interval(-1.0, 1.0), 0.25).unwrap();
        let depth = d.boundary_depth();
        let mut by_x: Vec<(f64, u32)> = (0..d.len()).map(|i| (d.coords(i)[0], depth[i])).collect();
        by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
        let layers: Vec<u32> = by_x.iter().map(|p| p.1).collect();
        assert_eq!(layers, vec![1, 2, 3, 4, 3, 2, 1]);
    }
}
