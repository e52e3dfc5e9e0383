use std::sync::Arc;

use super::domain::GridDomain;
use crate::error::{Error, Result};

/// One finite value per interior node of a [`GridDomain`].
///
/// Values outside the mask are zero by convention (Dirichlet extension).
#[derive(Debug, Clone)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps `values`, checking length and finiteness.
    pub fn new(domain: &Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ScalarField {
            domain: Arc::clone(domain),
            values,
        })
    }

    pub(crate) fn from_vec(domain: &Arc<GridDomain>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        ScalarField {
            domain: Arc::clone(domain),
            values,
        }
    }

    pub fn zeros(domain: &Arc<GridDomain>) -> Self {
        Self::constant(domain, 0.0)
    }

    pub fn constant(domain: &Arc<GridDomain>, c: f64) -> Self {
        Self::from_vec(domain, vec![c; domain.len()])
    }

    /// Samples `f` at every interior node.
    pub fn from_fn(domain: &Arc<GridDomain>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let dim = domain.dim();
        let values = (0..domain.len()).map(|i| f(&domain.coords(i)[..dim])).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Node-wise map; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(&self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `self * c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self::from_vec(&self.domain, self.values.iter().map(|v| v * c).collect())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index and value of the largest entry.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
    }

    /// Value at the interior node nearest to `x`.
    pub fn value_near(&self, x: &[f64]) -> Option<f64> {
        self.domain.node_near(x).map(|i| self.values[i])
    }

    pub(crate) fn check_same_domain(&self, other: &ScalarField) -> Result<()> {
        if self.domain.same_as(&other.domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }
}
