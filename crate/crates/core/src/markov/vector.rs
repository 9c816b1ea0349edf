use std::ops::Deref;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a [`Distribution`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite, non-empty vector of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(DenseVector(entries))
    }

    /// Wraps results of library arithmetic. Long horizons on unstable
    /// aggregations can overflow, so finiteness is not re-checked here.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        DenseVector(entries)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// Standard basis vector `e_index` of length `n`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for length {n}"
            )));
        }
        let mut v = vec![0.0; n];
        v[index] = 1.0;
        Self::new(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_all_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Deref for DenseVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for DenseVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A probability vector: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(DenseVector);

impl Distribution {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let v = DenseVector::new(entries)?;
        if let Some(i) = v.iter().position(|&x| x < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is negative ({})",
                v[i]
            )));
        }
        let mass: f64 = v.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {mass}, expected 1"
            )));
        }
        Ok(Distribution(v))
    }

    /// Scales a nonnegative weight vector to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let mass: f64 = weights.iter().sum();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "weights must have positive finite mass, got {mass}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / mass).collect())
    }

    /// Point mass on `index`.
    pub fn dirac(n: usize, index: usize) -> Result<Self> {
        Ok(Distribution(DenseVector::basis(n, index)?))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_vector(&self) -> &DenseVector {
        &self.0
    }

    pub fn into_vector(self) -> DenseVector {
        self.0
    }
}

impl Deref for Distribution {
    type Target = DenseVector;

    fn deref(&self) -> &DenseVector {
        &self.0
    }
}

impl AsRef<[f64]> for Distribution {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `y += alpha * x`
pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `‖u − v‖₁`
pub fn l1_distance(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum()
}
