//! Finite-dimensional real and complex inner product spaces.
//!
//! Coordinates are always stored as [`Scalar`] (a `Complex64`); the scalar
//! field lives on the [`Space`], which rejects vectors with nonzero imaginary
//! parts when it is real. The inner product is linear in its first argument
//! and conjugate-linear in its second, with an optional diagonal metric:
//!
//! ```text
//! <u, v> = sum_k w_k * u_k * conj(v_k)
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Probability vectors whose sum is this close to 1 are taken as they are.
pub const SUM_EXACT_TOL: f64 = 1e-12;
/// Probability vectors whose sum is off by more than [`SUM_EXACT_TOL`] but
/// no more than this are renormalized; anything further out is rejected.
pub const SUM_RENORMALIZE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    dim: usize,
    field: Field,
    metric: Option<Vec<f64>>,
}

impl Space {
    pub fn new(dim: usize, field: Field) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            field,
            metric: None,
        })
    }

    /// A space with a diagonal metric. Every weight must be finite and > 0.
    pub fn with_metric(dim: usize, field: Field, metric: Vec<f64>) -> Result<Self> {
        let mut space = Self::new(dim, field)?;
        if metric.len() != dim {
            return Err(Error::InvalidSpace(format!(
                "metric has {} weights, dimension is {dim}",
                metric.len()
            )));
        }
        if let Some(w) = metric.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSpace(format!(
                "metric weights must be finite and positive, found {w}"
            )));
        }
        if metric.iter().any(|&w| w != 1.0) {
            space.metric = Some(metric);
        }
        Ok(space)
    }

    /// `R^dim` with the Euclidean inner product. Panics on `dim == 0`.
    pub fn real(dim: usize) -> Self {
        Self::new(dim, Field::Real).expect("dimension must be at least 1")
    }

    /// `C^dim` with the Euclidean inner product. Panics on `dim == 0`.
    pub fn complex(dim: usize) -> Self {
        Self::new(dim, Field::Complex).expect("dimension must be at least 1")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_real(&self) -> bool {
        self.field == Field::Real
    }

    pub fn metric(&self) -> Option<&[f64]> {
        self.metric.as_deref()
    }

    #[inline]
    fn weight(&self, k: usize) -> f64 {
        match &self.metric {
            Some(m) => m[k],
            None => 1.0,
        }
    }

    /// Builds a vector of this space, validating length, finiteness and field.
    pub fn vector(&self, coords: Vec<Scalar>) -> Result<Vector> {
        let v = Vector::new(coords)?;
        self.conforms(&v)?;
        Ok(v)
    }

    pub fn real_vector(&self, coords: &[f64]) -> Result<Vector> {
        self.vector(coords.iter().map(|&c| Scalar::new(c, 0.0)).collect())
    }

    pub fn zero(&self) -> Vector {
        Vector(vec![Scalar::new(0.0, 0.0); self.dim])
    }

    /// The `k`-th coordinate unit vector (not normalized under a metric).
    pub fn basis(&self, k: usize) -> Vector {
        let mut v = self.zero();
        v.0[k] = Scalar::new(1.0, 0.0);
        v
    }

    pub fn conforms(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if self.is_real() && v.0.iter().any(|c| c.im != 0.0) {
            return Err(Error::ComplexInRealSpace("vector"));
        }
        Ok(())
    }

    pub fn conforms_all(&self, vs: &[Vector]) -> Result<()> {
        vs.iter().try_for_each(|v| self.conforms(v))
    }

    fn check_dims(&self, u: &Vector, v: &Vector) -> Result<()> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: w.len(),
                });
            }
        }
        Ok(())
    }

    pub fn inner(&self, u: &Vector, v: &Vector) -> Result<Scalar> {
        self.check_dims(u, v)?;
        Ok(self.inner_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn inner_unchecked(&self, u: &Vector, v: &Vector) -> Scalar {
        match &self.metric {
            None => u.0.iter().zip(&v.0).map(|(a, b)| a * b.conj()).sum(),
            Some(m) => u
                .0
                .iter()
                .zip(&v.0)
                .zip(m)
                .map(|((a, b), w)| a * b.conj() * w)
                .sum(),
        }
    }

    pub fn norm_sqr(&self, u: &Vector) -> Result<f64> {
        self.check_dims(u, u)?;
        Ok(self.norm_sqr_unchecked(u))
    }

    #[inline]
    pub(crate) fn norm_sqr_unchecked(&self, u: &Vector) -> f64 {
        u.0.iter()
            .enumerate()
            .map(|(k, a)| self.weight(k) * a.norm_sqr())
            .sum()
    }

    pub fn norm(&self, u: &Vector) -> Result<f64> {
        Ok(self.norm_sqr(u)?.sqrt())
    }

    #[inline]
    pub(crate) fn norm_unchecked(&self, u: &Vector) -> f64 {
        self.norm_sqr_unchecked(u).sqrt()
    }

    pub fn distance(&self, u: &Vector, v: &Vector) -> Result<f64> {
        self.check_dims(u, v)?;
        Ok(self.distance_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, u: &Vector, v: &Vector) -> f64 {
        u.0.iter()
            .zip(&v.0)
            .enumerate()
            .map(|(k, (a, b))| self.weight(k) * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// A coordinate vector. Its entries are finite; membership in a particular
/// [`Space`] is checked by [`Space::conforms`].
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<Scalar>);

impl Vector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        if coords.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("vector coordinate"));
        }
        Ok(Self(coords))
    }

    pub fn from_real(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| Scalar::new(c, 0.0)).collect())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: Scalar) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: Scalar, other: &Vector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn midpoint(&self, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a + b) * 0.5)
                .collect(),
        )
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [Scalar] {
        &mut self.0
    }
}

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Accepts weights whose sum is within [`SUM_RENORMALIZE_TOL`] of one,
    /// renormalizing when the sum is off by more than [`SUM_EXACT_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::validate_entries(&weights)?;
        let sum: f64 = weights.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev <= SUM_EXACT_TOL {
            Ok(Self(weights))
        } else if dev <= SUM_RENORMALIZE_TOL {
            Ok(Self(weights.into_iter().map(|w| w / sum).collect()))
        } else {
            Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )))
        }
    }

    /// Normalizes arbitrary nonnegative weights `q_i` by `Q_n = sum q_i > 0`.
    pub fn from_unnormalized(q: &[f64]) -> Result<Self> {
        Self::validate_entries(q)?;
        let total: f64 = q.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidWeights(format!(
                "total weight must be positive, found {total}"
            )));
        }
        Ok(Self(q.iter().map(|w| w / total).collect()))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    fn validate_entries(weights: &[f64]) -> Result<()> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("weight"));
        }
        if let Some(w) = weights.iter().find(|&&w| w < 0.0) {
            return Err(Error::InvalidWeights(format!("negative weight {w}")));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }

    /// True when every weight equals `1/n` to within `tol` relative.
    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.len() as f64;
        self.0.iter().all(|w| (w - u).abs() <= tol * u)
    }

    pub(crate) fn check_len(&self, what: &'static str, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::LengthMismatch {
                what,
                expected: self.len(),
                found,
            });
        }
        Ok(())
    }
}

/// `sum_i p_i x_i`
pub fn weighted_mean(space: &Space, p: &ProbabilityVector, xs: &[Vector]) -> Result<Vector> {
    p.check_len("sequence", xs.len())?;
    space.conforms_all(xs)?;
    Ok(weighted_mean_unchecked(space, p, xs))
}

pub(crate) fn weighted_mean_unchecked(space: &Space, p: &ProbabilityVector, xs: &[Vector]) -> Vector {
    let mut mean = space.zero();
    for (w, x) in p.iter().zip(xs) {
        mean.axpy(Scalar::new(w, 0.0), x);
    }
    mean
}

/// `sum_i p_i alpha_i`
pub fn weighted_scalar_mean(p: &ProbabilityVector, alphas: &[Scalar]) -> Result<Scalar> {
    p.check_len("scalar sequence", alphas.len())?;
    Ok(p.iter().zip(alphas).map(|(w, a)| a * w).sum())
}

/// `(x_2 - x_1, ..., x_n - x_{n-1})`
pub fn forward_differences(xs: &[Vector]) -> Result<Vec<Vector>> {
    if xs.len() < 2 {
        return Err(Error::Degenerate(format!(
            "forward differences need at least 2 terms, found {}",
            xs.len()
        )));
    }
    let dim = xs[0].len();
    if let Some(bad) = xs.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    Ok(xs.windows(2).map(|w| w[1].sub(&w[0])).collect())
}

/// The relative-tolerance scale `max(1, sum_i p_i ||x_i|| ||y_i||)`.
pub fn scale(space: &Space, p: &ProbabilityVector, xs: &[Vector], ys: &[Vector]) -> f64 {
    let s: f64 = p
        .iter()
        .zip(xs.iter().zip(ys))
        .map(|(w, (x, y))| w * space.norm_unchecked(x) * space.norm_unchecked(y))
        .sum();
    s.max(1.0)
}
