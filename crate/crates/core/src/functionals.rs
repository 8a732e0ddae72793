//! Left-hand sides of the inequalities: Chebyshev functional, vector Grüss
//! functional, weighted variance and mean absolute deviation, plus the two
//! exact centering identities the bounds are derived from.

use crate::conditions::Enclosure;
use crate::error::{Error, Result};
use crate::space::{
    weighted_mean_unchecked, weighted_scalar_mean, ProbabilityVector, Scalar, Space, Vector,
};

/// Negative variances down to `-VARIANCE_CLAMP_TOL * scale` are rounding and clamp to 0.
pub const VARIANCE_CLAMP_TOL: f64 = 1e-12;

/// A probability vector with one primary vector sequence and optional
/// companion sequences, all of the same length over one space.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSequence {
    space: Space,
    p: ProbabilityVector,
    xs: Vec<Vector>,
    ys: Option<Vec<Vector>>,
    alphas: Option<Vec<Scalar>>,
}

impl WeightedSequence {
    pub fn new(space: &Space, p: ProbabilityVector, xs: Vec<Vector>) -> Result<Self> {
        p.check_len("xs", xs.len())?;
        space.conforms_all(&xs)?;
        Ok(Self {
            space: space.clone(),
            p,
            xs,
            ys: None,
            alphas: None,
        })
    }

    pub fn with_ys(mut self, ys: Vec<Vector>) -> Result<Self> {
        self.p.check_len("ys", ys.len())?;
        self.space.conforms_all(&ys)?;
        self.ys = Some(ys);
        Ok(self)
    }

    pub fn with_alphas(mut self, alphas: Vec<Scalar>) -> Result<Self> {
        self.p.check_len("alphas", alphas.len())?;
        if alphas.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("alpha"));
        }
        if self.space.is_real() && alphas.iter().any(|a| a.im != 0.0) {
            return Err(Error::ComplexInRealSpace("alphas"));
        }
        self.alphas = Some(alphas);
        Ok(self)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[Vector] {
        &self.xs
    }

    pub fn ys(&self) -> Result<&[Vector]> {
        self.ys
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("sequence `ys` is required".into()))
    }

    pub fn alphas(&self) -> Result<&[Scalar]> {
        self.alphas
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("sequence `alphas` is required".into()))
    }

    pub fn chebyshev(&self) -> Result<Scalar> {
        chebyshev(&self.space, &self.p, &self.xs, self.ys()?)
    }

    pub fn vector_gruss(&self) -> Result<Vector> {
        vector_gruss(&self.space, &self.p, self.alphas()?, &self.xs)
    }

    /// `max(1, sum p_i ||x_i|| ||y_i||)`, with `y = x` when `ys` is absent.
    pub fn scale(&self) -> f64 {
        let ys = self.ys.as_deref().unwrap_or(&self.xs);
        crate::space::scale(&self.space, &self.p, &self.xs, ys)
    }
}

fn conform(space: &Space, p: &ProbabilityVector, what: &'static str, xs: &[Vector]) -> Result<()> {
    p.check_len(what, xs.len())?;
    space.conforms_all(xs)
}

/// `sum_i p_i <x_i, y_i> - <sum_i p_i x_i, sum_i p_i y_i>`
pub fn chebyshev(space: &Space, p: &ProbabilityVector, xs: &[Vector], ys: &[Vector]) -> Result<Scalar> {
    conform(space, p, "xs", xs)?;
    conform(space, p, "ys", ys)?;
    Ok(chebyshev_unchecked(space, p, xs, ys))
}

pub(crate) fn chebyshev_unchecked(
    space: &Space,
    p: &ProbabilityVector,
    xs: &[Vector],
    ys: &[Vector],
) -> Scalar {
    let paired: Scalar = p
        .iter()
        .zip(xs.iter().zip(ys))
        .map(|(w, (x, y))| space.inner_unchecked(x, y) * w)
        .sum();
    let mx = weighted_mean_unchecked(space, p, xs);
    let my = weighted_mean_unchecked(space, p, ys);
    paired - space.inner_unchecked(&mx, &my)
}

/// `sum_i p_i alpha_i x_i - (sum_i p_i alpha_i) (sum_i p_i x_i)`
pub fn vector_gruss(
    space: &Space,
    p: &ProbabilityVector,
    alphas: &[Scalar],
    xs: &[Vector],
) -> Result<Vector> {
    conform(space, p, "xs", xs)?;
    let mean_alpha = weighted_scalar_mean(p, alphas)?;
    let mut out = space.zero();
    for ((w, a), x) in p.iter().zip(alphas).zip(xs) {
        out.axpy(a * w, x);
    }
    out.axpy(-mean_alpha, &weighted_mean_unchecked(space, p, xs));
    Ok(out)
}

fn clamp_variance(value: f64, scale: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -VARIANCE_CLAMP_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance { value })
    }
}

/// `sum_i p_i ||x_i||^2 - ||sum_i p_i x_i||^2`, clamped at zero for rounding.
pub fn variance(space: &Space, p: &ProbabilityVector, xs: &[Vector]) -> Result<f64> {
    conform(space, p, "xs", xs)?;
    let second: f64 = p
        .iter()
        .zip(xs)
        .map(|(w, x)| w * space.norm_sqr_unchecked(x))
        .sum();
    let mean = weighted_mean_unchecked(space, p, xs);
    clamp_variance(second - space.norm_sqr_unchecked(&mean), second)
}

/// `sum_i p_i ||x_i - sum_j p_j x_j||`
pub fn mad(space: &Space, p: &ProbabilityVector, xs: &[Vector]) -> Result<f64> {
    conform(space, p, "xs", xs)?;
    let mean = weighted_mean_unchecked(space, p, xs);
    Ok(p
        .iter()
        .zip(xs)
        .map(|(w, x)| w * space.distance_unchecked(x, &mean))
        .sum())
}

/// `sum_i p_i |alpha_i|^2 - |sum_i p_i alpha_i|^2`
pub fn scalar_variance(p: &ProbabilityVector, alphas: &[Scalar]) -> Result<f64> {
    let mean = weighted_scalar_mean(p, alphas)?;
    let second: f64 = p.iter().zip(alphas).map(|(w, a)| w * a.norm_sqr()).sum();
    clamp_variance(second - mean.norm_sqr(), second)
}

/// `sum_i p_i |alpha_i - sum_j p_j alpha_j|`
pub fn scalar_mad(p: &ProbabilityVector, alphas: &[Scalar]) -> Result<f64> {
    let mean = weighted_scalar_mean(p, alphas)?;
    Ok(p.iter().zip(alphas).map(|(w, a)| w * (a - mean).norm()).sum())
}

/// Residual of the centering identity
/// `chebyshev(x, y) = sum_i p_i <x_i - c, y_i - mean(y)>` at the enclosure midpoint.
pub fn identity_residual_24(
    encl: &Enclosure,
    p: &ProbabilityVector,
    xs: &[Vector],
    ys: &[Vector],
) -> Result<f64> {
    identity_residual_24_at(encl.space(), encl.center(), p, xs, ys)
}

/// As [`identity_residual_24`] with an arbitrary centering vector; the identity
/// holds for any `c` since `sum_i p_i (y_i - mean(y)) = 0`.
pub fn identity_residual_24_at(
    space: &Space,
    center: &Vector,
    p: &ProbabilityVector,
    xs: &[Vector],
    ys: &[Vector],
) -> Result<f64> {
    space.conforms(center)?;
    let lhs = chebyshev(space, p, xs, ys)?;
    let my = weighted_mean_unchecked(space, p, ys);
    let rhs: Scalar = p
        .iter()
        .zip(xs.iter().zip(ys))
        .map(|(w, (x, y))| space.inner_unchecked(&x.sub(center), &y.sub(&my)) * w)
        .sum();
    Ok((lhs - rhs).norm())
}

/// Residual (as a norm) of
/// `vector_gruss(alpha, x) = sum_i p_i (alpha_i - mean(alpha)) (x_i - c)` at the enclosure midpoint.
pub fn identity_residual_210(
    encl: &Enclosure,
    p: &ProbabilityVector,
    alphas: &[Scalar],
    xs: &[Vector],
) -> Result<f64> {
    identity_residual_210_at(encl.space(), encl.center(), p, alphas, xs)
}

pub fn identity_residual_210_at(
    space: &Space,
    center: &Vector,
    p: &ProbabilityVector,
    alphas: &[Scalar],
    xs: &[Vector],
) -> Result<f64> {
    space.conforms(center)?;
    let lhs = vector_gruss(space, p, alphas, xs)?;
    let mean_alpha = weighted_scalar_mean(p, alphas)?;
    let mut rhs = space.zero();
    for ((w, a), x) in p.iter().zip(alphas).zip(xs) {
        rhs.axpy((a - mean_alpha) * w, &x.sub(center));
    }
    Ok(space.norm_unchecked(&lhs.sub(&rhs)))
}
