//! Random instance generators shared by the sharpness search, tests and benches.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::conditions::Enclosure;
use crate::space::{Field, ProbabilityVector, Scalar, Space, Vector};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn scalar<R: Rng + ?Sized>(rng: &mut R, field: Field, sigma: f64) -> Scalar {
    match field {
        Field::Real => Scalar::new(sigma * gaussian(rng), 0.0),
        Field::Complex => Scalar::new(sigma * gaussian(rng), sigma * gaussian(rng)),
    }
}

/// A space of dimension `1..=max_dim`, sometimes with a diagonal metric.
pub fn space<R: Rng + ?Sized>(rng: &mut R, max_dim: usize, field: Field) -> Space {
    let dim = rng.random_range(1..=max_dim.max(1));
    if rng.random_bool(0.25) {
        let metric = (0..dim).map(|_| rng.random_range(0.25..4.0)).collect();
        Space::with_metric(dim, field, metric).expect("positive metric")
    } else {
        Space::new(dim, field).expect("dim >= 1")
    }
}

/// Weights with occasional exact zeros.
pub fn probability<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ProbabilityVector {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| {
                if n > 1 && rng.random_bool(0.1) {
                    0.0
                } else {
                    (0.8 * gaussian(rng)).exp()
                }
            })
            .collect();
        if let Ok(p) = ProbabilityVector::from_unnormalized(&raw) {
            return p;
        }
    }
}

/// Gaussian coordinates with standard deviation `sigma`.
pub fn vector<R: Rng + ?Sized>(rng: &mut R, space: &Space, sigma: f64) -> Vector {
    let coords = (0..space.dim()).map(|_| scalar(rng, space.field(), sigma)).collect();
    Vector::new(coords).expect("finite")
}

pub fn vectors<R: Rng + ?Sized>(rng: &mut R, space: &Space, n: usize, sigma: f64) -> Vec<Vector> {
    (0..n).map(|_| vector(rng, space, sigma)).collect()
}

pub fn scalars<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize, sigma: f64) -> Vec<Scalar> {
    (0..n).map(|_| scalar(rng, field, sigma)).collect()
}

/// A nondegenerate enclosure with endpoints of scale `sigma`.
pub fn enclosure<R: Rng + ?Sized>(rng: &mut R, space: &Space, sigma: f64) -> Enclosure {
    loop {
        let lo = vector(rng, space, sigma);
        let hi = vector(rng, space, sigma);
        if let Ok(e) = Enclosure::new(space, lo, hi) {
            return e;
        }
    }
}

/// Pulls `v` back onto the closed ball `||v - center|| <= radius` along the ray from the center.
pub fn project_into_ball(space: &Space, v: &Vector, center: &Vector, radius: f64) -> Vector {
    let offset = v.sub(center);
    let d = space.norm_unchecked(&offset);
    if d <= radius {
        v.clone()
    } else {
        center.add(&offset.scale_real(radius / d))
    }
}

/// `n` points inside the enclosure's ball; about a fifth land on its boundary.
pub fn points_in_ball<R: Rng + ?Sized>(rng: &mut R, encl: &Enclosure, n: usize) -> Vec<Vector> {
    let space = encl.space();
    (0..n)
        .map(|_| {
            let dir = vector(rng, space, 1.0);
            let norm = space.norm_unchecked(&dir);
            if norm == 0.0 {
                return encl.center().clone();
            }
            let reach = if rng.random_bool(0.2) {
                1.0
            } else {
                rng.random::<f64>().powf(1.0 / space.dim() as f64)
            };
            let p = encl
                .center()
                .add(&dir.scale_real(reach * encl.radius() / norm));
            project_into_ball(space, &p, encl.center(), encl.radius())
        })
        .collect()
}

/// Scalars inside the disc spanned by `(a, big_a)`.
pub fn scalars_in_disc<R: Rng + ?Sized>(rng: &mut R, a: Scalar, big_a: Scalar, n: usize, real: bool) -> Vec<Scalar> {
    let center = (a + big_a) * 0.5;
    let radius = (big_a - a).norm() * 0.5;
    (0..n)
        .map(|_| {
            if real {
                let t: f64 = rng.random();
                a + (big_a - a) * t
            } else {
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                let reach = radius * rng.random::<f64>().sqrt();
                center + Scalar::from_polar(reach, angle)
            }
        })
        .collect()
}

/// Scalar endpoints `(a, A)` with `A != a`.
pub fn disc_endpoints<R: Rng + ?Sized>(rng: &mut R, field: Field) -> (Scalar, Scalar) {
    loop {
        let a = scalar(rng, field, 2.0);
        let big_a = scalar(rng, field, 2.0);
        if a != big_a {
            return match field {
                Field::Real if a.re > big_a.re => (big_a, a),
                _ => (a, big_a),
            };
        }
    }
}
