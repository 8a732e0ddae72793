//! Shared helpers for the integration tests: independent reference formulas
//! written straight from the definitions, and seeded random instances.

#![allow(dead_code)]

use gruss::conditions::{Disc, Enclosure};
use gruss::sample;
use gruss::space::{Field, ProbabilityVector, Scalar, Space, Vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `sum_k w_k u_k conj(v_k)` from raw coordinates.
pub fn direct_inner(metric: Option<&[f64]>, u: &[Scalar], v: &[Scalar]) -> Scalar {
    u.iter()
        .zip(v)
        .enumerate()
        .map(|(k, (a, b))| a * b.conj() * metric.map_or(1.0, |m| m[k]))
        .sum()
}

/// Double-sum expansion `sum_i p_i <x_i, y_i> - sum_i sum_j p_i p_j <x_i, y_j>`.
pub fn direct_chebyshev(space: &Space, p: &[f64], xs: &[Vector], ys: &[Vector]) -> Scalar {
    let m = space.metric();
    let mut diag = Scalar::new(0.0, 0.0);
    let mut cross = Scalar::new(0.0, 0.0);
    for i in 0..p.len() {
        diag += direct_inner(m, xs[i].coords(), ys[i].coords()) * p[i];
        for j in 0..p.len() {
            cross += direct_inner(m, xs[i].coords(), ys[j].coords()) * (p[i] * p[j]);
        }
    }
    diag - cross
}

/// `sum_i p_i alpha_i x_i - sum_i sum_j p_i p_j alpha_i x_j`, coordinate by coordinate.
pub fn direct_vector_gruss(p: &[f64], alphas: &[Scalar], xs: &[Vector]) -> Vec<Scalar> {
    let dim = xs[0].len();
    (0..dim)
        .map(|k| {
            let mut acc = Scalar::new(0.0, 0.0);
            for i in 0..p.len() {
                acc += alphas[i] * xs[i].coords()[k] * p[i];
                for j in 0..p.len() {
                    acc -= alphas[i] * xs[j].coords()[k] * (p[i] * p[j]);
                }
            }
            acc
        })
        .collect()
}

/// `sum_{j<i} p_i p_j <x_i - x_j, y_i - y_j>`: the Chebyshev functional in pair form.
pub fn pairwise_chebyshev(space: &Space, p: &[f64], xs: &[Vector], ys: &[Vector]) -> Scalar {
    let m = space.metric();
    let mut acc = Scalar::new(0.0, 0.0);
    for i in 0..p.len() {
        for j in 0..i {
            let dx = xs[i].sub(&xs[j]);
            let dy = ys[i].sub(&ys[j]);
            acc += direct_inner(m, dx.coords(), dy.coords()) * (p[i] * p[j]);
        }
    }
    acc
}

pub fn direct_norm(space: &Space, v: &Vector) -> f64 {
    direct_inner(space.metric(), v.coords(), v.coords()).re.sqrt()
}

pub fn scale(space: &Space, p: &[f64], xs: &[Vector], ys: &[Vector]) -> f64 {
    p.iter()
        .zip(xs.iter().zip(ys))
        .map(|(w, (x, y))| w * direct_norm(space, x) * direct_norm(space, y))
        .sum::<f64>()
        .max(1.0)
}

pub fn field_of(seed: u64) -> Field {
    if seed.is_multiple_of(2) {
        Field::Real
    } else {
        Field::Complex
    }
}

/// A random instance whose `xs` and `ys` satisfy their ball conditions, plus
/// alphas inside a disc.
pub struct Random {
    pub space: Space,
    pub p: ProbabilityVector,
    pub x_encl: Enclosure,
    pub y_encl: Enclosure,
    pub disc: Disc,
    pub xs: Vec<Vector>,
    pub ys: Vec<Vector>,
    pub alphas: Vec<Scalar>,
}

pub fn random_instance(seed: u64, max_n: usize, max_dim: usize) -> Random {
    use rand::Rng;
    let mut r = rng(seed);
    let field = field_of(seed);
    let space = sample::space(&mut r, max_dim, field);
    let n = r.random_range(1..=max_n);
    let p = sample::probability(&mut r, n);
    let sigma = [0.1, 1.0, 10.0][r.random_range(0..3)];
    let x_encl = sample::enclosure(&mut r, &space, sigma);
    let y_encl = sample::enclosure(&mut r, &space, sigma);
    let xs = sample::points_in_ball(&mut r, &x_encl, n);
    let ys = sample::points_in_ball(&mut r, &y_encl, n);
    let (a, big_a) = sample::disc_endpoints(&mut r, field);
    let disc = Disc::new(a, big_a).unwrap();
    let alphas = sample::scalars_in_disc(&mut r, a, big_a, n, field == Field::Real);
    Random {
        space,
        p,
        x_encl,
        y_encl,
        disc,
        xs,
        ys,
        alphas,
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
