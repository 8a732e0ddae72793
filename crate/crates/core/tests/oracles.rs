//! Library results against independent reference computations and known values.

mod support;

use gruss::bounds::{self, equal_weight_coefficients, index_pair_weight, index_variance, pair_mass, Holder, Hypothesis};
use gruss::conditions::Enclosure;
use gruss::functionals::{self, WeightedSequence};
use gruss::jensen::{self, ConvexOracle, DiagonalQuadratic, JensenOptions, SquaredNorm};
use gruss::space::{self, ProbabilityVector, Scalar, Space, Vector};
use support::*;

fn r1(v: f64) -> Vector {
    Vector::from_real(&[v]).unwrap()
}

#[test]
fn chebyshev_matches_double_sum_and_pair_forms() {
    for seed in 0..300 {
        let inst = random_instance(seed, 7, 4);
        let p = inst.p.as_slice();
        let got = functionals::chebyshev(&inst.space, &inst.p, &inst.xs, &inst.ys).unwrap();
        let direct = direct_chebyshev(&inst.space, p, &inst.xs, &inst.ys);
        let pairs = pairwise_chebyshev(&inst.space, p, &inst.xs, &inst.ys);
        let tol = 1e-11 * scale(&inst.space, p, &inst.xs, &inst.ys);
        assert!((got - direct).norm() <= tol, "seed {seed}: {got} vs {direct}");
        assert!((got - pairs).norm() <= tol, "seed {seed}: {got} vs {pairs}");
    }
}

#[test]
fn vector_gruss_matches_double_sum() {
    for seed in 0..300 {
        let inst = random_instance(seed, 7, 4);
        let p = inst.p.as_slice();
        let got = functionals::vector_gruss(&inst.space, &inst.p, &inst.alphas, &inst.xs).unwrap();
        let direct = direct_vector_gruss(p, &inst.alphas, &inst.xs);
        let s: f64 = p
            .iter()
            .zip(inst.alphas.iter().zip(&inst.xs))
            .map(|(w, (a, x))| w * a.norm() * direct_norm(&inst.space, x))
            .sum::<f64>()
            .max(1.0);
        for (g, d) in got.coords().iter().zip(&direct) {
            assert!((g - d).norm() <= 1e-11 * s, "seed {seed}");
        }
    }
}

#[test]
fn variance_equals_mean_squared_displacement() {
    for seed in 0..200 {
        let inst = random_instance(seed, 9, 5);
        let mean = space::weighted_mean(&inst.space, &inst.p, &inst.xs).unwrap();
        let displaced: f64 = inst
            .p
            .iter()
            .zip(&inst.xs)
            .map(|(w, x)| w * direct_norm(&inst.space, &x.sub(&mean)).powi(2))
            .sum();
        let var = functionals::variance(&inst.space, &inst.p, &inst.xs).unwrap();
        let s = scale(&inst.space, inst.p.as_slice(), &inst.xs, &inst.xs);
        assert!((var - displaced).abs() <= 1e-10 * s, "seed {seed}");
        let mad = functionals::mad(&inst.space, &inst.p, &inst.xs).unwrap();
        assert!(mad <= var.sqrt() + 1e-10 * s.sqrt());
    }
}

#[test]
fn weighted_mean_by_hand() {
    let r2 = Space::real(2);
    let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
    let xs = vec![r2.real_vector(&[1.0, 0.0]).unwrap(), r2.real_vector(&[0.0, 1.0]).unwrap()];
    let mean = space::weighted_mean(&r2, &p, &xs).unwrap();
    assert_eq!(mean, r2.real_vector(&[0.3, 0.7]).unwrap());
}

#[test]
fn metric_inner_product_by_hand() {
    let s = Space::with_metric(1, gruss::space::Field::Real, vec![2.0]).unwrap();
    assert_eq!(s.inner(&r1(3.0), &r1(4.0)).unwrap(), Scalar::new(24.0, 0.0));
}

#[test]
fn equal_weight_coefficients_from_general_formulas() {
    for n in 2..=50 {
        let p = ProbabilityVector::uniform(n).unwrap();
        let general = [index_variance(&p), index_pair_weight(&p), pair_mass(&p)];
        let closed = equal_weight_coefficients(n);
        let nf = n as f64;
        let by_hand = [(nf * nf - 1.0) / 12.0, (nf * nf - 1.0) / (6.0 * nf), (nf - 1.0) / (2.0 * nf)];
        for k in 0..3 {
            assert!(close(general[k], by_hand[k], 1e-12), "n={n} k={k}: {} vs {}", general[k], by_hand[k]);
            assert_eq!(closed[k], by_hand[k]);
        }
    }
}

#[test]
fn index_variance_is_a_pair_sum() {
    let mut r = rng(5);
    for n in 1..40 {
        let p = gruss::sample::probability(&mut r, n);
        let w = p.as_slice();
        let mut pairs = 0.0;
        for i in 0..n {
            for j in 0..i {
                pairs += w[i] * w[j] * ((i - j) as f64).powi(2);
            }
        }
        assert!(close(index_variance(&p), pairs, 1e-12), "n={n}");
        let mut linear = 0.0;
        for i in 0..n {
            for j in 0..i {
                linear += w[i] * w[j] * (i - j) as f64;
            }
        }
        assert!(close(index_pair_weight(&p), linear, 1e-12), "n={n}");
    }
}

#[test]
fn forward_difference_n2_by_hand() {
    let r2 = Space::real(2);
    let xs = vec![r2.real_vector(&[0.0, 1.0]).unwrap(), r2.real_vector(&[3.0, 5.0]).unwrap()];
    let ys = vec![r2.real_vector(&[1.0, 1.0]).unwrap(), r2.real_vector(&[2.0, -1.0]).unwrap()];
    let ws = WeightedSequence::new(&r2, ProbabilityVector::uniform(2).unwrap(), xs)
        .unwrap()
        .with_ys(ys)
        .unwrap();
    let chain = bounds::chain_forward_difference(&ws, Holder::default()).unwrap();
    // dx = (3, 4), dy = (1, -2): <dx, dy> = -5, |dx| |dy| = 5 sqrt(5)
    assert!(close(chain.functional_value, 0.25 * 5.0, 1e-15));
    for link in &chain.links {
        assert!(close(link.value, 0.25 * 5.0 * 5f64.sqrt(), 1e-15), "{}", link.label);
    }
}

#[test]
fn forward_difference_bounds_dominate_on_random_data() {
    for seed in 0..200 {
        let inst = random_instance(seed, 12, 4);
        if inst.xs.len() < 2 {
            continue;
        }
        let ws = WeightedSequence::new(&inst.space, inst.p.clone(), inst.xs.clone())
            .unwrap()
            .with_ys(inst.ys.clone())
            .unwrap();
        for holder in [Holder::Finite(1.5), Holder::Finite(2.0), Holder::Finite(3.0), Holder::Finite(10.0), Holder::Infinite] {
            let chain = bounds::chain_forward_difference(&ws, holder).unwrap();
            assert!(chain.holds(bounds::CHAIN_TOL), "seed {seed} {holder:?}: {chain:?}");
            let selfc = bounds::chain_forward_difference_self(&inst.space, &inst.p, &inst.xs, holder).unwrap();
            assert!(selfc.holds(bounds::CHAIN_TOL), "seed {seed} {holder:?}");
        }
    }
}

#[test]
fn squared_norm_pairing_is_twice_the_gap() {
    for seed in 0..200 {
        let inst = random_instance(2 * seed, 10, 5);
        let q: Vec<f64> = inst.p.iter().map(|w| 3.0 * w).collect();
        let gap = jensen::jensen_gap(&SquaredNorm, &inst.space, &q, &inst.xs).unwrap();
        let pairing = jensen::pairing_gap(&SquaredNorm, &inst.space, &q, &inst.xs).unwrap();
        let var = functionals::variance(&inst.space, &inst.p, &inst.xs).unwrap();
        assert!(close(pairing, 2.0 * gap, 1e-10), "seed {seed}");
        assert!(close(gap, var, 1e-10), "seed {seed}");
    }
}

#[test]
fn diagonal_quadratic_gap_is_weighted_coordinate_variance() {
    let space = Space::real(3);
    let f = DiagonalQuadratic::new(vec![1.0, 2.0, 5.0]).unwrap();
    let mut r = rng(17);
    for _ in 0..50 {
        let n = 6;
        let p = gruss::sample::probability(&mut r, n);
        let zs = gruss::sample::vectors(&mut r, &space, n, 1.0);
        let gap = jensen::jensen_gap(&f, &space, p.as_slice(), &zs).unwrap();
        let expected: f64 = (0..3)
            .map(|k| {
                let c = [1.0, 2.0, 5.0][k];
                let mean: f64 = p.iter().zip(&zs).map(|(w, z)| w * z.coords()[k].re).sum();
                c * p.iter().zip(&zs).map(|(w, z)| w * (z.coords()[k].re - mean).powi(2)).sum::<f64>()
            })
            .sum();
        assert!(close(gap, expected, 1e-10));
        assert!(f.eval(&space, &zs[0]) >= 0.0);
    }
}

#[test]
fn reverse_jensen_two_point_by_hand() {
    let space = Space::real(1);
    let zs = vec![r1(0.0), r1(1.0)];
    let options = JensenOptions {
        z_enclosure: Some(Enclosure::new(&space, r1(0.0), r1(1.0)).unwrap()),
        ..Default::default()
    };
    let rep = jensen::reverse_jensen(&SquaredNorm, &space, &[1.0, 1.0], &zs, &options).unwrap();
    assert!(close(rep.gap, 0.25, 1e-15));
    assert!(close(rep.pairing_gap, 0.5, 1e-15));
    let values = rep.chain.values();
    assert_eq!(values.len(), 3);
    for v in values {
        assert!(close(v, 0.5, 1e-15));
    }
}

#[test]
fn chains_on_the_two_point_instance() {
    let space = Space::real(1);
    let p = ProbabilityVector::uniform(2).unwrap();
    let xs = vec![r1(0.0), r1(1.0)];
    let encl = Enclosure::new(&space, r1(0.0), r1(1.0)).unwrap();
    let ws = WeightedSequence::new(&space, p.clone(), xs.clone())
        .unwrap()
        .with_ys(xs.clone())
        .unwrap()
        .with_alphas(vec![Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)])
        .unwrap();
    let disc = gruss::conditions::Disc::new(Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)).unwrap();

    let all = [
        bounds::chain_thm23(&encl, &ws, Hypothesis::Checked).unwrap(),
        bounds::chain_rem24(&encl, &encl, &ws, Hypothesis::Checked).unwrap(),
        bounds::chain_selfadjoint(&encl, &space, &p, &xs, Hypothesis::Checked).unwrap(),
        bounds::chain_thm25(&encl, Some(&disc), &ws, Hypothesis::Checked).unwrap(),
        bounds::chain_complex(&disc, &p, ws.alphas().unwrap(), Hypothesis::Checked).unwrap(),
        bounds::chain_forward_difference_self_equal(&space, &p, &xs, Holder::default()).unwrap(),
    ];
    for chain in all {
        assert_eq!(chain.functional_value, 0.25, "{}", chain.equation);
        for v in chain.values() {
            assert_eq!(v, 0.25, "{}", chain.equation);
        }
    }
}
