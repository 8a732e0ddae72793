//! Box and ball hypotheses on a sequence, and fitting of enclosures.
//!
//! For `lo != hi` and any `x` the two conditions
//!
//! ```text
//! Re<hi - x, x - lo> >= 0        (box)
//! ||x - (lo + hi)/2|| <= ||hi - lo||/2   (ball)
//! ```
//!
//! are equivalent, because `Re<hi - x, x - lo> = r^2 - ||x - c||^2` with
//! `c` the midpoint and `r` the half-diameter. Both slacks are reported.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Scalar, Space, Vector};

/// Relative dead zone for condition verdicts. Box slacks are compared against
/// `-CONDITION_TOL * diameter^2`, ball slacks against `-CONDITION_TOL * diameter`.
pub const CONDITION_TOL: f64 = 1e-10;

/// Largest inflation a fitted enclosure may need before fitting is declared failed.
pub const MAX_INFLATION: f64 = 1.5;

const SHRINK_SWEEPS: usize = 200;

/// A pair `(lo, hi)` of distinct vectors of one space, with the ball they span.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    space: Space,
    lo: Vector,
    hi: Vector,
    center: Vector,
    radius: f64,
    diameter: f64,
}

impl Enclosure {
    pub fn new(space: &Space, lo: Vector, hi: Vector) -> Result<Self> {
        space.conforms(&lo)?;
        space.conforms(&hi)?;
        let diameter = space.distance_unchecked(&hi, &lo);
        if diameter == 0.0 {
            return Err(Error::Degenerate("enclosure endpoints coincide".into()));
        }
        if !diameter.is_finite() {
            return Err(Error::NonFinite("enclosure diameter"));
        }
        let center = lo.midpoint(&hi);
        Ok(Self {
            space: space.clone(),
            lo,
            hi,
            center,
            radius: diameter / 2.0,
            diameter,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn lo(&self) -> &Vector {
        &self.lo
    }

    pub fn hi(&self) -> &Vector {
        &self.hi
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `||hi - lo||`
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn box_tolerance(&self) -> f64 {
        CONDITION_TOL * self.diameter * self.diameter
    }

    pub fn ball_tolerance(&self) -> f64 {
        CONDITION_TOL * self.diameter
    }

    /// `Re<hi - x, x - lo>`
    pub fn box_slack(&self, x: &Vector) -> f64 {
        self.space
            .inner_unchecked(&self.hi.sub(x), &x.sub(&self.lo))
            .re
    }

    /// `radius - ||x - center||`
    pub fn ball_slack(&self, x: &Vector) -> f64 {
        self.radius - self.space.distance_unchecked(x, &self.center)
    }

    pub fn check_box(&self, xs: &[Vector]) -> Result<ConditionReport> {
        self.check(xs, ConditionKind::Box)
    }

    pub fn check_ball(&self, xs: &[Vector]) -> Result<ConditionReport> {
        self.check(xs, ConditionKind::Ball)
    }

    fn check(&self, xs: &[Vector], kind: ConditionKind) -> Result<ConditionReport> {
        self.space.conforms_all(xs)?;
        let box_slack: Vec<f64> = xs.iter().map(|x| self.box_slack(x)).collect();
        let ball_slack: Vec<f64> = xs.iter().map(|x| self.ball_slack(x)).collect();
        Ok(ConditionReport::from_slacks(
            kind,
            box_slack,
            ball_slack,
            self.box_tolerance(),
            self.ball_tolerance(),
        ))
    }

    /// Scales the enclosure about its center by `factor`.
    fn inflate(&self, factor: f64) -> Result<Self> {
        let lo = self
            .center
            .add(&self.lo.sub(&self.center).scale_real(factor));
        let hi = self
            .center
            .add(&self.hi.sub(&self.center).scale_real(factor));
        Self::new(&self.space, lo, hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    Box,
    Ball,
}

/// Per-index verdicts and slacks for both forms of the hypothesis.
/// `kind` selects which form drives [`ConditionReport::holds`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub box_slack: Vec<f64>,
    pub ball_slack: Vec<f64>,
    pub box_holds: Vec<bool>,
    pub ball_holds: Vec<bool>,
    pub box_tolerance: f64,
    pub ball_tolerance: f64,
    pub holds: bool,
}

impl ConditionReport {
    fn from_slacks(
        kind: ConditionKind,
        box_slack: Vec<f64>,
        ball_slack: Vec<f64>,
        box_tolerance: f64,
        ball_tolerance: f64,
    ) -> Self {
        let box_holds: Vec<bool> = box_slack.iter().map(|&s| s >= -box_tolerance).collect();
        let ball_holds: Vec<bool> = ball_slack.iter().map(|&s| s >= -ball_tolerance).collect();
        let holds = match kind {
            ConditionKind::Box => box_holds.iter().all(|&b| b),
            ConditionKind::Ball => ball_holds.iter().all(|&b| b),
        };
        Self {
            kind,
            box_slack,
            ball_slack,
            box_holds,
            ball_holds,
            box_tolerance,
            ball_tolerance,
            holds,
        }
    }

    pub fn len(&self) -> usize {
        self.box_slack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.box_slack.is_empty()
    }

    /// Indices failing the condition selected by `kind`.
    pub fn failures(&self) -> Vec<usize> {
        let verdicts = match self.kind {
            ConditionKind::Box => &self.box_holds,
            ConditionKind::Ball => &self.ball_holds,
        };
        verdicts
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(i, _)| i)
            .collect()
    }

    /// Smallest slack of the selected kind, or `+inf` for an empty report.
    pub fn min_slack(&self) -> f64 {
        let slacks = match self.kind {
            ConditionKind::Box => &self.box_slack,
            ConditionKind::Ball => &self.ball_slack,
        };
        slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A pair of scalars `(a, A)` and the closed disc they span.
#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    a: Scalar,
    big_a: Scalar,
    enclosure: Enclosure,
}

impl Disc {
    pub fn new(a: Scalar, big_a: Scalar) -> Result<Self> {
        if a == big_a {
            return Err(Error::Degenerate("disc endpoints coincide".into()));
        }
        let c1 = Space::complex(1);
        let enclosure = Enclosure::new(&c1, Vector::new(vec![a])?, Vector::new(vec![big_a])?)?;
        Ok(Self {
            a,
            big_a,
            enclosure,
        })
    }

    pub fn a(&self) -> Scalar {
        self.a
    }

    pub fn big_a(&self) -> Scalar {
        self.big_a
    }

    /// `|A - a|`
    pub fn diameter(&self) -> f64 {
        self.enclosure.diameter()
    }

    pub fn enclosure(&self) -> &Enclosure {
        &self.enclosure
    }

    pub fn check(&self, alphas: &[Scalar]) -> Result<ConditionReport> {
        self.enclosure.check_ball(&scalars_as_vectors(alphas)?)
    }
}

pub(crate) fn scalars_as_vectors(alphas: &[Scalar]) -> Result<Vec<Vector>> {
    alphas.iter().map(|&a| Vector::new(vec![a])).collect()
}

/// Checks `|alpha_i - (a + A)/2| <= |A - a|/2`, which for real `a < A`
/// reduces to `a <= alpha_i <= A`.
pub fn check_scalar_disc(a: Scalar, big_a: Scalar, alphas: &[Scalar]) -> Result<ConditionReport> {
    Disc::new(a, big_a)?.check(alphas)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// Approximate minimal enclosing ball.
    #[default]
    BoundingSphere,
    /// The diameter-realizing pair of input points.
    AntipodalPair,
}

impl std::str::FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bounding-sphere" | "bounding_sphere" => Ok(Self::BoundingSphere),
            "antipodal-pair" | "antipodal_pair" => Ok(Self::AntipodalPair),
            other => Err(Error::Unknown {
                kind: "fit mode",
                name: other.to_string(),
            }),
        }
    }
}

/// Fits an enclosure whose ball contains every point of `xs`.
///
/// The candidate from either mode is validated against the ball condition and
/// scaled about its center by the smallest factor making every point pass.
/// Factors above [`MAX_INFLATION`] are reported as a fitting failure.
pub fn fit_enclosure(space: &Space, xs: &[Vector], mode: FitMode) -> Result<Enclosure> {
    if xs.is_empty() {
        return Err(Error::Degenerate("cannot fit an enclosure to no points".into()));
    }
    space.conforms_all(xs)?;
    if xs.iter().all(|x| x == &xs[0]) {
        return Err(Error::Degenerate("all points are identical".into()));
    }
    let candidate = match mode {
        FitMode::BoundingSphere => bounding_sphere(space, xs)?,
        FitMode::AntipodalPair => {
            let (i, j) = diameter_pair(space, xs);
            Enclosure::new(space, xs[i].clone(), xs[j].clone())?
        }
    };
    let reach = xs
        .iter()
        .map(|x| space.distance_unchecked(x, candidate.center()))
        .fold(0.0, f64::max);
    let factor = reach / candidate.radius();
    if factor > MAX_INFLATION {
        return Err(Error::FittingFailure {
            factor,
            limit: MAX_INFLATION,
        });
    }
    if factor > 1.0 {
        candidate.inflate(factor)
    } else {
        Ok(candidate)
    }
}

/// Index pair `(i, j)`, `i < j`, maximizing `||x_i - x_j||`.
fn diameter_pair(space: &Space, xs: &[Vector]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_d = -1.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = space.distance_unchecked(&xs[i], &xs[j]);
            if d > best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

fn farthest(space: &Space, xs: &[Vector], from: &Vector) -> (usize, f64) {
    xs.iter()
        .enumerate()
        .map(|(i, x)| (i, space.distance_unchecked(x, from)))
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Ritter's bounding sphere refined by Badoiu-Clarkson core-set steps.
fn bounding_sphere(space: &Space, xs: &[Vector]) -> Result<Enclosure> {
    let (ia, _) = farthest(space, xs, &xs[0]);
    let (ib, spread) = farthest(space, xs, &xs[ia]);
    let (first, second) = if ia < ib { (ia, ib) } else { (ib, ia) };
    let axis = xs[second].sub(&xs[first]).scale_real(1.0 / spread);

    let mut center = xs[ia].midpoint(&xs[ib]);
    let mut radius = spread / 2.0;
    for x in xs {
        let d = space.distance_unchecked(x, &center);
        if d > radius {
            let grown = (radius + d) / 2.0;
            center.axpy(Scalar::new((d - grown) / d, 0.0), &x.sub(&center));
            radius = grown;
        }
    }

    let mut best_center = center.clone();
    let mut best_radius = farthest(space, xs, &center).1;
    for k in 1..=SHRINK_SWEEPS {
        let (i, d) = farthest(space, xs, &center);
        if d < best_radius {
            best_radius = d;
            best_center = center.clone();
        }
        let step = 1.0 / (k as f64 + 1.0);
        let towards = xs[i].sub(&center);
        center.axpy(Scalar::new(step, 0.0), &towards);
    }

    let lo = best_center.sub(&axis.scale_real(best_radius));
    let hi = best_center.add(&axis.scale_real(best_radius));
    Enclosure::new(space, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vector {
        Vector::from_real(v).unwrap()
    }

    fn s(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    #[test]
    fn box_examples() {
        let r1 = Space::real(1);
        let e = Enclosure::new(&r1, r(&[0.0]), r(&[2.0])).unwrap();
        let rep = e.check_box(&[r(&[1.0]), r(&[3.0]), r(&[0.0])]).unwrap();
        assert_eq!(rep.box_slack, vec![1.0, -3.0, 0.0]);
        assert_eq!(rep.box_holds, vec![true, false, true]);
        assert!(!rep.holds);
        assert_eq!(rep.failures(), vec![1]);
    }

    #[test]
    fn ball_examples() {
        let r1 = Space::real(1);
        let e = Enclosure::new(&r1, r(&[0.0]), r(&[2.0])).unwrap();
        let rep = e.check_ball(&[r(&[1.0]), r(&[3.0])]).unwrap();
        assert_eq!(rep.ball_slack, vec![1.0, -1.0]);
        assert_eq!(rep.ball_holds, vec![true, false]);

        // on the ball's boundary yet outside the coordinate box [0,2] x [0,0]
        let r2 = Space::real(2);
        let e = Enclosure::new(&r2, r(&[0.0, 0.0]), r(&[2.0, 0.0])).unwrap();
        let rep = e.check_ball(&[r(&[1.0, 1.0])]).unwrap();
        assert_eq!(rep.ball_slack, vec![0.0]);
        assert!(rep.holds);
    }

    #[test]
    fn box_slack_is_radius_squared_minus_distance_squared() {
        let c2 = Space::complex(2);
        let lo = c2.vector(vec![s(1.0, -1.0), s(0.5, 2.0)]).unwrap();
        let hi = c2.vector(vec![s(-2.0, 0.5), s(3.0, 1.0)]).unwrap();
        let e = Enclosure::new(&c2, lo, hi).unwrap();
        let x = c2.vector(vec![s(0.3, 0.1), s(-1.0, 2.5)]).unwrap();
        let d = c2.distance(&x, e.center()).unwrap();
        let expected = e.radius() * e.radius() - d * d;
        assert!((e.box_slack(&x) - expected).abs() <= 1e-12 * e.diameter().powi(2));
    }

    #[test]
    fn degenerate_enclosure_rejected() {
        let r1 = Space::real(1);
        assert!(matches!(
            Enclosure::new(&r1, r(&[1.0]), r(&[1.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            check_scalar_disc(s(1.0, 0.0), s(1.0, 0.0), &[]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn scalar_disc_examples() {
        let rep = check_scalar_disc(s(0.0, 0.0), s(1.0, 0.0), &[s(0.5, 0.0), s(1.2, 0.0)]).unwrap();
        assert_eq!(rep.ball_holds, vec![true, false]);
        let rep = check_scalar_disc(s(0.0, -1.0), s(0.0, 1.0), &[s(0.9, 0.0)]).unwrap();
        assert!(rep.holds);
        assert!((rep.ball_slack[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn fit_two_points() {
        let r1 = Space::real(1);
        let xs = [r(&[0.0]), r(&[1.0])];
        for mode in [FitMode::BoundingSphere, FitMode::AntipodalPair] {
            let e = fit_enclosure(&r1, &xs, mode).unwrap();
            assert_eq!(e.lo(), &r(&[0.0]), "{mode:?}");
            assert_eq!(e.hi(), &r(&[1.0]), "{mode:?}");
        }
    }

    #[test]
    fn fit_antipodal_right_triangle() {
        let r2 = Space::real(2);
        let xs = [r(&[0.0, 0.0]), r(&[1.0, 0.0]), r(&[0.0, 1.0])];
        let e = fit_enclosure(&r2, &xs, FitMode::AntipodalPair).unwrap();
        let rep = e.check_ball(&xs).unwrap();
        assert!(rep.holds, "{rep:?}");
        // the hypotenuse is already a diameter of the circumscribed circle
        assert_eq!(e.lo(), &r(&[1.0, 0.0]));
        assert_eq!(e.hi(), &r(&[0.0, 1.0]));
    }

    #[test]
    fn fit_antipodal_equilateral_needs_too_much_inflation() {
        let r2 = Space::real(2);
        let h = 3f64.sqrt() / 2.0;
        let xs = [r(&[0.0, 0.0]), r(&[1.0, 0.0]), r(&[0.5, h])];
        assert!(matches!(
            fit_enclosure(&r2, &xs, FitMode::AntipodalPair),
            Err(Error::FittingFailure { .. })
        ));
        // the bounding sphere handles it
        let e = fit_enclosure(&r2, &xs, FitMode::BoundingSphere).unwrap();
        assert!(e.check_ball(&xs).unwrap().holds);
        // circumradius is 1/sqrt(3)
        assert!((e.radius() - 1.0 / 3f64.sqrt()).abs() < 0.05);
    }

    #[test]
    fn fit_antipodal_inflates_when_needed() {
        let r2 = Space::real(2);
        let xs = [r(&[-1.0, 0.0]), r(&[1.0, 0.0]), r(&[0.0, 1.1])];
        let e = fit_enclosure(&r2, &xs, FitMode::AntipodalPair).unwrap();
        assert!(e.check_ball(&xs).unwrap().holds);
        assert!((e.radius() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn fit_single_or_constant_is_degenerate() {
        let r2 = Space::real(2);
        let c = r(&[1.0, 2.0]);
        assert!(matches!(
            fit_enclosure(&r2, std::slice::from_ref(&c), FitMode::BoundingSphere),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            fit_enclosure(&r2, &[c.clone(), c], FitMode::AntipodalPair),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn fit_mode_parses() {
        assert_eq!("bounding-sphere".parse::<FitMode>().unwrap(), FitMode::BoundingSphere);
        assert_eq!("antipodal_pair".parse::<FitMode>().unwrap(), FitMode::AntipodalPair);
        assert!("welzl".parse::<FitMode>().is_err());
    }
}
