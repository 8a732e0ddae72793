//! Reverse Jensen bounds for differentiable convex functions on a real space.
//!
//! For weights `q_i >= 0` with `Q = sum q_i > 0` and `p_i = q_i / Q`,
//!
//! ```text
//! 0 <= sum p_i F(z_i) - F(sum p_i z_i)
//!   <= sum p_i <grad F(z_i), z_i> - <sum p_i grad F(z_i), sum p_i z_i>
//!   <= 1/2 ||M - m|| mad(z) <= 1/2 ||M - m|| sqrt(var(z)) <= 1/4 ||M - m|| ||Z - z||
//! ```
//!
//! where `(m, M)` encloses the gradients and `(z, Z)` the points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::{BoundChain, ChainKind, EquationTag, Hypothesis, Link, NamedReport, CHAIN_TOL};
use crate::conditions::{fit_enclosure, Enclosure, FitMode};
use crate::error::{Error, Result};
use crate::functionals::{self, chebyshev_unchecked};
use crate::space::{weighted_mean_unchecked, ProbabilityVector, Scalar, Space, Vector};

/// Largest relative error a built-in oracle may show at registration.
pub const GRADIENT_TOL: f64 = 1e-6;
/// Finite-difference step used at registration.
pub const GRADIENT_STEP: f64 = 1e-5;

const REGISTRATION_SAMPLES: usize = 16;
const REGISTRATION_SEED: u64 = 0x6a09_e667_f3bc_c908;

/// A differentiable convex function with its gradient. `grad` returns the
/// Riesz representer under the space's inner product, so that
/// `d/dt F(z + t v)|_{t=0} = <grad(z), v>`.
pub trait ConvexOracle: Send + Sync {
    fn name(&self) -> &str;
    fn eval(&self, space: &Space, z: &Vector) -> f64;
    fn grad(&self, space: &Space, z: &Vector) -> Vector;
}

fn re(z: &Vector, k: usize) -> f64 {
    z.coords()[k].re
}

fn metric(space: &Space, k: usize) -> f64 {
    space.metric().map_or(1.0, |m| m[k])
}

fn from_fn(space: &Space, mut f: impl FnMut(usize) -> f64) -> Vector {
    let mut v = space.zero();
    for (k, c) in v.coords_mut().iter_mut().enumerate() {
        *c = Scalar::new(f(k), 0.0);
    }
    v
}

/// `F(z) = ||z||^2`
#[derive(Clone, Copy, Debug, Default)]
pub struct SquaredNorm;

impl ConvexOracle for SquaredNorm {
    fn name(&self) -> &str {
        "squared_norm"
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        space.norm_sqr_unchecked(z)
    }

    fn grad(&self, _space: &Space, z: &Vector) -> Vector {
        z.scale_real(2.0)
    }
}

/// `F(z) = sum_k d_k z_k^2` with `d_k > 0`.
#[derive(Clone, Debug)]
pub struct DiagonalQuadratic {
    coefficients: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidArgument(
                "diagonal quadratic coefficients must be finite and positive".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    /// Coefficients `1, 2, ..., dim`.
    pub fn graded(dim: usize) -> Self {
        Self {
            coefficients: (1..=dim).map(|k| k as f64).collect(),
        }
    }

    fn coefficient(&self, k: usize) -> f64 {
        self.coefficients[k % self.coefficients.len()]
    }
}

impl ConvexOracle for DiagonalQuadratic {
    fn name(&self) -> &str {
        "diag_quadratic"
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        (0..space.dim()).map(|k| self.coefficient(k) * re(z, k).powi(2)).sum()
    }

    fn grad(&self, space: &Space, z: &Vector) -> Vector {
        from_fn(space, |k| 2.0 * self.coefficient(k) * re(z, k) / metric(space, k))
    }
}

/// `F(z) = log sum_k exp(z_k)`
#[derive(Clone, Copy, Debug, Default)]
pub struct LogSumExp;

impl ConvexOracle for LogSumExp {
    fn name(&self) -> &str {
        "log_sum_exp"
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        let top = (0..space.dim()).map(|k| re(z, k)).fold(f64::NEG_INFINITY, f64::max);
        top + (0..space.dim()).map(|k| (re(z, k) - top).exp()).sum::<f64>().ln()
    }

    fn grad(&self, space: &Space, z: &Vector) -> Vector {
        let top = (0..space.dim()).map(|k| re(z, k)).fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = (0..space.dim()).map(|k| (re(z, k) - top).exp()).sum();
        from_fn(space, |k| (re(z, k) - top).exp() / total / metric(space, k))
    }
}

/// `F(z) = ||z||^4`
#[derive(Clone, Copy, Debug, Default)]
pub struct NormPower4;

impl ConvexOracle for NormPower4 {
    fn name(&self) -> &str {
        "norm_power4"
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        space.norm_sqr_unchecked(z).powi(2)
    }

    fn grad(&self, space: &Space, z: &Vector) -> Vector {
        z.scale_real(4.0 * space.norm_sqr_unchecked(z))
    }
}

/// `F(z) = <a, z> + b`
#[derive(Clone, Debug)]
pub struct Affine {
    pub slope: Vector,
    pub offset: f64,
}

impl ConvexOracle for Affine {
    fn name(&self) -> &str {
        "affine"
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        space.inner_unchecked(&self.slope, z).re + self.offset
    }

    fn grad(&self, _space: &Space, _z: &Vector) -> Vector {
        self.slope.clone()
    }
}

/// Wraps an oracle and multiplies its gradient by a constant. Used to inject
/// faults when exercising [`gradient_check`].
pub struct ScaledGradient<O> {
    pub inner: O,
    pub factor: f64,
}

impl<O: ConvexOracle> ConvexOracle for ScaledGradient<O> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        self.inner.eval(space, z)
    }

    fn grad(&self, space: &Space, z: &Vector) -> Vector {
        self.inner.grad(space, z).scale_real(self.factor)
    }
}

impl ConvexOracle for Box<dyn ConvexOracle> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn eval(&self, space: &Space, z: &Vector) -> f64 {
        (**self).eval(space, z)
    }

    fn grad(&self, space: &Space, z: &Vector) -> Vector {
        (**self).grad(space, z)
    }
}

pub const CATALOG: [&str; 4] = ["squared_norm", "diag_quadratic", "log_sum_exp", "norm_power4"];

/// Looks up a built-in oracle and validates its gradient on `space`.
pub fn oracle_by_name(name: &str, space: &Space) -> Result<Box<dyn ConvexOracle>> {
    let oracle: Box<dyn ConvexOracle> = match name {
        "squared_norm" => Box::new(SquaredNorm),
        "diag_quadratic" => Box::new(DiagonalQuadratic::graded(space.dim())),
        "log_sum_exp" => Box::new(LogSumExp),
        "norm_power4" => Box::new(NormPower4),
        other => {
            return Err(Error::Unknown {
                kind: "oracle",
                name: other.to_string(),
            })
        }
    };
    register(oracle, space)
}

/// Runs [`gradient_check`] on deterministic sample points and returns the
/// oracle only if its max relative error is within [`GRADIENT_TOL`].
pub fn register<O: ConvexOracle>(oracle: O, space: &Space) -> Result<O> {
    require_real(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(REGISTRATION_SEED);
    let samples: Vec<Vector> = (0..REGISTRATION_SAMPLES)
        .map(|_| from_fn(space, |_| rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let max_error = gradient_check(&oracle, space, &samples, GRADIENT_STEP)?;
    if max_error > GRADIENT_TOL {
        return Err(Error::GradientCheck {
            name: oracle.name().to_string(),
            max_error,
        });
    }
    Ok(oracle)
}

fn require_real(space: &Space) -> Result<()> {
    if !space.is_real() {
        return Err(Error::ComplexUnsupported(
            "convexity and gradients are taken over a real space",
        ));
    }
    Ok(())
}

/// Compares central differences of `eval` with `<grad, v>` and returns the
/// largest relative error over all samples.
///
/// Directions are drawn at random inside a cone around the claimed gradient,
/// which keeps the directional derivative away from zero; at a zero gradient
/// a plain random unit direction is used.
pub fn gradient_check<O: ConvexOracle + ?Sized>(
    oracle: &O,
    space: &Space,
    samples: &[Vector],
    h: f64,
) -> Result<f64> {
    require_real(space)?;
    if !(h > 0.0 && h <= 1e-2) {
        return Err(Error::InvalidArgument(format!("step {h} outside (0, 1e-2]")));
    }
    space.conforms_all(samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(REGISTRATION_SEED ^ 0x5be0_cd19);
    let mut worst: f64 = 0.0;
    for z in samples {
        let g = oracle.grad(space, z);
        let g_norm = space.norm(&g)?;
        for _ in 0..3 {
            let mut v = from_fn(space, |_| rng.sample::<f64, _>(StandardNormal));
            let v_norm = space.norm_unchecked(&v);
            if g_norm > 0.0 {
                v = g.scale_real(1.0 / g_norm).add(&v.scale_real(0.5 / v_norm));
            }
            let v = v.scale_real(1.0 / space.norm_unchecked(&v));

            let mut plus = z.clone();
            plus.axpy(Scalar::new(h, 0.0), &v);
            let mut minus = z.clone();
            minus.axpy(Scalar::new(-h, 0.0), &v);
            let fd = (oracle.eval(space, &plus) - oracle.eval(space, &minus)) / (2.0 * h);
            let analytic = space.inner_unchecked(&g, &v).re;
            let denom = analytic.abs().max(fd.abs()).max(1e-12);
            worst = worst.max((fd - analytic).abs() / denom);
        }
    }
    Ok(worst)
}

fn normalized(space: &Space, q: &[f64], zs: &[Vector]) -> Result<ProbabilityVector> {
    require_real(space)?;
    let p = ProbabilityVector::from_unnormalized(q)?;
    p.check_len("zs", zs.len())?;
    space.conforms_all(zs)?;
    Ok(p)
}

/// `sum p_i F(z_i) - F(sum p_i z_i)` with `p_i = q_i / sum q`.
pub fn jensen_gap<O: ConvexOracle + ?Sized>(
    oracle: &O,
    space: &Space,
    q: &[f64],
    zs: &[Vector],
) -> Result<f64> {
    let p = normalized(space, q, zs)?;
    Ok(gap_unchecked(oracle, space, &p, zs))
}

fn gap_unchecked<O: ConvexOracle + ?Sized>(
    oracle: &O,
    space: &Space,
    p: &ProbabilityVector,
    zs: &[Vector],
) -> f64 {
    let mean_value: f64 = p.iter().zip(zs).map(|(w, z)| w * oracle.eval(space, z)).sum();
    mean_value - oracle.eval(space, &weighted_mean_unchecked(space, p, zs))
}

/// `sum p_i <grad F(z_i), z_i> - <sum p_i grad F(z_i), sum p_i z_i>`
pub fn pairing_gap<O: ConvexOracle + ?Sized>(
    oracle: &O,
    space: &Space,
    q: &[f64],
    zs: &[Vector],
) -> Result<f64> {
    let p = normalized(space, q, zs)?;
    let grads = gradients(oracle, space, zs)?;
    Ok(chebyshev_unchecked(space, &p, &grads, zs).re)
}

fn gradients<O: ConvexOracle + ?Sized>(oracle: &O, space: &Space, zs: &[Vector]) -> Result<Vec<Vector>> {
    let grads: Vec<Vector> = zs.iter().map(|z| oracle.grad(space, z)).collect();
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("oracle gradient"));
    }
    space.conforms_all(&grads)?;
    Ok(grads)
}

#[derive(Clone, Debug, Default)]
pub struct JensenOptions {
    /// `(m, M)`; fitted from the gradients when absent.
    pub grad_enclosure: Option<Enclosure>,
    /// `(z, Z)`; enables the final quarter-constant link.
    pub z_enclosure: Option<Enclosure>,
    /// Fit `(z, Z)` from the points when it is absent.
    pub fit_z: bool,
    pub fit_mode: FitMode,
    pub hypothesis: Hypothesis,
}

#[derive(Clone, Debug)]
pub struct JensenReport {
    pub gap: f64,
    pub pairing_gap: f64,
    pub chain: BoundChain,
    /// First link divided by the quarter-constant link, when the latter exists.
    pub improvement_ratio: Option<f64>,
    pub grad_enclosure: Option<Enclosure>,
    pub z_enclosure: Option<Enclosure>,
}

impl JensenReport {
    /// `0 <= gap <= pairing_gap <= links[0] <= ...`, each within `tol * scale`.
    pub fn holds(&self, tol: f64) -> bool {
        let slack = tol * self.chain.scale;
        let first = self.chain.links.first().map_or(f64::INFINITY, |l| l.value);
        self.gap >= -slack
            && self.gap <= self.pairing_gap + slack
            && self.pairing_gap <= first + slack
            && self.chain.holds(tol)
    }
}

/// Evaluates the gap, the gradient pairing and the bound chain.
///
/// A constant point set gives an all-zero report. A constant gradient set
/// (the function is affine across the points) gives zero bound links.
pub fn reverse_jensen<O: ConvexOracle + ?Sized>(
    oracle: &O,
    space: &Space,
    q: &[f64],
    zs: &[Vector],
    options: &JensenOptions,
) -> Result<JensenReport> {
    let p = normalized(space, q, zs)?;
    let constant_points = zs.iter().all(|z| z == &zs[0]);
    let grads = gradients(oracle, space, zs)?;
    let scale = crate::space::scale(space, &p, &grads, zs);

    if constant_points {
        let links = vec![
            Link::new("1/2 ||M-m|| mad(z)", 0.0, EquationTag::E3_4),
            Link::new("1/2 ||M-m|| sqrt(var(z))", 0.0, EquationTag::E3_4),
        ];
        return Ok(JensenReport {
            gap: 0.0,
            pairing_gap: 0.0,
            chain: ordered(EquationTag::E3_4, 0.0, links, scale, Vec::new(), true),
            improvement_ratio: None,
            grad_enclosure: options.grad_enclosure.clone(),
            z_enclosure: options.z_enclosure.clone(),
        });
    }

    let gap = gap_unchecked(oracle, space, &p, zs);
    let pairing = chebyshev_unchecked(space, &p, &grads, zs).re;

    let mut reports = Vec::new();
    let mut verified = true;
    let mut require = |sequence: &'static str, encl: &Enclosure, xs: &[Vector]| -> Result<()> {
        let report = encl.check_ball(xs)?;
        if !report.holds {
            if options.hypothesis == Hypothesis::Checked {
                return Err(Error::HypothesisViolated {
                    sequence,
                    report: Box::new(report),
                });
            }
            verified = false;
        }
        reports.push(NamedReport { sequence, report });
        Ok(())
    };

    let constant_grads = grads.iter().all(|g| g == &grads[0]);
    let grad_enclosure = match &options.grad_enclosure {
        Some(e) => Some(e.clone()),
        None if constant_grads => None,
        None => Some(fit_enclosure(space, &grads, options.fit_mode)?),
    };
    let grad_diam = match &grad_enclosure {
        Some(e) => {
            require("gradients", e, &grads)?;
            e.diameter()
        }
        None => 0.0,
    };

    let z_enclosure = match &options.z_enclosure {
        Some(e) => Some(e.clone()),
        None if options.fit_z => Some(fit_enclosure(space, zs, options.fit_mode)?),
        None => None,
    };
    if let Some(e) = &z_enclosure {
        require("zs", e, zs)?;
    }

    let mut links = vec![
        Link::new(
            "1/2 ||M-m|| mad(z)",
            0.5 * grad_diam * functionals::mad(space, &p, zs)?,
            EquationTag::E3_4,
        ),
        Link::new(
            "1/2 ||M-m|| sqrt(var(z))",
            0.5 * grad_diam * functionals::variance(space, &p, zs)?.sqrt(),
            EquationTag::E3_4,
        ),
    ];
    let mut improvement_ratio = None;
    let equation = match &z_enclosure {
        Some(e) => {
            let last = 0.25 * grad_diam * e.diameter();
            if last > 0.0 {
                improvement_ratio = Some(links[0].value / last);
            }
            links.push(Link::new("1/4 ||M-m|| ||Z-z||", last, EquationTag::E3_9));
            EquationTag::E3_9
        }
        None => EquationTag::E3_4,
    };

    Ok(JensenReport {
        gap,
        pairing_gap: pairing,
        chain: ordered(equation, gap, links, scale, reports, verified),
        improvement_ratio,
        grad_enclosure,
        z_enclosure,
    })
}

fn ordered(
    equation: EquationTag,
    functional_value: f64,
    links: Vec<Link>,
    scale: f64,
    hypothesis_reports: Vec<NamedReport>,
    hypothesis_verified: bool,
) -> BoundChain {
    BoundChain {
        equation,
        kind: ChainKind::Ordered,
        functional_value,
        links,
        hypothesis_reports,
        hypothesis_verified,
        scale,
        tightest: None,
    }
}

/// Convexity probe: `F(u) - F(v) >= <grad F(v), u - v> - tol * scale` over all sample pairs.
pub fn subgradient_inequality_holds<O: ConvexOracle + ?Sized>(
    oracle: &O,
    space: &Space,
    samples: &[Vector],
) -> bool {
    samples.iter().all(|u| {
        samples.iter().all(|v| {
            let lhs = oracle.eval(space, u) - oracle.eval(space, v);
            let rhs = space.inner_unchecked(&oracle.grad(space, v), &u.sub(v)).re;
            lhs >= rhs - CHAIN_TOL * lhs.abs().max(rhs.abs()).max(1.0)
        })
    })
}
