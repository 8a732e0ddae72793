//! Upper-bound chains for the functionals.
//!
//! Each chain records the functional's modulus and an ordered list of links,
//! every one of which dominates the one before it. The forward-difference
//! bounds are different: they are alternatives, each individually dominating
//! the functional, and carry a marker for the tightest.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::conditions::{ConditionReport, Disc, Enclosure};
use crate::error::{Error, Result};
use crate::functionals::{self, WeightedSequence};
use crate::space::{forward_differences, ProbabilityVector, Scalar, Space, Vector};

/// Links must dominate their predecessor to within `CHAIN_TOL * scale`.
pub const CHAIN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquationTag {
    E1_2,
    E1_4,
    E1_5,
    E1_6,
    E1_7,
    E1_8,
    E1_9,
    E2_3,
    E2_7,
    E2_8,
    E2_9,
    E2_11,
    R2_7,
    E3_4,
    E3_5,
    E3_9,
}

impl EquationTag {
    pub const ALL: [EquationTag; 16] = [
        Self::E1_2,
        Self::E1_4,
        Self::E1_5,
        Self::E1_6,
        Self::E1_7,
        Self::E1_8,
        Self::E1_9,
        Self::E2_3,
        Self::E2_7,
        Self::E2_8,
        Self::E2_9,
        Self::E2_11,
        Self::R2_7,
        Self::E3_4,
        Self::E3_5,
        Self::E3_9,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::E1_2 => "1.2",
            Self::E1_4 => "1.4",
            Self::E1_5 => "1.5",
            Self::E1_6 => "1.6",
            Self::E1_7 => "1.7",
            Self::E1_8 => "1.8",
            Self::E1_9 => "1.9",
            Self::E2_3 => "2.3",
            Self::E2_7 => "2.7",
            Self::E2_8 => "2.8",
            Self::E2_9 => "2.9",
            Self::E2_11 => "2.11",
            Self::R2_7 => "R2.7",
            Self::E3_4 => "3.4",
            Self::E3_5 => "3.5",
            Self::E3_9 => "3.9",
        }
    }
}

impl fmt::Display for EquationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquationTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "equation tag",
                name: s.to_string(),
            })
    }
}

impl Serialize for EquationTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Link {
    pub label: String,
    pub value: f64,
    pub equation: EquationTag,
}

impl Link {
    pub fn new(label: impl Into<String>, value: f64, equation: EquationTag) -> Self {
        Self {
            label: label.into(),
            value,
            equation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    /// `functional <= links[0] <= links[1] <= ...`
    Ordered,
    /// `functional <= links[k]` for every `k`, no order among links.
    Parallel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedReport {
    pub sequence: &'static str,
    pub report: ConditionReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundChain {
    pub equation: EquationTag,
    pub kind: ChainKind,
    pub functional_value: f64,
    pub links: Vec<Link>,
    pub hypothesis_reports: Vec<NamedReport>,
    /// False only when hypotheses were skipped and do not in fact hold.
    pub hypothesis_verified: bool,
    pub scale: f64,
    /// Index of the smallest link of a parallel chain.
    pub tightest: Option<usize>,
}

impl BoundChain {
    fn ordered(equation: EquationTag, functional_value: f64, links: Vec<Link>, scale: f64) -> Self {
        Self {
            equation,
            kind: ChainKind::Ordered,
            functional_value,
            links,
            hypothesis_reports: Vec::new(),
            hypothesis_verified: true,
            scale,
            tightest: None,
        }
    }

    fn parallel(equation: EquationTag, functional_value: f64, links: Vec<Link>, scale: f64) -> Self {
        let tightest = links
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .map(|(i, _)| i);
        Self {
            kind: ChainKind::Parallel,
            tightest,
            ..Self::ordered(equation, functional_value, links, scale)
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.links.iter().map(|l| l.value).collect()
    }

    /// Positions where domination fails by more than `tol * scale`:
    /// `k` means link `k` is below its predecessor (the functional for `k = 0`,
    /// and for every `k` in a parallel chain).
    pub fn violations(&self, tol: f64) -> Vec<usize> {
        let slack = tol * self.scale;
        let mut out = Vec::new();
        let mut prev = self.functional_value;
        for (k, link) in self.links.iter().enumerate() {
            if prev > link.value + slack {
                out.push(k);
            }
            if self.kind == ChainKind::Ordered {
                prev = link.value;
            }
        }
        out
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.violations(tol).is_empty()
    }
}

/// Whether chain builders insist on their hypotheses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Hypothesis {
    #[default]
    Checked,
    /// Evaluate anyway; the chain is flagged as unverified if a hypothesis fails.
    Unchecked,
}

struct Verifier {
    mode: Hypothesis,
    reports: Vec<NamedReport>,
    verified: bool,
}

impl Verifier {
    fn new(mode: Hypothesis) -> Self {
        Self {
            mode,
            reports: Vec::new(),
            verified: true,
        }
    }

    fn require(&mut self, sequence: &'static str, report: ConditionReport) -> Result<()> {
        if !report.holds {
            if self.mode == Hypothesis::Checked {
                return Err(Error::HypothesisViolated {
                    sequence,
                    report: Box::new(report),
                });
            }
            self.verified = false;
        }
        self.reports.push(NamedReport { sequence, report });
        Ok(())
    }

    fn attach(self, mut chain: BoundChain) -> BoundChain {
        chain.hypothesis_reports = self.reports;
        chain.hypothesis_verified = self.verified;
        chain
    }
}

fn same_space(encl: &Enclosure, space: &Space) -> Result<()> {
    if encl.space() != space {
        return Err(Error::InvalidArgument(
            "enclosure and sequence live in different spaces".into(),
        ));
    }
    Ok(())
}

/// `|chebyshev| <= 1/2 ||X-x|| mad(y) <= 1/2 ||X-x|| sqrt(var(y))`
/// for `x_i` in the ball spanned by `(x, X)`.
pub fn chain_thm23(encl_x: &Enclosure, ws: &WeightedSequence, mode: Hypothesis) -> Result<BoundChain> {
    same_space(encl_x, ws.space())?;
    let ys = ws.ys()?;
    let mut verifier = Verifier::new(mode);
    verifier.require("xs", encl_x.check_ball(ws.xs())?)?;

    let space = ws.space();
    let p = ws.weights();
    let functional = ws.chebyshev()?.norm();
    let half_diam = 0.5 * encl_x.diameter();
    let links = vec![
        Link::new(
            "1/2 ||X-x|| mad(y)",
            half_diam * functionals::mad(space, p, ys)?,
            EquationTag::E2_3,
        ),
        Link::new(
            "1/2 ||X-x|| sqrt(var(y))",
            half_diam * functionals::variance(space, p, ys)?.sqrt(),
            EquationTag::E2_3,
        ),
    ];
    Ok(verifier.attach(BoundChain::ordered(EquationTag::E2_3, functional, links, ws.scale())))
}

/// [`chain_thm23`] extended by `1/4 ||X-x|| ||Y-y||` when `y_i` is enclosed as well.
pub fn chain_rem24(
    encl_x: &Enclosure,
    encl_y: &Enclosure,
    ws: &WeightedSequence,
    mode: Hypothesis,
) -> Result<BoundChain> {
    same_space(encl_y, ws.space())?;
    let mut verifier = Verifier::new(mode);
    verifier.require("ys", encl_y.check_ball(ws.ys()?)?)?;
    let base = chain_thm23(encl_x, ws, mode)?;

    let mut links = base.links;
    for l in &mut links {
        l.equation = EquationTag::E2_7;
    }
    links.push(Link::new(
        "1/4 ||X-x|| ||Y-y||",
        0.25 * encl_x.diameter() * encl_y.diameter(),
        EquationTag::E1_4,
    ));
    let mut chain = BoundChain::ordered(EquationTag::E2_7, base.functional_value, links, base.scale);
    chain.hypothesis_reports = base.hypothesis_reports;
    chain.hypothesis_reports.extend(verifier.reports);
    chain.hypothesis_verified = base.hypothesis_verified && verifier.verified;
    Ok(chain)
}

/// `var(x) <= 1/2 ||X-x|| mad(x) <= 1/4 ||X-x||^2`
pub fn chain_selfadjoint(
    encl: &Enclosure,
    space: &Space,
    p: &ProbabilityVector,
    xs: &[Vector],
    mode: Hypothesis,
) -> Result<BoundChain> {
    same_space(encl, space)?;
    let mut verifier = Verifier::new(mode);
    verifier.require("xs", encl.check_ball(xs)?)?;

    let functional = functionals::variance(space, p, xs)?;
    let diam = encl.diameter();
    let links = vec![
        Link::new(
            "1/2 ||X-x|| mad(x)",
            0.5 * diam * functionals::mad(space, p, xs)?,
            EquationTag::E2_8,
        ),
        Link::new("1/4 ||X-x||^2", 0.25 * diam * diam, EquationTag::E1_5),
    ];
    let scale = crate::space::scale(space, p, xs, xs);
    Ok(verifier.attach(BoundChain::ordered(EquationTag::E2_8, functional, links, scale)))
}

/// `||vector_gruss|| <= 1/2 ||X-x|| mad(alpha) <= 1/2 ||X-x|| sqrt(var(alpha))`,
/// extended by `1/4 |A-a| ||X-x||` when a disc for the `alpha_i` is supplied.
pub fn chain_thm25(
    encl_x: &Enclosure,
    disc: Option<&Disc>,
    ws: &WeightedSequence,
    mode: Hypothesis,
) -> Result<BoundChain> {
    same_space(encl_x, ws.space())?;
    let alphas = ws.alphas()?;
    let mut verifier = Verifier::new(mode);
    verifier.require("xs", encl_x.check_ball(ws.xs())?)?;
    if let Some(d) = disc {
        verifier.require("alphas", d.check(alphas)?)?;
    }

    let space = ws.space();
    let p = ws.weights();
    let functional = space.norm(&ws.vector_gruss()?)?;
    let half_diam = 0.5 * encl_x.diameter();
    let mut links = vec![
        Link::new(
            "1/2 ||X-x|| mad(alpha)",
            half_diam * functionals::scalar_mad(p, alphas)?,
            EquationTag::E2_9,
        ),
        Link::new(
            "1/2 ||X-x|| sqrt(var(alpha))",
            half_diam * functionals::scalar_variance(p, alphas)?.sqrt(),
            EquationTag::E2_9,
        ),
    ];
    let equation = match disc {
        Some(d) => {
            links.push(Link::new(
                "1/4 |A-a| ||X-x||",
                0.25 * d.diameter() * encl_x.diameter(),
                EquationTag::E1_2,
            ));
            for l in &mut links[..2] {
                l.equation = EquationTag::E2_11;
            }
            EquationTag::E2_11
        }
        None => EquationTag::E2_9,
    };
    let scale: f64 = p
        .iter()
        .zip(alphas.iter().zip(ws.xs()))
        .map(|(w, (a, x))| w * a.norm() * space.norm_unchecked(x))
        .sum::<f64>()
        .max(1.0);
    Ok(verifier.attach(BoundChain::ordered(equation, functional, links, scale)))
}

/// `|sum p_i alpha_i^2 - (sum p_i alpha_i)^2| <= 1/2 |A-a| mad(alpha) <= 1/2 |A-a| sqrt(var(alpha))`
pub fn chain_complex(
    disc: &Disc,
    p: &ProbabilityVector,
    alphas: &[Scalar],
    mode: Hypothesis,
) -> Result<BoundChain> {
    let mut verifier = Verifier::new(mode);
    verifier.require("alphas", disc.check(alphas)?)?;

    let mean = crate::space::weighted_scalar_mean(p, alphas)?;
    let second: Scalar = p.iter().zip(alphas).map(|(w, a)| a * a * w).sum();
    let functional = (second - mean * mean).norm();
    let half_diam = 0.5 * disc.diameter();
    let links = vec![
        Link::new(
            "1/2 |A-a| mad(alpha)",
            half_diam * functionals::scalar_mad(p, alphas)?,
            EquationTag::R2_7,
        ),
        Link::new(
            "1/2 |A-a| sqrt(var(alpha))",
            half_diam * functionals::scalar_variance(p, alphas)?.sqrt(),
            EquationTag::R2_7,
        ),
    ];
    let scale: f64 = p
        .iter()
        .zip(alphas)
        .map(|(w, a)| w * a.norm_sqr())
        .sum::<f64>()
        .max(1.0);
    Ok(verifier.attach(BoundChain::ordered(EquationTag::R2_7, functional, links, scale)))
}

/// Exponent of the Hölder pairing in the middle forward-difference bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Holder {
    Finite(f64),
    /// `p = inf`, `q = 1`: max-norm against sum-norm.
    Infinite,
}

impl Holder {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Self::Infinite)
        } else if p.is_finite() && p > 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidHolder(p))
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            Self::Finite(p) => p,
            Self::Infinite => f64::INFINITY,
        }
    }

    /// `q` with `1/p + 1/q = 1`; `inf` for `p = inf` is mapped to `q = 1`.
    pub fn conjugate(self) -> f64 {
        match self {
            Self::Finite(p) => p / (p - 1.0),
            Self::Infinite => 1.0,
        }
    }

    fn label(self) -> String {
        match self {
            Self::Finite(p) => format!("p={p}"),
            Self::Infinite => "p=inf".to_string(),
        }
    }
}

impl Default for Holder {
    fn default() -> Self {
        Self::Finite(2.0)
    }
}

impl FromStr for Holder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(Self::Infinite),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("not a Hölder exponent: `{other}`")))?;
                Self::new(p)
            }
        }
    }
}

/// `(sum_k d_k^e)^(1/e)` for nonnegative `d_k`, with `e = inf` the max.
pub fn lp_norm(values: &[f64], e: f64) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    if e == f64::INFINITY || max == 0.0 {
        return max;
    }
    if e == 1.0 {
        return values.iter().sum();
    }
    max * values.iter().map(|d| (d / max).powf(e)).sum::<f64>().powf(1.0 / e)
}

/// `sum_i i^2 p_i - (sum_i i p_i)^2` with 1-based indices.
pub fn index_variance(p: &ProbabilityVector) -> f64 {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (i, w) in p.iter().enumerate() {
        let k = (i + 1) as f64;
        m1 += k * w;
        m2 += k * k * w;
    }
    (m2 - m1 * m1).max(0.0)
}

/// `sum_{j < i} p_i p_j (i - j)`, by prefix sums.
pub fn index_pair_weight(p: &ProbabilityVector) -> f64 {
    let (mut mass, mut moment, mut total) = (0.0, 0.0, 0.0);
    for (i, w) in p.iter().enumerate() {
        let k = (i + 1) as f64;
        // sum_{j<i} p_j (i - j) = i * mass - moment
        total += w * (k * mass - moment);
        mass += w;
        moment += k * w;
    }
    total
}

/// `1/2 sum_i p_i (1 - p_i)`
pub fn pair_mass(p: &ProbabilityVector) -> f64 {
    0.5 * p.iter().map(|w| w * (1.0 - w)).sum::<f64>()
}

/// Closed-form coefficients at `p_i = 1/n`:
/// `(n^2-1)/12`, `(n^2-1)/(6n)`, `(n-1)/(2n)`.
pub fn equal_weight_coefficients(n: usize) -> [f64; 3] {
    let n = n as f64;
    [
        (n * n - 1.0) / 12.0,
        (n * n - 1.0) / (6.0 * n),
        (n - 1.0) / (2.0 * n),
    ]
}

struct DiffNorms {
    dx: Vec<f64>,
    dy: Vec<f64>,
}

impl DiffNorms {
    fn new(space: &Space, xs: &[Vector], ys: &[Vector]) -> Result<Self> {
        let norms = |vs: &[Vector]| -> Result<Vec<f64>> {
            Ok(forward_differences(vs)?
                .iter()
                .map(|d| space.norm_unchecked(d))
                .collect())
        };
        Ok(Self {
            dx: norms(xs)?,
            dy: norms(ys)?,
        })
    }

    fn links(&self, coefficients: [f64; 3], holder: Holder, equation: EquationTag) -> Vec<Link> {
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let sum = |v: &[f64]| v.iter().sum::<f64>();
        let [c1, c2, c3] = coefficients;
        vec![
            Link::new(
                "index variance * max||dx|| * max||dy||",
                c1 * max(&self.dx) * max(&self.dy),
                equation,
            ),
            Link::new(
                format!("index pair weight * holder({})", holder.label()),
                c2 * lp_norm(&self.dx, holder.exponent()) * lp_norm(&self.dy, holder.conjugate()),
                equation,
            ),
            Link::new(
                "pair mass * sum||dx|| * sum||dy||",
                c3 * sum(&self.dx) * sum(&self.dy),
                equation,
            ),
        ]
    }
}

fn require_pairs(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "forward-difference bounds need n >= 2, found {n}"
        )));
    }
    Ok(())
}

fn require_uniform(p: &ProbabilityVector) -> Result<()> {
    if !p.is_uniform(1e-12) {
        return Err(Error::InvalidArgument(
            "equal-weight bounds require p_i = 1/n".into(),
        ));
    }
    Ok(())
}

fn general_coefficients(p: &ProbabilityVector) -> [f64; 3] {
    [index_variance(p), index_pair_weight(p), pair_mass(p)]
}

/// The three forward-difference bounds on `|chebyshev|` for general weights.
pub fn chain_forward_difference(ws: &WeightedSequence, holder: Holder) -> Result<BoundChain> {
    fd_chain(ws, holder, general_coefficients(ws.weights()), EquationTag::E1_6)
}

/// The forward-difference bounds at equal weights, with closed-form coefficients.
pub fn chain_forward_difference_equal(ws: &WeightedSequence, holder: Holder) -> Result<BoundChain> {
    require_uniform(ws.weights())?;
    fd_chain(ws, holder, equal_weight_coefficients(ws.len()), EquationTag::E1_7)
}

fn fd_chain(
    ws: &WeightedSequence,
    holder: Holder,
    coefficients: [f64; 3],
    equation: EquationTag,
) -> Result<BoundChain> {
    require_pairs(ws.len())?;
    let ys = ws.ys()?;
    let norms = DiffNorms::new(ws.space(), ws.xs(), ys)?;
    let functional = ws.chebyshev()?.norm();
    Ok(BoundChain::parallel(
        equation,
        functional,
        norms.links(coefficients, holder, equation),
        ws.scale(),
    ))
}

/// The forward-difference bounds on the variance, for general weights.
pub fn chain_forward_difference_self(
    space: &Space,
    p: &ProbabilityVector,
    xs: &[Vector],
    holder: Holder,
) -> Result<BoundChain> {
    fd_self_chain(space, p, xs, holder, general_coefficients(p), EquationTag::E1_8)
}

/// The forward-difference bounds on the variance at equal weights.
pub fn chain_forward_difference_self_equal(
    space: &Space,
    p: &ProbabilityVector,
    xs: &[Vector],
    holder: Holder,
) -> Result<BoundChain> {
    require_uniform(p)?;
    fd_self_chain(space, p, xs, holder, equal_weight_coefficients(xs.len()), EquationTag::E1_9)
}

fn fd_self_chain(
    space: &Space,
    p: &ProbabilityVector,
    xs: &[Vector],
    holder: Holder,
    coefficients: [f64; 3],
    equation: EquationTag,
) -> Result<BoundChain> {
    p.check_len("xs", xs.len())?;
    space.conforms_all(xs)?;
    require_pairs(xs.len())?;
    let norms = DiffNorms::new(space, xs, xs)?;
    let functional = functionals::variance(space, p, xs)?;
    let mut links = norms.links(coefficients, holder, equation);
    links[0].label = "index variance * max||dx||^2".into();
    links[2].label = "pair mass * (sum||dx||)^2".into();
    let scale = crate::space::scale(space, p, xs, xs);
    Ok(BoundChain::parallel(equation, functional, links, scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> Vector {
        Vector::from_real(&[v]).unwrap()
    }

    fn two_point() -> (Space, WeightedSequence, Enclosure) {
        let r1 = Space::real(1);
        let xs = vec![r(0.0), r(1.0)];
        let ws = WeightedSequence::new(&r1, ProbabilityVector::uniform(2).unwrap(), xs.clone())
            .unwrap()
            .with_ys(xs)
            .unwrap();
        let encl = Enclosure::new(&r1, r(0.0), r(1.0)).unwrap();
        (r1, ws, encl)
    }

    #[test]
    fn thm23_sharp_two_point() {
        let (_, ws, encl) = two_point();
        let chain = chain_thm23(&encl, &ws, Hypothesis::Checked).unwrap();
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.values(), vec![0.25, 0.25]);
        assert!(chain.holds(CHAIN_TOL));
        assert!(chain.hypothesis_verified);
    }

    #[test]
    fn thm23_constant_ys() {
        let (r1, ws, encl) = two_point();
        let ws = ws.with_ys(vec![r(3.0), r(3.0)]).unwrap();
        let chain = chain_thm23(&encl, &ws, Hypothesis::Checked).unwrap();
        assert_eq!(chain.functional_value, 0.0);
        assert_eq!(chain.values(), vec![0.0, 0.0]);
        let _ = r1;
    }

    #[test]
    fn thm23_rejects_points_outside_ball() {
        let (r1, ws, _) = two_point();
        let tight = Enclosure::new(&r1, r(0.0), r(0.5)).unwrap();
        let err = chain_thm23(&tight, &ws, Hypothesis::Checked).unwrap_err();
        match err {
            Error::HypothesisViolated { sequence, report } => {
                assert_eq!(sequence, "xs");
                assert_eq!(report.failures(), vec![1]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let chain = chain_thm23(&tight, &ws, Hypothesis::Unchecked).unwrap();
        assert!(!chain.hypothesis_verified);
    }

    #[test]
    fn rem24_full_equality() {
        let (_, ws, encl) = two_point();
        let chain = chain_rem24(&encl, &encl, &ws, Hypothesis::Checked).unwrap();
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.values(), vec![0.25, 0.25, 0.25]);
        assert_eq!(chain.links[2].equation, EquationTag::E1_4);
        assert_eq!(chain.hypothesis_reports.len(), 2);
    }

    #[test]
    fn selfadjoint_two_point() {
        let (r1, ws, encl) = two_point();
        let chain = chain_selfadjoint(&encl, &r1, ws.weights(), ws.xs(), Hypothesis::Checked).unwrap();
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.values(), vec![0.25, 0.25]);
    }

    #[test]
    fn thm25_two_point() {
        let (_, ws, encl) = two_point();
        let alphas = vec![Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)];
        let ws = ws.with_alphas(alphas).unwrap();
        let disc = Disc::new(Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)).unwrap();
        let chain = chain_thm25(&encl, Some(&disc), &ws, Hypothesis::Checked).unwrap();
        assert_eq!(chain.equation, EquationTag::E2_11);
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.values(), vec![0.25, 0.25, 0.25]);

        let chain = chain_thm25(&encl, None, &ws, Hypothesis::Checked).unwrap();
        assert_eq!(chain.equation, EquationTag::E2_9);
        assert_eq!(chain.links.len(), 2);
    }

    #[test]
    fn thm25_constant_alpha() {
        let (_, ws, encl) = two_point();
        let ws = ws.with_alphas(vec![Scalar::new(0.7, 0.0); 2]).unwrap();
        let chain = chain_thm25(&encl, None, &ws, Hypothesis::Checked).unwrap();
        assert_eq!(chain.functional_value, 0.0);
        assert_eq!(chain.values(), vec![0.0, 0.0]);
    }

    #[test]
    fn complex_chain_two_point() {
        let p = ProbabilityVector::uniform(2).unwrap();
        let alphas = [Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)];
        let disc = Disc::new(Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)).unwrap();
        let chain = chain_complex(&disc, &p, &alphas, Hypothesis::Checked).unwrap();
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.values(), vec![0.25, 0.25]);

        let bad = [Scalar::new(0.0, 0.0), Scalar::new(2.0, 0.0)];
        assert!(chain_complex(&disc, &p, &bad, Hypothesis::Checked).is_err());
    }

    #[test]
    fn forward_difference_two_point_coefficients() {
        let p = ProbabilityVector::uniform(2).unwrap();
        assert_eq!(index_variance(&p), 0.25);
        assert_eq!(index_pair_weight(&p), 0.25);
        assert_eq!(pair_mass(&p), 0.25);
        let (_, ws, _) = two_point();
        let chain = chain_forward_difference(&ws, Holder::Finite(2.0)).unwrap();
        assert_eq!(chain.kind, ChainKind::Parallel);
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.values(), vec![0.25, 0.25, 0.25]);
        assert_eq!(chain.tightest, Some(0));
    }

    #[test]
    fn forward_difference_self_equal_two_point() {
        let (r1, ws, _) = two_point();
        let chain =
            chain_forward_difference_self_equal(&r1, ws.weights(), ws.xs(), Holder::Infinite).unwrap();
        assert_eq!(chain.equation, EquationTag::E1_9);
        assert_eq!(chain.functional_value, 0.25);
        assert_eq!(chain.links[0].value, 0.25);
    }

    #[test]
    fn forward_difference_needs_two_terms() {
        let r1 = Space::real(1);
        let ws = WeightedSequence::new(&r1, ProbabilityVector::uniform(1).unwrap(), vec![r(1.0)])
            .unwrap()
            .with_ys(vec![r(1.0)])
            .unwrap();
        assert!(matches!(
            chain_forward_difference(&ws, Holder::default()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn equal_weight_variant_rejects_unequal_weights() {
        let r1 = Space::real(1);
        let xs = vec![r(0.0), r(1.0)];
        let ws = WeightedSequence::new(&r1, ProbabilityVector::new(vec![0.3, 0.7]).unwrap(), xs.clone())
            .unwrap()
            .with_ys(xs)
            .unwrap();
        assert!(chain_forward_difference_equal(&ws, Holder::default()).is_err());
    }

    #[test]
    fn holder_parsing() {
        assert_eq!("inf".parse::<Holder>().unwrap(), Holder::Infinite);
        assert_eq!("3".parse::<Holder>().unwrap(), Holder::Finite(3.0));
        assert!("1".parse::<Holder>().is_err());
        assert!("0.5".parse::<Holder>().is_err());
        assert!("nope".parse::<Holder>().is_err());
        assert_eq!(Holder::Finite(3.0).conjugate(), 1.5);
    }

    #[test]
    fn lp_norm_limits() {
        let v = [3.0, 4.0];
        assert_eq!(lp_norm(&v, 2.0), 5.0);
        assert_eq!(lp_norm(&v, 1.0), 7.0);
        assert_eq!(lp_norm(&v, f64::INFINITY), 4.0);
        assert_eq!(lp_norm(&[0.0, 0.0], 3.0), 0.0);
        assert!((lp_norm(&[1e200, 1e200], 10.0) - 1e200 * 2f64.powf(0.1)).abs() < 1e186);
    }

    #[test]
    fn equation_tags_round_trip() {
        for tag in EquationTag::ALL {
            assert_eq!(tag.as_str().parse::<EquationTag>().unwrap(), tag);
        }
        assert!("2.4".parse::<EquationTag>().is_err());
    }
}
