//! Instance files: the JSON document consumed by the CLI and produced for
//! sharpness witnesses.
//!
//! ```json
//! {
//!   "space": { "dim": 1, "field": "real" },
//!   "weights": [0.5, 0.5],
//!   "sequences": { "xs": [[0], [1]], "ys": [[0], [1]] },
//!   "enclosures": { "x_lo": [0], "x_hi": [1] }
//! }
//! ```
//!
//! Complex scalars are `[re, im]` pairs, reals are plain numbers. Reports
//! reuse this schema and add a `results` member, which is ignored on input.

use serde::{Deserialize, Serialize};

use crate::bounds::Holder;
use crate::conditions::{Disc, Enclosure};
use crate::error::{Error, Result};
use crate::functionals::WeightedSequence;
use crate::space::{Field, ProbabilityVector, Scalar, Space, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for ScalarRepr {
    fn from(s: Scalar) -> Self {
        if s.im == 0.0 {
            Self::Real(s.re)
        } else {
            Self::Complex([s.re, s.im])
        }
    }
}

impl From<ScalarRepr> for Scalar {
    fn from(s: ScalarRepr) -> Self {
        match s {
            ScalarRepr::Real(re) => Scalar::new(re, 0.0),
            ScalarRepr::Complex([re, im]) => Scalar::new(re, im),
        }
    }
}

pub type VectorRepr = Vec<ScalarRepr>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dim: usize,
    pub field: Field,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sequences {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<VectorRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ys: Option<Vec<VectorRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<ScalarRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zs: Option<Vec<VectorRepr>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Enclosures {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_hi: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_lo: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_hi: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ScalarRepr>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub big_a: Option<ScalarRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<VectorRepr>,
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub big_m: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_lo: Option<VectorRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_hi: Option<VectorRepr>,
}

impl Enclosures {
    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

impl Sequences {
    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HolderRepr {
    Number(f64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Sequences::is_empty")]
    pub sequences: Sequences,
    #[serde(default, skip_serializing_if = "Enclosures::is_empty")]
    pub enclosures: Enclosures,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_p: Option<HolderRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

fn at(location: impl Into<String>, err: impl std::fmt::Display) -> Error {
    Error::Parse {
        location: location.into(),
        message: err.to_string(),
    }
}

/// A validated instance: every vector conforms to the space, every present
/// sequence (and the weights) share one length, and every enclosure is
/// nondegenerate.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub space: Space,
    pub weights: Option<Vec<f64>>,
    pub xs: Option<Vec<Vector>>,
    pub ys: Option<Vec<Vector>>,
    pub alphas: Option<Vec<Scalar>>,
    pub zs: Option<Vec<Vector>>,
    pub x_enclosure: Option<Enclosure>,
    pub y_enclosure: Option<Enclosure>,
    pub disc: Option<Disc>,
    pub grad_enclosure: Option<Enclosure>,
    pub z_enclosure: Option<Enclosure>,
    pub oracle: Option<String>,
    pub holder: Option<Holder>,
}

impl Instance {
    pub fn new(space: Space) -> Self {
        Self {
            space,
            weights: None,
            xs: None,
            ys: None,
            alphas: None,
            zs: None,
            x_enclosure: None,
            y_enclosure: None,
            disc: None,
            grad_enclosure: None,
            z_enclosure: None,
            oracle: None,
            holder: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&InstanceFile::parse(text)?)
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let spec = &file.space;
        let space = match &spec.metric {
            Some(m) => Space::with_metric(spec.dim, spec.field, m.clone()),
            None => Space::new(spec.dim, spec.field),
        }
        .map_err(|e| at("space", e))?;

        let vector = |path: &str, repr: &VectorRepr| -> Result<Vector> {
            let coords: Vec<Scalar> = repr.iter().map(|&s| s.into()).collect();
            space.vector(coords).map_err(|e| at(path, e))
        };
        let vectors = |name: &str, reprs: &Option<Vec<VectorRepr>>| -> Result<Option<Vec<Vector>>> {
            reprs
                .as_ref()
                .map(|vs| {
                    vs.iter()
                        .enumerate()
                        .map(|(i, v)| vector(&format!("sequences.{name}[{i}]"), v))
                        .collect()
                })
                .transpose()
        };
        let scalar = |path: &str, s: ScalarRepr| -> Result<Scalar> {
            let s: Scalar = s.into();
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(at(path, "non-finite scalar"));
            }
            if space.is_real() && s.im != 0.0 {
                return Err(at(path, "complex scalar in a real space"));
            }
            Ok(s)
        };

        let mut inst = Instance::new(space.clone());
        inst.xs = vectors("xs", &file.sequences.xs)?;
        inst.ys = vectors("ys", &file.sequences.ys)?;
        inst.zs = vectors("zs", &file.sequences.zs)?;
        inst.alphas = file
            .sequences
            .alphas
            .as_ref()
            .map(|al| {
                al.iter()
                    .enumerate()
                    .map(|(i, &s)| scalar(&format!("sequences.alphas[{i}]"), s))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        let mut n = None;
        let lengths = [
            ("weights", file.weights.as_ref().map(Vec::len)),
            ("sequences.xs", inst.xs.as_ref().map(Vec::len)),
            ("sequences.ys", inst.ys.as_ref().map(Vec::len)),
            ("sequences.alphas", inst.alphas.as_ref().map(Vec::len)),
            ("sequences.zs", inst.zs.as_ref().map(Vec::len)),
        ];
        for (path, len) in lengths {
            match (n, len) {
                (_, None) => {}
                (_, Some(0)) => return Err(at(path, "empty sequence")),
                (None, Some(l)) => n = Some((path, l)),
                (Some((first, expected)), Some(l)) if l != expected => {
                    return Err(at(
                        path,
                        format!("has {l} entries but {first} has {expected}"),
                    ))
                }
                _ => {}
            }
        }
        if let Some(w) = &file.weights {
            if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(at(format!("weights[{i}]"), "weights must be finite and nonnegative"));
            }
        }
        inst.weights = file.weights.clone();

        let e = &file.enclosures;
        let pair = |lo_name: &str, hi_name: &str, lo: &Option<VectorRepr>, hi: &Option<VectorRepr>| -> Result<Option<Enclosure>> {
            match (lo, hi) {
                (None, None) => Ok(None),
                (Some(_), None) => Err(at(format!("enclosures.{hi_name}"), format!("missing, but {lo_name} is given"))),
                (None, Some(_)) => Err(at(format!("enclosures.{lo_name}"), format!("missing, but {hi_name} is given"))),
                (Some(l), Some(h)) => {
                    let l = vector(&format!("enclosures.{lo_name}"), l)?;
                    let h = vector(&format!("enclosures.{hi_name}"), h)?;
                    Enclosure::new(&space, l, h)
                        .map(Some)
                        .map_err(|err| at(format!("enclosures.{lo_name}/{hi_name}"), err))
                }
            }
        };
        inst.x_enclosure = pair("x_lo", "x_hi", &e.x_lo, &e.x_hi)?;
        inst.y_enclosure = pair("y_lo", "y_hi", &e.y_lo, &e.y_hi)?;
        inst.grad_enclosure = pair("m", "M", &e.m, &e.big_m)?;
        inst.z_enclosure = pair("z_lo", "z_hi", &e.z_lo, &e.z_hi)?;
        inst.disc = match (e.a, e.big_a) {
            (None, None) => None,
            (Some(_), None) => return Err(at("enclosures.A", "missing, but a is given")),
            (None, Some(_)) => return Err(at("enclosures.a", "missing, but A is given")),
            (Some(a), Some(big_a)) => {
                let a = scalar("enclosures.a", a)?;
                let big_a = scalar("enclosures.A", big_a)?;
                Some(Disc::new(a, big_a).map_err(|err| at("enclosures.a/A", err))?)
            }
        };

        inst.oracle = file.oracle.clone();
        inst.holder = match &file.holder_p {
            None => None,
            Some(HolderRepr::Number(p)) => Some(Holder::new(*p).map_err(|err| at("holder_p", err))?),
            Some(HolderRepr::Text(s)) => Some(s.parse().map_err(|err| at("holder_p", err))?),
        };
        Ok(inst)
    }

    /// Common length of the weights and sequences, if any are present.
    pub fn len(&self) -> Option<usize> {
        self.weights
            .as_ref()
            .map(Vec::len)
            .or(self.xs.as_ref().map(Vec::len))
            .or(self.ys.as_ref().map(Vec::len))
            .or(self.alphas.as_ref().map(Vec::len))
            .or(self.zs.as_ref().map(Vec::len))
    }

    /// The weights as a probability vector, or equal weights when absent.
    pub fn probability(&self) -> Result<ProbabilityVector> {
        match &self.weights {
            Some(w) => ProbabilityVector::new(w.clone()),
            None => ProbabilityVector::uniform(self.len().unwrap_or(0)),
        }
    }

    pub fn require_xs(&self) -> Result<&[Vector]> {
        self.xs.as_deref().ok_or_else(|| missing("sequences.xs"))
    }

    pub fn require_ys(&self) -> Result<&[Vector]> {
        self.ys.as_deref().ok_or_else(|| missing("sequences.ys"))
    }

    pub fn require_alphas(&self) -> Result<&[Scalar]> {
        self.alphas.as_deref().ok_or_else(|| missing("sequences.alphas"))
    }

    pub fn require_zs(&self) -> Result<&[Vector]> {
        self.zs.as_deref().ok_or_else(|| missing("sequences.zs"))
    }

    /// `(p, xs)` plus `ys` and/or `alphas` when requested.
    pub fn weighted_sequence(&self, with_ys: bool, with_alphas: bool) -> Result<WeightedSequence> {
        let mut ws = WeightedSequence::new(&self.space, self.probability()?, self.require_xs()?.to_vec())?;
        if with_ys {
            ws = ws.with_ys(self.require_ys()?.to_vec())?;
        }
        if with_alphas {
            ws = ws.with_alphas(self.require_alphas()?.to_vec())?;
        }
        Ok(ws)
    }

    pub fn to_file(&self) -> InstanceFile {
        let vec_repr = |v: &Vector| -> VectorRepr { v.coords().iter().map(|&c| c.into()).collect() };
        let seq = |vs: &Option<Vec<Vector>>| vs.as_ref().map(|vs| vs.iter().map(vec_repr).collect());
        let ends = |e: &Option<Enclosure>| match e {
            Some(e) => (Some(vec_repr(e.lo())), Some(vec_repr(e.hi()))),
            None => (None, None),
        };
        let (x_lo, x_hi) = ends(&self.x_enclosure);
        let (y_lo, y_hi) = ends(&self.y_enclosure);
        let (m, big_m) = ends(&self.grad_enclosure);
        let (z_lo, z_hi) = ends(&self.z_enclosure);
        InstanceFile {
            space: SpaceSpec {
                dim: self.space.dim(),
                field: self.space.field(),
                metric: self.space.metric().map(<[f64]>::to_vec),
            },
            weights: self.weights.clone(),
            sequences: Sequences {
                xs: seq(&self.xs),
                ys: seq(&self.ys),
                alphas: self.alphas.as_ref().map(|a| a.iter().map(|&s| s.into()).collect()),
                zs: seq(&self.zs),
            },
            enclosures: Enclosures {
                x_lo,
                x_hi,
                y_lo,
                y_hi,
                a: self.disc.as_ref().map(|d| d.a().into()),
                big_a: self.disc.as_ref().map(|d| d.big_a().into()),
                m,
                big_m,
                z_lo,
                z_hi,
            },
            oracle: self.oracle.clone(),
            holder_p: self.holder.map(|h| match h {
                Holder::Finite(p) => HolderRepr::Number(p),
                Holder::Infinite => HolderRepr::Text("inf".into()),
            }),
            results: None,
        }
    }
}

fn missing(path: &str) -> Error {
    at(path, "required by this command but not present")
}
