//! JSON input formats. Rationals are strings `"p/q"` or `"p"`.
//!
//! Algebra and representation references are either inline objects, a path
//! ending in `.json` (relative to the referencing file), or the name of a
//! built-in algebra (`sl2`, `so3`, `heisenberg3`, `abelianN`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cylinder::{PolyCylinderForm, PolyTerms};
use crate::error::{Error, Result};
use crate::homological::SimplicialComplex;
use crate::liealg::{LieAlgebra, Representation};
use crate::qlinalg::{parse_rational, to_f64, QMatrix, Rational};

/// Parses JSON text, reporting the failing field path with line and column.
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!(
            "{what}: field `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_json(&read(path)?, &path.display().to_string())
}

pub fn rationals(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

/// Matrix given as a list of rows of rational strings.
pub fn matrix_from_rows(rows: &[Vec<String>]) -> Result<QMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    let parsed = rows.iter().map(|r| rationals(r)).collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(&parsed)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraFile {
    pub name: String,
    pub dim: usize,
    pub brackets: Vec<BracketEntry>,
}

impl LieAlgebraFile {
    pub fn build(&self) -> Result<LieAlgebra> {
        let brackets = self
            .brackets
            .iter()
            .map(|b| Ok((b.i, b.j, rationals(&b.coeffs)?)))
            .collect::<Result<Vec<_>>>()?;
        LieAlgebra::from_brackets(self.name.clone(), self.dim, &brackets)?.validated()
    }

    pub fn from_algebra(g: &LieAlgebra) -> Self {
        Self {
            name: g.name().to_string(),
            dim: g.dim(),
            brackets: g
                .nonzero_brackets()
                .into_iter()
                .map(|(i, j, c)| BracketEntry {
                    i,
                    j,
                    coeffs: c.iter().map(crate::qlinalg::format_rational).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Named(String),
    Inline(LieAlgebraFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationFile {
    pub algebra: AlgebraRef,
    pub fiber_dim: usize,
    /// One row-major matrix per basis vector.
    pub rho: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepRef {
    /// A path, or `trivial` / `adjoint` for the algebra in context.
    Named(String),
    Inline(RepresentationFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialFile {
    pub vertices: usize,
    pub maximal_simplices: Vec<Vec<usize>>,
}

impl SimplicialFile {
    pub fn build(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::with_vertices(self.vertices, &self.maximal_simplices)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SimplicialRef {
    /// A path, or `point` / `circle` / `sphere`.
    Named(String),
    Inline(SimplicialFile),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MvPair {
    pub u: SimplicialRef,
    pub v: SimplicialRef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub nerve: SimplicialRef,
    pub algebra: AlgebraRef,
    #[serde(default)]
    pub rep: Option<RepRef>,
    /// Two subcomplexes covering a space, for Mayer–Vietoris.
    #[serde(default)]
    pub mv: Option<MvPair>,
}

/// Number or rational string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Str(String),
}

impl Scalar {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Scalar::Num(x) => Ok(*x),
            Scalar::Str(s) => Ok(to_f64(&parse_rational(s)?)),
        }
    }

    /// Exact value for strings and for integral numbers.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Str(s) => parse_rational(s).ok(),
            Scalar::Num(x) if x.fract() == 0.0 && x.abs() < 1e15 => Some(Rational::from_integer((*x as i64).into())),
            Scalar::Num(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Poly,
    Samples,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub kind: CurveKind,
    /// Polynomial coefficients by power of `t`, or samples on `[0, 1]`.
    pub data: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyFile {
    pub source: AlgebraRef,
    pub target: AlgebraRef,
    /// Rows of the matrix of `ψ_0`.
    pub psi0: Vec<Vec<String>>,
    pub curve: CurveFile,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    /// Representation of the target for the gauge and cohomology checks.
    #[serde(default)]
    pub rep: Option<RepRef>,
    /// Integrate `ψ' = M ψ` with this matrix instead; a negative control
    /// that is expected to fail.
    #[serde(default)]
    pub control: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowCheck {
    Derivation {
        d: Vec<Vec<f64>>,
        e: Vec<f64>,
        h: f64,
    },
    BracketInvariance {
        algebra: AlgebraRef,
        a: Vec<String>,
        lambda: String,
        #[serde(default)]
        terms: Option<usize>,
    },
    Semidirect {
        algebra: AlgebraRef,
        rep: RepRef,
        a: Vec<String>,
        b: Vec<String>,
        e: Vec<String>,
        lambda: String,
        #[serde(default)]
        terms: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowsFile {
    #[serde(default)]
    pub tol: Option<f64>,
    pub checks: Vec<FlowCheck>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTermFile {
    pub exp: u32,
    pub coords: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub degree: usize,
    #[serde(default)]
    pub base: Vec<PolyTermFile>,
    #[serde(default)]
    pub dt: Vec<PolyTermFile>,
}

impl FormFile {
    pub fn build(&self) -> Result<PolyCylinderForm> {
        let terms = |ts: &[PolyTermFile]| -> Result<PolyTerms> {
            let mut out = PolyTerms::new();
            for t in ts {
                if out.insert(t.exp, rationals(&t.coords)?).is_some() {
                    return Err(Error::Parse(format!("exponent {} listed twice", t.exp)));
                }
            }
            Ok(out)
        };
        let f = PolyCylinderForm {
            degree: self.degree,
            base: terms(&self.base)?,
            dt: terms(&self.dt)?,
        };
        if f.degree == 0 && !f.dt.is_empty() {
            return Err(Error::Parse("degree 0 forms have no dt part".into()));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomForms {
    pub seed: u64,
    pub count: usize,
    pub max_exp: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderFile {
    pub algebra: AlgebraRef,
    #[serde(default)]
    pub rep: Option<RepRef>,
    #[serde(default)]
    pub forms: Vec<FormFile>,
    #[serde(default)]
    pub random: Option<RandomForms>,
    /// Times `t` at which `I_t* ∘ Pr* = id` is checked.
    #[serde(default)]
    pub inclusion_times: Vec<String>,
    /// Polynomial degree for the truncated cohomology comparison.
    #[serde(default)]
    pub truncation: Option<u32>,
}

/// Resolves references relative to the directory of the file being read.
#[derive(Debug, Clone)]
pub struct Resolver {
    base: PathBuf,
}

impl Resolver {
    pub fn for_file(path: &Path) -> Self {
        Self {
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        }
    }

    pub fn new(base: impl Into<PathBuf>) -> Self {
        Self { base: base.into() }
    }

    fn path(&self, p: &str) -> PathBuf {
        self.base.join(p)
    }

    pub fn algebra(&self, r: &AlgebraRef) -> Result<LieAlgebra> {
        match r {
            AlgebraRef::Inline(f) => f.build(),
            AlgebraRef::Named(s) if s.ends_with(".json") => {
                let path = self.path(s);
                load::<LieAlgebraFile>(&path)?.build()
            }
            AlgebraRef::Named(s) => LieAlgebra::named(s).ok_or_else(|| Error::Parse(format!("unknown algebra `{s}`"))),
        }
    }

    /// Representation over `g`; `None` means the trivial line.
    pub fn rep(&self, r: Option<&RepRef>, g: &LieAlgebra) -> Result<Representation> {
        match r {
            None => Ok(Representation::trivial(g, 1)),
            Some(RepRef::Named(s)) if s == "trivial" => Ok(Representation::trivial(g, 1)),
            Some(RepRef::Named(s)) if s == "adjoint" => Ok(Representation::adjoint(g)),
            Some(RepRef::Named(s)) => {
                let path = self.path(s);
                Resolver::for_file(&path).rep_file(&load::<RepresentationFile>(&path)?, Some(g))
            }
            Some(RepRef::Inline(f)) => self.rep_file(f, Some(g)),
        }
    }

    /// Builds a representation file; with `expected`, its algebra must match.
    pub fn rep_file(&self, f: &RepresentationFile, expected: Option<&LieAlgebra>) -> Result<Representation> {
        let g = self.algebra(&f.algebra)?;
        if let Some(e) = expected {
            if e.structure() != g.structure() {
                return Err(Error::Parse(format!(
                    "representation is over `{}`, which does not match `{}`",
                    g.name(),
                    e.name()
                )));
            }
        }
        let g = expected.cloned().unwrap_or(g);
        if f.rho.len() != g.dim() {
            return Err(Error::Parse(format!("field `rho`: {} matrices for an algebra of dimension {}", f.rho.len(), g.dim())));
        }
        let m = f.fiber_dim;
        let mats = f
            .rho
            .iter()
            .enumerate()
            .map(|(i, entries)| {
                if entries.len() != m * m {
                    return Err(Error::Parse(format!(
                        "field `rho[{i}]`: {} entries, expected {}",
                        entries.len(),
                        m * m
                    )));
                }
                QMatrix::from_vec(m, m, rationals(entries)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Representation::new(g, m, mats)
    }

    pub fn simplicial(&self, r: &SimplicialRef) -> Result<SimplicialComplex> {
        match r {
            SimplicialRef::Inline(f) => f.build(),
            SimplicialRef::Named(s) if s == "point" => Ok(SimplicialComplex::point()),
            SimplicialRef::Named(s) if s == "circle" => Ok(SimplicialComplex::circle()),
            SimplicialRef::Named(s) if s == "sphere" => Ok(SimplicialComplex::sphere()),
            SimplicialRef::Named(s) => load::<SimplicialFile>(&self.path(s))?.build(),
        }
    }
}

/// Reads a representation file, resolving its algebra reference.
pub fn load_representation(path: &Path) -> Result<Representation> {
    Resolver::for_file(path).rep_file(&load(path)?, None)
}

pub fn load_algebra(path: &Path) -> Result<LieAlgebra> {
    load::<LieAlgebraFile>(path)?.build()
}
