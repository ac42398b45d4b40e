use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use super::complex::{ChainMap, GenericComplex};
use crate::error::{Error, Result};
use crate::qlinalg::{QMatrix, Rational};

/// Finite abstract simplicial complex, oriented by vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    maximal: Vec<Vec<usize>>,
    /// All simplices by dimension, each sorted, lexicographic within a
    /// dimension.
    faces: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// Closure of the given simplices under taking faces.
    pub fn from_simplices(simplices: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse(format!("repeated vertex in simplex {s:?}")));
            }
            if s.is_empty() {
                continue;
            }
            if s.len() > 24 {
                return Err(Error::Parse("simplex dimension too large".into()));
            }
            for mask in 1u32..(1 << s.len()) {
                let face: Vec<usize> = (0..s.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| s[i])
                    .collect();
                all.insert(face);
            }
        }
        let top = all.iter().map(Vec::len).max().unwrap_or(0);
        let mut faces = vec![Vec::new(); top];
        for s in &all {
            faces[s.len() - 1].push(s.clone());
        }
        for f in faces.iter_mut() {
            f.sort();
        }
        let index = faces
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let maximal = all
            .iter()
            .filter(|s| {
                !all.iter()
                    .any(|t| t.len() > s.len() && s.iter().all(|v| t.binary_search(v).is_ok()))
            })
            .cloned()
            .collect();
        Ok(Self { maximal, faces, index })
    }

    /// As in `simplicial.json`: vertices `0..vertices` are always present.
    pub fn with_vertices(vertices: usize, maximal: &[Vec<usize>]) -> Result<Self> {
        if let Some(v) = maximal.iter().flatten().find(|&&v| v >= vertices) {
            return Err(Error::Parse(format!("vertex {v} out of range 0..{vertices}")));
        }
        let mut all: Vec<Vec<usize>> = (0..vertices).map(|v| vec![v]).collect();
        all.extend(maximal.iter().cloned());
        Self::from_simplices(&all)
    }

    pub fn point() -> Self {
        Self::with_vertices(1, &[]).expect("valid")
    }

    /// Boundary of a triangle.
    pub fn circle() -> Self {
        Self::with_vertices(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).expect("valid")
    }

    /// Boundary of a tetrahedron.
    pub fn sphere() -> Self {
        Self::with_vertices(4, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
            .expect("valid")
    }

    /// Square `0-1-2-3-0`, a circle that two arcs `0-1-2` and `2-3-0` cover
    /// with intersection the two points `{0, 2}`.
    pub fn circle_two_arcs() -> (Self, Self, Self) {
        let whole = Self::with_vertices(4, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).expect("valid");
        let u = Self::from_simplices(&[vec![0, 1], vec![1, 2]]).expect("valid");
        let v = Self::from_simplices(&[vec![2, 3], vec![0, 3]]).expect("valid");
        (whole, u, v)
    }

    pub fn maximal_simplices(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn dimension(&self) -> usize {
        self.faces.len().saturating_sub(1)
    }

    pub fn simplices(&self, p: usize) -> &[Vec<usize>] {
        self.faces.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    pub fn total_simplices(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.len()
            .checked_sub(1)
            .and_then(|p| self.index.get(p))
            .is_some_and(|m| m.contains_key(s))
    }

    /// Common simplices of two complexes with the same vertex labels.
    pub fn intersection(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let common: Vec<Vec<usize>> = self
            .faces
            .iter()
            .flatten()
            .filter(|s| other.contains(s))
            .cloned()
            .collect();
        Self::from_simplices(&common).expect("faces of a valid complex")
    }
}

/// Simplicial coboundary `(δf)(σ) = Σ_i (-1)^i f(σ without its i-th vertex)`.
pub fn simplicial_cochain_complex(k: &SimplicialComplex) -> GenericComplex {
    let top = k.faces.len();
    let dims: Vec<usize> = (0..top).map(|p| k.count(p)).collect();
    let diff = (0..top.saturating_sub(1))
        .map(|p| {
            let mut d = QMatrix::zeros(dims[p + 1], dims[p]);
            for (row, s) in k.simplices(p + 1).iter().enumerate() {
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    let col = k.index[p][&face];
                    d[(row, col)] = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
                }
            }
            d
        })
        .collect();
    GenericComplex::new(dims, diff).expect("simplicial coboundary squares to zero")
}

/// Restriction of cochains from `big` to the subcomplex `sub`.
pub fn restriction(big: &SimplicialComplex, sub: &SimplicialComplex) -> Result<ChainMap> {
    let len = big.faces.len();
    let mut maps = Vec::with_capacity(len);
    for p in 0..len {
        let mut m = QMatrix::zeros(sub.count(p), big.count(p));
        for (row, s) in sub.simplices(p).iter().enumerate() {
            let col = *big.index[p]
                .get(s)
                .ok_or_else(|| Error::Parse(format!("simplex {s:?} is not in the larger complex")))?;
            m[(row, col)] = Rational::one();
        }
        maps.push(m);
    }
    if sub.faces.len() > len {
        return Err(Error::Parse("subcomplex has higher dimension than the complex".into()));
    }
    Ok(ChainMap { maps })
}

/// Cochain complex of `sub` padded to the length of `len`.
pub fn padded_cochains(k: &SimplicialComplex, len: usize) -> GenericComplex {
    simplicial_cochain_complex(k).padded(len)
}
