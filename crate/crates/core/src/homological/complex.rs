//! Finite cochain complexes over the rationals and their cohomology.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::qlinalg::{quotient_basis, QMatrix, Rational, SubspaceBasis};

/// `0 -> C^0 -> C^1 -> ... -> C^N -> 0` with `diff[k]: C^k -> C^{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericComplex {
    dims: Vec<usize>,
    diff: Vec<QMatrix>,
}

impl GenericComplex {
    /// Checks shapes and `d_{k+1} d_k = 0`.
    pub fn new(dims: Vec<usize>, diff: Vec<QMatrix>) -> Result<Self> {
        let c = Self::new_unchecked(dims, diff)?;
        if let Some(k) = c.first_nonzero_square() {
            return Err(Error::NotAComplex(k));
        }
        Ok(c)
    }

    /// Checks shapes only.
    pub fn new_unchecked(dims: Vec<usize>, diff: Vec<QMatrix>) -> Result<Self> {
        if diff.len() + 1 != dims.len().max(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} differentials for {} degrees",
                diff.len(),
                dims.len()
            )));
        }
        for (k, d) in diff.iter().enumerate() {
            if d.shape() != (dims[k + 1], dims[k]) {
                return Err(Error::DimensionMismatch(format!(
                    "d_{k} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        Ok(Self { dims, diff })
    }

    /// Complex with all differentials zero.
    pub fn zero_differentials(dims: Vec<usize>) -> Self {
        let diff = dims.windows(2).map(|w| QMatrix::zeros(w[1], w[0])).collect();
        Self { dims, diff }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    /// Number of degrees, `N + 1`.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn diffs(&self) -> &[QMatrix] {
        &self.diff
    }

    /// `d_k`, or the zero map out of the top degree.
    pub fn d(&self, k: usize) -> QMatrix {
        match self.diff.get(k) {
            Some(d) => d.clone(),
            None => QMatrix::zeros(0, self.dim(k)),
        }
    }

    pub fn first_nonzero_square(&self) -> Option<usize> {
        self.diff
            .windows(2)
            .position(|w| !(&w[1] * &w[0]).is_zero())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Complex of length `len`, padding with zero spaces.
    pub fn padded(&self, len: usize) -> GenericComplex {
        if len <= self.len() {
            return self.clone();
        }
        let mut dims = self.dims.clone();
        dims.resize(len, 0);
        let mut diff = self.diff.clone();
        for k in diff.len()..len - 1 {
            diff.push(QMatrix::zeros(dims[k + 1], dims[k]));
        }
        GenericComplex { dims, diff }
    }
}

/// Betti numbers plus rational cocycle representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyResult {
    pub betti: Vec<usize>,
    pub cocycle_dims: Vec<usize>,
    pub coboundary_dims: Vec<usize>,
    /// Per degree, cocycles whose classes form a basis of `H^k`.
    pub representatives: Vec<SubspaceBasis>,
    #[serde(skip)]
    pub coboundaries: Vec<SubspaceBasis>,
    #[serde(skip)]
    pub cocycles: Vec<SubspaceBasis>,
}

impl CohomologyResult {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    /// Whether `v` is a coboundary in degree `k`.
    pub fn is_exact(&self, k: usize, v: &[Rational]) -> bool {
        self.coboundaries[k].contains(v)
    }

    /// Coordinates of the class of the cocycle `z` in the representative
    /// basis; `None` when `z` is not a cocycle.
    pub fn class_coordinates(&self, k: usize, z: &[Rational]) -> Option<Vec<Rational>> {
        let zs = QMatrix::from_columns(z.len(), &[z.to_vec()]);
        self.class_coordinates_many(k, &zs).map(|m| m.column(0))
    }

    /// [`Self::class_coordinates`] for every column of `zs` at once.
    pub fn class_coordinates_many(&self, k: usize, zs: &QMatrix) -> Option<QMatrix> {
        let b = &self.coboundaries[k];
        let r = &self.representatives[k];
        let mut cols = b.vectors.clone();
        cols.extend(r.vectors.iter().cloned());
        let m = QMatrix::from_columns(b.ambient_dim, &cols);
        let x = m.solve_many(zs)?;
        // drop the coboundary coordinates, keep the class part
        let tail = x.entries()[b.len() * x.cols()..].to_vec();
        QMatrix::from_vec(x.rows() - b.len(), x.cols(), tail).ok()
    }
}

/// Exact Betti numbers and representatives; fails on `d^2 != 0`.
pub fn complex_cohomology(c: &GenericComplex) -> Result<CohomologyResult> {
    complex_cohomology_with(c, Exec::default())
}

pub fn complex_cohomology_with(c: &GenericComplex, exec: Exec) -> Result<CohomologyResult> {
    if let Some(k) = c.first_nonzero_square() {
        return Err(Error::NotAComplex(k));
    }
    let per_degree = par::map_range(exec, c.len(), |k| {
        let cocycles = c.d(k).kernel_basis();
        let coboundaries = if k == 0 {
            SubspaceBasis::empty(c.dim(0))
        } else {
            c.diff[k - 1].column_space_basis()
        };
        let reps = quotient_basis(&coboundaries, &cocycles)
            .expect("image of d is inside the kernel once d^2 = 0");
        (cocycles, coboundaries, reps)
    });
    let mut out = CohomologyResult {
        betti: Vec::new(),
        cocycle_dims: Vec::new(),
        coboundary_dims: Vec::new(),
        representatives: Vec::new(),
        coboundaries: Vec::new(),
        cocycles: Vec::new(),
    };
    for (z, b, r) in per_degree {
        out.betti.push(r.len());
        out.cocycle_dims.push(z.len());
        out.coboundary_dims.push(b.len());
        out.representatives.push(r);
        out.coboundaries.push(b);
        out.cocycles.push(z);
    }
    Ok(out)
}

/// Degree-wise matrices of a cochain map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub maps: Vec<QMatrix>,
}

impl ChainMap {
    pub fn identity(c: &GenericComplex) -> Self {
        Self {
            maps: c.dims().iter().map(|&d| QMatrix::identity(d)).collect(),
        }
    }

    /// First degree where `f d = d f` fails (or shapes disagree), if any.
    pub fn commutation_failure(&self, src: &GenericComplex, tgt: &GenericComplex) -> Option<usize> {
        if src.len() != tgt.len() || self.maps.len() != src.len() {
            return Some(0);
        }
        for (k, f) in self.maps.iter().enumerate() {
            if f.shape() != (tgt.dim(k), src.dim(k)) {
                return Some(k);
            }
        }
        (0..src.len().saturating_sub(1))
            .find(|&k| &tgt.diff[k] * &self.maps[k] != &self.maps[k + 1] * &src.diff[k])
    }

    pub fn is_chain_map(&self, src: &GenericComplex, tgt: &GenericComplex) -> bool {
        self.commutation_failure(src, tgt).is_none()
    }

    pub fn compose(&self, inner: &ChainMap) -> ChainMap {
        ChainMap {
            maps: self.maps.iter().zip(&inner.maps).map(|(a, b)| a * b).collect(),
        }
    }
}

/// Matrix of the induced map `H^k(src) -> H^k(tgt)` in the representative
/// bases.
pub fn induced_map(src: &CohomologyResult, tgt: &CohomologyResult, k: usize, f: &QMatrix) -> QMatrix {
    let reps = &src.representatives[k];
    if reps.is_empty() {
        return QMatrix::zeros(tgt.betti[k], 0);
    }
    let images = f * &reps.as_matrix();
    tgt.class_coordinates_many(k, &images)
        .expect("a chain map sends cocycles to cocycles")
}

/// Position of the summand `A^p ⊗ B^q` inside `Tot^{p+q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub p: usize,
    pub q: usize,
    pub offset: usize,
    pub len: usize,
}

/// Total complex of `A ⊗ B` with `D = d_A ⊗ 1 + (-1)^p 1 ⊗ d_B`.
#[derive(Debug, Clone)]
pub struct TensorComplex {
    pub total: GenericComplex,
    /// Per total degree, its summands ordered by increasing `p`.
    pub blocks: Vec<Vec<Block>>,
}

impl TensorComplex {
    pub fn block(&self, p: usize, q: usize) -> Option<Block> {
        self.blocks
            .get(p + q)?
            .iter()
            .copied()
            .find(|b| b.p == p && b.q == q)
    }
}

pub fn tensor_complex(a: &GenericComplex, b: &GenericComplex) -> TensorComplex {
    let top = a.len() + b.len() - 1;
    let mut blocks = Vec::with_capacity(top);
    let mut dims = Vec::with_capacity(top);
    for n in 0..top {
        let mut off = 0;
        let mut row = Vec::new();
        for p in 0..a.len() {
            if n < p || n - p >= b.len() {
                continue;
            }
            let q = n - p;
            let len = a.dim(p) * b.dim(q);
            row.push(Block { p, q, offset: off, len });
            off += len;
        }
        dims.push(off);
        blocks.push(row);
    }
    let mut diff = Vec::with_capacity(top.saturating_sub(1));
    for n in 0..top.saturating_sub(1) {
        let mut d = QMatrix::zeros(dims[n + 1], dims[n]);
        for blk in &blocks[n] {
            let (p, q) = (blk.p, blk.q);
            if let Some(tgt) = blocks[n + 1].iter().find(|t| t.p == p + 1 && t.q == q) {
                let m = a.d(p).kronecker(&QMatrix::identity(b.dim(q)));
                d.set_block(tgt.offset, blk.offset, &m);
            }
            if let Some(tgt) = blocks[n + 1].iter().find(|t| t.p == p && t.q == q + 1) {
                let mut m = QMatrix::identity(a.dim(p)).kronecker(&b.d(q));
                if p % 2 == 1 {
                    m = -&m;
                }
                d.set_block(tgt.offset, blk.offset, &m);
            }
        }
        diff.push(d);
    }
    let total = GenericComplex::new_unchecked(dims, diff).expect("consistent shapes");
    TensorComplex { total, blocks }
}

/// Betti convolution `c[n] = sum_{p+q=n} a[p] b[q]`.
pub fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (p, x) in a.iter().enumerate() {
        for (q, y) in b.iter().enumerate() {
            out[p + q] += x * y;
        }
    }
    out
}

/// Drops trailing zeros; Betti vectors of different padding compare equal
/// after trimming.
pub fn trim_betti(b: &[usize]) -> Vec<usize> {
    let end = b.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
    b[..end].to_vec()
}
