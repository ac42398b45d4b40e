//! Exact linear algebra over the rationals.
//!
//! Ranks and echelon forms are computed with fraction-free (Bareiss)
//! elimination: every row is first scaled to integer entries, and the
//! elimination then stays inside `BigInt` with exact divisions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapters for rationals written as strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &[Rational],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let strs: Vec<String> = v.iter().map(format_rational).collect();
            strs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let strs = Vec::<String>::deserialize(d)?;
            strs.iter()
                .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().map(|&x| q(x)));
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(row.iter().cloned());
        }
        Ok(Self { rows: r, cols: c, data })
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &QMatrix) -> QMatrix {
        &(self * other) - &(other * self)
    }

    /// Kronecker product, shape `(a.rows*b.rows) x (a.cols*b.cols)`.
    pub fn kronecker(&self, b: &QMatrix) -> QMatrix {
        let mut out = QMatrix::zeros(self.rows * b.rows, self.cols * b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        let x = &b[(k, l)];
                        if !x.is_zero() {
                            out[(i * b.rows + k, j * b.cols + l)] = a * x;
                        }
                    }
                }
            }
        }
        out
    }

    /// Stacks blocks horizontally; all must share the row count.
    pub fn hstack(blocks: &[&QMatrix]) -> QMatrix {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = QMatrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for r in 0..rows {
                for c in 0..b.cols {
                    out[(r, off + c)] = b[(r, c)].clone();
                }
            }
            off += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[&QMatrix]) -> QMatrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        QMatrix { rows, cols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(a: &QMatrix, b: &QMatrix) -> QMatrix {
        let mut out = QMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(a.rows, a.cols, b);
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)].clone();
            }
        }
    }

    /// Rows scaled to primitive-free integer form (each row multiplied by the
    /// lcm of its denominators).
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&l / x.denom()))
                    .collect()
            })
            .collect()
    }

    /// Fraction-free row echelon form.
    pub fn echelon(&self) -> Echelon {
        bareiss(self.integer_rows(), self.cols)
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the right null space.
    pub fn kernel_basis(&self) -> SubspaceBasis {
        let ech = self.echelon();
        let vectors = ech.null_space(self.cols);
        SubspaceBasis {
            ambient_dim: self.cols,
            vectors,
        }
    }

    /// Independent columns spanning the column space (the pivot columns).
    pub fn column_space_basis(&self) -> SubspaceBasis {
        let ech = self.echelon();
        SubspaceBasis {
            ambient_dim: self.rows,
            vectors: ech.pivots.iter().map(|&c| self.column(c)).collect(),
        }
    }

    /// Some solution `x` of `self * x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let aug = QMatrix::hstack(&[self, &QMatrix::from_columns(self.rows, &[b.to_vec()])]);
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return None;
        }
        Some(ech.particular_solution(self.cols))
    }

    /// Solves `self * X = B` column by column with a single elimination;
    /// `None` if any column is inconsistent.
    pub fn solve_many(&self, b: &QMatrix) -> Option<QMatrix> {
        assert_eq!(b.rows, self.rows);
        let aug = QMatrix::hstack(&[self, b]);
        let ech = aug.echelon();
        let (n, m) = (self.cols, b.cols);
        let pivots: Vec<usize> = ech.pivots.iter().copied().filter(|&p| p < n).collect();
        // a pivot in the right-hand block marks an inconsistent column
        if ech.pivots.len() != pivots.len() {
            return None;
        }
        let cols: Vec<Vec<Rational>> = (0..m)
            .map(|j| {
                let mut v = ech.back_substitute_with(&pivots, vec![Rational::zero(); n], Some(n + j));
                v.truncate(n);
                v
            })
            .collect();
        Some(QMatrix::from_columns(n, &cols))
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        let aug = QMatrix::hstack(&[self, &QMatrix::identity(n)]);
        let ech = aug.echelon();
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return None;
        }
        for j in 0..n {
            cols.push(ech.solve_with_rhs_column(n, n + j));
        }
        Some(QMatrix::from_columns(n, &cols))
    }

    /// Exact determinant of a square matrix.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rational::one();
        }
        let rows = self.integer_rows();
        let scale = (0..n).fold(BigInt::one(), |acc, r| {
            acc * self.row(r).iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
        });
        let (ech, swaps) = bareiss_with_swaps(rows, n);
        if ech.pivots.len() < n {
            return Rational::zero();
        }
        let mut d = ech.rows[n - 1][n - 1].clone();
        if swaps % 2 == 1 {
            d = -d;
        }
        Rational::new(d, scale)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

/// Integer row echelon form produced by Bareiss elimination.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Echelon rows; only the first `pivots.len()` are nonzero.
    pub rows: Vec<Vec<BigInt>>,
    /// Pivot column of each nonzero row, strictly increasing.
    pub pivots: Vec<usize>,
}

impl Echelon {
    /// Back substitution with the free variables set to the given values.
    /// `values[c]` must hold the free values; pivot entries are overwritten.
    fn back_substitute(&self, values: Vec<Rational>, rhs_col: Option<usize>) -> Vec<Rational> {
        self.back_substitute_with(&self.pivots, values, rhs_col)
    }

    /// As [`Echelon::back_substitute`] with only the leading `pivots` rows.
    fn back_substitute_with(&self, pivots: &[usize], mut values: Vec<Rational>, rhs_col: Option<usize>) -> Vec<Rational> {
        for (r, &p) in pivots.iter().enumerate().rev() {
            let row = &self.rows[r];
            let mut acc = match rhs_col {
                Some(c) => Rational::from_integer(row[c].clone()),
                None => Rational::zero(),
            };
            for (j, v) in values.iter().enumerate().skip(p + 1) {
                if !v.is_zero() && !row[j].is_zero() {
                    acc -= v * &row[j];
                }
            }
            values[p] = acc / Rational::from_integer(row[p].clone());
        }
        values
    }

    fn null_space(&self, cols: usize) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Rational::zero(); cols];
                v[free] = Rational::one();
                self.back_substitute(v, None)
            })
            .collect()
    }

    /// Solution of the system whose right-hand side is column `cols` of the
    /// augmented echelon form.
    fn particular_solution(&self, cols: usize) -> Vec<Rational> {
        self.solve_with_rhs_column(cols, cols)
    }

    fn solve_with_rhs_column(&self, cols: usize, rhs: usize) -> Vec<Rational> {
        // Only pivots in the coefficient block take part.
        let pivots: Vec<usize> = self.pivots.iter().copied().filter(|&p| p < cols).collect();
        let mut v = self.back_substitute_with(&pivots, vec![Rational::zero(); cols], Some(rhs));
        v.truncate(cols);
        v
    }
}

fn bareiss(rows: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    bareiss_with_swaps(rows, cols).0
}

/// Fraction-free Gaussian elimination. Every division is exact by Sylvester's
/// identity. Returns the echelon form and the number of row swaps.
fn bareiss_with_swaps(mut rows: Vec<Vec<BigInt>>, cols: usize) -> (Echelon, usize) {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut swaps = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        // Smallest nonzero entry keeps the numbers tame.
        let Some(p) = (r..nrows)
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| rows[i][c].abs())
        else {
            continue;
        };
        if p != r {
            rows.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
            row[c] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    (Echelon { rows, pivots }, swaps)
}

/// Linearly independent vectors in a fixed ambient space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    #[serde(with = "serde_vecs")]
    pub vectors: Vec<Vec<Rational>>,
}

mod serde_vecs {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &[Vec<Rational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let strs = Vec::<Vec<String>>::deserialize(d)?;
        strs.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

impl SubspaceBasis {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: Vec::new(),
        }
    }

    pub fn standard(ambient_dim: usize) -> Self {
        let vectors = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![Rational::zero(); ambient_dim];
                v[i] = Rational::one();
                v
            })
            .collect();
        Self { ambient_dim, vectors }
    }

    /// Checks independence and lengths.
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "basis vector not of length {ambient_dim}"
            )));
        }
        let b = Self { ambient_dim, vectors };
        if b.as_matrix().rank() != b.len() {
            return Err(Error::DimensionMismatch("basis vectors are dependent".into()));
        }
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vectors as matrix columns.
    pub fn as_matrix(&self) -> QMatrix {
        QMatrix::from_columns(self.ambient_dim, &self.vectors)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut span = IncrementalSpan::new(self.ambient_dim);
        for b in &self.vectors {
            span.insert(b);
        }
        span.contains(v)
    }

    /// Coordinates of `v` in this basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        self.as_matrix().solve(v)
    }
}

/// Incrementally maintained reduced basis for span and membership queries.
#[derive(Debug, Clone)]
pub struct IncrementalSpan {
    dim: usize,
    // (pivot column, vector with a 1 in the pivot column and zeros in the
    // pivot columns of all other stored vectors)
    reduced: Vec<(usize, Vec<Rational>)>,
}

impl IncrementalSpan {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            reduced: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        for (p, b) in &self.reduced {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            for (x, y) in w.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for (_, b) in self.reduced.iter_mut() {
            if b[p].is_zero() {
                continue;
            }
            let f = b[p].clone();
            for (x, y) in b.iter_mut().zip(&w) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.reduced.push((p, w));
        true
    }
}

/// Vectors of `big` completing `sub` to a basis of `span(big)`. Their classes
/// form a basis of `span(big) / span(sub)`.
pub fn quotient_basis(sub: &SubspaceBasis, big: &SubspaceBasis) -> Result<SubspaceBasis> {
    if sub.ambient_dim != big.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            sub.ambient_dim, big.ambient_dim
        )));
    }
    let mut big_span = IncrementalSpan::new(big.ambient_dim);
    for v in &big.vectors {
        big_span.insert(v);
    }
    if let Some(i) = sub.vectors.iter().position(|v| !big_span.contains(v)) {
        return Err(Error::SubspaceNotContained(i));
    }
    let mut span = IncrementalSpan::new(big.ambient_dim);
    for v in &sub.vectors {
        span.insert(v);
    }
    let vectors = big
        .vectors
        .iter()
        .filter(|v| span.insert(v))
        .cloned()
        .collect();
    Ok(SubspaceBasis {
        ambient_dim: big.ambient_dim,
        vectors,
    })
}

pub fn rank(m: &QMatrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &QMatrix) -> SubspaceBasis {
    m.kernel_basis()
}

pub fn kronecker(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.kronecker(b)
}

pub fn vec_is_zero(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Rational], s: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_i64(rows)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::identity(2)), 2);
        assert_eq!(rank(&QMatrix::zeros(2, 2)), 0);
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&QMatrix::zeros(0, 3)), 0);
    }

    #[test]
    fn rank_with_fractions() {
        let a = QMatrix::from_rows(&[
            vec![qf(1, 2), qf(1, 3)],
            vec![qf(3, 2), q(1)],
        ])
        .unwrap();
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[&[1, -1]]));
        assert_eq!(k.vectors, vec![vec![q(1), q(1)]]);
        assert!(kernel_basis(&QMatrix::identity(3)).is_empty());
        let z = kernel_basis(&QMatrix::zeros(3, 3));
        assert_eq!(z, SubspaceBasis::standard(3));
    }

    #[test]
    fn quotient_examples() {
        let e1 = vec![q(1), q(0)];
        let e2 = vec![q(0), q(1)];
        let big1 = SubspaceBasis { ambient_dim: 2, vectors: vec![e1.clone()] };
        let r = quotient_basis(&SubspaceBasis::empty(2), &big1).unwrap();
        assert_eq!(r.vectors, vec![e1.clone()]);

        let big = SubspaceBasis::standard(2);
        let r = quotient_basis(&big1, &big).unwrap();
        assert_eq!(r.vectors, vec![e2]);

        let diag = SubspaceBasis { ambient_dim: 2, vectors: vec![vec![q(1), q(1)]] };
        assert_eq!(quotient_basis(&diag, &big).unwrap().len(), 1);
    }

    #[test]
    fn quotient_rejects_outside_vector() {
        let small = SubspaceBasis { ambient_dim: 2, vectors: vec![vec![q(1), q(0)]] };
        let other = SubspaceBasis { ambient_dim: 2, vectors: vec![vec![q(0), q(1)]] };
        assert!(matches!(
            quotient_basis(&other, &small),
            Err(Error::SubspaceNotContained(0))
        ));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(&QMatrix::identity(2), &QMatrix::identity(3)), QMatrix::identity(6));
        assert_eq!(kronecker(&m(&[&[2]]), &m(&[&[3]])), m(&[&[6]]));
        let a = QMatrix::diag(&[q(1), q(2)]);
        let b = QMatrix::diag(&[q(1), q(3)]);
        assert_eq!(kronecker(&a, &b), QMatrix::diag(&[q(1), q(3), q(2), q(6)]));
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = a.solve(&[q(3), q(2)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, QMatrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert!(m(&[&[1, 2], &[2, 4]]).solve(&[q(1), q(0)]).is_none());
    }

    #[test]
    fn solve_many_matches_columnwise() {
        // rank deficient, consistent right-hand sides
        let a = m(&[&[1, 2, 0], &[2, 4, 1], &[3, 6, 1]]);
        let b = m(&[&[1, 0], &[3, 1], &[4, 1]]);
        let x = a.solve_many(&b).unwrap();
        assert_eq!(&a * &x, b);
        for j in 0..2 {
            assert_eq!(x.column(j), a.solve(&b.column(j)).unwrap());
        }
        assert!(a.solve_many(&m(&[&[1], &[0], &[0]])).is_none());
        assert_eq!(a.solve_many(&QMatrix::zeros(3, 0)).unwrap().shape(), (3, 0));
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).det(), q(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), q(-1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), q(0));
        let a = QMatrix::from_rows(&[vec![qf(1, 2), q(0)], vec![q(0), qf(2, 3)]]).unwrap();
        assert_eq!(a.det(), qf(1, 3));
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).det(), q(-3));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&qf(6, -4)), "-3/2");
        assert_eq!(format_rational(&q(5)), "5");
        assert_eq!(parse_rational(" -3/2 ").unwrap(), qf(-3, 2));
        assert_eq!(parse_rational("4/2").unwrap(), q(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
