//! Finite-dimensional Lie algebras over the rationals, their morphisms and
//! representations.
//!
//! A Lie algebra is stored by its structure constants in the standard basis,
//! `[e_i, e_j] = sum_k c[i][j][k] e_k`. A representation assigns one square
//! matrix to each basis vector; it is flat exactly when it is a Lie algebra
//! homomorphism into the endomorphisms of the fiber.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlinalg::{format_rational, q, QMatrix, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    // c[i][j][k] at (i * dim + j) * dim + k
    structure: Vec<Rational>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra({}, dim {})", self.name, self.dim)
    }
}

impl LieAlgebra {
    /// Raw constructor; only checks the array length. Use
    /// [`check_lie_algebra`] or [`LieAlgebra::validated`] for the axioms.
    pub fn from_structure(name: impl Into<String>, dim: usize, structure: Vec<Rational>) -> Result<Self> {
        if structure.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} structure constants for dimension {dim}",
                structure.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            dim,
            structure,
        })
    }

    /// Builds an algebra from the brackets `[e_i, e_j]` with `i < j`; the
    /// remaining constants follow by antisymmetry.
    pub fn from_brackets(
        name: impl Into<String>,
        dim: usize,
        brackets: &[(usize, usize, Vec<Rational>)],
    ) -> Result<Self> {
        let mut structure = vec![Rational::zero(); dim * dim * dim];
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim || coeffs.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "bracket ({i},{j}) does not fit dimension {dim}"
                )));
            }
            if i >= j {
                return Err(Error::InvalidLieAlgebra(format!(
                    "bracket entries must have i < j, got ({i},{j})"
                )));
            }
            for (k, c) in coeffs.iter().enumerate() {
                structure[(i * dim + j) * dim + k] = c.clone();
                structure[(j * dim + i) * dim + k] = -c;
            }
        }
        Self::from_structure(name, dim, structure)
    }

    /// Fails with `InvalidLieAlgebra` unless antisymmetry and Jacobi hold.
    pub fn validated(self) -> Result<Self> {
        let report = check_lie_algebra(&self);
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidLieAlgebra(report.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> &[Rational] {
        &self.structure
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.structure[(i * self.dim + j) * self.dim + k]
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        let start = (i * self.dim + j) * self.dim;
        &self.structure[start..start + self.dim]
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim;
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let s = &x[i] * &y[j];
                for (k, c) in self.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &s * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad_x = [x, .]`.
    pub fn ad(&self, x: &[Rational]) -> QMatrix {
        let n = self.dim;
        let mut m = QMatrix::zeros(n, n);
        for j in 0..n {
            let mut ej = vec![Rational::zero(); n];
            ej[j] = Rational::one();
            for (k, v) in self.bracket(x, &ej).into_iter().enumerate() {
                m[(k, j)] = v;
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> QMatrix {
        let n = self.dim;
        let mut m = QMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(k, j)] = self.c(i, j, k).clone();
            }
        }
        m
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(Zero::is_zero)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = Rational::one();
        v
    }

    /// Brackets with `i < j` that are nonzero, in serialization order.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, Vec<Rational>)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let b = self.bracket_basis(i, j);
                if b.iter().any(|c| !c.is_zero()) {
                    out.push((i, j, b.to_vec()));
                }
            }
        }
        out
    }

    /// The abelian Lie algebra of dimension `n`.
    pub fn abelian(n: usize) -> Self {
        Self::from_structure(format!("abelian{n}"), n, vec![Rational::zero(); n * n * n])
            .expect("consistent length")
    }

    /// Basis `(x, y, z)` with `[x, y] = z`.
    pub fn heisenberg3() -> Self {
        Self::from_brackets("heisenberg3", 3, &[(0, 1, vec![q(0), q(0), q(1)])])
            .expect("valid constants")
    }

    /// Basis `(h, e, f)` with `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        Self::from_brackets(
            "sl2",
            3,
            &[
                (0, 1, vec![q(0), q(2), q(0)]),
                (0, 2, vec![q(0), q(0), q(-2)]),
                (1, 2, vec![q(1), q(0), q(0)]),
            ],
        )
        .expect("valid constants")
    }

    /// Basis `(e1, e2, e3)` with `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`.
    pub fn so3() -> Self {
        Self::from_brackets(
            "so3",
            3,
            &[
                (0, 1, vec![q(0), q(0), q(1)]),
                (0, 2, vec![q(0), q(-1), q(0)]),
                (1, 2, vec![q(1), q(0), q(0)]),
            ],
        )
        .expect("valid constants")
    }

    /// Looks up a built-in algebra: `abelianN`, `heisenberg3`, `sl2`, `so3`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "heisenberg3" => Some(Self::heisenberg3()),
            "sl2" => Some(Self::sl2()),
            "so3" => Some(Self::so3()),
            _ => name
                .strip_prefix("abelian")
                .and_then(|n| n.parse().ok())
                .map(Self::abelian),
        }
    }
}

/// A violated identity, with the offending indices and residual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `c[i][j][k] + c[j][i][k] != 0`.
    Antisymmetry { i: usize, j: usize, k: usize, residual: String },
    /// Jacobi sum nonzero in coordinate `k`.
    Jacobi { i: usize, j: usize, l: usize, k: usize, residual: String },
    /// `rho([e_i,e_j]) - [rho(e_i), rho(e_j)]` nonzero at `(row, col)`.
    Flatness { i: usize, j: usize, row: usize, col: usize, residual: String },
    /// `phi[e_i,e_j] - [phi e_i, phi e_j]` nonzero in coordinate `k`.
    Morphism { i: usize, j: usize, k: usize, residual: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Antisymmetry { i, j, k, residual } => {
                write!(f, "antisymmetry at ({i},{j},{k}): residual {residual}")
            }
            Violation::Jacobi { i, j, l, k, residual } => {
                write!(f, "Jacobi at ({i},{j},{l}) coordinate {k}: residual {residual}")
            }
            Violation::Flatness { i, j, row, col, residual } => {
                write!(f, "curvature R(e{i},e{j}) entry ({row},{col}) = {residual}")
            }
            Violation::Morphism { i, j, k, residual } => {
                write!(f, "bracket not preserved on (e{i},e{j}) coordinate {k}: residual {residual}")
            }
        }
    }
}

/// Report-style validation result; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", lines.join("; "))
    }
}

/// Reports every violated antisymmetry and Jacobi instance.
pub fn check_lie_algebra(g: &LieAlgebra) -> Report {
    let n = g.dim;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let r = g.c(i, j, k) + g.c(j, i, k);
                if !r.is_zero() {
                    violations.push(Violation::Antisymmetry {
                        i,
                        j,
                        k,
                        residual: format_rational(&r),
                    });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for k in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += g.c(i, j, m) * g.c(m, l, k)
                            + g.c(j, l, m) * g.c(m, i, k)
                            + g.c(l, i, m) * g.c(m, j, k);
                    }
                    if !s.is_zero() {
                        violations.push(Violation::Jacobi {
                            i,
                            j,
                            l,
                            k,
                            residual: format_rational(&s),
                        });
                    }
                }
            }
        }
    }
    Report { violations }
}

/// Lie algebra morphism given by its matrix in the standard bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieMorphism {
    source: LieAlgebra,
    target: LieAlgebra,
    matrix: QMatrix,
}

impl LieMorphism {
    /// Checks the shape and that brackets are preserved.
    pub fn new(source: LieAlgebra, target: LieAlgebra, matrix: QMatrix) -> Result<Self> {
        let m = Self::new_unchecked(source, target, matrix)?;
        let report = m.check();
        if report.is_valid() {
            Ok(m)
        } else {
            Err(Error::InvalidMorphism(report.to_string()))
        }
    }

    /// Shape check only.
    pub fn new_unchecked(source: LieAlgebra, target: LieAlgebra, matrix: QMatrix) -> Result<Self> {
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(Self { source, target, matrix })
    }

    pub fn identity(g: &LieAlgebra) -> Self {
        Self {
            source: g.clone(),
            target: g.clone(),
            matrix: QMatrix::identity(g.dim()),
        }
    }

    pub fn zero(source: &LieAlgebra, target: &LieAlgebra) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            matrix: QMatrix::zeros(target.dim(), source.dim()),
        }
    }

    pub fn source(&self) -> &LieAlgebra {
        &self.source
    }

    pub fn target(&self) -> &LieAlgebra {
        &self.target
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(x)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LieMorphism) -> Result<LieMorphism> {
        if inner.target != self.source {
            return Err(Error::InvalidMorphism(format!(
                "cannot compose: {} is not {}",
                inner.target.name(),
                self.source.name()
            )));
        }
        Ok(LieMorphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &inner.matrix,
        })
    }

    /// Reports every basis pair on which the bracket is not preserved.
    pub fn check(&self) -> Report {
        let n = self.source.dim();
        let mut violations = Vec::new();
        let images: Vec<Vec<Rational>> = (0..n).map(|i| self.matrix.column(i)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.apply(self.source.bracket_basis(i, j));
                let rhs = self.target.bracket(&images[i], &images[j]);
                for (k, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
                    if a != b {
                        violations.push(Violation::Morphism {
                            i,
                            j,
                            k,
                            residual: format_rational(&(a - b)),
                        });
                    }
                }
            }
        }
        Report { violations }
    }
}

/// Linear representation: one `fiber_dim x fiber_dim` matrix per basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    algebra: LieAlgebra,
    fiber_dim: usize,
    rho: Vec<QMatrix>,
}

impl Representation {
    /// Shape check only; flatness is left to [`check_representation`] so that
    /// broken data can still be constructed and diagnosed.
    pub fn new(algebra: LieAlgebra, fiber_dim: usize, rho: Vec<QMatrix>) -> Result<Self> {
        if rho.len() != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for an algebra of dimension {}",
                rho.len(),
                algebra.dim()
            )));
        }
        if let Some(i) = rho.iter().position(|m| m.shape() != (fiber_dim, fiber_dim)) {
            return Err(Error::DimensionMismatch(format!(
                "rho(e{i}) is {}x{}, expected {fiber_dim}x{fiber_dim}",
                rho[i].rows(),
                rho[i].cols()
            )));
        }
        Ok(Self { algebra, fiber_dim, rho })
    }

    pub fn trivial(algebra: &LieAlgebra, fiber_dim: usize) -> Self {
        Self {
            algebra: algebra.clone(),
            fiber_dim,
            rho: vec![QMatrix::zeros(fiber_dim, fiber_dim); algebra.dim()],
        }
    }

    /// `rho(x) = ad_x` from the structure constants.
    pub fn adjoint(algebra: &LieAlgebra) -> Self {
        Self {
            algebra: algebra.clone(),
            fiber_dim: algebra.dim(),
            rho: (0..algebra.dim()).map(|i| algebra.ad_basis(i)).collect(),
        }
    }

    /// Diagonal weights, one row of weights per basis vector. Flat whenever
    /// the algebra is abelian.
    pub fn weights(algebra: &LieAlgebra, weights: &[Vec<Rational>]) -> Result<Self> {
        let fiber = weights.first().map_or(0, Vec::len);
        let rho = weights.iter().map(|w| QMatrix::diag(w)).collect();
        Self::new(algebra.clone(), fiber, rho)
    }

    /// Fails with `InvalidRepresentation` unless flat.
    pub fn validated(self) -> Result<Self> {
        let report = check_representation(&self)?;
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidRepresentation(report.to_string()))
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn rho(&self) -> &[QMatrix] {
        &self.rho
    }

    pub fn rho_basis(&self, i: usize) -> &QMatrix {
        &self.rho[i]
    }

    /// `rho(x) = sum_i x_i rho(e_i)`.
    pub fn rho_of(&self, x: &[Rational]) -> QMatrix {
        let mut m = QMatrix::zeros(self.fiber_dim, self.fiber_dim);
        for (xi, r) in x.iter().zip(&self.rho) {
            if !xi.is_zero() {
                m = &m + &r.scale(xi);
            }
        }
        m
    }

    pub fn is_trivial(&self) -> bool {
        self.rho.iter().all(QMatrix::is_zero)
    }
}

/// Reports every curvature entry `rho([e_i,e_j]) - [rho(e_i), rho(e_j)]` that
/// does not vanish.
pub fn check_representation(r: &Representation) -> Result<Report> {
    let n = r.algebra.dim();
    if r.rho.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for dimension {n}",
            r.rho.len()
        )));
    }
    if let Some(i) = r.rho.iter().position(|m| m.shape() != (r.fiber_dim, r.fiber_dim)) {
        return Err(Error::DimensionMismatch(format!("rho(e{i}) is not square of size {}", r.fiber_dim)));
    }
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = r.rho_of(r.algebra.bracket_basis(i, j));
            let rhs = r.rho[i].commutator(&r.rho[j]);
            let diff = &lhs - &rhs;
            for row in 0..r.fiber_dim {
                for col in 0..r.fiber_dim {
                    let v = &diff[(row, col)];
                    if !v.is_zero() {
                        violations.push(Violation::Flatness {
                            i,
                            j,
                            row,
                            col,
                            residual: format_rational(v),
                        });
                    }
                }
            }
        }
    }
    Ok(Report { violations })
}

/// `g × h` with block structure constants and vanishing cross brackets.
pub fn direct_product(g: &LieAlgebra, h: &LieAlgebra) -> LieAlgebra {
    let (n, m) = (g.dim(), h.dim());
    let d = n + m;
    let mut s = vec![Rational::zero(); d * d * d];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s[(i * d + j) * d + k] = g.c(i, j, k).clone();
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                s[((n + i) * d + n + j) * d + n + k] = h.c(i, j, k).clone();
            }
        }
    }
    LieAlgebra::from_structure(format!("{}x{}", g.name(), h.name()), d, s).expect("consistent length")
}

/// Semidirect sum `g ⋉ V`: basis of `g` followed by the fiber basis, with
/// `[(a1,e1),(a2,e2)] = ([a1,a2], rho(a1)e2 - rho(a2)e1)`.
pub fn semidirect(g: &LieAlgebra, r: &Representation) -> Result<LieAlgebra> {
    let report = check_representation(r)?;
    if !report.is_valid() {
        return Err(Error::InvalidRepresentation(report.to_string()));
    }
    Ok(semidirect_unchecked(g, r))
}

/// Same bracket without the flatness check; Jacobi then fails exactly when
/// the representation is not flat.
pub fn semidirect_unchecked(g: &LieAlgebra, r: &Representation) -> LieAlgebra {
    let (n, m) = (g.dim(), r.fiber_dim());
    let d = n + m;
    let mut s = vec![Rational::zero(); d * d * d];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s[(i * d + j) * d + k] = g.c(i, j, k).clone();
            }
        }
        for b in 0..m {
            for c in 0..m {
                let v = &r.rho_basis(i)[(c, b)];
                if !v.is_zero() {
                    s[(i * d + n + b) * d + n + c] = v.clone();
                    s[((n + b) * d + i) * d + n + c] = -v;
                }
            }
        }
    }
    LieAlgebra::from_structure(format!("{}|x{}", g.name(), m), d, s).expect("consistent length")
}

/// Pullback along `phi`: `rho'(e_i) = rho(phi(e_i))`.
pub fn pullback_rep(phi: &LieMorphism, r: &Representation) -> Result<Representation> {
    if phi.target() != r.algebra() {
        return Err(Error::InvalidRepresentation(format!(
            "representation of {} cannot be pulled back along a morphism into {}",
            r.algebra().name(),
            phi.target().name()
        )));
    }
    let rho = (0..phi.source().dim())
        .map(|i| r.rho_of(&phi.matrix().column(i)))
        .collect();
    Representation::new(phi.source().clone(), r.fiber_dim(), rho)
}

/// Tensor product of two representations of the same algebra:
/// `rho(x) = rhoE(x) ⊗ I + I ⊗ rhoF(x)`.
pub fn tensor_rep(re: &Representation, rf: &Representation) -> Result<Representation> {
    if re.algebra() != rf.algebra() {
        return Err(Error::InvalidRepresentation(
            "tensor_rep needs representations of the same algebra; use tensor_rep_product".into(),
        ));
    }
    let ie = QMatrix::identity(re.fiber_dim());
    let if_ = QMatrix::identity(rf.fiber_dim());
    let rho = re
        .rho()
        .iter()
        .zip(rf.rho())
        .map(|(a, b)| &a.kronecker(&if_) + &ie.kronecker(b))
        .collect();
    Representation::new(re.algebra().clone(), re.fiber_dim() * rf.fiber_dim(), rho)
}

/// External tensor product on `g × h`: `rho(a, b) = rhoE(a) ⊗ I + I ⊗ rhoF(b)`.
pub fn tensor_rep_product(re: &Representation, rf: &Representation) -> Representation {
    let ie = QMatrix::identity(re.fiber_dim());
    let if_ = QMatrix::identity(rf.fiber_dim());
    let rho = re
        .rho()
        .iter()
        .map(|a| a.kronecker(&if_))
        .chain(rf.rho().iter().map(|b| ie.kronecker(b)))
        .collect();
    Representation::new(
        direct_product(re.algebra(), rf.algebra()),
        re.fiber_dim() * rf.fiber_dim(),
        rho,
    )
    .expect("consistent shapes")
}

/// The defining 2-dimensional representation of `sl2`.
pub fn sl2_standard() -> Representation {
    Representation::new(
        LieAlgebra::sl2(),
        2,
        vec![
            QMatrix::from_i64(&[&[1, 0], &[0, -1]]),
            QMatrix::from_i64(&[&[0, 1], &[0, 0]]),
            QMatrix::from_i64(&[&[0, 0], &[1, 0]]),
        ],
    )
    .expect("consistent shapes")
}
