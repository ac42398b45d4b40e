//! Twisted Chevalley–Eilenberg complexes `Ω^•(g, E) = Λ^• g* ⊗ E`.
//!
//! Coordinates of `Ω^k(g, E)` are indexed by `(monomial, fiber index)` as
//! `monomial_index * fiber_dim + a`, monomials in lexicographic order (see
//! [`crate::exterior`]). For `ω ∈ Ω^k` the differential is
//!
//! ```text
//! (dω)(a_1..a_{k+1}) = Σ_j (-1)^{j+1} ρ(a_j) ω(.. â_j ..)
//!                    + Σ_{j<l} (-1)^{j+l} ω([a_j, a_l], .. â_j .. â_l ..)
//! ```
//!
//! with 1-based positions, evaluated on sorted basis tuples.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{indices_of, mask_of, wedge_sign, Mask, Monomials};
use crate::homological::{
    complex_cohomology_with, induced_map, ChainMap, CohomologyResult, GenericComplex,
};
use crate::liealg::{check_representation, pullback_rep, LieAlgebra, LieMorphism, Representation};
use crate::par::Exec;
use crate::qlinalg::{QMatrix, Rational};

/// One contribution to the block `(row monomial, column monomial)` of `d_k`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Term {
    /// `sign * ρ(e_basis)` on the fiber.
    Rho { sign: i32, basis: usize },
    /// `coeff * I` on the fiber.
    Scalar(Rational),
}

/// Block contributions of `d_k`, as `(row monomial index, column monomial
/// index, term)`. Shared by the exact and floating-point assemblies.
pub(crate) fn differential_terms(g: &LieAlgebra, mons: &Monomials, k: usize) -> Vec<(usize, usize, Term)> {
    let n = g.dim();
    let mut terms = Vec::new();
    for (row, &jmask) in mons.degree(k + 1).iter().enumerate() {
        let js = indices_of(jmask);
        for (p, &aj) in js.iter().enumerate() {
            let col = mons.index_of(jmask & !(1 << aj));
            let sign = if p % 2 == 0 { 1 } else { -1 };
            terms.push((row, col, Term::Rho { sign, basis: aj }));
        }
        for p in 0..js.len() {
            for l in p + 1..js.len() {
                let rest: Mask = jmask & !(1 << js[p]) & !(1 << js[l]);
                let sign = if (p + l) % 2 == 0 { 1 } else { -1 };
                for m in 0..n {
                    let c = g.c(js[p], js[l], m);
                    if c.is_zero() || rest & (1 << m) != 0 {
                        continue;
                    }
                    // move e_m from the front to its sorted position
                    let pos = (rest & ((1 << m) - 1)).count_ones();
                    let s = if pos % 2 == 0 { sign } else { -sign };
                    let col = mons.index_of(rest | (1 << m));
                    terms.push((row, col, Term::Scalar(c * Rational::from_integer(s.into()))));
                }
            }
        }
    }
    terms
}

fn assemble(g: &LieAlgebra, r: &Representation, mons: &Monomials, k: usize) -> QMatrix {
    let f = r.fiber_dim();
    let mut d = QMatrix::zeros(mons.count(k + 1) * f, mons.count(k) * f);
    for (row, col, term) in differential_terms(g, mons, k) {
        match term {
            Term::Rho { sign, basis } => {
                let m = r.rho_basis(basis);
                for a in 0..f {
                    for b in 0..f {
                        let v = &m[(a, b)];
                        if v.is_zero() {
                            continue;
                        }
                        let entry = &mut d[(row * f + a, col * f + b)];
                        if sign > 0 {
                            *entry += v;
                        } else {
                            *entry -= v;
                        }
                    }
                }
            }
            Term::Scalar(c) => {
                for a in 0..f {
                    d[(row * f + a, col * f + a)] += &c;
                }
            }
        }
    }
    d
}

/// Element of `Ω^k(g, E)` in monomial coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub fiber_dim: usize,
    pub coords: Vec<Rational>,
}

impl Cochain {
    pub fn zero(mons: &Monomials, degree: usize, fiber_dim: usize) -> Self {
        Self {
            degree,
            fiber_dim,
            coords: vec![Rational::zero(); mons.count(degree) * fiber_dim],
        }
    }

    /// Scalar monomial `α_{i1} ∧ ... ∧ α_{ik}` (indices in any order, sign
    /// applied).
    pub fn monomial(mons: &Monomials, indices: &[usize]) -> Self {
        let mut c = Self::zero(mons, indices.len(), 1);
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return c;
        }
        c.coords[mons.index_of(mask_of(indices))] = permutation_sign(indices);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

fn permutation_sign(indices: &[usize]) -> Rational {
    let inversions = (0..indices.len())
        .flat_map(|i| (i + 1..indices.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| indices[i] > indices[j])
        .count();
    if inversions % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Chevalley–Eilenberg complex of a Lie algebra with coefficients in a
/// representation.
#[derive(Debug, Clone)]
pub struct CEComplex {
    algebra: LieAlgebra,
    rep: Representation,
    monomials: Monomials,
    complex: GenericComplex,
}

/// Builds `Ω^•(g, E)` and verifies `d² = 0`.
pub fn build_ce_complex(g: &LieAlgebra, r: &Representation) -> Result<CEComplex> {
    let c = build_ce_complex_unchecked(g, r)?;
    if let Some(k) = c.complex.first_nonzero_square() {
        return Err(Error::FlatnessViolated { degree: k });
    }
    Ok(c)
}

/// Builds the matrices without the `d² = 0` check.
pub fn build_ce_complex_unchecked(g: &LieAlgebra, r: &Representation) -> Result<CEComplex> {
    if r.algebra() != g {
        return Err(Error::InvalidRepresentation(format!(
            "representation is over {}, not {}",
            r.algebra().name(),
            g.name()
        )));
    }
    check_representation(r)?;
    let n = g.dim();
    let mons = Monomials::new(n);
    let f = r.fiber_dim();
    let dims: Vec<usize> = (0..=n).map(|k| mons.count(k) * f).collect();
    let diff: Vec<QMatrix> = (0..n).map(|k| assemble(g, r, &mons, k)).collect();
    let complex = GenericComplex::new_unchecked(dims, diff)?;
    Ok(CEComplex {
        algebra: g.clone(),
        rep: r.clone(),
        monomials: mons,
        complex,
    })
}

impl CEComplex {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn monomials(&self) -> &Monomials {
        &self.monomials
    }

    pub fn complex(&self) -> &GenericComplex {
        &self.complex
    }

    pub fn fiber_dim(&self) -> usize {
        self.rep.fiber_dim()
    }

    pub fn top_degree(&self) -> usize {
        self.algebra.dim()
    }

    pub fn dim(&self, k: usize) -> usize {
        self.complex.dim(k)
    }

    pub fn d(&self, k: usize) -> QMatrix {
        self.complex.d(k)
    }

    /// Coordinate position of `(monomial, fiber index)`.
    pub fn position(&self, mask: Mask, a: usize) -> usize {
        self.monomials.index_of(mask) * self.fiber_dim() + a
    }

    pub fn apply_d(&self, c: &Cochain) -> Cochain {
        let coords = if c.degree < self.top_degree() {
            self.complex.diffs()[c.degree].mul_vec(&c.coords)
        } else {
            Vec::new()
        };
        Cochain {
            degree: c.degree + 1,
            fiber_dim: c.fiber_dim,
            coords,
        }
    }

    pub fn cohomology(&self) -> CohomologyResult {
        cohomology(self)
    }

    /// Exterior product of a scalar form with an `E`-valued form of this
    /// complex. Fails with `DegreeOverflow` when the degrees add up past the
    /// top degree, where the product is zero.
    pub fn wedge(&self, omega: &Cochain, eta: &Cochain) -> Result<Cochain> {
        wedge(&self.monomials, omega, eta)
    }
}

pub fn cohomology(c: &CEComplex) -> CohomologyResult {
    cohomology_with(c, Exec::default())
}

pub fn cohomology_with(c: &CEComplex, exec: Exec) -> CohomologyResult {
    complex_cohomology_with(&c.complex, exec).expect("CE complexes are built with d^2 = 0")
}

/// `ω ∧ η` for scalar `ω ∈ Ω^k(g)` and `η ∈ Ω^l(g, E)`.
pub fn wedge(mons: &Monomials, omega: &Cochain, eta: &Cochain) -> Result<Cochain> {
    if omega.fiber_dim != 1 {
        return Err(Error::DimensionMismatch("left wedge factor must be scalar valued".into()));
    }
    let (k, l, f) = (omega.degree, eta.degree, eta.fiber_dim);
    if omega.coords.len() != mons.count(k) || eta.coords.len() != mons.count(l) * f {
        return Err(Error::DimensionMismatch("cochain does not match the monomial basis".into()));
    }
    if k + l > mons.n() {
        return Err(Error::DegreeOverflow { degree: k + l });
    }
    let mut out = Cochain::zero(mons, k + l, f);
    for (i, &im) in mons.degree(k).iter().enumerate() {
        let w = &omega.coords[i];
        if w.is_zero() {
            continue;
        }
        for (j, &jm) in mons.degree(l).iter().enumerate() {
            let s = wedge_sign(im, jm);
            if s == 0 {
                continue;
            }
            let target = mons.index_of(im | jm);
            for a in 0..f {
                let e = &eta.coords[j * f + a];
                if e.is_zero() {
                    continue;
                }
                let v = w * e;
                if s > 0 {
                    out.coords[target * f + a] += v;
                } else {
                    out.coords[target * f + a] -= v;
                }
            }
        }
    }
    Ok(out)
}

/// `Λ^k(φ)` in monomial coordinates: entry `(J, I)` is the minor of `φ` on
/// rows `J` (target indices) and columns `I` (source indices).
pub fn exterior_power(phi: &QMatrix, src: &Monomials, tgt: &Monomials, k: usize) -> QMatrix {
    let mut m = QMatrix::zeros(tgt.count(k), src.count(k));
    for (c, &im) in src.degree(k).iter().enumerate() {
        let cols = indices_of(im);
        for (r, &jm) in tgt.degree(k).iter().enumerate() {
            let rows = indices_of(jm);
            let mut minor = QMatrix::zeros(k, k);
            for (a, &ri) in rows.iter().enumerate() {
                for (b, &ci) in cols.iter().enumerate() {
                    minor[(a, b)] = phi[(ri, ci)].clone();
                }
            }
            m[(r, c)] = minor.det();
        }
    }
    m
}

/// The pullback chain map together with the complex it lands in.
#[derive(Debug, Clone)]
pub struct PullbackMap {
    pub map: ChainMap,
    /// `Ω^•(source, φ*E)`.
    pub target: CEComplex,
}

/// `Φ*: Ω^•(h, E) → Ω^•(g, φ*E)`, `(Φ*ω)(a_1..a_k) = ω(φa_1, .., φa_k)`.
pub fn pullback_cochain_map(phi: &LieMorphism, complex: &CEComplex) -> Result<PullbackMap> {
    let pulled = pullback_rep(phi, complex.rep())?;
    let target = build_ce_complex(phi.source(), &pulled)?;
    let f = complex.fiber_dim();
    let id = QMatrix::identity(f);
    let maps = (0..=phi.source().dim())
        .map(|k| {
            if k > phi.target().dim() {
                return QMatrix::zeros(target.dim(k), 0);
            }
            exterior_power(phi.matrix(), target.monomials(), complex.monomials(), k)
                .transpose()
                .kronecker(&id)
        })
        .collect::<Vec<_>>();
    // degrees above dim h exist only on the source side and vice versa
    let maps = pad_chain_map(maps, complex, &target);
    Ok(PullbackMap {
        map: ChainMap { maps },
        target,
    })
}

fn pad_chain_map(mut maps: Vec<QMatrix>, src: &CEComplex, tgt: &CEComplex) -> Vec<QMatrix> {
    let len = src.complex().len().max(tgt.complex().len());
    maps.truncate(len);
    for k in maps.len()..len {
        maps.push(QMatrix::zeros(tgt.dim(k), src.dim(k)));
    }
    maps
}

/// Checks `d ∘ Φ* = Φ* ∘ d` in every degree, allowing complexes of different
/// lengths.
pub fn is_chain_map_between(map: &ChainMap, src: &CEComplex, tgt: &CEComplex) -> bool {
    let len = src.complex().len().max(tgt.complex().len());
    let s = src.complex().padded(len);
    let t = tgt.complex().padded(len);
    map.is_chain_map(&s, &t)
}

/// A fiber isomorphism `θ` with `ρ(e_i) = θ^{-1} ρ'(e_i) θ` for all `i`.
#[derive(Debug, Clone)]
pub struct GaugeMap {
    source_rep: Representation,
    target_rep: Representation,
    theta: QMatrix,
}

impl GaugeMap {
    pub fn new(source_rep: Representation, target_rep: Representation, theta: QMatrix) -> Result<Self> {
        if source_rep.algebra() != target_rep.algebra() {
            return Err(Error::InvalidRepresentation("gauge maps need a common algebra".into()));
        }
        let f = source_rep.fiber_dim();
        if target_rep.fiber_dim() != f || theta.shape() != (f, f) {
            return Err(Error::DimensionMismatch("gauge map fiber dimensions differ".into()));
        }
        if theta.inverse().is_none() {
            return Err(Error::NotInvertible);
        }
        for (i, (a, b)) in source_rep.rho().iter().zip(target_rep.rho()).enumerate() {
            if &theta * a != b * &theta {
                return Err(Error::NotGaugeEquivalent(i));
            }
        }
        Ok(Self {
            source_rep,
            target_rep,
            theta,
        })
    }

    pub fn theta(&self) -> &QMatrix {
        &self.theta
    }

    pub fn source_rep(&self) -> &Representation {
        &self.source_rep
    }

    pub fn target_rep(&self) -> &Representation {
        &self.target_rep
    }
}

/// `θ_*` at cochain and cohomology level.
#[derive(Debug, Clone)]
pub struct GaugeTransport {
    pub map: ChainMap,
    pub target: CEComplex,
    pub source_cohomology: CohomologyResult,
    pub target_cohomology: CohomologyResult,
    /// Induced isomorphism per degree in representative coordinates.
    pub induced: Vec<QMatrix>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeSummary {
    pub source_betti: Vec<usize>,
    pub target_betti: Vec<usize>,
    pub induced_invertible: bool,
}

/// `ω ↦ θ ∘ ω`, i.e. `I ⊗ θ` in each degree.
pub fn gauge_transport(gm: &GaugeMap, c: &CEComplex) -> Result<GaugeTransport> {
    if c.rep() != gm.source_rep() {
        return Err(Error::InvalidRepresentation(
            "complex is not built over the gauge map's source representation".into(),
        ));
    }
    let target = build_ce_complex(c.algebra(), gm.target_rep())?;
    let maps: Vec<QMatrix> = (0..=c.top_degree())
        .map(|k| QMatrix::identity(c.monomials().count(k)).kronecker(gm.theta()))
        .collect();
    let map = ChainMap { maps };
    if let Some(k) = map.commutation_failure(c.complex(), target.complex()) {
        return Err(Error::NotGaugeEquivalent(k));
    }
    let hs = cohomology(c);
    let ht = cohomology(&target);
    let induced = (0..=c.top_degree())
        .map(|k| induced_map(&hs, &ht, k, &map.maps[k]))
        .collect();
    Ok(GaugeTransport {
        map,
        target,
        source_cohomology: hs,
        target_cohomology: ht,
        induced,
    })
}

impl GaugeTransport {
    pub fn summary(&self) -> GaugeSummary {
        GaugeSummary {
            source_betti: self.source_cohomology.betti.clone(),
            target_betti: self.target_cohomology.betti.clone(),
            induced_invertible: self
                .induced
                .iter()
                .all(|m| m.is_square() && m.rank() == m.rows()),
        }
    }
}
