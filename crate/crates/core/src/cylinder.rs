//! Cylinder complex `Ω^•(TI × g, pr^!F)` with coefficients polynomial in `t`.
//!
//! A form of degree `k` is `Σ_e t^e ω_e + Σ_e t^e dt ∧ η_e` with
//! `ω_e ∈ Ω^k(g,F)` and `η_e ∈ Ω^{k-1}(g,F)`. Everything acts on the sparse
//! terms directly; there is no fixed-size matrix model because `K` raises the
//! polynomial degree.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ce::{build_ce_complex, cohomology, CEComplex, Cochain};
use crate::error::{Error, Result};
use crate::exterior::indices_of;
use crate::homological::{complex_cohomology, GenericComplex};
use crate::liealg::{LieAlgebra, Representation};
use crate::par::{self, Exec};
use crate::qlinalg::{format_rational, vec_add, vec_is_zero, vec_scale, QMatrix, Rational};

/// Sparse polynomial with vector coefficients, keyed by exponent of `t`.
pub type PolyTerms = BTreeMap<u32, Vec<Rational>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCylinderForm {
    pub degree: usize,
    /// `t^e · Pr*ω_e`.
    pub base: PolyTerms,
    /// `t^e · dt ∧ Pr*η_e`.
    pub dt: PolyTerms,
}

impl PolyCylinderForm {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            base: PolyTerms::new(),
            dt: PolyTerms::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.base.values().all(|v| vec_is_zero(v)) && self.dt.values().all(|v| vec_is_zero(v))
    }

    /// Largest exponent of `t` present, if any.
    pub fn poly_degree(&self) -> Option<u32> {
        self.base.keys().chain(self.dt.keys()).copied().max()
    }

    fn normalized(mut self) -> Self {
        self.base.retain(|_, v| !vec_is_zero(v));
        self.dt.retain(|_, v| !vec_is_zero(v));
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        merge(&mut out.base, &other.base, Rational::one());
        merge(&mut out.dt, &other.dt, Rational::one());
        out.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "subtracting forms of different degree");
        let mut out = self.clone();
        merge(&mut out.base, &other.base, -Rational::one());
        merge(&mut out.dt, &other.dt, -Rational::one());
        out.normalized()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let f = |terms: &PolyTerms| terms.iter().map(|(&e, v)| (e, vec_scale(v, c))).collect();
        Self {
            degree: self.degree,
            base: f(&self.base),
            dt: f(&self.dt),
        }
        .normalized()
    }
}

fn merge(into: &mut PolyTerms, from: &PolyTerms, c: Rational) {
    for (&e, v) in from {
        let v = vec_scale(v, &c);
        match into.get_mut(&e) {
            Some(w) => *w = vec_add(w, &v),
            None => {
                into.insert(e, v);
            }
        }
    }
}

/// `(-1)^{k-1}`.
fn k_sign(k: usize) -> Rational {
    if k % 2 == 1 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// One nonzero coordinate of a form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualTerm {
    /// `"base"` or `"dt"`.
    pub part: &'static str,
    pub exponent: u32,
    pub monomial: Vec<usize>,
    pub fiber_index: usize,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CylinderIdentityReport {
    pub degree: usize,
    pub zero: bool,
    pub first_nonzero: Option<ResidualTerm>,
}

#[derive(Debug, Clone)]
pub struct CylinderComplex {
    ce: CEComplex,
}

impl CylinderComplex {
    pub fn new(g: &LieAlgebra, r: &Representation) -> Result<Self> {
        Ok(Self::from_ce(build_ce_complex(g, r)?))
    }

    pub fn from_ce(ce: CEComplex) -> Self {
        Self { ce }
    }

    pub fn ce(&self) -> &CEComplex {
        &self.ce
    }

    /// Top degree of the cylinder complex, `dim g + 1`.
    pub fn top_degree(&self) -> usize {
        self.ce.top_degree() + 1
    }

    pub fn base_dim(&self, k: usize) -> usize {
        self.ce.dim(k)
    }

    pub fn dt_dim(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.ce.dim(k - 1)
        }
    }

    pub fn check_shape(&self, f: &PolyCylinderForm) -> Result<()> {
        let (b, t) = (self.base_dim(f.degree), self.dt_dim(f.degree));
        if f.base.values().any(|v| v.len() != b) || f.dt.values().any(|v| v.len() != t) {
            return Err(Error::DimensionMismatch(format!(
                "degree {} cylinder form needs base vectors of length {b} and dt vectors of length {t}",
                f.degree
            )));
        }
        Ok(())
    }

    fn d_ce(&self, k: usize, v: &[Rational]) -> Vec<Rational> {
        if k >= self.ce.top_degree() {
            return Vec::new();
        }
        self.ce.complex().diffs()[k].mul_vec(v)
    }

    /// `d(p·ω) = p'·dt∧ω + p·dω`, `d(p·dt∧η) = -p·dt∧dη`.
    pub fn differential(&self, f: &PolyCylinderForm) -> PolyCylinderForm {
        let k = f.degree;
        let mut out = PolyCylinderForm::zero(k + 1);
        for (&e, w) in &f.base {
            if k < self.ce.top_degree() {
                out.base.insert(e, self.d_ce(k, w));
            }
            if e > 0 {
                let dw = vec_scale(w, &Rational::from_integer(e.into()));
                merge(&mut out.dt, &BTreeMap::from([(e - 1, dw)]), Rational::one());
            }
        }
        if k >= 1 {
            for (&e, eta) in &f.dt {
                if k - 1 < self.ce.top_degree() {
                    let d_eta = self.d_ce(k - 1, eta);
                    merge(&mut out.dt, &BTreeMap::from([(e, d_eta)]), -Rational::one());
                }
            }
        }
        out.normalized()
    }

    /// `Pr*ω`: constant base part.
    pub fn proj_pullback(&self, omega: &Cochain) -> PolyCylinderForm {
        let mut out = PolyCylinderForm::zero(omega.degree);
        out.base.insert(0, omega.coords.clone());
        out.normalized()
    }

    /// `I_{t0}*`: evaluates the base part at `t0` and drops the `dt` part.
    pub fn incl_pullback(&self, t0: &Rational, f: &PolyCylinderForm) -> Cochain {
        let mut coords = vec![Rational::zero(); self.base_dim(f.degree)];
        for (&e, w) in &f.base {
            let c = pow(t0, e);
            coords = vec_add(&coords, &vec_scale(w, &c));
        }
        Cochain {
            degree: f.degree,
            fiber_dim: self.ce.fiber_dim(),
            coords,
        }
    }

    /// `K(h·Pr*ω) = 0`, `K(g·dt∧Pr*η) = (-1)^{k-1} (∫_0^t g) Pr*η`. On degree
    /// `0` forms the result is the zero form, reported in degree 0.
    pub fn homotopy_k(&self, f: &PolyCylinderForm) -> PolyCylinderForm {
        let k = f.degree;
        if k == 0 {
            return PolyCylinderForm::zero(0);
        }
        let s = k_sign(k);
        let mut out = PolyCylinderForm::zero(k - 1);
        for (&e, eta) in &f.dt {
            let c = &s / Rational::from_integer((e + 1).into());
            out.base.insert(e + 1, vec_scale(eta, &c));
        }
        out.normalized()
    }

    /// `(id - Pr*∘I_0*)(f) - (-1)^{k-1}(dK - Kd)(f)`.
    pub fn homotopy_residual(&self, f: &PolyCylinderForm) -> PolyCylinderForm {
        let k = f.degree;
        let lhs = f.sub(&self.proj_pullback(&self.incl_pullback(&Rational::zero(), f)));
        let kd = self.homotopy_k(&self.differential(f));
        // K vanishes on degree 0 forms, and so does dK
        let dk = if k == 0 {
            PolyCylinderForm::zero(0)
        } else {
            self.differential(&self.homotopy_k(f))
        };
        let rhs = dk.sub(&kd).scale(&k_sign(k));
        lhs.sub(&rhs)
    }

    pub fn verify_th4_identity(&self, f: &PolyCylinderForm) -> CylinderIdentityReport {
        let r = self.homotopy_residual(f);
        CylinderIdentityReport {
            degree: f.degree,
            zero: r.is_zero(),
            first_nonzero: self.first_nonzero(&r),
        }
    }

    pub fn verify_batch(&self, forms: &[PolyCylinderForm], exec: Exec) -> Vec<CylinderIdentityReport> {
        par::map(exec, forms.iter().collect(), |f| self.verify_th4_identity(f))
    }

    /// Coordinates of `f` read back as `(exponent, monomial, fiber index)`.
    pub fn first_nonzero(&self, f: &PolyCylinderForm) -> Option<ResidualTerm> {
        let fd = self.ce.fiber_dim();
        let mons = self.ce.monomials();
        let find = |part: &'static str, terms: &PolyTerms, k: usize| {
            terms.iter().find_map(|(&e, v)| {
                v.iter().position(|x| !x.is_zero()).map(|i| ResidualTerm {
                    part,
                    exponent: e,
                    monomial: indices_of(mons.degree(k)[i / fd]),
                    fiber_index: i % fd,
                    value: format_rational(&v[i]),
                })
            })
        };
        find("base", &f.base, f.degree).or_else(|| {
            if f.degree == 0 {
                None
            } else {
                find("dt", &f.dt, f.degree - 1)
            }
        })
    }

    /// For closed `f`, the primitive `(-1)^{k-1} K(f)` of `f - Pr*I_0*f`.
    /// Returns `None` when `f` is not closed or the primitive fails.
    pub fn primitive(&self, f: &PolyCylinderForm) -> Option<PolyCylinderForm> {
        if f.degree == 0 || !self.differential(f).is_zero() {
            return None;
        }
        let p = self.homotopy_k(f).scale(&k_sign(f.degree));
        let target = f.sub(&self.proj_pullback(&self.incl_pullback(&Rational::zero(), f)));
        (self.differential(&p) == target).then_some(p)
    }

    /// Forms with base exponents `<= max_exp` and `dt` exponents
    /// `< max_exp`, flattened as base blocks then `dt` blocks. This subspace
    /// is closed under `d`.
    pub fn truncated_dim(&self, k: usize, max_exp: u32) -> usize {
        let e = max_exp as usize;
        (e + 1) * self.base_dim(k) + e * self.dt_dim(k)
    }

    fn unflatten(&self, k: usize, max_exp: u32, v: &[Rational]) -> PolyCylinderForm {
        let (b, t) = (self.base_dim(k), self.dt_dim(k));
        let mut f = PolyCylinderForm::zero(k);
        for e in 0..=max_exp {
            let s = e as usize * b;
            f.base.insert(e, v[s..s + b].to_vec());
        }
        let off = (max_exp as usize + 1) * b;
        for e in 0..max_exp {
            let s = off + e as usize * t;
            f.dt.insert(e, v[s..s + t].to_vec());
        }
        f.normalized()
    }

    fn flatten(&self, f: &PolyCylinderForm, max_exp: u32) -> Vec<Rational> {
        let (b, t) = (self.base_dim(f.degree), self.dt_dim(f.degree));
        let mut v = vec![Rational::zero(); self.truncated_dim(f.degree, max_exp)];
        for (&e, w) in &f.base {
            let s = e as usize * b;
            v[s..s + b].clone_from_slice(w);
        }
        let off = (max_exp as usize + 1) * b;
        for (&e, w) in &f.dt {
            let s = off + e as usize * t;
            v[s..s + t].clone_from_slice(w);
        }
        v
    }

    /// The truncated complex at polynomial degree `max_exp`.
    pub fn truncated_complex(&self, max_exp: u32) -> Result<GenericComplex> {
        let top = self.top_degree();
        let dims: Vec<usize> = (0..=top).map(|k| self.truncated_dim(k, max_exp)).collect();
        let diff = (0..top)
            .map(|k| {
                let cols: Vec<Vec<Rational>> = (0..dims[k])
                    .map(|i| {
                        let mut unit = vec![Rational::zero(); dims[k]];
                        unit[i] = Rational::one();
                        let df = self.differential(&self.unflatten(k, max_exp, &unit));
                        self.flatten(&df, max_exp)
                    })
                    .collect();
                QMatrix::from_columns(dims[k + 1], &cols)
            })
            .collect();
        GenericComplex::new(dims, diff)
    }

    /// Betti numbers of the truncated complex next to those of `H(g,F)`,
    /// padded to the same length.
    pub fn stabilization(&self, max_exp: u32) -> Result<(Vec<usize>, Vec<usize>)> {
        let cyl = complex_cohomology(&self.truncated_complex(max_exp)?)?.betti;
        let mut ce = cohomology(&self.ce).betti;
        ce.resize(cyl.len(), 0);
        Ok((cyl, ce))
    }

    /// Random form with small rational coefficients, about half the terms
    /// present.
    pub fn random_form<R: Rng>(&self, rng: &mut R, degree: usize, max_exp: u32) -> PolyCylinderForm {
        let coeff = |rng: &mut R| {
            if rng.gen_bool(0.4) {
                Rational::zero()
            } else {
                Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into())
            }
        };
        let mut f = PolyCylinderForm::zero(degree);
        for e in 0..=max_exp {
            if rng.gen_bool(0.5) {
                f.base.insert(e, (0..self.base_dim(degree)).map(|_| coeff(rng)).collect());
            }
            if degree > 0 && rng.gen_bool(0.5) {
                f.dt.insert(e, (0..self.dt_dim(degree)).map(|_| coeff(rng)).collect());
            }
        }
        f.normalized()
    }

    /// `count` seeded random forms of every degree in turn.
    pub fn random_forms(&self, seed: u64, count: usize, max_exp: u32) -> Vec<PolyCylinderForm> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let degree = i % (self.top_degree() + 1);
                let e = rng.gen_range(0..=max_exp);
                self.random_form(&mut rng, degree, e)
            })
            .collect()
    }
}

fn pow(t: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{q, qf};

    fn trivial(g: &LieAlgebra, f: usize) -> CylinderComplex {
        CylinderComplex::new(g, &Representation::trivial(g, f)).unwrap()
    }

    fn form(degree: usize, base: &[(u32, Vec<Rational>)], dt: &[(u32, Vec<Rational>)]) -> PolyCylinderForm {
        PolyCylinderForm {
            degree,
            base: base.iter().cloned().collect(),
            dt: dt.iter().cloned().collect(),
        }
        .normalized()
    }

    #[test]
    fn differential_examples() {
        let c = trivial(&LieAlgebra::abelian(1), 1);
        let f = form(0, &[(1, vec![q(1)])], &[]);
        assert_eq!(c.differential(&f), form(1, &[], &[(0, vec![q(1)])]));

        let g = LieAlgebra::abelian(1);
        let r = Representation::weights(&g, &[vec![q(1)]]).unwrap();
        let c = CylinderComplex::new(&g, &r).unwrap();
        let f = form(0, &[(0, vec![q(1)])], &[]);
        assert_eq!(c.differential(&f), form(1, &[(0, vec![q(1)])], &[]));
    }

    #[test]
    fn homotopy_examples() {
        let c = trivial(&LieAlgebra::sl2(), 1);
        let f = form(1, &[], &[(0, vec![q(1)])]);
        assert_eq!(c.homotopy_k(&f), form(0, &[(1, vec![q(1)])], &[]));
        let eta = vec![q(1), q(0), q(2)];
        let f = form(2, &[], &[(1, eta.clone())]);
        let expected = vec_scale(&eta, &qf(-1, 2));
        assert_eq!(c.homotopy_k(&f), form(1, &[(2, expected)], &[]));
        let omega = Cochain { degree: 2, fiber_dim: 1, coords: vec![q(3), q(1), q(0)] };
        assert!(c.homotopy_k(&c.proj_pullback(&omega)).is_zero());
    }

    #[test]
    fn inclusion_examples() {
        let c = trivial(&LieAlgebra::heisenberg3(), 2);
        let omega = Cochain { degree: 1, fiber_dim: 2, coords: (0..6).map(|i| q(i - 2)).collect() };
        for t in [q(0), q(1), qf(-3, 7)] {
            assert_eq!(c.incl_pullback(&t, &c.proj_pullback(&omega)), omega);
        }
        let f = form(1, &[(1, omega.coords.clone())], &[]);
        assert!(c.incl_pullback(&q(0), &f).is_zero());
        let f = form(1, &[], &[(0, vec![q(1), q(2)])]);
        assert!(c.incl_pullback(&q(5), &f).is_zero());
    }

    #[test]
    fn d_squared_and_identity_on_random_forms() {
        let g = LieAlgebra::sl2();
        let c = CylinderComplex::new(&g, &Representation::adjoint(&g)).unwrap();
        for f in c.random_forms(7, 40, 5) {
            c.check_shape(&f).unwrap();
            assert!(c.differential(&c.differential(&f)).is_zero());
            let r = c.verify_th4_identity(&f);
            assert!(r.zero, "{r:?}");
        }
    }

    #[test]
    fn identity_on_closed_heisenberg_forms() {
        let g = LieAlgebra::heisenberg3();
        let c = trivial(&g, 1);
        // α_0 is closed on heisenberg3
        let f = form(1, &[(2, vec![q(1), q(0), q(0)])], &[]);
        assert!(c.verify_th4_identity(&f).zero);
    }

    #[test]
    fn primitives_of_closed_forms() {
        let c = trivial(&LieAlgebra::abelian(2), 1);
        // d(t^2 α_0) = 2t dt∧α_0, closed of degree 2
        let f = c.differential(&form(1, &[(2, vec![q(1), q(0)])], &[]));
        let p = c.primitive(&f).unwrap();
        assert_eq!(c.differential(&p), f);
        assert!(c.primitive(&form(1, &[(1, vec![q(1), q(0)])], &[])).is_none());
    }

    #[test]
    fn truncated_cohomology_matches_ce() {
        let c = trivial(&LieAlgebra::sl2(), 1);
        for d in 1..=2 {
            let (cyl, ce) = c.stabilization(d).unwrap();
            assert_eq!(cyl, ce);
        }
    }

    #[test]
    fn residual_report_names_the_term() {
        let c = trivial(&LieAlgebra::abelian(2), 1);
        let f = form(1, &[(3, vec![q(0), qf(1, 2)])], &[]);
        let t = c.first_nonzero(&f).unwrap();
        assert_eq!((t.part, t.exponent, t.monomial.clone(), t.fiber_index), ("base", 3, vec![1], 0));
        assert_eq!(t.value, "1/2");
    }
}
