//! Floating-point checks for Lie algebra homotopies and the flows around
//! them, with exact rational routes where the relevant operators are
//! nilpotent.
//!
//! A homotopy is a curve of morphisms `ψ_t: g → h` driven by
//! `ψ' = -ad_{c(t)} ∘ ψ` for a curve `c` in `h`.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ce::{build_ce_complex, cohomology, differential_terms, Term};
use crate::error::{Error, Result};
use crate::exterior::{indices_of, Monomials};
use crate::liealg::{LieAlgebra, LieMorphism, Representation};
use crate::qlinalg::{to_f64, QMatrix, Rational};

pub fn to_dmatrix(m: &QMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| to_f64(&m[(r, c)]))
}

pub fn to_dvector(v: &[Rational]) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(to_f64))
}

/// `max |a_ij|`, zero for empty matrices.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Structure constants in binary64.
#[derive(Debug, Clone)]
pub struct FloatAlgebra {
    dim: usize,
    ad_basis: Vec<DMatrix<f64>>,
}

impl FloatAlgebra {
    pub fn new(g: &LieAlgebra) -> Self {
        Self {
            dim: g.dim(),
            ad_basis: (0..g.dim()).map(|i| to_dmatrix(&g.ad_basis(i))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0.0 {
                m += &self.ad_basis[i] * *xi;
            }
        }
        m
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad(x) * y
    }
}

/// Curve in a vector space, parametrized by `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// `c(t) = Σ_p coeffs[p] t^p`.
    Poly { dim: usize, coeffs: Vec<Vec<f64>> },
    /// Uniform samples on `[0, 1]`, linearly interpolated.
    Samples { dim: usize, values: Vec<Vec<f64>> },
}

impl Curve {
    pub fn zero(dim: usize) -> Self {
        Curve::Poly { dim, coeffs: Vec::new() }
    }

    pub fn constant(c: &[f64]) -> Self {
        Curve::Poly {
            dim: c.len(),
            coeffs: vec![c.to_vec()],
        }
    }

    pub fn poly(dim: usize, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch(format!("curve coefficients must have length {dim}")));
        }
        Ok(Curve::Poly { dim, coeffs })
    }

    pub fn samples(dim: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput("a sampled curve needs at least two samples".into()));
        }
        if values.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch(format!("curve samples must have length {dim}")));
        }
        Ok(Curve::Samples { dim, values })
    }

    pub fn dim(&self) -> usize {
        match self {
            Curve::Poly { dim, .. } | Curve::Samples { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        match self {
            Curve::Poly { dim, coeffs } => {
                let mut v = DVector::zeros(*dim);
                for c in coeffs.iter().rev() {
                    v *= t;
                    v += DVector::from_column_slice(c);
                }
                v
            }
            Curve::Samples { dim, values } => {
                let n = values.len() - 1;
                let x = (t.clamp(0.0, 1.0) * n as f64).min(n as f64);
                let i = (x.floor() as usize).min(n - 1);
                let s = x - i as f64;
                DVector::from_fn(*dim, |r, _| (1.0 - s) * values[i][r] + s * values[i + 1][r])
            }
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            Curve::Poly { coeffs, .. } => coeffs.iter().flatten().all(|x| *x == 0.0),
            Curve::Samples { values, .. } => values.iter().flatten().all(|x| *x == 0.0),
        }
    }
}

/// Classical RK4 for `y' = f(t, y)` on `[0, 1]`, returning every grid value.
pub fn rk4<F>(y0: DMatrix<f64>, steps: usize, f: F) -> Vec<DMatrix<f64>>
where
    F: Fn(f64, &DMatrix<f64>) -> DMatrix<f64>,
{
    let h = 1.0 / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y.clone());
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + h / 2.0, &(&y + &k1 * (h / 2.0)));
        let k3 = f(t + h / 2.0, &(&y + &k2 * (h / 2.0)));
        let k4 = f(t + h, &(&y + &k3 * h));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(y.clone());
    }
    out
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 10 {
        return Err(Error::InvalidInput(format!("steps must be at least 10, got {steps}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct HomotopySolution {
    pub source: LieAlgebra,
    pub target: LieAlgebra,
    pub psi0: LieMorphism,
    pub curve: Curve,
    pub times: Vec<f64>,
    pub psi: Vec<DMatrix<f64>>,
    pub step: f64,
}

impl HomotopySolution {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn last(&self) -> &DMatrix<f64> {
        self.psi.last().expect("grid is nonempty")
    }
}

/// Integrates `ψ' = -ad_{c(t)} ∘ ψ`, `ψ(0) = ψ_0` on `[0, 1]` by RK4.
pub fn integrate_homotopy(psi0: &LieMorphism, c: &Curve, steps: usize) -> Result<HomotopySolution> {
    let h = FloatAlgebra::new(psi0.target());
    if c.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "curve has dimension {}, target algebra {}",
            c.dim(),
            h.dim()
        )));
    }
    integrate_with(psi0, c, steps, |t, y| -(h.ad(&c.eval(t)) * y))
}

/// Integrates `ψ' = M ψ` for a fixed matrix `M`. With `M` not a derivation
/// of the target this leaves the space of morphisms; used as a negative
/// control.
pub fn integrate_linear(psi0: &LieMorphism, m: &DMatrix<f64>, steps: usize) -> Result<HomotopySolution> {
    let n = psi0.target().dim();
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("control matrix must be {n}x{n}")));
    }
    integrate_with(psi0, &Curve::zero(n), steps, |_, y| m * y)
}

fn integrate_with<F>(psi0: &LieMorphism, c: &Curve, steps: usize, f: F) -> Result<HomotopySolution>
where
    F: Fn(f64, &DMatrix<f64>) -> DMatrix<f64>,
{
    check_steps(steps)?;
    let psi = rk4(to_dmatrix(psi0.matrix()), steps, f);
    let step = 1.0 / steps as f64;
    Ok(HomotopySolution {
        source: psi0.source().clone(),
        target: psi0.target().clone(),
        psi0: psi0.clone(),
        curve: c.clone(),
        times: (0..=steps).map(|i| i as f64 * step).collect(),
        psi,
        step,
    })
}

/// `max_{i<j} |[ψ e_i, ψ e_j]_h - ψ[e_i, e_j]_g|_∞` for one matrix `ψ`.
pub fn morphism_defect_of(g: &FloatAlgebra, h: &FloatAlgebra, psi: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..g.dim() {
        let pi = psi.column(i).into_owned();
        for j in i + 1..g.dim() {
            let pj = psi.column(j).into_owned();
            let lhs = h.bracket(&pi, &pj);
            let e_j = DVector::from_fn(g.dim(), |r, _| if r == j { 1.0 } else { 0.0 });
            let rhs = psi * (&g.ad_basis[i] * e_j);
            worst = worst.max((lhs - rhs).amax());
        }
    }
    worst
}

/// Defect at every grid point.
pub fn defect_curve(sol: &HomotopySolution) -> Vec<f64> {
    let g = FloatAlgebra::new(&sol.source);
    let h = FloatAlgebra::new(&sol.target);
    sol.psi.iter().map(|p| morphism_defect_of(&g, &h, p)).collect()
}

/// Largest morphism defect over the grid.
pub fn morphism_defect(sol: &HomotopySolution) -> f64 {
    defect_curve(sol).into_iter().fold(0.0, f64::max)
}

/// Whether every grid value equals `ψ_0` bit for bit.
pub fn is_bitwise_constant(sol: &HomotopySolution) -> bool {
    let first = &sol.psi[0];
    sol.psi
        .iter()
        .all(|p| p.iter().zip(first.iter()).all(|(a, b)| a.to_bits() == b.to_bits()))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrivialityReport {
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub residual_curve: Vec<f64>,
}

/// Integrates the adjoint transport `Θ' = -ad_{c(t)} Θ`, `Θ(0) = I`, on the
/// grid of `sol`.
pub fn adjoint_transport(sol: &HomotopySolution) -> Vec<DMatrix<f64>> {
    let h = FloatAlgebra::new(&sol.target);
    let n = h.dim();
    rk4(DMatrix::identity(n, n), sol.steps(), |t, y| -(h.ad(&sol.curve.eval(t)) * y))
}

/// Compares `ψ_t` with `Θ_ad(t) ψ_0` along the grid.
pub fn triviality_check(sol: &HomotopySolution, tol: f64) -> TrivialityReport {
    let psi0 = &sol.psi[0];
    let residual_curve: Vec<f64> = adjoint_transport(sol)
        .iter()
        .zip(&sol.psi)
        .map(|(theta, psi)| max_abs(&(psi - theta * psi0)))
        .collect();
    let max_residual = residual_curve.iter().copied().fold(0.0, f64::max);
    TrivialityReport {
        max_residual,
        tol,
        passed: max_residual <= tol,
        residual_curve,
    }
}

/// `exp(m)` by the series with `terms` terms.
pub fn exp_series(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..terms {
        term = &term * m / k as f64;
        out += &term;
    }
    out
}

/// `exp(m)` for nilpotent `m`, exactly. `None` if `m^n != 0`.
pub fn exp_nilpotent(m: &QMatrix) -> Option<QMatrix> {
    let n = m.rows();
    let mut out = QMatrix::identity(n);
    let mut term = QMatrix::identity(n);
    for k in 1..=n {
        term = (&term * m).scale(&Rational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            return Some(out);
        }
        out = &out + &term;
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowDerivationReport {
    pub h: f64,
    pub finite_difference: Vec<f64>,
    pub expected: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    /// `log2(err(h) / err(h/2))` from three successive halvings, averaged.
    pub order: Option<f64>,
    pub tol: f64,
    pub passed: bool,
}

fn central_difference(d: &DMatrix<f64>, e: &DVector<f64>, h: f64) -> DVector<f64> {
    // Ξ_t⋆e = Ξ_{-t} e with Ξ_t = exp(-tD) on a trivial bundle over a point
    let plus = (d * h).exp() * e;
    let minus = (d * -h).exp() * e;
    (plus - minus) / (2.0 * h)
}

/// Central difference of `t ↦ Ξ_t⋆e` at `t = 0` against `D e`.
pub fn flow_derivation_check(d: &DMatrix<f64>, e: &DVector<f64>, h: f64, tol: f64) -> Result<FlowDerivationReport> {
    if !d.is_square() || d.nrows() != e.len() {
        return Err(Error::DimensionMismatch("D must be square and match e".into()));
    }
    if h <= 0.0 {
        return Err(Error::InvalidInput("step h must be positive".into()));
    }
    let expected = d * e;
    let fd = central_difference(d, e, h);
    let err = |h: f64| (central_difference(d, e, h) - &expected).amax();
    let abs_error = (&fd - &expected).amax();
    let scale = expected.amax();
    let rel_error = if scale > 0.0 { abs_error / scale } else { abs_error };
    let errs: Vec<f64> = (0..4).map(|i| err(h / f64::powi(2.0, i))).collect();
    let order = if errs.iter().all(|e| *e > 0.0) {
        let fits: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        Some(fits.iter().sum::<f64>() / fits.len() as f64)
    } else {
        None
    };
    let order_ok = match order {
        Some(p) => (1.5..=2.5).contains(&p),
        None => abs_error == 0.0,
    };
    Ok(FlowDerivationReport {
        h,
        finite_difference: fd.iter().copied().collect(),
        expected: expected.iter().copied().collect(),
        abs_error,
        rel_error,
        order,
        tol,
        passed: rel_error <= tol && order_ok,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// Residual in the max norm; zero on the exact route.
    pub max_residual: f64,
    /// Whether the exact rational route was used.
    pub exact: bool,
    pub tol: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn exact(ok: bool, tol: f64) -> Self {
        Self {
            max_residual: if ok { 0.0 } else { f64::INFINITY },
            exact: true,
            tol,
            passed: ok,
        }
    }

    fn numeric(residual: f64, tol: f64) -> Self {
        Self {
            max_residual: residual,
            exact: false,
            tol,
            passed: residual <= tol,
        }
    }
}

/// `Ξ_λ = exp(λ ad_a)` preserves the bracket: exact when `ad_a` is
/// nilpotent, otherwise a `terms`-term series in binary64.
pub fn bracket_invariance_check(g: &LieAlgebra, a: &[Rational], lambda: &Rational, terms: usize, tol: f64) -> Result<IdentityReport> {
    if a.len() != g.dim() {
        return Err(Error::DimensionMismatch(format!("element must have length {}", g.dim())));
    }
    let m = g.ad(a).scale(lambda);
    if let Some(xi) = exp_nilpotent(&m) {
        let ok = (0..g.dim()).all(|i| {
            (i + 1..g.dim()).all(|j| {
                let lhs = g.bracket(&xi.column(i), &xi.column(j));
                let rhs = xi.mul_vec(g.bracket_basis(i, j));
                lhs == rhs
            })
        });
        return Ok(IdentityReport::exact(ok, tol));
    }
    let fg = FloatAlgebra::new(g);
    let xi = exp_series(&to_dmatrix(&m), terms);
    let mut worst: f64 = 0.0;
    for i in 0..g.dim() {
        for j in i + 1..g.dim() {
            let (bi, bj) = (xi.column(i).into_owned(), xi.column(j).into_owned());
            let lhs = fg.bracket(&bi, &bj);
            let rhs = &xi * to_dvector(g.bracket_basis(i, j));
            worst = worst.max((lhs - rhs).amax());
        }
    }
    Ok(IdentityReport::numeric(worst, tol))
}

/// `ρ(Ψ_λ b) Ξ_λ e = Ξ_λ ρ(b) e` with `Ψ_λ = exp(-λ ad_a)` and
/// `Ξ_λ = exp(-λ ρ(a))`.
pub fn semidirect_flow_check(
    r: &Representation,
    a: &[Rational],
    b: &[Rational],
    e: &[Rational],
    lambda: &Rational,
    terms: usize,
    tol: f64,
) -> Result<IdentityReport> {
    let g = r.algebra();
    if a.len() != g.dim() || b.len() != g.dim() || e.len() != r.fiber_dim() {
        return Err(Error::DimensionMismatch("element or fiber vector has the wrong length".into()));
    }
    let minus = -lambda.clone();
    let ad = g.ad(a).scale(&minus);
    let ra = r.rho_of(a).scale(&minus);
    if let (Some(psi), Some(xi)) = (exp_nilpotent(&ad), exp_nilpotent(&ra)) {
        let lhs = r.rho_of(&psi.mul_vec(b)).mul_vec(&xi.mul_vec(e));
        let rhs = xi.mul_vec(&r.rho_of(b).mul_vec(e));
        return Ok(IdentityReport::exact(lhs == rhs, tol));
    }
    let psi = exp_series(&to_dmatrix(&ad), terms);
    let xi = exp_series(&to_dmatrix(&ra), terms);
    let rho: Vec<DMatrix<f64>> = r.rho().iter().map(to_dmatrix).collect();
    let rho_of = |x: &DVector<f64>| {
        x.iter()
            .zip(&rho)
            .fold(DMatrix::zeros(r.fiber_dim(), r.fiber_dim()), |acc, (c, m)| acc + m * *c)
    };
    let (bf, ef) = (to_dvector(b), to_dvector(e));
    let lhs = rho_of(&(&psi * &bf)) * (&xi * &ef);
    let rhs = &xi * (rho_of(&bf) * &ef);
    Ok(IdentityReport::numeric((lhs - rhs).amax(), tol))
}

/// Polynomial in `t` with matrix coefficients, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub coeffs: Vec<QMatrix>,
}

impl PolyMatrix {
    pub fn eval(&self, t: &Rational) -> QMatrix {
        let (r, c) = self.coeffs.first().map_or((0, 0), QMatrix::shape);
        let mut out = QMatrix::zeros(r, c);
        for m in self.coeffs.iter().rev() {
            out = &out.scale(t) + m;
        }
        out
    }
}

/// Exact solution of `Y' = -ad_{c(t)} Y`, `Y(0) = y0`, for a polynomial
/// curve `c` with rational coefficients, by Picard iteration. The iteration
/// terminates when products of `ad_{c(s)}` vanish, as for nilpotent `h`;
/// otherwise the result is `None`.
pub fn picard_transport(h: &LieAlgebra, c: &[Vec<Rational>], y0: &QMatrix) -> Option<PolyMatrix> {
    let n = h.dim();
    let ads: Vec<QMatrix> = c.iter().map(|v| h.ad(v).scale(&-Rational::one())).collect();
    let mut total: Vec<QMatrix> = vec![y0.clone()];
    let mut term: Vec<QMatrix> = vec![y0.clone()];
    for _ in 0..=n {
        // next = ∫_0^t A(s) term(s) ds, A(s) = Σ_p ads[p] s^p
        let mut next: Vec<QMatrix> = Vec::new();
        for (p, a) in ads.iter().enumerate() {
            for (q, m) in term.iter().enumerate() {
                let e = p + q + 1;
                if next.len() <= e {
                    next.resize(e + 1, QMatrix::zeros(y0.rows(), y0.cols()));
                }
                let contrib = (a * m).scale(&Rational::new(1.into(), (e as i64).into()));
                next[e] = &next[e] + &contrib;
            }
        }
        if next.iter().all(QMatrix::is_zero) {
            return Some(PolyMatrix { coeffs: total });
        }
        if total.len() < next.len() {
            total.resize(next.len(), QMatrix::zeros(y0.rows(), y0.cols()));
        }
        for (e, m) in next.iter().enumerate() {
            total[e] = &total[e] + m;
        }
        term = next;
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactHomotopyReport {
    /// `ψ_t` is a morphism at the sampled rational times.
    pub morphism_at_samples: bool,
    /// `ψ_t = Θ_ad(t) ψ_0` as polynomial matrices.
    pub trivial_deformation: bool,
    /// Polynomial degree of `ψ_t` in `t`.
    pub poly_degree: usize,
}

/// Exact route for nilpotent targets and rational polynomial curves.
pub fn exact_homotopy_check(psi0: &LieMorphism, c: &[Vec<Rational>]) -> Result<ExactHomotopyReport> {
    let h = psi0.target();
    if c.iter().any(|v| v.len() != h.dim()) {
        return Err(Error::DimensionMismatch(format!("curve coefficients must have length {}", h.dim())));
    }
    let not_nilpotent = || Error::InvalidInput("Picard iteration does not terminate; the target is not nilpotent along c".into());
    let psi = picard_transport(h, c, psi0.matrix()).ok_or_else(not_nilpotent)?;
    let theta = picard_transport(h, c, &QMatrix::identity(h.dim())).ok_or_else(not_nilpotent)?;
    let trivial_deformation = {
        let len = psi.coeffs.len().max(theta.coeffs.len());
        (0..len).all(|e| {
            let z = QMatrix::zeros(psi0.matrix().rows(), psi0.matrix().cols());
            let p = psi.coeffs.get(e).cloned().unwrap_or_else(|| z.clone());
            let t = theta.coeffs.get(e).map_or(z, |m| m * psi0.matrix());
            p == t
        })
    };
    let samples = [Rational::zero(), Rational::new(1.into(), 3.into()), Rational::new(1.into(), 2.into()), Rational::one()];
    let mut morphism_at_samples = true;
    for t in &samples {
        let m = LieMorphism::new_unchecked(psi0.source().clone(), h.clone(), psi.eval(t))?;
        morphism_at_samples &= m.check().is_valid();
    }
    Ok(ExactHomotopyReport {
        morphism_at_samples,
        trivial_deformation,
        poly_degree: psi.coeffs.len().saturating_sub(1),
    })
}

/// `Λ^k ψ` in binary64, entry `(J, I)` the minor on rows `J`, columns `I`.
fn exterior_power_f64(psi: &DMatrix<f64>, src: &Monomials, tgt: &Monomials, k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(tgt.count(k), src.count(k));
    for (c, &im) in src.degree(k).iter().enumerate() {
        let cols = indices_of(im);
        for (r, &jm) in tgt.degree(k).iter().enumerate() {
            let rows = indices_of(jm);
            let minor = DMatrix::from_fn(k, k, |a, b| psi[(rows[a], cols[b])]);
            m[(r, c)] = if k == 0 { 1.0 } else { minor.determinant() };
        }
    }
    m
}

/// `d_k` of `Ω(g, E)` for a representation given by float matrices.
pub fn float_ce_differential(g: &LieAlgebra, mons: &Monomials, rho: &[DMatrix<f64>], k: usize) -> DMatrix<f64> {
    let f = rho.first().map_or(0, DMatrix::nrows);
    let mut d = DMatrix::zeros(mons.count(k + 1) * f, mons.count(k) * f);
    if k >= g.dim() {
        return d;
    }
    for (row, col, term) in differential_terms(g, mons, k) {
        match term {
            Term::Rho { sign, basis } => {
                let block = &rho[basis] * f64::from(sign);
                let mut view = d.view_mut((row * f, col * f), (f, f));
                view += block;
            }
            Term::Scalar(c) => {
                let c = to_f64(&c);
                for a in 0..f {
                    d[(row * f + a, col * f + a)] += c;
                }
            }
        }
    }
    d
}

/// Distance from `v` to the column space of `b`, by least squares.
pub fn distance_to_span(b: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    if b.ncols() == 0 || b.nrows() == 0 {
        return v.amax();
    }
    let svd = b.clone().svd(true, true);
    let eps = 1e-10 * svd.singular_values.amax().max(1.0);
    match svd.solve(v, eps) {
        Ok(x) => (b * x - v).amax(),
        Err(_) => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MainTheoremReport {
    pub steps: usize,
    /// `max_x |ρ(ψ_1 x) - Θ ρ(ψ_0 x) Θ^{-1}|`.
    pub gauge_residual: f64,
    /// Largest distance of `Φ_1*ω - (1⊗Θ)Φ_0*ω` to the coboundaries, over a
    /// cocycle basis of `Ω(h, E)`.
    pub cohomology_residual: f64,
    /// Largest `|d(Φ_1*ω - (1⊗Θ)Φ_0*ω)|`.
    pub closedness_residual: f64,
    pub theta_condition: f64,
    pub conditioning_warning: Option<String>,
    /// Residuals vanish exactly.
    pub exact: bool,
    /// `Φ_1* = Φ_0*` bit for bit.
    pub pullbacks_identical: bool,
    pub tol: f64,
    pub passed: bool,
}

pub const CONDITION_LIMIT: f64 = 1e12;

/// The homotopy invariance statement at Lie algebra scale: gauge relation
/// between the pulled back representations and agreement of the induced
/// cohomology maps up to the gauge transport.
pub fn main_theorem_check(psi0: &LieMorphism, c: &Curve, rep: &Representation, steps: usize, tol: f64) -> Result<MainTheoremReport> {
    if rep.algebra() != psi0.target() {
        return Err(Error::InvalidRepresentation("representation must be over the target algebra".into()));
    }
    let sol = integrate_homotopy(psi0, c, steps)?;
    let (g, h) = (psi0.source(), psi0.target());
    let f = rep.fiber_dim();
    let rho: Vec<DMatrix<f64>> = rep.rho().iter().map(to_dmatrix).collect();
    let rho_of = |x: DVector<f64>| x.iter().zip(&rho).fold(DMatrix::zeros(f, f), |acc, (c, m)| acc + m * *c);

    let thetas = rk4(DMatrix::identity(f, f), steps, |t, y| -(rho_of(c.eval(t)) * y));
    let theta = thetas.last().expect("grid is nonempty").clone();
    let svals = theta.clone().svd(false, false).singular_values;
    let smin = svals.min();
    let theta_condition = if smin > 0.0 { svals.max() / smin } else { f64::INFINITY };
    let conditioning_warning = (theta_condition > CONDITION_LIMIT)
        .then(|| format!("transport is near singular, condition number {theta_condition:.3e}"));
    let theta_inv = theta.clone().try_inverse().ok_or(Error::NotInvertible)?;

    let (psi_0, psi_1) = (&sol.psi[0], sol.last());
    let pulled = |psi: &DMatrix<f64>| -> Vec<DMatrix<f64>> {
        (0..g.dim()).map(|i| rho_of(psi.column(i).into_owned())).collect()
    };
    let (rho0, rho1) = (pulled(psi_0), pulled(psi_1));
    let gauge_residual = rho0
        .iter()
        .zip(&rho1)
        .map(|(r0, r1)| max_abs(&(r1 - &theta * r0 * &theta_inv)))
        .fold(0.0, f64::max);

    let hc = build_ce_complex(h, rep)?;
    let hcoh = cohomology(&hc);
    let gm = Monomials::new(g.dim());
    let hm = hc.monomials();
    let mut cohomology_residual: f64 = 0.0;
    let mut closedness_residual: f64 = 0.0;
    let mut pullbacks_identical = psi_0 == psi_1;
    for k in 0..=g.dim().min(h.dim()) {
        let fiber_id = DMatrix::<f64>::identity(f, f);
        let p0 = exterior_power_f64(psi_0, &gm, hm, k).transpose().kronecker(&fiber_id);
        let p1 = exterior_power_f64(psi_1, &gm, hm, k).transpose().kronecker(&fiber_id);
        pullbacks_identical &= p0 == p1;
        let transport = DMatrix::<f64>::identity(gm.count(k), gm.count(k)).kronecker(&theta);
        let coboundaries = if k == 0 {
            DMatrix::zeros(gm.count(0) * f, 0)
        } else {
            float_ce_differential(g, &gm, &rho1, k - 1)
        };
        let d_k = float_ce_differential(g, &gm, &rho1, k);
        for w in &hcoh.cocycles[k].vectors {
            let w = to_dvector(w);
            let diff = &p1 * &w - &transport * (&p0 * &w);
            closedness_residual = closedness_residual.max(if d_k.nrows() == 0 { 0.0 } else { (&d_k * &diff).amax() });
            cohomology_residual = cohomology_residual.max(distance_to_span(&coboundaries, &diff));
        }
    }
    let exact = gauge_residual == 0.0 && cohomology_residual == 0.0 && closedness_residual == 0.0;
    let passed = gauge_residual <= tol && cohomology_residual <= tol && closedness_residual <= tol;
    Ok(MainTheoremReport {
        steps,
        gauge_residual,
        cohomology_residual,
        closedness_residual,
        theta_condition,
        conditioning_warning,
        exact,
        pullbacks_identical,
        tol,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    pub order: f64,
}

/// Least-squares slope of `log err` against `log h` for the given step
/// counts; `err` is a function of the step count.
pub fn fit_order<F: Fn(usize) -> f64>(steps: &[usize], err: F) -> OrderFit {
    let errors: Vec<f64> = steps.iter().map(|&s| err(s)).collect();
    let xs: Vec<f64> = steps.iter().map(|&s| (1.0 / s as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    OrderFit {
        steps: steps.to_vec(),
        errors,
        order: cov / var,
    }
}

/// RK4 global convergence order: error of `ψ(1)` against a reference run
/// with 16 times the finest step count.
pub fn rk4_order(psi0: &LieMorphism, c: &Curve, steps: &[usize]) -> Result<OrderFit> {
    for &s in steps {
        check_steps(s)?;
    }
    let finest = steps.iter().copied().max().unwrap_or(10);
    let reference = integrate_homotopy(psi0, c, 16 * finest)?;
    let reference = reference.last();
    Ok(fit_order(steps, |s| {
        let sol = integrate_homotopy(psi0, c, s).expect("steps checked");
        max_abs(&(sol.last() - reference))
    }))
}

/// Convergence of the morphism defect itself. The defect can decay faster
/// than the global error, so this is reported next to [`rk4_order`].
pub fn defect_order(psi0: &LieMorphism, c: &Curve, steps: &[usize]) -> Result<OrderFit> {
    for &s in steps {
        check_steps(s)?;
    }
    Ok(fit_order(steps, |s| {
        morphism_defect(&integrate_homotopy(psi0, c, s).expect("steps checked"))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{q, qf};

    /// `exp(θ K)` for the unit axis `u` of `c`, with `K` the cross-product
    /// matrix: Rodrigues' formula.
    fn rodrigues(c: &[f64], t: f64) -> DMatrix<f64> {
        let theta = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() * t;
        let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        let u = [c[0] / n, c[1] / n, c[2] / n];
        let k = DMatrix::from_row_slice(3, 3, &[0.0, -u[2], u[1], u[2], 0.0, -u[0], -u[1], u[0], 0.0]);
        DMatrix::identity(3, 3) + &k * theta.sin() + &k * &k * (1.0 - theta.cos())
    }

    #[test]
    fn so3_ad_is_the_cross_product() {
        let h = FloatAlgebra::new(&LieAlgebra::so3());
        let x = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        let y = DVector::from_column_slice(&[-1.0, 0.5, 2.0]);
        assert!((h.bracket(&x, &y) - x.cross(&y)).amax() < 1e-15);
    }

    #[test]
    fn zero_curve_keeps_psi_fixed() {
        let g = LieAlgebra::so3();
        let sol = integrate_homotopy(&LieMorphism::identity(&g), &Curve::zero(3), 50).unwrap();
        assert!(is_bitwise_constant(&sol));
        assert_eq!(morphism_defect(&sol), 0.0);
        assert!(integrate_homotopy(&LieMorphism::identity(&g), &Curve::zero(3), 5).is_err());
    }

    #[test]
    fn abelian_target_is_constant() {
        let g = LieAlgebra::heisenberg3();
        let h = LieAlgebra::abelian(2);
        let psi0 = LieMorphism::new(g, h, QMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]])).unwrap();
        let c = Curve::poly(2, vec![vec![0.3, -1.0], vec![2.0, 0.5]]).unwrap();
        assert!(is_bitwise_constant(&integrate_homotopy(&psi0, &c, 100).unwrap()));
    }

    #[test]
    fn constant_curve_matches_rodrigues() {
        let g = LieAlgebra::so3();
        let c0 = [0.4, -0.7, 1.1];
        let sol = integrate_homotopy(&LieMorphism::identity(&g), &Curve::constant(&c0), 1000).unwrap();
        // exp(-t ad_c) = rotation about c by angle -t|c|
        let oracle = rodrigues(&[-c0[0], -c0[1], -c0[2]], 1.0);
        assert!(max_abs(&(sol.last() - &oracle)) < 1e-8);
        assert!(max_abs(&(exp_series(&-FloatAlgebra::new(&g).ad(&DVector::from_column_slice(&c0)), 40) - &oracle)) < 1e-12);
        assert!(morphism_defect(&sol) < 1e-8);
        assert!(triviality_check(&sol, 1e-8).passed);
    }

    #[test]
    fn polynomial_curve_on_so3() {
        let g = LieAlgebra::so3();
        let c = Curve::poly(3, vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let sol = integrate_homotopy(&LieMorphism::identity(&g), &c, 1000).unwrap();
        assert!(morphism_defect(&sol) < 1e-8);
        assert!(triviality_check(&sol, 1e-6).passed);
    }

    #[test]
    fn rk4_order_on_coarse_grids() {
        let g = LieAlgebra::so3();
        let c = Curve::poly(3, vec![vec![0.5, 0.2, 0.0], vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 0.0]]).unwrap();
        let fit = rk4_order(&LieMorphism::identity(&g), &c, &[10, 20, 40, 80]).unwrap();
        assert!((3.5..=4.5).contains(&fit.order), "{fit:?}");
        let fit = defect_order(&LieMorphism::identity(&g), &c, &[10, 20, 40, 80]).unwrap();
        assert!(fit.order > 3.5, "{fit:?}");
    }

    #[test]
    fn non_derivation_control_breaks_the_morphism() {
        let g = LieAlgebra::so3();
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.0, 0.5, 0.0, 0.2, 0.0, -0.4]);
        let sol = integrate_linear(&LieMorphism::identity(&g), &m, 200).unwrap();
        assert!(morphism_defect(&sol) > 1e-2);
    }

    #[test]
    fn flow_derivation_examples() {
        let zero = DMatrix::zeros(2, 2);
        let e = DVector::from_column_slice(&[1.0, 1.0]);
        let r = flow_derivation_check(&zero, &e, 1e-3, 1e-6).unwrap();
        assert_eq!(r.abs_error, 0.0);
        assert!(r.passed);
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 2.0]));
        let r = flow_derivation_check(&d, &e, 1e-3, 1e-6).unwrap();
        assert!((r.finite_difference[0] - 1.0).abs() < 1e-6);
        assert!((r.finite_difference[1] - 2.0).abs() < 2e-6);
        assert!(r.passed, "{r:?}");
        let d = DMatrix::from_row_slice(3, 3, &[0.3, -1.0, 0.2, 0.5, 0.1, 0.0, -0.7, 0.4, 0.9]);
        let e = DVector::from_column_slice(&[1.0, -2.0, 0.5]);
        let r = flow_derivation_check(&d, &e, 1e-2, 1e-3).unwrap();
        let p = r.order.unwrap();
        assert!((1.8..=2.2).contains(&p), "{p}");
    }

    #[test]
    fn nilpotent_exponentials_are_exact() {
        let h = LieAlgebra::heisenberg3();
        let a = vec![q(1), q(2), q(0)];
        let r = bracket_invariance_check(&h, &a, &qf(3, 2), 30, 0.0).unwrap();
        assert!(r.exact && r.passed);
        assert!(exp_nilpotent(&LieAlgebra::so3().ad_basis(0)).is_none());
        let r = bracket_invariance_check(&LieAlgebra::so3(), &[q(1), q(0), q(1)], &qf(7, 10), 30, 1e-10).unwrap();
        assert!(!r.exact && r.passed, "{r:?}");
        let r = bracket_invariance_check(&LieAlgebra::so3(), &[q(0), q(0), q(0)], &qf(7, 10), 30, 0.0).unwrap();
        assert!(r.exact && r.passed);
    }

    #[test]
    fn semidirect_flow() {
        let h = LieAlgebra::heisenberg3();
        let r = Representation::adjoint(&h);
        let v = |a: i64, b: i64, c: i64| vec![q(a), q(b), q(c)];
        let rep = semidirect_flow_check(&r, &v(1, -1, 2), &v(0, 3, 1), &v(1, 1, 1), &qf(1, 3), 30, 0.0).unwrap();
        assert!(rep.exact && rep.passed);
        let g = LieAlgebra::sl2();
        let r = Representation::adjoint(&g);
        let rep = semidirect_flow_check(&r, &v(1, 1, 0), &v(0, 1, 2), &v(1, -1, 3), &qf(1, 2), 30, 1e-10).unwrap();
        assert!(!rep.exact && rep.passed, "{rep:?}");
    }

    #[test]
    fn picard_on_heisenberg() {
        let h = LieAlgebra::heisenberg3();
        let psi0 = LieMorphism::identity(&h);
        let c = vec![vec![q(1), q(0), q(0)], vec![q(0), q(2), q(0)]];
        let r = exact_homotopy_check(&psi0, &c).unwrap();
        assert!(r.morphism_at_samples && r.trivial_deformation);
        // RK4 agrees with the exact endpoint
        let exact = picard_transport(&h, &c, psi0.matrix()).unwrap().eval(&q(1));
        let cf = Curve::poly(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap();
        let sol = integrate_homotopy(&psi0, &cf, 100).unwrap();
        assert!(max_abs(&(sol.last() - to_dmatrix(&exact))) < 1e-12);
        assert!(exact_homotopy_check(&LieMorphism::identity(&LieAlgebra::so3()), &[vec![q(1), q(0), q(0)]]).is_err());
    }

    #[test]
    fn main_theorem_so3() {
        let g = LieAlgebra::so3();
        let c = Curve::poly(3, vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let psi0 = LieMorphism::identity(&g);
        let r = main_theorem_check(&psi0, &c, &Representation::trivial(&g, 1), 1000, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        let r = main_theorem_check(&psi0, &c, &Representation::adjoint(&g), 1000, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.conditioning_warning.is_none());
        let r = main_theorem_check(&psi0, &Curve::zero(3), &Representation::adjoint(&g), 100, 1e-6).unwrap();
        assert!(r.exact && r.pullbacks_identical);
    }

    #[test]
    fn main_theorem_abelian_target() {
        let g = LieAlgebra::heisenberg3();
        let h = LieAlgebra::abelian(2);
        let psi0 = LieMorphism::new(g, h.clone(), QMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]])).unwrap();
        let rep = Representation::weights(&h, &[vec![q(1), q(-1)], vec![q(0), q(2)]]).unwrap();
        let c = Curve::poly(2, vec![vec![0.3, -1.0], vec![2.0, 0.5]]).unwrap();
        let r = main_theorem_check(&psi0, &c, &rep, 1000, 1e-6).unwrap();
        assert!(r.passed && r.pullbacks_identical, "{r:?}");
    }

    #[test]
    fn sampled_curves_interpolate() {
        let c = Curve::samples(1, vec![vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        assert_eq!(c.eval(0.25)[0], 0.5);
        assert_eq!(c.eval(1.0)[0], 0.0);
        assert!(Curve::samples(1, vec![vec![0.0]]).is_err());
    }
}
