//! Künneth map for products of Lie algebras,
//! `ω ⊗ φ ↦ Pr_g*ω ∧ Pr_h*φ : Ω(g,E) ⊗ Ω(h,F) → Ω(g × h, E ⊗ F)`, and the
//! two-route cross-check of product cohomology.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::ce::{build_ce_complex, cohomology, wedge, CEComplex, Cochain};
use crate::error::{Error, Result};
use crate::homological::{
    convolve, tensor_complex, trim_betti, ChainMap, CohomologyResult,
    TensorComplex,
};
use crate::liealg::{tensor_rep_product, LieAlgebra, Representation};
use crate::qlinalg::{QMatrix, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct ProductCohomology {
    pub factors: (Vec<usize>, Vec<usize>),
    pub convolution: Vec<usize>,
}

pub fn kunneth_betti(a: &CohomologyResult, b: &CohomologyResult) -> ProductCohomology {
    ProductCohomology {
        factors: (a.betti.clone(), b.betti.clone()),
        convolution: convolve(&a.betti, &b.betti),
    }
}

/// The Künneth chain map with its domain and codomain.
#[derive(Debug, Clone)]
pub struct KunnethMap {
    pub left: CEComplex,
    pub right: CEComplex,
    /// `Ω(g,E) ⊗ Ω(h,F)` with `d(ω⊗φ) = dω⊗φ + (-1)^{deg ω} ω⊗dφ`.
    pub domain: TensorComplex,
    /// `Ω(g × h, E ⊗ F)`.
    pub codomain: CEComplex,
    pub map: ChainMap,
}

pub fn kunneth_chain_map(
    g: &LieAlgebra,
    h: &LieAlgebra,
    re: &Representation,
    rf: &Representation,
) -> Result<KunnethMap> {
    let left = build_ce_complex(g, re)?;
    let right = build_ce_complex(h, rf)?;
    let product_rep = tensor_rep_product(re, rf);
    let codomain = build_ce_complex(product_rep.algebra(), &product_rep)?;
    let domain = tensor_complex(left.complex(), right.complex());
    let n = g.dim();
    let (fe, ff) = (re.fiber_dim(), rf.fiber_dim());
    let maps = domain
        .blocks
        .iter()
        .enumerate()
        .map(|(deg, blocks)| {
            let mut m = QMatrix::zeros(codomain.dim(deg), domain.total.dim(deg));
            for blk in blocks {
                let right_dim = right.dim(blk.q);
                for (i, &im) in left.monomials().degree(blk.p).iter().enumerate() {
                    for (j, &jm) in right.monomials().degree(blk.q).iter().enumerate() {
                        // indices of g precede those of h, so the wedge is
                        // already sorted
                        let mask = im | (jm << n);
                        for a in 0..fe {
                            for b in 0..ff {
                                let row = codomain.position(mask, a * ff + b);
                                let col = blk.offset + (i * fe + a) * right_dim + j * ff + b;
                                m[(row, col)] = Rational::one();
                            }
                        }
                    }
                }
            }
            m
        })
        .collect();
    Ok(KunnethMap {
        left,
        right,
        domain,
        codomain,
        map: ChainMap { maps },
    })
}

impl KunnethMap {
    pub fn is_chain_map(&self) -> bool {
        self.map.is_chain_map(&self.domain.total, self.codomain.complex())
    }

    /// Square and of full rank in every degree.
    pub fn is_bijective(&self) -> bool {
        self.map.maps.iter().all(|m| m.is_square() && m.rank() == m.rows())
    }

    /// `𝒦(ω ⊗ φ)` for cochains of the two factors.
    pub fn apply(&self, omega: &Cochain, phi: &Cochain) -> Cochain {
        let blk = self
            .domain
            .block(omega.degree, phi.degree)
            .expect("degrees within range");
        let deg = omega.degree + phi.degree;
        let mut v = vec![Rational::zero(); self.domain.total.dim(deg)];
        for (i, x) in omega.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in phi.coords.iter().enumerate() {
                v[blk.offset + i * phi.coords.len() + j] = x * y;
            }
        }
        Cochain {
            degree: deg,
            fiber_dim: self.codomain.fiber_dim(),
            coords: self.map.maps[deg].mul_vec(&v),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KunnethReport {
    pub direct: Vec<usize>,
    pub convolution: Vec<usize>,
    #[serde(rename = "match")]
    pub matches: bool,
    pub chain_map: bool,
    pub bijective: bool,
    pub closed_to_closed: bool,
    pub classes_span: bool,
}

impl KunnethReport {
    pub fn passed(&self) -> bool {
        self.matches && self.chain_map && self.bijective && self.closed_to_closed && self.classes_span
    }
}

/// Product cohomology computed directly and by convolution of the factors,
/// plus the chain-level checks on `𝒦`.
pub fn kunneth_crosscheck(
    g: &LieAlgebra,
    h: &LieAlgebra,
    re: &Representation,
    rf: &Representation,
) -> Result<KunnethReport> {
    let k = kunneth_chain_map(g, h, re, rf)?;
    let hg = cohomology(&k.left);
    let hh = cohomology(&k.right);
    let direct = cohomology(&k.codomain);
    let conv = kunneth_betti(&hg, &hh).convolution;
    let mut closed_to_closed = true;
    let mut classes_span = true;
    for deg in 0..direct.betti.len() {
        let mut coords = Vec::new();
        for p in 0..=deg.min(g.dim()) {
            let q = deg - p;
            if q > h.dim() {
                continue;
            }
            for w in &hg.representatives[p].vectors {
                for f in &hh.representatives[q].vectors {
                    let omega = Cochain { degree: p, fiber_dim: re.fiber_dim(), coords: w.clone() };
                    let phi = Cochain { degree: q, fiber_dim: rf.fiber_dim(), coords: f.clone() };
                    let image = k.apply(&omega, &phi);
                    match direct.class_coordinates(deg, &image.coords) {
                        Some(c) => coords.push(c),
                        None => closed_to_closed = false,
                    }
                }
            }
        }
        let span = if coords.is_empty() {
            0
        } else {
            QMatrix::from_columns(direct.betti[deg], &coords).rank()
        };
        if span != direct.betti[deg] {
            classes_span = false;
        }
    }
    let matches = trim_betti(&direct.betti) == trim_betti(&conv);
    Ok(KunnethReport {
        direct: direct.betti,
        convolution: conv,
        matches,
        chain_map: k.is_chain_map(),
        bijective: k.is_bijective(),
        closed_to_closed,
        classes_span,
    })
}

/// Ring compatibility on scalar forms:
/// `𝒦((ω₁∧ω₂)⊗(φ₁∧φ₂)) = (-1)^{deg φ₁ · deg ω₂} 𝒦(ω₁⊗φ₁) ∧ 𝒦(ω₂⊗φ₂)`.
pub fn koszul_check(k: &KunnethMap, w1: &Cochain, w2: &Cochain, f1: &Cochain, f2: &Cochain) -> Result<bool> {
    if k.codomain.fiber_dim() != 1 {
        return Err(Error::DimensionMismatch("Koszul check needs scalar coefficients".into()));
    }
    let lm = k.left.monomials();
    let rm = k.right.monomials();
    let pm = k.codomain.monomials();
    let top = pm.n();
    let deg = w1.degree + w2.degree + f1.degree + f2.degree;
    if w1.degree + w2.degree > lm.n() || f1.degree + f2.degree > rm.n() || deg > top {
        return Err(Error::DegreeOverflow { degree: deg });
    }
    let lhs = k.apply(&wedge(lm, w1, w2)?, &wedge(rm, f1, f2)?);
    let mut rhs = wedge(pm, &k.apply(w1, f1), &k.apply(w2, f2))?;
    if (f1.degree * w2.degree) % 2 == 1 {
        for x in rhs.coords.iter_mut() {
            *x = -x.clone();
        }
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    #[test]
    fn abelian_pair_is_a_signed_permutation() {
        let a = LieAlgebra::abelian(1);
        let t = Representation::trivial(&a, 1);
        let k = kunneth_chain_map(&a, &a, &t, &t).unwrap();
        assert!(k.is_chain_map());
        assert!(k.is_bijective());
        for m in &k.map.maps {
            for r in 0..m.rows() {
                let nonzero = m.row(r).iter().filter(|x| !x.is_zero()).count();
                assert_eq!(nonzero, 1);
            }
        }
        assert_eq!(k.map.maps[0], QMatrix::identity(1));
    }

    #[test]
    fn degree_zero_is_identity_on_fibers() {
        let g = LieAlgebra::sl2();
        let h = LieAlgebra::abelian(1);
        let re = Representation::adjoint(&g);
        let rf = Representation::weights(&h, &[vec![q(1), q(2)]]).unwrap();
        let k = kunneth_chain_map(&g, &h, &re, &rf).unwrap();
        assert_eq!(k.map.maps[0], QMatrix::identity(6));
        assert!(k.is_chain_map());
    }

    #[test]
    fn dimensions_follow_binomial_convolution() {
        let g = LieAlgebra::sl2();
        let h = LieAlgebra::abelian(1);
        let k = kunneth_chain_map(&g, &h, &Representation::trivial(&g, 1), &Representation::trivial(&h, 1)).unwrap();
        assert_eq!(k.domain.total.dims(), &[1, 4, 6, 4, 1]);
        assert_eq!(k.codomain.complex().dims(), &[1, 4, 6, 4, 1]);
    }

    #[test]
    fn betti_convolution_examples() {
        let make = |b: Vec<usize>| CohomologyResult {
            betti: b,
            cocycle_dims: vec![],
            coboundary_dims: vec![],
            representatives: vec![],
            coboundaries: vec![],
            cocycles: vec![],
        };
        assert_eq!(kunneth_betti(&make(vec![1, 1]), &make(vec![1, 1])).convolution, vec![1, 2, 1]);
        assert_eq!(
            kunneth_betti(&make(vec![1, 0, 0, 1]), &make(vec![1, 1])).convolution,
            vec![1, 1, 0, 1, 1]
        );
    }

    #[test]
    fn crosscheck_sl2_times_line() {
        let g = LieAlgebra::sl2();
        let h = LieAlgebra::abelian(1);
        let r = kunneth_crosscheck(&g, &h, &Representation::trivial(&g, 1), &Representation::trivial(&h, 1)).unwrap();
        assert_eq!(r.direct, vec![1, 1, 0, 1, 1]);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn crosscheck_weighted() {
        let g = LieAlgebra::abelian(2);
        let h = LieAlgebra::abelian(1);
        let re = Representation::weights(&g, &[vec![q(1)], vec![q(0)]]).unwrap();
        let r = kunneth_crosscheck(&g, &h, &re, &Representation::trivial(&h, 1)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.direct, vec![0, 0, 0, 0]);
    }

    #[test]
    fn koszul_sign() {
        let g = LieAlgebra::abelian(2);
        let h = LieAlgebra::heisenberg3();
        let k = kunneth_chain_map(&g, &h, &Representation::trivial(&g, 1), &Representation::trivial(&h, 1)).unwrap();
        let (lm, rm) = (k.left.monomials().clone(), k.right.monomials().clone());
        let w1 = Cochain::monomial(&lm, &[0]);
        let w2 = Cochain::monomial(&lm, &[1]);
        let f1 = Cochain::monomial(&rm, &[2]);
        let f2 = Cochain::monomial(&rm, &[0]);
        assert!(koszul_check(&k, &w1, &w2, &f1, &f2).unwrap());
    }
}
