//! Short exact sequences of cochain complexes, the connecting homomorphism
//! and the long exact sequence in cohomology.

use serde::Serialize;

use super::complex::{
    complex_cohomology, induced_map, tensor_complex, ChainMap, CohomologyResult, GenericComplex,
    TensorComplex,
};
use crate::error::{Error, Result};
use crate::qlinalg::{QMatrix, Rational};

/// `0 → C →i D →p E → 0`.
#[derive(Debug, Clone)]
pub struct ShortExactSeq {
    pub c: GenericComplex,
    pub d: GenericComplex,
    pub e: GenericComplex,
    pub i: ChainMap,
    pub p: ChainMap,
}

impl ShortExactSeq {
    /// Checks that `i` and `p` are chain maps, and degree-wise that `i` is
    /// injective, `p` surjective, `p i = 0` and `ker p = im i`.
    pub fn new(c: GenericComplex, d: GenericComplex, e: GenericComplex, i: ChainMap, p: ChainMap) -> Result<Self> {
        let len = d.len();
        if c.len() != len || e.len() != len {
            return Err(not_exact(0, "complexes have different lengths"));
        }
        if let Some(k) = i.commutation_failure(&c, &d) {
            return Err(not_exact(k, "i is not a chain map"));
        }
        if let Some(k) = p.commutation_failure(&d, &e) {
            return Err(not_exact(k, "p is not a chain map"));
        }
        for k in 0..len {
            if i.maps[k].rank() != c.dim(k) {
                return Err(not_exact(k, "i is not injective"));
            }
            if p.maps[k].rank() != e.dim(k) {
                return Err(not_exact(k, "p is not surjective"));
            }
            if !(&p.maps[k] * &i.maps[k]).is_zero() {
                return Err(not_exact(k, "p ∘ i != 0"));
            }
            // with p i = 0, ker p = im i is a dimension count
            if c.dim(k) + e.dim(k) != d.dim(k) {
                return Err(not_exact(k, "ker p is larger than im i"));
            }
        }
        Ok(Self { c, d, e, i, p })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

fn not_exact(degree: usize, reason: &str) -> Error {
    Error::NotExact {
        degree,
        reason: reason.to_string(),
    }
}

/// Cohomology of the three terms, computed once and reused.
#[derive(Debug, Clone)]
pub struct SesCohomology {
    pub c: CohomologyResult,
    pub d: CohomologyResult,
    pub e: CohomologyResult,
}

impl SesCohomology {
    pub fn new(s: &ShortExactSeq) -> Result<Self> {
        Ok(Self {
            c: complex_cohomology(&s.c)?,
            d: complex_cohomology(&s.d)?,
            e: complex_cohomology(&s.e)?,
        })
    }
}

/// Snake-lemma map `H^q(E) → H^{q+1}(C)` in representative coordinates: lift
/// through `p`, apply `d`, pull back through `i`.
pub fn connecting_map(s: &ShortExactSeq, q: usize) -> Result<QMatrix> {
    let h = SesCohomology::new(s)?;
    connecting_map_with(s, &h, q, &[])
}

/// As [`connecting_map`], adding `i(offsets[j])` to the lift of the `j`-th
/// representative. The result must not depend on the offsets.
pub fn connecting_map_with(
    s: &ShortExactSeq,
    h: &SesCohomology,
    q: usize,
    offsets: &[Vec<Rational>],
) -> Result<QMatrix> {
    let reps = &h.e.representatives[q];
    if q + 1 >= s.len() {
        return Ok(QMatrix::zeros(0, reps.len()));
    }
    if reps.is_empty() {
        return Ok(QMatrix::zeros(h.c.betti[q + 1], 0));
    }
    let mut lifts = s.p.maps[q].solve_many(&reps.as_matrix()).ok_or(Error::LiftFailure(q))?;
    for (j, off) in offsets.iter().enumerate().take(reps.len()) {
        let shift = s.i.maps[q].mul_vec(off);
        for (r, v) in shift.into_iter().enumerate() {
            lifts[(r, j)] += v;
        }
    }
    let dx = &s.d.diffs()[q] * &lifts;
    let y = s.i.maps[q + 1].solve_many(&dx).ok_or(Error::LiftFailure(q + 1))?;
    h.c.class_coordinates_many(q + 1, &y).ok_or(Error::LiftFailure(q + 1))
}

/// Exactness verdict at one node of the long exact sequence.
#[derive(Debug, Clone, Serialize)]
pub struct NodeCheck {
    pub node: String,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub composite_zero: bool,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LesReport {
    pub nodes: Vec<NodeCheck>,
    pub betti_c: Vec<usize>,
    pub betti_d: Vec<usize>,
    pub betti_e: Vec<usize>,
    pub euler_c: i64,
    pub euler_d: i64,
    pub euler_e: i64,
    pub euler_additive: bool,
    pub exact: bool,
}

/// Assembles `… → H^q(C) → H^q(D) → H^q(E) → H^{q+1}(C) → …` and checks
/// exactness at every node by rank counting.
pub fn les_exactness_check(s: &ShortExactSeq) -> Result<LesReport> {
    let h = SesCohomology::new(s)?;
    let len = s.len();
    // the long sequence as a list of (node name, dim) and maps between them
    let mut nodes: Vec<(String, usize)> = Vec::new();
    let mut maps: Vec<QMatrix> = Vec::new();
    for q in 0..len {
        nodes.push((format!("H^{q}(C)"), h.c.betti[q]));
        nodes.push((format!("H^{q}(D)"), h.d.betti[q]));
        nodes.push((format!("H^{q}(E)"), h.e.betti[q]));
        maps.push(induced_map(&h.c, &h.d, q, &s.i.maps[q]));
        maps.push(induced_map(&h.d, &h.e, q, &s.p.maps[q]));
        if q + 1 < len {
            maps.push(connecting_map_with(s, &h, q, &[])?);
        }
    }
    let mut checks = Vec::with_capacity(nodes.len());
    for (n, (name, dim)) in nodes.iter().enumerate() {
        let incoming = n.checked_sub(1).map(|m| &maps[m]);
        let outgoing = maps.get(n);
        let rank_in = incoming.map_or(0, QMatrix::rank);
        let rank_out = outgoing.map_or(0, QMatrix::rank);
        let composite_zero = match (incoming, outgoing) {
            (Some(f), Some(g)) => (g * f).is_zero(),
            _ => true,
        };
        checks.push(NodeCheck {
            node: name.clone(),
            dim: *dim,
            rank_in,
            rank_out,
            composite_zero,
            exact: composite_zero && rank_in + rank_out == *dim,
        });
    }
    let (ec, ed, ee) = (
        s.c.euler_characteristic(),
        s.d.euler_characteristic(),
        s.e.euler_characteristic(),
    );
    let euler_additive = ed == ec + ee
        && h.d.euler_characteristic() == h.c.euler_characteristic() + h.e.euler_characteristic();
    let exact = checks.iter().all(|c| c.exact);
    Ok(LesReport {
        nodes: checks,
        betti_c: h.c.betti,
        betti_d: h.d.betti,
        betti_e: h.e.betti,
        euler_c: ec,
        euler_d: ed,
        euler_e: ee,
        euler_additive,
        exact,
    })
}

fn direct_sum(a: &GenericComplex, b: &GenericComplex) -> GenericComplex {
    let dims = a.dims().iter().zip(b.dims()).map(|(x, y)| x + y).collect();
    let diff = a
        .diffs()
        .iter()
        .zip(b.diffs())
        .map(|(x, y)| QMatrix::direct_sum(x, y))
        .collect();
    GenericComplex::new_unchecked(dims, diff).expect("consistent shapes")
}

/// Mayer–Vietoris sequence `0 → C → U ⊕ V → W → 0` with second map
/// `(u, v) ↦ r_V(v) - r_U(u)`. The first term is computed as the kernel of
/// that map, i.e. the glued complex.
pub fn mv_two_set(
    u: &GenericComplex,
    v: &GenericComplex,
    w: &GenericComplex,
    r_u: &ChainMap,
    r_v: &ChainMap,
) -> Result<ShortExactSeq> {
    let len = w.len();
    if u.len() != len || v.len() != len {
        return Err(not_exact(0, "complexes have different lengths"));
    }
    if let Some(k) = r_u.commutation_failure(u, w) {
        return Err(not_exact(k, "restriction from U is not a chain map"));
    }
    if let Some(k) = r_v.commutation_failure(v, w) {
        return Err(not_exact(k, "restriction from V is not a chain map"));
    }
    let d = direct_sum(u, v);
    let p = ChainMap {
        maps: r_u
            .maps
            .iter()
            .zip(&r_v.maps)
            .map(|(a, b)| QMatrix::hstack(&[&-a, b]))
            .collect(),
    };
    for k in 0..len {
        if p.maps[k].rank() != w.dim(k) {
            return Err(not_exact(k, "difference of restrictions is not surjective"));
        }
    }
    let kernels: Vec<QMatrix> = p.maps.iter().map(|m| m.kernel_basis().as_matrix()).collect();
    let dims: Vec<usize> = kernels.iter().map(QMatrix::cols).collect();
    let mut diff = Vec::with_capacity(len.saturating_sub(1));
    for k in 0..len.saturating_sub(1) {
        let image = &d.diffs()[k] * &kernels[k];
        let m = kernels[k + 1]
            .solve_many(&image)
            .ok_or_else(|| not_exact(k + 1, "kernel is not a subcomplex"))?;
        diff.push(m);
    }
    let c = GenericComplex::new(dims, diff)?;
    ShortExactSeq::new(c, d, w.clone(), ChainMap { maps: kernels }, p)
}

/// `f ⊗ 1` on total complexes of `A ⊗ B` and `A' ⊗ B`.
pub fn tensor_chain_map(f: &ChainMap, src: &TensorComplex, tgt: &TensorComplex, b: &GenericComplex) -> ChainMap {
    let maps = src
        .blocks
        .iter()
        .enumerate()
        .map(|(n, blocks)| {
            let mut m = QMatrix::zeros(tgt.total.dim(n), src.total.dim(n));
            for blk in blocks {
                if let Some(t) = tgt.block(blk.p, blk.q) {
                    let piece = f.maps[blk.p].kronecker(&QMatrix::identity(b.dim(blk.q)));
                    m.set_block(t.offset, blk.offset, &piece);
                }
            }
            m
        })
        .collect();
    ChainMap { maps }
}

/// Mayer–Vietoris for `U, V, W` each tensored with `B` (e.g. a CE complex).
pub fn mv_two_set_tensored(
    u: &GenericComplex,
    v: &GenericComplex,
    w: &GenericComplex,
    r_u: &ChainMap,
    r_v: &ChainMap,
    b: &GenericComplex,
) -> Result<ShortExactSeq> {
    let (tu, tv, tw) = (tensor_complex(u, b), tensor_complex(v, b), tensor_complex(w, b));
    let ru = tensor_chain_map(r_u, &tu, &tw, b);
    let rv = tensor_chain_map(r_v, &tv, &tw, b);
    mv_two_set(&tu.total, &tv.total, &tw.total, &ru, &rv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homological::{padded_cochains, restriction, simplicial_cochain_complex, SimplicialComplex};
    use crate::qlinalg::q;

    fn split(c: &GenericComplex, e: &GenericComplex) -> ShortExactSeq {
        let d = direct_sum(c, e);
        let i = ChainMap {
            maps: (0..c.len())
                .map(|k| QMatrix::vstack(&[&QMatrix::identity(c.dim(k)), &QMatrix::zeros(e.dim(k), c.dim(k))]))
                .collect(),
        };
        let p = ChainMap {
            maps: (0..c.len())
                .map(|k| QMatrix::hstack(&[&QMatrix::zeros(e.dim(k), c.dim(k)), &QMatrix::identity(e.dim(k))]))
                .collect(),
        };
        ShortExactSeq::new(c.clone(), d, e.clone(), i, p).unwrap()
    }

    fn cone() -> ShortExactSeq {
        // C = (0 -> Q), E = (Q -> 0), D = (Q -id-> Q)
        let c = GenericComplex::zero_differentials(vec![0, 1]);
        let e = GenericComplex::zero_differentials(vec![1, 0]);
        let d = GenericComplex::new(vec![1, 1], vec![QMatrix::identity(1)]).unwrap();
        let i = ChainMap { maps: vec![QMatrix::zeros(1, 0), QMatrix::identity(1)] };
        let p = ChainMap { maps: vec![QMatrix::identity(1), QMatrix::zeros(0, 1)] };
        ShortExactSeq::new(c, d, e, i, p).unwrap()
    }

    #[test]
    fn split_sequence_has_zero_connecting_map() {
        let circle = simplicial_cochain_complex(&SimplicialComplex::circle());
        let s = split(&circle, &circle);
        assert!(connecting_map(&s, 0).unwrap().is_zero());
        let report = les_exactness_check(&s).unwrap();
        assert!(report.exact);
        assert!(report.euler_additive);
    }

    #[test]
    fn cone_connecting_map_is_identity() {
        let s = cone();
        assert_eq!(connecting_map(&s, 0).unwrap(), QMatrix::identity(1));
        assert!(les_exactness_check(&s).unwrap().exact);
    }

    #[test]
    fn invalid_sequences_are_rejected() {
        let c = GenericComplex::zero_differentials(vec![1]);
        let d = GenericComplex::zero_differentials(vec![1]);
        let e = GenericComplex::zero_differentials(vec![1]);
        let i = ChainMap { maps: vec![QMatrix::identity(1)] };
        let p = ChainMap { maps: vec![QMatrix::identity(1)] };
        assert!(matches!(
            ShortExactSeq::new(c, d, e, i, p),
            Err(Error::NotExact { degree: 0, .. })
        ));
    }

    #[test]
    fn circle_from_two_arcs() {
        let (whole, u, v) = SimplicialComplex::circle_two_arcs();
        let w = u.intersection(&v);
        let len = simplicial_cochain_complex(&whole).len();
        let (cu, cv, cw) = (padded_cochains(&u, len), padded_cochains(&v, len), padded_cochains(&w, len));
        let ru = restriction(&u, &w).unwrap();
        let rv = restriction(&v, &w).unwrap();
        let ru = ChainMap { maps: pad_maps(ru.maps, &cu, &cw) };
        let rv = ChainMap { maps: pad_maps(rv.maps, &cv, &cw) };
        let s = mv_two_set(&cu, &cv, &cw, &ru, &rv).unwrap();
        let h = SesCohomology::new(&s).unwrap();
        assert_eq!(h.c.betti, vec![1, 1]);
        let delta = connecting_map_with(&s, &h, 0, &[]).unwrap();
        assert_eq!(delta.shape(), (1, 2));
        assert_eq!(delta.rank(), 1);
        // another lift gives the same map
        let other = connecting_map_with(&s, &h, 0, &[vec![q(3), q(-1), q(2), q(5)], vec![q(1), q(1), q(0), q(7)]])
            .unwrap();
        assert_eq!(delta, other);
        let report = les_exactness_check(&s).unwrap();
        assert!(report.exact, "{report:?}");
        assert!(report.euler_additive);
    }

    #[test]
    fn identical_pieces_glue_to_the_diagonal() {
        let circle = simplicial_cochain_complex(&SimplicialComplex::circle());
        let id = ChainMap::identity(&circle);
        let s = mv_two_set(&circle, &circle, &circle, &id, &id).unwrap();
        assert_eq!(s.c.dims(), circle.dims());
        // i embeds each cochain diagonally
        let x = s.i.maps[0].column(0);
        assert_eq!(&x[..3], &x[3..]);
    }

    fn pad_maps(mut maps: Vec<QMatrix>, src: &GenericComplex, tgt: &GenericComplex) -> Vec<QMatrix> {
        for k in maps.len()..src.len() {
            maps.push(QMatrix::zeros(tgt.dim(k), src.dim(k)));
        }
        maps
    }
}
