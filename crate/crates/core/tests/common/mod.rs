//! Reference implementations used to cross-check the library. Deliberately
//! naive: dense `Vec<Vec<Rational>>`, explicit tuple evaluation, textbook
//! elimination.
#![allow(dead_code)]

use algco::qlinalg::q;
use algco::{LieAlgebra, LieMorphism, QMatrix, Rational, Representation};
use num_traits::Zero;
use rand::Rng;

pub type Dense = Vec<Vec<Rational>>;

/// All `k`-subsets of `0..n`, lexicographic.
pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Value of the basis form `α_I` on basis vectors `args`: the sign of the
/// sorting permutation, or zero.
fn eval_basis(i: &[usize], args: &[usize]) -> i64 {
    let mut a = args.to_vec();
    let mut sign = 1;
    // bubble sort, counting swaps
    for x in 0..a.len() {
        for y in 0..a.len() - 1 - x {
            if a[y] == a[y + 1] {
                return 0;
            }
            if a[y] > a[y + 1] {
                a.swap(y, y + 1);
                sign = -sign;
            }
        }
    }
    if a == i {
        sign
    } else {
        0
    }
}

fn without(j: &[usize], skip: &[usize]) -> Vec<usize> {
    j.iter()
        .enumerate()
        .filter(|(p, _)| !skip.contains(p))
        .map(|(_, v)| *v)
        .collect()
}

fn alt(p: usize) -> i64 {
    if p % 2 == 0 {
        1
    } else {
        -1
    }
}

/// CE differential `C^k → C^{k+1}` from the defining formula on tuples,
/// rows `(J, a)` and columns `(I, b)` indexed as `combo * fiber + fiber index`.
pub fn oracle_d(g: &LieAlgebra, rho: &[QMatrix], fiber: usize, k: usize) -> Dense {
    let n = g.dim();
    let src = combos(n, k);
    let tgt = combos(n, k + 1);
    let mut m = vec![vec![Rational::zero(); src.len() * fiber]; tgt.len() * fiber];
    for (ci, i) in src.iter().enumerate() {
        for (rj, j) in tgt.iter().enumerate() {
            // (dω)(x_1..x_{k+1}) = Σ_p (-1)^{p} ρ(x_p) ω(..x̂_p..)
            //   + Σ_{p<l} (-1)^{p+l} ω([x_p, x_l], ..x̂_p..x̂_l..)   (0-based p, l)
            for p in 0..=k {
                let s = eval_basis(i, &without(j, &[p]));
                if s == 0 {
                    continue;
                }
                for a in 0..fiber {
                    for b in 0..fiber {
                        let v = &rho[j[p]][(a, b)] * q(alt(p) * s);
                        m[rj * fiber + a][ci * fiber + b] += v;
                    }
                }
            }
            for p in 0..=k {
                for l in p + 1..=k {
                    let rest = without(j, &[p, l]);
                    let mut acc = Rational::zero();
                    for t in 0..n {
                        let c = g.c(j[p], j[l], t);
                        if c.is_zero() {
                            continue;
                        }
                        let mut args = vec![t];
                        args.extend(&rest);
                        acc += c * q(eval_basis(i, &args));
                    }
                    if acc.is_zero() {
                        continue;
                    }
                    let acc = acc * q(alt(p + l));
                    for a in 0..fiber {
                        m[rj * fiber + a][ci * fiber + a] += acc.clone();
                    }
                }
            }
        }
    }
    m
}

pub fn dense(m: &QMatrix) -> Dense {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

pub fn matmul(a: &Dense, b: &Dense, inner: usize) -> Dense {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).fold(Rational::zero(), |s, k| s + &row[k] * &b[k][c]))
                .collect()
        })
        .collect()
}

pub fn is_zero(m: &Dense) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Rank by plain Gauss–Jordan elimination.
pub fn rank(m: &Dense) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= piv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Betti numbers of `Ω(g, E)` from the oracle differential.
pub fn oracle_betti(r: &Representation) -> Vec<usize> {
    let g = r.algebra();
    let n = g.dim();
    let f = r.fiber_dim();
    let dims: Vec<usize> = (0..=n).map(|k| combos(n, k).len() * f).collect();
    let ranks: Vec<usize> = (0..n).map(|k| rank(&oracle_d(g, r.rho(), f, k))).collect();
    (0..=n)
        .map(|k| {
            let out = if k < n { ranks[k] } else { 0 };
            let inc = if k > 0 { ranks[k - 1] } else { 0 };
            dims[k] - out - inc
        })
        .collect()
}

/// Poincaré polynomial product.
pub fn convolution(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    while out.len() > 1 && out.last() == Some(&0) {
        out.pop();
    }
    out
}

pub fn trim(b: &[usize]) -> Vec<usize> {
    let mut v = b.to_vec();
    while v.len() > 1 && v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn small<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    q(rng.gen_range(lo..=hi))
}

pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| small(rng, -3, 3)).collect()).collect();
        let m = QMatrix::from_rows(&rows).expect("square");
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Cayley transform `(I - A)^{-1}(I + A)` of a skew matrix: a rational
/// rotation, hence an automorphism of `so3` in the cross-product basis.
pub fn cayley_rotation<R: Rng>(rng: &mut R) -> QMatrix {
    let (a, b, c) = (small(rng, -3, 3), small(rng, -3, 3), small(rng, -3, 3));
    let z = Rational::zero();
    let skew = QMatrix::from_rows(&[
        vec![z.clone(), -c.clone(), b.clone()],
        vec![c, z.clone(), -a.clone()],
        vec![-b, a, z],
    ])
    .expect("3x3");
    let id = QMatrix::identity(3);
    let inv = (&id - &skew).inverse().expect("I - A is invertible for skew A");
    &inv * &(&id + &skew)
}

/// `X ↦ M X M^{-1}` on `sl2` in the basis `(h, e, f)`.
pub fn sl2_conjugation<R: Rng>(rng: &mut R) -> QMatrix {
    let m = random_invertible(rng, 2);
    let mi = m.inverse().expect("invertible");
    let basis = [
        QMatrix::from_i64(&[&[1, 0], &[0, -1]]),
        QMatrix::from_i64(&[&[0, 1], &[0, 0]]),
        QMatrix::from_i64(&[&[0, 0], &[1, 0]]),
    ];
    let cols: Vec<Vec<Rational>> = basis
        .iter()
        .map(|x| {
            let y = &(&m * x) * &mi;
            // traceless [[a, b], [c, -a]] = a h + b e + c f
            vec![y[(0, 0)].clone(), y[(0, 1)].clone(), y[(1, 0)].clone()]
        })
        .collect();
    QMatrix::from_columns(3, &cols)
}

/// `[[a,b,0],[c,d,0],[x,y,ad-bc]]`, an endomorphism of the Heisenberg algebra.
pub fn heisenberg_endo<R: Rng>(rng: &mut R) -> QMatrix {
    let v: Vec<Rational> = (0..6).map(|_| small(rng, -3, 3)).collect();
    let det = &v[0] * &v[3] - &v[1] * &v[2];
    let z = Rational::zero();
    QMatrix::from_rows(&[
        vec![v[0].clone(), v[1].clone(), z.clone()],
        vec![v[2].clone(), v[3].clone(), z],
        vec![v[4].clone(), v[5].clone(), det],
    ])
    .expect("3x3")
}

/// Any map killing the center, into an abelian target.
pub fn heisenberg_to_abelian<R: Rng>(rng: &mut R, m: usize) -> QMatrix {
    let rows: Vec<Vec<Rational>> = (0..m)
        .map(|_| vec![small(rng, -3, 3), small(rng, -3, 3), Rational::zero()])
        .collect();
    QMatrix::from_rows(&rows).expect("m x 3")
}

/// Two commuting vectors of the Heisenberg algebra: parallel `(x, y)` parts.
pub fn abelian2_to_heisenberg<R: Rng>(rng: &mut R) -> QMatrix {
    let (a, b, k) = (small(rng, -3, 3), small(rng, -3, 3), small(rng, -2, 2));
    let c1 = vec![a.clone(), b.clone(), small(rng, -3, 3)];
    let c2 = vec![&k * &a, &k * &b, small(rng, -3, 3)];
    QMatrix::from_columns(3, &[c1, c2])
}

pub fn column_map<R: Rng>(rng: &mut R, target_dim: usize) -> QMatrix {
    QMatrix::from_columns(target_dim, &[(0..target_dim).map(|_| small(rng, -3, 3)).collect()])
}

/// Independent bracket-preservation test: `φ[e_i, e_j] = [φ e_i, φ e_j]`.
pub fn preserves_bracket(g: &LieAlgebra, h: &LieAlgebra, m: &QMatrix) -> bool {
    (0..g.dim()).all(|i| {
        (0..g.dim()).all(|j| {
            let lhs = m.mul_vec(g.bracket_basis(i, j));
            let rhs = h.bracket(&m.column(i), &m.column(j));
            lhs == rhs
        })
    })
}

pub fn morphism(g: &LieAlgebra, h: &LieAlgebra, m: QMatrix) -> LieMorphism {
    assert!(preserves_bracket(g, h, &m), "generator produced a non-morphism");
    LieMorphism::new(g.clone(), h.clone(), m).expect("bracket preserving")
}

/// Rotation by angle `|w|` about `w`, for the `so3` adjoint action of
/// `exp(ad_w)`.
pub fn rodrigues(w: [f64; 3]) -> [[f64; 3]; 3] {
    let th = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if th == 0.0 {
        return r;
    }
    let k = [w[0] / th, w[1] / th, w[2] / th];
    let kx = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]];
    let (s, c) = (th.sin(), 1.0 - th.cos());
    for i in 0..3 {
        for j in 0..3 {
            let kk: f64 = (0..3).map(|m| kx[i][m] * kx[m][j]).sum();
            r[i][j] += s * kx[i][j] + c * kk;
        }
    }
    r
}
