//! Monomial bases of the exterior algebra `Λ^• (k^n)*`.
//!
//! A monomial `α_{i1} ∧ ... ∧ α_{ik}` with `i1 < ... < ik` is stored as a bit
//! mask. Within each degree monomials are ordered lexicographically by their
//! sorted index tuples, and `α_I` evaluates to `1` on `(e_{i1}, ..., e_{ik})`.

use std::collections::HashMap;

pub type Mask = u64;

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn indices_of(mask: Mask) -> Vec<usize> {
    (0..Mask::BITS as usize).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign of `α_I ∧ α_J` relative to `α_{I ∪ J}`; zero if the sets meet.
pub fn wedge_sign(i: Mask, j: Mask) -> i32 {
    if i & j != 0 {
        return 0;
    }
    // count pairs (a in I, b in J) with a > b
    let mut inversions = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (i >> (b + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographically ordered monomials of every degree `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomials {
    n: usize,
    by_degree: Vec<Vec<Mask>>,
    index: Vec<HashMap<Mask, usize>>,
}

impl Monomials {
    pub fn new(n: usize) -> Self {
        assert!(n < Mask::BITS as usize, "exterior algebra too large");
        let mut by_degree = vec![Vec::new(); n + 1];
        let mut current = Vec::new();
        fn rec(start: usize, n: usize, current: &mut Vec<usize>, out: &mut [Vec<Mask>]) {
            out[current.len()].push(mask_of(current));
            for i in start..n {
                current.push(i);
                rec(i + 1, n, current, out);
                current.pop();
            }
        }
        rec(0, n, &mut current, &mut by_degree);
        // depth-first enumeration already yields lexicographic order per degree
        let index = by_degree
            .iter()
            .map(|ms| ms.iter().enumerate().map(|(i, &m)| (m, i)).collect())
            .collect();
        Self { n, by_degree, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, k: usize) -> usize {
        self.by_degree.get(k).map_or(0, Vec::len)
    }

    pub fn degree(&self, k: usize) -> &[Mask] {
        &self.by_degree[k]
    }

    pub fn index_of(&self, m: Mask) -> usize {
        self.index[m.count_ones() as usize][&m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let m = Monomials::new(4);
        let two: Vec<Vec<usize>> = m.degree(2).iter().map(|&x| indices_of(x)).collect();
        assert_eq!(
            two,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        for k in 0..=4 {
            assert_eq!(m.count(k), binomial(4, k));
        }
        assert_eq!(m.index_of(mask_of(&[1, 3])), 4);
    }

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(mask_of(&[0]), mask_of(&[1])), 1);
        assert_eq!(wedge_sign(mask_of(&[1]), mask_of(&[0])), -1);
        assert_eq!(wedge_sign(mask_of(&[1]), mask_of(&[1])), 0);
        // α2 ∧ α0α1 = α0α1α2 (two transpositions)
        assert_eq!(wedge_sign(mask_of(&[2]), mask_of(&[0, 1])), 1);
        assert_eq!(wedge_sign(mask_of(&[1, 3]), mask_of(&[0, 2])), -1);
    }
}
