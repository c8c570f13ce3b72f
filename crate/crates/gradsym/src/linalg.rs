//! Exact rank computations over the rationals on sparse column data.

use crate::galg::{Coeff, Rat};
use std::collections::BTreeMap;

pub type SparseVec = BTreeMap<usize, Rat>;

/// Rank of the span of the given sparse vectors (Gaussian elimination with pivot rows
/// keyed by leading index).
pub fn rank(vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut pivots: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for mut v in vectors {
        loop {
            let Some((&lead, _)) = v.iter().next() else { break };
            match pivots.get(&lead) {
                None => {
                    let inv = Rat::one() / &v[&lead];
                    for x in v.values_mut() {
                        *x *= &inv;
                    }
                    pivots.insert(lead, v);
                    break;
                }
                Some(p) => {
                    let factor = v[&lead].clone();
                    for (k, x) in p {
                        let e = v.entry(*k).or_insert_with(Rat::zero);
                        *e -= &factor * x;
                        if Coeff::is_zero(e) {
                            v.remove(k);
                        }
                    }
                }
            }
        }
    }
    pivots.len()
}

/// Inverse of a dense square rational matrix, or `None` if it is singular.
pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !Coeff::is_zero(&a[r][col]))?;
        a.swap(col, piv);
        let inv = Rat::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !Coeff::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galg::rint;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, x)| (k, rint(x))).collect()
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank(vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(2, 1)])]), 2);
        assert_eq!(rank(Vec::<SparseVec>::new()), 0);
        assert_eq!(rank(vec![v(&[(0, 1)]), v(&[(1, 1)]), v(&[(0, 1), (1, -1)])]), 2);
    }

    #[test]
    fn inverse_small() {
        let m = vec![vec![rint(0), rint(1)], vec![rint(-1), rint(2)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![rint(2), rint(-1)], vec![rint(1), rint(0)]]);
        assert!(inverse(&[vec![rint(1), rint(2)], vec![rint(2), rint(4)]]).is_none());
    }
}
