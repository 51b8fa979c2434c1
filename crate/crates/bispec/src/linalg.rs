//! Exact dense linear algebra over Q(i): an incrementally maintained
//! reduced row echelon form, with rank, span-membership, and kernel-basis
//! queries. Everything is deterministic: rows are processed in the order
//! they are given, and each new row is reduced against the pivots found so
//! far, so identical inputs always produce identical output.

use crate::exactnum::G;

/// Reduced row echelon form built one row at a time.
#[derive(Debug, Clone)]
pub struct Echelon {
    cols: usize,
    /// Rows sorted by pivot column; each row's pivot entry is 1 and is the
    /// only nonzero entry in its column among the stored rows.
    rows: Vec<Vec<G>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `row` against the current pivots, in place.
    fn reduce(&self, row: &mut [G]) {
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            if row[pc].is_zero() {
                continue;
            }
            let factor = row[pc].clone();
            for c in 0..self.cols {
                if !r[c].is_zero() {
                    row[c] = &row[c] - &(&factor * &r[c]);
                }
            }
        }
    }

    /// Inserts a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, mut row: Vec<G>) -> bool {
        assert_eq!(row.len(), self.cols);
        self.reduce(&mut row);
        let Some(pc) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        // normalize the pivot to 1
        let inv = row[pc].inv().unwrap();
        for c in row.iter_mut() {
            if !c.is_zero() {
                *c = &*c * &inv;
            }
        }
        // eliminate the new pivot column from existing rows
        for r in self.rows.iter_mut() {
            if !r[pc].is_zero() {
                let factor = r[pc].clone();
                for c in 0..self.cols {
                    if !row[c].is_zero() {
                        r[c] = &r[c] - &(&factor * &row[c]);
                    }
                }
            }
        }
        // keep rows sorted by pivot column
        let at = self.pivots.partition_point(|&p| p < pc);
        self.pivots.insert(at, pc);
        self.rows.insert(at, row);
        true
    }

    /// True iff `row` is a linear combination of the inserted rows.
    pub fn contains(&self, row: &[G]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(|c| c.is_zero())
    }

    /// If `row` lies in the span, returns its coordinates with respect to
    /// the rows as originally inserted is *not* recoverable from RREF; this
    /// instead returns the combination over the current reduced rows.
    pub fn reduce_row(&self, row: &[G]) -> Vec<G> {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r
    }

    /// Basis of { v : A v = 0 } where the inserted rows are the rows of A.
    pub fn kernel_basis(&self) -> Vec<Vec<G>> {
        let mut basis = vec![];
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &p in &self.pivots {
                s[p] = true;
            }
            s
        };
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![G::zero(); self.cols];
            v[free] = G::one();
            for (r, &pc) in self.rows.iter().zip(&self.pivots) {
                if !r[free].is_zero() {
                    v[pc] = -&r[free];
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of a list of vectors.
pub fn rank(vectors: &[Vec<G>], cols: usize) -> usize {
    let mut e = Echelon::new(cols);
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

/// Kernel basis of the matrix with the given rows.
pub fn nullspace(rows: &[Vec<G>], cols: usize) -> Vec<Vec<G>> {
    let mut e = Echelon::new(cols);
    for r in rows {
        e.insert(r.clone());
    }
    e.kernel_basis()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(ints: &[i64]) -> Vec<G> {
        ints.iter().map(|&n| G::from_int(n)).collect()
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let rows = vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])];
        assert!(nullspace(&rows, 3).is_empty());
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let rows = vec![v(&[0, 0, 0, 0]), v(&[0, 0, 0, 0])];
        let basis = nullspace(&rows, 4);
        assert_eq!(basis.len(), 4);
    }

    #[test]
    fn kernel_vectors_multiply_back_to_zero() {
        // a rank-deficient 5x7 matrix with structured entries
        let mut rows = vec![];
        for r in 0..5i64 {
            rows.push(
                (0..7i64)
                    .map(|c| G::from_frac(1, r + c + 1))
                    .collect::<Vec<_>>(),
            );
        }
        let basis = nullspace(&rows, 7);
        assert_eq!(basis.len(), 2); // Hilbert-like block has full row rank 5
        for k in &basis {
            for row in &rows {
                let dot = row
                    .iter()
                    .zip(k)
                    .fold(G::zero(), |acc, (a, b)| &acc + &(a * b));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn span_membership() {
        let mut e = Echelon::new(3);
        e.insert(v(&[1, 2, 3]));
        e.insert(v(&[0, 1, 1]));
        assert!(e.contains(&v(&[1, 3, 4])));
        assert!(!e.contains(&v(&[0, 0, 1])));
        assert_eq!(e.rank(), 2);
    }
}
