//! Reduced row echelon form over the rationals, used where an explicit
//! solution is needed (image witnesses, kernel bases). Rank alone should go
//! through [`crate::rank`], which is much cheaper.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::LinalgError;
use crate::matrix::SparseMatrix;
use crate::rational::Rational;

type SparseRow = Vec<(usize, Rational)>;

/// Pivot rows of a fully reduced echelon form, keyed by pivot column; each
/// pivot entry is 1 and no other stored row has a nonzero in that column.
struct Rref {
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy_row(target: &SparseRow, factor: &Rational, src: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(target.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < src.len() {
        let ci = target.get(i).map_or(usize::MAX, |e| e.0);
        let cj = src.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push(target[i].clone());
            i += 1;
        } else if cj < ci {
            out.push((cj, -(factor * &src[j].1)));
            j += 1;
        } else {
            let v = &target[i].1 - factor * &src[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Rref {
    /// Insert rows one at a time, processed in index order so that the
    /// result is reproducible. Pivot columns are restricted to `< limit`.
    fn build(rows: Vec<SparseRow>, limit: usize) -> (Rref, Vec<SparseRow>) {
        let mut rref = Rref {
            pivots: BTreeMap::new(),
        };
        let mut inconsistent = Vec::new();
        for row in rows {
            let mut row = row;
            // reduce against existing pivots
            let mut k = 0;
            while k < row.len() {
                let (c, v) = (row[k].0, row[k].1.clone());
                if let Some(p) = rref.pivots.get(&c) {
                    row = axpy_row(&row, &v, p);
                    k = row.partition_point(|e| e.0 <= c);
                } else {
                    k += 1;
                }
            }
            let Some(&(pc, ref pv)) = row.iter().find(|(c, _)| *c < limit) else {
                if !row.is_empty() {
                    inconsistent.push(row);
                }
                continue;
            };
            let inv = Rational::one() / pv;
            let row: SparseRow = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
            // clear the new pivot column from the other pivot rows
            for other in rref.pivots.values_mut() {
                if let Ok(i) = other.binary_search_by_key(&pc, |e| e.0) {
                    let f = other[i].1.clone();
                    *other = axpy_row(other, &f, &row);
                }
            }
            rref.pivots.insert(pc, row);
        }
        (rref, inconsistent)
    }
}

/// Decide whether `v` is in the column span of `m`; on success return `x`
/// with `m x = v`, free variables set to zero.
pub fn in_image(m: &SparseMatrix, v: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
    if v.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows(),
            got: v.len(),
        });
    }
    let n = m.cols();
    let mut rows = m.row_vectors();
    for (r, x) in v.iter().enumerate() {
        if !x.is_zero() {
            rows[r].push((n, x.clone()));
        }
    }
    let (rref, inconsistent) = Rref::build(rows, n);
    if !inconsistent.is_empty() {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for (pc, row) in &rref.pivots {
        if let Some((_, rhs)) = row.last().filter(|(c, _)| *c == n) {
            x[*pc] = rhs.clone();
        }
    }
    Ok(Some(x))
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<Rational>> {
    let n = m.cols();
    let (rref, _) = Rref::build(m.row_vectors(), n);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !rref.pivots.contains_key(c)) {
        let mut x = vec![Rational::zero(); n];
        x[free] = Rational::one();
        for (pc, row) in &rref.pivots {
            if let Ok(i) = row.binary_search_by_key(&free, |e| e.0) {
                x[*pc] = -row[i].1.clone();
            }
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> Rational {
        Rational::from_integer(x.into())
    }

    #[test]
    fn witnesses() {
        let id = SparseMatrix::identity(2);
        assert_eq!(in_image(&id, &[q(1), q(0)]).unwrap(), Some(vec![q(1), q(0)]));
        let z = SparseMatrix::zero(2, 2);
        assert_eq!(in_image(&z, &[q(1), q(0)]).unwrap(), None);
        let m = SparseMatrix::from_i64(&[&[1, 2], &[1, 2]]);
        let w = in_image(&m, &[q(3), q(3)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&w).unwrap(), vec![q(3), q(3)]);
        assert!(in_image(&m, &[q(1)]).is_err());
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = SparseMatrix::from_i64(&[&[1, 1, 1], &[2, 2, 2]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }
}
