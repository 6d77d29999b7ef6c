//! Sparse fraction-free elimination.
//!
//! Rows are scaled to primitive integer vectors and eliminated with
//! `row <- (a/g) row - (b/g) pivot`, dividing every updated row by its
//! content afterwards. Pivots are chosen by Markowitz cost among the
//! columns of smallest count, ties going to the lowest row then the lowest
//! column. The machine-integer path falls back to big integers on overflow.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::matrix::SparseMatrix;
use crate::rational::{lcm_of_denominators, Rational};

/// Number of low-count columns inspected per pivot search.
const CANDIDATE_COLUMNS: usize = 4;

struct Overflow;

type Row<T> = Vec<(u32, T)>;

trait Arith<T: Clone> {
    fn is_zero(&self, x: &T) -> bool;
    /// Multipliers `(alpha, beta)` so that `alpha*row - beta*pivot` kills the
    /// pivot column, where `a` is the pivot entry and `b` the row entry.
    fn factors(&self, a: &T, b: &T) -> (T, T);
    /// `alpha*x - beta*y`, absent entries read as zero.
    fn axpy(&self, alpha: &T, x: Option<&T>, beta: &T, y: Option<&T>) -> Result<T, Overflow>;
    fn normalize(&self, row: &mut Row<T>);
}

struct SmallInt;
struct BigIntArith;
struct ModP(u64);

impl Arith<i64> for SmallInt {
    fn is_zero(&self, x: &i64) -> bool {
        *x == 0
    }
    fn factors(&self, a: &i64, b: &i64) -> (i64, i64) {
        let g = a.gcd(b);
        (a / g, b / g)
    }
    fn axpy(&self, alpha: &i64, x: Option<&i64>, beta: &i64, y: Option<&i64>) -> Result<i64, Overflow> {
        let l = x.map_or(0i128, |x| *alpha as i128 * *x as i128);
        let r = y.map_or(0i128, |y| *beta as i128 * *y as i128);
        i64::try_from(l - r).map_err(|_| Overflow)
    }
    fn normalize(&self, row: &mut Row<i64>) {
        let mut g = 0i64;
        for (_, v) in row.iter() {
            g = g.gcd(v);
            if g == 1 {
                return;
            }
        }
        if g > 1 {
            row.iter_mut().for_each(|(_, v)| *v /= g);
        }
    }
}

impl Arith<BigInt> for BigIntArith {
    fn is_zero(&self, x: &BigInt) -> bool {
        x.is_zero()
    }
    fn factors(&self, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
        let g = a.gcd(b);
        (a / &g, b / &g)
    }
    fn axpy(
        &self,
        alpha: &BigInt,
        x: Option<&BigInt>,
        beta: &BigInt,
        y: Option<&BigInt>,
    ) -> Result<BigInt, Overflow> {
        let l = x.map_or_else(BigInt::zero, |x| alpha * x);
        let r = y.map_or_else(BigInt::zero, |y| beta * y);
        Ok(l - r)
    }
    fn normalize(&self, row: &mut Row<BigInt>) {
        let mut g = BigInt::zero();
        for (_, v) in row.iter() {
            g = g.gcd(v);
            if g.is_one() {
                return;
            }
        }
        if g > BigInt::one() {
            row.iter_mut().for_each(|(_, v)| *v /= &g);
        }
    }
}

impl ModP {
    fn inv(&self, a: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % self.0;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b, self.0);
            }
            b = mulmod(b, b, self.0);
            e >>= 1;
        }
        r
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl Arith<u64> for ModP {
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }
    fn factors(&self, a: &u64, b: &u64) -> (u64, u64) {
        (1, mulmod(*b, self.inv(*a), self.0))
    }
    fn axpy(&self, alpha: &u64, x: Option<&u64>, beta: &u64, y: Option<&u64>) -> Result<u64, Overflow> {
        let l = x.map_or(0, |x| mulmod(*alpha, *x, self.0));
        let r = y.map_or(0, |y| mulmod(*beta, *y, self.0));
        Ok((l + self.0 - r) % self.0)
    }
    fn normalize(&self, _row: &mut Row<u64>) {}
}

fn entry<T>(row: &Row<T>, col: u32) -> Option<&T> {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .ok()
        .map(|i| &row[i].1)
}

fn combine<T: Clone, A: Arith<T>>(
    ar: &A,
    alpha: &T,
    row: &Row<T>,
    beta: &T,
    pivot: &Row<T>,
) -> Result<Row<T>, Overflow> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(u32::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(u32::MAX, |e| e.0);
        let (col, x, y) = if ci < cj {
            i += 1;
            (ci, Some(&row[i - 1].1), None)
        } else if cj < ci {
            j += 1;
            (cj, None, Some(&pivot[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, Some(&row[i - 1].1), Some(&pivot[j - 1].1))
        };
        let v = ar.axpy(alpha, x, beta, y)?;
        if !ar.is_zero(&v) {
            out.push((col, v));
        }
    }
    ar.normalize(&mut out);
    Ok(out)
}

struct Counts {
    count: Vec<u32>,
    order: BTreeSet<(u32, u32)>,
}

impl Counts {
    fn add(&mut self, col: u32, delta: i32) {
        let c = &mut self.count[col as usize];
        if *c > 0 {
            self.order.remove(&(*c, col));
        }
        *c = (*c as i64 + delta as i64) as u32;
        if *c > 0 {
            self.order.insert((*c, col));
        }
    }
}

fn eliminate<T: Clone, A: Arith<T>>(ar: &A, mut rows: Vec<Row<T>>, ncols: usize) -> Result<usize, Overflow> {
    let mut active = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut counts = Counts {
        count: vec![0; ncols],
        order: BTreeSet::new(),
    };
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c as usize].push(i as u32);
            counts.count[*c as usize] += 1;
        }
    }
    for (c, &n) in counts.count.iter().enumerate() {
        if n > 0 {
            counts.order.insert((n, c as u32));
        }
    }

    let mut rank = 0;
    while !counts.order.is_empty() {
        let mut best: Option<(u64, u32, u32)> = None;
        let cands: Vec<(u32, u32)> = counts.order.iter().take(CANDIDATE_COLUMNS).copied().collect();
        for (cnt, col) in cands {
            let list = &mut col_rows[col as usize];
            list.sort_unstable();
            list.dedup();
            list.retain(|&r| active[r as usize] && entry(&rows[r as usize], col).is_some());
            for &r in list.iter() {
                let cost = (rows[r as usize].len() as u64 - 1) * (cnt as u64 - 1);
                let cand = (cost, r, col);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        let (_, pr, pc) = best.expect("a counted column has an active row");
        active[pr as usize] = false;
        let prow = std::mem::take(&mut rows[pr as usize]);
        for (c, _) in &prow {
            counts.add(*c, -1);
        }
        let a = entry(&prow, pc).expect("pivot entry").clone();
        let mut targets = std::mem::take(&mut col_rows[pc as usize]);
        targets.sort_unstable();
        targets.dedup();
        for r in targets {
            let ru = r as usize;
            if !active[ru] {
                continue;
            }
            let Some(b) = entry(&rows[ru], pc) else {
                continue;
            };
            let (alpha, beta) = ar.factors(&a, b);
            let new = combine(ar, &alpha, &rows[ru], &beta, &prow)?;
            let old = std::mem::replace(&mut rows[ru], new);
            let new = &rows[ru];
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < new.len() {
                let ci = old.get(i).map_or(u32::MAX, |e| e.0);
                let cj = new.get(j).map_or(u32::MAX, |e| e.0);
                if ci < cj {
                    counts.add(ci, -1);
                    i += 1;
                } else if cj < ci {
                    counts.add(cj, 1);
                    col_rows[cj as usize].push(r);
                    j += 1;
                } else {
                    i += 1;
                    j += 1;
                }
            }
        }
        rank += 1;
    }
    Ok(rank)
}

fn integer_rows(m: &SparseMatrix) -> Vec<Vec<(u32, BigInt)>> {
    m.row_vectors()
        .into_iter()
        .map(|row| {
            let l = lcm_of_denominators(row.iter().map(|(_, v)| v));
            let mut out: Vec<(u32, BigInt)> = row
                .into_iter()
                .map(|(c, v)| (c as u32, (v * Rational::from_integer(l.clone())).to_integer()))
                .collect();
            BigIntArith.normalize(&mut out);
            out
        })
        .collect()
}

/// Exact rank over the rationals.
pub fn rank(m: &SparseMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    // Eliminate along the shorter side: fewer pivots to search.
    let owned;
    let m = if m.rows() > m.cols() {
        owned = m.transpose();
        &owned
    } else {
        m
    };
    let big = integer_rows(m);
    let small: Option<Vec<Row<i64>>> = big
        .iter()
        .map(|row| row.iter().map(|(c, v)| v.to_i64().map(|x| (*c, x))).collect())
        .collect();
    if let Some(small) = small {
        if let Ok(r) = eliminate(&SmallInt, small, m.cols()) {
            return r;
        }
    }
    match eliminate(&BigIntArith, big, m.cols()) {
        Ok(r) => r,
        Err(Overflow) => unreachable!("big integers do not overflow"),
    }
}

/// Rank modulo a prime `p < 2^62`, or `None` when some denominator vanishes
/// mod `p`. Meant only as a cross-check of [`rank`].
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> Option<usize> {
    let ar = ModP(p);
    let pb = BigInt::from(p);
    let mut rows: Vec<Row<u64>> = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.entries() {
        let den = (v.denom() % &pb).to_u64()?;
        if den == 0 {
            return None;
        }
        let num = v.numer().mod_floor(&pb).to_u64()?;
        let x = mulmod(num, ar.inv(den), p);
        if x != 0 {
            rows[*r].push((*c as u32, x));
        }
    }
    eliminate(&ar, rows, m.cols()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&SparseMatrix::identity(2)), 2);
        assert_eq!(rank(&SparseMatrix::from_i64(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]])), 1);
        assert_eq!(rank(&SparseMatrix::zero(3, 4)), 0);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = i64::MAX / 3;
        let m = SparseMatrix::from_i64(&[&[big, big - 1, 7], &[big - 5, big, 3], &[1, 2, big]]);
        assert_eq!(rank(&m), 3);
        // determinant -1, but the cross products overflow i64
        let m = SparseMatrix::from_i64(&[&[big, big - 1], &[big - 1, big - 2]]);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn mod_p_agrees_on_rational_input() {
        let half = Rational::new(1.into(), 2.into());
        let m = SparseMatrix::from_dense(&[
            vec![half.clone(), Rational::from_integer(1.into())],
            vec![Rational::from_integer(1.into()), Rational::from_integer(2.into())],
        ]);
        assert_eq!(rank(&m), 1);
        assert_eq!(rank_mod_p(&m, 2_147_483_647), Some(1));
        assert_eq!(rank_mod_p(&m, 2), None);
    }
}
