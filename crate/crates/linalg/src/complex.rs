use crate::elim::rank;
use crate::error::LinalgError;
use crate::matrix::SparseMatrix;

/// What lies outside the stored degrees of a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// The complex is zero outside the stored range, so every degree is exact.
    Closed,
    /// Unknown neighbours: the two end degrees are reported unstabilized.
    Open,
}

/// A finite window of a cochain complex starting in degree `lo`.
/// `diffs[i]` maps degree `lo + i` to `lo + i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    pub lo: i32,
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseMatrix>,
}

impl CochainComplex {
    pub fn new(lo: i32, dims: Vec<usize>, diffs: Vec<SparseMatrix>) -> Result<Self, LinalgError> {
        if diffs.len() + 1 != dims.len().max(1) {
            return Err(LinalgError::DimensionMismatch {
                expected: dims.len().saturating_sub(1),
                got: diffs.len(),
            });
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.cols() != dims[i] || d.rows() != dims[i + 1] {
                return Err(LinalgError::DimensionMismatch {
                    expected: dims[i],
                    got: d.cols(),
                });
            }
        }
        Ok(CochainComplex { lo, dims, diffs })
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.dims.len() as i32 - 1
    }

    /// Verify that consecutive differentials compose to zero.
    pub fn check_d2(&self) -> Result<(), LinalgError> {
        for (i, w) in self.diffs.windows(2).enumerate() {
            if !w[1].mul(&w[0])?.is_zero() {
                return Err(LinalgError::CompositionNotZero(self.lo + i as i32));
            }
        }
        Ok(())
    }
}

/// Cohomology dimensions over a window of degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub lo: i32,
    pub dims: Vec<usize>,
    /// Rank of the differential leaving each degree.
    pub ranks: Vec<usize>,
    pub betti: Vec<usize>,
    pub stabilized: Vec<bool>,
}

impl BettiTable {
    pub fn hi(&self) -> i32 {
        self.lo + self.betti.len() as i32 - 1
    }

    pub fn get(&self, degree: i32) -> Option<usize> {
        usize::try_from(degree - self.lo)
            .ok()
            .and_then(|i| self.betti.get(i).copied())
    }

    pub fn all_stabilized(&self) -> bool {
        self.stabilized.iter().all(|&s| s)
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating(self.lo, &self.betti)
    }

    pub fn chain_euler_characteristic(&self) -> i64 {
        alternating(self.lo, &self.dims)
    }

    /// Betti numbers restricted to `[lo, hi]`, padding with zeros and
    /// `false` outside the stored range.
    pub fn restrict(&self, lo: i32, hi: i32) -> BettiTable {
        let pick = |d: i32| usize::try_from(d - self.lo).ok().filter(|&i| i < self.betti.len());
        let mut t = BettiTable {
            lo,
            dims: vec![],
            ranks: vec![],
            betti: vec![],
            stabilized: vec![],
        };
        for d in lo..=hi {
            match pick(d) {
                Some(i) => {
                    t.dims.push(self.dims[i]);
                    t.ranks.push(self.ranks[i]);
                    t.betti.push(self.betti[i]);
                    t.stabilized.push(self.stabilized[i]);
                }
                None => {
                    t.dims.push(0);
                    t.ranks.push(0);
                    t.betti.push(0);
                    t.stabilized.push(false);
                }
            }
        }
        t
    }
}

fn alternating(lo: i32, xs: &[usize]) -> i64 {
    xs.iter()
        .enumerate()
        .map(|(i, &b)| if (lo + i as i32).rem_euclid(2) == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

/// Betti numbers from dimensions and precomputed ranks (`ranks[i]` is the
/// rank of the differential leaving degree `lo + i`).
pub fn betti_from_ranks(lo: i32, dims: &[usize], ranks: &[usize], boundary: Boundary) -> BettiTable {
    let n = dims.len();
    let mut betti = Vec::with_capacity(n);
    for i in 0..n {
        let incoming = if i == 0 { 0 } else { ranks[i - 1] };
        betti.push(dims[i] - ranks[i] - incoming);
    }
    let mut stabilized = vec![true; n];
    if boundary == Boundary::Open && n > 0 {
        stabilized[0] = false;
        stabilized[n - 1] = false;
    }
    BettiTable {
        lo,
        dims: dims.to_vec(),
        ranks: ranks.to_vec(),
        betti,
        stabilized,
    }
}

/// Exact cohomology of a finite complex window. Fails with
/// [`LinalgError::CompositionNotZero`] if `d∘d ≠ 0`.
pub fn betti_of_complex(c: &CochainComplex, boundary: Boundary) -> Result<BettiTable, LinalgError> {
    c.check_d2()?;
    let mut ranks: Vec<usize> = c.diffs.iter().map(rank).collect();
    ranks.push(0);
    ranks.truncate(c.dims.len());
    Ok(betti_from_ranks(c.lo, &c.dims, &ranks, boundary))
}

/// Rank of the map induced on cohomology in one degree by a chain map
/// `phi: Y^d -> X^d` (a sign-twisted chain map works as well), computed from
/// ranks only: `rank [[d_Y, 0], [phi, d_X]] - rank d_Y - rank d_X` where
/// `d_Y: Y^d -> Y^{d+1}` and `d_X: X^{d-1} -> X^d`.
pub fn induced_rank(d_y: &SparseMatrix, d_x_prev: &SparseMatrix, phi: &SparseMatrix) -> usize {
    induced_rank_with(d_y, d_x_prev, phi, rank(d_y), rank(d_x_prev))
}

/// [`induced_rank`] with `rank d_Y` and `rank d_X` already known.
pub fn induced_rank_with(d_y: &SparseMatrix, d_x_prev: &SparseMatrix, phi: &SparseMatrix, rank_y: usize, rank_x: usize) -> usize {
    let (y, y1) = (d_y.cols(), d_y.rows());
    let (x0, x) = (d_x_prev.cols(), d_x_prev.rows());
    assert_eq!(phi.cols(), y, "phi source must match d_Y");
    assert_eq!(phi.rows(), x, "phi target must match d_X");
    let m = SparseMatrix::block(y1 + x, y + x0, &[(0, 0, d_y), (y1, 0, phi), (y1, y, d_x_prev)]);
    rank(&m) - rank_y - rank_x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex() -> CochainComplex {
        // cochains of the full 2-simplex: vertices, edges 01 02 12, face
        let d0 = SparseMatrix::from_i64(&[&[-1, 1, 0], &[-1, 0, 1], &[0, -1, 1]]);
        let d1 = SparseMatrix::from_i64(&[&[1, -1, 1]]);
        CochainComplex::new(0, vec![3, 3, 1], vec![d0, d1]).unwrap()
    }

    #[test]
    fn simplex_is_contractible() {
        let t = betti_of_complex(&simplex(), Boundary::Closed).unwrap();
        assert_eq!(t.betti, vec![1, 0, 0]);
        assert!(t.all_stabilized());
        assert_eq!(t.euler_characteristic(), t.chain_euler_characteristic());
    }

    #[test]
    fn nonzero_square_is_reported() {
        let d = SparseMatrix::identity(1);
        let c = CochainComplex::new(3, vec![1, 1, 1], vec![d.clone(), d]).unwrap();
        assert_eq!(betti_of_complex(&c, Boundary::Closed), Err(LinalgError::CompositionNotZero(3)));
    }

    #[test]
    fn open_boundary_flags_ends() {
        let c = CochainComplex::new(-1, vec![1, 1, 1], vec![SparseMatrix::zero(1, 1), SparseMatrix::zero(1, 1)])
            .unwrap();
        let t = betti_of_complex(&c, Boundary::Open).unwrap();
        assert_eq!(t.stabilized, vec![false, true, false]);
        assert_eq!(t.get(0), Some(1));
        assert_eq!(t.get(5), None);
    }

    #[test]
    fn induced_rank_of_identity_and_zero() {
        // Y = X = circle-like complex Q -0-> Q; identity induces rank 1 in degree 0
        let z = SparseMatrix::zero(1, 1);
        assert_eq!(induced_rank(&z, &SparseMatrix::zero(1, 0), &SparseMatrix::identity(1)), 1);
        assert_eq!(induced_rank(&z, &SparseMatrix::zero(1, 0), &z), 0);
        // a class that maps to a boundary induces zero
        let dx = SparseMatrix::identity(1);
        assert_eq!(induced_rank(&z, &dx, &SparseMatrix::identity(1)), 0);
    }
}
