use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::LinalgError;
use crate::rational::{format_rational, parse_rational, Rational};

/// Sparse matrix over the rationals.
///
/// Entries are kept sorted row-major, without duplicates and without stored
/// zeros. Columns index the source space and rows the target space, so a
/// differential `C^k -> C^{k+1}` has `dim C^{k+1}` rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rational)>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n).map(|i| (i, i, Rational::from_integer(1.into()))).collect();
        SparseMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Build from triplets. Repeated positions are summed and zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::OutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            *acc.entry((r, c)).or_insert_with(Rational::zero) += v;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Dense constructor, mostly for tests.
    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let trip = rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(move |(j, v)| (i, j, v.clone()))
        });
        Self::from_triplets(nrows, ncols, trip).expect("dense input is in range")
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        match self
            .entries
            .binary_search_by(|(r, c, _)| (*r, *c).cmp(&(row, col)))
        {
            Ok(i) => self.entries[i].2.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|(r, c, v)| (*c, *r, v.clone()))
            .collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.rows, self.cols);
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(r, c, v)| (*r, *c, v * s))
                .collect(),
        }
    }

    /// Rows as sparse vectors `(col, value)`.
    pub fn row_vectors(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let rhs_rows = rhs.row_vectors();
        let mut trip = Vec::new();
        let mut row_acc: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut i = 0;
        while i < self.entries.len() {
            let r = self.entries[i].0;
            row_acc.clear();
            while i < self.entries.len() && self.entries[i].0 == r {
                let (_, k, a) = &self.entries[i];
                for (c, b) in &rhs_rows[*k] {
                    *row_acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                }
                i += 1;
            }
            for (c, v) in row_acc.iter() {
                if !v.is_zero() {
                    trip.push((r, *c, v.clone()));
                }
            }
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            entries: trip,
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (r, c, a) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] += a * &v[*c];
            }
        }
        Ok(out)
    }

    /// Assemble a block matrix from pieces placed at `(row_offset, col_offset)`.
    pub fn block(rows: usize, cols: usize, parts: &[(usize, usize, &SparseMatrix)]) -> Self {
        let trip = parts.iter().flat_map(|(ro, co, m)| {
            m.entries.iter().map(move |(r, c, v)| (r + ro, c + co, v.clone()))
        });
        Self::from_triplets(rows, cols, trip).expect("block parts must fit")
    }

    /// Debug text dump: header `rows cols nnz`, then one `row col num/den`
    /// line per entry.
    pub fn dump(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.entries.len());
        for (r, c, v) in &self.entries {
            let _ = writeln!(s, "{} {} {}", r, c, format_rational(v));
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<SparseMatrix, LinalgError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, reason: &str| LinalgError::Parse {
            line: line + 1,
            reason: reason.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| perr(0, "missing header"))?;
        let h: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| perr(hl, "bad header field")))
            .collect::<Result<_, _>>()?;
        if h.len() != 3 {
            return Err(perr(hl, "header must be `rows cols nnz`"));
        }
        let mut trip = Vec::with_capacity(h[2]);
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(perr(ln, "expected `row col num/den`"));
            }
            let r = f[0].parse().map_err(|_| perr(ln, "bad row"))?;
            let c = f[1].parse().map_err(|_| perr(ln, "bad col"))?;
            let v = parse_rational(f[2]).map_err(|e| perr(ln, &e))?;
            trip.push((r, c, v));
        }
        if trip.len() != h[2] {
            return Err(perr(hl, "entry count does not match header"));
        }
        Self::from_triplets(h[0], h[1], trip)
    }
}
