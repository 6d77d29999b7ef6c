//! Framed surfaces: the complexes `G(n, k)` with tadpoles allowed on the
//! first `n` of `n + k` external vertices, the Euler operator and the long
//! exact sequence
//!
//! `H^q(G(n+1,k-1)) -f-> H^{q-1}(G(n,k)) -∧e-> H^{q+1}(G(n,k)) -i-> H^{q+1}(G(n+1,k-1))`.
//!
//! `G(n+1, k-1)` splits as `G(n, k) ⊕ T·G(n, k)` with `T` the tadpole at
//! vertex `n`. The sequence is checked on the images of
//! `H(F_{k_max}) → H(F_{k_probe})`, the groups reported by
//! [`crate::complex::betti`], node by node with the stabilization flags of
//! the degrees involved.

use std::collections::HashMap;

use num_traits::One;

use confgraph_linalg::{induced_rank_with, BettiTable, SparseMatrix};

use crate::algebra::PDAlgebra;
use crate::complex::{build_complex, stabilize, Flavor, FlavorKind, GradedComplex, Stabilization};
use crate::diff::ReducedDiagonal;
use crate::error::Error;
use crate::gc::GCElement;
use crate::graph::{Dec, Graph};
use crate::Rational;

/// `G(framed, unframed)` over a surface.
#[derive(Clone, Debug)]
pub struct BVFlavor {
    pub flavor: Flavor,
    pub framed: u8,
    pub unframed: u8,
}

impl BVFlavor {
    pub fn new(surface: &PDAlgebra, framed: u8, unframed: u8, mc: Option<GCElement>) -> Result<Self, Error> {
        if surface.dim != 2 {
            return Err(Error::FlavorViolation(format!("{} is not a surface", surface.name)));
        }
        Ok(BVFlavor {
            flavor: Flavor::decorated(FlavorKind::Bv { framed }, surface, mc)?,
            framed,
            unframed,
        })
    }

    pub fn n_ext(&self) -> u8 {
        self.framed + self.unframed
    }

    pub fn surface(&self) -> &PDAlgebra {
        self.flavor.algebra.as_ref().expect("surfaces carry an algebra")
    }
}

pub fn build_bv(f: &BVFlavor, lo: i32, hi: i32, k_max: u8) -> Result<GradedComplex, Error> {
    build_complex(&f.flavor, f.n_ext(), lo, hi, k_max)
}

/// Betti numbers of `G(n, 0)` with stabilization flags.
pub fn bv_betti(surface: &PDAlgebra, n: u8, lo: i32, hi: i32, k_max: u8, k_probe: u8) -> Result<(BettiTable, Stabilization), Error> {
    let f = BVFlavor::new(surface, n, 0, None)?;
    crate::complex::betti(&f.flavor, n, lo, hi, k_max, k_probe)
}

/// Decorating a vertex by the Euler form `Σ g^{αβ} e_α e_β` (unit legs
/// dropped), as a degree `+2` operator.
#[derive(Clone, Debug)]
pub struct EulerOperator {
    pub vertex: u8,
    diag: ReducedDiagonal,
}

impl EulerOperator {
    pub fn new(surface: &PDAlgebra, vertex: u8) -> Result<Self, Error> {
        Ok(EulerOperator {
            vertex,
            diag: ReducedDiagonal::new(surface)?,
        })
    }

    pub fn apply(&self, g: &Graph) -> Vec<(Graph, Rational)> {
        let mut out = Vec::new();
        for (a, b, c) in &self.diag.terms {
            let mut h = g.clone();
            let mut front = Vec::new();
            for (class, degree) in [a, b].into_iter().flatten() {
                front.push(Dec {
                    vertex: self.vertex,
                    class: *class,
                    degree: *degree,
                });
            }
            front.extend(h.decs.iter().copied());
            h.decs = front;
            out.push((h, c.clone()));
        }
        out
    }
}

fn index_of(basis: &[Graph]) -> HashMap<&Graph, usize> {
    basis.iter().enumerate().map(|(i, g)| (g, i)).collect()
}

/// Matrix of a linear map on graphs between two bases; terms outside
/// `dst` are an error.
fn matrix_of_map(src: &[Graph], dst: &[Graph], map: impl Fn(&Graph) -> Vec<(Graph, Rational)>) -> Result<SparseMatrix, Error> {
    let index = index_of(dst);
    let mut trip = Vec::new();
    for (c, g) in src.iter().enumerate() {
        for (h, v) in map(g) {
            let Some((canon, s)) = h.canonicalize() else {
                continue;
            };
            let r = *index
                .get(&canon)
                .ok_or_else(|| Error::FlavorViolation(format!("{canon} outside the target basis")))?;
            trip.push((r, c, if s < 0 { -v } else { v }));
        }
    }
    Ok(SparseMatrix::from_triplets(dst.len(), src.len(), trip)?)
}

/// Remove the tadpole at `v`, with the sign of moving that edge to the
/// front of the word; graphs without one go to zero.
pub fn remove_tadpole(g: &Graph, v: u8) -> Vec<(Graph, Rational)> {
    let Some(p) = g.edges.iter().position(|&(a, b)| a == v && b == v) else {
        return vec![];
    };
    let mut h = g.clone();
    h.edges.remove(p);
    // edges have odd degree for D = 2; internal vertices are even
    let s = if p % 2 == 0 { Rational::one() } else { -Rational::one() };
    vec![(h, s)]
}

/// `T·g`: a tadpole at `v` in front of the edge block.
pub fn insert_tadpole(g: &Graph, v: u8) -> Vec<(Graph, Rational)> {
    let mut h = g.clone();
    h.edges.insert(0, (v, v));
    vec![(h, Rational::one())]
}

/// Which of the three maps a node of the sequence sits between.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LesNode {
    /// `H^q(G(n+1,k-1))`, between `i` and `f`.
    Total,
    /// `H^q(G(n,k))` as source of `∧e`, between `f` and `∧e`.
    BaseBeforeEuler,
    /// `H^q(G(n,k))` as target of `∧e`, between `∧e` and `i`.
    BaseAfterEuler,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesEntry {
    pub node: LesNode,
    pub degree: i32,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub exact: bool,
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesReport {
    pub framed: u8,
    pub unframed: u8,
    pub k_max: u8,
    pub entries: Vec<LesEntry>,
}

impl LesReport {
    pub fn exact(&self) -> bool {
        self.entries.iter().all(|e| e.exact)
    }

    pub fn exact_where_stabilized(&self) -> bool {
        self.entries.iter().filter(|e| e.stabilized).all(|e| e.exact)
    }

    /// The first node where exactness fails.
    pub fn witness(&self) -> Option<&LesEntry> {
        self.entries.iter().find(|e| !e.exact)
    }
}

/// Deliberate breakage for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LesFault {
    pub zero_euler: bool,
    pub zero_differential: bool,
}

/// Exactness of the sequence for `(n, k)`, degrees `lo ..= hi`.
pub fn les_check(surface: &PDAlgebra, n: u8, k: u8, lo: i32, hi: i32, k_max: u8, k_probe: u8) -> Result<LesReport, Error> {
    les_check_with(surface, n, k, lo, hi, k_max, k_probe, LesFault::default())
}

#[allow(clippy::too_many_arguments)]
pub fn les_check_with(
    surface: &PDAlgebra,
    n: u8,
    k: u8,
    lo: i32,
    hi: i32,
    k_max: u8,
    k_probe: u8,
    fault: LesFault,
) -> Result<LesReport, Error> {
    if k == 0 {
        return Err(Error::FlavorViolation("the sequence needs an unframed point".into()));
    }
    let total = BVFlavor::new(surface, n + 1, k - 1, None)?;
    let base = BVFlavor::new(surface, n, k, None)?;
    let big_x = build_bv(&total, lo, hi + 1, k_probe)?;
    let mut big_y = build_bv(&base, lo - 2, hi + 2, k_probe)?;
    if fault.zero_differential {
        big_y.zero_differentials();
    }
    let (sx, _) = stabilize(&big_x, lo, hi + 1, k_max);
    let (sy, _) = stabilize(&big_y, lo - 2, hi + 2, k_max);
    let x = big_x.truncate(k_max);
    let y = big_y.truncate(k_max);
    let euler = EulerOperator::new(surface, n)?;
    let h = |t: &BettiTable, q: i32| t.get(q).unwrap_or(0);
    let stable = |t: &BettiTable, q: i32| t.get(q).map(|_| t.stabilized[(q - t.lo) as usize]).unwrap_or(false);

    // ranks of H(F_{k_max}) -> H(F_{k_probe}) composed with each map, keyed
    // by source degree; these are the ranks between the reported images
    let rank_f = |q: i32| -> Result<usize, Error> {
        let phi = matrix_of_map(x.basis(q), big_y.basis(q - 1), |g| remove_tadpole(g, n))?;
        Ok(induced_rank_with(&x.diff(q), &big_y.diff(q - 2), &phi, x.diff_rank(q), big_y.diff_rank(q - 2)))
    };
    let rank_e = |q: i32| -> Result<usize, Error> {
        if fault.zero_euler {
            return Ok(0);
        }
        let phi = matrix_of_map(y.basis(q), big_y.basis(q + 2), |g| euler.apply(g))?;
        Ok(induced_rank_with(&y.diff(q), &big_y.diff(q + 1), &phi, y.diff_rank(q), big_y.diff_rank(q + 1)))
    };
    let rank_i = |q: i32| -> Result<usize, Error> {
        let phi = matrix_of_map(y.basis(q), big_x.basis(q), |g| vec![(g.clone(), Rational::one())])?;
        Ok(induced_rank_with(&y.diff(q), &big_x.diff(q - 1), &phi, y.diff_rank(q), big_x.diff_rank(q - 1)))
    };

    let mut entries = Vec::new();
    for q in lo..=hi {
        let (ri, rf) = (rank_i(q)?, rank_f(q)?);
        let dim = h(&sx, q);
        entries.push(LesEntry {
            node: LesNode::Total,
            degree: q,
            dim,
            rank_in: ri,
            rank_out: rf,
            exact: ri + rf == dim,
            stabilized: stable(&sx, q) && stable(&sy, q) && stable(&sy, q - 1),
        });
        let (rf1, re) = (rank_f(q + 1)?, rank_e(q)?);
        let dim = h(&sy, q);
        entries.push(LesEntry {
            node: LesNode::BaseBeforeEuler,
            degree: q,
            dim,
            rank_in: rf1,
            rank_out: re,
            exact: rf1 + re == dim,
            stabilized: stable(&sy, q) && stable(&sx, q + 1) && stable(&sy, q + 2),
        });
        let (re2, ri) = (rank_e(q - 2)?, rank_i(q)?);
        entries.push(LesEntry {
            node: LesNode::BaseAfterEuler,
            degree: q,
            dim,
            rank_in: re2,
            rank_out: ri,
            exact: re2 + ri == dim,
            stabilized: stable(&sy, q) && stable(&sy, q - 2) && stable(&sx, q),
        });
    }
    if !fault.zero_differential && !entries.iter().any(|e| e.stabilized) {
        return Err(Error::NotStabilized(format!(
            "no degree in [{lo}, {hi}] is stabilized for (n, k) = ({n}, {k}) at k_max = {k_max}"
        )));
    }
    Ok(LesReport {
        framed: n,
        unframed: k,
        k_max,
        entries,
    })
}
