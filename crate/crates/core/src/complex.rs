//! Finite truncations of the twisted graph complexes.
//!
//! Every flavor is graded by the starred degree and filtered by the number
//! of internal vertices `k`. The differential never raises `k`, so the span
//! of graphs with `k ≤ k_max` is a subcomplex; its cohomology is compared
//! against a larger truncation to decide stabilization.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use confgraph_linalg::{induced_rank_with, rank, BettiTable, CochainComplex, SparseMatrix};

use crate::algebra::PDAlgebra;
use crate::diff::{contract_terms, cut_components, split_terms, ReducedDiagonal};
use crate::error::Error;
use crate::gc::{z0, GCElement};
use crate::graph::{enumerate_graphs, Constraints, Graph, GraphSum};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlavorKind {
    /// Undecorated, internal vertices at least trivalent, contraction only.
    GraphsD,
    /// The full twisted comodule; tadpoles only when they are consistent.
    GraphsM,
    /// The subcomplex spanned by graphs without tadpoles.
    GraphsMNoTadpole,
    /// Quotient by graphs with an internal vertex of valence at most two.
    Reduced,
    /// Loop order zero part of [`FlavorKind::Reduced`].
    Forest,
    /// Framed surfaces: external tadpoles on the first `framed` vertices.
    Bv { framed: u8 },
}

impl FlavorKind {
    pub fn name(&self) -> String {
        match self {
            FlavorKind::GraphsD => "GraphsD".into(),
            FlavorKind::GraphsM => "GraphsM".into(),
            FlavorKind::GraphsMNoTadpole => "GraphsM_NoTadpole".into(),
            FlavorKind::Reduced => "graphsM_reduced".into(),
            FlavorKind::Forest => "graphsM_forest".into(),
            FlavorKind::Bv { framed } => format!("BVGraphs(framed={framed})"),
        }
    }
}

/// A flavor together with its algebra and Maurer–Cartan element.
#[derive(Clone, Debug)]
pub struct Flavor {
    pub kind: FlavorKind,
    pub dim: u8,
    pub algebra: Option<PDAlgebra>,
    pub mc: GCElement,
    diag: ReducedDiagonal,
}

impl Flavor {
    pub fn graphs_d(dim: u8) -> Self {
        Flavor {
            kind: FlavorKind::GraphsD,
            dim,
            algebra: None,
            mc: GCElement::zero(dim),
            diag: ReducedDiagonal::empty(),
        }
    }

    /// A decorated flavor; `mc` defaults to [`z0`].
    pub fn decorated(kind: FlavorKind, algebra: &PDAlgebra, mc: Option<GCElement>) -> Result<Self, Error> {
        if kind == FlavorKind::GraphsD {
            return Err(Error::FlavorViolation("GraphsD takes no algebra".into()));
        }
        let dim = algebra.dim as u8;
        if matches!(kind, FlavorKind::Bv { .. }) && dim != 2 {
            return Err(Error::FlavorViolation(format!("framed graphs need D = 2, got {dim}")));
        }
        let mc = mc.unwrap_or_else(|| z0(algebra));
        if mc.dim != dim {
            return Err(Error::AlgebraMismatch(format!("MC element of dimension {} for D = {dim}", mc.dim)));
        }
        if let Some((g, _)) = mc.terms.iter().find(|(g, _)| g.n_ext != 0 || !g.is_connected()) {
            return Err(Error::FlavorViolation(format!("MC term {g} is not a connected internal graph")));
        }
        Ok(Flavor {
            kind,
            dim,
            algebra: Some(algebra.clone()),
            mc,
            diag: ReducedDiagonal::new(algebra)?,
        })
    }

    /// Degrees of the reduced classes available as decorations.
    pub fn classes(&self) -> Vec<u8> {
        self.algebra.as_ref().map(|a| a.class_degrees()).unwrap_or_default()
    }

    /// Tadpoles are consistent with the twisted differential only when
    /// their splitting is killed by the MC element, i.e. for even `D` and
    /// vanishing Euler characteristic.
    pub fn tadpoles_allowed(&self) -> bool {
        let chi = self.algebra.as_ref().map(|a| a.euler_characteristic()).unwrap_or(1);
        self.dim % 2 == 0 && chi == 0
    }

    pub fn constraints(&self) -> Constraints {
        let base = Constraints {
            min_internal_valence: 1,
            ..Constraints::default()
        };
        match self.kind {
            FlavorKind::GraphsD => Constraints {
                min_internal_valence: 3,
                ..base
            },
            FlavorKind::GraphsM => Constraints {
                allow_ext_tadpoles: self.tadpoles_allowed(),
                allow_int_tadpoles: self.tadpoles_allowed(),
                ..base
            },
            FlavorKind::GraphsMNoTadpole => base,
            FlavorKind::Reduced => Constraints {
                min_internal_valence: 3,
                allow_ext_tadpoles: self.tadpoles_allowed(),
                allow_int_tadpoles: self.tadpoles_allowed(),
                ..base
            },
            FlavorKind::Forest => Constraints {
                min_internal_valence: 3,
                genus_cap: Some(0),
                ..base
            },
            FlavorKind::Bv { framed } => Constraints {
                allow_ext_tadpoles: true,
                framed: Some(framed),
                ..base
            },
        }
    }

    /// Whether the flavor is a quotient (terms outside the basis are
    /// dropped) rather than a subcomplex (such terms signal a bug).
    fn is_quotient(&self) -> bool {
        matches!(self.kind, FlavorKind::Reduced | FlavorKind::Forest)
    }

    pub fn admits(&self, g: &Graph) -> bool {
        g.dim == self.dim && self.constraints().admits(g) && (self.algebra.is_some() || g.decs.is_empty())
    }
}

/// The differential of one basis graph.
pub fn d_graphs(g: &Graph, flavor: &Flavor) -> Result<GraphSum, Error> {
    if !flavor.admits(g) {
        return Err(Error::FlavorViolation(format!("{g} is not a {} graph", flavor.kind.name())));
    }
    let mut raw = contract_terms(g);
    if flavor.kind != FlavorKind::GraphsD {
        raw.extend(split_terms(g, &flavor.diag));
    }
    let c = flavor.constraints();
    let mut out = GraphSum::new();
    for (h, coeff) in raw {
        let Some((h, f)) = cut_components(&h, &flavor.mc.terms) else {
            continue;
        };
        let Some((canon, s)) = h.canonicalize() else {
            continue;
        };
        if !c.admits(&canon) {
            if flavor.is_quotient() {
                continue;
            }
            return Err(Error::FlavorViolation(format!(
                "d leaves the {} complex: {canon}",
                flavor.kind.name()
            )));
        }
        let v = coeff * f;
        out.add_canonical(canon, if s < 0 { -v } else { v });
    }
    Ok(out)
}

/// A finite window of a truncated graph complex. `bases[i]` and the
/// matrices of `complex` refer to degree `complex.lo + i`; the window is
/// padded by one degree on each side so that inner Betti numbers are exact
/// for the truncation.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub kind: FlavorKind,
    pub n_ext: u8,
    pub k_max: u8,
    pub bases: Vec<Vec<Graph>>,
    pub complex: CochainComplex,
    /// Ranks of differentials keyed by `(truncation, degree)`, shared by
    /// all truncations of one build.
    ranks: Arc<Mutex<HashMap<(u8, i32), usize>>>,
}

impl GradedComplex {
    pub fn lo(&self) -> i32 {
        self.complex.lo
    }

    pub fn hi(&self) -> i32 {
        self.complex.hi()
    }

    pub fn basis(&self, degree: i32) -> &[Graph] {
        usize::try_from(degree - self.lo())
            .ok()
            .and_then(|i| self.bases.get(i))
            .map(|b| b.as_slice())
            .unwrap_or(&[])
    }

    /// The differential leaving `degree` (zero matrix outside the window).
    pub fn diff(&self, degree: i32) -> SparseMatrix {
        let i = degree - self.lo();
        if i >= 0 && (i as usize) < self.complex.diffs.len() {
            self.complex.diffs[i as usize].clone()
        } else {
            SparseMatrix::zero(self.basis(degree + 1).len(), self.basis(degree).len())
        }
    }

    /// `rank d` leaving `degree`, memoized.
    pub fn diff_rank(&self, degree: i32) -> usize {
        let key = (self.k_max, degree);
        if let Some(&r) = self.ranks.lock().expect("rank cache").get(&key) {
            return r;
        }
        let r = rank(&self.diff(degree));
        self.ranks.lock().expect("rank cache").insert(key, r);
        r
    }

    /// Replace every differential by zero (negative controls).
    pub fn zero_differentials(&mut self) {
        for d in self.complex.diffs.iter_mut() {
            *d = SparseMatrix::zero(d.rows(), d.cols());
        }
        self.ranks = Arc::default();
    }

    /// Betti numbers of the truncation on `[lo, hi]`, all flagged as
    /// computed for this truncation only.
    pub fn betti(&self, lo: i32, hi: i32) -> BettiTable {
        let mut t = BettiTable {
            lo,
            dims: vec![],
            ranks: vec![],
            betti: vec![],
            stabilized: vec![],
        };
        for p in lo..=hi {
            let dim = self.basis(p).len();
            let out = self.diff_rank(p);
            let inc = self.diff_rank(p - 1);
            t.dims.push(dim);
            t.ranks.push(out);
            t.betti.push(dim - out - inc);
            t.stabilized.push(false);
        }
        t
    }
}

/// Basis of one degree: all admitted graphs with at most `k_max` internal
/// vertices, sorted by `(k, canonical encoding)`.
pub fn enumerate_basis(flavor: &Flavor, n_ext: u8, degree: i32, k_max: u8) -> Vec<Graph> {
    let c = flavor.constraints();
    let classes = flavor.classes();
    let mut out: Vec<Graph> = (0..=k_max)
        .into_par_iter()
        .flat_map_iter(|k| enumerate_graphs(n_ext, flavor.dim, &c, k, degree, &classes))
        .collect();
    out.sort_by(|a, b| (a.n_int, a).cmp(&(b.n_int, b)));
    out
}

fn matrix_of(flavor: &Flavor, src: &[Graph], dst: &[Graph]) -> Result<SparseMatrix, Error> {
    let index: HashMap<&Graph, usize> = dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let cols: Vec<Result<Vec<(usize, usize, Rational)>, Error>> = src
        .par_iter()
        .enumerate()
        .map(|(j, g)| {
            let dg = d_graphs(g, flavor)?;
            let mut col = Vec::with_capacity(dg.len());
            for (h, c) in dg.iter() {
                let i = index.get(h).ok_or_else(|| {
                    Error::FlavorViolation(format!("target {h} missing from the enumerated basis"))
                })?;
                col.push((*i, j, c.clone()));
            }
            Ok(col)
        })
        .collect();
    let mut trip = Vec::new();
    for c in cols {
        trip.extend(c?);
    }
    Ok(SparseMatrix::from_triplets(dst.len(), src.len(), trip)?)
}

/// Basis graphs in degrees `lo ..= hi` with `d² ≠ 0`, and how many graphs
/// were checked. A term of `d` outside the enumerated basis is an error.
pub fn d2_defects(flavor: &Flavor, n_ext: u8, lo: i32, hi: i32, k_max: u8) -> Result<(usize, Vec<Graph>), Error> {
    let bases: Vec<Vec<Graph>> = (lo..=hi + 2).map(|p| enumerate_basis(flavor, n_ext, p, k_max)).collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut next = matrix_of(flavor, &bases[0], &bases[1])?;
    for i in 0..bases.len() - 2 {
        let d = next;
        next = matrix_of(flavor, &bases[i + 1], &bases[i + 2])?;
        let dd = next.mul(&d)?;
        checked += bases[i].len();
        let mut cols: Vec<usize> = dd.entries().iter().map(|&(_, c, _)| c).collect();
        cols.sort_unstable();
        cols.dedup();
        bad.extend(cols.into_iter().map(|c| bases[i][c].clone()));
    }
    Ok((checked, bad))
}

/// Build the truncation `k ≤ k_max` on degrees `lo-1 ..= hi+1` and verify
/// `d² = 0`.
pub fn build_complex(flavor: &Flavor, n_ext: u8, lo: i32, hi: i32, k_max: u8) -> Result<GradedComplex, Error> {
    if let FlavorKind::Bv { framed } = flavor.kind {
        if framed > n_ext {
            return Err(Error::FlavorViolation(format!("{framed} framed slots among {n_ext} points")));
        }
    }
    let degrees: Vec<i32> = (lo - 1..=hi + 1).collect();
    let bases: Vec<Vec<Graph>> = degrees.iter().map(|&p| enumerate_basis(flavor, n_ext, p, k_max)).collect();
    let mut diffs = Vec::new();
    for i in 0..bases.len() - 1 {
        diffs.push(matrix_of(flavor, &bases[i], &bases[i + 1])?);
    }
    let dims = bases.iter().map(|b| b.len()).collect();
    let complex = CochainComplex::new(lo - 1, dims, diffs)?;
    complex.check_d2()?;
    Ok(GradedComplex {
        kind: flavor.kind,
        n_ext,
        k_max,
        bases,
        complex,
        ranks: Arc::default(),
    })
}

impl GradedComplex {
    /// The subcomplex `k ≤ j`: a prefix of every basis, since bases are
    /// sorted by internal vertex count and `d` never raises it.
    pub fn truncate(&self, j: u8) -> GradedComplex {
        let keep: Vec<usize> = self.bases.iter().map(|b| b.partition_point(|g| g.n_int <= j)).collect();
        let bases: Vec<Vec<Graph>> = self.bases.iter().zip(&keep).map(|(b, &m)| b[..m].to_vec()).collect();
        let diffs = self
            .complex
            .diffs
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let trip = d
                    .entries()
                    .iter()
                    .filter(|(r, c, _)| *c < keep[i] && *r < keep[i + 1])
                    .cloned();
                SparseMatrix::from_triplets(keep[i + 1], keep[i], trip).expect("prefix indices")
            })
            .collect();
        GradedComplex {
            kind: self.kind,
            n_ext: self.n_ext,
            k_max: j.min(self.k_max),
            complex: CochainComplex {
                lo: self.complex.lo,
                dims: keep,
                diffs,
            },
            bases,
            ranks: self.ranks.clone(),
        }
    }

    /// Rank of `H^p(F_j) → H^p(self)` induced by the inclusion of the
    /// `k ≤ j` truncation.
    pub fn image_rank(&self, j: u8, p: i32) -> usize {
        if j >= self.k_max {
            let t = self.betti(p, p);
            return t.betti[0];
        }
        let small = self.truncate(j);
        let m = small.basis(p).len();
        let phi = SparseMatrix::from_triplets(
            self.basis(p).len(),
            m,
            (0..m).map(|i| (i, i, Rational::from_integer(1.into()))),
        )
        .expect("prefix inclusion");
        induced_rank_with(&small.diff(p), &self.diff(p - 1), &phi, small.diff_rank(p), self.diff_rank(p - 1))
    }
}

/// Per-degree comparison of truncations: `image[j][i]` is the rank of
/// `H(F_{k_max}) → H(F_j)` in degree `lo + i`, for `j` from `k_max` to
/// `k_probe`; `source` is the rank of `H(F_{k_max - 1}) → H(F_{k_probe})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilization {
    pub k_max: u8,
    pub k_probe: u8,
    pub image: Vec<Vec<usize>>,
    pub source: Vec<usize>,
}

/// Cohomology of a flavor on `[lo, hi]`, estimated through truncations.
///
/// The reported number in degree `p` is the rank of the map
/// `H^p(F_{k_max}) → H^p(F_{k_probe})` induced by inclusion, which discards
/// classes created by cutting the complex at `k_max`. A degree is flagged
/// stabilized when that rank is unchanged both by lowering the source to
/// `k_max - 1` and by lowering the target to `k_probe - 1` (the latter only
/// when `k_probe - 1 > k_max`). The table's `dims` and `ranks` describe
/// `F_{k_max}`.
pub fn betti(flavor: &Flavor, n_ext: u8, lo: i32, hi: i32, k_max: u8, k_probe: u8) -> Result<(BettiTable, Stabilization), Error> {
    if k_probe <= k_max {
        return Err(Error::FlavorViolation(format!("k_probe {k_probe} must exceed k_max {k_max}")));
    }
    let big = build_complex(flavor, n_ext, lo, hi, k_probe)?;
    Ok(stabilize(&big, lo, hi, k_max))
}

/// [`betti`] on an already built complex with `k_probe = big.k_max`.
pub fn stabilize(big: &GradedComplex, lo: i32, hi: i32, k_max: u8) -> (BettiTable, Stabilization) {
    let k_probe = big.k_max;
    let small = big.truncate(k_max);
    let mut t = small.betti(lo, hi);
    let targets: Vec<GradedComplex> = (k_max..=k_probe).map(|j| big.truncate(j)).collect();
    let jobs: Vec<(usize, i32)> = (0..=targets.len()).flat_map(|j| (lo..=hi).map(move |p| (j, p))).collect();
    let ranks: Vec<usize> = jobs
        .par_iter()
        .map(|&(j, p)| match targets.get(j) {
            Some(target) => target.image_rank(k_max, p),
            None if k_max == 0 => 0,
            None => big.image_rank(k_max - 1, p),
        })
        .collect();
    let width = (hi - lo + 1) as usize;
    let image: Vec<Vec<usize>> = ranks.chunks(width).take(targets.len()).map(|c| c.to_vec()).collect();
    let source: Vec<usize> = ranks[targets.len() * width..].to_vec();
    let last = image.last().expect("k_probe >= k_max").clone();
    for i in 0..t.betti.len() {
        let probe_ok = k_probe - 1 <= k_max || image[image.len() - 2][i] == last[i];
        t.stabilized[i] = source[i] == last[i] && probe_ok;
        t.betti[i] = last[i];
    }
    let st = Stabilization {
        k_max,
        k_probe,
        image,
        source,
    };
    (t, st)
}

/// Dimension of every `(degree, k)` cell, for diagnostics.
pub fn basis_profile(flavor: &Flavor, n_ext: u8, lo: i32, hi: i32, k_max: u8) -> BTreeMap<(i32, u8), usize> {
    let c = flavor.constraints();
    let classes = flavor.classes();
    let mut out = BTreeMap::new();
    for p in lo..=hi {
        for k in 0..=k_max {
            out.insert((p, k), enumerate_graphs(n_ext, flavor.dim, &c, k, p, &classes).len());
        }
    }
    out
}

/// Sum of `c·d(g)` over a graph sum.
pub fn d_sum(x: &GraphSum, flavor: &Flavor) -> Result<GraphSum, Error> {
    let mut out = GraphSum::new();
    for (g, c) in x.iter() {
        out.add_sum(&d_graphs(g, flavor)?, c);
    }
    Ok(out)
}
