//! The graph Lie algebra of connected internal-only decorated graphs.
//!
//! Elements are functionals on the starred side: a [`GCElement`] stores the
//! value it takes on each canonical connected graph. Differential and
//! bracket are the transposes of the connected and the disconnecting parts
//! of the starred differential, so every sign is inherited from
//! [`crate::diff`]. GC degree is minus the starred degree of the graphs.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::PDAlgebra;
use crate::diff::{contract_terms, extract_component, split_terms, z_value, ReducedDiagonal};
use crate::error::Error;
use crate::graph::{enumerate_graphs, Constraints, Dec, Graph, GraphSum};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GCElement {
    pub dim: u8,
    pub terms: GraphSum,
}

/// Context needed for the differential and bracket.
#[derive(Clone, Debug)]
pub struct GCContext {
    pub algebra: PDAlgebra,
    pub diag: ReducedDiagonal,
    pub dim: u8,
}

impl GCContext {
    pub fn new(algebra: &PDAlgebra) -> Result<Self, Error> {
        Ok(GCContext {
            algebra: algebra.clone(),
            diag: ReducedDiagonal::new(algebra)?,
            dim: algebra.dim as u8,
        })
    }

    pub fn class_degrees(&self) -> Vec<u8> {
        self.algebra.class_degrees()
    }
}

fn koszul(a: i32, b: i32) -> i32 {
    if (a * b).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl GCElement {
    pub fn zero(dim: u8) -> Self {
        GCElement {
            dim,
            terms: GraphSum::new(),
        }
    }

    pub fn from_terms(dim: u8, terms: impl IntoIterator<Item = (Graph, Rational)>) -> Self {
        let mut s = GraphSum::new();
        for (g, c) in terms {
            assert_eq!(g.n_ext, 0, "GC graphs have no external vertices");
            s.add_raw(&g, &c);
        }
        GCElement { dim, terms: s }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    /// Value on a (possibly raw) connected graph.
    pub fn eval(&self, g: &Graph) -> Rational {
        z_value(&self.terms, g)
    }

    /// GC degree of a graph: minus its starred degree.
    pub fn graph_degree(g: &Graph) -> i32 {
        -g.degree()
    }

    /// Homogeneous components by GC degree.
    pub fn by_degree(&self) -> BTreeMap<i32, GCElement> {
        let mut out: BTreeMap<i32, GCElement> = BTreeMap::new();
        for (g, c) in self.terms.iter() {
            out.entry(Self::graph_degree(g))
                .or_insert_with(|| GCElement::zero(self.dim))
                .terms
                .add_canonical(g.clone(), c.clone());
        }
        out
    }

    pub fn add(&self, other: &GCElement) -> GCElement {
        let mut t = self.terms.clone();
        t.add_sum(&other.terms, &Rational::one());
        GCElement { dim: self.dim, terms: t }
    }

    pub fn scaled(&self, c: &Rational) -> GCElement {
        GCElement {
            dim: self.dim,
            terms: self.terms.scaled(c),
        }
    }

    pub fn max_vertices(&self) -> usize {
        self.terms.iter().map(|(g, _)| g.n_int as usize).max().unwrap_or(0)
    }
}

/// Starred differential of an internal-only graph, split into the terms
/// that stay connected and the terms cut into two components. Each
/// disconnected term is returned as `(first, second, coeff)` with the word
/// rearranged so that `first` comes first.
pub fn starred_differential(ctx: &GCContext, g: &Graph) -> (Vec<(Graph, Rational)>, Vec<(Graph, Graph, Rational)>) {
    let mut connected = Vec::new();
    let mut split = Vec::new();
    let mut raw = split_terms(g, &ctx.diag);
    raw.extend(contract_terms(g));
    for (h, c) in raw {
        let (ids, n) = h.components();
        if n <= 1 {
            connected.push((h, c));
            continue;
        }
        debug_assert_eq!(n, 2);
        let first: Vec<u8> = (0..h.n_vertices()).filter(|&v| ids[v] == 0).map(|v| v as u8).collect();
        let (p, rest, s) = extract_component(&h, &first);
        let c = if s < 0 { -c } else { c };
        split.push((p, rest, c));
    }
    (connected, split)
}

/// `Z(dγ)` for a connected internal-only graph, with `Z` the multiplicative
/// extension of `z`.
pub fn partition_residual(ctx: &GCContext, z: &GCElement, g: &Graph) -> Rational {
    let (conn, split) = starred_differential(ctx, g);
    let mut r = Rational::zero();
    for (h, c) in conn {
        r += c * z.eval(&h);
    }
    for (a, b, c) in split {
        let za = z.eval(&a);
        if za.is_zero() {
            continue;
        }
        r += c * za * z.eval(&b);
    }
    r
}

/// Evaluate `(x ⊗ y)` on the word `a b` with Koszul sign.
fn eval_pair(x: &GCElement, y: &GCElement, a: &Graph, b: &Graph) -> Rational {
    let xa = x.eval(a);
    if xa.is_zero() {
        return xa;
    }
    let yb = y.eval(b);
    if yb.is_zero() {
        return yb;
    }
    let s = koszul(b.degree(), a.degree());
    let v = xa * yb;
    if s < 0 {
        -v
    } else {
        v
    }
}

/// Reverse of vertex contraction: split vertex `v` into `v` and a new
/// vertex joined by an edge, distributing incident edge ends and
/// decorations in all ways.
fn vertex_splittings(g: &Graph) -> Vec<Graph> {
    let mut out = Vec::new();
    let nv = g.n_vertices() as u8;
    for v in 0..nv {
        let ends: Vec<(usize, bool)> = g
            .edges
            .iter()
            .enumerate()
            .flat_map(|(i, &(a, b))| {
                let mut e = Vec::new();
                if a == v {
                    e.push((i, true));
                }
                if b == v {
                    e.push((i, false));
                }
                e
            })
            .collect();
        let decs: Vec<usize> = (0..g.decs.len()).filter(|&i| g.decs[i].vertex == v).collect();
        let total = ends.len() + decs.len();
        for mask in 0u32..(1 << total) {
            let mut h = g.clone();
            h.n_int += 1;
            let w = nv;
            for (j, &(i, first)) in ends.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    if first {
                        h.edges[i].0 = w;
                    } else {
                        h.edges[i].1 = w;
                    }
                }
            }
            for (j, &i) in decs.iter().enumerate() {
                if mask & (1 << (ends.len() + j)) != 0 {
                    h.decs[i].vertex = w;
                }
            }
            h.edges.push((v, w));
            out.push(h);
        }
    }
    out
}

/// Reverse of edge splitting restricted to `g`'s own decorations and
/// vertices: join two decorations (or a decoration and a vertex, when the
/// diagonal has a unit leg) into an edge. `allow_same` permits joins within
/// one vertex (tadpoles).
fn decoration_joins(ctx: &GCContext, g: &Graph, sides: Option<(&[u8], &[u8])>) -> Vec<Graph> {
    let mut out = Vec::new();
    let nv = g.n_vertices() as u8;
    let cross = |p: u8, q: u8| match sides {
        None => true,
        Some((l, r)) => (l.contains(&p) && r.contains(&q)) || (r.contains(&p) && l.contains(&q)),
    };
    let pairs: BTreeSet<(u8, u8)> = ctx
        .diag
        .terms
        .iter()
        .filter_map(|(a, b, _)| match (a, b) {
            (Some(x), Some(y)) => Some((x.0, y.0)),
            _ => None,
        })
        .collect();
    let unit_paired: BTreeSet<u8> = ctx
        .diag
        .terms
        .iter()
        .filter_map(|(a, b, _)| match (a, b) {
            (Some(x), None) | (None, Some(x)) => Some(x.0),
            _ => None,
        })
        .collect();
    for i in 0..g.decs.len() {
        let di = g.decs[i];
        for j in 0..g.decs.len() {
            if i == j {
                continue;
            }
            let dj = g.decs[j];
            if di.vertex == dj.vertex || !pairs.contains(&(di.class, dj.class)) || !cross(di.vertex, dj.vertex) {
                continue;
            }
            let mut h = g.clone();
            h.decs = g
                .decs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, d)| *d)
                .collect();
            h.edges.push((di.vertex, dj.vertex));
            out.push(h);
        }
        if unit_paired.contains(&di.class) {
            for q in 0..nv {
                if q == di.vertex || !cross(di.vertex, q) {
                    continue;
                }
                let mut h = g.clone();
                h.decs.remove(i);
                h.edges.push((di.vertex, q));
                out.push(h);
            }
        }
    }
    out
}

fn canonical_set(gs: impl IntoIterator<Item = Graph>, tadpoles: bool) -> BTreeSet<Graph> {
    gs.into_iter()
        .filter(|g| tadpoles || !g.has_tadpole())
        .filter_map(|g| g.canonicalize().map(|(h, _)| h))
        .collect()
}

/// The differential of GC: `d(x)(γ) = x(d_conn γ)`.
pub fn d_gc_untwisted(ctx: &GCContext, x: &GCElement) -> GCElement {
    let mut candidates = BTreeSet::new();
    for (g, _) in x.terms.iter() {
        candidates.extend(canonical_set(vertex_splittings(g), false));
        candidates.extend(canonical_set(decoration_joins(ctx, g, None), false));
    }
    let mut out = GCElement::zero(x.dim);
    for gamma in candidates {
        let (conn, _) = starred_differential(ctx, &gamma);
        let mut v = Rational::zero();
        for (h, c) in conn {
            v += c * x.eval(&h);
        }
        out.terms.add_canonical(gamma, v);
    }
    out
}

/// Bracket of degree +1, dual to the disconnecting part of the starred
/// differential: `[x, y](γ) = Σ c·(x⊗y + (-1)^{|x||y|} y⊗x)(γ₁γ₂)`.
/// Graded symmetric, `[x, y] = (-1)^{|x||y|} [y, x]`.
pub fn bracket(ctx: &GCContext, x: &GCElement, y: &GCElement) -> Result<GCElement, Error> {
    if x.dim != y.dim || x.dim != ctx.dim {
        return Err(Error::AlgebraMismatch(format!("dimensions {} and {}", x.dim, y.dim)));
    }
    let mut out = GCElement::zero(x.dim);
    for (dx, xh) in x.by_degree() {
        for (dy, yh) in y.by_degree() {
            out = out.add(&bracket_homogeneous(ctx, &xh, &yh, koszul(dx, dy)));
        }
    }
    Ok(out)
}

fn bracket_homogeneous(ctx: &GCContext, x: &GCElement, y: &GCElement, swap: i32) -> GCElement {
    let mut candidates = BTreeSet::new();
    for (a, _) in x.terms.iter() {
        for (b, _) in y.terms.iter() {
            let u = disjoint_union(a, b);
            let left: Vec<u8> = (0..a.n_int).collect();
            let right: Vec<u8> = (a.n_int..a.n_int + b.n_int).collect();
            candidates.extend(canonical_set(decoration_joins(ctx, &u, Some((&left, &right))), false));
        }
    }
    let mut out = GCElement::zero(x.dim);
    for gamma in candidates {
        let (_, split) = starred_differential(ctx, &gamma);
        let mut v = Rational::zero();
        for (a, b, c) in split {
            let t = if swap < 0 {
                eval_pair(x, y, &a, &b) - eval_pair(y, x, &a, &b)
            } else {
                eval_pair(x, y, &a, &b) + eval_pair(y, x, &a, &b)
            };
            v += c * t;
        }
        out.terms.add_canonical(gamma, v);
    }
    out
}

/// `d x + [twist, x]` when a twist is supplied.
pub fn d_gc(ctx: &GCContext, x: &GCElement, twist: Option<&GCElement>) -> Result<GCElement, Error> {
    let mut out = d_gc_untwisted(ctx, x);
    if let Some(m) = twist {
        out = out.add(&bracket(ctx, m, x)?);
    }
    Ok(out)
}

pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let off = a.n_int;
    let mut g = a.clone();
    g.n_int += b.n_int;
    g.edges.extend(b.edges.iter().map(|&(p, q)| (p + off, q + off)));
    g.decs.extend(b.decs.iter().map(|d| Dec {
        vertex: d.vertex + off,
        ..*d
    }));
    g
}

/// The one-vertex part of the partition function: every single vertex
/// decorated by a monomial `X` of total degree `D` gets the value `ε(ΠX)`.
pub fn z0(alg: &PDAlgebra) -> GCElement {
    let dim = alg.dim as u8;
    let classes = alg.class_degrees();
    let c = Constraints {
        forbid_internal_only_components: false,
        connected: true,
        ..Constraints::default()
    };
    let mut out = GCElement::zero(dim);
    for g in enumerate_graphs(0, dim, &c, 1, 0, &classes) {
        if !g.edges.is_empty() {
            continue;
        }
        let factors: Vec<usize> = g.decs.iter().map(|d| alg.basis_of_class(d.class)).collect();
        let v = alg
            .product(&factors)
            .into_iter()
            .map(|(k, c)| c * alg.epsilon(k))
            .fold(Rational::zero(), |a, b| a + b);
        out.terms.add_canonical(g, v);
    }
    out
}

/// `½ Σ g^{ij}` vertex(e_i e_j) with unit legs dropped.
pub fn z0_from_diagonal(alg: &PDAlgebra) -> Result<GCElement, Error> {
    let diag = ReducedDiagonal::new(alg)?;
    let dim = alg.dim as u8;
    let half = Rational::new(1.into(), 2.into());
    let mut terms = Vec::new();
    for (a, b, c) in &diag.terms {
        let mut g = Graph::new(dim, 0, 1);
        for (class, degree) in [a, b].into_iter().flatten() {
            g.decs.push(Dec {
                vertex: 0,
                class: *class,
                degree: *degree,
            });
        }
        terms.push((g, c * &half));
    }
    Ok(GCElement::from_terms(dim, terms))
}

/// Bounds for Maurer–Cartan checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MCBox {
    pub max_vertices: u8,
    pub max_loop: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxVerdict {
    pub vertices: u8,
    pub loop_order: i32,
    pub graphs_checked: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MCReport {
    pub boxes: Vec<BoxVerdict>,
    pub residual: GraphSum,
}

impl MCReport {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// All connected internal-only graphs with `v` vertices, loop order
/// `≤ max_loop` and starred degree `degree`.
pub fn gc_basis(ctx: &GCContext, v: u8, max_loop: i32, degree: i32) -> Vec<Graph> {
    let c = Constraints {
        forbid_internal_only_components: false,
        connected: true,
        genus_cap: Some(max_loop),
        ..Constraints::default()
    };
    enumerate_graphs(0, ctx.dim, &c, v, degree, &ctx.class_degrees())
}

/// Evaluate `dz + ½[z, z]` on every connected graph of starred degree −1
/// inside the box. The value on `γ` is `Z(dγ)`.
pub fn check_mc(ctx: &GCContext, z: &GCElement, bx: MCBox) -> MCReport {
    let mut boxes = Vec::new();
    let mut residual = GraphSum::new();
    for v in 1..=bx.max_vertices {
        let graphs = gc_basis(ctx, v, bx.max_loop, -1);
        let mut per_loop: BTreeMap<i32, (usize, bool)> = (0..=bx.max_loop).map(|l| (l, (0, true))).collect();
        for g in graphs {
            let r = partition_residual(ctx, z, &g);
            let e = per_loop.get_mut(&g.loop_order()).expect("loop order within cap");
            e.0 += 1;
            if !r.is_zero() {
                e.1 = false;
                residual.add_canonical(g, r);
            }
        }
        for (l, (n, ok)) in per_loop {
            boxes.push(BoxVerdict {
                vertices: v,
                loop_order: l,
                graphs_checked: n,
                holds: ok,
            });
        }
    }
    MCReport { boxes, residual }
}

/// Partition by loop order.
pub fn loop_decompose(z: &GCElement) -> Vec<GCElement> {
    let mut out: Vec<GCElement> = Vec::new();
    for (g, c) in z.terms.iter() {
        let l = g.loop_order() as usize;
        while out.len() <= l {
            out.push(GCElement::zero(z.dim));
        }
        out[l].terms.add_canonical(g.clone(), c.clone());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValenceMode {
    /// Every vertex at least trivalent.
    Ge3,
    /// No univalent vertex and at least one vertex of valence ≥ 3.
    DoublePrime,
}

/// Keep the terms satisfying the valence predicate; return the rejected
/// graphs alongside.
pub fn filter_valence(z: &GCElement, mode: ValenceMode) -> (GCElement, Vec<Graph>) {
    let mut kept = GCElement::zero(z.dim);
    let mut rejected = Vec::new();
    for (g, c) in z.terms.iter() {
        let vals: Vec<usize> = (0..g.n_int).map(|v| g.valence(v)).collect();
        let ok = match mode {
            ValenceMode::Ge3 => vals.iter().all(|&x| x >= 3),
            ValenceMode::DoublePrime => vals.iter().all(|&x| x != 1) && vals.iter().any(|&x| x >= 3),
        };
        if ok {
            kept.terms.add_canonical(g.clone(), c.clone());
        } else {
            rejected.push(g.clone());
        }
    }
    (kept, rejected)
}

fn class_multiset(g: &Graph) -> Vec<u8> {
    let mut m: Vec<u8> = g.decs.iter().map(|d| d.class).collect();
    m.sort_unstable();
    m
}

/// Right-combed: the internal vertices form a path and the two largest
/// leaves under the class order sit at opposite ends of it.
fn is_combed(g: &Graph) -> bool {
    let n = g.n_int;
    if n <= 1 {
        return true;
    }
    if (0..n).any(|v| g.edge_valence(v) > 2) {
        return false;
    }
    let ends: Vec<u8> = (0..n).filter(|&v| g.edge_valence(v) == 1).collect();
    let m = class_multiset(g);
    let (top, second) = (m[m.len() - 1], m[m.len() - 2]);
    let at = |v: u8| -> Vec<u8> { g.decs.iter().filter(|d| d.vertex == v).map(|d| d.class).collect() };
    let (e0, e1) = (at(ends[0]), at(ends[1]));
    (e0.contains(&top) && e1.contains(&second)) || (e1.contains(&top) && e0.contains(&second))
}

/// Sparse row echelon form over the rationals with the pivot at the
/// smallest column of each row.
#[derive(Default)]
struct Echelon {
    pivots: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

impl Echelon {
    fn reduce(&self, mut v: BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut from = 0;
        loop {
            let Some(c) = v.range(from..).map(|(&c, _)| c).find(|c| self.pivots.contains_key(c)) else {
                break;
            };
            let coeff = v.remove(&c).expect("present");
            for (&j, x) in self.pivots[&c].iter().skip(1) {
                let e = v.entry(j).or_insert_with(Rational::zero);
                *e -= &coeff * x;
                if e.is_zero() {
                    v.remove(&j);
                }
            }
            from = c + 1;
        }
        v
    }

    fn insert(&mut self, v: BTreeMap<usize, Rational>) {
        let v = self.reduce(v);
        if let Some((&c, lead)) = v.iter().next() {
            let inv = Rational::one() / lead;
            let row: BTreeMap<usize, Rational> = v.iter().map(|(&j, x)| (j, x * &inv)).collect();
            // keep every stored row free of the new pivot
            for r in self.pivots.values_mut() {
                if let Some(x) = r.remove(&c) {
                    for (&j, y) in row.iter().skip(1) {
                        let e = r.entry(j).or_insert_with(Rational::zero);
                        *e -= &x * y;
                        if e.is_zero() {
                            r.remove(&j);
                        }
                    }
                }
            }
            self.pivots.insert(c, row);
        }
    }
}

/// Rewrite a tree series modulo the ≥4-valent ideal and the IHX relations.
/// The relations are the trivalent parts of `d` applied to trees with one
/// 4-valent vertex; the result lies in the span of combed trees.
pub fn ihx_normal_form(ctx: &GCContext, z: &GCElement) -> Result<GCElement, Error> {
    let mut groups: BTreeMap<(Vec<u8>, i32), GraphSum> = BTreeMap::new();
    for (g, c) in z.terms.iter() {
        if g.n_ext != 0 || g.loop_order() != 0 {
            return Err(Error::NotATree(format!("{g}")));
        }
        let vals: Vec<usize> = (0..g.n_int).map(|v| g.valence(v)).collect();
        if vals.iter().any(|&x| x < 3) {
            return Err(Error::NotATree(format!("{g} has a vertex of valence < 3")));
        }
        if vals.iter().all(|&x| x == 3) {
            groups
                .entry((class_multiset(g), g.degree()))
                .or_default()
                .add_canonical(g.clone(), c.clone());
        }
    }
    let mut out = GCElement::zero(z.dim);
    for ((classes, degree), sum) in groups {
        let trivalent = |g: &Graph| (0..g.n_int).all(|v| g.valence(v) == 3);
        let c = Constraints {
            forbid_internal_only_components: false,
            connected: true,
            genus_cap: Some(0),
            ..Constraints::default()
        };
        let n = classes.len() as u8;
        let same = |g: &Graph| class_multiset(g) == classes;
        let mut trees: Vec<Graph> = enumerate_graphs(0, ctx.dim, &c, n - 2, degree, &ctx.class_degrees())
            .into_iter()
            .filter(|g| same(g) && trivalent(g))
            .collect();
        trees.sort_by_key(|g| is_combed(g));
        let index: BTreeMap<&Graph, usize> = trees.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut ech = Echelon::default();
        if n >= 4 {
            for f in enumerate_graphs(0, ctx.dim, &c, n - 3, degree + 1, &ctx.class_degrees()) {
                let mut vals: Vec<usize> = (0..f.n_int).map(|v| f.valence(v)).collect();
                vals.sort_unstable();
                if !same(&f) || vals.last() != Some(&4) || vals.iter().rev().skip(1).any(|&x| x != 3) {
                    continue;
                }
                let r = d_gc_untwisted(ctx, &GCElement::from_terms(ctx.dim, [(f, Rational::one())]));
                let row: BTreeMap<usize, Rational> = r
                    .terms
                    .iter()
                    .filter_map(|(g, x)| index.get(g).map(|&i| (i, x.clone())))
                    .collect();
                ech.insert(row);
            }
        }
        let v: BTreeMap<usize, Rational> = sum
            .iter()
            .map(|(g, x)| {
                let i = *index.get(g).ok_or_else(|| Error::NotATree(format!("{g} outside the tree basis")))?;
                Ok((i, x.clone()))
            })
            .collect::<Result<_, Error>>()?;
        for (i, x) in ech.reduce(v) {
            out.terms.add_canonical(trees[i].clone(), x);
        }
    }
    Ok(out)
}
