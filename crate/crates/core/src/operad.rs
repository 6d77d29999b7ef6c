//! Generators-level structure: the edge-splitting differential on graphs
//! without internal vertices, cooperadic cocomposition and the comodule
//! coaction, all by de-insertion of subgraphs.
//!
//! A de-insertion term is stored as a tuple of factors in word order: the
//! block graphs first, then the outer graph. The sign is the Koszul sign of
//! rearranging the letters of the original word into that order.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::PDAlgebra;
use crate::complex::{d_graphs, Flavor, FlavorKind};
use crate::diff::{collect, split_terms, ReducedDiagonal};
use crate::error::Error;
use crate::graph::{Constraints, Dec, Graph, GraphSum};
use crate::Rational;

/// External labels grouped into blocks; block `j` becomes external vertex
/// `j` of the outer graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CocompositionShape {
    pub blocks: Vec<Vec<u8>>,
}

impl CocompositionShape {
    pub fn new(n: u8, blocks: Vec<Vec<u8>>) -> Result<Self, Error> {
        let mut seen = vec![false; n as usize];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::ShapeMismatch("empty block".into()));
            }
            for &v in b {
                if v >= n || seen[v as usize] {
                    return Err(Error::ShapeMismatch(format!("label {} repeated or out of range", v + 1)));
                }
                seen[v as usize] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::ShapeMismatch("blocks do not cover all labels".into()));
        }
        Ok(CocompositionShape { blocks })
    }

    pub fn singletons(n: u8) -> Self {
        CocompositionShape {
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn arity(&self) -> u8 {
        self.blocks.iter().map(|b| b.len() as u8).sum()
    }

    fn block_of(&self, v: u8) -> (usize, u8) {
        for (j, b) in self.blocks.iter().enumerate() {
            if let Some(p) = b.iter().position(|&x| x == v) {
                return (j, p as u8);
            }
        }
        unreachable!("validated shape covers every label")
    }
}

/// Linear combination of tuples of canonical graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorSum {
    pub terms: BTreeMap<Vec<Graph>, Rational>,
}

impl TensorSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `c · (f_0 ⊗ f_1 ⊗ ...)`, canonicalizing each factor.
    pub fn add_raw(&mut self, factors: &[Graph], c: &Rational) {
        let mut key = Vec::with_capacity(factors.len());
        let mut sign = 1;
        for f in factors {
            match f.canonicalize() {
                None => return,
                Some((h, s)) => {
                    key.push(h);
                    sign *= s;
                }
            }
        }
        self.add_canonical(key, if sign < 0 { -c.clone() } else { c.clone() });
    }

    pub fn add_canonical(&mut self, key: Vec<Graph>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_sum(&mut self, other: &TensorSum, factor: &Rational) {
        for (k, c) in &other.terms {
            self.add_canonical(k.clone(), c * factor);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Apply a degree +1 derivation factorwise with Koszul signs;
    /// `d(i, g)` is the differential on factor position `i`.
    pub fn differential(&self, mut d: impl FnMut(usize, &Graph) -> Result<GraphSum, Error>) -> Result<TensorSum, Error> {
        let mut out = TensorSum::new();
        for (key, c) in &self.terms {
            let mut before = 0;
            for i in 0..key.len() {
                let di = d(i, &key[i])?;
                let sc = if before % 2 == 0 { c.clone() } else { -c.clone() };
                for (h, e) in di.iter() {
                    let mut k2 = key.clone();
                    k2[i] = h.clone();
                    out.add_canonical(k2, &sc * e);
                }
                before += key[i].degree();
            }
        }
        Ok(out)
    }
}

/// Letter classes of the graph word, used for the rearrangement sign.
fn koszul_rearrangement(dest: &[(usize, bool)]) -> i32 {
    let mut inv = 0usize;
    for i in 0..dest.len() {
        if !dest[i].1 {
            continue;
        }
        for j in i + 1..dest.len() {
            if dest[j].1 && dest[j].0 < dest[i].0 {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All de-insertion terms of `g` along `shape`. Internal vertices are
/// distributed over the blocks and the outer graph; edges inside a block's
/// vertex set either stay in the block or become a tadpole of the outer
/// graph. Decorated internal vertices must stay outside the blocks.
fn deinsert(g: &Graph, shape: &CocompositionShape) -> Vec<(Vec<Graph>, Rational)> {
    let k = shape.blocks.len();
    let nint = g.n_int as usize;
    let d = g.dim as i32;
    let mut out = Vec::new();
    let decorated: Vec<bool> = (0..nint)
        .map(|i| g.decs.iter().any(|x| x.vertex == g.n_ext + i as u8))
        .collect();
    let mut assign = vec![0usize; nint];
    loop {
        if (0..nint).all(|i| !decorated[i] || assign[i] == k) {
            deinsert_with(g, shape, &assign, d, &mut out);
        }
        // next assignment in base k+1
        let mut i = 0;
        loop {
            if i == nint {
                return out;
            }
            assign[i] += 1;
            if assign[i] <= k {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

fn deinsert_with(g: &Graph, shape: &CocompositionShape, assign: &[usize], d: i32, out: &mut Vec<(Vec<Graph>, Rational)>) {
    let k = shape.blocks.len();
    let n = g.n_ext;
    let dest = |v: u8| -> usize {
        if v < n {
            shape.block_of(v).0
        } else {
            assign[(v - n) as usize]
        }
    };
    // labels inside each factor
    let mut label = vec![0u8; g.n_vertices()];
    let mut int_count = vec![0u8; k + 1];
    for v in 0..n {
        label[v as usize] = shape.block_of(v).1;
    }
    for v in n..n + g.n_int {
        let j = dest(v);
        let base = if j == k { k as u8 } else { shape.blocks[j].len() as u8 };
        label[v as usize] = base + int_count[j];
        int_count[j] += 1;
    }
    let inner: Vec<usize> = (0..g.edges.len())
        .filter(|&e| {
            let (a, b) = g.edges[e];
            dest(a) == dest(b) && dest(a) < k
        })
        .collect();
    for mask in 0u64..(1u64 << inner.len()) {
        let mut factors: Vec<Graph> = (0..=k)
            .map(|j| {
                if j == k {
                    Graph::new(g.dim, k as u8, int_count[k])
                } else {
                    Graph::new(g.dim, shape.blocks[j].len() as u8, int_count[j])
                }
            })
            .collect();
        let mut letters: Vec<(usize, bool)> = Vec::new();
        for v in n..n + g.n_int {
            letters.push((dest(v), d % 2 == 1));
        }
        for (e, &(a, b)) in g.edges.iter().enumerate() {
            let to_block = match inner.iter().position(|&x| x == e) {
                Some(p) => mask & (1 << p) == 0,
                None => false,
            };
            if to_block {
                let j = dest(a);
                factors[j].edges.push((label[a as usize], label[b as usize]));
                letters.push((j, d % 2 == 0));
            } else {
                let map = |v: u8| {
                    let j = dest(v);
                    if j == k {
                        label[v as usize]
                    } else {
                        j as u8
                    }
                };
                factors[k].edges.push((map(a), map(b)));
                letters.push((k, d % 2 == 0));
            }
        }
        for x in &g.decs {
            let j = dest(x.vertex);
            let v = if j == k { label[x.vertex as usize] } else { j as u8 };
            factors[k].decs.push(Dec { vertex: v, ..*x });
            letters.push((k, x.degree % 2 == 1));
        }
        let s = koszul_rearrangement(&letters);
        out.push((factors, Rational::from_integer(s.into())));
    }
}

/// Edge splitting on graphs without internal vertices, tadpoles included.
pub fn d_gra(g: &Graph, alg: &PDAlgebra) -> Result<GraphSum, Error> {
    if g.n_int != 0 {
        return Err(Error::FlavorViolation("d_gra acts on graphs without internal vertices".into()));
    }
    if g.dim as i32 != alg.dim {
        return Err(Error::AlgebraMismatch(format!("graph of dimension {} over a {}-dimensional algebra", g.dim, alg.dim)));
    }
    Ok(collect(split_terms(g, &ReducedDiagonal::new(alg)?)))
}

fn check_arity(g: &Graph, shape: &CocompositionShape) -> Result<(), Error> {
    if shape.arity() != g.n_ext {
        return Err(Error::ShapeMismatch(format!("shape of arity {} for {} external vertices", shape.arity(), g.n_ext)));
    }
    Ok(())
}

/// Cocomposition of an undecorated graph without internal vertices.
pub fn cocompose(g: &Graph, shape: &CocompositionShape) -> Result<TensorSum, Error> {
    check_arity(g, shape)?;
    if g.n_int != 0 || !g.decs.is_empty() {
        return Err(Error::FlavorViolation("cocompose acts on undecorated graphs without internal vertices".into()));
    }
    let mut out = TensorSum::new();
    for (f, c) in deinsert(g, shape) {
        out.add_raw(&f, &c);
    }
    Ok(out)
}

/// Coaction on decorated graphs without internal vertices; decorations stay
/// on the outer factor.
pub fn coact(g: &Graph, shape: &CocompositionShape) -> Result<TensorSum, Error> {
    check_arity(g, shape)?;
    if g.n_int != 0 {
        return Err(Error::FlavorViolation("coact acts on graphs without internal vertices".into()));
    }
    let mut out = TensorSum::new();
    for (f, c) in deinsert(g, shape) {
        out.add_raw(&f, &c);
    }
    Ok(out)
}

/// Constraints of the little-disks factors.
fn disk_constraints() -> Constraints {
    Flavor::graphs_d(2).constraints()
}

/// Coaction on a graph of a twisted flavor: internal vertices distribute
/// over the factors, and factors outside their complexes are dropped.
pub fn coact_graphs(g: &Graph, flavor: &Flavor, shape: &CocompositionShape) -> Result<TensorSum, Error> {
    check_arity(g, shape)?;
    match flavor.kind {
        FlavorKind::GraphsM | FlavorKind::Reduced | FlavorKind::Forest | FlavorKind::GraphsD => {}
        other => {
            return Err(Error::FlavorViolation(format!("{} carries no coaction", other.name())));
        }
    }
    if !flavor.admits(g) {
        return Err(Error::FlavorViolation(format!("{g} is not a {} graph", flavor.kind.name())));
    }
    let outer = flavor.constraints();
    let disks = disk_constraints();
    let mut out = TensorSum::new();
    for (f, c) in deinsert(g, shape) {
        let k = f.len() - 1;
        if !outer.admits(&f[k]) || f[..k].iter().any(|b| !disks.admits(b)) {
            continue;
        }
        out.add_raw(&f, &c);
    }
    Ok(out)
}

/// `coact(d g) - (d ⊗ id + id ⊗ d)(coact g)`, where the outer factor uses
/// the flavor's differential and the block factors contraction.
pub fn comodule_defect(g: &Graph, flavor: &Flavor, shape: &CocompositionShape) -> Result<TensorSum, Error> {
    let mut lhs = TensorSum::new();
    for (h, c) in d_graphs(g, flavor)?.iter() {
        lhs.add_sum(&coact_graphs(h, flavor, shape)?, c);
    }
    let disks = Flavor::graphs_d(flavor.dim);
    let co = coact_graphs(g, flavor, shape)?;
    let k = shape.blocks.len();
    let rhs = co.differential(|i, h| if i == k { d_graphs(h, flavor) } else { d_graphs(h, &disks) })?;
    lhs.add_sum(&rhs, &-Rational::one());
    Ok(lhs)
}

/// Same check on the generators level: `d_gra` against the coaction, the
/// block factors carrying no differential.
pub fn gra_comodule_defect(g: &Graph, alg: &PDAlgebra, shape: &CocompositionShape) -> Result<TensorSum, Error> {
    let mut lhs = TensorSum::new();
    for (h, c) in d_gra(g, alg)?.iter() {
        lhs.add_sum(&coact(h, shape)?, c);
    }
    let k = shape.blocks.len();
    let co = coact(g, shape)?;
    let rhs = co.differential(|i, h| if i == k { d_gra(h, alg) } else { Ok(GraphSum::new()) })?;
    lhs.add_sum(&rhs, &-Rational::one());
    Ok(lhs)
}

/// Koszul sign of reordering graded factors by `perm` (`perm[i]` is the
/// old position of the new factor `i`).
fn reorder_sign(degrees: &[i32], perm: &[usize]) -> i32 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[j] < perm[i] && degrees[perm[i]] % 2 != 0 && degrees[perm[j]] % 2 != 0 {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Difference of the two ways to cocompose along nested shapes: first
/// `fine`, then the outer factor along `coarse` (a partition of the fine
/// block indices); or first the merged coarse shape, then each coarse
/// block along its fine blocks. Terms are in the order
/// `fine blocks, coarse blocks, outer`.
pub fn coassociativity_defect(g: &Graph, fine: &CocompositionShape, coarse: &[Vec<usize>]) -> Result<TensorSum, Error> {
    let p = fine.blocks.len();
    let q_shape = CocompositionShape::new(p as u8, coarse.iter().map(|b| b.iter().map(|&i| i as u8).collect()).collect())?;
    let mut route1 = TensorSum::new();
    for (f, c) in &cocompose(g, fine)?.terms {
        for (f2, c2) in &cocompose(&f[p], &q_shape)?.terms {
            let mut key = f[..p].to_vec();
            key.extend(f2.iter().cloned());
            route1.add_canonical(key, c * c2);
        }
    }
    let merged = CocompositionShape::new(
        g.n_ext,
        coarse
            .iter()
            .map(|b| b.iter().flat_map(|&i| fine.blocks[i].iter().copied()).collect())
            .collect(),
    )?;
    let q = coarse.len();
    let mut route2 = TensorSum::new();
    for (f, c) in &cocompose(g, &merged)?.terms {
        // expand each coarse block along its fine blocks
        let mut partial: Vec<(Vec<Graph>, Vec<usize>, Rational)> = vec![(Vec::new(), Vec::new(), c.clone())];
        for (j, b) in coarse.iter().enumerate() {
            let mut offset = 0u8;
            let sub: Vec<Vec<u8>> = b
                .iter()
                .map(|&i| {
                    let len = fine.blocks[i].len() as u8;
                    let r = (offset..offset + len).collect();
                    offset += len;
                    r
                })
                .collect();
            let sub = CocompositionShape::new(offset, sub)?;
            let expanded = cocompose(&f[j], &sub)?;
            let mut next = Vec::new();
            for (fs, ids, cc) in &partial {
                for (f3, c3) in &expanded.terms {
                    let mut fs2 = fs.clone();
                    fs2.extend(f3.iter().cloned());
                    let mut ids2 = ids.clone();
                    ids2.extend(b.iter().copied());
                    ids2.push(p + j);
                    next.push((fs2, ids2, cc * c3));
                }
            }
            partial = next;
        }
        for (mut fs, mut ids, cc) in partial {
            fs.push(f[q].clone());
            ids.push(p + q);
            // reorder into fine blocks, coarse blocks, outer
            let mut perm = vec![0usize; ids.len()];
            for (pos, &id) in ids.iter().enumerate() {
                perm[id] = pos;
            }
            let degrees: Vec<i32> = fs.iter().map(|h| h.degree()).collect();
            let s = reorder_sign(&degrees, &perm);
            let key: Vec<Graph> = perm.iter().map(|&i| fs[i].clone()).collect();
            route2.add_canonical(key, if s < 0 { -cc } else { cc });
        }
    }
    route1.add_sum(&route2, &-Rational::one());
    Ok(route1)
}

/// All set partitions of `0..n`, blocks ordered by their minima.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for x in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(x);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![x]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// Outcome of an exhaustive structural check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn shape_of(n: u8, p: &[Vec<usize>]) -> Result<CocompositionShape, Error> {
    CocompositionShape::new(n, p.iter().map(|b| b.iter().map(|&v| v as u8).collect()).collect())
}

/// Coassociativity over every nested pair of shapes, for all undecorated
/// graphs without internal vertices on `n` points with at most `max_edges`
/// edges.
pub fn coassociativity_suite(dim: u8, n: u8, max_edges: usize) -> Result<SuiteReport, Error> {
    let c = Flavor::graphs_d(dim).constraints();
    let mut report = SuiteReport::default();
    let partitions = set_partitions(n as usize);
    for e in 0..=max_edges {
        let degree = e as i32 * (dim as i32 - 1);
        let graphs: Vec<Graph> = crate::graph::enumerate_graphs(n, dim, &c, 0, degree, &[])
            .into_iter()
            .filter(|g| g.edges.len() == e)
            .collect();
        for g in &graphs {
            for fine in &partitions {
                let fine_shape = shape_of(n, fine)?;
                for coarse in set_partitions(fine.len()) {
                    report.checked += 1;
                    let defect = coassociativity_defect(g, &fine_shape, &coarse)?;
                    if !defect.is_zero() {
                        report.failures.push(format!("{g} fine {fine:?} coarse {coarse:?}"));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// [`gra_comodule_defect`] over every shape, for all graphs without internal
/// vertices on `n` points (tadpoles included) with at most `max_edges`
/// edges and at most `max_decs` decorations.
pub fn gra_comodule_suite(alg: &PDAlgebra, n: u8, max_edges: usize, max_decs: usize) -> Result<SuiteReport, Error> {
    let dim = alg.dim as u8;
    let c = Constraints {
        allow_ext_tadpoles: true,
        ..Constraints::default()
    };
    let classes = alg.class_degrees();
    let top = max_edges as i32 * (dim as i32 - 1) + max_decs as i32 * dim as i32;
    let partitions = set_partitions(n as usize);
    let mut report = SuiteReport::default();
    for degree in 0..=top {
        for g in crate::graph::enumerate_graphs(n, dim, &c, 0, degree, &classes) {
            if g.edges.len() > max_edges || g.decs.len() > max_decs {
                continue;
            }
            for part in &partitions {
                report.checked += 1;
                if !gra_comodule_defect(&g, alg, &shape_of(n, part)?)?.is_zero() {
                    report.failures.push(format!("{g} shape {part:?}"));
                }
            }
        }
    }
    Ok(report)
}

/// The comodule square `coact ∘ d = (d ⊗ 1 + 1 ⊗ d) ∘ coact` for every basis
/// graph of the flavor on `n` points in the degree window with at most
/// `k_max` internal vertices, over every shape.
pub fn comodule_suite(flavor: &Flavor, n: u8, lo: i32, hi: i32, k_max: u8) -> Result<SuiteReport, Error> {
    let mut report = SuiteReport::default();
    let partitions = set_partitions(n as usize);
    for p in lo..=hi {
        for g in crate::complex::enumerate_basis(flavor, n, p, k_max) {
            for part in &partitions {
                report.checked += 1;
                let defect = comodule_defect(&g, flavor, &shape_of(n, part)?)?;
                if !defect.is_zero() {
                    report.failures.push(format!("{g} shape {part:?}"));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(dim: u8) -> Graph {
        Graph {
            dim,
            n_ext: 2,
            n_int: 0,
            edges: vec![(0, 1)],
            decs: vec![],
        }
    }

    #[test]
    fn merging_both_ends_of_an_edge() {
        let shape = CocompositionShape::new(2, vec![vec![0, 1]]).unwrap();
        let t = cocompose(&edge(2), &shape).unwrap();
        assert_eq!(t.len(), 2);
        let tad = Graph {
            dim: 2,
            n_ext: 1,
            n_int: 0,
            edges: vec![(0, 0)],
            decs: vec![],
        };
        let bare2 = Graph::new(2, 2, 0);
        assert_eq!(t.terms[&vec![edge(2), Graph::new(2, 1, 0)]], Rational::one());
        assert_eq!(t.terms[&vec![bare2, tad]], Rational::one());
        // odd D: the tadpole vanishes
        assert_eq!(cocompose(&edge(3), &shape).unwrap().len(), 1);
    }

    #[test]
    fn counit() {
        let t = cocompose(&edge(2), &CocompositionShape::singletons(2)).unwrap();
        let one = Graph::new(2, 1, 0);
        assert_eq!(t.terms.len(), 1);
        assert_eq!(t.terms[&vec![one.clone(), one, edge(2)]], Rational::one());
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn shape_validation() {
        assert!(CocompositionShape::new(3, vec![vec![0, 1]]).is_err());
        assert!(CocompositionShape::new(2, vec![vec![0, 0], vec![1]]).is_err());
        assert!(CocompositionShape::new(2, vec![vec![], vec![0, 1]]).is_err());
    }
}
