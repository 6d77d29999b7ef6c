//! The finite model `F(A, n)`: `A^{⊗n}[ω_ij]` modulo symmetry, `ω² = 0`,
//! the Arnold relation and `(p_i^*a - p_j^*a) ω_ij = 0`, with `∇ω_ij = Δ_ij`.
//!
//! Normal form: the ω-monomial is a forest in which every vertex has at most
//! one edge to a smaller vertex (so each cluster is a tree rooted at its
//! minimal index), and each cluster carries one basis element of `A` at its
//! root. Words are written decorations first (by vertex), then `ω_ij`
//! (`i < j`) ordered by `j`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use confgraph_linalg::{betti_of_complex, BettiTable, Boundary, CochainComplex, SparseMatrix};

use crate::algebra::PDAlgebra;
use crate::complex::{d_graphs, enumerate_basis, Flavor};
use crate::error::Error;
use crate::graph::Graph;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// `p_v^*(e_a)` for a full basis index `a`.
    Dec { v: u8, a: usize },
    Omega(u8, u8),
}

/// A normal-form monomial: one basis element of `A` per vertex (the unit
/// away from cluster roots) and the forest edges `(i, j)`, `i < j`, sorted
/// by `j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LSMonomial {
    pub decs: Vec<usize>,
    pub edges: Vec<(u8, u8)>,
}

pub type LSElement = BTreeMap<LSMonomial, Rational>;

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

fn add_to(acc: &mut LSElement, m: LSMonomial, c: Rational) {
    match acc.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// The model `F(A, n)` on a degree window.
#[derive(Clone, Debug)]
pub struct LSComplex {
    pub algebra: PDAlgebra,
    pub n: u8,
    /// Bases of degrees `lo-1 ..= hi+1`.
    pub bases: Vec<Vec<LSMonomial>>,
    pub complex: CochainComplex,
    pub lo: i32,
    pub hi: i32,
}

pub struct LSModel<'a> {
    alg: &'a PDAlgebra,
    n: u8,
    d: i32,
}

impl<'a> LSModel<'a> {
    pub fn new(alg: &'a PDAlgebra, n: u8) -> Self {
        LSModel { alg, n, d: alg.dim }
    }

    fn letter_degree(&self, l: &Letter) -> i32 {
        match l {
            Letter::Dec { a, .. } => self.alg.degree(*a),
            Letter::Omega(..) => self.d - 1,
        }
    }

    fn odd(&self, l: &Letter) -> bool {
        self.letter_degree(l).rem_euclid(2) == 1
    }

    pub fn degree(&self, m: &LSMonomial) -> i32 {
        m.decs.iter().map(|&a| self.alg.degree(a)).sum::<i32>() + (self.d - 1) * m.edges.len() as i32
    }

    pub fn word(&self, m: &LSMonomial) -> Vec<Letter> {
        let mut w: Vec<Letter> = m
            .decs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != self.alg.unit)
            .map(|(v, &a)| Letter::Dec { v: v as u8, a })
            .collect();
        w.extend(m.edges.iter().map(|&(i, j)| Letter::Omega(i, j)));
        w
    }

    /// Stable sort by `key` with the Koszul sign of the permutation.
    fn sort_word<K: Ord>(&self, w: &mut Vec<Letter>, key: impl Fn(&Letter) -> K) -> bool {
        let mut odd_swaps = false;
        // insertion sort keeps it stable and lets us count odd transpositions
        for i in 1..w.len() {
            let mut j = i;
            while j > 0 && key(&w[j - 1]) > key(&w[j]) {
                if self.odd(&w[j - 1]) && self.odd(&w[j]) {
                    odd_swaps = !odd_swaps;
                }
                w.swap(j - 1, j);
                j -= 1;
            }
        }
        odd_swaps
    }

    /// Reduce a raw word to normal form.
    pub fn normalize(&self, word: &[Letter], coeff: &Rational) -> LSElement {
        let mut out = LSElement::new();
        let mut work = vec![(word.to_vec(), coeff.clone())];
        while let Some((mut w, mut c)) = work.pop() {
            if c.is_zero() {
                continue;
            }
            for l in w.iter_mut() {
                if let Letter::Omega(i, j) = *l {
                    if i == j {
                        c = Rational::zero();
                    } else if i > j {
                        *l = Letter::Omega(j, i);
                        if self.d % 2 != 0 {
                            c = -c;
                        }
                    }
                }
            }
            if c.is_zero() {
                continue;
            }
            let key = |l: &Letter| match *l {
                Letter::Dec { v, .. } => (0u8, v, 0u8),
                Letter::Omega(i, j) => (1, j, i),
            };
            if self.sort_word(&mut w, key) {
                c = -c;
            }
            let first = w.iter().position(|l| matches!(l, Letter::Omega(..))).unwrap_or(w.len());
            let mut rewrite = None;
            let mut zero = false;
            for p in first..w.len().saturating_sub(1) {
                let (Letter::Omega(i, j), Letter::Omega(k, l)) = (w[p], w[p + 1]) else {
                    unreachable!()
                };
                if j == l {
                    if i == k {
                        zero = true;
                    } else {
                        rewrite = Some((p, i, k, j));
                    }
                    break;
                }
            }
            if zero {
                continue;
            }
            if let Some((p, i, k, j)) = rewrite {
                // ω_ij ω_kj = -ω_ik ω_ij - ω_kj ω_ki  (i < k < j)
                for (x, y) in [((i, k), (i, j)), ((k, j), (k, i))] {
                    let mut v = w.clone();
                    v[p] = Letter::Omega(x.0, x.1);
                    v[p + 1] = Letter::Omega(y.0, y.1);
                    work.push((v, -c.clone()));
                }
                continue;
            }
            self.finish(w, first, c, &mut out);
        }
        out
    }

    /// Slide decorations to cluster roots and multiply them out in `A`.
    fn finish(&self, mut w: Vec<Letter>, first: usize, mut c: Rational, out: &mut LSElement) {
        let n = self.n as usize;
        let mut parent: Vec<Option<u8>> = vec![None; n];
        let mut edges = Vec::new();
        for l in &w[first..] {
            if let Letter::Omega(i, j) = *l {
                parent[j as usize] = Some(i);
                edges.push((i, j));
            }
        }
        let root = |mut v: u8| {
            while let Some(p) = parent[v as usize] {
                v = p;
            }
            v
        };
        let mut decs: Vec<Letter> = w.drain(..first).collect();
        for l in decs.iter_mut() {
            if let Letter::Dec { v, a } = *l {
                *l = Letter::Dec { v: root(v), a };
            }
        }
        if self.sort_word(&mut decs, |l| match *l {
            Letter::Dec { v, .. } => v,
            Letter::Omega(..) => u8::MAX,
        }) {
            c = -c;
        }
        let mut per_vertex: Vec<Vec<usize>> = vec![Vec::new(); n];
        for l in &decs {
            if let Letter::Dec { v, a } = *l {
                per_vertex[v as usize].push(a);
            }
        }
        let mut terms: Vec<(Vec<usize>, Rational)> = vec![(Vec::new(), c)];
        for factors in &per_vertex {
            let prod = self.alg.product(factors);
            let mut next = Vec::new();
            for (prefix, coeff) in &terms {
                for (b, x) in &prod {
                    let mut p = prefix.clone();
                    p.push(*b);
                    next.push((p, coeff * x));
                }
            }
            terms = next;
        }
        for (decs, coeff) in terms {
            add_to(out, LSMonomial { decs, edges: edges.clone() }, coeff);
        }
    }

    /// `∇` on a raw word, as a derivation; `d_A = 0`.
    pub fn d_word(&self, w: &[Letter]) -> Vec<(Vec<Letter>, Rational)> {
        let diag = self.alg.diagonal().expect("builtin algebras are nondegenerate");
        let mut out = Vec::new();
        let mut prefix = 0;
        for (p, l) in w.iter().enumerate() {
            if let Letter::Omega(i, j) = *l {
                for (a, b, g) in &diag.terms {
                    let mut v = w[..p].to_vec();
                    v.push(Letter::Dec { v: i, a: *a });
                    v.push(Letter::Dec { v: j, a: *b });
                    v.extend_from_slice(&w[p + 1..]);
                    out.push((v, g * sign(prefix % 2 == 1)));
                }
            }
            prefix += self.letter_degree(l);
        }
        out
    }

    pub fn d(&self, m: &LSMonomial) -> LSElement {
        let mut out = LSElement::new();
        for (w, c) in self.d_word(&self.word(m)) {
            for (k, v) in self.normalize(&w, &c) {
                add_to(&mut out, k, v);
            }
        }
        out
    }

    /// All normal-form monomials of one degree, sorted.
    pub fn basis(&self, degree: i32) -> Vec<LSMonomial> {
        let n = self.n as usize;
        let mut out = Vec::new();
        let mut parent: Vec<Option<u8>> = vec![None; n];
        self.forests(1, &mut parent, degree, &mut out);
        out.sort();
        out
    }

    fn forests(&self, j: usize, parent: &mut Vec<Option<u8>>, degree: i32, out: &mut Vec<LSMonomial>) {
        let n = self.n as usize;
        if j >= n {
            let edges: Vec<(u8, u8)> = (0..n).filter_map(|v| parent[v].map(|p| (p, v as u8))).collect();
            let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
            let rest = degree - (self.d - 1) * edges.len() as i32;
            let mut decs = vec![self.alg.unit; n];
            self.decorate(&roots, 0, rest, &mut decs, &edges, out);
            return;
        }
        for p in std::iter::once(None).chain((0..j as u8).map(Some)) {
            parent[j] = p;
            self.forests(j + 1, parent, degree, out);
        }
        parent[j] = None;
    }

    fn decorate(&self, roots: &[usize], r: usize, rest: i32, decs: &mut Vec<usize>, edges: &[(u8, u8)], out: &mut Vec<LSMonomial>) {
        if r == roots.len() {
            if rest == 0 {
                out.push(LSMonomial { decs: decs.clone(), edges: edges.to_vec() });
            }
            return;
        }
        for a in 0..self.alg.len() {
            let deg = self.alg.degree(a);
            if deg <= rest {
                decs[roots[r]] = a;
                self.decorate(roots, r + 1, rest - deg, decs, edges, out);
            }
        }
        decs[roots[r]] = self.alg.unit;
    }

    /// Highest degree carrying a basis element.
    pub fn top_degree(&self) -> i32 {
        self.n as i32 * self.d + (self.n as i32 - 1).max(0) * (self.d - 1)
    }

    fn matrix(&self, src: &[LSMonomial], dst: &[LSMonomial]) -> Result<SparseMatrix, Error> {
        let index: BTreeMap<&LSMonomial, usize> = dst.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let cols: Vec<Vec<(usize, usize, Rational)>> = src
            .par_iter()
            .enumerate()
            .map(|(c, m)| {
                self.d(m)
                    .into_iter()
                    .map(|(t, v)| index.get(&t).map(|&r| (r, c, v)).ok_or(()))
                    .collect::<Result<Vec<_>, ()>>()
            })
            .collect::<Result<_, ()>>()
            .map_err(|_| Error::Validation(vec!["differential left the normal-form basis".into()]))?;
        Ok(SparseMatrix::from_triplets(dst.len(), src.len(), cols.into_iter().flatten())?)
    }

    /// Relation representatives whose `∇` does not reduce to zero.
    pub fn ideal_closure_defects(&self) -> Vec<String> {
        let n = self.n;
        let mut rels: Vec<(String, Vec<(Vec<Letter>, Rational)>)> = Vec::new();
        let one = Rational::one();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                rels.push((
                    format!("symmetry {i}{j}"),
                    vec![
                        (vec![Letter::Omega(i, j)], one.clone()),
                        (vec![Letter::Omega(j, i)], -sign(self.d % 2 != 0)),
                    ],
                ));
                rels.push((format!("square {i}{j}"), vec![(vec![Letter::Omega(i, j), Letter::Omega(i, j)], one.clone())]));
                for a in 0..self.alg.len() {
                    rels.push((
                        format!("slide {i}{j} {}", self.alg.basis[a].id),
                        vec![
                            (vec![Letter::Dec { v: i, a }, Letter::Omega(i, j)], one.clone()),
                            (vec![Letter::Dec { v: j, a }, Letter::Omega(i, j)], -one.clone()),
                        ],
                    ));
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let o = Letter::Omega;
                    rels.push((
                        format!("arnold {i}{j}{k}"),
                        vec![
                            (vec![o(i, j), o(i, k)], one.clone()),
                            (vec![o(j, k), o(j, i)], one.clone()),
                            (vec![o(k, i), o(k, j)], one.clone()),
                        ],
                    ));
                }
            }
        }
        let mut bad = Vec::new();
        for (name, words) in rels {
            let mut acc = LSElement::new();
            for (w, c) in &words {
                // the relation itself reduces to zero
                for (k, v) in self.normalize(w, c) {
                    add_to(&mut acc, k, v);
                }
            }
            if !acc.is_empty() {
                bad.push(format!("{name}: does not reduce to zero"));
                continue;
            }
            for (w, c) in &words {
                for (dw, dc) in self.d_word(w) {
                    for (k, v) in self.normalize(&dw, &(c * dc)) {
                        add_to(&mut acc, k, v);
                    }
                }
            }
            if !acc.is_empty() {
                bad.push(format!("{name}: differential leaves the ideal"));
            }
        }
        bad
    }
}

/// `F(A, n)` on degrees `lo ..= hi` (bases held for `lo-1 ..= hi+1`).
pub fn build_f(alg: &PDAlgebra, n: u8, lo: i32, hi: i32) -> Result<LSComplex, Error> {
    let m = LSModel::new(alg, n);
    let bases: Vec<Vec<LSMonomial>> = (lo - 1..=hi + 1).map(|p| m.basis(p)).collect();
    let mut diffs = Vec::new();
    for i in 0..bases.len() - 1 {
        diffs.push(m.matrix(&bases[i], &bases[i + 1])?);
    }
    let complex = CochainComplex::new(lo - 1, bases.iter().map(|b| b.len()).collect(), diffs)?;
    complex.check_d2()?;
    Ok(LSComplex {
        algebra: alg.clone(),
        n,
        bases,
        complex,
        lo,
        hi,
    })
}

/// Exact Betti numbers of `F(A, n)`; every degree is final.
pub fn ls_betti(alg: &PDAlgebra, n: u8, lo: i32, hi: i32) -> Result<BettiTable, Error> {
    let f = build_f(alg, n, lo, hi)?;
    let t = betti_of_complex(&f.complex, Boundary::Closed)?;
    let mut t = t.restrict(lo, hi);
    t.stabilized = vec![true; t.betti.len()];
    Ok(t)
}

/// Graphs with internal vertices or tadpoles go to zero; an edge `(i, j)`
/// to `ω_ij`, a decoration at `i` to `p_i^*`.
pub fn project_graphs_to_f(g: &Graph, alg: &PDAlgebra) -> Result<LSElement, Error> {
    if g.dim as i32 != alg.dim {
        return Err(Error::AlgebraMismatch(format!("graph dimension {} vs algebra {}", g.dim, alg.dim)));
    }
    let n_classes = alg.len() - 1;
    if let Some(x) = g.decs.iter().find(|x| x.class as usize >= n_classes) {
        return Err(Error::AlgebraMismatch(format!("class {} not in {}", x.class, alg.name)));
    }
    if g.n_int > 0 || g.has_tadpole() {
        return Ok(LSElement::new());
    }
    let m = LSModel::new(alg, g.n_ext);
    let mut w: Vec<Letter> = g.edges.iter().map(|&(a, b)| Letter::Omega(a, b)).collect();
    w.extend(g.decs.iter().map(|x| Letter::Dec {
        v: x.vertex,
        a: alg.basis_of_class(x.class),
    }));
    Ok(m.normalize(&w, &Rational::one()))
}

/// Graphs of `basis` where `project ∘ d ≠ d ∘ project`.
pub fn chain_map_defects(flavor: &Flavor, basis: &[Graph]) -> Result<Vec<Graph>, Error> {
    let alg = flavor
        .algebra
        .as_ref()
        .ok_or_else(|| Error::AlgebraMismatch("flavor carries no algebra".into()))?;
    let mut bad = Vec::new();
    for g in basis {
        let m = LSModel::new(alg, g.n_ext);
        let mut lhs = LSElement::new();
        for (h, c) in d_graphs(g, flavor)?.iter() {
            for (k, v) in project_graphs_to_f(h, alg)? {
                add_to(&mut lhs, k, v * c);
            }
        }
        let mut rhs = LSElement::new();
        for (mono, c) in project_graphs_to_f(g, alg)? {
            for (k, v) in m.d(&mono) {
                add_to(&mut rhs, k, v * &c);
            }
        }
        if lhs != rhs {
            bad.push(g.clone());
        }
    }
    Ok(bad)
}

/// Rank of the projection of the internal-vertex-free graphs of one degree
/// onto the normal-form basis of `F(A, n)` in that degree.
pub fn projection_rank(flavor: &Flavor, n: u8, degree: i32) -> Result<(usize, usize), Error> {
    let alg = flavor
        .algebra
        .as_ref()
        .ok_or_else(|| Error::AlgebraMismatch("flavor carries no algebra".into()))?;
    let graphs = enumerate_basis(flavor, n, degree, 0);
    let target = LSModel::new(alg, n).basis(degree);
    let index: BTreeMap<&LSMonomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut trip = Vec::new();
    for (c, g) in graphs.iter().enumerate() {
        for (k, v) in project_graphs_to_f(g, alg)? {
            trip.push((index[&k], c, v));
        }
    }
    let m = SparseMatrix::from_triplets(target.len(), graphs.len(), trip)?;
    Ok((confgraph_linalg::rank(&m), target.len()))
}

/// `P_0 = 1`, `P_n = P_{n-1} P_A + (n-1) t^{D-1} P_{n-1}`.
pub fn sbg_polynomial(poincare: &[usize], n: u32, dim: u32) -> Vec<u64> {
    let mut p: Vec<u64> = vec![1];
    for m in 1..=n as u64 {
        let mut next = vec![0u64; p.len() + poincare.len().max(1) + dim as usize];
        for (i, &x) in p.iter().enumerate() {
            for (j, &y) in poincare.iter().enumerate() {
                next[i + j] += x * y as u64;
            }
            next[i + dim as usize - 1] += (m - 1) * x;
        }
        while next.len() > 1 && *next.last().unwrap() == 0 {
            next.pop();
        }
        p = next;
    }
    p
}

/// Degrees (offset from 0) where a Betti number exceeds the bound.
pub fn sbg_violations(sbg: &[u64], betti: &BettiTable) -> Vec<i32> {
    (0..betti.betti.len())
        .filter_map(|i| {
            let p = betti.lo + i as i32;
            let bound = if p >= 0 { sbg.get(p as usize).copied().unwrap_or(0) } else { 0 };
            (betti.betti[i] as u64 > bound).then_some(p)
        })
        .collect()
}

/// `Π_{i<n} (χ - i)`.
pub fn expected_euler(alg: &PDAlgebra, n: u8) -> i64 {
    (0..n as i64).map(|i| alg.euler_characteristic() - i).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> PDAlgebra {
        PDAlgebra::builtin("S^2").unwrap()
    }

    #[test]
    fn one_point_is_the_algebra() {
        let a = PDAlgebra::builtin("T^2").unwrap();
        let m = LSModel::new(&a, 1);
        let dims: Vec<usize> = (0..=2).map(|p| m.basis(p).len()).collect();
        assert_eq!(dims, vec![1, 2, 1]);
    }

    #[test]
    fn sphere_two_points_dimensions() {
        let a = s2();
        let m = LSModel::new(&a, 2);
        let dims: Vec<usize> = (0..=4).map(|p| m.basis(p).len()).collect();
        assert_eq!(dims, vec![1, 1, 2, 1, 1]);
    }

    #[test]
    fn omega_squared_vanishes() {
        let a = s2();
        let m = LSModel::new(&a, 2);
        let w = [Letter::Omega(0, 1), Letter::Omega(0, 1)];
        assert!(m.normalize(&w, &Rational::one()).is_empty());
    }

    #[test]
    fn triangle_vanishes() {
        for name in ["S^2", "S^3"] {
            let a = PDAlgebra::builtin(name).unwrap();
            let m = LSModel::new(&a, 3);
            let w = [Letter::Omega(0, 1), Letter::Omega(1, 2), Letter::Omega(0, 2)];
            assert!(m.normalize(&w, &Rational::one()).is_empty(), "{name}");
        }
    }

    #[test]
    fn sbg_small_cases() {
        assert_eq!(sbg_polynomial(&[1, 0, 1], 0, 2), vec![1]);
        assert_eq!(sbg_polynomial(&[1, 0, 1], 2, 2), vec![1, 1, 2, 1, 1]);
        assert_eq!(sbg_polynomial(&[1, 2, 1], 2, 2), vec![1, 5, 8, 5, 1]);
    }
}
