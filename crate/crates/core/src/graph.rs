//! Decorated graphs and their canonical forms.
//!
//! A graph is read as a monomial in a free graded commutative algebra: first
//! one symbol per internal vertex (degree `-D`), then the edges in order
//! (degree `D-1` each), then the decorations in order. Vertices `0..n_ext` are
//! external, `n_ext..n_ext+n_int` internal. Edge `(a, b)` is `s^{ab}` with
//! `s^{ab} = (-1)^D s^{ba}`. Decorations refer to reduced classes of a
//! [`crate::PDAlgebra`] and carry their degree.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::PDAlgebra;
use crate::error::Error;
use crate::{format_q, parse_q, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dec {
    pub vertex: u8,
    pub class: u8,
    pub degree: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    pub dim: u8,
    pub n_ext: u8,
    pub n_int: u8,
    pub edges: Vec<(u8, u8)>,
    pub decs: Vec<Dec>,
}

fn parity_sign(odd: bool) -> i32 {
    if odd {
        -1
    } else {
        1
    }
}

/// Sign of the permutation that stably sorts `keys`, counting only
/// transpositions between elements flagged in `odd`.
fn koszul_sort_sign<K: Ord>(keys: &[K], odd: &[bool]) -> i32 {
    let mut inv = 0usize;
    for i in 0..keys.len() {
        if !odd[i] {
            continue;
        }
        for j in i + 1..keys.len() {
            if odd[j] && keys[j] < keys[i] {
                inv += 1;
            }
        }
    }
    parity_sign(inv % 2 == 1)
}

impl Graph {
    pub fn new(dim: u8, n_ext: u8, n_int: u8) -> Self {
        Graph {
            dim,
            n_ext,
            n_int,
            edges: Vec::new(),
            decs: Vec::new(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_ext as usize + self.n_int as usize
    }

    pub fn is_internal(&self, v: u8) -> bool {
        v >= self.n_ext
    }

    /// `(D-1)·#edges - D·#internal + Σ decoration degrees`.
    pub fn degree(&self) -> i32 {
        let d = self.dim as i32;
        (d - 1) * self.edges.len() as i32 - d * self.n_int as i32
            + self.decs.iter().map(|x| x.degree as i32).sum::<i32>()
    }

    /// Degree of the prefix consisting of the vertex block and the first
    /// `p` edges.
    pub(crate) fn prefix_degree(&self, p: usize) -> i32 {
        let d = self.dim as i32;
        -d * self.n_int as i32 + (d - 1) * p as i32
    }

    /// Component index of every vertex, and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut ids = vec![usize::MAX; n];
        let mut map = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let next = map.len();
            ids[v] = *map.entry(r).or_insert(next);
        }
        (ids, map.len())
    }

    /// First Betti number of the underlying graph.
    pub fn loop_order(&self) -> i32 {
        let (_, c) = self.components();
        self.edges.len() as i32 - self.n_vertices() as i32 + c as i32
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Components made only of internal vertices.
    pub fn internal_only_components(&self) -> Vec<Vec<u8>> {
        let (ids, c) = self.components();
        let mut has_ext = vec![false; c];
        for v in 0..self.n_ext as usize {
            has_ext[ids[v]] = true;
        }
        let mut out: Vec<Vec<u8>> = vec![Vec::new(); c];
        for (v, &id) in ids.iter().enumerate() {
            if !has_ext[id] {
                out[id].push(v as u8);
            }
        }
        out.into_iter().filter(|c| !c.is_empty()).collect()
    }

    /// Edge ends (a tadpole counts twice) plus decorations.
    pub fn valence(&self, v: u8) -> usize {
        self.edge_valence(v) + self.decs.iter().filter(|d| d.vertex == v).count()
    }

    pub fn edge_valence(&self, v: u8) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn has_tadpole(&self) -> bool {
        self.edges.iter().any(|&(a, b)| a == b)
    }

    pub fn tadpole_at(&self, v: u8) -> bool {
        self.edges.iter().any(|&(a, b)| a == v && b == v)
    }

    /// Quick test for vanishing by symmetry that needs no relabeling:
    /// tadpoles for odd `D`, multiple edges for even `D`, repeated odd
    /// decorations at one vertex.
    fn trivially_zero(&self) -> bool {
        let odd_dim = self.dim % 2 == 1;
        if odd_dim && self.has_tadpole() {
            return true;
        }
        if !odd_dim {
            let mut seen = BTreeSet::new();
            for &(a, b) in &self.edges {
                if !seen.insert((a.min(b), a.max(b))) {
                    return true;
                }
            }
        }
        let mut seen = BTreeSet::new();
        for d in &self.decs {
            if d.degree % 2 == 1 && !seen.insert((d.vertex, d.class)) {
                return true;
            }
        }
        false
    }

    /// Iterated color refinement on internal vertices; returns cells of
    /// internal vertex ids, ordered by an invariant color.
    fn internal_cells(&self) -> Vec<Vec<u8>> {
        let n = self.n_ext as usize;
        let total = self.n_vertices();
        let k = self.n_int as usize;
        if k == 0 {
            return Vec::new();
        }
        let mut adj: Vec<Vec<u8>> = vec![Vec::new(); total];
        for &(a, b) in &self.edges {
            if a != b {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        let mut color: Vec<usize> = (0..total).collect();
        {
            let sigs: Vec<(usize, usize, Vec<(u8, u8)>)> = (n..total)
                .map(|v| {
                    let v8 = v as u8;
                    let tad = self.edges.iter().filter(|&&(a, b)| a == v8 && b == v8).count();
                    let mut ds: Vec<(u8, u8)> =
                        self.decs.iter().filter(|d| d.vertex == v8).map(|d| (d.class, d.degree)).collect();
                    ds.sort_unstable();
                    (adj[v].len(), tad, ds)
                })
                .collect();
            let mut uniq = sigs.clone();
            uniq.sort();
            uniq.dedup();
            for (i, s) in sigs.iter().enumerate() {
                color[n + i] = n + uniq.binary_search(s).unwrap();
            }
        }
        let mut classes = color[n..].iter().collect::<BTreeSet<_>>().len();
        loop {
            let sigs: Vec<(usize, Vec<usize>)> = (n..total)
                .map(|v| {
                    let mut nb: Vec<usize> = adj[v].iter().map(|&w| color[w as usize]).collect();
                    nb.sort_unstable();
                    (color[v], nb)
                })
                .collect();
            let mut uniq = sigs.clone();
            uniq.sort();
            uniq.dedup();
            for (i, s) in sigs.iter().enumerate() {
                color[n + i] = n + uniq.binary_search(s).unwrap();
            }
            if uniq.len() == classes || uniq.len() == k {
                break;
            }
            classes = uniq.len();
        }
        let mut cells: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
        for v in n..total {
            cells.entry(color[v]).or_default().push(v as u8);
        }
        cells.into_values().collect()
    }

    /// Apply a vertex relabeling (`lab[old] = new`), producing the sorted
    /// key and the sign. Assumes `trivially_zero` is false.
    fn relabeled(&self, lab: &[u8]) -> (Vec<(u8, u8)>, Vec<Dec>, i32) {
        let d = self.dim;
        let edge_odd = d % 2 == 0;
        let mut sign = 1;
        if d % 2 == 1 {
            let n = self.n_ext as usize;
            let internal: Vec<u8> = lab[n..].to_vec();
            sign *= koszul_sort_sign(&internal, &vec![true; internal.len()]);
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            let (x, y) = (lab[a as usize], lab[b as usize]);
            if x > y {
                if d % 2 == 1 {
                    sign = -sign;
                }
                edges.push((y, x));
            } else {
                edges.push((x, y));
            }
        }
        if edge_odd {
            sign *= koszul_sort_sign(&edges, &vec![true; edges.len()]);
        }
        edges.sort_unstable();
        let mut decs: Vec<Dec> = self
            .decs
            .iter()
            .map(|x| Dec {
                vertex: lab[x.vertex as usize],
                ..*x
            })
            .collect();
        let keys: Vec<(u8, u8)> = decs.iter().map(|x| (x.vertex, x.class)).collect();
        let odd: Vec<bool> = decs.iter().map(|x| x.degree % 2 == 1).collect();
        sign *= koszul_sort_sign(&keys, &odd);
        decs.sort_by_key(|x| (x.vertex, x.class));
        (edges, decs, sign)
    }

    /// The canonical representative and the sign relating it to `self`
    /// (`self = sign · canonical`), or `None` if the graph vanishes by
    /// symmetry.
    pub fn canonicalize(&self) -> Option<(Graph, i32)> {
        if self.trivially_zero() {
            return None;
        }
        let n = self.n_ext as usize;
        let cells = self.internal_cells();
        let mut lab: Vec<u8> = (0..self.n_vertices() as u8).collect();
        let mut best: Option<(Vec<(u8, u8)>, Vec<Dec>, i32)> = None;
        let mut zero = false;
        let mut visit = |lab: &[u8]| {
            let (e, x, s) = self.relabeled(lab);
            match &best {
                None => best = Some((e, x, s)),
                Some((be, bx, bs)) => match (&e, &x).cmp(&(be, bx)) {
                    std::cmp::Ordering::Less => {
                        best = Some((e, x, s));
                        zero = false;
                    }
                    std::cmp::Ordering::Equal => {
                        if s != *bs {
                            zero = true;
                        }
                    }
                    std::cmp::Ordering::Greater => {}
                },
            }
        };
        assign_cells(&cells, 0, n, &mut lab, &mut visit);
        if zero {
            return None;
        }
        let (edges, decs, sign) = best.expect("at least one labeling");
        Some((
            Graph {
                dim: self.dim,
                n_ext: self.n_ext,
                n_int: self.n_int,
                edges,
                decs,
            },
            sign,
        ))
    }

    /// Relabel external vertices by `perm` (`perm[i]` is the new 0-based
    /// label of external vertex `i`) and canonicalize.
    pub fn act_symmetric_group(&self, perm: &[u8]) -> Option<(Graph, i32)> {
        assert_eq!(perm.len(), self.n_ext as usize, "permutation size");
        let map = |v: u8| if v < self.n_ext { perm[v as usize] } else { v };
        let g = Graph {
            edges: self.edges.iter().map(|&(a, b)| (map(a), map(b))).collect(),
            decs: self
                .decs
                .iter()
                .map(|x| Dec {
                    vertex: map(x.vertex),
                    ..*x
                })
                .collect(),
            ..self.clone()
        };
        g.canonicalize()
    }

    /// Literal text form, with basis ids taken from `alg`.
    pub fn to_literal(&self, coeff: &Rational, alg: Option<&PDAlgebra>) -> String {
        let mut s = format!("graph D={} ext={} int={}; edges=", self.dim, self.n_ext, self.n_int);
        for &(a, b) in &self.edges {
            s.push_str(&format!("({},{})", a + 1, b + 1));
        }
        let mut v_order: Vec<u8> = Vec::new();
        for d in &self.decs {
            if v_order.last() != Some(&d.vertex) {
                v_order.push(d.vertex);
            }
        }
        let grouped = v_order.iter().collect::<BTreeSet<_>>().len() == v_order.len();
        assert!(grouped, "decorations must be grouped by vertex to print");
        for v in v_order {
            let ids: Vec<String> = self
                .decs
                .iter()
                .filter(|d| d.vertex == v)
                .map(|d| match alg {
                    Some(a) => a.class_id(d.class).to_string(),
                    None => format!("#{}", d.class),
                })
                .collect();
            s.push_str(&format!("; dec[{}]={}", v + 1, ids.join(",")));
        }
        s.push_str(&format!("; coeff={}", format_q(coeff)));
        s
    }

    /// Parse the literal text form. Decoration ids are resolved in `alg`;
    /// `#<class>` tokens name reduced classes directly (degree from `alg`).
    pub fn parse_literal(text: &str, alg: Option<&PDAlgebra>) -> Result<(Graph, Rational), Error> {
        let err = |reason: String| Error::Parse { line: 1, reason };
        let body = text
            .trim()
            .strip_prefix("graph")
            .ok_or_else(|| err("literal must start with 'graph'".into()))?;
        let mut g: Option<Graph> = None;
        let mut coeff = Rational::one();
        let mut decs: Vec<(u8, String)> = Vec::new();
        let mut edges: Vec<(u8, u8)> = Vec::new();
        for part in body.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            if g.is_none() {
                let mut dim = None;
                let mut ext = None;
                let mut int = None;
                for tok in part.split_whitespace() {
                    let (k, v) = tok.split_once('=').ok_or_else(|| err(format!("bad header token {tok:?}")))?;
                    let v: u8 = v.parse().map_err(|_| err(format!("bad number {v:?}")))?;
                    match k {
                        "D" => dim = Some(v),
                        "ext" => ext = Some(v),
                        "int" => int = Some(v),
                        _ => return Err(err(format!("unknown header key {k:?}"))),
                    }
                }
                let (Some(d), Some(e), Some(i)) = (dim, ext, int) else {
                    return Err(err("header needs D, ext and int".into()));
                };
                g = Some(Graph::new(d, e, i));
                continue;
            }
            let (key, val) = part.split_once('=').ok_or_else(|| err(format!("bad field {part:?}")))?;
            let key = key.trim();
            let val = val.trim();
            if key == "edges" {
                for chunk in val.split(')').map(|c| c.trim().trim_start_matches(',').trim()).filter(|c| !c.is_empty()) {
                    let inner = chunk
                        .strip_prefix('(')
                        .ok_or_else(|| err(format!("bad edge {chunk:?}")))?;
                    let (a, b) = inner.split_once(',').ok_or_else(|| err(format!("bad edge {chunk:?}")))?;
                    let a: u8 = a.trim().parse().map_err(|_| err(format!("bad vertex {a:?}")))?;
                    let b: u8 = b.trim().parse().map_err(|_| err(format!("bad vertex {b:?}")))?;
                    if a == 0 || b == 0 {
                        return Err(err("vertices are 1-based".into()));
                    }
                    edges.push((a - 1, b - 1));
                }
            } else if let Some(v) = key.strip_prefix("dec[").and_then(|r| r.strip_suffix(']')) {
                let v: u8 = v.parse().map_err(|_| err(format!("bad vertex {v:?}")))?;
                if v == 0 {
                    return Err(err("vertices are 1-based".into()));
                }
                for id in val.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    decs.push((v - 1, id.to_string()));
                }
            } else if key == "coeff" {
                coeff = parse_q(val).map_err(err)?;
            } else {
                return Err(err(format!("unknown field {key:?}")));
            }
        }
        let mut g = g.ok_or_else(|| err("missing header".into()))?;
        let nv = g.n_vertices() as u8;
        if edges.iter().any(|&(a, b)| a >= nv || b >= nv) {
            return Err(err("edge endpoint out of range".into()));
        }
        g.edges = edges;
        for (v, id) in decs {
            if v >= nv {
                return Err(err("decorated vertex out of range".into()));
            }
            let a = alg.ok_or_else(|| err("decorations need an algebra".into()))?;
            let class = match id.strip_prefix('#') {
                Some(c) => c.parse::<u8>().ok().filter(|&c| (c as usize) < a.len() - 1),
                None => a.class_by_id(&id),
            }
            .ok_or_else(|| err(format!("unknown or unit decoration {id:?}")))?;
            g.decs.push(Dec {
                vertex: v,
                class,
                degree: a.degree(a.basis_of_class(class)) as u8,
            });
        }
        Ok((g, coeff))
    }
}

/// Enumerate every labeling that sends the internal vertices of each cell
/// onto the next block of labels, in all orders.
fn assign_cells(cells: &[Vec<u8>], ci: usize, offset: usize, lab: &mut Vec<u8>, visit: &mut impl FnMut(&[u8])) {
    if ci == cells.len() {
        visit(lab);
        return;
    }
    let cell = &cells[ci];
    let mut order: Vec<u8> = cell.clone();
    permute(&mut order, 0, &mut |ord: &[u8]| {
        for (i, &v) in ord.iter().enumerate() {
            lab[v as usize] = (offset + i) as u8;
        }
        assign_cells(cells, ci + 1, offset + cell.len(), lab, visit);
    });
}

fn permute(xs: &mut Vec<u8>, i: usize, f: &mut impl FnMut(&[u8])) {
    if i + 1 >= xs.len() {
        f(xs);
        return;
    }
    for j in i..xs.len() {
        xs.swap(i, j);
        permute(xs, i + 1, f);
        xs.swap(i, j);
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal(&Rational::one(), None))
    }
}

/// A finite linear combination of canonical graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSum {
    pub terms: BTreeMap<Graph, Rational>,
}

impl GraphSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(g: &Graph) -> Self {
        let mut s = Self::new();
        s.add_raw(g, &Rational::one());
        s
    }

    /// Add `c · g` for a graph that need not be canonical.
    pub fn add_raw(&mut self, g: &Graph, c: &Rational) {
        if c.is_zero() {
            return;
        }
        if let Some((h, s)) = g.canonicalize() {
            let c = if s < 0 { -c.clone() } else { c.clone() };
            self.add_canonical(h, c);
        }
    }

    pub fn add_canonical(&mut self, g: Graph, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_sum(&mut self, other: &GraphSum, factor: &Rational) {
        for (g, c) in &other.terms {
            self.add_canonical(g.clone(), c * factor);
        }
    }

    pub fn scaled(&self, factor: &Rational) -> GraphSum {
        let mut out = GraphSum::new();
        out.add_sum(self, factor);
        out
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

    pub fn coeff(&self, g: &Graph) -> Rational {
        self.terms.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Graph, &Rational)> {
        self.terms.iter()
    }

    pub fn to_literals(&self, alg: Option<&PDAlgebra>) -> Vec<String> {
        self.terms.iter().map(|(g, c)| g.to_literal(c, alg)).collect()
    }
}

/// Constraints for [`enumerate_graphs`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraints {
    pub min_internal_valence: u8,
    pub allow_ext_tadpoles: bool,
    /// When set, external tadpoles are restricted to vertices `< framed`.
    pub framed: Option<u8>,
    pub allow_int_tadpoles: bool,
    pub genus_cap: Option<i32>,
    pub forbid_internal_only_components: bool,
    pub connected: bool,
}

impl Default for Constraints {
    fn default() -> Self {
        Constraints {
            min_internal_valence: 0,
            allow_ext_tadpoles: false,
            framed: None,
            allow_int_tadpoles: false,
            genus_cap: None,
            forbid_internal_only_components: true,
            connected: false,
        }
    }
}

impl Constraints {
    pub fn admits(&self, g: &Graph) -> bool {
        for &(a, b) in &g.edges {
            if a == b {
                let ok = if g.is_internal(a) {
                    self.allow_int_tadpoles
                } else {
                    self.allow_ext_tadpoles && self.framed.map_or(true, |f| a < f)
                };
                if !ok {
                    return false;
                }
            }
        }
        for v in g.n_ext..g.n_ext + g.n_int {
            if g.valence(v) < self.min_internal_valence as usize {
                return false;
            }
        }
        if let Some(cap) = self.genus_cap {
            if g.loop_order() > cap {
                return false;
            }
        }
        if self.forbid_internal_only_components && !g.internal_only_components().is_empty() {
            return false;
        }
        if self.connected && !g.is_connected() {
            return false;
        }
        true
    }
}

/// All canonical graphs with `k_int` internal vertices and the given degree
/// satisfying `c`, sorted. `classes[i]` is the degree of reduced class `i`.
pub fn enumerate_graphs(n_ext: u8, dim: u8, c: &Constraints, k_int: u8, degree: i32, classes: &[u8]) -> Vec<Graph> {
    assert!(dim >= 2, "edges of degree D-1 must have positive degree");
    let d = dim as i32;
    let total = degree + d * k_int as i32;
    if total < 0 {
        return Vec::new();
    }
    if c.forbid_internal_only_components && n_ext == 0 && k_int > 0 {
        return Vec::new();
    }
    let nv = n_ext as usize + k_int as usize;
    let mut slots: Vec<(u8, u8)> = Vec::new();
    for a in 0..nv as u8 {
        let tad = if a < n_ext {
            c.allow_ext_tadpoles && c.framed.map_or(true, |f| a < f)
        } else {
            c.allow_int_tadpoles
        };
        if tad && dim % 2 == 0 {
            slots.push((a, a));
        }
        for b in a + 1..nv as u8 {
            slots.push((a, b));
        }
    }
    let multi = dim % 2 == 1;
    let mut dec_slots: Vec<Dec> = Vec::new();
    for v in 0..nv as u8 {
        for (cl, &deg) in classes.iter().enumerate() {
            dec_slots.push(Dec {
                vertex: v,
                class: cl as u8,
                degree: deg,
            });
        }
    }
    let min_class = classes.iter().copied().min().unwrap_or(0) as i32;
    let mut out = BTreeSet::new();
    let mut edges = Vec::new();
    for e in 0..=(total / (d - 1)) {
        let rest = total - (d - 1) * e;
        if classes.is_empty() && rest != 0 {
            continue;
        }
        let max_decs = if rest == 0 { 0 } else { (rest / min_class.max(1)) as usize };
        choose_edges(&slots, 0, e as usize, multi, &mut edges, &mut |edges: &[(u8, u8)]| {
            let mut g = Graph::new(dim, n_ext, k_int);
            g.edges = edges.to_vec();
            // internal vertices are anonymous: insist on non-increasing edge valence
            let vals: Vec<usize> = (n_ext..n_ext + k_int).map(|v| g.edge_valence(v)).collect();
            if vals.windows(2).any(|w| w[0] < w[1]) {
                return;
            }
            let deficit: usize = vals
                .iter()
                .map(|&x| (c.min_internal_valence as usize).saturating_sub(x))
                .sum();
            if deficit > max_decs {
                return;
            }
            let mut decs = Vec::new();
            choose_decs(&dec_slots, 0, rest, &mut decs, &mut |decs: &[Dec]| {
                let mut h = g.clone();
                h.decs = decs.to_vec();
                if !c.admits(&h) {
                    return;
                }
                if let Some((canon, _)) = h.canonicalize() {
                    out.insert(canon);
                }
            });
        });
    }
    out.into_iter().collect()
}

fn choose_edges(
    slots: &[(u8, u8)],
    start: usize,
    left: usize,
    multi: bool,
    acc: &mut Vec<(u8, u8)>,
    f: &mut impl FnMut(&[(u8, u8)]),
) {
    if left == 0 {
        f(acc);
        return;
    }
    for i in start..slots.len() {
        let tad = slots[i].0 == slots[i].1;
        acc.push(slots[i]);
        let next = if multi && !tad { i } else { i + 1 };
        choose_edges(slots, next, left - 1, multi, acc, f);
        acc.pop();
    }
}

fn choose_decs(slots: &[Dec], start: usize, left: i32, acc: &mut Vec<Dec>, f: &mut impl FnMut(&[Dec])) {
    if left == 0 {
        f(acc);
        return;
    }
    for i in start..slots.len() {
        let deg = slots[i].degree as i32;
        if deg > left || deg == 0 {
            continue;
        }
        acc.push(slots[i]);
        let next = if deg % 2 == 1 { i + 1 } else { i };
        choose_decs(slots, next, left - deg, acc, f);
        acc.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_graph(dim: u8, edges: &[(u8, u8)], n_ext: u8, n_int: u8) -> Graph {
        Graph {
            dim,
            n_ext,
            n_int,
            edges: edges.to_vec(),
            decs: vec![],
        }
    }

    #[test]
    fn degree_examples() {
        assert_eq!(edge_graph(2, &[(0, 1)], 2, 0).degree(), 1);
        assert_eq!(edge_graph(2, &[(0, 3), (1, 3), (2, 3)], 3, 1).degree(), 1);
        let mut g = Graph::new(3, 0, 1);
        g.decs = vec![
            Dec { vertex: 0, class: 0, degree: 1 },
            Dec { vertex: 0, class: 1, degree: 2 },
        ];
        assert_eq!(g.degree(), 0);
    }

    #[test]
    fn symmetric_zeros() {
        assert!(edge_graph(2, &[(0, 1), (1, 0)], 2, 0).canonicalize().is_none());
        assert!(edge_graph(3, &[(0, 0)], 1, 0).canonicalize().is_none());
        assert!(edge_graph(3, &[(0, 1), (1, 0)], 2, 0).canonicalize().is_some());
    }

    #[test]
    fn edge_swap_sign() {
        let a = edge_graph(2, &[(0, 1), (1, 2)], 3, 0).canonicalize().unwrap();
        let b = edge_graph(2, &[(1, 2), (0, 1)], 3, 0).canonicalize().unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, -b.1);
    }

    #[test]
    fn loop_orders() {
        assert_eq!(edge_graph(2, &[(0, 1), (1, 2)], 3, 0).loop_order(), 0);
        assert_eq!(edge_graph(2, &[(0, 1), (1, 2), (0, 2)], 3, 0).loop_order(), 1);
        let two = edge_graph(2, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 6, 0);
        assert_eq!(two.loop_order(), 2);
    }

    #[test]
    fn swapping_externals_of_an_edge() {
        let e2 = edge_graph(2, &[(0, 1)], 2, 0);
        assert_eq!(e2.act_symmetric_group(&[1, 0]).unwrap(), e2.canonicalize().unwrap());
        let e3 = edge_graph(3, &[(0, 1)], 2, 0);
        let (g, s) = e3.act_symmetric_group(&[1, 0]).unwrap();
        assert_eq!(g, e3);
        assert_eq!(s, -1);
    }

    #[test]
    fn enumeration_examples() {
        let c = Constraints::default();
        assert_eq!(enumerate_graphs(2, 2, &c, 0, 1, &[]).len(), 1);
        assert_eq!(enumerate_graphs(1, 2, &c, 0, 0, &[2]).len(), 1);
        for deg in -3..4 {
            for k in 0..3 {
                assert!(enumerate_graphs(0, 2, &c, k, deg, &[2]).iter().all(|g| g.n_int == 0));
            }
        }
    }

    #[test]
    fn literal_round_trip() {
        let a = PDAlgebra::builtin("T^2").unwrap();
        let text = "graph D=2 ext=2 int=1; edges=(1,3)(3,2); dec[3]=a,b; coeff=-3/2";
        let (g, c) = Graph::parse_literal(text, Some(&a)).unwrap();
        assert_eq!(g.degree(), 2 - 2 + 2);
        assert_eq!(g.to_literal(&c, Some(&a)), text);
    }
}
