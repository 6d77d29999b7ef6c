//! Term generators shared by every differential: splitting an edge into the
//! diagonal class, contracting an edge at an internal vertex, and cutting
//! out internal-only components against a partition function.
//!
//! All generators return raw (non-canonical) graphs with coefficients; sign
//! rules follow the word model described in [`crate::graph`].

use num_traits::{One, Zero};

use crate::algebra::PDAlgebra;
use crate::error::Error;
use crate::graph::{Dec, Graph, GraphSum};
use crate::Rational;

/// `(class, degree)` of a non-unit leg, `None` for the unit.
pub type Leg = Option<(u8, u8)>;

/// The diagonal class with unit legs marked, ready for edge splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedDiagonal {
    pub terms: Vec<(Leg, Leg, Rational)>,
}

impl ReducedDiagonal {
    pub fn new(alg: &PDAlgebra) -> Result<Self, Error> {
        let diag = alg.diagonal()?;
        let leg = |i: usize| alg.class_of(i).map(|c| (c, alg.degree(i) as u8));
        Ok(ReducedDiagonal {
            terms: diag.terms.iter().map(|(a, b, g)| (leg(*a), leg(*b), g.clone())).collect(),
        })
    }

    pub fn empty() -> Self {
        ReducedDiagonal { terms: Vec::new() }
    }
}

fn sign_of(deg: i32) -> i32 {
    if deg.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn signed(c: &Rational, s: i32) -> Rational {
    if s < 0 {
        -c.clone()
    } else {
        c.clone()
    }
}

/// Replace edge `p` by `Σ g^{αβ} e_α^{src} e_β^{dst}`, the new decorations
/// placed at the front of the decoration block.
pub fn split_edge(g: &Graph, p: usize, diag: &ReducedDiagonal) -> Vec<(Graph, Rational)> {
    let (src, dst) = g.edges[p];
    let s = sign_of(g.prefix_degree(p));
    let mut out = Vec::new();
    for (a, b, c) in &diag.terms {
        let mut h = g.clone();
        h.edges.remove(p);
        let mut front = Vec::new();
        if let Some((class, degree)) = a {
            front.push(Dec {
                vertex: src,
                class: *class,
                degree: *degree,
            });
        }
        if let Some((class, degree)) = b {
            front.push(Dec {
                vertex: dst,
                class: *class,
                degree: *degree,
            });
        }
        front.extend(h.decs.iter().copied());
        h.decs = front;
        out.push((h, signed(c, s)));
    }
    out
}

pub fn split_terms(g: &Graph, diag: &ReducedDiagonal) -> Vec<(Graph, Rational)> {
    (0..g.edges.len()).flat_map(|p| split_edge(g, p, diag)).collect()
}

/// Merge vertex `v` into `u` and renumber the internal vertices above `v`.
fn merge_vertex(g: &Graph, v: u8, u: u8) -> Graph {
    let map = |x: u8| {
        let x = if x == v { u } else { x };
        if x > v {
            x - 1
        } else {
            x
        }
    };
    Graph {
        dim: g.dim,
        n_ext: g.n_ext,
        n_int: g.n_int - 1,
        edges: g.edges.iter().map(|&(a, b)| (map(a), map(b))).collect(),
        decs: g
            .decs
            .iter()
            .map(|x| Dec {
                vertex: map(x.vertex),
                ..*x
            })
            .collect(),
    }
}

/// Contract edge `e` by removing its internal endpoint `v` into the other
/// endpoint. The word is rearranged to `V_v s_{vu} ...` and that prefix
/// dropped with a factor `-1`.
pub fn contract_edge(g: &Graph, e: usize, v: u8) -> (Graph, Rational) {
    let (a, b) = g.edges[e];
    let d = g.dim as i32;
    assert!(a != b && (a == v || b == v) && g.is_internal(v));
    let u = if a == v { b } else { a };
    let pos_v = (v - g.n_ext) as i32;
    let mut s = -sign_of(d * pos_v) * sign_of((d - 1) * e as i32);
    if b == v {
        s *= sign_of(d);
    }
    let mut h = g.clone();
    h.edges.remove(e);
    (merge_vertex(&h, v, u), Rational::from_integer(s.into()))
}

/// Contract every edge with at least one internal endpoint; tadpoles are
/// never contracted.
pub fn contract_terms(g: &Graph) -> Vec<(Graph, Rational)> {
    let mut out = Vec::new();
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if a == b {
            continue;
        }
        let v = a.max(b);
        if g.is_internal(v) {
            out.push(contract_edge(g, e, v));
        }
    }
    out
}

/// Split `g` into the subgraph on the internal vertices `comp` (all of them
/// internal, closed under edges) and the rest. Returns `(piece, rest, sign)`
/// with `g = sign · piece · rest` as words.
pub fn extract_component(g: &Graph, comp: &[u8]) -> (Graph, Graph, i32) {
    let d = g.dim as i32;
    let in_comp = |v: u8| comp.contains(&v);
    // letters: (goes to front, odd, original order)
    let mut letters: Vec<(bool, bool)> = Vec::new();
    for v in g.n_ext..g.n_ext + g.n_int {
        letters.push((in_comp(v), d % 2 == 1));
    }
    for &(a, _) in &g.edges {
        letters.push((in_comp(a), (d - 1) % 2 == 1));
    }
    for x in &g.decs {
        letters.push((in_comp(x.vertex), x.degree % 2 == 1));
    }
    // moving the front letters left past rest letters
    let mut inv = 0usize;
    let mut rest_odd_seen = 0usize;
    for &(front, odd) in &letters {
        if front {
            if odd {
                inv += rest_odd_seen;
            }
        } else if odd {
            rest_odd_seen += 1;
        }
    }
    let sign = if inv % 2 == 0 { 1 } else { -1 };

    let mut sorted: Vec<u8> = comp.to_vec();
    sorted.sort_unstable();
    let piece_label = |v: u8| sorted.iter().position(|&x| x == v).unwrap() as u8;
    let rest_internal: Vec<u8> = (g.n_ext..g.n_ext + g.n_int).filter(|v| !in_comp(*v)).collect();
    let rest_label = |v: u8| {
        if v < g.n_ext {
            v
        } else {
            g.n_ext + rest_internal.iter().position(|&x| x == v).unwrap() as u8
        }
    };
    let mut piece = Graph::new(g.dim, 0, sorted.len() as u8);
    let mut rest = Graph::new(g.dim, g.n_ext, rest_internal.len() as u8);
    for &(a, b) in &g.edges {
        if in_comp(a) {
            piece.edges.push((piece_label(a), piece_label(b)));
        } else {
            rest.edges.push((rest_label(a), rest_label(b)));
        }
    }
    for x in &g.decs {
        if in_comp(x.vertex) {
            piece.decs.push(Dec {
                vertex: piece_label(x.vertex),
                ..*x
            });
        } else {
            rest.decs.push(Dec {
                vertex: rest_label(x.vertex),
                ..*x
            });
        }
    }
    (piece, rest, sign)
}

/// Value of the partition function on one connected internal-only graph:
/// the coefficient of its canonical form in `z`.
pub fn z_value(z: &GraphSum, piece: &Graph) -> Rational {
    match piece.canonicalize() {
        None => Rational::zero(),
        Some((h, s)) => signed(&z.coeff(&h), s),
    }
}

/// Replace all internal-only components of `g` by their `z` values.
/// Returns `None` when the product vanishes.
pub fn cut_components(g: &Graph, z: &GraphSum) -> Option<(Graph, Rational)> {
    let comps = g.internal_only_components();
    if comps.is_empty() {
        return Some((g.clone(), Rational::one()));
    }
    let mut cur = g.clone();
    let mut factor = Rational::one();
    for _ in 0..comps.len() {
        // labels shift as components are removed; recompute by vertex set
        let (ids, _) = cur.components();
        let target = comp_in(&cur, &ids);
        let (piece, rest, s) = extract_component(&cur, &target);
        let zv = z_value(z, &piece);
        if zv.is_zero() {
            return None;
        }
        factor *= signed(&zv, s);
        cur = rest;
    }
    Some((cur, factor))
}

/// The first internal-only component of `g` under the component ids `ids`.
fn comp_in(g: &Graph, ids: &[usize]) -> Vec<u8> {
    let mut has_ext = vec![false; ids.len()];
    for v in 0..g.n_ext as usize {
        has_ext[ids[v]] = true;
    }
    let first = (0..g.n_vertices()).find(|&v| !has_ext[ids[v]]).expect("an internal-only component");
    (0..g.n_vertices())
        .filter(|&v| ids[v] == ids[first])
        .map(|v| v as u8)
        .collect()
}

/// Accumulate raw terms into a canonical sum.
pub fn collect(terms: impl IntoIterator<Item = (Graph, Rational)>) -> GraphSum {
    let mut s = GraphSum::new();
    for (g, c) in terms {
        s.add_raw(&g, &c);
    }
    s
}
