use confgraph::complex::{enumerate_basis, Flavor, FlavorKind};
use confgraph::graph::{enumerate_graphs, Constraints};
use confgraph::operad::*;
use confgraph::{Dec, Error, Graph, GraphSum, PDAlgebra, Rational};
use num_traits::One;

fn alg(name: &str) -> PDAlgebra {
    PDAlgebra::builtin(name).unwrap()
}

fn edge12(dim: u8) -> Graph {
    Graph {
        dim,
        n_ext: 2,
        n_int: 0,
        edges: vec![(0, 1)],
        decs: vec![],
    }
}

fn decorated(dim: u8, decs: &[(u8, u8, u8)]) -> Graph {
    Graph {
        dim,
        n_ext: 2,
        n_int: 0,
        edges: vec![],
        decs: decs.iter().map(|&(vertex, class, degree)| Dec { vertex, class, degree }).collect(),
    }
}

#[test]
fn edge_splitting_examples() {
    let s2 = alg("S^2");
    let w = s2.class_by_id("w").unwrap();
    let mut want = GraphSum::new();
    want.add_canonical(decorated(2, &[(0, w, 2)]), Rational::one());
    want.add_canonical(decorated(2, &[(1, w, 2)]), Rational::one());
    assert_eq!(d_gra(&edge12(2), &s2).unwrap(), want);

    let t2 = alg("T^2");
    let id = |s: &str| t2.class_by_id(s).unwrap();
    let d = d_gra(&edge12(2), &t2).unwrap();
    assert_eq!(d.len(), 4);
    for (vertices, c) in [(vec![(0, id("w"), 2)], 1), (vec![(1, id("w"), 2)], 1)] {
        let (g, s) = decorated(2, &vertices).canonicalize().unwrap();
        assert_eq!(d.terms.get(&g), Some(&Rational::from_integer((s * c).into())));
    }
    let (ab, _) = decorated(2, &[(0, id("a"), 1), (1, id("b"), 1)]).canonicalize().unwrap();
    let (ba, _) = decorated(2, &[(0, id("b"), 1), (1, id("a"), 1)]).canonicalize().unwrap();
    assert!(d.terms.contains_key(&ab) && d.terms.contains_key(&ba));

    assert!(d_gra(&Graph::new(2, 3, 0), &t2).unwrap().is_zero());
}

fn gra_graphs(a: &PDAlgebra, n: u8, max_edges: usize) -> Vec<Graph> {
    let c = Constraints {
        allow_ext_tadpoles: true,
        ..Constraints::default()
    };
    let dim = a.dim as u8;
    let mut out = Vec::new();
    for degree in 0..=(max_edges as i32 * (a.dim - 1) + 2 * a.dim) {
        out.extend(
            enumerate_graphs(n, dim, &c, 0, degree, &a.class_degrees())
                .into_iter()
                .filter(|g| g.edges.len() <= max_edges && g.decs.len() <= 2),
        );
    }
    out
}

#[test]
fn edge_splitting_squares_to_zero() {
    for name in ["S^2", "T^2"] {
        let a = alg(name);
        for n in 1..=3 {
            for g in gra_graphs(&a, n, 2) {
                let mut dd = GraphSum::new();
                for (h, c) in d_gra(&g, &a).unwrap().iter() {
                    dd.add_sum(&d_gra(h, &a).unwrap(), c);
                }
                assert!(dd.is_zero(), "{name}: {g}");
            }
        }
    }
}

#[test]
fn merging_an_edge_gives_the_tadpole_term() {
    let shape = CocompositionShape::new(2, vec![vec![0, 1]]).unwrap();
    let t = cocompose(&edge12(2), &shape).unwrap();
    let tadpole = Graph {
        dim: 2,
        n_ext: 1,
        n_int: 0,
        edges: vec![(0, 0)],
        decs: vec![],
    };
    assert_eq!(t.terms.len(), 2);
    assert!(t.terms.contains_key(&vec![Graph::new(2, 2, 0), tadpole]));
    let e = cocompose(&Graph::new(2, 3, 0), &CocompositionShape::new(3, vec![vec![0, 2], vec![1]]).unwrap()).unwrap();
    assert_eq!(e.terms.len(), 1);
    assert!(cocompose(&edge12(2), &CocompositionShape::singletons(3)).is_err());
}

#[test]
fn coassociativity_small() {
    for dim in [2u8, 3, 4] {
        for n in 1..=3 {
            let r = coassociativity_suite(dim, n, 3).unwrap();
            assert!(r.passed(), "D={dim} n={n}: {:?}", r.failures.first());
            assert!(r.checked > 0);
        }
    }
}

#[test]
fn comodule_square_on_generators() {
    for name in ["S^2", "T^2", "S^3"] {
        for n in 1..=3 {
            let r = gra_comodule_suite(&alg(name), n, 2, 2).unwrap();
            assert!(r.passed(), "{name} n={n}: {:?}", r.failures.first());
        }
    }
}

#[test]
fn comodule_square_on_twisted_graphs() {
    let t2 = alg("T^2");
    for kind in [FlavorKind::GraphsM, FlavorKind::Reduced] {
        let f = Flavor::decorated(kind, &t2, None).unwrap();
        let r = comodule_suite(&f, 2, 0, 2, 1).unwrap();
        assert!(r.passed() && r.checked > 0, "{kind:?}: {:?}", r.failures.first());
    }
}

#[test]
fn tadpole_free_flavor_has_no_coaction() {
    let f = Flavor::decorated(FlavorKind::GraphsMNoTadpole, &alg("T^2"), None).unwrap();
    let g = enumerate_basis(&f, 2, 1, 0).remove(0);
    let shape = CocompositionShape::singletons(2);
    assert!(matches!(coact_graphs(&g, &f, &shape), Err(Error::FlavorViolation(_))));
}

#[test]
fn counit() {
    let t2 = alg("T^2");
    let f = Flavor::decorated(FlavorKind::GraphsM, &t2, None).unwrap();
    for g in enumerate_basis(&f, 2, 1, 1) {
        let t = coact_graphs(&g, &f, &CocompositionShape::singletons(2)).unwrap();
        let one = Graph::new(2, 1, 0);
        assert_eq!(t.terms.len(), 1, "{g}");
        let (key, c) = t.terms.iter().next().unwrap();
        assert_eq!(key, &vec![one.clone(), one, g.clone()]);
        assert_eq!(c, &Rational::one());
    }
}
