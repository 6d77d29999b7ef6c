use std::collections::BTreeSet;

use confgraph::complex::{d2_defects, d_graphs, enumerate_basis, Flavor, FlavorKind};
use confgraph::{Dec, Graph, PDAlgebra};
use proptest::prelude::*;

const ALGEBRAS: [&str; 4] = ["S^2", "T^2", "S^3", "CP^2"];

fn raw_graph() -> impl Strategy<Value = (usize, Graph)> {
    (0..ALGEBRAS.len(), 1u8..=3, 0u8..=2).prop_flat_map(|(ai, n_ext, n_int)| {
        let alg = PDAlgebra::builtin(ALGEBRAS[ai]).unwrap();
        let classes = alg.class_degrees();
        let nv = n_ext + n_int;
        let dim = alg.dim as u8;
        (
            prop::collection::vec((0..nv, 0..nv), 0..5),
            prop::collection::vec((0..nv, 0..classes.len() as u8), 0..3),
        )
            .prop_map(move |(edges, decs)| {
                let g = Graph {
                    dim,
                    n_ext,
                    n_int,
                    edges,
                    decs: decs
                        .into_iter()
                        .map(|(vertex, class)| Dec {
                            vertex,
                            class,
                            degree: classes[class as usize],
                        })
                        .collect(),
                };
                (ai, g)
            })
    })
}

fn inverse(p: &[u8]) -> Vec<u8> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x as usize] = i as u8;
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_idempotent((_, g) in raw_graph()) {
        if let Some((h, _)) = g.canonicalize() {
            prop_assert_eq!(h.canonicalize(), Some((h.clone(), 1)));
            prop_assert_eq!(h.degree(), g.degree());
            prop_assert_eq!(h.loop_order(), g.loop_order());
        }
    }

    #[test]
    fn relabeling_externals_round_trips((_, g) in raw_graph(), seed in 0usize..6) {
        let n = g.n_ext as usize;
        let mut perm: Vec<u8> = (0..n as u8).collect();
        perm.rotate_left(seed % n);
        if seed % 2 == 1 && n > 1 {
            perm.swap(0, 1);
        }
        match g.canonicalize() {
            None => prop_assert!(g.act_symmetric_group(&perm).is_none()),
            Some((h, s)) => {
                let (h1, s1) = g.act_symmetric_group(&perm).expect("nonzero");
                let (h2, s2) = h1.act_symmetric_group(&inverse(&perm)).expect("nonzero");
                prop_assert_eq!(h2, h);
                prop_assert_eq!(s1 * s2, s);
            }
        }
    }

    #[test]
    fn differential_raises_degree_and_never_loop_order((ai, g) in raw_graph()) {
        let alg = PDAlgebra::builtin(ALGEBRAS[ai]).unwrap();
        let f = Flavor::decorated(FlavorKind::GraphsM, &alg, None).unwrap();
        if let Some((h, _)) = g.canonicalize() {
            if f.admits(&h) {
                for (t, _) in d_graphs(&h, &f).unwrap().iter() {
                    prop_assert_eq!(t.degree(), h.degree() + 1);
                    prop_assert!(t.loop_order() <= h.loop_order(), "{} -> {}", h, t);
                    prop_assert!(f.admits(t));
                }
            }
        }
    }
}

#[test]
fn bases_are_closed_under_relabeling_externals() {
    let alg = PDAlgebra::builtin("T^2").unwrap();
    for kind in [FlavorKind::GraphsM, FlavorKind::Reduced, FlavorKind::Forest] {
        let f = Flavor::decorated(kind, &alg, None).unwrap();
        for p in 0..=3 {
            let basis = enumerate_basis(&f, 3, p, 1);
            let set: BTreeSet<&Graph> = basis.iter().collect();
            for g in &basis {
                for perm in [[1u8, 0, 2], [1, 2, 0]] {
                    if let Some((h, _)) = g.act_symmetric_group(&perm) {
                        assert!(set.contains(&h), "{kind:?} degree {p}: {g} -> {h}");
                    }
                }
            }
        }
    }
}

#[test]
fn d_squared_vanishes_on_small_windows() {
    for name in ["S^2", "T^2", "S^3", "CP^2", "Sigma_2", "S^2xS^3"] {
        let alg = PDAlgebra::builtin(name).unwrap();
        for kind in [FlavorKind::GraphsM, FlavorKind::GraphsMNoTadpole, FlavorKind::Reduced, FlavorKind::Forest] {
            let f = Flavor::decorated(kind, &alg, None).unwrap();
            let (checked, bad) = d2_defects(&f, 2, -1, 1, 1).unwrap();
            assert!(bad.is_empty(), "{name} {kind:?}: {}", bad[0]);
            assert!(checked > 0 || kind == FlavorKind::Forest, "{name} {kind:?}");
        }
    }
    for dim in [2, 3, 4] {
        let (_, bad) = d2_defects(&Flavor::graphs_d(dim), 3, 0, 2 * (dim as i32 - 1), 2).unwrap();
        assert!(bad.is_empty());
    }
}

#[test]
fn literal_round_trip() {
    let alg = PDAlgebra::builtin("T^2").unwrap();
    let text = "graph D=2 ext=2 int=1; edges=(1,3)(2,3)(3,3); dec[1]=a; dec[3]=b; coeff=-2/3";
    let (g, c) = Graph::parse_literal(text, Some(&alg)).unwrap();
    assert_eq!(g.n_int, 1);
    let (h, c2) = Graph::parse_literal(&g.to_literal(&c, Some(&alg)), Some(&alg)).unwrap();
    assert_eq!((h, c2), (g, c));
}

#[test]
fn vanishing_by_symmetry() {
    // two parallel odd edges between the same vertices cancel for D = 2
    let g = Graph {
        dim: 2,
        n_ext: 2,
        n_int: 0,
        edges: vec![(0, 1), (0, 1)],
        decs: vec![],
    };
    assert!(g.canonicalize().is_none());
    let h = Graph { dim: 3, ..g };
    assert!(h.canonicalize().is_some());
}
