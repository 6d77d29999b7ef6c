use confgraph::bv::*;
use confgraph::complex::{betti, d_graphs, enumerate_basis, Flavor, FlavorKind};
use confgraph::{GraphSum, PDAlgebra, Rational};

fn alg(name: &str) -> PDAlgebra {
    PDAlgebra::builtin(name).unwrap()
}

fn collect(terms: Vec<(confgraph::Graph, Rational)>) -> GraphSum {
    let mut s = GraphSum::new();
    for (g, c) in terms {
        s.add_raw(&g, &c);
    }
    s
}

#[test]
fn tadpoles_only_on_framed_slots() {
    let f = BVFlavor::new(&alg("T^2"), 1, 1, None).unwrap();
    for p in 0..=3 {
        for g in enumerate_basis(&f.flavor, f.n_ext(), p, 1) {
            for &(a, b) in &g.edges {
                assert!(a != b || a == 0, "{g}");
            }
        }
    }
    assert!(BVFlavor::new(&alg("S^3"), 1, 0, None).is_err());
}

#[test]
fn removing_an_inserted_tadpole_is_the_identity() {
    let f = BVFlavor::new(&alg("Sigma_2"), 1, 1, None).unwrap();
    for p in 0..=2 {
        for g in enumerate_basis(&f.flavor, 2, p, 1) {
            if g.edges.contains(&(0, 0)) {
                continue;
            }
            for (h, c) in insert_tadpole(&g, 0) {
                let back = collect(remove_tadpole(&h, 0).into_iter().map(|(k, d)| (k, d * &c)).collect());
                assert_eq!(back, GraphSum::single(&g), "{g}");
            }
        }
    }
}

#[test]
fn euler_operator_is_a_chain_map() {
    for name in ["T^2", "Sigma_2"] {
        let a = alg(name);
        let f = BVFlavor::new(&a, 1, 1, None).unwrap();
        let e = EulerOperator::new(&a, 1).unwrap();
        for p in 0..=1 {
            for g in enumerate_basis(&f.flavor, 2, p, 1) {
                let mut lhs = GraphSum::new();
                for (h, c) in e.apply(&g) {
                    if let Some((k, s)) = h.canonicalize() {
                        lhs.add_sum(&d_graphs(&k, &f.flavor).unwrap(), &(c * Rational::from_integer(s.into())));
                    }
                }
                let mut rhs = GraphSum::new();
                for (h, c) in d_graphs(&g, &f.flavor).unwrap().iter() {
                    for (k, x) in e.apply(h) {
                        rhs.add_raw(&k, &(x * c));
                    }
                }
                assert_eq!(lhs, rhs, "{name}: {g}");
            }
        }
    }
}

#[test]
fn one_framed_point_on_the_torus() {
    let (t, _) = bv_betti(&alg("T^2"), 1, 0, 3, 1, 2).unwrap();
    assert_eq!(t.betti, vec![1, 3, 3, 1]);
}

#[test]
fn no_framed_points_is_the_tadpole_free_complex() {
    let a = alg("T^2");
    let f = BVFlavor::new(&a, 0, 1, None).unwrap();
    let (x, _) = betti(&f.flavor, 1, 0, 2, 1, 2).unwrap();
    let g = Flavor::decorated(FlavorKind::GraphsMNoTadpole, &a, None).unwrap();
    let (y, _) = betti(&g, 1, 0, 2, 1, 2).unwrap();
    assert_eq!(x.betti, y.betti);
    assert_eq!(x.betti, vec![1, 2, 1]);
}

#[test]
fn sequence_is_exact_and_breaks_without_the_euler_class() {
    let a = alg("T^2");
    let r = les_check(&a, 0, 1, 0, 2, 1, 2).unwrap();
    assert!(r.exact_where_stabilized());
    let s = alg("Sigma_2");
    let fault = LesFault { zero_euler: true, zero_differential: false };
    assert!(les_check(&s, 0, 1, 0, 2, 1, 2).unwrap().exact_where_stabilized());
    assert!(les_check_with(&s, 0, 1, 0, 2, 1, 2, fault).unwrap().witness().is_some());
    assert!(les_check(&a, 1, 0, 0, 2, 1, 2).is_err());
}
