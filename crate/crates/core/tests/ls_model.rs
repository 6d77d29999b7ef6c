use confgraph::complex::{enumerate_basis, Flavor, FlavorKind};
use confgraph::ls::{chain_map_defects, expected_euler, ls_betti, project_graphs_to_f, sbg_polynomial, sbg_violations, LSModel};
use confgraph::{Error, Graph, PDAlgebra};

fn alg(name: &str) -> PDAlgebra {
    PDAlgebra::builtin(name).unwrap()
}

fn pad(mut v: Vec<usize>, len: usize) -> Vec<usize> {
    v.resize(len, 0);
    v
}

/// `b_k(M × M) - b_{k-D}(M)`: the diagonal pushforward is injective, so the
/// Gysin sequence of `M × M ⊃ Δ` splits into short pieces.
fn two_point_oracle(a: &PDAlgebra) -> Vec<usize> {
    let p = a.poincare_polynomial();
    let d = a.dim as usize;
    let mut sq = vec![0usize; 2 * p.len() - 1];
    for (i, x) in p.iter().enumerate() {
        for (j, y) in p.iter().enumerate() {
            sq[i + j] += x * y;
        }
    }
    for (i, x) in p.iter().enumerate() {
        sq[i + d] -= x;
    }
    sq
}

#[test]
fn two_points_on_every_builtin() {
    for name in ["S^2", "T^2", "Sigma_2", "CP^2", "S^3", "S^2xS^3"] {
        let a = alg(name);
        let want = two_point_oracle(&a);
        let t = ls_betti(&a, 2, 0, want.len() as i32 - 1).unwrap();
        assert_eq!(t.betti, want, "{name}");
        assert!(t.all_stabilized());
    }
}

#[test]
fn three_points_on_spheres() {
    // Conf_3(S²) ≃ PSL₂(C); S³ is a group, so Conf_3(S³) ≅ S³ × Conf_2(R³)
    let t = ls_betti(&alg("S^2"), 3, 0, 6).unwrap();
    assert_eq!(t.betti, pad(vec![1, 0, 0, 1], 7));
    let t = ls_betti(&alg("S^3"), 3, 0, 9).unwrap();
    assert_eq!(t.betti, pad(vec![1, 0, 1, 1, 0, 1], 10));
}

#[test]
fn euler_characteristic_is_falling_factorial() {
    for (name, n) in [("S^2", 3u8), ("T^2", 3), ("CP^2", 2), ("Sigma_2", 2), ("S^3", 3), ("S^2xS^3", 2)] {
        let a = alg(name);
        let top = LSModel::new(&a, n).top_degree();
        let t = ls_betti(&a, n, 0, top).unwrap();
        assert_eq!(t.euler_characteristic(), expected_euler(&a, n), "{name} n={n}");
        assert_eq!(t.chain_euler_characteristic(), expected_euler(&a, n), "{name} n={n}");
    }
}

#[test]
fn ideal_is_closed_under_d() {
    for name in ["S^2", "T^2", "Sigma_2", "CP^2", "S^3", "S^2xS^3"] {
        for n in 1..=2 {
            assert!(LSModel::new(&alg(name), n).ideal_closure_defects().is_empty(), "{name} n={n}");
        }
    }
    assert!(LSModel::new(&alg("T^2"), 3).ideal_closure_defects().is_empty());
}

#[test]
fn projection_commutes_with_d() {
    for name in ["S^2", "T^2", "S^3"] {
        for kind in [FlavorKind::GraphsM, FlavorKind::Reduced] {
            let f = Flavor::decorated(kind, &alg(name), None).unwrap();
            for p in -1..=4 {
                let basis = enumerate_basis(&f, 2, p, 1);
                assert!(chain_map_defects(&f, &basis).unwrap().is_empty(), "{name} {kind:?} degree {p}");
            }
        }
    }
}

#[test]
fn projection_rejects_foreign_graphs() {
    let t2 = alg("T^2");
    let g = Graph {
        dim: 3,
        n_ext: 2,
        n_int: 0,
        edges: vec![(0, 1)],
        decs: vec![],
    };
    assert!(matches!(project_graphs_to_f(&g, &t2), Err(Error::AlgebraMismatch(_))));
    let internal = Graph {
        dim: 2,
        n_ext: 2,
        n_int: 1,
        edges: vec![(0, 2), (1, 2)],
        decs: vec![],
    };
    assert!(project_graphs_to_f(&internal, &t2).unwrap().is_empty());
}

#[test]
fn sbg_bounds_betti() {
    assert_eq!(sbg_polynomial(&[1, 0, 1], 2, 2), vec![1, 1, 2, 1, 1]);
    for name in ["S^2", "T^2", "Sigma_2", "CP^2", "S^3", "S^2xS^3"] {
        let a = alg(name);
        for n in 1..=2u8 {
            let t = ls_betti(&a, n, 0, LSModel::new(&a, n).top_degree()).unwrap();
            let bound = sbg_polynomial(&a.poincare_polynomial(), n as u32, a.dim as u32);
            assert!(sbg_violations(&bound, &t).is_empty(), "{name} n={n}");
        }
    }
}
