//! Mesh invariants under repeated random refinement, generation and JSON round trips.

use hpvem::mesh::{
    build_cartesian, build_lshape, build_voronoi, refine_elements, validate, MeshFile, PolyMesh, Rect, VoronoiDomain,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every internal vertex sits only at edge endpoints, and each edge has one or two sides.
fn assert_conforming(m: &PolyMesh) {
    validate(m).unwrap();
    let scale = m.elements.iter().map(|e| e.diameter).fold(0.0, f64::max);
    for e in &m.edges {
        let (a, b) = (m.vertices[e.v0], m.vertices[e.v1]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        for (v, p) in m.vertices.iter().enumerate() {
            if v == e.v0 || v == e.v1 {
                continue;
            }
            let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / (len * len);
            if t <= 0.0 || t >= 1.0 {
                continue;
            }
            let d = ((p[0] - a[0]) * (b[1] - a[1]) - (p[1] - a[1]) * (b[0] - a[0])).abs() / len;
            assert!(d > 1e-10 * scale, "vertex {v} lies inside edge {}", e.id);
        }
    }
}

fn refine_randomly(mut m: PolyMesh, seed: u64, steps: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let area = m.total_area();
    for _ in 0..steps {
        let n = m.n_elements();
        let marked: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
        let marked = if marked.is_empty() { vec![rng.random_range(0..n)] } else { marked };
        let r = refine_elements(&m, &marked).unwrap();
        for (old, kids) in r.children.iter().enumerate() {
            if marked.contains(&old) {
                assert_eq!(kids.len(), m.elements[old].straight_edges.len());
                let a: f64 = kids.iter().map(|&k| r.mesh.elements[k].area).sum();
                assert!((a - m.elements[old].area).abs() < 1e-12 * area, "child areas of {old}");
                assert!(kids.iter().all(|&k| r.mesh.is_convex(k)));
            } else {
                assert_eq!(kids.len(), 1);
            }
        }
        m = r.mesh;
        assert_conforming(&m);
        assert!((m.total_area() - area).abs() < 1e-12 * area);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn voronoi_survives_five_refinements(seed in 0u64..1000, n_seeds in 8usize..40) {
        let m = build_voronoi(n_seeds, 5, seed, VoronoiDomain::Rect(Rect::unit())).unwrap();
        assert_conforming(&m);
        refine_randomly(m, seed ^ 0x5eed, 5);
    }

    #[test]
    fn json_round_trip_is_exact(seed in 0u64..1000) {
        let m = build_voronoi(12, 3, seed, VoronoiDomain::LShape).unwrap();
        let degrees: Vec<u32> = (0..m.n_elements() as u32).map(|k| 2 + k % 5).collect();
        let file = MeshFile::from_mesh(&m, Some(&degrees));
        let back = MeshFile::from_json(&file.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &file);
        let m2 = back.to_mesh().unwrap();
        prop_assert_eq!(m2.vertices, m.vertices);
    }
}

#[test]
fn lshape_refinements_conform() {
    refine_randomly(build_lshape(2).unwrap(), 3, 5);
    refine_randomly(build_cartesian(3, 2, Rect::new(0.0, 3.0, 0.0, 1.0)).unwrap(), 4, 5);
}

#[test]
fn voronoi_lshape_is_valid() {
    let m = build_voronoi(40, 10, 9, VoronoiDomain::LShape).unwrap();
    assert_conforming(&m);
    let q = validate(&m).unwrap();
    assert!(q.all_convex());
    assert!((m.total_area() - 3.0).abs() < 1e-12);
}
