//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use hpvem::assembly::Discretization;
use hpvem::mesh::{build_voronoi, PolyMesh, Rect, VoronoiDomain};
use hpvem::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn single(points: Vec<Point>) -> PolyMesh {
    let n = points.len();
    PolyMesh::from_loops(points, vec![(0..n).collect()]).unwrap()
}

pub fn regular(n: usize, r: f64, c: Point) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64 + 0.3;
            [c[0] + r * t.cos(), c[1] + r * t.sin()]
        })
        .collect()
}

/// Element shapes used by the projector and stiffness suites.
pub fn shapes() -> Vec<(String, Vec<Point>)> {
    let mut out = vec![
        ("square".to_string(), vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
        ("pentagon".to_string(), regular(5, 0.7, [0.2, -0.1])),
        ("hexagon".to_string(), vec![[0.0, 0.0], [1.2, -0.1], [1.9, 0.6], [1.6, 1.4], [0.5, 1.7], [-0.3, 0.9]]),
        ("triangle".to_string(), vec![[0.1, 0.2], [1.3, 0.0], [0.5, 1.1]]),
    ];
    let vor = build_voronoi(16, 10, 7, VoronoiDomain::Rect(Rect::unit())).unwrap();
    for e in [0, 5, 11] {
        out.push((format!("voronoi{e}"), vor.element_points(e)));
    }
    out
}

pub fn scaled(points: &[Point], s: f64, shift: Point) -> Vec<Point> {
    points.iter().map(|p| [s * p[0] + shift[0], s * p[1] + shift[1]]).collect()
}

/// Random polynomial of total degree `p` with monomials about the origin.
pub fn random_poly(p: usize, seed: u64) -> impl Fn(Point) -> f64 + Sync + Clone {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(i32, i32, f64)> = (0..=p)
        .flat_map(|k| (0..=k).map(move |a| (a as i32, (k - a) as i32)))
        .map(|(a, b)| (a, b, rng.random_range(-1.0..1.0)))
        .collect();
    move |x: Point| terms.iter().map(|&(a, b, c)| c * x[0].powi(a) * x[1].powi(b)).sum()
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Linear finite element stiffness of a triangle.
pub fn p1_stiffness(t: [Point; 3]) -> [[f64; 3]; 3] {
    let area = 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]));
    let g: Vec<[f64; 2]> = (0..3)
        .map(|i| {
            let (b, c) = (t[(i + 1) % 3], t[(i + 2) % 3]);
            [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)]
        })
        .collect();
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    k
}

/// Random counterclockwise triangle with bounded aspect ratio.
pub fn random_triangle(rng: &mut ChaCha8Rng) -> [Point; 3] {
    loop {
        let t: Vec<Point> = (0..3).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let area = 0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]));
        let longest = (0..3)
            .map(|i| {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .fold(0.0, f64::max);
        if area.abs() > 0.05 * longest * longest {
            return if area > 0.0 { [t[0], t[1], t[2]] } else { [t[0], t[2], t[1]] };
        }
    }
}

pub fn one_element(points: Vec<Point>, p: usize) -> Discretization {
    Discretization::new(single(points), &[p]).unwrap()
}
