//! Clipped, Lloyd-relaxed Voronoi meshes.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{cross, norm, sub, PolyMesh, Rect};
use crate::error::{Error, Result};
use crate::polyquad;
use crate::scalar::Point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VoronoiDomain {
    Rect(Rect),
    /// `[-1, 1]^2 \ [-1, 0]^2`.
    LShape,
}

impl VoronoiDomain {
    fn bbox(&self) -> Rect {
        match self {
            Self::Rect(r) => *r,
            Self::LShape => Rect::new(-1.0, 1.0, -1.0, 1.0),
        }
    }

    fn contains(&self, p: Point) -> bool {
        match self {
            Self::Rect(r) => r.contains(p),
            Self::LShape => Rect::new(-1.0, 1.0, -1.0, 1.0).contains(p) && !(p[0] < 0.0 && p[1] < 0.0),
        }
    }

    /// Nearest point of the domain.
    fn project(&self, p: Point) -> Point {
        let b = self.bbox();
        let q = [p[0].clamp(b.x0, b.x1), p[1].clamp(b.y0, b.y1)];
        match self {
            Self::Rect(_) => q,
            Self::LShape => {
                if q[0] < 0.0 && q[1] < 0.0 {
                    if q[0] > q[1] {
                        [0.0, q[1]]
                    } else {
                        [q[0], 0.0]
                    }
                } else {
                    q
                }
            }
        }
    }
}

/// Sutherland-Hodgman clip of a convex polygon by `{x : (x - o) . n <= 0}`.
fn clip(poly: &[Point], o: Point, nrm: Point) -> Vec<Point> {
    let side = |p: Point| (p[0] - o[0]) * nrm[0] + (p[1] - o[1]) * nrm[1];
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let sa = side(a);
        let sb = side(b);
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn rect_polygon(r: &Rect) -> Vec<Point> {
    vec![[r.x0, r.y0], [r.x1, r.y0], [r.x1, r.y1], [r.x0, r.y1]]
}

fn area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        0.0
    } else {
        polyquad::signed_area(poly)
    }
}

/// Convex pieces of the Voronoi cell of `seeds[i]` inside the domain.
fn cell_pieces(seeds: &[Point], i: usize, domain: &VoronoiDomain, order: &mut Vec<usize>) -> Vec<Vec<Point>> {
    let bbox = domain.bbox();
    let s = seeds[i];
    order.clear();
    order.extend((0..seeds.len()).filter(|&j| j != i));
    let d2 = |j: usize| (seeds[j][0] - s[0]).powi(2) + (seeds[j][1] - s[1]).powi(2);
    order.sort_by(|&a, &b| d2(a).partial_cmp(&d2(b)).unwrap().then(a.cmp(&b)));
    let mut cell = rect_polygon(&bbox);
    for &j in order.iter() {
        let reach = cell.iter().map(|p| norm(sub(*p, s))).fold(0.0, f64::max);
        if d2(j).sqrt() > 2.0 * reach {
            break;
        }
        let t = seeds[j];
        let mid = [0.5 * (s[0] + t[0]), 0.5 * (s[1] + t[1])];
        cell = clip(&cell, mid, sub(t, s));
        if cell.len() < 3 {
            break;
        }
    }
    let whole = area(&cell);
    match domain {
        VoronoiDomain::Rect(_) => vec![cell],
        VoronoiDomain::LShape => {
            let hole = clip(&clip(&cell, [0.0, 0.0], [1.0, 0.0]), [0.0, 0.0], [0.0, 1.0]);
            if area(&hole) <= 1e-14 * whole {
                return vec![cell];
            }
            // split along the ray from the re-entrant corner
            let top = clip(&cell, [0.0, 0.0], [0.0, -1.0]);
            let right = clip(&clip(&cell, [0.0, 0.0], [0.0, 1.0]), [0.0, 0.0], [-1.0, 0.0]);
            [top, right].into_iter().filter(|p| area(p) > 1e-14 * whole).collect()
        }
    }
}

fn all_cells(seeds: &[Point], domain: &VoronoiDomain) -> Vec<Vec<Vec<Point>>> {
    let mut order = Vec::with_capacity(seeds.len());
    (0..seeds.len()).map(|i| cell_pieces(seeds, i, domain, &mut order)).collect()
}

fn pieces_centroid(pieces: &[Vec<Point>]) -> Point {
    let mut a = 0.0;
    let mut c = [0.0, 0.0];
    for p in pieces {
        let ap = area(p);
        let cp = polyquad::centroid(p);
        a += ap;
        c[0] += ap * cp[0];
        c[1] += ap * cp[1];
    }
    [c[0] / a, c[1] / a]
}

fn has_coincident(seeds: &[Point], tol: f64) -> Option<usize> {
    let mut idx: Vec<usize> = (0..seeds.len()).collect();
    idx.sort_by(|&a, &b| seeds[a][0].partial_cmp(&seeds[b][0]).unwrap());
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            if seeds[j][0] - seeds[i][0] > tol {
                break;
            }
            if norm(sub(seeds[i], seeds[j])) <= tol {
                return Some(j);
            }
        }
    }
    None
}

/// Spatial hash used to merge nearly coincident vertices.
struct VertexPool {
    tol: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point>,
}

impl VertexPool {
    fn new(tol: f64) -> Self {
        Self { tol, cells: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p[0] / (4.0 * self.tol)).floor() as i64, (p[1] / (4.0 * self.tol)).floor() as i64)
    }

    fn insert(&mut self, p: Point) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = self.cells.get(&(kx + dx, ky + dy)) {
                    for &v in list {
                        if norm(sub(self.points[v], p)) <= self.tol {
                            return v;
                        }
                    }
                }
            }
        }
        self.points.push(p);
        let v = self.points.len() - 1;
        self.cells.entry((kx, ky)).or_default().push(v);
        v
    }
}

/// Inserts every vertex lying inside an element edge into that element's loop.
fn conformize(points: &[Point], loops: &mut [Vec<usize>], tol: f64) {
    let n_cells = (points.len() as f64).sqrt().ceil().max(1.0) as i64;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        lo = [lo[0].min(p[0]), lo[1].min(p[1])];
        hi = [hi[0].max(p[0]), hi[1].max(p[1])];
    }
    let size = [(hi[0] - lo[0]) / n_cells as f64 + tol, (hi[1] - lo[1]) / n_cells as f64 + tol];
    let key = |p: Point| {
        (
            (((p[0] - lo[0]) / size[0]).floor() as i64).clamp(0, n_cells - 1),
            (((p[1] - lo[1]) / size[1]).floor() as i64).clamp(0, n_cells - 1),
        )
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (v, &p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(v);
    }
    for lp in loops.iter_mut() {
        let n = lp.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (lp[i], lp[(i + 1) % n]);
            out.push(a);
            let (pa, pb) = (points[a], points[b]);
            let d = sub(pb, pa);
            let len2 = d[0] * d[0] + d[1] * d[1];
            let k0 = key([pa[0].min(pb[0]) - tol, pa[1].min(pb[1]) - tol]);
            let k1 = key([pa[0].max(pb[0]) + tol, pa[1].max(pb[1]) + tol]);
            let mut inside: Vec<(f64, usize)> = Vec::new();
            for kx in k0.0..=k1.0 {
                for ky in k0.1..=k1.1 {
                    for &v in grid.get(&(kx, ky)).into_iter().flatten() {
                        if v == a || v == b {
                            continue;
                        }
                        let q = sub(points[v], pa);
                        let t = (q[0] * d[0] + q[1] * d[1]) / len2;
                        if t > 0.0 && t < 1.0 && cross(d, q).abs() / len2.sqrt() <= tol {
                            inside.push((t, v));
                        }
                    }
                }
            }
            inside.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            out.extend(inside.into_iter().map(|(_, v)| v));
        }
        *lp = out;
    }
}

/// Voronoi mesh of `n_seeds` random seeds after `lloyd_iters` centroid updates.
pub fn build_voronoi(n_seeds: usize, lloyd_iters: usize, rng_seed: u64, domain: VoronoiDomain) -> Result<PolyMesh> {
    if n_seeds == 0 {
        return Err(Error::InvalidArgument("Voronoi mesh needs at least one seed".into()));
    }
    let bbox = domain.bbox();
    let diam = (bbox.x1 - bbox.x0).hypot(bbox.y1 - bbox.y0);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let sample = |rng: &mut ChaCha8Rng| loop {
        let p = [rng.random_range(bbox.x0..bbox.x1), rng.random_range(bbox.y0..bbox.y1)];
        if domain.contains(p) {
            break p;
        }
    };
    let mut seeds: Vec<Point> = (0..n_seeds).map(|_| sample(&mut rng)).collect();
    let coincide_tol = 1e-9 * diam;
    let fix_coincident = |seeds: &mut Vec<Point>, rng: &mut ChaCha8Rng| -> Result<()> {
        for _ in 0..16 {
            match has_coincident(seeds, coincide_tol) {
                None => return Ok(()),
                Some(j) => {
                    let jitter = 1e-6 * diam;
                    let p = [
                        seeds[j][0] + rng.random_range(-jitter..jitter),
                        seeds[j][1] + rng.random_range(-jitter..jitter),
                    ];
                    seeds[j] = domain.project(p);
                }
            }
        }
        Err(Error::Geometry("coincident Voronoi seeds persist after perturbation".into()))
    };
    fix_coincident(&mut seeds, &mut rng)?;
    for _ in 0..lloyd_iters {
        let cells = all_cells(&seeds, &domain);
        for (s, pieces) in seeds.iter_mut().zip(&cells) {
            if !pieces.is_empty() {
                *s = domain.project(pieces_centroid(pieces));
            }
        }
        fix_coincident(&mut seeds, &mut rng)?;
    }

    let cells = all_cells(&seeds, &domain);
    let merge_tol = 1e-9 * diam;
    let mut pool = VertexPool::new(merge_tol);
    let mut loops = Vec::new();
    for piece in cells.into_iter().flatten() {
        let mut lp: Vec<usize> = Vec::with_capacity(piece.len());
        for p in piece {
            let v = pool.insert(p);
            if lp.last() != Some(&v) {
                lp.push(v);
            }
        }
        while lp.len() > 1 && lp.first() == lp.last() {
            lp.pop();
        }
        if lp.len() >= 3 {
            loops.push(lp);
        }
    }
    conformize(&pool.points, &mut loops, merge_tol);
    PolyMesh::from_loops(pool.points, loops)
}
