//! Conforming polygonal meshes.
//!
//! Hanging nodes are ordinary vertices: an element neighbouring a refined
//! one simply carries more vertices in its loop. Collinear runs of mesh
//! edges on an element boundary are grouped into [`StraightEdge`]s, which
//! are the unit of h-refinement.

mod generate;
mod io;
mod quality;
mod refine;
mod voronoi;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::polyquad::{self, QuadRule};
use crate::scalar::Point;

pub use generate::{build_cartesian, build_lshape, Rect};
pub use io::MeshFile;
pub use quality::{validate, ElementQuality, MeshQuality};
pub use refine::{refine_elements, Refinement};
pub use voronoi::{build_voronoi, VoronoiDomain};

/// Angular tolerance (radians) for collinearity of consecutive edges.
pub const COLLINEAR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: usize,
    /// Canonical endpoints, `v0 < v1`.
    pub v0: usize,
    pub v1: usize,
    /// Element traversing the edge from `v0` to `v1`; the normal points out of it.
    pub plus: Option<usize>,
    /// Element traversing the edge from `v1` to `v0`.
    pub minus: Option<usize>,
    /// Unit normal `rot(-90)(x1 - x0) / |x1 - x0|`, fixed at creation.
    pub unit_normal: Point,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.plus.is_none() || self.minus.is_none()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.plus.into_iter().chain(self.minus)
    }
}

/// A maximal collinear run of mesh edges on an element boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StraightEdge {
    /// Loop position of the starting corner.
    pub start: usize,
    /// Number of mesh edges in the run.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub id: usize,
    /// Counterclockwise vertex ids.
    pub vertex_loop: Vec<usize>,
    /// `edge_loop[i]` joins `vertex_loop[i]` and `vertex_loop[i + 1]`.
    pub edge_loop: Vec<usize>,
    /// Whether the loop traverses `edge_loop[i]` from its `v0` to its `v1`.
    pub edge_forward: Vec<bool>,
    pub straight_edges: Vec<StraightEdge>,
    pub diameter: f64,
    pub barycenter: Point,
    pub area: f64,
}

impl Element {
    pub fn n_vertices(&self) -> usize {
        self.vertex_loop.len()
    }

    /// Vertex id of the corner that starts straight edge `k`.
    pub fn corner(&self, k: usize) -> usize {
        self.vertex_loop[self.straight_edges[k].start]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMesh {
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
    pub elements: Vec<Element>,
    pub boundary_vertex: Vec<bool>,
}

/// Fan subtriangulation of an element around its star point.
#[derive(Clone, Debug, PartialEq)]
pub struct SubTriangulation {
    pub parent: usize,
    pub star_point: Point,
    /// Indices into the element's vertices, with `n_vertices` standing for the star point.
    pub triangles: Vec<[usize; 3]>,
    pub areas: Vec<f64>,
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Sine of the turning angle at `b` on the path `a -> b -> c`.
pub(crate) fn turn_sine(a: Point, b: Point, c: Point) -> f64 {
    let u = sub(b, a);
    let v = sub(c, b);
    cross(u, v) / (norm(u) * norm(v))
}

fn is_straight(a: Point, b: Point, c: Point) -> bool {
    let u = sub(b, a);
    let v = sub(c, b);
    turn_sine(a, b, c).abs() <= COLLINEAR_TOL && (u[0] * v[0] + u[1] * v[1]) > 0.0
}

impl PolyMesh {
    /// Builds a mesh from counterclockwise vertex loops.
    pub fn from_loops(vertices: Vec<Point>, loops: Vec<Vec<usize>>) -> Result<Self> {
        let nv = vertices.len();
        if let Some(i) = vertices.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Geometry(format!("vertex {i} has non-finite coordinates")));
        }
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut elements = Vec::with_capacity(loops.len());
        for (eid, lp) in loops.into_iter().enumerate() {
            let n = lp.len();
            if n < 3 {
                return Err(Error::Topology(format!("element {eid} has only {n} vertices")));
            }
            if let Some(&v) = lp.iter().find(|&&v| v >= nv) {
                return Err(Error::Topology(format!("element {eid} references missing vertex {v}")));
            }
            let mut seen = lp.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Topology(format!("element {eid} repeats a vertex")));
            }
            let pts: Vec<Point> = lp.iter().map(|&v| vertices[v]).collect();
            let area = polyquad::signed_area(&pts);
            if !(area > 0.0) {
                return Err(Error::Topology(format!("element {eid} is not counterclockwise (signed area {area})")));
            }
            let mut edge_loop = Vec::with_capacity(n);
            let mut edge_forward = Vec::with_capacity(n);
            for i in 0..n {
                let a = lp[i];
                let b = lp[(i + 1) % n];
                let key = (a.min(b), a.max(b));
                let id = *edge_index.entry(key).or_insert_with(|| {
                    let d = sub(vertices[key.1], vertices[key.0]);
                    let len = norm(d);
                    edges.push(Edge {
                        id: edges.len(),
                        v0: key.0,
                        v1: key.1,
                        plus: None,
                        minus: None,
                        unit_normal: [d[1] / len, -d[0] / len],
                        length: len,
                    });
                    edges.len() - 1
                });
                let forward = a < b;
                let slot = if forward { &mut edges[id].plus } else { &mut edges[id].minus };
                if slot.is_some() {
                    return Err(Error::Topology(format!(
                        "edge ({a}, {b}) traversed twice in the same direction (element {eid})"
                    )));
                }
                *slot = Some(eid);
                edge_loop.push(id);
                edge_forward.push(forward);
            }
            let straight_edges = straight_groups(&pts)?;
            elements.push(Element {
                id: eid,
                barycenter: polyquad::centroid(&pts),
                diameter: polyquad::diameter(&pts),
                vertex_loop: lp,
                edge_loop,
                edge_forward,
                straight_edges,
                area,
            });
        }
        let mut boundary_vertex = vec![false; nv];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[e.v0] = true;
            boundary_vertex[e.v1] = true;
        }
        Ok(Self { vertices, edges, elements, boundary_vertex })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_points(&self, e: usize) -> Vec<Point> {
        self.elements[e].vertex_loop.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    /// True when every vertex of the element turns left or goes straight.
    pub fn is_convex(&self, e: usize) -> bool {
        let p = self.element_points(e);
        let n = p.len();
        (0..n).all(|i| turn_sine(p[(i + n - 1) % n], p[i], p[(i + 1) % n]) >= -COLLINEAR_TOL)
    }

    /// Edges `(loop position, edge id)` of `elem` that are internal to the mesh.
    pub fn internal_edges_of(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.elements[e].edge_loop.iter().copied().filter(|&id| !self.edges[id].is_boundary())
    }

    /// Fan subtriangulation around the barycenter.
    pub fn subtriangulate(&self, e: usize) -> Result<SubTriangulation> {
        let elem = &self.elements[e];
        let pts = self.element_points(e);
        let star = elem.barycenter;
        let tris = polyquad::fan_triangles(&pts, star)?;
        let n = pts.len();
        Ok(SubTriangulation {
            parent: e,
            star_point: star,
            triangles: (0..n).map(|i| [n, i, (i + 1) % n]).collect(),
            areas: tris.iter().map(|[s, a, b]| polyquad::tri_area(*s, *a, *b)).collect(),
        })
    }

    /// Union of mapped triangle rules over [`Self::subtriangulate`].
    pub fn element_quadrature(&self, e: usize, order: usize) -> Result<QuadRule> {
        let pts = self.element_points(e);
        let reference = polyquad::triangle_quadrature::<f64>(order);
        let star = self.elements[e].barycenter;
        let mut rule = QuadRule { points: Vec::new(), weights: Vec::new(), order: reference.order };
        for [s, a, b] in polyquad::fan_triangles(&pts, star)? {
            let m = polyquad::map_triangle(&reference, s, a, b);
            rule.points.extend(m.points);
            rule.weights.extend(m.weights);
        }
        Ok(rule)
    }
}

/// Partition of the loop into maximal collinear runs.
fn straight_groups(pts: &[Point]) -> Result<Vec<StraightEdge>> {
    let n = pts.len();
    let corners: Vec<usize> =
        (0..n).filter(|&i| !is_straight(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n])).collect();
    if corners.len() < 3 {
        return Err(Error::Geometry(format!("polygon has only {} corners", corners.len())));
    }
    let m = corners.len();
    Ok((0..m)
        .map(|k| {
            let s = corners[k];
            let e = corners[(k + 1) % m];
            StraightEdge { start: s, count: (e + n - s) % n }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_with_hanging() -> PolyMesh {
        // unit square whose bottom side carries nodes at 1/4, 1/2, 3/4... only corner element
        let verts = vec![[0.0, 0.0], [0.25, 0.0], [0.5, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        PolyMesh::from_loops(verts, vec![vec![0, 1, 2, 3, 4, 5]]).unwrap()
    }

    #[test]
    fn straight_edges_group_hanging_nodes() {
        let m = square_with_hanging();
        let e = &m.elements[0];
        assert_eq!(e.straight_edges.len(), 4);
        assert_eq!(e.straight_edges[0], StraightEdge { start: 0, count: 3 });
        assert_eq!(e.diameter, 2f64.sqrt());
    }

    #[test]
    fn clockwise_loop_rejected() {
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(PolyMesh::from_loops(verts, vec![vec![0, 2, 1]]).is_err());
    }

    #[test]
    fn normals_unit_and_fixed() {
        let m = build_cartesian(3, 2, Rect::unit()).unwrap();
        for e in &m.edges {
            assert!((norm(e.unit_normal) - 1.0).abs() < 1e-12);
            assert!(e.v0 < e.v1);
            let d = sub(m.vertices[e.v1], m.vertices[e.v0]);
            assert!(cross(d, e.unit_normal) < 0.0);
            if !e.is_boundary() {
                assert_eq!(e.elements().count(), 2);
            }
        }
    }

    #[test]
    fn subtriangulate_square_hexagon_triangle() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let st = m.subtriangulate(0).unwrap();
        assert_eq!(st.triangles.len(), 4);
        assert!(st.areas.iter().all(|a| (a - 0.25).abs() < 1e-15));

        let hex: Vec<Point> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let m = PolyMesh::from_loops(hex, vec![(0..6).collect()]).unwrap();
        let st = m.subtriangulate(0).unwrap();
        assert_eq!(st.triangles.len(), 6);
        for a in &st.areas {
            assert!((a - st.areas[0]).abs() < 1e-14);
        }

        let m = PolyMesh::from_loops(vec![[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]], vec![vec![0, 1, 2]]).unwrap();
        let st = m.subtriangulate(0).unwrap();
        let total: f64 = st.areas.iter().sum();
        assert_eq!(st.triangles.len(), 3);
        assert!((total - m.elements[0].area).abs() < 1e-12 * m.elements[0].area);
    }

    #[test]
    fn element_quadrature_integrates_linear() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let q = m.element_quadrature(0, 2).unwrap();
        assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((q.integrate(|x| x[0]) - 0.5).abs() < 1e-14);
    }
}
