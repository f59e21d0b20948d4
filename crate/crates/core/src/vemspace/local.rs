//! Per-element view of the virtual element space.

use std::sync::Arc;

use super::{cache, n_moments, DegreeMap};
use crate::error::Result;
use crate::mesh::PolyMesh;
use crate::polyquad::{self, orthonormalize, point_at, GaussLobattoRule, MonomialBasis, OrthoBasis, QuadRule};
use crate::scalar::Point;

/// Extra quadrature order on top of `2p` used for element integrals.
pub const QUAD_EXTRA: usize = 4;

/// One mesh edge as seen from the element, traversed counterclockwise.
#[derive(Clone, Debug)]
pub struct LocalEdge {
    pub mesh_edge: usize,
    pub a: Point,
    pub b: Point,
    pub degree: usize,
    pub length: f64,
    /// Outward unit normal of the element.
    pub normal: Point,
    pub lobatto: Arc<GaussLobattoRule>,
}

impl LocalEdge {
    /// Interior Gauss-Lobatto nodes from `a` to `b`.
    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        self.lobatto.interior().iter().map(|&t| point_at(self.a, self.b, t))
    }
}

#[derive(Clone, Debug)]
pub struct ElementSpace {
    pub element: usize,
    pub degree: usize,
    pub points: Vec<Point>,
    pub edges: Vec<LocalEdge>,
    pub area: f64,
    pub diameter: f64,
    pub barycenter: Point,
    /// Orthonormal basis of `P_p(E)`.
    pub basis: OrthoBasis,
    /// Element rule of order `2p + QUAD_EXTRA` on the barycentric fan.
    pub quad: QuadRule,
    edge_offset: Vec<usize>,
    n_dofs: usize,
}

impl ElementSpace {
    pub fn new(mesh: &PolyMesh, deg: &DegreeMap, e: usize) -> Result<Self> {
        let el = &mesh.elements[e];
        let p = deg.elem[e];
        let points = mesh.element_points(e);
        let n = points.len();
        let mut edges = Vec::with_capacity(n);
        let mut edge_offset = Vec::with_capacity(n);
        let mut off = n;
        for i in 0..n {
            let eid = el.edge_loop[i];
            let me = &mesh.edges[eid];
            let pe = deg.edge[eid];
            let sign = if el.edge_forward[i] { 1.0 } else { -1.0 };
            edges.push(LocalEdge {
                mesh_edge: eid,
                a: points[i],
                b: points[(i + 1) % n],
                degree: pe,
                length: me.length,
                normal: [sign * me.unit_normal[0], sign * me.unit_normal[1]],
                lobatto: cache::lobatto(pe),
            });
            edge_offset.push(off);
            off += pe - 1;
        }
        let n_dofs = off + n_moments(p);
        let reference = cache::triangle(2 * p + QUAD_EXTRA);
        let mut quad = QuadRule { points: Vec::new(), weights: Vec::new(), order: reference.order };
        for [s, a, b] in polyquad::fan_triangles(&points, el.barycenter)? {
            let m = polyquad::map_triangle(&reference, s, a, b);
            quad.points.extend(m.points);
            quad.weights.extend(m.weights);
        }
        let monomials = MonomialBasis::new(p, el.barycenter, el.diameter);
        let basis = orthonormalize(&monomials, &quad)?;
        Ok(Self {
            element: e,
            degree: p,
            points,
            edges,
            area: el.area,
            diameter: el.diameter,
            barycenter: el.barycenter,
            basis,
            quad,
            edge_offset,
            n_dofs,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn n_moments(&self) -> usize {
        n_moments(self.degree)
    }

    pub fn moment_offset(&self) -> usize {
        self.n_dofs - self.n_moments()
    }

    /// `dim P_p`.
    pub fn n_poly(&self) -> usize {
        self.basis.len()
    }

    /// Local dof indices of the full Gauss-Lobatto trace of edge `i`, from `a` to `b`.
    pub fn edge_trace_dofs(&self, i: usize) -> Vec<usize> {
        let n = self.n_vertices();
        let k = self.edges[i].degree - 1;
        let mut out = Vec::with_capacity(k + 2);
        out.push(i);
        out.extend(self.edge_offset[i]..self.edge_offset[i] + k);
        out.push((i + 1) % n);
        out
    }

    /// Perimeter of the element.
    pub fn perimeter(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Dofs of a smooth function: point values and scaled moments by quadrature.
    pub fn dofs_of(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.n_dofs);
        d.extend(self.points.iter().map(|&x| f(x)));
        for e in &self.edges {
            d.extend(e.nodes().map(&f));
        }
        d.extend(self.moments_of(&f));
        d
    }

    /// `|E|^{-1/2} (f, q_b)` for the moment members `q_b`.
    pub fn moments_of(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let nm = self.n_moments();
        let mut m = vec![0.0; nm];
        if nm == 0 {
            return m;
        }
        for (&x, &w) in self.quad.points.iter().zip(&self.quad.weights) {
            let fx = f(x) * w;
            let q = self.basis.eval(x);
            for (mb, qb) in m.iter_mut().zip(&q[..nm]) {
                *mb += fx * qb;
            }
        }
        let s = self.area.sqrt().recip();
        m.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `(f, q_b)` for every basis member.
    pub fn l2_coefficients(&self, f: impl Fn(Point) -> f64, count: usize) -> Vec<f64> {
        let mut m = vec![0.0; count];
        for (&x, &w) in self.quad.points.iter().zip(&self.quad.weights) {
            let fx = f(x) * w;
            let q = self.basis.eval(x);
            for (mb, qb) in m.iter_mut().zip(&q[..count]) {
                *mb += fx * qb;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, Rect};
    use crate::vemspace::{assign_degrees, build_dofmap};

    #[test]
    fn layout_matches_gather() {
        let m = build_cartesian(2, 1, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        let d = assign_degrees(&m, &[2, 4]).unwrap();
        let dm = build_dofmap(&m, &d);
        for e in 0..2 {
            let s = ElementSpace::new(&m, &d, e).unwrap();
            assert_eq!(s.n_dofs(), dm.gather[e].len());
        }
        // left square sees the degree-4 shared edge
        let s = ElementSpace::new(&m, &d, 0).unwrap();
        assert_eq!(s.n_dofs(), 4 + 1 + 3 + 1 + 1 + 1);
    }

    #[test]
    fn constant_dofs() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[3]).unwrap();
        let s = ElementSpace::new(&m, &d, 0).unwrap();
        let dofs = s.dofs_of(|_| 1.0);
        // q_0 = |E|^{-1/2}, so the first moment of 1 is 1
        assert!((dofs[s.moment_offset()] - 1.0).abs() < 1e-14);
        assert!(dofs[s.moment_offset() + 1..].iter().all(|v| v.abs() < 1e-14));
        assert!(dofs[..s.moment_offset()].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn outward_normals() {
        let m = build_cartesian(2, 2, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[2; 4]).unwrap();
        for e in 0..4 {
            let s = ElementSpace::new(&m, &d, e).unwrap();
            for edge in &s.edges {
                let mid = [0.5 * (edge.a[0] + edge.b[0]), 0.5 * (edge.a[1] + edge.b[1])];
                let out = [mid[0] - s.barycenter[0], mid[1] - s.barycenter[1]];
                assert!(out[0] * edge.normal[0] + out[1] * edge.normal[1] > 0.0);
            }
        }
    }
}
