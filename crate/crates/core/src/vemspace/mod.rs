//! Degree distribution and global degrees of freedom.
//!
//! Local dofs of an element of degree `p` are: the values at its vertices,
//! the values at the `p_e - 1` interior Gauss-Lobatto nodes of every edge,
//! and the scaled moments `|E|^{-1/2} (v, q_b)` against the first
//! `dim P_{p-2}` members of the element's orthonormal basis.

pub mod cache;
mod local;

pub use local::{ElementSpace, LocalEdge};

use crate::error::{Error, Result};
use crate::mesh::PolyMesh;
use crate::polyquad::point_at;
use crate::scalar::Point;

/// Default bound on neighbouring degree jumps before a warning is emitted.
pub const DEFAULT_DEGREE_JUMP: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeMap {
    pub elem: Vec<usize>,
    pub edge: Vec<usize>,
    /// Max of incident element degrees; diagnostic only.
    pub vertex: Vec<usize>,
}

impl DegreeMap {
    pub fn p_min(&self) -> usize {
        self.elem.iter().copied().min().unwrap_or(0)
    }

    pub fn p_max(&self) -> usize {
        self.elem.iter().copied().max().unwrap_or(0)
    }

    /// Neighbouring element pairs whose degrees differ by more than `bound`.
    pub fn jump_violations(&self, mesh: &PolyMesh, bound: usize) -> Vec<(usize, usize)> {
        mesh.edges
            .iter()
            .filter_map(|e| match (e.plus, e.minus) {
                (Some(a), Some(b)) if self.elem[a].abs_diff(self.elem[b]) > bound => Some((a.min(b), a.max(b))),
                _ => None,
            })
            .collect()
    }
}

/// Derives edge and vertex degrees by the max rules and warns on large
/// neighbouring degree jumps.
pub fn assign_degrees(mesh: &PolyMesh, p_elem: &[usize]) -> Result<DegreeMap> {
    assign_degrees_with_bound(mesh, p_elem, DEFAULT_DEGREE_JUMP)
}

pub fn assign_degrees_with_bound(mesh: &PolyMesh, p_elem: &[usize], bound: usize) -> Result<DegreeMap> {
    if p_elem.len() != mesh.n_elements() {
        return Err(Error::InvalidArgument(format!("{} degrees for {} elements", p_elem.len(), mesh.n_elements())));
    }
    if let Some(e) = p_elem.iter().position(|&p| p == 0) {
        return Err(Error::InvalidArgument(format!("element {e} has degree 0")));
    }
    let edge = mesh.edges.iter().map(|e| e.elements().map(|k| p_elem[k]).max().unwrap_or(1)).collect();
    let mut vertex = vec![1; mesh.n_vertices()];
    for el in &mesh.elements {
        for &v in &el.vertex_loop {
            vertex[v] = vertex[v].max(p_elem[el.id]);
        }
    }
    let map = DegreeMap { elem: p_elem.to_vec(), edge, vertex };
    let violations = map.jump_violations(mesh, bound);
    for &(a, b) in &violations {
        log::debug!(
            "neighbouring elements {a} and {b} have degrees {} and {} (jump above {bound})",
            map.elem[a],
            map.elem[b]
        );
    }
    if let Some(&(a, b)) = violations.iter().max_by_key(|(a, b)| map.elem[*a].abs_diff(map.elem[*b])) {
        log::warn!(
            "{} neighbouring pairs have a degree jump above {bound}, largest {} to {} (elements {a}, {b})",
            violations.len(),
            map.elem[a],
            map.elem[b]
        );
    }
    Ok(map)
}

/// `dim P_{p-2}`.
#[inline]
pub fn n_moments(p: usize) -> usize {
    p * p.saturating_sub(1) / 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub n_dofs: usize,
    pub n_vertex_dofs: usize,
    /// First global id of each edge's interior dofs.
    pub edge_offset: Vec<usize>,
    /// First global id of each element's moments.
    pub moment_offset: Vec<usize>,
    pub is_boundary: Vec<bool>,
    /// Local-to-global map per element.
    pub gather: Vec<Vec<usize>>,
}

impl DofMap {
    pub fn n_free(&self) -> usize {
        self.is_boundary.iter().filter(|b| !**b).count()
    }
}

pub fn build_dofmap(mesh: &PolyMesh, deg: &DegreeMap) -> DofMap {
    let nv = mesh.n_vertices();
    let mut next = nv;
    let mut is_boundary = mesh.boundary_vertex.clone();
    let mut edge_offset = Vec::with_capacity(mesh.n_edges());
    for e in &mesh.edges {
        edge_offset.push(next);
        let k = deg.edge[e.id] - 1;
        next += k;
        is_boundary.extend(std::iter::repeat_n(e.is_boundary(), k));
    }
    let mut moment_offset = Vec::with_capacity(mesh.n_elements());
    for el in &mesh.elements {
        moment_offset.push(next);
        let k = n_moments(deg.elem[el.id]);
        next += k;
        is_boundary.extend(std::iter::repeat_n(false, k));
    }
    let gather = mesh
        .elements
        .iter()
        .map(|el| {
            let mut g: Vec<usize> = el.vertex_loop.clone();
            for (i, &eid) in el.edge_loop.iter().enumerate() {
                let k = deg.edge[eid] - 1;
                let off = edge_offset[eid];
                if el.edge_forward[i] {
                    g.extend(off..off + k);
                } else {
                    g.extend((off..off + k).rev());
                }
            }
            let off = moment_offset[el.id];
            g.extend(off..off + n_moments(deg.elem[el.id]));
            g
        })
        .collect();
    DofMap { n_dofs: next, n_vertex_dofs: nv, edge_offset, moment_offset, is_boundary, gather }
}

/// Prescribed values of the boundary dofs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
}

impl BoundaryData {
    /// Dense vector with the prescribed values and zeros elsewhere.
    pub fn lift(&self, n_dofs: usize) -> Vec<f64> {
        let mut u = vec![0.0; n_dofs];
        for (&d, &v) in self.dofs.iter().zip(&self.values) {
            u[d] = v;
        }
        u
    }
}

/// Gauss-Lobatto interpolation of `g` on the boundary.
pub fn interpolate_boundary(
    g: impl Fn(Point) -> f64,
    mesh: &PolyMesh,
    deg: &DegreeMap,
    dofmap: &DofMap,
) -> Result<BoundaryData> {
    let mut dofs = Vec::new();
    let mut values = Vec::new();
    for v in (0..mesh.n_vertices()).filter(|&v| mesh.boundary_vertex[v]) {
        dofs.push(v);
        values.push(g(mesh.vertices[v]));
    }
    for e in mesh.edges.iter().filter(|e| e.is_boundary()) {
        let rule = cache::lobatto(deg.edge[e.id]);
        let (a, b) = (mesh.vertices[e.v0], mesh.vertices[e.v1]);
        for (k, &t) in rule.interior().iter().enumerate() {
            dofs.push(dofmap.edge_offset[e.id] + k);
            values.push(g(point_at(a, b, t)));
        }
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("boundary value at dof {} is not finite", dofs[i])));
    }
    Ok(BoundaryData { dofs, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, Rect};

    #[test]
    fn max_rule_on_shared_edge() {
        let m = build_cartesian(2, 1, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        let d = assign_degrees(&m, &[2, 4]).unwrap();
        let shared = m.edges.iter().find(|e| !e.is_boundary()).unwrap();
        assert_eq!(d.edge[shared.id], 4);
        for e in m.edges.iter().filter(|e| e.is_boundary()) {
            assert_eq!(d.edge[e.id], d.elem[e.elements().next().unwrap()]);
        }
    }

    #[test]
    fn uniform_degree() {
        let m = build_cartesian(3, 3, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[3; 9]).unwrap();
        assert!(d.edge.iter().all(|&p| p == 3));
        assert!(d.vertex.iter().all(|&p| p == 3));
    }

    #[test]
    fn vertex_takes_max_of_incident() {
        let m = build_cartesian(2, 2, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[2, 3, 4, 2]).unwrap();
        let center = m.vertices.iter().position(|p| *p == [0.5, 0.5]).unwrap();
        assert_eq!(d.vertex[center], 4);
        assert!(d.jump_violations(&m, 2).is_empty());
        assert_eq!(d.jump_violations(&m, 1), vec![(0, 2), (2, 3)]);
    }

    #[test]
    fn zero_degree_rejected() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        assert!(assign_degrees(&m, &[0]).is_err());
    }

    #[test]
    fn counting_examples() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[2]).unwrap();
        let dm = build_dofmap(&m, &d);
        assert_eq!(dm.gather[0].len(), 9);

        let m = build_cartesian(2, 2, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[1; 4]).unwrap();
        let dm = build_dofmap(&m, &d);
        assert_eq!(dm.n_dofs, 9);
        assert_eq!(dm.n_free(), 1);

        let pent: Vec<Point> = (0..5)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let m = PolyMesh::from_loops(pent, vec![(0..5).collect()]).unwrap();
        let d = assign_degrees(&m, &[3]).unwrap();
        assert_eq!(build_dofmap(&m, &d).gather[0].len(), 18);
    }

    #[test]
    fn shared_edge_dofs_agree() {
        let m = build_cartesian(3, 2, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[2, 5, 3, 4, 2, 6]).unwrap();
        let dm = build_dofmap(&m, &d);
        let total: usize = m.n_vertices()
            + d.edge.iter().map(|p| p - 1).sum::<usize>()
            + d.elem.iter().map(|&p| n_moments(p)).sum::<usize>();
        assert_eq!(dm.n_dofs, total);
        for e in m.edges.iter().filter(|e| !e.is_boundary()) {
            let ids = |el: usize| -> Vec<usize> {
                let elem = &m.elements[el];
                let n = elem.n_vertices();
                let mut off = n;
                for (i, &eid) in elem.edge_loop.iter().enumerate() {
                    let k = d.edge[eid] - 1;
                    if eid == e.id {
                        let mut v: Vec<usize> = dm.gather[el][off..off + k].to_vec();
                        if !elem.edge_forward[i] {
                            v.reverse();
                        }
                        return v;
                    }
                    off += k;
                }
                unreachable!()
            };
            assert_eq!(ids(e.plus.unwrap()), ids(e.minus.unwrap()));
        }
    }

    #[test]
    fn boundary_interpolation() {
        let m = build_cartesian(2, 2, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[3; 4]).unwrap();
        let dm = build_dofmap(&m, &d);
        let zero = interpolate_boundary(|_| 0.0, &m, &d, &dm).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        assert_eq!(zero.dofs.len(), dm.is_boundary.iter().filter(|b| **b).count());
        assert!(zero.dofs.iter().all(|&k| dm.is_boundary[k]));
    }

    #[test]
    fn linear_interpolant_midpoint_error() {
        // p_e = 1: only endpoint values, so x^2 on [0, L] is off by L^2/4 at the middle
        let m = build_cartesian(1, 1, Rect::new(0.0, 0.5, 0.0, 1.0)).unwrap();
        let d = assign_degrees(&m, &[1]).unwrap();
        let dm = build_dofmap(&m, &d);
        let bd = interpolate_boundary(|p| p[0] * p[0], &m, &d, &dm).unwrap();
        let u = bd.lift(dm.n_dofs);
        let mid = 0.5 * (u[0] + u[1]);
        let (exact, len) = (0.25f64 * 0.25, 0.5f64);
        assert!((mid - exact - len * len / 4.0).abs() < 1e-15);
    }
}
