//! Barycentric h-refinement.
//!
//! A marked element with `N` straight edges is split into `N`
//! "quadrilaterals" by joining its barycenter to the midpoint of every
//! straight edge. Midpoints landing inside a mesh edge split that edge; the
//! neighbour across it picks the new vertex up as a hanging node.

use std::collections::BTreeMap;

use super::{norm, sub, PolyMesh};
use crate::error::{Error, Result};
use crate::polyquad;
use crate::scalar::Point;

#[derive(Clone, Debug)]
pub struct Refinement {
    pub mesh: PolyMesh,
    /// `children[old_element]` lists the new element ids covering it.
    pub children: Vec<Vec<usize>>,
}

struct SplitPoint {
    /// Parameter along the canonical direction `v0 -> v1`.
    t: f64,
    vertex: usize,
}

pub fn refine_elements(mesh: &PolyMesh, marked: &[usize]) -> Result<Refinement> {
    let mut is_marked = vec![false; mesh.n_elements()];
    for &e in marked {
        if e >= mesh.n_elements() {
            return Err(Error::InvalidArgument(format!("marked element {e} does not exist")));
        }
        is_marked[e] = true;
    }
    for (e, _) in is_marked.iter().enumerate().filter(|(_, &m)| m) {
        let pts = mesh.element_points(e);
        if !mesh.is_convex(e) || polyquad::fan_triangles(&pts, mesh.elements[e].barycenter).is_err() {
            return Err(Error::Geometry(format!("element {e} is not convex and cannot be refined")));
        }
    }

    let mut vertices = mesh.vertices.clone();
    let mut splits: BTreeMap<usize, Vec<SplitPoint>> = BTreeMap::new();
    // midpoint vertex of each straight edge of each marked element
    let mut midpoints: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    for (e, _) in is_marked.iter().enumerate().filter(|(_, &m)| m) {
        let el = &mesh.elements[e];
        let n = el.n_vertices();
        let mut mids = Vec::with_capacity(el.straight_edges.len());
        for se in &el.straight_edges {
            let a = mesh.vertices[el.vertex_loop[se.start]];
            let b = mesh.vertices[el.vertex_loop[(se.start + se.count) % n]];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let len = norm(sub(b, a));
            let tol = 1e-10 * len;
            // existing vertex on the run?
            let existing = (1..se.count)
                .map(|k| el.vertex_loop[(se.start + k) % n])
                .find(|&v| norm(sub(mesh.vertices[v], mid)) <= tol);
            if let Some(v) = existing {
                mids.push(v);
                continue;
            }
            // the mesh edge containing the midpoint
            let dir = sub(b, a);
            let param = |p: Point| ((p[0] - a[0]) * dir[0] + (p[1] - a[1]) * dir[1]) / (len * len);
            let k = (0..se.count)
                .find(|&k| {
                    let q = mesh.vertices[el.vertex_loop[(se.start + k + 1) % n]];
                    param(q) > 0.5
                })
                .ok_or_else(|| Error::Geometry(format!("midpoint of element {e} not located")))?;
            let eid = el.edge_loop[(se.start + k) % n];
            let edge = &mesh.edges[eid];
            let p0 = mesh.vertices[edge.v0];
            let p1 = mesh.vertices[edge.v1];
            let d = sub(p1, p0);
            let t = ((mid[0] - p0[0]) * d[0] + (mid[1] - p0[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
            let list = splits.entry(eid).or_default();
            let v = match list.iter().find(|s| (s.t - t).abs() * edge.length <= tol) {
                Some(s) => s.vertex,
                None => {
                    vertices.push(mid);
                    let v = vertices.len() - 1;
                    list.push(SplitPoint { t, vertex: v });
                    v
                }
            };
            mids.push(v);
        }
        midpoints.insert(e, mids);
    }
    for list in splits.values_mut() {
        list.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    }

    // loops with split points inserted
    let augmented = |e: usize| -> Vec<usize> {
        let el = &mesh.elements[e];
        let n = el.n_vertices();
        let mut lp = Vec::with_capacity(n + 4);
        for i in 0..n {
            lp.push(el.vertex_loop[i]);
            if let Some(list) = splits.get(&el.edge_loop[i]) {
                if el.edge_forward[i] {
                    lp.extend(list.iter().map(|s| s.vertex));
                } else {
                    lp.extend(list.iter().rev().map(|s| s.vertex));
                }
            }
        }
        lp
    };

    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(mesh.n_elements() + marked.len() * 4);
    let mut children = Vec::with_capacity(mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let lp = augmented(e);
        if !is_marked[e] {
            children.push(vec![loops.len()]);
            loops.push(lp);
            continue;
        }
        let el = &mesh.elements[e];
        vertices.push(el.barycenter);
        let center = vertices.len() - 1;
        let mids = &midpoints[&e];
        let m = mids.len();
        let pos = |v: usize| lp.iter().position(|&w| w == v).expect("midpoint in augmented loop");
        let len = lp.len();
        let mut kids = Vec::with_capacity(m);
        for k in 0..m {
            // child around corner k: center, m_{k-1}, ..., corner_k, ..., m_k
            let from = pos(mids[(k + m - 1) % m]);
            let to = pos(mids[k]);
            let mut child = vec![center];
            let mut i = from;
            loop {
                child.push(lp[i]);
                if i == to {
                    break;
                }
                i = (i + 1) % len;
            }
            kids.push(loops.len());
            loops.push(child);
        }
        children.push(kids);
    }

    let new_mesh = PolyMesh::from_loops(vertices, loops)?;
    for (e, kids) in children.iter().enumerate() {
        if !is_marked[e] {
            continue;
        }
        let parent = mesh.elements[e].area;
        let mut sum = 0.0;
        for &c in kids {
            let a = new_mesh.elements[c].area;
            if !(a > 1e-14 * parent) {
                return Err(Error::Geometry(format!("refinement of element {e} produced a zero-area child")));
            }
            sum += a;
        }
        if (sum - parent).abs() > 1e-12 * parent {
            return Err(Error::Geometry(format!("children of element {e} do not cover it")));
        }
    }
    Ok(Refinement { mesh: new_mesh, children })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, validate, Rect};

    #[test]
    fn square_splits_into_four_squares() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let r = refine_elements(&m, &[0]).unwrap();
        assert_eq!(r.mesh.n_elements(), 4);
        for e in &r.mesh.elements {
            assert!((e.area - 0.25).abs() < 1e-15);
            assert_eq!(e.n_vertices(), 4);
        }
        assert_eq!(r.children, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn pentagon_splits_into_five() {
        // the pentagon of the refinement sketch
        let verts = vec![[-1.0, 0.0], [1.0, 0.0], [2.0, 2.0], [0.0, 4.0], [-2.0, 2.0]];
        let m = PolyMesh::from_loops(verts, vec![vec![0, 1, 2, 3, 4]]).unwrap();
        let r = refine_elements(&m, &[0]).unwrap();
        assert_eq!(r.mesh.n_elements(), 5);
        assert!((0..5).all(|e| r.mesh.is_convex(e)));
        assert!((r.mesh.total_area() - m.total_area()).abs() < 1e-12 * m.total_area());
    }

    #[test]
    fn straight_line_with_hanging_nodes_uses_full_midpoint() {
        // square [0,4]^2 whose bottom line holds nodes at 0.25, 0.5, 1, 2
        let verts =
            vec![[0.0, 0.0], [0.25, 0.0], [0.5, 0.0], [1.0, 0.0], [2.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
        let m = PolyMesh::from_loops(verts, vec![(0..8).collect()]).unwrap();
        assert_eq!(m.elements[0].straight_edges.len(), 4);
        let r = refine_elements(&m, &[0]).unwrap();
        assert_eq!(r.mesh.n_elements(), 4);
        // midpoint (2, 0) is an existing vertex; no vertex created on the bottom line
        let bottom_new = r.mesh.vertices[8..].iter().filter(|p| p[1] == 0.0).count();
        assert_eq!(bottom_new, 0);
        for e in &r.mesh.elements {
            assert!((e.area - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn neighbour_gets_hanging_node() {
        let m = build_cartesian(2, 1, Rect::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        let r = refine_elements(&m, &[0]).unwrap();
        assert_eq!(r.mesh.n_elements(), 5);
        let right = &r.mesh.elements[r.children[1][0]];
        assert_eq!(right.n_vertices(), 5);
        assert_eq!(right.straight_edges.len(), 4);
        validate(&r.mesh).unwrap();
        // refining the neighbour now reuses the hanging node as its midpoint
        let r2 = refine_elements(&r.mesh, &[r.children[1][0]]).unwrap();
        assert_eq!(r2.mesh.n_elements(), 8);
        validate(&r2.mesh).unwrap();
    }

    #[test]
    fn nonconvex_rejected() {
        let verts = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, 0.5], [0.0, 2.0]];
        let m = PolyMesh::from_loops(verts, vec![vec![0, 1, 2, 3, 4]]).unwrap();
        assert!(matches!(refine_elements(&m, &[0]), Err(Error::Geometry(_))));
    }
}
