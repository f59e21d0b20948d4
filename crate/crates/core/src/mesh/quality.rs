//! Topological checks and shape diagnostics.

use std::f64::consts::PI;
use std::fmt;

use super::{cross, norm, sub, PolyMesh};
use crate::error::{Error, Result};
use crate::scalar::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct ElementQuality {
    /// Distance from the barycenter to the boundary over `h_E`.
    pub inradius_ratio: f64,
    /// Shortest mesh edge over `h_E`.
    pub min_edge_ratio: f64,
    pub convex: bool,
    /// Largest interior angle in radians.
    pub max_angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshQuality {
    pub elements: Vec<ElementQuality>,
    pub n_hanging: usize,
    pub domain_area: f64,
}

impl MeshQuality {
    pub fn all_convex(&self) -> bool {
        self.elements.iter().all(|q| q.convex)
    }

    pub fn min_edge_ratio(&self) -> f64 {
        self.elements.iter().map(|q| q.min_edge_ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn min_inradius_ratio(&self) -> f64 {
        self.elements.iter().map(|q| q.inradius_ratio).fold(f64::INFINITY, f64::min)
    }

    /// Human-readable warnings (non-fatal).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for (i, q) in self.elements.iter().enumerate() {
            if !q.convex {
                w.push(format!("element {i} is not convex (largest angle {:.6} rad)", q.max_angle));
            }
        }
        w
    }
}

impl fmt::Display for MeshQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elements: {}", self.elements.len())?;
        writeln!(f, "domain area: {:.16e}", self.domain_area)?;
        writeln!(f, "hanging nodes: {}", self.n_hanging)?;
        writeln!(f, "all convex: {}", self.all_convex())?;
        writeln!(f, "min inradius/h: {:.6}", self.min_inradius_ratio())?;
        writeln!(f, "min edge/h: {:.6}", self.min_edge_ratio())?;
        let amax = self.elements.iter().map(|q| q.max_angle).fold(0.0, f64::max);
        writeln!(f, "max interior angle: {:.6}", amax)?;
        for w in self.warnings() {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = sub(b, a);
    let t = ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1]);
    let t = t.clamp(0.0, 1.0);
    norm(sub(p, [a[0] + t * d[0], a[1] + t * d[1]]))
}

/// Checks conformity and incidence, then reports per-element shape data.
///
/// Small edges and nonconvex elements are reported, never rejected.
pub fn validate(mesh: &PolyMesh) -> Result<MeshQuality> {
    // incidence both ways
    for el in &mesh.elements {
        let n = el.vertex_loop.len();
        if el.edge_loop.len() != n {
            return Err(Error::Topology(format!("element {} edge loop length mismatch", el.id)));
        }
        for (i, &eid) in el.edge_loop.iter().enumerate() {
            let e = &mesh.edges[eid];
            let (a, b) = (el.vertex_loop[i], el.vertex_loop[(i + 1) % n]);
            let expected = if el.edge_forward[i] { (e.v0, e.v1) } else { (e.v1, e.v0) };
            if (a, b) != expected {
                return Err(Error::Topology(format!("element {} edge {} orientation flip", el.id, eid)));
            }
            let slot = if el.edge_forward[i] { e.plus } else { e.minus };
            if slot != Some(el.id) {
                return Err(Error::Topology(format!("edge {eid} does not reference element {}", el.id)));
            }
        }
        if !(el.area > 0.0) {
            return Err(Error::Topology(format!("element {} has non-positive area", el.id)));
        }
    }
    for e in &mesh.edges {
        for el in e.elements() {
            if !mesh.elements[el].edge_loop.contains(&e.id) {
                return Err(Error::Topology(format!("edge {} lists element {el} which lacks it", e.id)));
            }
        }
        if e.plus.is_none() && e.minus.is_none() {
            return Err(Error::Topology(format!("dangling edge {}", e.id)));
        }
    }

    // boundary must be closed and free of T-junctions
    let mut bdeg = vec![0usize; mesh.n_vertices()];
    let boundary: Vec<_> = mesh.edges.iter().filter(|e| e.is_boundary()).collect();
    for e in &boundary {
        bdeg[e.v0] += 1;
        bdeg[e.v1] += 1;
    }
    if let Some(v) = bdeg.iter().position(|&d| d % 2 == 1) {
        return Err(Error::Topology(format!("dangling edge: boundary vertex {v} has odd degree")));
    }
    let scale = mesh.elements.iter().map(|e| e.diameter).fold(0.0, f64::max);
    let tol = 1e-10 * scale;
    for e in &boundary {
        let (a, b) = (mesh.vertices[e.v0], mesh.vertices[e.v1]);
        let lo = [a[0].min(b[0]) - tol, a[1].min(b[1]) - tol];
        let hi = [a[0].max(b[0]) + tol, a[1].max(b[1]) + tol];
        for (v, &p) in mesh.vertices.iter().enumerate() {
            if v == e.v0 || v == e.v1 || p[0] < lo[0] || p[0] > hi[0] || p[1] < lo[1] || p[1] > hi[1] {
                continue;
            }
            if bdeg[v] > 0 && point_segment_distance(p, a, b) < tol {
                return Err(Error::Topology(format!(
                    "dangling edge: vertex {v} lies inside edge {} without being one of its endpoints",
                    e.id
                )));
            }
        }
    }

    // union of areas equals the area enclosed by the boundary
    let mut enclosed = 0.0;
    for e in &boundary {
        let (a, b) = if e.plus.is_some() { (e.v0, e.v1) } else { (e.v1, e.v0) };
        enclosed += cross(mesh.vertices[a], mesh.vertices[b]) * 0.5;
    }
    let total = mesh.total_area();
    if (total - enclosed).abs() > 1e-10 * total.abs().max(enclosed.abs()) {
        return Err(Error::Topology(format!("element areas sum to {total} but the boundary encloses {enclosed}")));
    }

    let mut n_hanging = 0;
    let elements = mesh
        .elements
        .iter()
        .map(|el| {
            let pts = mesh.element_points(el.id);
            let n = pts.len();
            n_hanging += n - el.straight_edges.len();
            let h = el.diameter;
            let mut min_edge = f64::INFINITY;
            let mut inr = f64::INFINITY;
            let mut max_angle: f64 = 0.0;
            for i in 0..n {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                min_edge = min_edge.min(norm(sub(b, a)));
                inr = inr.min(point_segment_distance(el.barycenter, a, b));
                let prev = pts[(i + n - 1) % n];
                let u = sub(prev, a);
                let w = sub(b, a);
                // interior angle at a on a counterclockwise loop
                let ang = cross(w, u).atan2(w[0] * u[0] + w[1] * u[1]);
                let ang = if ang < 0.0 { ang + 2.0 * PI } else { ang };
                max_angle = max_angle.max(ang);
            }
            ElementQuality {
                inradius_ratio: inr / h,
                min_edge_ratio: min_edge / h,
                convex: mesh.is_convex(el.id),
                max_angle,
            }
        })
        .collect();
    let n_hanging = n_hanging;
    Ok(MeshQuality { elements, n_hanging, domain_area: enclosed })
}
