//! JSON mesh files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PolyMesh;
use crate::error::{Error, Result};
use crate::scalar::Point;

/// On-disk mesh: vertex coordinates, counterclockwise element loops, the
/// boundary vertex ids and, optionally, one polynomial degree per element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub vertices: Vec<Point>,
    pub elements: Vec<Vec<usize>>,
    pub boundary_vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<u32>>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &PolyMesh, degrees: Option<&[u32]>) -> Self {
        Self {
            vertices: mesh.vertices.clone(),
            elements: mesh.elements.iter().map(|e| e.vertex_loop.clone()).collect(),
            boundary_vertices: (0..mesh.n_vertices()).filter(|&v| mesh.boundary_vertex[v]).collect(),
            degrees: degrees.map(<[u32]>::to_vec),
        }
    }

    /// Builds the mesh and checks the stored boundary list against it.
    pub fn to_mesh(&self) -> Result<PolyMesh> {
        let mesh = PolyMesh::from_loops(self.vertices.clone(), self.elements.clone())?;
        let mut listed = vec![false; mesh.n_vertices()];
        for &v in &self.boundary_vertices {
            if v >= mesh.n_vertices() {
                return Err(Error::Topology(format!("boundary vertex {v} does not exist")));
            }
            listed[v] = true;
        }
        if let Some(v) = (0..mesh.n_vertices()).find(|&v| listed[v] != mesh.boundary_vertex[v]) {
            return Err(Error::Topology(format!("boundary_vertices disagrees with mesh topology at vertex {v}")));
        }
        if let Some(d) = &self.degrees {
            if d.len() != mesh.n_elements() {
                return Err(Error::InvalidArgument(format!(
                    "{} degrees given for {} elements",
                    d.len(),
                    mesh.n_elements()
                )));
            }
            if d.contains(&0) {
                return Err(Error::InvalidArgument("element degrees must be at least 1".into()));
            }
        }
        Ok(mesh)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
