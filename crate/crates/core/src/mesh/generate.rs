//! Structured generators: Cartesian grids and the L-shaped domain.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::PolyMesh;
use crate::error::{Error, Result};
use crate::scalar::Point;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }
}

pub fn build_cartesian(nx: usize, ny: usize, domain: Rect) -> Result<PolyMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!("cartesian mesh needs nx, ny >= 1 (got {nx} x {ny})")));
    }
    if !(domain.x1 > domain.x0 && domain.y1 > domain.y0) {
        return Err(Error::InvalidArgument("empty rectangle".into()));
    }
    let coord = |lo: f64, hi: f64, i: usize, n: usize| {
        if i == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / n as f64
        }
    };
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([coord(domain.x0, domain.x1, i, nx), coord(domain.y0, domain.y1, j, ny)]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut loops = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            loops.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolyMesh::from_loops(vertices, loops)
}

/// Cartesian mesh of `[-1, 1]^2 \ [-1, 0]^2` with `n` squares per unit length.
pub fn build_lshape(n: usize) -> Result<PolyMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("L-shape mesh needs n >= 1".into()));
    }
    let m = 2 * n;
    let coord = |i: usize| -1.0 + i as f64 / n as f64;
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut loops = Vec::new();
    for j in 0..m {
        for i in 0..m {
            if i < n && j < n {
                continue;
            }
            let mut lp = Vec::with_capacity(4);
            for (a, b) in [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)] {
                let v = *index.entry((a, b)).or_insert_with(|| {
                    vertices.push([coord(a), coord(b)]);
                    vertices.len() - 1
                });
                lp.push(v);
            }
            loops.push(lp);
        }
    }
    PolyMesh::from_loops(vertices, loops)
}
