//! Residual a posteriori indicators.
//!
//! Per element `E` of degree `p` and diameter `h`:
//!
//! * `eta_E = (h/p) |Lap Pi u + Pi^0 f|_{0,E}`;
//! * `eta_e = sqrt(h_e/p_e) |[d_n Pi u]|_{0,e}` on internal edges;
//! * `zeta_E^2 = S((I - Pi) u, (I - Pi) u)`;
//! * `rho_E = (h/p) |f - Pi^0 f|_{0,E}`;
//!
//! combined as `eta_comp,E^2 = eta_E^2 + 1/2 sum_e eta_e^2 + zeta_E^2 + rho_E^2`.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{Discretization, LocalData, LocalStiffness};
use crate::error::{Error, Result};
use crate::polyquad::{poly_laplacian, EdgePoly};
use crate::projectors::LocalOperators;
use crate::scalar::Point;
use crate::vemspace::ElementSpace;

/// `R_E` in the first `dim P_{p-2}` orthonormal members and `eta_E`.
pub fn internal_residual(
    space: &ElementSpace,
    ops: &LocalOperators,
    dofs: &[f64],
    f: impl Fn(Point) -> f64,
) -> Result<(Vec<f64>, f64)> {
    let p = space.degree;
    if p < 2 {
        return Err(Error::InvalidArgument(format!(
            "element {} has degree {p}; the residual indicator needs p >= 2",
            space.element
        )));
    }
    let coef = ops.project(dofs);
    let mono = space.basis.to_monomial(&coef);
    let lap = poly_laplacian(&mono, p, space.basis.monomials.scale);
    let mut r = space.basis.from_monomial(&lap);
    let fm = space.l2_coefficients(&f, r.len());
    r.iter_mut().zip(fm).for_each(|(ri, fi)| *ri += fi);
    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((r, space.diameter / p as f64 * norm))
}

fn gradient(space: &ElementSpace, coef: &[f64], x: Point) -> Point {
    space.basis.eval_grad(x).iter().zip(coef).fold([0.0, 0.0], |g, (q, c)| [g[0] + c * q[0], g[1] + c * q[1]])
}

/// Normal-derivative jump on an internal edge, oriented by the stored normal.
pub fn edge_residual(disc: &Discretization, edge: usize, u: &[f64]) -> Result<(EdgePoly, f64)> {
    let e = &disc.mesh.edges[edge];
    let (Some(plus), Some(minus)) = (e.plus, e.minus) else {
        return Err(Error::InvalidArgument(format!("edge {edge} lies on the boundary")));
    };
    let side = |k: usize| {
        let l = &disc.locals[k];
        (l, l.ops.project(&disc.local_dofs(k, u)))
    };
    let (lp, cp) = side(plus);
    let (lm, cm) = side(minus);
    let pe = disc.deg.edge[edge];
    let n = e.unit_normal;
    let (a, b) = (disc.mesh.vertices[e.v0], disc.mesh.vertices[e.v1]);
    let jump = EdgePoly::fit(a, b, pe.saturating_sub(1), |x| {
        let gp = gradient(&lp.space, &cp, x);
        let gm = gradient(&lm.space, &cm, x);
        (gp[0] - gm[0]) * n[0] + (gp[1] - gm[1]) * n[1]
    });
    let norm2 = jump.norm2_squared().max(0.0);
    Ok((jump, (e.length / pe as f64 * norm2).sqrt()))
}

/// `zeta_E` from the D-recipe form.
pub fn stab_term(ops: &LocalOperators, stiffness: &LocalStiffness, dofs: &[f64]) -> f64 {
    let d = DVector::from_column_slice(dofs);
    let r = &d - &ops.pinabla_dof * &d;
    r.iter().zip(stiffness.stab_diag.iter()).map(|(ri, si)| si * ri * ri).sum::<f64>().sqrt()
}

/// `rho_E = (h/p) |f - Pi^0_{p-2} f|`.
pub fn data_oscillation(space: &ElementSpace, f: impl Fn(Point) -> f64) -> f64 {
    let m = space.n_moments();
    let fm = space.l2_coefficients(&f, m);
    let mut s = 0.0;
    for (&x, &w) in space.quad.points.iter().zip(&space.quad.weights) {
        let q = space.basis.eval(x);
        let proj: f64 = fm.iter().zip(&q).map(|(c, q)| c * q).sum();
        let d = f(x) - proj;
        s += w * d * d;
    }
    space.diameter / space.degree as f64 * s.sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub eta_elem: Vec<f64>,
    /// `eta_e` per mesh edge; zero on boundary edges.
    pub eta_edge: Vec<f64>,
    pub zeta: Vec<f64>,
    pub rho: Vec<f64>,
    /// `1/2 sum eta_e^2` over the internal edges of each element.
    pub edge_share: Vec<f64>,
    pub eta2_p: Vec<f64>,
    pub eta2_comp_elem: Vec<f64>,
    pub eta2_comp: f64,
    pub eta2_mean: f64,
}

/// One CSV row of the per-element report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementRow {
    pub element: usize,
    pub h: f64,
    pub p: usize,
    pub eta_e: f64,
    pub edge_share: f64,
    pub zeta: f64,
    pub rho: f64,
    pub eta2_comp: f64,
}

impl EstimatorReport {
    pub fn eta_comp(&self) -> f64 {
        self.eta2_comp.sqrt()
    }

    pub fn rows(&self, disc: &Discretization) -> Vec<ElementRow> {
        (0..self.eta_elem.len())
            .map(|e| ElementRow {
                element: e,
                h: disc.mesh.elements[e].diameter,
                p: disc.deg.elem[e],
                eta_e: self.eta_elem[e],
                edge_share: self.edge_share[e],
                zeta: self.zeta[e],
                rho: self.rho[e],
                eta2_comp: self.eta2_comp_elem[e],
            })
            .collect()
    }
}

pub fn report(disc: &Discretization, u: &[f64], f: impl Fn(Point) -> f64 + Sync) -> Result<EstimatorReport> {
    let ne = disc.mesh.n_elements();
    let per_elem: Vec<(f64, f64, f64)> = disc
        .locals
        .par_iter()
        .enumerate()
        .map(|(e, l): (usize, &LocalData)| {
            let d = disc.local_dofs(e, u);
            let (_, eta) = internal_residual(&l.space, &l.ops, &d, &f)?;
            let zeta = stab_term(&l.ops, &l.stiffness, &d);
            let rho = data_oscillation(&l.space, &f);
            Ok((eta, zeta, rho))
        })
        .collect::<Result<_>>()?;
    let eta_edge: Vec<f64> = (0..disc.mesh.n_edges())
        .into_par_iter()
        .map(|k| if disc.mesh.edges[k].is_boundary() { Ok(0.0) } else { edge_residual(disc, k, u).map(|(_, v)| v) })
        .collect::<Result<_>>()?;
    let mut edge_share = vec![0.0; ne];
    for (k, e) in disc.mesh.edges.iter().enumerate() {
        if let (Some(a), Some(b)) = (e.plus, e.minus) {
            let half = 0.5 * eta_edge[k] * eta_edge[k];
            edge_share[a] += half;
            edge_share[b] += half;
        }
    }
    let eta_elem: Vec<f64> = per_elem.iter().map(|t| t.0).collect();
    let zeta: Vec<f64> = per_elem.iter().map(|t| t.1).collect();
    let rho: Vec<f64> = per_elem.iter().map(|t| t.2).collect();
    let eta2_p: Vec<f64> = (0..ne).map(|e| eta_elem[e].powi(2) + edge_share[e]).collect();
    let eta2_comp_elem: Vec<f64> = (0..ne).map(|e| eta2_p[e] + zeta[e].powi(2) + rho[e].powi(2)).collect();
    let eta2_comp: f64 = eta2_comp_elem.iter().sum();
    Ok(EstimatorReport {
        eta_elem,
        eta_edge,
        zeta,
        rho,
        edge_share,
        eta2_p,
        eta2_mean: eta2_comp / ne as f64,
        eta2_comp_elem,
        eta2_comp,
    })
}
