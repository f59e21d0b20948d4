//! Local `Pi^nabla` and `Pi^0` projectors as dof-to-coefficient matrices.
//!
//! Polynomials are expressed in the element's orthonormal basis `q_i`.
//! `Pi^nabla` solves `a(Pi v, q) = a(v, q)` for all `q` in `P_p` together
//! with `int_{dE} (v - Pi v) = 0`; the right-hand side comes from
//! integration by parts, using the moments for `int_E v Lap q` and the
//! Gauss-Lobatto trace of `v` for `int_{dE} v d_n q`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::polyquad::{lagrange_basis, point_at, poly_laplacian};
use crate::vemspace::{cache, ElementSpace};

#[derive(Clone, Debug)]
pub struct LocalOperators {
    pub element: usize,
    pub degree: usize,
    /// `dim P_p x n_dofs`.
    pub pinabla: DMatrix<f64>,
    /// `dim P_{p-2} x n_dofs`.
    pub pizero: DMatrix<f64>,
    /// `Pi^nabla` re-expanded through its dofs, `n_dofs x n_dofs`.
    pub pinabla_dof: DMatrix<f64>,
    /// `G_ij = a(q_i, q_j)`.
    pub grad_gram: DMatrix<f64>,
    /// Dofs of the basis members, `n_dofs x dim P_p`.
    pub basis_dofs: DMatrix<f64>,
    /// `int_{dE} phi_j`.
    pub boundary_integrals: DVector<f64>,
}

/// Gauss-Legendre points for products of a degree-`pe` trace and a degree-`p - 1` derivative.
fn edge_rule_len(pe: usize) -> usize {
    pe + 1
}

pub fn grad_gram(space: &ElementSpace) -> DMatrix<f64> {
    let n = space.n_poly();
    let mut g = DMatrix::zeros(n, n);
    for (&x, &w) in space.quad.points.iter().zip(&space.quad.weights) {
        let gr = space.basis.eval_grad(x);
        for i in 1..n {
            for j in 1..=i {
                g[(i, j)] += w * (gr[i][0] * gr[j][0] + gr[i][1] * gr[j][1]);
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            g[(j, i)] = g[(i, j)];
        }
    }
    g
}

/// Dofs of every orthonormal basis member.
pub fn basis_dofs(space: &ElementSpace) -> DMatrix<f64> {
    let n = space.n_poly();
    let nd = space.n_dofs();
    let mut d = DMatrix::zeros(nd, n);
    let mut row = 0;
    for &x in &space.points {
        d.row_mut(row).copy_from_slice(&space.basis.eval(x));
        row += 1;
    }
    for e in &space.edges {
        for x in e.nodes() {
            d.row_mut(row).copy_from_slice(&space.basis.eval(x));
            row += 1;
        }
    }
    let s = space.area.sqrt().recip();
    for b in 0..space.n_moments() {
        d[(row + b, b)] = s;
    }
    d
}

/// `(B, c, r)`: `B_ij = a(phi_j, q_i)`, `c_i = int_{dE} q_i`, `r_j = int_{dE} phi_j`.
fn pinabla_rhs(space: &ElementSpace) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let n = space.n_poly();
    let nd = space.n_dofs();
    let p = space.degree;
    let mut b = DMatrix::zeros(n, nd);
    let mut c = DVector::zeros(n);
    let mut r = DVector::zeros(nd);

    // -int_E phi_j Lap q_i from the moments
    let mo = space.moment_offset();
    let sqrt_area = space.area.sqrt();
    if space.n_moments() > 0 {
        for i in 0..n {
            let lap = poly_laplacian(space.basis.row(i), p, space.basis.monomials.scale);
            let coef = space.basis.from_monomial(&lap);
            for (beta, cb) in coef.iter().enumerate() {
                b[(i, mo + beta)] -= sqrt_area * cb;
            }
        }
    }

    // int_{dE} phi_j d_n q_i along each edge
    for (k, e) in space.edges.iter().enumerate() {
        let trace = space.edge_trace_dofs(k);
        let gl = cache::legendre(edge_rule_len(e.degree));
        let half = 0.5 * e.length;
        for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
            let x = point_at(e.a, e.b, t);
            let lag = lagrange_basis(&e.lobatto.nodes, t);
            let grads = space.basis.eval_grad(x);
            let vals = space.basis.eval(x);
            for i in 0..n {
                let dn = grads[i][0] * e.normal[0] + grads[i][1] * e.normal[1];
                let wd = w * half * dn;
                for (&j, &l) in trace.iter().zip(&lag) {
                    b[(i, j)] += wd * l;
                }
                c[i] += w * half * vals[i];
            }
        }
        for (&j, &wl) in trace.iter().zip(&e.lobatto.weights) {
            r[j] += half * wl;
        }
    }
    (b, c, r)
}

/// `Pi^nabla` together with the gradient Gram matrix and boundary integrals.
pub fn compute_pinabla(space: &ElementSpace) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)> {
    let n = space.n_poly();
    let nd = space.n_dofs();
    let g = grad_gram(space);
    let (b, c, r) = pinabla_rhs(space);
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(&g);
    for i in 0..n {
        a[(i, n)] = c[i];
        a[(n, i)] = c[i];
    }
    let mut rhs = DMatrix::zeros(n + 1, nd);
    rhs.view_mut((0, 0), (n, nd)).copy_from(&b);
    rhs.row_mut(n).copy_from(&r.transpose());

    let lu = a.clone().lu();
    let diag = lu.u().diagonal();
    let dmax = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dmin = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(dmin > 1e-14 * dmax) {
        return Err(Error::Singular(format!(
            "projector system of element {} is singular (pivot ratio {:e})",
            space.element,
            dmin / dmax
        )));
    }
    let x = lu.solve(&rhs).ok_or_else(|| Error::Singular(format!("projector system of element {}", space.element)))?;
    Ok((x.rows(0, n).into_owned(), g, r))
}

/// `Pi^0_{p-2}`: a read-off of the moments, `Pi^0 v = sum_b |E|^{1/2} dof_b(v) q_b`.
pub fn compute_pizero(space: &ElementSpace) -> DMatrix<f64> {
    let m = space.n_moments();
    let mo = space.moment_offset();
    let mut pz = DMatrix::zeros(m, space.n_dofs());
    let s = space.area.sqrt();
    for b in 0..m {
        pz[(b, mo + b)] = s;
    }
    pz
}

impl LocalOperators {
    pub fn new(space: &ElementSpace) -> Result<Self> {
        let (pinabla, grad_gram, boundary_integrals) = compute_pinabla(space)?;
        let basis_dofs = basis_dofs(space);
        let pinabla_dof = &basis_dofs * &pinabla;
        Ok(Self {
            element: space.element,
            degree: space.degree,
            pizero: compute_pizero(space),
            pinabla,
            pinabla_dof,
            grad_gram,
            basis_dofs,
            boundary_integrals,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.pinabla.ncols()
    }

    /// Orthonormal coefficients of `Pi^nabla v`.
    pub fn project(&self, dofs: &[f64]) -> Vec<f64> {
        (&self.pinabla * DVector::from_column_slice(dofs)).as_slice().to_vec()
    }
}

/// Condition estimate (2-norm) of the augmented projector system.
pub fn projector_condition(space: &ElementSpace) -> f64 {
    let n = space.n_poly();
    let g = grad_gram(space);
    let (_, c, _) = pinabla_rhs(space);
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(&g);
    for i in 0..n {
        a[(i, n)] = c[i];
        a[(n, i)] = c[i];
    }
    let sv = a.singular_values();
    let smax = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    let smin = sv.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    smax / smin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, PolyMesh, Rect};
    use crate::polyquad::exponents;
    use crate::scalar::Point;
    use crate::vemspace::assign_degrees;

    fn single(points: Vec<Point>, p: usize) -> ElementSpace {
        let n = points.len();
        let m = PolyMesh::from_loops(points, vec![(0..n).collect()]).unwrap();
        let d = assign_degrees(&m, &[p]).unwrap();
        ElementSpace::new(&m, &d, 0).unwrap()
    }

    fn hexagon() -> Vec<Point> {
        (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64 + 0.1;
                [0.3 + 0.5 * t.cos(), -0.2 + 0.5 * t.sin()]
            })
            .collect()
    }

    #[test]
    fn reproduces_polynomials() {
        for p in 1..=5 {
            let s = single(hexagon(), p);
            let ops = LocalOperators::new(&s).unwrap();
            for (a, b) in exponents(p) {
                let f = |x: Point| (x[0] - 0.1).powi(a as i32) * (x[1] + 0.3).powi(b as i32);
                let coef = ops.project(&s.dofs_of(f));
                for (&x, _) in s.quad.points.iter().zip(0..7) {
                    let v: f64 = s.basis.eval(x).iter().zip(&coef).map(|(q, c)| q * c).sum();
                    assert!((v - f(x)).abs() < 1e-10, "p={p} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn constant_maps_to_constant() {
        let s = single(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 3);
        let ops = LocalOperators::new(&s).unwrap();
        let coef = ops.project(&s.dofs_of(|_| 1.0));
        assert!((coef[0] - 1.0).abs() < 1e-13);
        assert!(coef[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn pizero_empty_for_p1() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let d = assign_degrees(&m, &[1]).unwrap();
        let s = ElementSpace::new(&m, &d, 0).unwrap();
        let ops = LocalOperators::new(&s).unwrap();
        assert_eq!(ops.pizero.nrows(), 0);
        assert_eq!(ops.pizero.ncols(), 4);
    }

    #[test]
    fn pinabla_dof_idempotent() {
        let s = single(hexagon(), 4);
        let ops = LocalOperators::new(&s).unwrap();
        let p2 = &ops.pinabla_dof * &ops.pinabla_dof;
        assert!((p2 - &ops.pinabla_dof).amax() < 1e-9);
    }
}
