//! Stability and energy diagnostics.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use sprs::{FillInReduction, SymmetryCheck, TriMat};
use sprs_ldl::Ldl;

use super::{local_load, Discretization, LocalData};
use crate::error::{Error, Result};
use crate::polyquad::lagrange_basis;
use crate::scalar::Point;

/// `(a_n(u, u), <f_n, u>)` summed element by element.
pub fn energy_identity(disc: &Discretization, u: &[f64], f: impl Fn(Point) -> f64 + Sync) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = disc
        .locals
        .par_iter()
        .enumerate()
        .map(|(e, l)| {
            let d = DVector::from_vec(disc.local_dofs(e, u));
            let a = d.dot(&(&l.stiffness.k * &d));
            let b = DVector::from_vec(local_load(&l.space, &l.ops, &f));
            (a, b.dot(&d))
        })
        .collect();
    parts.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
}

/// Linear finite elements on a uniformly refined barycentric fan of one element.
struct FineMesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// Per node: `(local VEM dof, weight)` giving its trace value, empty for interior nodes.
    trace: Vec<Vec<(usize, f64)>>,
}

fn fine_mesh(l: &LocalData, levels: usize) -> FineMesh {
    let sp = &l.space;
    let s = sp.barycenter;
    let n = sp.n_vertices();
    let m = 1usize << levels;
    let mut index: HashMap<[u64; 2], usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut trace: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut triangles = Vec::new();
    for k in 0..n {
        let (a, b) = (sp.points[k], sp.points[(k + 1) % n]);
        let edge = &sp.edges[k];
        let dofs = sp.edge_trace_dofs(k);
        let mut id = vec![vec![0usize; m + 1]; m + 1];
        for i in 0..=m {
            for j in 0..=(m - i) {
                let (ci, cj) = (i as f64 / m as f64, j as f64 / m as f64);
                let x =
                    [s[0] + ci * (a[0] - s[0]) + cj * (b[0] - s[0]), s[1] + ci * (a[1] - s[1]) + cj * (b[1] - s[1])];
                let key = [x[0].to_bits(), x[1].to_bits()];
                let v = *index.entry(key).or_insert_with(|| {
                    nodes.push(x);
                    trace.push(Vec::new());
                    nodes.len() - 1
                });
                if i + j == m && trace[v].is_empty() {
                    let t = 2.0 * cj - 1.0;
                    let lag = lagrange_basis(&edge.lobatto.nodes, t);
                    trace[v] = dofs.iter().zip(lag).filter(|(_, w)| w.abs() > 0.0).map(|(&d, w)| (d, w)).collect();
                }
                id[i][j] = v;
            }
        }
        for i in 0..m {
            for j in 0..(m - i) {
                triangles.push([id[i][j], id[i + 1][j], id[i][j + 1]]);
                if i + j + 1 < m {
                    triangles.push([id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]]);
                }
            }
        }
    }
    FineMesh { nodes, triangles, trace }
}

/// Extreme generalized eigenvalues of the VEM local form against the exact
/// energy of the virtual basis functions, on the complement of constants.
///
/// The virtual functions are approximated by linear finite elements on the
/// fan of the element refined `levels` times, so the bounds carry an
/// `O(2^{-levels})` approximation error.
pub fn stability_bounds(l: &LocalData, levels: usize) -> Result<(f64, f64)> {
    let sp = &l.space;
    let nd = sp.n_dofs();
    let nm = sp.n_moments();
    let mo = sp.moment_offset();
    let fm = fine_mesh(l, levels);
    let nn = fm.nodes.len();
    let boundary: Vec<bool> = fm.trace.iter().map(|t| !t.is_empty()).collect();
    let mut free_index = vec![usize::MAX; nn];
    let mut nf = 0;
    for v in 0..nn {
        if !boundary[v] {
            free_index[v] = nf;
            nf += 1;
        }
    }

    let mut kfull = TriMat::new((nn, nn));
    let mut kff = TriMat::new((nf, nf));
    // rows of the moment functionals and P1 loads of q_b
    let mut mom = DMatrix::<f64>::zeros(nm, nn);
    let mut loads = DMatrix::<f64>::zeros(nn, nm);
    let inv_sqrt_area = sp.area.sqrt().recip();
    for t in &fm.triangles {
        let p: Vec<Point> = t.iter().map(|&v| fm.nodes[v]).collect();
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        let grads: Vec<[f64; 2]> = (0..3)
            .map(|i| {
                let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
                [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)]
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let kij = area * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                kfull.add_triplet(t[i], t[j], kij);
                if free_index[t[i]] != usize::MAX && free_index[t[j]] != usize::MAX {
                    kff.add_triplet(free_index[t[i]], free_index[t[j]], kij);
                }
            }
        }
        if nm > 0 {
            // edge-midpoint rule, exact for quadratics
            for k in 0..3 {
                let (a, b) = (k, (k + 1) % 3);
                let mid = [0.5 * (p[a][0] + p[b][0]), 0.5 * (p[a][1] + p[b][1])];
                let q = sp.basis.eval(mid);
                let w = area / 3.0;
                for beta in 0..nm {
                    let c = w * q[beta] * 0.5;
                    for &v in &[t[a], t[b]] {
                        mom[(beta, v)] += c * inv_sqrt_area;
                        loads[(v, beta)] += c;
                    }
                }
            }
        }
    }
    let kfull = kfull.to_csc::<usize>();
    let kff = kff.to_csc::<usize>();
    let ldl = Ldl::new()
        .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
        .check_symmetry(SymmetryCheck::DontCheckSymmetry)
        .numeric(kff.view())
        .map_err(|e| Error::Solver(format!("fine local solve: {e}")))?;

    // harmonic extension: solve K_ff x = -K_fb t
    let extend = |bvals: &[f64], src: Option<&[f64]>| -> Vec<f64> {
        let mut rhs = vec![0.0; nf];
        for (j, col) in kfull.outer_iterator().enumerate() {
            if bvals[j] == 0.0 {
                continue;
            }
            for (i, &v) in col.iter() {
                if free_index[i] != usize::MAX {
                    rhs[free_index[i]] -= v * bvals[j];
                }
            }
        }
        if let Some(s) = src {
            for v in 0..nn {
                if free_index[v] != usize::MAX {
                    rhs[free_index[v]] += s[v];
                }
            }
        }
        let x: Vec<f64> = ldl.solve(&rhs);
        let mut full = bvals.to_vec();
        for v in 0..nn {
            if free_index[v] != usize::MAX {
                full[v] = x[free_index[v]];
            }
        }
        full
    };

    // bubbles w_b with -Lap w_b = q_b
    let zero = vec![0.0; nn];
    let bubbles: Vec<DVector<f64>> =
        (0..nm).map(|b| DVector::from_vec(extend(&zero, Some(loads.column(b).as_slice())))).collect();
    let mut bm = DMatrix::zeros(nm, nm);
    for (b, w) in bubbles.iter().enumerate() {
        bm.set_column(b, &(&mom * w));
    }
    let bm_lu = bm.lu();

    let mut basis = DMatrix::zeros(nn, nd);
    for j in 0..nd {
        let bvals: Vec<f64> =
            fm.trace.iter().map(|t| t.iter().filter(|(d, _)| *d == j).map(|(_, w)| w).sum()).collect();
        let mut v = DVector::from_vec(extend(&bvals, None));
        if nm > 0 {
            let mut target = DVector::zeros(nm);
            if j >= mo {
                target[j - mo] = 1.0;
            }
            let c = bm_lu.solve(&(target - &mom * &v)).ok_or_else(|| Error::Singular("fine moment system".into()))?;
            for (b, w) in bubbles.iter().enumerate() {
                v += w * c[b];
            }
        }
        basis.set_column(j, &v);
    }

    let mut kd = DMatrix::zeros(nn, nn);
    for (j, col) in kfull.outer_iterator().enumerate() {
        for (i, &v) in col.iter() {
            kd[(i, j)] = v;
        }
    }
    let exact = basis.transpose() * kd * &basis;

    let ones = DVector::from_vec(sp.dofs_of(|_| 1.0));
    let mut cols = vec![ones];
    cols.extend((0..nd).map(|i| {
        let mut e = DVector::zeros(nd);
        e[i] = 1.0;
        e
    }));
    let q = DMatrix::from_columns(&cols).qr().q();
    let q = q.columns(1, nd - 1).into_owned();
    let a = q.transpose() * &exact * &q;
    let a = (&a + a.transpose()) * 0.5;
    let k = q.transpose() * &l.stiffness.k * &q;
    let chol = a.cholesky().ok_or_else(|| Error::Singular("exact local energy is not positive definite".into()))?;
    let linv = chol.l().try_inverse().ok_or_else(|| Error::Singular("exact local energy factor".into()))?;
    let m = &linv * k * linv.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen().eigenvalues;
    let lo = eig.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = eig.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, PolyMesh, Rect};

    #[test]
    fn p1_triangle_is_exact() {
        let m = PolyMesh::from_loops(vec![[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]], vec![vec![0, 1, 2]]).unwrap();
        let d = Discretization::new(m, &[1]).unwrap();
        let (lo, hi) = stability_bounds(&d.locals[0], 3).unwrap();
        assert!((lo - 1.0).abs() < 1e-8 && (hi - 1.0).abs() < 1e-8, "{lo} {hi}");
    }

    #[test]
    fn square_bounds_moderate() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        for p in 1..=3 {
            let d = Discretization::new(m.clone(), &[p]).unwrap();
            let (lo, hi) = stability_bounds(&d.locals[0], 4).unwrap();
            assert!(lo > 1e-2 && hi < 1e2, "p={p}: {lo} {hi}");
        }
    }
}
