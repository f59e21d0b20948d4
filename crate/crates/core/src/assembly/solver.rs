//! Sparse symmetric positive definite solves.

use serde::{Deserialize, Serialize};
use sprs::{CsMat, FillInReduction, SymmetryCheck};
use sprs_ldl::Ldl;

use super::LinearSystem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// LDL^T with reverse Cuthill-McKee ordering.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub kind: SolverKind,
    /// Relative residual target for CG.
    pub tol: f64,
    /// CG iteration cap; `0` means `10 n + 100`.
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { kind: SolverKind::Direct, tol: 1e-12, max_iter: 0 }
    }
}

fn matvec(a: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    // symmetric, so CSC columns act as rows
    for (j, col) in a.outer_iterator().enumerate() {
        let xj = x[j];
        for (i, &v) in col.iter() {
            y[i] += v * xj;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn direct(a: &CsMat<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let ldl = Ldl::new()
        .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
        .check_symmetry(SymmetryCheck::DontCheckSymmetry)
        .numeric(a.view())
        .map_err(|e| Error::Solver(format!("LDL^T factorization failed: {e}")))?;
    if let Some((i, d)) = ldl.d().iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
        return Err(Error::Solver(format!("matrix is not positive definite (pivot {i} = {d:e})")));
    }
    let mut x: Vec<f64> = ldl.solve(b);
    // one step of iterative refinement
    let mut r = vec![0.0; b.len()];
    matvec(a, &x, &mut r);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let dx: Vec<f64> = ldl.solve(&r);
    x.iter_mut().zip(dx).for_each(|(xi, d)| *xi += d);
    Ok(x)
}

fn cg(a: &CsMat<f64>, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let mut diag = vec![1.0; n];
    for (j, col) in a.outer_iterator().enumerate() {
        if let Some(&v) = col.get(j) {
            if v > 0.0 {
                diag[j] = v;
            } else {
                return Err(Error::Solver(format!("non-positive diagonal entry {j}")));
            }
        }
    }
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        matvec(a, &p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver("CG breakdown: matrix is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver(format!("CG did not reach relative residual {tol:e} in {max_iter} iterations")))
}

/// Solves the free system and returns the full dof vector.
pub fn solve(system: &LinearSystem, opts: &SolveOptions) -> Result<Vec<f64>> {
    let n = system.n_free();
    if n == 0 {
        return Ok(system.lift.clone());
    }
    let x = match opts.kind {
        SolverKind::Direct => direct(&system.matrix, &system.rhs)?,
        SolverKind::Cg => {
            let cap = if opts.max_iter == 0 { 10 * n + 100 } else { opts.max_iter };
            cg(&system.matrix, &system.rhs, opts.tol, cap)?
        }
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("solution contains non-finite values".into()));
    }
    Ok(system.expand(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sprs::TriMat;

    fn laplace_1d(n: usize) -> CsMat<f64> {
        let mut t = TriMat::new((n, n));
        for i in 0..n {
            t.add_triplet(i, i, 2.0);
            if i + 1 < n {
                t.add_triplet(i, i + 1, -1.0);
                t.add_triplet(i + 1, i, -1.0);
            }
        }
        t.to_csc()
    }

    #[test]
    fn direct_and_cg_agree() {
        let a = laplace_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let x1 = direct(&a, &b).unwrap();
        let x2 = cg(&a, &b, 1e-13, 1000).unwrap();
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-9);
        }
        let mut r = vec![0.0; 50];
        matvec(&a, &x1, &mut r);
        assert!(r.iter().zip(&b).all(|(r, b)| (r - b).abs() < 1e-12));
    }

    #[test]
    fn indefinite_rejected() {
        let mut t = TriMat::new((2, 2));
        t.add_triplet(0, 0, 1.0);
        t.add_triplet(1, 1, -1.0);
        assert!(direct(&t.to_csc(), &[1.0, 1.0]).is_err());
    }
}
