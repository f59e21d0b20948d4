//! Stabilised local stiffness, loads, global assembly and solve.

mod diagnostics;
mod solver;

pub use diagnostics::{energy_identity, stability_bounds};
pub use solver::{solve, SolveOptions, SolverKind};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::mesh::PolyMesh;
use crate::projectors::LocalOperators;
use crate::scalar::Point;
use crate::vemspace::{assign_degrees, build_dofmap, interpolate_boundary, DegreeMap, DofMap, ElementSpace};

#[derive(Clone, Debug)]
pub struct LocalStiffness {
    /// `a(Pi phi_i, Pi phi_j)`.
    pub consistency: DMatrix<f64>,
    /// D-recipe diagonal `max(1, consistency_ii)`.
    pub stab_diag: DVector<f64>,
    /// `(I - Pi)^T S (I - Pi)`.
    pub stabilization: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

pub fn local_stiffness(ops: &LocalOperators) -> LocalStiffness {
    let nd = ops.n_dofs();
    let cons = ops.pinabla.transpose() * &ops.grad_gram * &ops.pinabla;
    let cons = (&cons + cons.transpose()) * 0.5;
    let stab_diag = DVector::from_iterator(nd, (0..nd).map(|i| cons[(i, i)].max(1.0)));
    let r = DMatrix::identity(nd, nd) - &ops.pinabla_dof;
    let mut sr = r.clone();
    for (i, mut row) in sr.row_iter_mut().enumerate() {
        row *= stab_diag[i];
    }
    let stab = r.transpose() * sr;
    let stab = (&stab + stab.transpose()) * 0.5;
    let k = &cons + &stab;
    LocalStiffness { consistency: cons, stab_diag, stabilization: stab, k }
}

/// `<f_n, phi_i>`: `int f Pi^0 phi_i` for `p >= 2`, and `(int f)` times the
/// boundary mean of `phi_i` for `p = 1`.
pub fn local_load(space: &ElementSpace, ops: &LocalOperators, f: impl Fn(Point) -> f64) -> Vec<f64> {
    let nd = space.n_dofs();
    let mut b = vec![0.0; nd];
    if space.degree == 1 {
        let total = space.quad.integrate(&f);
        let per = space.perimeter();
        for (bi, &w) in b.iter_mut().zip(ops.boundary_integrals.iter()) {
            *bi = total * w / per;
        }
    } else {
        let fm = space.l2_coefficients(&f, space.n_moments());
        let mo = space.moment_offset();
        let s = space.area.sqrt();
        for (k, v) in fm.into_iter().enumerate() {
            b[mo + k] = s * v;
        }
    }
    b
}

#[derive(Clone, Debug)]
pub struct LocalData {
    pub space: ElementSpace,
    pub ops: LocalOperators,
    pub stiffness: LocalStiffness,
}

/// Mesh, degrees, dofs and every local operator.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: PolyMesh,
    pub deg: DegreeMap,
    pub dofmap: DofMap,
    pub locals: Vec<LocalData>,
}

impl Discretization {
    pub fn new(mesh: PolyMesh, p_elem: &[usize]) -> Result<Self> {
        let deg = assign_degrees(&mesh, p_elem)?;
        Self::with_degrees(mesh, deg)
    }

    pub fn with_degrees(mesh: PolyMesh, deg: DegreeMap) -> Result<Self> {
        let dofmap = build_dofmap(&mesh, &deg);
        let locals = (0..mesh.n_elements())
            .into_par_iter()
            .map(|e| {
                let space = ElementSpace::new(&mesh, &deg, e)?;
                let ops = LocalOperators::new(&space)?;
                let stiffness = local_stiffness(&ops);
                Ok(LocalData { space, ops, stiffness })
            })
            .collect::<Result<Vec<_>>>()?;
        for (e, l) in locals.iter().enumerate() {
            if l.space.n_dofs() != dofmap.gather[e].len() {
                return Err(Error::InvalidArgument(format!(
                    "element {e}: {} local dofs but {} in the gather list",
                    l.space.n_dofs(),
                    dofmap.gather[e].len()
                )));
            }
        }
        Ok(Self { mesh, deg, dofmap, locals })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs
    }

    /// Local dof vector of element `e`.
    pub fn local_dofs(&self, e: usize, u: &[f64]) -> Vec<f64> {
        self.dofmap.gather[e].iter().map(|&g| u[g]).collect()
    }

    /// Global dofs of a smooth function; moments use each element's quadrature.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
        let mut u = vec![0.0; self.n_dofs()];
        let local: Vec<Vec<f64>> = self.locals.par_iter().map(|l| l.space.dofs_of(&f)).collect();
        for (e, d) in local.into_iter().enumerate() {
            for (&g, v) in self.dofmap.gather[e].iter().zip(d) {
                u[g] = v;
            }
        }
        u
    }

    /// Global stiffness matrix on all dofs.
    pub fn global_stiffness(&self) -> CsMat<f64> {
        let n = self.n_dofs();
        let mut tri = TriMat::new((n, n));
        for (e, l) in self.locals.iter().enumerate() {
            let g = &self.dofmap.gather[e];
            for (i, &gi) in g.iter().enumerate() {
                for (j, &gj) in g.iter().enumerate() {
                    tri.add_triplet(gi, gj, l.stiffness.k[(i, j)]);
                }
            }
        }
        tri.to_csc()
    }

    pub fn global_load(&self, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
        let loads: Vec<Vec<f64>> = self.locals.par_iter().map(|l| local_load(&l.space, &l.ops, &f)).collect();
        let mut b = vec![0.0; self.n_dofs()];
        for (e, be) in loads.into_iter().enumerate() {
            for (&g, v) in self.dofmap.gather[e].iter().zip(be) {
                b[g] += v;
            }
        }
        b
    }
}

/// Free-dof system after symmetric Dirichlet elimination.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsMat<f64>,
    pub rhs: Vec<f64>,
    /// Global ids of the free dofs, in system order.
    pub free: Vec<usize>,
    /// Full vector holding the boundary values (zeros at free dofs).
    pub lift: Vec<f64>,
}

impl LinearSystem {
    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Full dof vector from free values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut u = self.lift.clone();
        for (&g, &v) in self.free.iter().zip(x) {
            u[g] = v;
        }
        u
    }
}

pub fn assemble(
    disc: &Discretization,
    f: impl Fn(Point) -> f64 + Sync,
    g: impl Fn(Point) -> f64,
) -> Result<LinearSystem> {
    let n = disc.n_dofs();
    let bd = interpolate_boundary(g, &disc.mesh, &disc.deg, &disc.dofmap)?;
    let lift = bd.lift(n);
    let mut free_index = vec![usize::MAX; n];
    let free: Vec<usize> = (0..n).filter(|&d| !disc.dofmap.is_boundary[d]).collect();
    for (k, &d) in free.iter().enumerate() {
        free_index[d] = k;
    }
    let b = disc.global_load(f);
    let mut rhs: Vec<f64> = free.iter().map(|&d| b[d]).collect();
    let mut tri = TriMat::new((free.len(), free.len()));
    for (e, l) in disc.locals.iter().enumerate() {
        let gl = &disc.dofmap.gather[e];
        for (i, &gi) in gl.iter().enumerate() {
            let fi = free_index[gi];
            if fi == usize::MAX {
                continue;
            }
            for (j, &gj) in gl.iter().enumerate() {
                let kij = l.stiffness.k[(i, j)];
                match free_index[gj] {
                    usize::MAX => rhs[fi] -= kij * lift[gj],
                    fj => tri.add_triplet(fi, fj, kij),
                }
            }
        }
    }
    Ok(LinearSystem { matrix: tri.to_csc(), rhs, free, lift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_cartesian, Rect};

    #[test]
    fn p1_triangle_is_linear_fem() {
        let m = PolyMesh::from_loops(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![vec![0, 1, 2]]).unwrap();
        let d = Discretization::new(m, &[1]).unwrap();
        let k = &d.locals[0].stiffness.k;
        let expect = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[(i, j)] - expect[i][j]).abs() < 1e-13);
            }
        }
        assert!(d.locals[0].stiffness.stabilization.amax() < 1e-13);
    }

    #[test]
    fn constants_are_energy_free() {
        let m = build_cartesian(2, 2, Rect::unit()).unwrap();
        let d = Discretization::new(m, &[2, 3, 4, 5]).unwrap();
        for l in &d.locals {
            let one = DVector::from_vec(l.space.dofs_of(|_| 1.0));
            assert!((&l.stiffness.k * one).amax() < 1e-10);
            assert!((&l.stiffness.k - l.stiffness.k.transpose()).amax() < 1e-12);
        }
    }

    #[test]
    fn zero_data_zero_solution() {
        let m = build_cartesian(3, 3, Rect::unit()).unwrap();
        let d = Discretization::new(m, &[3; 9]).unwrap();
        let sys = assemble(&d, |_| 0.0, |_| 0.0).unwrap();
        let u = solve(&sys, &SolveOptions::default()).unwrap();
        assert!(u.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn one_free_dof_for_p1_2x2() {
        let m = build_cartesian(2, 2, Rect::unit()).unwrap();
        let d = Discretization::new(m, &[1; 4]).unwrap();
        let sys = assemble(&d, |_| 1.0, |_| 0.0).unwrap();
        assert_eq!(sys.n_free(), 1);
    }

    #[test]
    fn load_of_unit_source_integrates_to_area() {
        let m = build_cartesian(1, 1, Rect::unit()).unwrap();
        let d = Discretization::new(m, &[2]).unwrap();
        let l = &d.locals[0];
        let b = local_load(&l.space, &l.ops, |_| 1.0);
        let one = l.space.dofs_of(|_| 1.0);
        let s: f64 = b.iter().zip(&one).map(|(x, y)| x * y).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
