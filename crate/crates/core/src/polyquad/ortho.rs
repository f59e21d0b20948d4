//! Element-wise L2-orthonormal polynomial bases.

use crate::error::{Error, Result};
use crate::polyquad::monomial::MonomialBasis;
use crate::polyquad::rules::QuadRule;
use crate::scalar::{Point, Scalar};

/// Orthonormal basis `q_i = sum_j C[i][j] m_j` of `P_p(E)`.
///
/// `C` is lower triangular, so the first `dim P_k` members span `P_k` for
/// every `k <= p`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis<T = f64> {
    pub monomials: MonomialBasis<T>,
    /// Row-major `n x n` coefficients, `n = dim P_p`.
    pub coeffs: Vec<T>,
}

impl<T: Scalar> OrthoBasis<T> {
    pub fn degree(&self) -> usize {
        self.monomials.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeffs[i * self.len() + j]
    }

    /// Monomial coefficients of member `i`.
    pub fn row(&self, i: usize) -> &[T] {
        let n = self.len();
        &self.coeffs[i * n..(i + 1) * n]
    }

    pub fn eval(&self, x: Point<T>) -> Vec<T> {
        let m = self.monomials.eval(x);
        let n = self.len();
        (0..n).map(|i| (0..=i).fold(T::zero(), |a, j| a + self.coeff(i, j) * m[j])).collect()
    }

    pub fn eval_grad(&self, x: Point<T>) -> Vec<Point<T>> {
        let g = self.monomials.eval_grad(x);
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..=i).fold([T::zero(); 2], |a, j| {
                    let c = self.coeff(i, j);
                    [a[0] + c * g[j][0], a[1] + c * g[j][1]]
                })
            })
            .collect()
    }

    /// Monomial coefficients of `sum_i b_i q_i` (`b` may be shorter than `n`).
    pub fn to_monomial(&self, b: &[T]) -> Vec<T> {
        let n = self.len();
        let mut a = vec![T::zero(); n];
        for (i, &bi) in b.iter().enumerate() {
            for j in 0..=i {
                a[j] += bi * self.coeff(i, j);
            }
        }
        a
    }

    /// Orthonormal coordinates of a polynomial given by monomial
    /// coefficients `a` (length `dim P_k`, `k <= p`); solves `C^T b = a`.
    pub fn from_monomial(&self, a: &[T]) -> Vec<T> {
        let k = a.len();
        let mut b = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = a[i];
            for (j, bj) in b.iter().enumerate().take(k).skip(i + 1) {
                s -= self.coeff(j, i) * *bj;
            }
            b[i] = s / self.coeff(i, i);
        }
        b
    }
}

/// Twice-iterated modified Gram-Schmidt of the monomials in the discrete
/// inner product of `quad`.
pub fn orthonormalize<T: Scalar>(basis: &MonomialBasis<T>, quad: &QuadRule<T>) -> Result<OrthoBasis<T>> {
    let n = basis.len();
    let nq = quad.len();
    if quad.order < 2 * basis.degree {
        return Err(Error::InvalidArgument(format!("quadrature order {} below 2p = {}", quad.order, 2 * basis.degree)));
    }
    let sw: Vec<T> = quad.weights.iter().map(|w| w.sqrt()).collect();
    // column j = sqrt(w) * m_j at the quadrature points
    let mut cols: Vec<Vec<T>> = vec![vec![T::zero(); nq]; n];
    for (k, (&x, &s)) in quad.points.iter().zip(&sw).enumerate() {
        for (j, m) in basis.eval(x).into_iter().enumerate() {
            cols[j][k] = m * s;
        }
    }
    let dot = |u: &[T], v: &[T]| u.iter().zip(v).fold(T::zero(), |a, (&x, &y)| a + x * y);
    let mut coeffs = vec![T::zero(); n * n];
    let mut done: Vec<Vec<T>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = cols[j].clone();
        let mut c = vec![T::zero(); n];
        c[j] = T::one();
        let start = dot(&v, &v).sqrt();
        for _pass in 0..2 {
            for (i, qi) in done.iter().enumerate() {
                let r = dot(qi, &v);
                for (vk, &qk) in v.iter_mut().zip(qi) {
                    *vk -= r * qk;
                }
                for l in 0..=i {
                    c[l] -= r * coeffs[i * n + l];
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > T::lit(1e3) * T::epsilon() * start) {
            return Err(Error::Singular(format!(
                "monomial {j} is numerically dependent (relative norm {})",
                norm / start
            )));
        }
        for vk in v.iter_mut() {
            *vk /= norm;
        }
        for l in 0..=j {
            coeffs[j * n + l] = c[l] / norm;
        }
        done.push(v);
    }
    Ok(OrthoBasis { monomials: basis.clone(), coeffs })
}
