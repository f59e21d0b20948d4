//! Polynomials restricted to straight edges.

use crate::polyquad::gauss::{gauss_legendre, legendre_all};
use crate::polyquad::monomial::MonomialBasis;
use crate::scalar::{Point, Scalar};

/// A univariate polynomial on the segment `a -> b`, stored as Legendre
/// coefficients in the parameter `t in [-1, 1]`, `x(t) = (a + b)/2 + t (b - a)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgePoly<T = f64> {
    pub a: Point<T>,
    pub b: Point<T>,
    pub legendre: Vec<T>,
}

impl<T: Scalar> EdgePoly<T> {
    pub fn length(&self) -> T {
        ((self.b[0] - self.a[0]).powi(2) + (self.b[1] - self.a[1]).powi(2)).sqrt()
    }

    pub fn degree(&self) -> usize {
        self.legendre.len().saturating_sub(1)
    }

    /// Fits the polynomial of degree `deg` that agrees with `f` along the segment.
    pub fn fit(a: Point<T>, b: Point<T>, deg: usize, f: impl Fn(Point<T>) -> T) -> Self {
        let rule = gauss_legendre::<T>(deg + 1);
        let mut c = vec![T::zero(); deg + 1];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = f(point_at(a, b, t));
            for (k, pk) in legendre_all(deg, t).into_iter().enumerate() {
                c[k] += w * v * pk;
            }
        }
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= (T::two() * T::from_usize(k) + T::one()) * T::half();
        }
        Self { a, b, legendre: c }
    }

    pub fn eval_param(&self, t: T) -> T {
        legendre_all(self.degree(), t).iter().zip(&self.legendre).fold(T::zero(), |s, (&p, &c)| s + p * c)
    }

    /// Value at arc-length `s` from `a`.
    pub fn eval_arc(&self, s: T) -> T {
        self.eval_param(T::two() * s / self.length() - T::one())
    }

    /// Squared L2 norm along the edge (exact).
    pub fn norm2_squared(&self) -> T {
        let half_len = self.length() * T::half();
        self.legendre
            .iter()
            .enumerate()
            .fold(T::zero(), |s, (k, &c)| s + c * c * T::two() / (T::two() * T::from_usize(k) + T::one()))
            * half_len
    }

    /// `self - other` on the same segment.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.legendre.len().max(other.legendre.len());
        let get = |v: &[T], k: usize| v.get(k).copied().unwrap_or_else(T::zero);
        let legendre = (0..n).map(|k| get(&self.legendre, k) - get(&other.legendre, k)).collect();
        Self { a: self.a, b: self.b, legendre }
    }
}

#[inline]
pub fn point_at<T: Scalar>(a: Point<T>, b: Point<T>, t: T) -> Point<T> {
    let s = (T::one() + t) * T::half();
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// `grad q . n` along the edge `a -> b`, for `q` given by monomial coefficients.
pub fn poly_normal_derivative<T: Scalar>(
    basis: &MonomialBasis<T>,
    coeffs: &[T],
    a: Point<T>,
    b: Point<T>,
    normal: Point<T>,
) -> EdgePoly<T> {
    let deg = basis.degree.saturating_sub(1);
    EdgePoly::fit(a, b, deg, |x| {
        basis
            .eval_grad(x)
            .iter()
            .zip(coeffs)
            .fold(T::zero(), |s, (g, &c)| s + c * (g[0] * normal[0] + g[1] * normal[1]))
    })
}
