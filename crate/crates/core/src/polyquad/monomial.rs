//! Scaled monomials `m_a = ((x - x_E)/h_E)^a1 ((y - y_E)/h_E)^a2`.
//!
//! Members are ordered by total degree, and within a degree block by
//! decreasing `a1`: `1, x, y, x^2, xy, y^2, ...`. The index of `(a1, a2)`
//! with `d = a1 + a2` is `d(d+1)/2 + a2`.

use crate::scalar::{Point, Scalar};

/// `dim P_p` in two variables.
pub const fn dim_poly(p: isize) -> usize {
    if p < 0 {
        0
    } else {
        let p = p as usize;
        (p + 1) * (p + 2) / 2
    }
}

#[inline]
pub fn monomial_index(a1: usize, a2: usize) -> usize {
    let d = a1 + a2;
    d * (d + 1) / 2 + a2
}

/// Exponent list in basis order.
pub fn exponents(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim_poly(p as isize));
    for d in 0..=p {
        for a2 in 0..=d {
            out.push((d - a2, a2));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonomialBasis<T = f64> {
    pub degree: usize,
    pub center: Point<T>,
    pub scale: T,
}

impl<T: Scalar> MonomialBasis<T> {
    pub fn new(degree: usize, center: Point<T>, scale: T) -> Self {
        Self { degree, center, scale }
    }

    pub fn len(&self) -> usize {
        dim_poly(self.degree as isize)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn local(&self, x: Point<T>) -> Point<T> {
        [(x[0] - self.center[0]) / self.scale, (x[1] - self.center[1]) / self.scale]
    }

    /// Values of all members at `x`.
    pub fn eval(&self, x: Point<T>) -> Vec<T> {
        let [s, t] = self.local(x);
        let p = self.degree;
        let mut sp = vec![T::one(); p + 1];
        let mut tp = vec![T::one(); p + 1];
        for k in 1..=p {
            sp[k] = sp[k - 1] * s;
            tp[k] = tp[k - 1] * t;
        }
        exponents(p).into_iter().map(|(a, b)| sp[a] * tp[b]).collect()
    }

    /// Gradients of all members at `x` (physical coordinates).
    pub fn eval_grad(&self, x: Point<T>) -> Vec<Point<T>> {
        let [s, t] = self.local(x);
        let p = self.degree;
        let mut sp = vec![T::one(); p + 1];
        let mut tp = vec![T::one(); p + 1];
        for k in 1..=p {
            sp[k] = sp[k - 1] * s;
            tp[k] = tp[k - 1] * t;
        }
        let inv_h = T::one() / self.scale;
        exponents(p)
            .into_iter()
            .map(|(a, b)| {
                let gx = if a > 0 { T::from_usize(a) * sp[a - 1] * tp[b] } else { T::zero() };
                let gy = if b > 0 { T::from_usize(b) * sp[a] * tp[b - 1] } else { T::zero() };
                [gx * inv_h, gy * inv_h]
            })
            .collect()
    }

    /// The same basis truncated to degree `q <= degree`.
    pub fn truncated(&self, q: usize) -> Self {
        Self { degree: q.min(self.degree), ..self.clone() }
    }
}

/// Evaluates the polynomial with monomial coefficients `c` at `x`.
pub fn poly_eval<T: Scalar>(basis: &MonomialBasis<T>, c: &[T], x: Point<T>) -> T {
    basis.eval(x).iter().zip(c).fold(T::zero(), |a, (&m, &ci)| a + m * ci)
}

/// Laplacian of a degree-`p` polynomial (monomial coefficients, length
/// `dim P_p`) as a degree `p - 2` polynomial on the same center and scale.
pub fn poly_laplacian<T: Scalar>(c: &[T], p: usize, scale: T) -> Vec<T> {
    let out_len = dim_poly(p as isize - 2);
    let mut out = vec![T::zero(); out_len];
    let inv_h2 = T::one() / (scale * scale);
    for (idx, (a, b)) in exponents(p).into_iter().enumerate() {
        let ci = c[idx];
        if ci == T::zero() {
            continue;
        }
        if a >= 2 {
            out[monomial_index(a - 2, b)] += ci * T::from_usize(a * (a - 1)) * inv_h2;
        }
        if b >= 2 {
            out[monomial_index(a, b - 2)] += ci * T::from_usize(b * (b - 1)) * inv_h2;
        }
    }
    out
}

/// Partial derivatives of a degree-`p` polynomial as degree `p - 1` coefficients.
pub fn poly_gradient<T: Scalar>(c: &[T], p: usize, scale: T) -> [Vec<T>; 2] {
    let n = dim_poly(p as isize - 1);
    let mut dx = vec![T::zero(); n];
    let mut dy = vec![T::zero(); n];
    let inv_h = T::one() / scale;
    for (idx, (a, b)) in exponents(p).into_iter().enumerate() {
        if a >= 1 {
            dx[monomial_index(a - 1, b)] += c[idx] * T::from_usize(a) * inv_h;
        }
        if b >= 1 {
            dy[monomial_index(a, b - 1)] += c[idx] * T::from_usize(b) * inv_h;
        }
    }
    [dx, dy]
}
