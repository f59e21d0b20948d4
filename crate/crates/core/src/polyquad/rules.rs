//! Quadrature on triangles and star-shaped polygons.

use crate::error::{Error, Result};
use crate::polyquad::gauss::{gauss_jacobi_10, gauss_legendre};
use crate::scalar::{Point, Scalar};

/// Positive-weight cubature rule in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule<T = f64> {
    pub points: Vec<Point<T>>,
    pub weights: Vec<T>,
    /// Total polynomial degree integrated exactly.
    pub order: usize,
}

impl<T: Scalar> QuadRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point<T>) -> T) -> T {
        self.points.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w)
    }

    fn append(&mut self, other: QuadRule<T>) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Collapsed Gauss-Legendre x Gauss-Jacobi rule on the reference triangle
/// `{x, y >= 0, x + y <= 1}`, exact to total degree `order`.
pub fn triangle_quadrature<T: Scalar>(order: usize) -> QuadRule<T> {
    let order = order.max(1);
    let n = (order + 2) / 2;
    let gx = gauss_legendre::<T>(n);
    let gy = gauss_jacobi_10::<T>(n);
    let eighth = T::lit(0.125);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&eta, &wy) in gy.nodes.iter().zip(&gy.weights) {
        let y = (T::one() + eta) * T::half();
        for (&xi, &wx) in gx.nodes.iter().zip(&gx.weights) {
            let x = (T::one() + xi) * T::half() * (T::one() - y);
            points.push([x, y]);
            weights.push(wx * wy * eighth);
        }
    }
    QuadRule { points, weights, order }
}

/// Maps the reference rule onto the triangle `(a, b, c)`.
pub fn map_triangle<T: Scalar>(rule: &QuadRule<T>, a: Point<T>, b: Point<T>, c: Point<T>) -> QuadRule<T> {
    let e1 = [b[0] - a[0], b[1] - a[1]];
    let e2 = [c[0] - a[0], c[1] - a[1]];
    let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
    let points =
        rule.points.iter().map(|&[s, t]| [a[0] + s * e1[0] + t * e2[0], a[1] + s * e1[1] + t * e2[1]]).collect();
    let weights = rule.weights.iter().map(|&w| w * jac).collect();
    QuadRule { points, weights, order: rule.order }
}

pub fn signed_area<T: Scalar>(poly: &[Point<T>]) -> T {
    let n = poly.len();
    let o = poly[0];
    let mut s = T::zero();
    for i in 1..n.saturating_sub(1) {
        let p = [poly[i][0] - o[0], poly[i][1] - o[1]];
        let q = [poly[i + 1][0] - o[0], poly[i + 1][1] - o[1]];
        s += p[0] * q[1] - q[0] * p[1];
    }
    s * T::half()
}

/// Area centroid of a simple polygon.
pub fn centroid<T: Scalar>(poly: &[Point<T>]) -> Point<T> {
    let n = poly.len();
    // shift to the first vertex for accuracy
    let o = poly[0];
    let mut a = T::zero();
    let mut cx = T::zero();
    let mut cy = T::zero();
    for i in 0..n {
        let p = [poly[i][0] - o[0], poly[i][1] - o[1]];
        let q = [poly[(i + 1) % n][0] - o[0], poly[(i + 1) % n][1] - o[1]];
        let cr = p[0] * q[1] - q[0] * p[1];
        a += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    let three_a = T::lit(3.0) * a;
    [o[0] + cx / three_a, o[1] + cy / three_a]
}

/// Largest vertex-to-vertex distance.
pub fn diameter<T: Scalar>(poly: &[Point<T>]) -> T {
    let mut h = T::zero();
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            h = h.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
    }
    h
}

pub(crate) fn tri_area<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])) * T::half()
}

/// Fan triangles `(star, v_i, v_{i+1})`; every one must have positive area.
pub fn fan_triangles<T: Scalar>(poly: &[Point<T>], star: Point<T>) -> Result<Vec<[Point<T>; 3]>> {
    let n = poly.len();
    let total = signed_area(poly).abs();
    let mut tris = Vec::with_capacity(n);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let area = tri_area(star, a, b);
        if area <= T::lit(1e-14) * total {
            return Err(Error::Geometry(format!(
                "star point is not in the kernel of the polygon (sub-triangle {i} has area {area})"
            )));
        }
        tris.push([star, a, b]);
    }
    Ok(tris)
}

/// Quadrature over a polygon by fan subtriangulation around its centroid.
pub fn polygon_quadrature<T: Scalar>(poly: &[Point<T>], order: usize) -> Result<QuadRule<T>> {
    let reference = triangle_quadrature::<T>(order);
    let star = centroid(poly);
    let mut rule = QuadRule { points: Vec::new(), weights: Vec::new(), order: reference.order };
    for [s, a, b] in fan_triangles(poly, star)? {
        rule.append(map_triangle(&reference, s, a, b));
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Dirichlet integral over the reference triangle.
    fn monomial_exact(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn order_one_is_centroid_rule() {
        let r = triangle_quadrature::<f64>(1);
        assert_eq!(r.len(), 1);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
        assert!((r.points[0][0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((r.points[0][1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_half() {
        for k in 1..=24 {
            let r = triangle_quadrature::<f64>(k);
            assert!((r.total_weight() - 0.5).abs() < 1e-14);
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn order_four_x2y2() {
        let r = triangle_quadrature::<f64>(4);
        let v = r.integrate(|[x, y]| x * x * y * y);
        assert!((v - 1.0 / 180.0).abs() < 1e-13);
    }

    #[test]
    fn reference_exactness_all_orders() {
        for k in 1..=20u32 {
            let r = triangle_quadrature::<f64>(k as usize);
            for a in 0..=k {
                for b in 0..=(k - a) {
                    let v = r.integrate(|[x, y]| x.powi(a as i32) * y.powi(b as i32));
                    assert!((v - monomial_exact(a, b)).abs() < 1e-14, "k={k} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn unit_square_moments() {
        let sq: [Point; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let r = polygon_quadrature(&sq, 2).unwrap();
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((r.integrate(|[x, _]| x) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn hexagon_area() {
        let hex: Vec<Point> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64;
                [0.5 * t.cos(), 0.5 * t.sin()]
            })
            .collect();
        let r = polygon_quadrature(&hex, 3).unwrap();
        assert!((r.total_weight() - signed_area(&hex)).abs() < 1e-13);
    }

    #[test]
    fn star_outside_kernel_rejected() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(fan_triangles(&sq, [2.0, 0.5]).is_err());
    }
}
