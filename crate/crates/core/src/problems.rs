//! Manufactured solutions and the computable energy error `|u - Pi u_n|_1`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::mesh::{build_cartesian, build_lshape, PolyMesh, Rect};
use crate::polyquad::{exponents, gauss_legendre, map_triangle, poly_eval, MonomialBasis, QuadRule};
use crate::scalar::Point;
use crate::vemspace::cache;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `(0, 1)^2`.
    UnitSquare,
    /// `(-1, 1)^2 \ [-1, 0]^2`.
    LShape,
}

impl Domain {
    /// Cartesian mesh with `n` cells per unit length.
    pub fn cartesian(&self, n: usize) -> Result<PolyMesh> {
        match self {
            Self::UnitSquare => build_cartesian(n, n, Rect::unit()),
            Self::LShape => build_lshape(n),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Self::UnitSquare => 1.0,
            Self::LShape => 3.0,
        }
    }

    /// Axis-aligned squares `(corner, side)` tiling the domain.
    fn tiles(&self) -> Vec<(Point, f64)> {
        match self {
            Self::UnitSquare => vec![([0.0, 0.0], 1.0)],
            Self::LShape => vec![([-1.0, 0.0], 1.0), ([0.0, 0.0], 1.0), ([0.0, -1.0], 1.0)],
        }
    }
}

/// Uniform split of each domain tile before grading, enough for the width of the u4 bump.
const SEMINORM_SPLIT: usize = 8;

type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    pub domain: Domain,
    u: ScalarFn,
    grad: VectorFn,
    f: ScalarFn,
    /// Point where the gradient blows up or loses smoothness.
    pub singular_point: Option<Point>,
    seminorm: Arc<OnceLock<f64>>,
}

impl fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("singular_point", &self.singular_point)
            .finish()
    }
}

/// Angle in `(-pi, pi]`, with the negative x-axis mapped to `pi`.
fn angle(x: Point) -> f64 {
    if x[1] == 0.0 && x[0] < 0.0 {
        PI
    } else {
        x[1].atan2(x[0])
    }
}

fn bump(t: f64) -> (f64, f64, f64) {
    let s = t - 0.5;
    let e = (-100.0 * s * s).exp();
    let a = t - t * t;
    let da = 1.0 - 2.0 * t;
    let g = a * e;
    let dg = (da - 200.0 * s * a) * e;
    let ddg = (-2.0 - 400.0 * s * da + a * (-200.0 + 40000.0 * s * s)) * e;
    (g, dg, ddg)
}

impl ManufacturedProblem {
    pub fn new(
        name: impl Into<String>,
        domain: Domain,
        u: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> Point + Send + Sync + 'static,
        f: impl Fn(Point) -> f64 + Send + Sync + 'static,
        singular_point: Option<Point>,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            u: Arc::new(u),
            grad: Arc::new(grad),
            f: Arc::new(f),
            singular_point,
            seminorm: Arc::new(OnceLock::new()),
        }
    }

    pub fn u(&self, x: Point) -> f64 {
        (self.u)(x)
    }

    pub fn grad(&self, x: Point) -> Point {
        (self.grad)(x)
    }

    pub fn f(&self, x: Point) -> f64 {
        (self.f)(x)
    }

    /// Dirichlet data, the trace of `u`.
    pub fn g(&self, x: Point) -> f64 {
        (self.u)(x)
    }

    /// `|u|_{1,Omega}`, computed once by graded tensor Gauss quadrature.
    pub fn h1_seminorm(&self) -> f64 {
        *self.seminorm.get_or_init(|| {
            let rule = gauss_legendre::<f64>(20);
            let mut total = 0.0;
            let split = SEMINORM_SPLIT;
            for (c, s) in self.domain.tiles() {
                let h = s / split as f64;
                for i in 0..split {
                    for j in 0..split {
                        let sub = [c[0] + i as f64 * h, c[1] + j as f64 * h];
                        total += graded_square(&rule, sub, h, self.singular_point, 40, &|x| {
                            let g = self.grad(x);
                            g[0] * g[0] + g[1] * g[1]
                        });
                    }
                }
            }
            total.sqrt()
        })
    }

    /// Polynomial problem `u = sum c_a m_a` (unscaled monomials about the origin), `f = -Lap u`.
    pub fn polynomial(domain: Domain, degree: usize, coeffs: Vec<f64>) -> Self {
        let basis = MonomialBasis::new(degree, [0.0, 0.0], 1.0);
        let c = Arc::new(coeffs);
        let (cu, cg, cf) = (Arc::clone(&c), Arc::clone(&c), c);
        let (bu, bg, bf) = (basis.clone(), basis.clone(), basis);
        Self::new(
            format!("poly{degree}"),
            domain,
            move |x| poly_eval(&bu, &cu, x),
            move |x| {
                bg.eval_grad(x).iter().zip(cg.iter()).fold([0.0, 0.0], |g, (m, c)| [g[0] + c * m[0], g[1] + c * m[1]])
            },
            move |x| {
                let lap = crate::polyquad::poly_laplacian(&cf, degree, 1.0);
                -poly_eval(&bf.truncated(degree.saturating_sub(2)), &lap, x)
            },
            None,
        )
    }
}

/// Integral of `f` over the square `[c, c + s]^2`, geometrically graded toward `corner`.
fn graded_square(
    rule: &crate::polyquad::GaussRule,
    c: Point,
    s: f64,
    corner: Option<Point>,
    depth: usize,
    f: &dyn Fn(Point) -> f64,
) -> f64 {
    let touches = corner.and_then(|k| {
        let corners = [[c[0], c[1]], [c[0] + s, c[1]], [c[0], c[1] + s], [c[0] + s, c[1] + s]];
        corners.iter().position(|q| (q[0] - k[0]).abs() < 1e-14 && (q[1] - k[1]).abs() < 1e-14)
    });
    match touches {
        Some(idx) if depth > 0 => {
            let h = 0.5 * s;
            let mut total = 0.0;
            for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let sub = [c[0] + i as f64 * h, c[1] + j as f64 * h];
                let keep = (i, j) == (idx & 1, idx >> 1);
                total += graded_square(rule, sub, h, if keep { corner } else { None }, depth - 1, f);
            }
            total
        }
        _ => {
            let mut total = 0.0;
            for (&xi, &wi) in rule.nodes.iter().zip(&rule.weights) {
                for (&yj, &wj) in rule.nodes.iter().zip(&rule.weights) {
                    let x = [c[0] + 0.5 * s * (1.0 + xi), c[1] + 0.5 * s * (1.0 + yj)];
                    total += wi * wj * f(x);
                }
            }
            total * 0.25 * s * s
        }
    }
}

/// One of the named test problems `u1` ... `u4`.
pub fn make_problem(name: &str) -> Result<ManufacturedProblem> {
    match name {
        "u1" => Ok(ManufacturedProblem::new(
            "u1",
            Domain::UnitSquare,
            |x| (PI * x[0]).sin() * (PI * x[1]).sin(),
            |x| {
                let (sx, cx) = (PI * x[0]).sin_cos();
                let (sy, cy) = (PI * x[1]).sin_cos();
                [PI * cx * sy, PI * sx * cy]
            },
            |x| 2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin(),
            None,
        )),
        "u2" => Ok(ManufacturedProblem::new(
            "u2",
            Domain::UnitSquare,
            |x| {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    return 0.0;
                }
                x[0] * x[1] * r2.ln() + (x[0] * x[0] - x[1] * x[1]) * angle(x)
            },
            |x| {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    return [0.0, 0.0];
                }
                let (lr, t) = (0.5 * r2.ln(), angle(x));
                [2.0 * x[1] * lr + 2.0 * x[0] * t + x[1], 2.0 * x[0] * lr - 2.0 * x[1] * t + x[0]]
            },
            |_| 0.0,
            Some([0.0, 0.0]),
        )),
        "u3" => Ok(ManufacturedProblem::new(
            "u3",
            Domain::LShape,
            |x| {
                let r = x[0].hypot(x[1]);
                r.powf(2.0 / 3.0) * (2.0 / 3.0 * (angle(x) + 0.5 * PI)).sin()
            },
            |x| {
                let r = x[0].hypot(x[1]);
                if r == 0.0 {
                    return [f64::INFINITY, f64::INFINITY];
                }
                let phi = PI / 3.0 - angle(x) / 3.0;
                let c = 2.0 / 3.0 * r.powf(-1.0 / 3.0);
                [c * phi.sin(), c * phi.cos()]
            },
            |_| 0.0,
            Some([0.0, 0.0]),
        )),
        "u4" => Ok(ManufacturedProblem::new(
            "u4",
            Domain::UnitSquare,
            |x| bump(x[0]).0 * bump(x[1]).0,
            |x| {
                let (gx, dx, _) = bump(x[0]);
                let (gy, dy, _) = bump(x[1]);
                [dx * gy, gx * dy]
            },
            |x| {
                let (gx, _, ddx) = bump(x[0]);
                let (gy, _, ddy) = bump(x[1]);
                -(ddx * gy + gx * ddy)
            },
            None,
        )),
        other => Err(Error::UnknownProblem(other.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyError {
    pub absolute: f64,
    /// Normalised by `|u|_1`.
    pub relative: f64,
}

/// Fan rule on the element, graded toward `corner` when it is one of the vertices.
fn element_rule(points: &[Point], star: Point, order: usize, corner: Option<Point>) -> QuadRule {
    let reference = cache::triangle(order);
    let n = points.len();
    let mut rule = QuadRule { points: Vec::new(), weights: Vec::new(), order };
    let push = |rule: &mut QuadRule, a: Point, b: Point, c: Point, r: &QuadRule| {
        let m = map_triangle(r, a, b, c);
        rule.points.extend(m.points);
        rule.weights.extend(m.weights);
    };
    let fine = corner.map(|_| cache::triangle(order + 4));
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        let at = |p: Point| corner.is_some_and(|k| (p[0] - k[0]).abs() < 1e-14 && (p[1] - k[1]).abs() < 1e-14);
        let (tip, x, y) = if at(a) {
            (a, b, star)
        } else if at(b) {
            (b, star, a)
        } else {
            push(&mut rule, star, a, b, &reference);
            continue;
        };
        let fine = fine.as_ref().unwrap();
        // geometric layers toward the singular tip
        let (mut x, mut y) = (x, y);
        for _ in 0..30 {
            let mx = [0.5 * (tip[0] + x[0]), 0.5 * (tip[1] + x[1])];
            let my = [0.5 * (tip[0] + y[0]), 0.5 * (tip[1] + y[1])];
            push(&mut rule, mx, x, y, fine);
            push(&mut rule, mx, y, my, fine);
            x = mx;
            y = my;
        }
        push(&mut rule, tip, x, y, fine);
    }
    rule
}

/// `|u - Pi^nabla u_n|_{1, tau_n}` by element quadrature of order `2p + 2`.
pub fn energy_error(problem: &ManufacturedProblem, disc: &Discretization, u: &[f64]) -> EnergyError {
    let parts: Vec<f64> = disc
        .locals
        .par_iter()
        .enumerate()
        .map(|(e, l)| {
            let coef = l.ops.project(&disc.local_dofs(e, u));
            let sp = &l.space;
            let rule = element_rule(&sp.points, sp.barycenter, 2 * sp.degree + 2, problem.singular_point);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| {
                    let g = problem.grad(x);
                    let gh = sp
                        .basis
                        .eval_grad(x)
                        .iter()
                        .zip(&coef)
                        .fold([0.0, 0.0], |s, (q, c)| [s[0] + c * q[0], s[1] + c * q[1]]);
                    w * ((g[0] - gh[0]).powi(2) + (g[1] - gh[1]).powi(2))
                })
                .sum::<f64>()
        })
        .collect();
    let absolute = parts.iter().sum::<f64>().sqrt();
    EnergyError { absolute, relative: absolute / problem.h1_seminorm() }
}

/// Estimator over error; `NaN` when both vanish, `+inf` when only the error does.
pub fn effectivity(eta: f64, error: f64, floor: f64) -> f64 {
    let ez = error.abs() <= floor;
    if ez && eta.abs() <= floor {
        f64::NAN
    } else if ez {
        f64::INFINITY
    } else {
        eta / error
    }
}

/// Random polynomial of total degree `p` (unscaled monomials), used by patch tests.
pub fn polynomial_coefficients(p: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    exponents(p).iter().map(|_| rng.random_range(-1.0..1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_values() {
        let u1 = make_problem("u1").unwrap();
        assert!((u1.u([0.5, 0.5]) - 1.0).abs() < 1e-15);
        let u3 = make_problem("u3").unwrap();
        assert_eq!(u3.u([0.0, 0.0]), 0.0);
        assert!(matches!(make_problem("u9"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn u3_vanishes_on_corner_legs() {
        let u3 = make_problem("u3").unwrap();
        for t in [0.1, 0.5, 1.0] {
            assert!(u3.u([-t, 0.0]).abs() < 1e-15);
            assert!(u3.u([0.0, -t]).abs() < 1e-15);
        }
    }

    #[test]
    fn u1_seminorm_closed_form() {
        let u1 = make_problem("u1").unwrap();
        assert!((u1.h1_seminorm() - (PI * PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn effectivity_markers() {
        assert!(effectivity(0.0, 0.0, 0.0).is_nan());
        assert_eq!(effectivity(1.0, 0.0, 0.0), f64::INFINITY);
        assert_eq!(effectivity(1.0, 2.0, 0.0), 0.5);
    }

    #[test]
    fn graded_rule_integrates_polynomials() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let r = element_rule(&pts, [0.5, 0.5], 4, Some([0.0, 0.0]));
        let v: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x[0] * x[0] * x[1]).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }
}
