//! Manufactured solutions: derivative consistency and seminorm values.

use std::f64::consts::PI;

use hpvem::assembly::Discretization;
use hpvem::polyquad::gauss_legendre;
use hpvem::problems::{effectivity, energy_error, make_problem, Domain, ManufacturedProblem};
use hpvem::Point;

fn samples(domain: Domain) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..9 {
        for j in 0..9 {
            let (s, t) = ((i as f64 + 0.37) / 9.0, (j as f64 + 0.61) / 9.0);
            match domain {
                Domain::UnitSquare => out.push([s, t]),
                Domain::LShape => {
                    let x = [2.0 * s - 1.0, 2.0 * t - 1.0];
                    if !(x[0] < 0.0 && x[1] < 0.0) {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

fn check_derivatives(prob: &ManufacturedProblem, tol_grad: f64, tol_lap: f64) {
    let h = 1e-4;
    for x in samples(prob.domain) {
        let u = |dx: f64, dy: f64| prob.u([x[0] + dx, x[1] + dy]);
        let g = prob.grad(x);
        let fd = [(u(h, 0.0) - u(-h, 0.0)) / (2.0 * h), (u(0.0, h) - u(0.0, -h)) / (2.0 * h)];
        let scale = 1.0 + g[0].abs() + g[1].abs();
        assert!((g[0] - fd[0]).abs() < tol_grad * scale, "{} grad_x at {x:?}", prob.name);
        assert!((g[1] - fd[1]).abs() < tol_grad * scale, "{} grad_y at {x:?}", prob.name);
        let lap = (u(h, 0.0) + u(-h, 0.0) + u(0.0, h) + u(0.0, -h) - 4.0 * u(0.0, 0.0)) / (h * h);
        let f = prob.f(x);
        assert!((f + lap).abs() < tol_lap * (1.0 + f.abs()), "{} -Lap u = {} vs f = {f} at {x:?}", prob.name, -lap);
    }
}

#[test]
fn finite_difference_consistency() {
    for name in ["u1", "u2", "u3"] {
        check_derivatives(&make_problem(name).unwrap(), 1e-6, 1e-3);
    }
    // the bump has second derivatives of order 1e4
    check_derivatives(&make_problem("u4").unwrap(), 1e-5, 1e-3);
}

#[test]
fn u3_vanishes_on_reentrant_edges() {
    let p = make_problem("u3").unwrap();
    for k in 1..10 {
        let t = k as f64 / 10.0;
        assert!(p.u([-t, 0.0]).abs() < 1e-15);
        assert!(p.u([0.0, -t]).abs() < 1e-15);
    }
    assert_eq!(p.u([0.0, 0.0]), 0.0);
}

#[test]
fn boundary_data_matches_solution() {
    for name in ["u1", "u2", "u3", "u4"] {
        let p = make_problem(name).unwrap();
        for x in samples(p.domain) {
            assert_eq!(p.g(x), p.u(x));
        }
    }
    assert!(make_problem("u9").is_err());
}

fn gauss_on(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let r = gauss_legendre::<f64>(n);
    r.nodes.iter().zip(&r.weights).map(|(&t, &w)| 0.5 * (b - a) * w * f(0.5 * (a + b) + 0.5 * (b - a) * t)).sum()
}

#[test]
fn seminorms_against_independent_integrals() {
    let u1 = make_problem("u1").unwrap();
    assert!((u1.h1_seminorm() - PI / 2f64.sqrt()).abs() < 1e-12);

    // |grad u3|^2 = (4/9) r^{-2/3}; radial integral up to the square boundary
    let u3 = make_problem("u3").unwrap();
    let reach = |t: f64| 1.0 / t.cos().abs().max(t.sin().abs());
    let q = PI / 4.0;
    let mut s = 0.0;
    for (a, b) in [(-2.0 * q, -q), (-q, q), (q, 3.0 * q), (3.0 * q, 4.0 * q)] {
        s += gauss_on(a, b, 40, |t| reach(t).powf(4.0 / 3.0) / 3.0);
    }
    assert!((u3.h1_seminorm() - s.sqrt()).abs() < 1e-10, "{} vs {}", u3.h1_seminorm(), s.sqrt());

    // separable bump: |u4|^2 = 2 (int g'^2)(int g^2)
    let u4 = make_problem("u4").unwrap();
    let g = |t: f64| t * (1.0 - t) * (-100.0 * (t - 0.5).powi(2)).exp();
    let dg = |t: f64| ((1.0 - 2.0 * t) - 200.0 * (t - 0.5) * t * (1.0 - t)) * (-100.0 * (t - 0.5).powi(2)).exp();
    let pieces =
        |f: &dyn Fn(f64) -> f64| (0..10).map(|k| gauss_on(k as f64 / 10.0, (k + 1) as f64 / 10.0, 30, f)).sum::<f64>();
    let expect = (2.0 * pieces(&|t| dg(t) * dg(t)) * pieces(&|t| g(t) * g(t))).sqrt();
    assert!((u4.h1_seminorm() - expect).abs() < 1e-12 * expect, "{} vs {expect}", u4.h1_seminorm());
}

#[test]
fn energy_error_of_exact_polynomial_is_zero_and_positive_otherwise() {
    let mesh = Domain::UnitSquare.cartesian(2).unwrap();
    let disc = Discretization::new(mesh, &[3; 4]).unwrap();
    let u1 = make_problem("u1").unwrap();
    let e = energy_error(&u1, &disc, &disc.interpolate(|x| u1.u(x)));
    assert!(e.relative > 1e-4 && e.relative < 0.5);
    assert!((e.absolute / u1.h1_seminorm() - e.relative).abs() < 1e-15);
}

#[test]
fn effectivity_conventions() {
    assert_eq!(effectivity(2.0, 1.0, 1e-14), 2.0);
    assert!(effectivity(0.0, 0.0, 1e-14).is_nan());
    assert_eq!(effectivity(1.0, 0.0, 1e-14), f64::INFINITY);
}
