//! One-dimensional Gauss rules on [-1, 1].

use crate::scalar::Scalar;

const MAX_NEWTON: usize = 100;

/// Gauss-Lobatto rule with `p + 1` nodes, exact for degree `2p - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLobattoRule<T = f64> {
    pub degree: usize,
    /// Ascending nodes, `nodes[0] = -1` and `nodes[p] = 1`.
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussLobattoRule<T> {
    /// The `p - 1` nodes strictly inside (-1, 1).
    pub fn interior(&self) -> &[T] {
        &self.nodes[1..self.degree]
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Gauss-Legendre rule with `n` nodes, exact for degree `2n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule<T = f64> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Smallest rule integrating polynomials of degree `order` exactly.
    pub fn for_order(order: usize) -> Self {
        gauss_legendre(order / 2 + 1)
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// Legendre polynomial `P_n(x)` together with `P_{n-1}(x)`.
pub fn legendre_pair<T: Scalar>(n: usize, x: T) -> (T, T) {
    if n == 0 {
        return (T::one(), T::zero());
    }
    let mut prev = T::one();
    let mut cur = x;
    for k in 2..=n {
        let kf = T::from_usize(k);
        let next = ((T::two() * kf - T::one()) * x * cur - (kf - T::one()) * prev) / kf;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Values `P_0(x), ..., P_n(x)`.
pub fn legendre_all<T: Scalar>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        let kf = T::from_usize(k);
        let next = ((T::two() * kf - T::one()) * x * out[k - 1] - (kf - T::one()) * out[k - 2]) / kf;
        out.push(next);
    }
    out
}

pub fn gauss_legendre<T: Scalar>(n: usize) -> GaussRule<T> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let nf = T::from_usize(n);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let theta = T::PI() * (T::from_usize(i + 1) - T::lit(0.25)) / (nf + T::half());
        let mut x = theta.cos();
        let mut dp = T::one();
        for _ in 0..MAX_NEWTON {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (x * p - pm1) / (x * x - T::one());
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= T::newton_tol() {
                let (p, pm1) = legendre_pair(n, x);
                dp = nf * (x * p - pm1) / (x * x - T::one());
                break;
            }
        }
        let w = T::two() / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    GaussRule { nodes, weights }
}

/// Gauss-Lobatto nodes: roots of `(1 - x^2) P'_p(x)`.
pub fn gauss_lobatto<T: Scalar>(p: usize) -> GaussLobattoRule<T> {
    assert!(p >= 1, "Gauss-Lobatto rule needs p >= 1");
    let n = p + 1;
    let pf = T::from_usize(p);
    let mut nodes = vec![T::zero(); n];
    nodes[0] = -T::one();
    nodes[p] = T::one();
    // Chebyshev-Gauss-Lobatto guesses; Newton on q(x) = (1 - x^2) P'_p(x),
    // using q'(x) = -p(p+1) P_p(x).
    for i in 1..p {
        let mut x = -(T::PI() * T::from_usize(i) / pf).cos();
        for _ in 0..MAX_NEWTON {
            let (pp, pm1) = legendre_pair(p, x);
            let q = pf * (pm1 - x * pp);
            let dq = -pf * (pf + T::one()) * pp;
            let dx = q / dq;
            x -= dx;
            if dx.abs() <= T::newton_tol() {
                break;
            }
        }
        nodes[i] = x;
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let s = (nodes[n - 1 - i] - nodes[i]) * T::half();
        nodes[i] = -s;
        nodes[n - 1 - i] = s;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    let c = T::two() / (pf * (pf + T::one()));
    let weights = nodes
        .iter()
        .map(|&x| {
            let (pp, _) = legendre_pair(p, x);
            c / (pp * pp)
        })
        .collect();
    GaussLobattoRule { degree: p, nodes, weights }
}

fn jacobi_eval<T: Scalar>(n: usize, a: T, b: T, x: T) -> (T, T) {
    // returns (P_n, P_{n-1})
    if n == 0 {
        return (T::one(), T::zero());
    }
    let two = T::two();
    let mut prev = T::one();
    let mut cur = (a - b) * T::half() + (a + b + two) * T::half() * x;
    for k in 2..=n {
        let kf = T::from_usize(k);
        let c = two * kf + a + b;
        let a1 = two * kf * (kf + a + b) * (c - two);
        let a2 = (c - T::one()) * (a * a - b * b);
        let a3 = (c - two) * (c - T::one()) * c;
        let a4 = two * (kf + a - T::one()) * (kf + b - T::one()) * c;
        let next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss-Jacobi rule for the weight `(1 - x)` on [-1, 1], `n` nodes.
pub fn gauss_jacobi_10<T: Scalar>(n: usize) -> GaussRule<T> {
    assert!(n >= 1);
    let a = T::one();
    let b = T::zero();
    let nf = T::from_usize(n);
    let two = T::two();
    let mut nodes: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        // Gauss-Legendre guess, deflated Newton against roots already found.
        let theta = T::PI() * (T::from_usize(n - i) - T::lit(0.25)) / (nf + T::half());
        let clamp = T::one() - T::lit(1e-3);
        let mut x = theta.cos().min(clamp).max(-clamp);
        for _ in 0..MAX_NEWTON {
            let (p, pm1) = jacobi_eval(n, a, b, x);
            let c = two * nf + a + b;
            let dp = (nf * (a - b - c * x) * p + two * (nf + a) * (nf + b) * pm1) / (c * (T::one() - x * x));
            let defl: T = nodes.iter().fold(T::zero(), |s, &r| s + T::one() / (x - r));
            let dx = p / (dp - p * defl);
            x -= dx;
            if dx.abs() <= T::newton_tol() {
                break;
            }
        }
        nodes.push(x);
    }
    nodes.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, pm1) = jacobi_eval(n, a, b, x);
            let c = two * nf + a + b;
            let dp = (nf * (a - b - c * x) * p + two * (nf + a) * (nf + b) * pm1) / (c * (T::one() - x * x));
            T::lit(4.0) / ((T::one() - x * x) * dp * dp)
        })
        .collect();
    GaussRule { nodes, weights }
}

/// Values at `x` of the Lagrange basis polynomials on `nodes`.
pub fn lagrange_basis<T: Scalar>(nodes: &[T], x: T) -> Vec<T> {
    let n = nodes.len();
    let mut out = vec![T::one(); n];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                *o *= (x - xj) / (nodes[i] - xj);
            }
        }
    }
    out
}

/// Interpolant through `(nodes, values)` evaluated at `x`.
pub fn lagrange_eval<T: Scalar>(nodes: &[T], values: &[T], x: T) -> T {
    lagrange_basis(nodes, x).iter().zip(values).fold(T::zero(), |acc, (&l, &v)| acc + l * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lobatto_p1_is_endpoint_rule() {
        let r = gauss_lobatto::<f64>(1);
        assert_eq!(r.nodes, vec![-1.0, 1.0]);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lobatto_p2_matches_moment_equations() {
        // Exactness on 1, x, x^2 with nodes {-1, 0, 1}: w0 + w1 + w2 = 2, w2 - w0 = 0,
        // w0 + w2 = 2/3, hence w = {1/3, 4/3, 1/3}.
        let r = gauss_lobatto::<f64>(2);
        let expect = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for (w, e) in r.weights.iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
        assert_eq!(r.nodes[1], 0.0);
    }

    #[test]
    fn lobatto_p4_integrates_x6() {
        let r = gauss_lobatto::<f64>(4);
        let v = r.integrate(|x| x.powi(6));
        assert!((v - 2.0 / 7.0).abs() < 1e-13);
    }

    #[test]
    fn lobatto_exact_to_2p_minus_1() {
        for p in 1..=16 {
            let r = gauss_lobatto::<f64>(p);
            for k in 0..=(2 * p - 1) {
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert!((r.integrate(|x| x.powi(k as i32)) - exact).abs() < 1e-13, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn legendre_rule_exactness() {
        for n in 1..=20 {
            let r = gauss_legendre::<f64>(n);
            for k in 0..(2 * n) {
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert!((r.integrate(|x| x.powi(k as i32)) - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn jacobi_rule_exactness() {
        for n in 1..=15 {
            let r = gauss_jacobi_10::<f64>(n);
            for k in 0..(2 * n) {
                // int (1-x) x^k
                let m = |j: usize| if j % 2 == 0 { 2.0 / (j as f64 + 1.0) } else { 0.0 };
                let exact = m(k) - m(k + 1);
                let v = r.integrate(|x| x.powi(k as i32));
                assert!((v - exact).abs() < 1e-13, "n={n} k={k}: {v} vs {exact}");
            }
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn single_precision_lobatto() {
        let r = gauss_lobatto::<f32>(3);
        assert!((r.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-6);
    }
}
