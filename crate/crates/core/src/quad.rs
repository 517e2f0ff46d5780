//! Quadrature rules: Gauss–Legendre on intervals, collapsed tensor rules on
//! triangles, and polar rules on disks.
//!
//! Triangle rules are built from a Duffy-type collapse of a tensor
//! Gauss–Legendre grid, which integrates bivariate polynomials of total
//! degree `d` exactly when each direction uses `ceil((d + 2) / 2)` points.
//! Disk rules combine a radial Gauss rule with an equispaced (trapezoidal)
//! angular grid; the angular rule is exact for trigonometric polynomials of
//! degree below the point count, so the pair is exact for polynomials on
//! the disk.

use crate::geom::{signed_area2, Point2};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut nodes = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[n - 1 - i] = (x, w);
        nodes[i] = (-x, w);
    }
    nodes
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Quadrature point on the reference triangle `{(0,0),(1,0),(0,1)}` with
/// weight normalized so weights sum to the triangle area `1/2`.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub xi: f64,
    pub eta: f64,
    pub w: f64,
}

/// Rule on the reference triangle exact for total degree `deg`.
pub fn tri_rule(deg: usize) -> Vec<TriPoint> {
    let m = (deg + 2).div_ceil(2);
    let gu = gauss_legendre_on(0.0, 1.0, m);
    let gv = gauss_legendre_on(0.0, 1.0, m);
    let mut pts = Vec::with_capacity(m * m);
    for &(u, wu) in &gu {
        for &(v, wv) in &gv {
            // Duffy collapse: (xi, eta) = (u, v (1 - u)), Jacobian (1 - u).
            pts.push(TriPoint {
                xi: u,
                eta: v * (1.0 - u),
                w: wu * wv * (1.0 - u),
            });
        }
    }
    pts
}

/// Map a reference rule to the physical triangle `(a, b, c)`; weights carry
/// the physical area factor.
pub fn map_to_triangle(rule: &[TriPoint], a: Point2, b: Point2, c: Point2) -> Vec<(Point2, f64)> {
    let jac = signed_area2(a, b, c).abs();
    rule.iter()
        .map(|p| {
            let x = a.x + (b.x - a.x) * p.xi + (c.x - a.x) * p.eta;
            let y = a.y + (b.y - a.y) * p.xi + (c.y - a.y) * p.eta;
            (Point2::new(x, y), p.w * jac)
        })
        .collect()
}

/// Polar product rule on the disk of radius `radius` centered at `center`,
/// exact for polynomials of total degree `<= deg`.
pub fn disk_rule(center: Point2, radius: f64, deg: usize) -> Vec<(Point2, f64)> {
    // Radial integrand r^{k+1}, k <= deg: Gauss with ceil((deg + 3)/2) pts.
    let n_r = (deg + 3).div_ceil(2);
    // Trapezoid with n_t points is exact for trig degree n_t - 1.
    let n_t = deg + 2;
    disk_rule_counts(center, radius, n_r, n_t)
}

/// Polar product rule with explicit point counts (for non-polynomial
/// integrands where density is chosen by the caller).
pub fn disk_rule_counts(
    center: Point2,
    radius: f64,
    n_r: usize,
    n_t: usize,
) -> Vec<(Point2, f64)> {
    let gr = gauss_legendre_on(0.0, radius, n_r);
    let dtheta = 2.0 * std::f64::consts::PI / n_t as f64;
    let mut pts = Vec::with_capacity(n_r * n_t);
    for &(r, wr) in &gr {
        for j in 0..n_t {
            let th = dtheta * j as f64;
            pts.push((
                Point2::new(center.x + r * th.cos(), center.y + r * th.sin()),
                wr * r * dtheta,
            ));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_tri_exact(p: usize, q: usize) -> f64 {
        // Integral of xi^p eta^q over the reference triangle:
        // p! q! / (p + q + 2)!.
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        fact(p) * fact(q) / fact(p + q + 2)
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..=10 {
            let rule = gauss_legendre(n);
            for deg in 0..=(2 * n - 1) {
                let num: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 0 {
                    2.0 / (deg as f64 + 1.0)
                } else {
                    0.0
                };
                assert!(
                    (num - exact).abs() < 1e-13,
                    "n={n} deg={deg}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn tri_rule_exactness() {
        for deg in 0..=12 {
            let rule = tri_rule(deg);
            for p in 0..=deg {
                for q in 0..=(deg - p) {
                    let num: f64 = rule
                        .iter()
                        .map(|t| t.w * t.xi.powi(p as i32) * t.eta.powi(q as i32))
                        .sum();
                    let exact = monomial_tri_exact(p, q);
                    assert!(
                        (num - exact).abs() < 1e-13,
                        "deg={deg} p={p} q={q}: {num} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn disk_rule_exactness() {
        // Closed-form disk moments around the center: zero for odd powers;
        // for even a, b: 2 pi rho^{a+b+2} / (a+b+2) * (a-1)!!(b-1)!!/(a+b)!!.
        fn dfact(n: i64) -> f64 {
            if n <= 0 {
                1.0
            } else {
                let mut p = 1.0;
                let mut k = n;
                while k > 0 {
                    p *= k as f64;
                    k -= 2;
                }
                p
            }
        }
        let c = Point2::new(0.3, -0.2);
        let rho = 0.7;
        let rule = disk_rule(c, rho, 12);
        for a in 0..=12usize {
            for b in 0..=(12 - a) {
                let num: f64 = rule
                    .iter()
                    .map(|&(p, w)| w * (p.x - c.x).powi(a as i32) * (p.y - c.y).powi(b as i32))
                    .sum();
                let exact = if a % 2 == 1 || b % 2 == 1 {
                    0.0
                } else {
                    2.0 * std::f64::consts::PI * rho.powi((a + b + 2) as i32)
                        / (a + b + 2) as f64
                        * dfact(a as i64 - 1)
                        * dfact(b as i64 - 1)
                        / dfact((a + b) as i64)
                };
                assert!(
                    (num - exact).abs() < 1e-12 * (1.0 + exact.abs()),
                    "a={a} b={b}: {num} vs {exact}"
                );
            }
        }
    }
}
