//! Regularized delta functions: smooth bumps supported in one element that
//! reproduce point values of finite element functions.
//!
//! The bump is `b(x) = ((1 - s^2)_+)^4` with `s` the distance to the anchor
//! scaled by the largest disk around the anchor inside the host triangle;
//! `b` is C^3 and compactly supported. The pre-factor `q` is a polynomial
//! of degree `<= r` solving the moment system `(q b, p) = p(x0)` for all
//! polynomials `p` of degree `<= r`. All integrals over the support disk
//! of polynomial integrands are evaluated by an exact polar rule.

use std::sync::Arc;

use super::{FeSpace, Field, InteriorSystem};
use crate::error::{Error, Result};
use crate::geom::{point_segment_dist, Point2};
use crate::mesh::Mesh;
use crate::quad::{disk_rule, disk_rule_counts, map_to_triangle, tri_rule};

/// Monomial exponents `(a, b)` in shifted coordinates, degrees `0..=r`.
fn monomials(r: u32) -> Vec<(u32, u32)> {
    let mut m = Vec::new();
    for d in 0..=r {
        for a in (0..=d).rev() {
            m.push((a, d - a));
        }
    }
    m
}

/// A regularized point evaluator supported inside one mesh element.
#[derive(Debug, Clone)]
pub struct RegularizedDelta {
    pub x0: Point2,
    pub host_tri: usize,
    /// Support radius (distance from the anchor to the host boundary).
    pub radius: f64,
    /// Polynomial degree of the pre-factor (the space degree `r`).
    pub degree: u32,
    /// Coefficients of `q` in the shifted monomial basis.
    pub q_coeffs: Vec<f64>,
    /// Max residual of the moment system.
    pub moment_residual: f64,
}

impl RegularizedDelta {
    /// Value at a point (zero outside the support disk).
    pub fn eval(&self, p: Point2) -> f64 {
        let u = p.x - self.x0.x;
        let v = p.y - self.x0.y;
        let s2 = (u * u + v * v) / (self.radius * self.radius);
        if s2 >= 1.0 {
            return 0.0;
        }
        let bump = (1.0 - s2).powi(4);
        let mut q = 0.0;
        for (c, &(a, b)) in self.q_coeffs.iter().zip(&monomials(self.degree)) {
            q += c * u.powi(a as i32) * v.powi(b as i32);
        }
        q * bump
    }

    /// `L1` norm by a dense polar rule (the integrand is piecewise smooth
    /// but not polynomial because of the modulus).
    pub fn l1_norm(&self) -> f64 {
        disk_rule_counts(self.x0, self.radius, 48, 128)
            .iter()
            .map(|&(p, w)| w * self.eval(p).abs())
            .sum()
    }
}

/// Construct the regularized delta anchored at `x0`, which must lie
/// strictly inside a triangle (anchors on edges have no room for the
/// support disk).
pub fn construct_regularized_delta(mesh: &Mesh, x0: Point2, r: u32) -> Result<RegularizedDelta> {
    if r != 1 && r != 2 {
        return Err(Error::invalid(format!("unsupported degree {r}")));
    }
    let host_tri = mesh
        .locate(x0)
        .ok_or_else(|| Error::invalid(format!("x0 = ({}, {}) outside domain", x0.x, x0.y)))?;
    let (a, b, c) = mesh.tri_points(host_tri);
    let radius = point_segment_dist(x0, a, b)
        .min(point_segment_dist(x0, b, c))
        .min(point_segment_dist(x0, c, a));
    if radius < 1e-13 * mesh.h {
        return Err(Error::invalid(
            "x0 lies on an element edge; the regularized delta needs an interior anchor",
        ));
    }
    let mono = monomials(r);
    let m = mono.len();
    // Moment system G c = rhs with G_ij = (b p_i p_j) over the disk
    // (integrand degree 8 + 2r: exact rule) and rhs_i = p_i(x0) = [1,0,..].
    let rule = disk_rule(x0, radius, 8 + 2 * r as usize);
    let mut g = vec![0.0f64; m * m];
    for &(p, w) in &rule {
        let u = p.x - x0.x;
        let v = p.y - x0.y;
        let s2 = (u * u + v * v) / (radius * radius);
        let bump = (1.0 - s2).max(0.0).powi(4);
        let vals: Vec<f64> = mono
            .iter()
            .map(|&(aa, bb)| u.powi(aa as i32) * v.powi(bb as i32))
            .collect();
        for i in 0..m {
            for j in 0..m {
                g[i * m + j] += w * bump * vals[i] * vals[j];
            }
        }
    }
    let mut rhs = vec![0.0f64; m];
    rhs[0] = 1.0;
    let coeffs = solve_dense(&mut g.clone(), &rhs, m)?;
    // residual check
    let mut residual = 0.0f64;
    for i in 0..m {
        let mut s = 0.0;
        for j in 0..m {
            s += g[i * m + j] * coeffs[j];
        }
        residual = residual.max((s - rhs[i]).abs());
    }
    if residual > 1e-10 {
        return Err(Error::Internal(format!(
            "moment system residual {residual:.3e} exceeds 1e-10"
        )));
    }
    Ok(RegularizedDelta {
        x0,
        host_tri,
        radius,
        degree: r,
        q_coeffs: coeffs,
        moment_residual: residual,
    })
}

/// Load vector `(delta, phi_i)` on a space whose mesh either hosts the
/// delta directly or is a nested refinement of it (`ancestors[t] = host
/// mesh triangle`).
pub fn delta_load(
    space: &Arc<FeSpace>,
    delta: &RegularizedDelta,
    ancestors: Option<&[usize]>,
) -> Vec<f64> {
    let mesh = space.mesh();
    let nl = space.n_local();
    let mut load = vec![0.0f64; space.num_dofs()];
    let mut shp = vec![0.0f64; nl];
    match ancestors {
        None => {
            // Same mesh: the support disk lies inside the host triangle and
            // the integrand is a polynomial there; the polar rule is exact.
            let deg = 8 + (delta.degree + space.degree()) as usize;
            let t = delta.host_tri;
            let dofs = space.elem_dofs(t);
            for (p, w) in disk_rule(delta.x0, delta.radius, deg) {
                let dv = delta.eval_unclipped(p);
                space.shape_at(t, p, &mut shp);
                for k in 0..nl {
                    load[dofs[k]] += w * dv * shp[k];
                }
            }
        }
        Some(anc) => {
            let deg = 8 + (delta.degree + space.degree()) as usize;
            let rule = tri_rule(deg.min(12));
            for t in 0..mesh.num_triangles() {
                if anc[t] != delta.host_tri {
                    continue;
                }
                let (a, b, c) = mesh.tri_points(t);
                integrate_delta_on_tri(space, delta, t, a, b, c, &rule, &mut load, &mut shp, 0);
            }
        }
    }
    load
}

/// Project the regularized delta onto the zero-trace subspace of `sys`
/// (this equals the discrete delta when the meshes coincide).
pub fn project_delta(
    sys: &InteriorSystem,
    delta: &RegularizedDelta,
    ancestors: Option<&[usize]>,
) -> Result<Field> {
    let load = delta_load(sys.space(), delta, ancestors);
    let li = sys.gather_interior(&load);
    let f = sys.factor_real(1.0, 0.0)?;
    let ci = f.solve(&li);
    Ok(Field::new(sys.space().clone(), sys.scatter_interior(&ci)))
}

impl RegularizedDelta {
    /// Evaluation without the support clip: valid only for points known to
    /// lie inside the disk (quadrature nodes of the exact polar rule).
    fn eval_unclipped(&self, p: Point2) -> f64 {
        let u = p.x - self.x0.x;
        let v = p.y - self.x0.y;
        let s2 = (u * u + v * v) / (self.radius * self.radius);
        let bump = (1.0 - s2).powi(4);
        let mut q = 0.0;
        for (c, &(a, b)) in self.q_coeffs.iter().zip(&monomials(self.degree)) {
            q += c * u.powi(a as i32) * v.powi(b as i32);
        }
        q * bump
    }
}

/// Integrate `delta * phi` over one fine triangle, splitting triangles that
/// straddle the support rim (where the integrand is only C^3).
#[allow(clippy::too_many_arguments)]
fn integrate_delta_on_tri(
    space: &Arc<FeSpace>,
    delta: &RegularizedDelta,
    t: usize,
    a: Point2,
    b: Point2,
    c: Point2,
    rule: &[crate::quad::TriPoint],
    load: &mut [f64],
    shp: &mut [f64],
    depth: u32,
) {
    let dmin = point_tri_min_dist(delta.x0, a, b, c);
    if dmin >= delta.radius {
        return; // fully outside the support
    }
    let dmax = delta
        .x0
        .dist(a)
        .max(delta.x0.dist(b))
        .max(delta.x0.dist(c));
    let crossing = dmax > delta.radius;
    if crossing && depth < 4 {
        let (mab, mbc, mca) = (a.midpoint(b), b.midpoint(c), c.midpoint(a));
        for &(p, q, r) in &[
            (a, mab, mca),
            (mab, b, mbc),
            (mca, mbc, c),
            (mab, mbc, mca),
        ] {
            integrate_delta_on_tri(space, delta, t, p, q, r, rule, load, shp, depth + 1);
        }
        return;
    }
    let nl = space.n_local();
    let dofs: Vec<usize> = space.elem_dofs(t).to_vec();
    for (p, w) in map_to_triangle(rule, a, b, c) {
        let dv = delta.eval(p);
        if dv == 0.0 {
            continue;
        }
        space.shape_at(t, p, shp);
        for k in 0..nl {
            load[dofs[k]] += w * dv * shp[k];
        }
    }
}

fn point_tri_min_dist(p: Point2, a: Point2, b: Point2, c: Point2) -> f64 {
    if crate::geom::point_in_triangle(p, a, b, c, 0.0) {
        return 0.0;
    }
    point_segment_dist(p, a, b)
        .min(point_segment_dist(p, b, c))
        .min(point_segment_dist(p, c, a))
}

/// Dense Gaussian elimination with partial pivoting (tiny systems).
fn solve_dense(g: &mut [f64], rhs: &[f64], m: usize) -> Result<Vec<f64>> {
    let mut x = rhs.to_vec();
    for col in 0..m {
        let mut piv = col;
        for row in (col + 1)..m {
            if g[row * m + col].abs() > g[piv * m + col].abs() {
                piv = row;
            }
        }
        if g[piv * m + col].abs() < 1e-300 {
            return Err(Error::Internal("singular moment system".into()));
        }
        if piv != col {
            for k in 0..m {
                g.swap(col * m + k, piv * m + k);
            }
            x.swap(col, piv);
        }
        for row in (col + 1)..m {
            let f = g[row * m + col] / g[col * m + col];
            for k in col..m {
                g[row * m + k] -= f * g[col * m + k];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..m).rev() {
        for k in (col + 1)..m {
            x[col] -= g[col * m + k] * x[k];
        }
        x[col] /= g[col * m + col];
    }
    Ok(x)
}
