//! Norm evaluation on regions.
//!
//! The sup norm is taken over a fixed per-element sample lattice (exact for
//! P1 at the vertices); L2 and the H1 seminorm use exact polynomial
//! integration; L1 norms of non-polynomial moduli use a degree-4 rule,
//! except the gradient of a P1 field which is constant per element and
//! integrates exactly.

use super::Field;
use crate::geom::{signed_area2, Point2};
use crate::mesh::Region;
use crate::quad::tri_rule;
use crate::sparse::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Linf,
    L2,
    L1,
    H1Semi,
    /// `L1` norm of the gradient modulus.
    GradL1,
}

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    /// Barycentric lattice order for the sup norm: all points whose
    /// barycentric coordinates are multiples of `1/q`, plus the barycenter.
    pub linf_lattice_order: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            linf_lattice_order: 2,
        }
    }
}

pub fn norm<T: Scalar>(field: &Field<T>, kind: NormKind, region: Option<&Region>) -> f64 {
    norm_with_options(field, kind, region, NormOptions::default())
}

pub fn norm_with_options<T: Scalar>(
    field: &Field<T>,
    kind: NormKind,
    region: Option<&Region>,
    opts: NormOptions,
) -> f64 {
    let space = field.space().clone();
    let mesh = space.mesh();
    let all: Vec<usize>;
    let elems: &[usize] = match region {
        Some(r) => &r.element_ids,
        None => {
            all = (0..mesh.num_triangles()).collect();
            &all
        }
    };
    match kind {
        NormKind::Linf => {
            let pts = lattice(opts.linf_lattice_order);
            let mut sup = 0.0f64;
            for &t in elems {
                let (a, b, c) = mesh.tri_points(t);
                for &(l1, l2) in &pts {
                    let p = ref_to_phys(a, b, c, l1, l2);
                    sup = sup.max(field.eval_on_elem(t, p).modulus());
                }
            }
            sup
        }
        NormKind::L2 => {
            let rule = tri_rule(2 * space.degree() as usize);
            let mut s = 0.0;
            for &t in elems {
                let (a, b, c) = mesh.tri_points(t);
                let jac = signed_area2(a, b, c);
                for q in &rule {
                    let p = ref_to_phys(a, b, c, q.xi, q.eta);
                    let v = field.eval_on_elem(t, p).modulus();
                    s += q.w * jac * v * v;
                }
            }
            s.sqrt()
        }
        NormKind::L1 => {
            let rule = tri_rule(4);
            let mut s = 0.0;
            for &t in elems {
                let (a, b, c) = mesh.tri_points(t);
                let jac = signed_area2(a, b, c);
                for q in &rule {
                    let p = ref_to_phys(a, b, c, q.xi, q.eta);
                    s += q.w * jac * field.eval_on_elem(t, p).modulus();
                }
            }
            s
        }
        NormKind::H1Semi => {
            let rule = tri_rule(2 * (space.degree() as usize).saturating_sub(1).max(1));
            let mut s = 0.0;
            for &t in elems {
                let (a, b, c) = mesh.tri_points(t);
                let jac = signed_area2(a, b, c);
                for q in &rule {
                    let (gx, gy) = field.grad_on_elem_ref(t, q.xi, q.eta);
                    let g2 = gx.modulus().powi(2) + gy.modulus().powi(2);
                    s += q.w * jac * g2;
                }
            }
            s.sqrt()
        }
        NormKind::GradL1 => {
            if space.degree() == 1 {
                // gradient constant per element: exact
                let mut s = 0.0;
                for &t in elems {
                    let (gx, gy) = field.grad_on_elem_ref(t, 1.0 / 3.0, 1.0 / 3.0);
                    let gmod = (gx.modulus().powi(2) + gy.modulus().powi(2)).sqrt();
                    s += mesh.tri_area(t) * gmod;
                }
                s
            } else {
                let rule = tri_rule(4);
                let mut s = 0.0;
                for &t in elems {
                    let (a, b, c) = mesh.tri_points(t);
                    let jac = signed_area2(a, b, c);
                    for q in &rule {
                        let (gx, gy) = field.grad_on_elem_ref(t, q.xi, q.eta);
                        let gmod = (gx.modulus().powi(2) + gy.modulus().powi(2)).sqrt();
                        s += q.w * jac * gmod;
                    }
                }
                s
            }
        }
    }
}

fn ref_to_phys(a: Point2, b: Point2, c: Point2, xi: f64, eta: f64) -> Point2 {
    Point2::new(
        a.x + (b.x - a.x) * xi + (c.x - a.x) * eta,
        a.y + (b.y - a.y) * xi + (c.y - a.y) * eta,
    )
}

/// Reference sample lattice: barycentric multiples of `1/q` plus the
/// barycenter, as `(xi, eta)` pairs.
fn lattice(q: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 0..=q {
        for j in 0..=(q - i) {
            pts.push((i as f64 / q as f64, j as f64 / q as f64));
        }
    }
    pts.push((1.0 / 3.0, 1.0 / 3.0));
    pts
}

/// Maximum of `|field|` over the boundary dofs (sup norm of the trace for
/// nodal data).
pub fn boundary_sup<T: Scalar>(field: &Field<T>) -> f64 {
    field
        .space()
        .boundary_dofs()
        .iter()
        .map(|&d| field.values[d].modulus())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_stiffness, FeSpace};
    use crate::mesh::{boundary_band, build_polygon_mesh, refine_to_level, Polygon};
    use std::sync::Arc;

    fn space(levels: u32, degree: u32) -> Arc<FeSpace> {
        let mesh = refine_to_level(
            &build_polygon_mesh(&Polygon::unit_square(), None).unwrap(),
            levels,
        );
        FeSpace::build(Arc::new(mesh), degree).unwrap()
    }

    #[test]
    fn constant_field_norms() {
        let s = space(2, 1);
        let f = Field::constant(s, -3.0f64);
        assert_eq!(norm(&f, NormKind::Linf, None), 3.0);
        assert!((norm(&f, NormKind::L2, None) - 3.0).abs() < 1e-13); // |Omega| = 1
        assert!(norm(&f, NormKind::H1Semi, None) < 1e-13);
        assert!((norm(&f, NormKind::L1, None) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn h1_semi_matches_stiffness_quadratic_form() {
        for degree in [1u32, 2] {
            let s = space(3, degree);
            let hat = s
                .interpolate(|p| (1.0 - 4.0 * (p.x - 0.5).abs()).max(0.0) * p.y)
                .unwrap();
            let a = assemble_stiffness(&s);
            let av = a.matvec(&hat.values);
            let quad: f64 = hat.values.iter().zip(&av).map(|(x, y)| x * y).sum();
            let h1 = norm(&hat, NormKind::H1Semi, None);
            assert!(
                (h1 * h1 - quad).abs() < 1e-12 * (1.0 + quad.abs()),
                "degree {degree}: {} vs {quad}",
                h1 * h1
            );
        }
    }

    #[test]
    fn grad_l1_band_vs_cauchy_schwarz() {
        let s = space(4, 1);
        let u = s.interpolate(|p| (3.0 * p.x).sin() * p.y).unwrap();
        let band = boundary_band(s.mesh(), s.mesh().h).unwrap();
        let band_area: f64 = band.element_ids.iter().map(|&t| s.mesh().tri_area(t)).sum();
        let l1 = norm(&u, NormKind::GradL1, Some(&band));
        let h1_global = norm(&u, NormKind::H1Semi, None);
        assert!(l1 <= h1_global * band_area.sqrt() * (1.0 + 1e-12));
        assert!(l1 > 0.0);
    }

    #[test]
    fn region_restriction() {
        let s = space(2, 1);
        let f = s.interpolate(|p| p.x).unwrap();
        let region = Region::new(vec![0, 1], "two elements");
        let partial = norm(&f, NormKind::L1, Some(&region));
        let full = norm(&f, NormKind::L1, None);
        assert!(partial < full);
    }
}
