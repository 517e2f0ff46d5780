//! Lagrange finite element spaces of degree 1 and 2 on triangulations:
//! spaces, coefficient fields, operators, projections, delta functions and
//! norms.

mod assemble;
mod basis;
mod delta;
mod norm;
mod ops;

pub use assemble::{assemble_mass, assemble_stiffness, SparseOperator};
pub use delta::{construct_regularized_delta, delta_load, RegularizedDelta};
pub use norm::{boundary_sup, norm, norm_with_options, NormKind, NormOptions};
pub use ops::InteriorSystem;

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{barycentric, Point2};
use crate::mesh::Mesh;
use crate::sparse::Scalar;

/// A Lagrange finite element space `S_h` of degree 1 or 2 with its
/// boundary/interior dof split (`S_h` vs the zero-trace subspace).
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    degree: u32,
    dof_coords: Vec<Point2>,
    /// Per-element dof indices, `n_local` entries per element.
    elem_dofs: Vec<usize>,
    boundary_dofs: Vec<usize>,
    interior_dofs: Vec<usize>,
    is_boundary: Vec<bool>,
    /// Position of a dof in `interior_dofs`, or `usize::MAX`.
    interior_pos: Vec<usize>,
}

impl FeSpace {
    pub fn build(mesh: Arc<Mesh>, degree: u32) -> Result<Arc<FeSpace>> {
        if degree != 1 && degree != 2 {
            return Err(Error::invalid(format!(
                "unsupported element degree {degree}; only 1 and 2"
            )));
        }
        let n_nodes = mesh.num_nodes();
        let mut dof_coords: Vec<Point2> = mesh.nodes.clone();
        let n_local = basis::n_local(degree);
        let mut elem_dofs = Vec::with_capacity(n_local * mesh.num_triangles());

        // Edge numbering (degree 2): sorted node pairs in order.
        let mut edge_ids: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
        if degree == 2 {
            for tri in &mesh.triangles {
                for e in 0..3 {
                    let (a, b) = (tri[e], tri[(e + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    edge_ids.entry(key).or_insert(0);
                }
            }
            for (rank, (key, id)) in edge_ids.iter_mut().enumerate() {
                *id = n_nodes + rank;
                dof_coords.push(mesh.nodes[key.0].midpoint(mesh.nodes[key.1]));
            }
        }
        for tri in &mesh.triangles {
            elem_dofs.extend_from_slice(&tri[..]);
            if degree == 2 {
                for e in 0..3 {
                    let (a, b) = (tri[e], tri[(e + 1) % 3]);
                    elem_dofs.push(edge_ids[&(a.min(b), a.max(b))]);
                }
            }
        }

        let mut is_boundary = vec![false; dof_coords.len()];
        for &(i, j, _) in &mesh.boundary_edges {
            is_boundary[i] = true;
            is_boundary[j] = true;
            if degree == 2 {
                is_boundary[edge_ids[&(i.min(j), i.max(j))]] = true;
            }
        }
        let boundary_dofs: Vec<usize> = (0..dof_coords.len()).filter(|&i| is_boundary[i]).collect();
        let interior_dofs: Vec<usize> =
            (0..dof_coords.len()).filter(|&i| !is_boundary[i]).collect();
        let mut interior_pos = vec![usize::MAX; dof_coords.len()];
        for (p, &d) in interior_dofs.iter().enumerate() {
            interior_pos[d] = p;
        }
        Ok(Arc::new(FeSpace {
            mesh,
            degree,
            dof_coords,
            elem_dofs,
            boundary_dofs,
            interior_dofs,
            is_boundary,
            interior_pos,
        }))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn dof_coords(&self) -> &[Point2] {
        &self.dof_coords
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn interior_dofs(&self) -> &[usize] {
        &self.interior_dofs
    }

    pub fn is_boundary_dof(&self, i: usize) -> bool {
        self.is_boundary[i]
    }

    pub fn interior_pos(&self, dof: usize) -> Option<usize> {
        let p = self.interior_pos[dof];
        (p != usize::MAX).then_some(p)
    }

    pub fn n_local(&self) -> usize {
        basis::n_local(self.degree)
    }

    /// Dof indices of element `t`.
    pub fn elem_dofs(&self, t: usize) -> &[usize] {
        let n = self.n_local();
        &self.elem_dofs[t * n..(t + 1) * n]
    }

    /// Nodal interpolation `I_h f` at all dof coordinates.
    pub fn interpolate(self: &Arc<Self>, f: impl Fn(Point2) -> f64) -> Result<Field> {
        let mut values = Vec::with_capacity(self.num_dofs());
        for (i, &p) in self.dof_coords.iter().enumerate() {
            let v = f(p);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "interpolated function not finite at dof {i} = ({}, {})",
                    p.x, p.y
                )));
            }
            values.push(v);
        }
        Ok(Field::new(self.clone(), values))
    }

    /// Shape values of all local basis functions of element `t` at a
    /// physical point (by barycentric pullback).
    pub fn shape_at(&self, t: usize, p: Point2, out: &mut [f64]) {
        let (a, b, c) = self.mesh.tri_points(t);
        let (_, l1, l2) = barycentric(p, a, b, c);
        basis::shape(self.degree, l1, l2, out);
    }

    /// Physical gradients of all local basis functions at a reference point.
    pub fn grad_at_ref(&self, t: usize, xi: f64, eta: f64, out: &mut [(f64, f64)]) {
        basis::shape_grad(self.degree, xi, eta, out);
        let (a, b, c) = self.mesh.tri_points(t);
        // J = [b - a, c - a];  grad_x = J^{-T} grad_ref.
        let (j11, j12) = (b.x - a.x, c.x - a.x);
        let (j21, j22) = (b.y - a.y, c.y - a.y);
        let det = j11 * j22 - j12 * j21;
        for g in out.iter_mut() {
            let (gx, gy) = *g;
            *g = ((j22 * gx - j21 * gy) / det, (-j12 * gx + j11 * gy) / det);
        }
    }
}

/// A coefficient vector over a [`FeSpace`] (real or complex scalars).
#[derive(Debug, Clone)]
pub struct Field<T: Scalar = f64> {
    space: Arc<FeSpace>,
    pub values: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(space: Arc<FeSpace>, values: Vec<T>) -> Field<T> {
        assert_eq!(values.len(), space.num_dofs());
        Field { space, values }
    }

    pub fn zeros(space: Arc<FeSpace>) -> Field<T> {
        let n = space.num_dofs();
        Field::new(space, vec![T::zero(); n])
    }

    pub fn constant(space: Arc<FeSpace>, c: T) -> Field<T> {
        let n = space.num_dofs();
        Field::new(space, vec![c; n])
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of the FE function at a physical point inside element `t`.
    pub fn eval_on_elem(&self, t: usize, p: Point2) -> T {
        let n = self.space.n_local();
        let mut shp = [0.0f64; 6];
        self.space.shape_at(t, p, &mut shp[..n]);
        let mut s = T::zero();
        for (k, &dof) in self.space.elem_dofs(t).iter().enumerate() {
            s = s + self.values[dof] * T::from_real(shp[k]);
        }
        s
    }

    /// Value at a point located by mesh search.
    pub fn eval(&self, p: Point2) -> Option<T> {
        self.space.mesh().locate(p).map(|t| self.eval_on_elem(t, p))
    }

    /// Gradient at a reference point of element `t`.
    pub fn grad_on_elem_ref(&self, t: usize, xi: f64, eta: f64) -> (T, T) {
        let n = self.space.n_local();
        let mut grads = [(0.0f64, 0.0f64); 6];
        self.space.grad_at_ref(t, xi, eta, &mut grads[..n]);
        let (mut gx, mut gy) = (T::zero(), T::zero());
        for (k, &dof) in self.space.elem_dofs(t).iter().enumerate() {
            gx = gx + self.values[dof] * T::from_real(grads[k].0);
            gy = gy + self.values[dof] * T::from_real(grads[k].1);
        }
        (gx, gy)
    }

    /// Extract values at boundary dofs (in `boundary_dofs` order).
    pub fn boundary_values(&self) -> Vec<T> {
        self.space
            .boundary_dofs()
            .iter()
            .map(|&d| self.values[d])
            .collect()
    }

    /// Overwrite boundary dofs from a vector in `boundary_dofs` order.
    pub fn set_boundary(&mut self, vals: &[T]) {
        assert_eq!(vals.len(), self.space.boundary_dofs().len());
        for (&d, &v) in self.space.boundary_dofs().iter().zip(vals) {
            self.values[d] = v;
        }
    }

    pub fn axpy(&mut self, a: T, other: &Field<T>) {
        for (x, &y) in self.values.iter_mut().zip(&other.values) {
            *x = *x + a * y;
        }
    }

    pub fn scale(&mut self, a: T) {
        for x in self.values.iter_mut() {
            *x = *x * a;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }
}

impl Field<f64> {
    pub fn to_complex(&self) -> Field<Complex64> {
        Field::new(
            self.space.clone(),
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }
}

impl Field<Complex64> {
    pub fn real_part(&self) -> Field<f64> {
        Field::new(self.space.clone(), self.values.iter().map(|v| v.re).collect())
    }

    pub fn imag_part(&self) -> Field<f64> {
        Field::new(self.space.clone(), self.values.iter().map(|v| v.im).collect())
    }
}

/// Field snapshot: `dof value` lines, 17 significant digits; complex values
/// as `re im`.
pub fn write_field_snapshot(field: &Field<f64>) -> String {
    let mut s = String::new();
    for (i, v) in field.values.iter().enumerate() {
        let _ = writeln!(s, "{i} {v:.16e}");
    }
    s
}

pub fn write_field_snapshot_complex(field: &Field<Complex64>) -> String {
    let mut s = String::new();
    for (i, v) in field.values.iter().enumerate() {
        let _ = writeln!(s, "{i} {:.16e} {:.16e}", v.re, v.im);
    }
    s
}

pub fn read_field_snapshot(space: &Arc<FeSpace>, text: &str) -> Result<Field<f64>> {
    let mut values = vec![0.0; space.num_dofs()];
    let mut seen = 0usize;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad snapshot line: {line}")))?;
        let v: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad snapshot line: {line}")))?;
        if i >= values.len() {
            return Err(Error::Parse(format!("dof {i} out of range")));
        }
        values[i] = v;
        seen += 1;
    }
    if seen != values.len() {
        return Err(Error::Parse(format!(
            "snapshot has {seen} dofs, space expects {}",
            values.len()
        )));
    }
    Ok(Field::new(space.clone(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_polygon_mesh, refine_uniform, Polygon};

    fn square_space(levels: u32, degree: u32) -> Arc<FeSpace> {
        let mut mesh = build_polygon_mesh(&Polygon::unit_square(), None).unwrap();
        for _ in 0..levels {
            mesh = refine_uniform(&mesh);
        }
        FeSpace::build(Arc::new(mesh), degree).unwrap()
    }

    #[test]
    fn dof_counts_p1() {
        let s = square_space(0, 1);
        assert_eq!(s.num_dofs(), 4);
        assert_eq!(s.boundary_dofs().len(), 4);
        assert_eq!(s.interior_dofs().len(), 0);
        let s = square_space(1, 1);
        assert_eq!(s.num_dofs(), 9);
        assert_eq!(s.boundary_dofs().len(), 8);
        assert_eq!(s.interior_dofs().len(), 1);
    }

    #[test]
    fn dof_counts_p2() {
        let s = square_space(0, 2);
        // 4 nodes + 5 edges (4 sides + diagonal); interior = diagonal midpoint
        assert_eq!(s.num_dofs(), 9);
        assert_eq!(s.boundary_dofs().len(), 8);
        assert_eq!(s.interior_dofs().len(), 1);
        let d = s.interior_dofs()[0];
        let p = s.dof_coords()[d];
        assert!((p.x - 0.5).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unsupported_degree_rejected() {
        let mesh = build_polygon_mesh(&Polygon::unit_square(), None).unwrap();
        assert!(FeSpace::build(Arc::new(mesh), 3).is_err());
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        // affine exactly in P1
        let s = square_space(2, 1);
        let f = |p: Point2| 1.5 - 2.0 * p.x + 0.5 * p.y;
        let field = s.interpolate(f).unwrap();
        for t in 0..s.mesh().num_triangles() {
            let bc = s.mesh().barycenter(t);
            assert!((field.eval_on_elem(t, bc) - f(bc)).abs() < 1e-13);
        }
        // x^2 exactly in P2
        let s = square_space(1, 2);
        let f = |p: Point2| p.x * p.x;
        let field = s.interpolate(f).unwrap();
        for t in 0..s.mesh().num_triangles() {
            let bc = s.mesh().barycenter(t);
            assert!((field.eval_on_elem(t, bc) - f(bc)).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation_rejects_non_finite() {
        let s = square_space(1, 1);
        let res = s.interpolate(|p| 1.0 / (p.x - 0.5));
        assert!(res.is_err());
    }

    #[test]
    fn snapshot_roundtrip() {
        let s = square_space(1, 1);
        let field = s.interpolate(|p| p.x * 3.0 - p.y).unwrap();
        let text = write_field_snapshot(&field);
        let back = read_field_snapshot(&s, &text).unwrap();
        for (a, b) in back.values.iter().zip(&field.values) {
            assert_eq!(a, b);
        }
    }
}
