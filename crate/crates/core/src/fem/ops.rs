//! Interior-block systems: projections, Ritz projection, discrete delta and
//! resolvent-type shifted solves.
//!
//! Dirichlet conditions are handled by extracting interior rows/columns
//! (the zero-trace subspace), never by penalty. One skyline factorization
//! is computed per distinct shift and cached.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::{assemble_mass, assemble_stiffness, FeSpace, Field, SparseOperator};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::quad::{map_to_triangle, tri_rule};
use crate::sparse::{Envelope, Scalar, SkylineFactor, SymCsr};

/// Assembled mass/stiffness pair over a space together with their
/// interior restrictions and a shared factorization envelope.
pub struct InteriorSystem {
    space: Arc<FeSpace>,
    pub mass: SparseOperator,
    pub stiffness: SparseOperator,
    pub mass0: SymCsr,
    pub stiff0: SymCsr,
    env: Arc<Envelope>,
    real_cache: Mutex<HashMap<(u64, u64), Arc<SkylineFactor<f64>>>>,
    complex_cache: Mutex<HashMap<(u64, u64), Arc<SkylineFactor<Complex64>>>>,
}

impl InteriorSystem {
    pub fn new(space: Arc<FeSpace>) -> InteriorSystem {
        let mass = assemble_mass(&space);
        let stiffness = assemble_stiffness(&space);
        let mass0 = mass.matrix.restrict(space.interior_dofs());
        let stiff0 = stiffness.matrix.restrict(space.interior_dofs());
        // M and A share the element-connectivity pattern; either gives the
        // envelope.
        let env = Arc::new(Envelope::new(&stiff0));
        InteriorSystem {
            space,
            mass,
            stiffness,
            mass0,
            stiff0,
            env,
            real_cache: Mutex::new(HashMap::new()),
            complex_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn n_interior(&self) -> usize {
        self.space.interior_dofs().len()
    }

    /// Factor `cm * M0 + ca * A0`, cached by the exact coefficient bits.
    pub fn factor_real(&self, cm: f64, ca: f64) -> Result<Arc<SkylineFactor<f64>>> {
        let key = (cm.to_bits(), ca.to_bits());
        if let Some(f) = self.real_cache.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(SkylineFactor::new(
            self.env.clone(),
            &self.mass0,
            &self.stiff0,
            cm,
            ca,
        )?);
        self.real_cache.lock().unwrap().insert(key, f.clone());
        Ok(f)
    }

    /// Factor `z * M0 + A0` for a complex shift, cached by the bits of `z`.
    pub fn factor_complex(&self, z: Complex64) -> Result<Arc<SkylineFactor<Complex64>>> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(f) = self.complex_cache.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(SkylineFactor::new(
            self.env.clone(),
            &self.mass0,
            &self.stiff0,
            z,
            Complex64::new(1.0, 0.0),
        )?);
        self.complex_cache.lock().unwrap().insert(key, f.clone());
        Ok(f)
    }

    /// Gather the interior entries of a full dof vector.
    pub fn gather_interior<T: Scalar>(&self, full: &[T]) -> Vec<T> {
        self.space
            .interior_dofs()
            .iter()
            .map(|&d| full[d])
            .collect()
    }

    /// Scatter interior values into a zero full vector.
    pub fn scatter_interior<T: Scalar>(&self, interior: &[T]) -> Vec<T> {
        let mut full = vec![T::zero(); self.space.num_dofs()];
        for (p, &d) in self.space.interior_dofs().iter().enumerate() {
            full[d] = interior[p];
        }
        full
    }

    /// L2-orthogonal projection `P_h f` onto the zero-trace subspace, with
    /// the load integrated by quadrature exact to degree `2r + 2`.
    pub fn l2_project(&self, f: impl Fn(Point2) -> f64) -> Result<Field> {
        let deg = (2 * self.space.degree() + 2) as usize;
        let load = self.load_vector(&f, deg)?;
        self.l2_project_load(&load)
    }

    /// Projection of a field living on a nested refinement of this space's
    /// mesh; `ancestors[t_fine] = t_coarse`. The transfer is exact.
    pub fn l2_project_fine(&self, fine: &Field, ancestors: &[usize]) -> Result<Field> {
        let fine_space = fine.space();
        let deg = (self.space.degree() + fine_space.degree()) as usize;
        let rule = tri_rule(deg);
        let nl = self.space.n_local();
        let mut load = vec![0.0f64; self.space.num_dofs()];
        let mut shp = vec![0.0f64; nl];
        for tf in 0..fine_space.mesh().num_triangles() {
            let tc = ancestors[tf];
            let (a, b, c) = fine_space.mesh().tri_points(tf);
            let dofs = self.space.elem_dofs(tc);
            for (p, w) in map_to_triangle(&rule, a, b, c) {
                let fv = fine.eval_on_elem(tf, p);
                self.space.shape_at(tc, p, &mut shp);
                for k in 0..nl {
                    load[dofs[k]] += w * fv * shp[k];
                }
            }
        }
        self.l2_project_load(&load)
    }

    fn l2_project_load(&self, load: &[f64]) -> Result<Field> {
        let li = self.gather_interior(load);
        let f = self.factor_real(1.0, 0.0)?;
        let ci = f.solve(&li);
        Ok(Field::new(self.space.clone(), self.scatter_interior(&ci)))
    }

    /// Ritz projection `R_h f` for `f` with zero boundary trace, from its
    /// gradient.
    pub fn ritz_project(&self, grad_f: impl Fn(Point2) -> (f64, f64)) -> Result<Field> {
        let deg = (2 * self.space.degree() + 2) as usize;
        let rule = tri_rule(deg);
        let nl = self.space.n_local();
        let mesh = self.space.mesh().clone();
        let mut load = vec![0.0f64; self.space.num_dofs()];
        let mut grads = vec![(0.0f64, 0.0f64); nl];
        for t in 0..mesh.num_triangles() {
            let (a, b, c) = mesh.tri_points(t);
            let dofs = self.space.elem_dofs(t);
            for q in &rule {
                let x = Point2::new(
                    a.x + (b.x - a.x) * q.xi + (c.x - a.x) * q.eta,
                    a.y + (b.y - a.y) * q.xi + (c.y - a.y) * q.eta,
                );
                let w = q.w * crate::geom::signed_area2(a, b, c);
                let (gx, gy) = grad_f(x);
                if !(gx.is_finite() && gy.is_finite()) {
                    return Err(Error::NonFinite(format!(
                        "gradient not finite at ({}, {})",
                        x.x, x.y
                    )));
                }
                self.space.grad_at_ref(t, q.xi, q.eta, &mut grads);
                for k in 0..nl {
                    load[dofs[k]] += w * (gx * grads[k].0 + gy * grads[k].1);
                }
            }
        }
        let li = self.gather_interior(&load);
        let f = self.factor_real(0.0, 1.0)?;
        let ci = f.solve(&li);
        Ok(Field::new(self.space.clone(), self.scatter_interior(&ci)))
    }

    /// Load vector `(f, phi_i)` by per-element quadrature of degree `deg`.
    pub fn load_vector(&self, f: &impl Fn(Point2) -> f64, deg: usize) -> Result<Vec<f64>> {
        let rule = tri_rule(deg);
        let nl = self.space.n_local();
        let mesh = self.space.mesh().clone();
        let mut load = vec![0.0f64; self.space.num_dofs()];
        let mut shp = vec![0.0f64; nl];
        for t in 0..mesh.num_triangles() {
            let (a, b, c) = mesh.tri_points(t);
            let dofs = self.space.elem_dofs(t);
            for (p, w) in map_to_triangle(&rule, a, b, c) {
                let fv = f(p);
                if !fv.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "integrand not finite at ({}, {})",
                        p.x, p.y
                    )));
                }
                self.space.shape_at(t, p, &mut shp);
                for k in 0..nl {
                    load[dofs[k]] += w * fv * shp[k];
                }
            }
        }
        Ok(load)
    }

    /// Discrete delta `delta_{h,x0}`: the zero-trace field with
    /// `(chi, delta) = chi(x0)` for all zero-trace `chi`; solves
    /// `M0 d = e(x0)` with `e_i = phi_i(x0)`.
    pub fn discrete_delta(&self, x0: Point2) -> Result<Field> {
        let t = self
            .space
            .mesh()
            .locate(x0)
            .ok_or_else(|| Error::invalid(format!("x0 = ({}, {}) outside domain", x0.x, x0.y)))?;
        let nl = self.space.n_local();
        let mut shp = vec![0.0f64; nl];
        self.space.shape_at(t, x0, &mut shp);
        let mut e = vec![0.0f64; self.space.num_dofs()];
        for (k, &d) in self.space.elem_dofs(t).iter().enumerate() {
            e[d] = shp[k];
        }
        let ei = self.gather_interior(&e);
        let f = self.factor_real(1.0, 0.0)?;
        let di = f.solve(&ei);
        Ok(Field::new(self.space.clone(), self.scatter_interior(&di)))
    }

    /// Resolvent application `u = (z - Delta_h)^{-1} rhs` on the zero-trace
    /// subspace: solves `(z M0 + A0) u = M0 rhs`.
    pub fn shifted_solve(&self, z: Complex64, rhs: &Field<Complex64>) -> Result<Field<Complex64>> {
        let ri = self.gather_interior(&rhs.values);
        let mut b = vec![Complex64::new(0.0, 0.0); ri.len()];
        // b = M0 * ri
        for (i, bi) in b.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in self.mass0.row_ptr[i]..self.mass0.row_ptr[i + 1] {
                s += self.mass0.values[k] * ri[self.mass0.col_idx[k]];
            }
            *bi = s;
        }
        let f = self.factor_complex(z)?;
        let ui = f.solve(&b);
        Ok(Field::new(self.space.clone(), self.scatter_interior(&ui)))
    }

    /// Solve `(cm * M0 + ca * A0) u_int = rhs_int` for a full-length real
    /// rhs restricted to interior dofs; returns a full field with zero
    /// boundary entries.
    pub fn solve_interior_real(&self, cm: f64, ca: f64, rhs_full: &[f64]) -> Result<Field> {
        let ri = self.gather_interior(rhs_full);
        let f = self.factor_real(cm, ca)?;
        let ui = f.solve(&ri);
        Ok(Field::new(self.space.clone(), self.scatter_interior(&ui)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{norm, NormKind};
    use crate::mesh::{build_polygon_mesh, refine_to_level, Polygon};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn system(levels: u32, degree: u32) -> InteriorSystem {
        let mesh = refine_to_level(
            &build_polygon_mesh(&Polygon::unit_square(), None).unwrap(),
            levels,
        );
        InteriorSystem::new(FeSpace::build(Arc::new(mesh), degree).unwrap())
    }

    fn random_interior_field(sys: &InteriorSystem, rng: &mut ChaCha8Rng) -> Field {
        let mut f = Field::zeros(sys.space().clone());
        for &d in sys.space().interior_dofs() {
            f.values[d] = rng.gen_range(-1.0..1.0);
        }
        f
    }

    #[test]
    fn l2_projection_idempotent_and_orthogonal() {
        let sys = system(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_interior_field(&sys, &mut rng);
        // P_h applied to a member of the space reproduces it: use the field
        // itself as integrand via element evaluation.
        let gf = g.clone();
        let proj = sys
            .l2_project(move |p| {
                let t = gf.space().mesh().locate(p).unwrap();
                gf.eval_on_elem(t, p)
            })
            .unwrap();
        for (a, b) in proj.values.iter().zip(&g.values) {
            assert!((a - b).abs() < 1e-12);
        }
        // Orthogonality of the projection error against random test fields.
        let f = |p: Point2| (3.0 * p.x).sin() * (2.0 * p.y).cos();
        let ph = sys.l2_project(f).unwrap();
        let deg = (2 * sys.space().degree() + 2) as usize;
        let load = sys.load_vector(&f, deg).unwrap(); // (f, phi_i)
        let m_ph = sys.mass.matvec(&ph.values); // (P_h f, phi_i)
        for _ in 0..10 {
            let chi = random_interior_field(&sys, &mut rng);
            let lhs: f64 = chi
                .values
                .iter()
                .zip(load.iter().zip(&m_ph))
                .map(|(c, (l, mp))| c * (l - mp))
                .sum();
            assert!(lhs.abs() < 1e-10, "orthogonality defect {lhs}");
        }
        // Contraction in L2.
        let fl2 = {
            // quadrature of f^2
            let rule = tri_rule(8);
            let mesh = sys.space().mesh();
            let mut s = 0.0;
            for t in 0..mesh.num_triangles() {
                let (a, b, c) = mesh.tri_points(t);
                for (p, w) in map_to_triangle(&rule, a, b, c) {
                    s += w * f(p) * f(p);
                }
            }
            s.sqrt()
        };
        assert!(norm(&ph, NormKind::L2, None) <= fl2 * (1.0 + 1e-12));
    }

    #[test]
    fn ritz_projection_idempotent_and_galerkin_orthogonal() {
        let sys = system(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Idempotence on a member of the zero-trace space.
        let g = random_interior_field(&sys, &mut rng);
        let gf = g.clone();
        let proj = sys
            .ritz_project(move |p| {
                let mesh = gf.space().mesh();
                let t = mesh.locate(p).unwrap();
                let (a, b, c) = mesh.tri_points(t);
                let (_, xi, eta) = crate::geom::barycentric(p, a, b, c);
                let (gx, gy) = gf.grad_on_elem_ref(t, xi, eta);
                (gx, gy)
            })
            .unwrap();
        for (a, b) in proj.values.iter().zip(&g.values) {
            assert!((a - b).abs() < 1e-12);
        }
        // Galerkin orthogonality for a smooth zero-trace function.
        let pi = std::f64::consts::PI;
        let grad_f = move |p: Point2| {
            (
                pi * (pi * p.x).cos() * (pi * p.y).sin(),
                pi * (pi * p.x).sin() * (pi * p.y).cos(),
            )
        };
        let rh = sys.ritz_project(grad_f).unwrap();
        // (grad(R_h f - f), grad chi) = 0: compare stiffness action with the
        // exact gradient load.
        let rule = tri_rule(10);
        let mesh = sys.space().mesh().clone();
        let nl = sys.space().n_local();
        let mut load = vec![0.0f64; sys.space().num_dofs()];
        let mut grads = vec![(0.0f64, 0.0f64); nl];
        for t in 0..mesh.num_triangles() {
            let (a, b, c) = mesh.tri_points(t);
            let dofs = sys.space().elem_dofs(t);
            for q in &rule {
                let x = Point2::new(
                    a.x + (b.x - a.x) * q.xi + (c.x - a.x) * q.eta,
                    a.y + (b.y - a.y) * q.xi + (c.y - a.y) * q.eta,
                );
                let w = q.w * crate::geom::signed_area2(a, b, c);
                let (gx, gy) = grad_f(x);
                sys.space().grad_at_ref(t, q.xi, q.eta, &mut grads);
                for k in 0..nl {
                    load[dofs[k]] += w * (gx * grads[k].0 + gy * grads[k].1);
                }
            }
        }
        let a_rh = sys.stiffness.matvec(&rh.values);
        for _ in 0..10 {
            let chi = random_interior_field(&sys, &mut rng);
            let defect: f64 = chi
                .values
                .iter()
                .zip(load.iter().zip(&a_rh))
                .map(|(c, (l, ar))| c * (l - ar))
                .sum();
            assert!(defect.abs() < 1e-10, "galerkin defect {defect}");
        }
    }

    #[test]
    fn ritz_l2_rate_about_two() {
        // smooth zero-trace function on the square, r = 1: L2 error rate ~ 2
        let pi = std::f64::consts::PI;
        let f = move |p: Point2| (pi * p.x).sin() * (pi * p.y).sin();
        let grad_f = move |p: Point2| {
            (
                pi * (pi * p.x).cos() * (pi * p.y).sin(),
                pi * (pi * p.x).sin() * (pi * p.y).cos(),
            )
        };
        let mut errors = Vec::new();
        for level in [2u32, 3, 4] {
            let sys = system(level, 1);
            let rh = sys.ritz_project(grad_f).unwrap();
            // L2 error by quadrature
            let rule = tri_rule(8);
            let mesh = sys.space().mesh();
            let mut e2 = 0.0;
            for t in 0..mesh.num_triangles() {
                let (a, b, c) = mesh.tri_points(t);
                for (p, w) in map_to_triangle(&rule, a, b, c) {
                    let d = rh.eval_on_elem(t, p) - f(p);
                    e2 += w * d * d;
                }
            }
            errors.push(e2.sqrt());
        }
        let rate1 = (errors[0] / errors[1]).log2();
        let rate2 = (errors[1] / errors[2]).log2();
        assert!(rate1 > 1.7 && rate1 < 2.3, "rate {rate1}");
        assert!(rate2 > 1.8 && rate2 < 2.2, "rate {rate2}");
    }

    #[test]
    fn interpolation_l2_rate_p1() {
        // f = x^2 on the square: ||f - I_h f||_L2 = O(h^2).
        let f = |p: Point2| p.x * p.x;
        let mut errors = Vec::new();
        for level in [2u32, 3, 4, 5] {
            let mesh = refine_to_level(
                &build_polygon_mesh(&Polygon::unit_square(), None).unwrap(),
                level,
            );
            let space = FeSpace::build(Arc::new(mesh), 1).unwrap();
            let ih = space.interpolate(f).unwrap();
            let rule = tri_rule(6);
            let mesh = space.mesh();
            let mut e2 = 0.0;
            for t in 0..mesh.num_triangles() {
                let (a, b, c) = mesh.tri_points(t);
                for (p, w) in map_to_triangle(&rule, a, b, c) {
                    let d = ih.eval_on_elem(t, p) - f(p);
                    e2 += w * d * d;
                }
            }
            errors.push(e2.sqrt());
        }
        for w in errors.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!(rate >= 1.9, "observed rate {rate}");
        }
    }

    #[test]
    fn p2_reproduces_quadratics_in_interpolation() {
        let mesh = refine_to_level(&build_polygon_mesh(&Polygon::unit_square(), None).unwrap(), 2);
        let space = FeSpace::build(Arc::new(mesh), 2).unwrap();
        let f = |p: Point2| p.x * p.x - 0.5 * p.x * p.y + p.y;
        let ih = space.interpolate(f).unwrap();
        let mesh = space.mesh();
        let rule = tri_rule(4);
        for t in 0..mesh.num_triangles() {
            let (a, b, c) = mesh.tri_points(t);
            for (p, _) in map_to_triangle(&rule, a, b, c) {
                assert!((ih.eval_on_elem(t, p) - f(p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifted_solve_poisson_and_identity_limit() {
        let sys = system(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rhs = random_interior_field(&sys, &mut rng).to_complex();
        // z = 0: discrete Poisson problem A0 u = M0 rhs.
        let u = sys.shifted_solve(Complex64::new(0.0, 0.0), &rhs).unwrap();
        let ui = sys.gather_interior(&u.values);
        let ri = sys.gather_interior(&rhs.values);
        let au = {
            let mut y = vec![Complex64::new(0.0, 0.0); ui.len()];
            for i in 0..ui.len() {
                for k in sys.stiff0.row_ptr[i]..sys.stiff0.row_ptr[i + 1] {
                    y[i] += sys.stiff0.values[k] * ui[sys.stiff0.col_idx[k]];
                }
            }
            y
        };
        let mrhs = {
            let mut y = vec![Complex64::new(0.0, 0.0); ri.len()];
            for i in 0..ri.len() {
                for k in sys.mass0.row_ptr[i]..sys.mass0.row_ptr[i + 1] {
                    y[i] += sys.mass0.values[k] * ri[sys.mass0.col_idx[k]];
                }
            }
            y
        };
        for (a, b) in au.iter().zip(&mrhs) {
            assert!((a - b).norm() < 1e-9);
        }
        // very large real z: z u ~ rhs
        let z = Complex64::new(1e8, 0.0);
        let u = sys.shifted_solve(z, &rhs).unwrap();
        let mut zu = u.clone();
        zu.scale(z);
        let mut diff = zu.clone();
        diff.axpy(Complex64::new(-1.0, 0.0), &rhs);
        let rel = norm(&diff, NormKind::L2, None) / norm(&rhs, NormKind::L2, None);
        assert!(rel <= 1e-3, "resolvent identity defect {rel}");
    }

    #[test]
    fn shifted_solve_matches_eigenpair() {
        // inverse-iteration oracle for the smallest interior eigenpair
        let sys = system(2, 1);
        let n = sys.n_interior();
        let mut v = vec![1.0f64; n];
        let f = sys.factor_real(0.0, 1.0).unwrap();
        let mut lambda = 0.0;
        for _ in 0..200 {
            // w = A0^{-1} M0 v
            let mut mv = vec![0.0; n];
            for i in 0..n {
                for k in sys.mass0.row_ptr[i]..sys.mass0.row_ptr[i + 1] {
                    mv[i] += sys.mass0.values[k] * v[sys.mass0.col_idx[k]];
                }
            }
            let w = f.solve(&mv);
            let norm_w = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            for i in 0..n {
                v[i] = w[i] / norm_w;
            }
            // Rayleigh quotient lambda = (v^T A v) / (v^T M v)
            let mut av = vec![0.0; n];
            let mut mv = vec![0.0; n];
            for i in 0..n {
                for k in sys.stiff0.row_ptr[i]..sys.stiff0.row_ptr[i + 1] {
                    av[i] += sys.stiff0.values[k] * v[sys.stiff0.col_idx[k]];
                }
                for k in sys.mass0.row_ptr[i]..sys.mass0.row_ptr[i + 1] {
                    mv[i] += sys.mass0.values[k] * v[sys.mass0.col_idx[k]];
                }
            }
            let num: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
            let den: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
            lambda = num / den;
        }
        // (z - Delta_h)^{-1} v1 = v1 / (z + lambda1)
        let z = Complex64::new(2.5, 1.0);
        let vf = Field::new(sys.space().clone(), sys.scatter_interior(&v)).to_complex();
        let u = sys.shifted_solve(z, &vf).unwrap();
        let scale = 1.0 / (z + lambda);
        for (a, b) in u.values.iter().zip(&vf.values) {
            assert!((a - b * scale).norm() < 1e-8, "{a} vs {}", b * scale);
        }
    }

    #[test]
    fn discrete_delta_reproduces_point_values() {
        let sys = system(3, 1);
        let x0 = Point2::new(0.4, 0.55);
        let d = sys.discrete_delta(x0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let chi = random_interior_field(&sys, &mut rng);
            // (chi, d) via mass matrix
            let md = sys.mass.matvec(&d.values);
            let ip: f64 = chi.values.iter().zip(&md).map(|(a, b)| a * b).sum();
            let t = sys.space().mesh().locate(x0).unwrap();
            let chix0 = chi.eval_on_elem(t, x0);
            assert!((ip - chix0).abs() < 1e-10, "{ip} vs {chix0}");
        }
    }

    #[test]
    fn discrete_delta_outside_domain_rejected() {
        let sys = system(2, 1);
        assert!(sys.discrete_delta(Point2::new(2.0, 2.0)).is_err());
    }

    #[test]
    fn discrete_delta_exponential_decay_and_l1() {
        let mut slopes = Vec::new();
        let mut l1s = Vec::new();
        for level in [3u32, 4, 5] {
            let mesh = refine_to_level(
                &build_polygon_mesh(&Polygon::unit_square(), None).unwrap(),
                level,
            );
            let sys = InteriorSystem::new(FeSpace::build(Arc::new(mesh), 1).unwrap());
            let x0 = Point2::new(0.5, 0.5);
            let d = sys.discrete_delta(x0).unwrap();
            let h = sys.space().mesh().h;
            // least-squares slope of log|d_i| against distance
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            let dmax = d.max_abs();
            for (&coord, &v) in sys.space().dof_coords().iter().zip(&d.values) {
                let dist = coord.dist(x0);
                if v.abs() > dmax * 1e-12 && dist > 0.0 {
                    xs.push(dist);
                    ys.push(v.abs().ln());
                }
            }
            let n = xs.len() as f64;
            let sx: f64 = xs.iter().sum();
            let sy: f64 = ys.iter().sum();
            let sxx: f64 = xs.iter().map(|v| v * v).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            slopes.push(slope * h); // ~ -c with c > 0
            l1s.push(norm(&d, NormKind::L1, None));
        }
        for s in &slopes {
            assert!(*s < -0.1, "decay slope*h = {s}");
        }
        for w in l1s.windows(2) {
            assert!(w[1] <= w[0] * 1.5, "L1 growth {} -> {}", w[0], w[1]);
        }
    }
}
