//! Assembly of the mass and stiffness operators by exact quadrature on
//! affine triangles.

use super::{basis, FeSpace};
use crate::quad::tri_rule;
use crate::sparse::SymCsr;

/// A symmetric sparse operator over the dofs of a space (full index set;
/// Dirichlet handling extracts interior blocks, never penalizes).
#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub matrix: SymCsr,
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.matvec_alloc(x)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn symmetry_defect(&self) -> f64 {
        self.matrix.symmetry_defect()
    }

    /// Sum of all entries (for the mass operator this is `|Omega|`).
    pub fn total_sum(&self) -> f64 {
        self.matrix.values.iter().sum()
    }
}

/// Mass operator `M_ij = (phi_j, phi_i)`; exact (degree `2r` integrand).
pub fn assemble_mass(space: &FeSpace) -> SparseOperator {
    assemble(space, true)
}

/// Stiffness operator `A_ij = (grad phi_j, grad phi_i)`; exact.
pub fn assemble_stiffness(space: &FeSpace) -> SparseOperator {
    assemble(space, false)
}

fn assemble(space: &FeSpace, mass: bool) -> SparseOperator {
    let mesh = space.mesh();
    let nl = space.n_local();
    let rule = tri_rule(4); // exact up to P2 mass integrands
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut shp = vec![0.0f64; nl];
    let mut grads = vec![(0.0f64, 0.0f64); nl];
    let mut local = vec![0.0f64; nl * nl];
    for t in 0..mesh.num_triangles() {
        local.iter_mut().for_each(|v| *v = 0.0);
        let (a, b, c) = mesh.tri_points(t);
        let jac = crate::geom::signed_area2(a, b, c); // 2 * area, positive
        for q in &rule {
            // reference weights sum to 1/2; physical factor is 2*area
            let w = q.w * jac;
            if mass {
                basis::shape(space.degree(), q.xi, q.eta, &mut shp);
                for i in 0..nl {
                    for j in i..nl {
                        local[i * nl + j] += w * shp[i] * shp[j];
                    }
                }
            } else {
                space.grad_at_ref(t, q.xi, q.eta, &mut grads);
                for i in 0..nl {
                    for j in i..nl {
                        local[i * nl + j] +=
                            w * (grads[i].0 * grads[j].0 + grads[i].1 * grads[j].1);
                    }
                }
            }
        }
        let dofs = space.elem_dofs(t);
        for i in 0..nl {
            for j in i..nl {
                let (gi, gj) = (dofs[i], dofs[j]);
                let (lo, hi) = (gi.min(gj), gi.max(gj));
                triplets.push((lo, hi, local[i * nl + j]));
            }
        }
    }
    SparseOperator {
        matrix: SymCsr::from_upper_triplets(space.num_dofs(), &triplets),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::FeSpace;
    use crate::geom::Point2;
    use crate::mesh::{build_polygon_mesh, refine_to_level, Polygon};
    use std::sync::Arc;

    #[test]
    fn mass_sums_to_area() {
        for degree in [1, 2] {
            let mesh = refine_to_level(&build_polygon_mesh(&Polygon::l_shape(), None).unwrap(), 2);
            let space = FeSpace::build(Arc::new(mesh), degree).unwrap();
            let m = assemble_mass(&space);
            assert!(
                (m.total_sum() - 0.75).abs() < 1e-13,
                "degree {degree}: {}",
                m.total_sum()
            );
            assert_eq!(m.symmetry_defect(), 0.0);
        }
    }

    #[test]
    fn stiffness_kills_constants() {
        for degree in [1, 2] {
            let mesh =
                refine_to_level(&build_polygon_mesh(&Polygon::unit_square(), None).unwrap(), 2);
            let space = FeSpace::build(Arc::new(mesh), degree).unwrap();
            let a = assemble_stiffness(&space);
            let ones = vec![1.0; space.num_dofs()];
            let y = a.matvec(&ones);
            for v in y {
                assert!(v.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn p1_stiffness_unit_right_triangle() {
        // Element matrix on the unit right triangle with legs on the axes:
        // [[1, -1/2, -1/2], [-1/2, 1/2, 0], [-1/2, 0, 1/2]].
        let poly = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        let mesh = build_polygon_mesh(&poly, None).unwrap();
        let space = FeSpace::build(Arc::new(mesh), 1).unwrap();
        let a = assemble_stiffness(&space);
        let expect = [
            [1.0, -0.5, -0.5],
            [-0.5, 0.5, 0.0],
            [-0.5, 0.0, 0.5],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (a.get(i, j) - expect[i][j]).abs() < 1e-14,
                    "({i},{j}): {}",
                    a.get(i, j)
                );
            }
        }
    }

    #[test]
    fn mass_row_sums_match_inner_product_with_one() {
        // M * 1 = vector of (phi_i, 1); its sum is |Omega|.
        let mesh = refine_to_level(&build_polygon_mesh(&Polygon::unit_square(), None).unwrap(), 3);
        let space = FeSpace::build(Arc::new(mesh), 2).unwrap();
        let m = assemble_mass(&space);
        let ones = vec![1.0; space.num_dofs()];
        let row_sums = m.matvec(&ones);
        let total: f64 = row_sums.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
