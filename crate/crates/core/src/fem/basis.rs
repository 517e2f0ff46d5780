//! Lagrange P1/P2 shape functions on the reference triangle
//! `{(0,0), (1,0), (0,1)}`.
//!
//! Local dof order: vertices `0,1,2`, then (P2 only) edge midpoints on
//! `(0,1), (1,2), (2,0)`.

/// Number of local dofs for degree `r`.
pub fn n_local(r: u32) -> usize {
    match r {
        1 => 3,
        2 => 6,
        _ => unreachable!("degree checked at space construction"),
    }
}

/// Shape function values at a reference point.
pub fn shape(r: u32, xi: f64, eta: f64, out: &mut [f64]) {
    let l0 = 1.0 - xi - eta;
    let l1 = xi;
    let l2 = eta;
    match r {
        1 => {
            out[0] = l0;
            out[1] = l1;
            out[2] = l2;
        }
        2 => {
            out[0] = l0 * (2.0 * l0 - 1.0);
            out[1] = l1 * (2.0 * l1 - 1.0);
            out[2] = l2 * (2.0 * l2 - 1.0);
            out[3] = 4.0 * l0 * l1;
            out[4] = 4.0 * l1 * l2;
            out[5] = 4.0 * l2 * l0;
        }
        _ => unreachable!(),
    }
}

/// Reference-coordinate gradients `(d/dxi, d/deta)` at a reference point.
pub fn shape_grad(r: u32, xi: f64, eta: f64, out: &mut [(f64, f64)]) {
    let l0 = 1.0 - xi - eta;
    let l1 = xi;
    let l2 = eta;
    match r {
        1 => {
            out[0] = (-1.0, -1.0);
            out[1] = (1.0, 0.0);
            out[2] = (0.0, 1.0);
        }
        2 => {
            // d/dxi, d/deta of the quadratic bubble basis; grad l0 = (-1,-1),
            // grad l1 = (1,0), grad l2 = (0,1).
            out[0] = (-(4.0 * l0 - 1.0), -(4.0 * l0 - 1.0));
            out[1] = (4.0 * l1 - 1.0, 0.0);
            out[2] = (0.0, 4.0 * l2 - 1.0);
            out[3] = (4.0 * (l0 - l1), -4.0 * l1);
            out[4] = (4.0 * l2, 4.0 * l1);
            out[5] = (-4.0 * l2, 4.0 * (l0 - l2));
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_unity() {
        for r in [1u32, 2] {
            let mut v = vec![0.0; n_local(r)];
            for &(xi, eta) in &[(0.2, 0.3), (0.0, 0.0), (0.5, 0.5), (0.1, 0.85)] {
                shape(r, xi, eta, &mut v);
                let s: f64 = v.iter().sum();
                assert!((s - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kronecker_at_nodes() {
        let nodes = [
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (0.5, 0.0),
            (0.5, 0.5),
            (0.0, 0.5),
        ];
        let mut v = [0.0; 6];
        for (i, &(xi, eta)) in nodes.iter().enumerate() {
            shape(2, xi, eta, &mut v);
            for (j, &vj) in v.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vj - expect).abs() < 1e-14, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn gradient_finite_difference() {
        let eps = 1e-6;
        for r in [1u32, 2] {
            let n = n_local(r);
            let mut g = vec![(0.0, 0.0); n];
            let (xi, eta) = (0.23, 0.41);
            shape_grad(r, xi, eta, &mut g);
            let mut vp = vec![0.0; n];
            let mut vm = vec![0.0; n];
            shape(r, xi + eps, eta, &mut vp);
            shape(r, xi - eps, eta, &mut vm);
            for i in 0..n {
                assert!(((vp[i] - vm[i]) / (2.0 * eps) - g[i].0).abs() < 1e-8);
            }
            shape(r, xi, eta + eps, &mut vp);
            shape(r, xi, eta - eps, &mut vm);
            for i in 0..n {
                assert!(((vp[i] - vm[i]) / (2.0 * eps) - g[i].1).abs() < 1e-8);
            }
        }
    }
}
