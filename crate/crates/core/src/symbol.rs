//! Generating-function and Laplace-transform machinery: BDF symbols on
//! truncated sectors, the z-transform / piecewise-linear Laplace transform
//! consistency identity, boundary-to-solution maps for the shifted elliptic
//! problems, resolvent sup-norm probes, and contour-quadrature
//! reconstruction of the fully discrete solution.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{Field, InteriorSystem};
use crate::sparse::SymCsr;
use crate::stepper::{bdf_table, BDF_THETA_DEG};

/// One quadrature node on the deformed contour.
#[derive(Debug, Clone, Copy)]
pub struct ContourPoint {
    pub z: Complex64,
    /// Arc-length weight of the node.
    pub arc_weight: f64,
    /// Unit tangent of the contour at the node (so `dz = tangent *
    /// arc_weight`).
    pub tangent: Complex64,
}

/// Sampled contour `Gamma_{theta,sigma}^tau`: two rays at `|arg z| = theta`
/// truncated at `|Im z| = pi/tau`, joined by the arc `|z| = 1/sigma`.
#[derive(Debug, Clone)]
pub struct SectorSample {
    pub theta: f64,
    pub sigma: f64,
    pub tau: f64,
    pub points: Vec<ContourPoint>,
}

impl SectorSample {
    /// Sample the full contour (both rays and the full arc). Ray nodes are
    /// geometrically clustered near `|z| = 1/sigma`.
    pub fn full(theta: f64, sigma: f64, tau: f64, n_ray: usize, n_arc: usize) -> Result<SectorSample> {
        let upper = SectorSample::upper_half(theta, sigma, tau, n_ray, n_arc)?;
        let mut points = upper.points.clone();
        for p in &upper.points {
            if p.z.im.abs() > 0.0 {
                points.push(ContourPoint {
                    z: p.z.conj(),
                    arc_weight: p.arc_weight,
                    tangent: p.tangent.conj(),
                });
            }
        }
        Ok(SectorSample {
            theta,
            sigma,
            tau,
            points,
        })
    }

    /// Upper half of the contour, oriented along increasing `Im z`: the arc
    /// from `arg z = 0` to `theta`, then the ray outward to
    /// `|Im z| = pi/tau`. With conjugate symmetry of the integrand this is
    /// sufficient for the inverse transform.
    pub fn upper_half(
        theta: f64,
        sigma: f64,
        tau: f64,
        n_ray: usize,
        n_arc: usize,
    ) -> Result<SectorSample> {
        if !(theta > std::f64::consts::FRAC_PI_2 && theta < std::f64::consts::PI) {
            return Err(Error::invalid("theta must lie in (pi/2, pi)"));
        }
        if !(sigma > tau / std::f64::consts::PI) {
            return Err(Error::invalid("sigma must exceed tau / pi"));
        }
        if n_ray < 2 || n_arc < 2 {
            return Err(Error::invalid("need at least 2 nodes per segment"));
        }
        let r0 = 1.0 / sigma;
        let rho_max = std::f64::consts::PI / (tau * theta.sin());
        if rho_max <= r0 {
            return Err(Error::invalid(
                "contour arc radius exceeds the truncation height",
            ));
        }
        let mut points = Vec::with_capacity(n_ray + n_arc);
        // Arc: z = r0 e^{i phi}, phi in [0, theta]; tangent i e^{i phi}.
        let dphi = theta / (n_arc - 1) as f64;
        for j in 0..n_arc {
            let phi = dphi * j as f64;
            let z = Complex64::from_polar(r0, phi);
            let w = if j == 0 || j == n_arc - 1 {
                0.5 * dphi * r0
            } else {
                dphi * r0
            };
            points.push(ContourPoint {
                z,
                arc_weight: w,
                tangent: Complex64::new(0.0, 1.0) * z / r0,
            });
        }
        // Ray: z = rho e^{i theta}, rho = r0 e^{s}, s in [0, ln(rho_max/r0)];
        // arc length element |dz| = rho ds.
        let s_max = (rho_max / r0).ln();
        let ds = s_max / (n_ray - 1) as f64;
        let dir = Complex64::from_polar(1.0, theta);
        for i in 0..n_ray {
            let s = ds * i as f64;
            let rho = r0 * s.exp();
            let w = if i == 0 || i == n_ray - 1 {
                0.5 * ds * rho
            } else {
                ds * rho
            };
            points.push(ContourPoint {
                z: dir * rho,
                arc_weight: w,
                tangent: dir,
            });
        }
        Ok(SectorSample {
            theta,
            sigma,
            tau,
            points,
        })
    }
}

/// BDF-k symbol `delta_tau(e^{-tau z}) = delta(e^{-tau z}) / tau` by Horner
/// evaluation of the exact coefficients.
pub fn bdf_symbol(k: usize, z: Complex64, tau: f64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau must be positive"));
    }
    let table = bdf_table(k)?;
    let zeta = (-tau * z).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for &d in table.delta.iter().rev() {
        acc = acc * zeta + d;
    }
    Ok(acc / tau)
}

/// Backward-Euler symbol `(1 - e^{-tau z}) / tau`.
pub fn euler_symbol(z: Complex64, tau: f64) -> Complex64 {
    (1.0 - (-tau * z).exp()) / tau
}

/// Per-point record of a symbol-sector sweep.
#[derive(Debug, Clone, Copy)]
pub struct SymbolPoint {
    pub z: Complex64,
    pub value: Complex64,
    pub in_sector: bool,
}

/// Per-`tau` summary of the two-sided bounds and consistency ratio.
#[derive(Debug, Clone)]
pub struct TauSweepRow {
    pub tau: f64,
    /// Fitted lower constant: `min |delta_tau| / |z|`.
    pub c1: f64,
    /// Fitted upper constant: `max |delta_tau| / |z|`.
    pub c2: f64,
    /// `max |delta_tau(e^{-tau z}) - z| / (tau^k |z|^{k+1})`.
    pub c_cons: f64,
    pub max_arg: f64,
    pub points: Vec<SymbolPoint>,
}

/// Symbol sweep report over a dyadic list of step sizes.
#[derive(Debug, Clone)]
pub struct SymbolReport {
    pub k: usize,
    pub theta: f64,
    pub sigma: f64,
    /// Sector margin used for the membership flags.
    pub epsilon: f64,
    pub rows: Vec<TauSweepRow>,
    /// Smallest margin that would make every sampled point a member of
    /// `Sigma_{pi - theta_k + eps}`.
    pub fitted_epsilon: f64,
}

impl SymbolReport {
    /// Least-squares slope of `ln(max_z |delta_tau - z| / |z|^{k+1})`
    /// against `ln tau`; the consistency order (close to `k`).
    pub fn consistency_order_slope(&self) -> f64 {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.tau.ln()).collect();
        let ys: Vec<f64> = self
            .rows
            .iter()
            .map(|r| (r.c_cons * r.tau.powi(self.k as i32)).ln())
            .collect();
        least_squares_slope(&xs, &ys)
    }

    pub fn c1_spread(&self) -> f64 {
        let lo = self.rows.iter().map(|r| r.c1).fold(f64::INFINITY, f64::min);
        let hi = self.rows.iter().map(|r| r.c1).fold(0.0f64, f64::max);
        hi / lo
    }

    pub fn c2_spread(&self) -> f64 {
        let lo = self.rows.iter().map(|r| r.c2).fold(f64::INFINITY, f64::min);
        let hi = self.rows.iter().map(|r| r.c2).fold(0.0f64, f64::max);
        hi / lo
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Sweep the BDF-k symbol over contour samples for each step size,
/// reporting two-sided bounds, consistency ratios and sector membership
/// against the margin `epsilon` (radians).
pub fn sector_bounds_check(
    k: usize,
    theta: f64,
    sigma: f64,
    epsilon: f64,
    tau_list: &[f64],
    n_points: usize,
) -> Result<SymbolReport> {
    if tau_list.is_empty() || n_points == 0 {
        return Err(Error::invalid("empty sector sample"));
    }
    let theta_k = BDF_THETA_DEG[k - 1].to_radians();
    let arg_cap = std::f64::consts::PI - theta_k + epsilon;
    let mut rows = Vec::with_capacity(tau_list.len());
    let mut fitted = 0.0f64;
    for &tau in tau_list {
        let sample = SectorSample::full(theta, sigma, tau, n_points, n_points / 2 + 2)?;
        let mut points = Vec::with_capacity(sample.points.len());
        let (mut c1, mut c2, mut c_cons, mut max_arg) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
        for p in &sample.points {
            let v = bdf_symbol(k, p.z, tau)?;
            let ratio = v.norm() / p.z.norm();
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
            let cons = (v - p.z).norm() / (tau.powi(k as i32) * p.z.norm().powi(k as i32 + 1));
            c_cons = c_cons.max(cons);
            let arg = v.arg().abs();
            max_arg = max_arg.max(arg);
            points.push(SymbolPoint {
                z: p.z,
                value: v,
                in_sector: arg <= arg_cap,
            });
        }
        fitted = fitted.max(max_arg - (std::f64::consts::PI - theta_k));
        rows.push(TauSweepRow {
            tau,
            c1,
            c2,
            c_cons,
            max_arg,
            points,
        });
    }
    Ok(SymbolReport {
        k,
        theta,
        sigma,
        epsilon,
        rows,
        fitted_epsilon: fitted.max(0.0),
    })
}

/// CSV emission of a sector sweep: one line per sampled point.
pub fn symbol_report_csv(report: &SymbolReport) -> String {
    let mut s = String::from(
        "k,tau,theta,z_re,z_im,symbol_abs,arg_symbol,bound_ratio_low,bound_ratio_high,consistency_ratio\n",
    );
    for row in &report.rows {
        for p in &row.points {
            let ratio = p.value.norm() / p.z.norm();
            let cons = (p.value - p.z).norm()
                / (row.tau.powi(report.k as i32) * p.z.norm().powi(report.k as i32 + 1));
            let _ = writeln!(
                s,
                "{},{:.6e},{:.6},{:.9e},{:.9e},{:.9e},{:.9},{:.6},{:.6},{:.9e}",
                report.k,
                row.tau,
                report.theta,
                p.z.re,
                p.z.im,
                p.value.norm(),
                p.value.arg(),
                ratio / row.c1,
                ratio / row.c2,
                cons
            );
        }
    }
    s
}

/// Truncated generating data: per-step boundary dof vectors `g_h^n`,
/// identically zero below `first_step`.
#[derive(Debug, Clone)]
pub struct BoundaryGeneratingData {
    pub values: Vec<Vec<f64>>,
    pub first_step: usize,
}

impl BoundaryGeneratingData {
    pub fn new(values: Vec<Vec<f64>>, first_step: usize) -> Result<BoundaryGeneratingData> {
        for (n, row) in values.iter().enumerate() {
            if n < first_step && row.iter().any(|v| *v != 0.0) {
                return Err(Error::invalid(format!(
                    "generating data must vanish below step {first_step}, found nonzero at {n}"
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("boundary data at step {n}")));
            }
        }
        Ok(BoundaryGeneratingData { values, first_step })
    }

    pub fn n_steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// Vector-valued Horner evaluation of `sum_n g^n zeta^n`.
    pub fn evaluate(&self, zeta: Complex64) -> Vec<Complex64> {
        let width = self.values.first().map_or(0, Vec::len);
        let mut acc = vec![Complex64::new(0.0, 0.0); width];
        for row in self.values.iter().rev() {
            for (a, &g) in acc.iter_mut().zip(row) {
                *a = *a * zeta + g;
            }
        }
        acc
    }
}

/// Scalar z-transform `sum_n g^n zeta^n` by Horner.
pub fn ztransform(seq: &[f64], zeta: Complex64) -> Complex64 {
    seq.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &g| acc * zeta + g)
}

/// Laplace transform of the piecewise-linear-in-time reconstruction of the
/// samples `g^n` at `t_n = n tau` (with `g^0 = 0` and zero extension).
/// Exact closed form per interval.
pub fn laplace_hat_piecewise_linear(seq: &[f64], tau: f64, z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 {
        return Err(Error::invalid("Laplace transform requires Re z > 0"));
    }
    if seq.first().is_some_and(|&g| g != 0.0) {
        return Err(Error::invalid("piecewise-linear transform needs g^0 = 0"));
    }
    let decay = (-tau * z).exp();
    // per-interval primitives: int_0^tau e^{-z s} ds and
    // int_0^tau s e^{-z s} ds / tau
    let i0 = (1.0 - decay) / z;
    let i1 = (1.0 - (1.0 + tau * z) * decay) / (z * z * tau);
    let mut total = Complex64::new(0.0, 0.0);
    let mut expfac = Complex64::new(1.0, 0.0); // e^{-z t_j}
    for j in 0..seq.len() {
        let gj = seq[j];
        let gj1 = if j + 1 < seq.len() { seq[j + 1] } else { 0.0 };
        total += expfac * (gj * (i0 - i1) + gj1 * i1);
        expfac *= decay;
    }
    Ok(total)
}

/// The transform-consistency factor `(e^{-tau z} + e^{tau z} - 2)/(z^2 tau)`
/// relating the two transforms.
pub fn transform_consistency_factor(tau: f64, z: Complex64) -> Complex64 {
    ((-tau * z).exp() + (tau * z).exp() - 2.0) / (z * z * tau)
}

fn matvec_complex(m: &SymCsr, x: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::new(0.0, 0.0); m.n];
    for i in 0..m.n {
        let mut s = Complex64::new(0.0, 0.0);
        for k in m.row_ptr[i]..m.row_ptr[i + 1] {
            s += m.values[k] * x[m.col_idx[k]];
        }
        y[i] = s;
    }
    y
}

/// Solve the shifted elliptic boundary problem
/// `(shift u, v) + (grad u, grad v) = 0` with `u = f` on the boundary.
fn shifted_boundary_solve(
    sys: &InteriorSystem,
    shift: Complex64,
    f_boundary: &[Complex64],
) -> Result<Field<Complex64>> {
    let space = sys.space().clone();
    if f_boundary.len() != space.boundary_dofs().len() {
        return Err(Error::invalid(format!(
            "boundary data length {} does not match {} boundary dofs",
            f_boundary.len(),
            space.boundary_dofs().len()
        )));
    }
    let mut u_bc = vec![Complex64::new(0.0, 0.0); space.num_dofs()];
    for (&d, &v) in space.boundary_dofs().iter().zip(f_boundary) {
        u_bc[d] = v;
    }
    let m_ubc = matvec_complex(&sys.mass.matrix, &u_bc);
    let a_ubc = matvec_complex(&sys.stiffness.matrix, &u_bc);
    let rhs: Vec<Complex64> = m_ubc
        .iter()
        .zip(&a_ubc)
        .map(|(m, a)| -(shift * m + a))
        .collect();
    let factor = sys.factor_complex(shift)?;
    let ui = factor.solve(&sys.gather_interior(&rhs));
    let mut full = sys.scatter_interior(&ui);
    for (&d, &v) in space.boundary_dofs().iter().zip(f_boundary) {
        full[d] = v;
    }
    Ok(Field::new(space, full))
}

/// BDF-k boundary-to-solution map `M_h(e^{-tau z})`.
pub fn solution_map_m(
    sys: &InteriorSystem,
    k: usize,
    tau: f64,
    z: Complex64,
    f_boundary: &[Complex64],
) -> Result<Field<Complex64>> {
    let shift = bdf_symbol(k, z, tau)?;
    shifted_boundary_solve(sys, shift, f_boundary)
}

/// Backward-Euler boundary-to-solution map `L_h(e^{-tau z})`.
pub fn solution_map_l(
    sys: &InteriorSystem,
    tau: f64,
    z: Complex64,
    f_boundary: &[Complex64],
) -> Result<Field<Complex64>> {
    shifted_boundary_solve(sys, euler_symbol(z, tau), f_boundary)
}

/// Normalized sup-norm gap `max_f ||(M - L) f||_inf / (tau |z| ||f||_inf)`
/// over seeded random `+-1` boundary probes.
pub fn solution_map_gap_probe(
    sys: &InteriorSystem,
    k: usize,
    tau: f64,
    z: Complex64,
    n_probes: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = sys.space().boundary_dofs().len();
    let mut worst = 0.0f64;
    for _ in 0..n_probes {
        let f: Vec<Complex64> = (0..nb)
            .map(|_| Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let um = solution_map_m(sys, k, tau, z, &f)?;
        let ul = solution_map_l(sys, tau, z, &f)?;
        let mut d = um.clone();
        d.axpy(Complex64::new(-1.0, 0.0), &ul);
        worst = worst.max(d.max_abs() / (tau * z.norm()));
    }
    Ok(worst)
}

/// Exact induced sup norm of the nodal matrix of
/// `z (z - Delta_h)^{-1} P_h` on the zero-trace subspace: the max absolute
/// row sum of `z (z M0 + A0)^{-1} M0`, computed column by column with one
/// factorization. For degree-2 spaces this is the lattice proxy of the
/// continuous sup norm.
pub fn resolvent_linf_norm(sys: &InteriorSystem, z: Complex64) -> Result<f64> {
    resolvent_linf_norm_capped(sys, z, 20_000)
}

pub fn resolvent_linf_norm_capped(sys: &InteriorSystem, z: Complex64, cap: usize) -> Result<f64> {
    if z.norm() == 0.0 || z.re <= 0.0 {
        return Err(Error::invalid(
            "resolvent probe needs |arg z| < pi/2 (z in the open right half-plane)",
        ));
    }
    let n = sys.n_interior();
    if n > cap {
        return Err(Error::invalid(format!(
            "{n} interior dofs exceed the dense row-sum cap {cap}"
        )));
    }
    let factor = sys.factor_complex(z)?;
    let chunk = 64usize;
    let starts: Vec<usize> = (0..n).step_by(chunk).collect();
    let partials: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&j0| {
            let mut acc = vec![0.0f64; n];
            for j in j0..(j0 + chunk).min(n) {
                // column j of M0
                let mut rhs = vec![Complex64::new(0.0, 0.0); n];
                for r in sys.mass0.row_ptr[j]..sys.mass0.row_ptr[j + 1] {
                    rhs[sys.mass0.col_idx[r]] = Complex64::new(sys.mass0.values[r], 0.0);
                }
                let x = factor.solve(&rhs);
                for i in 0..n {
                    acc[i] += x[i].norm();
                }
            }
            acc
        })
        .collect();
    let mut rowsum = vec![0.0f64; n];
    for part in partials {
        for i in 0..n {
            rowsum[i] += part[i];
        }
    }
    Ok(z.norm() * rowsum.iter().cloned().fold(0.0, f64::max))
}

/// Quadrature configuration for [`contour_reconstruct`].
#[derive(Debug, Clone)]
pub struct ContourQuadrature {
    pub theta: f64,
    /// Arc radius parameter; defaults to `t_N` when `None`.
    pub sigma: Option<f64>,
    /// Initial node count per contour segment.
    pub n_points: usize,
    /// Sup-norm change between doublings that counts as converged.
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for ContourQuadrature {
    fn default() -> Self {
        ContourQuadrature {
            theta: 0.55 * std::f64::consts::PI,
            sigma: None,
            n_points: 48,
            tol: 1e-8,
            max_doublings: 6,
        }
    }
}

/// Reconstruct `u^N` of the zero-start BDF-k evolution from its boundary
/// generating data by the deformed-contour inverse transform
/// `(tau / 2 pi i) int M_h(e^{-tau z}) g_h(e^{-tau z}) e^{t_N z} dz`,
/// doubling the quadrature until the sup norm stabilizes. Conjugate
/// symmetry is exploited, so the result is real by construction.
pub fn contour_reconstruct(
    sys: &InteriorSystem,
    k: usize,
    tau: f64,
    bdata: &BoundaryGeneratingData,
    n_target: usize,
    quad: &ContourQuadrature,
) -> Result<Field> {
    if bdata.first_step < k {
        return Err(Error::invalid(
            "generating data must vanish for steps below k",
        ));
    }
    if n_target < k + 2 {
        return Err(Error::invalid("need N >= k + 2"));
    }
    if bdata.values.len() <= n_target {
        return Err(Error::invalid("generating data shorter than target step"));
    }
    let t_n = tau * n_target as f64;
    let sigma = quad.sigma.unwrap_or(t_n);
    let mut n_points = quad.n_points;
    let mut prev: Option<Field> = None;
    for _ in 0..=quad.max_doublings {
        let field = contour_pass(sys, k, tau, bdata, t_n, quad.theta, sigma, n_points)?;
        if let Some(p) = &prev {
            let mut d = field.clone();
            d.axpy(-1.0, p);
            if d.max_abs() <= quad.tol {
                return Ok(field);
            }
        }
        prev = Some(field);
        n_points *= 2;
    }
    Err(Error::QuadratureNonConvergent(format!(
        "contour quadrature not converged at {n_points} nodes"
    )))
}

#[allow(clippy::too_many_arguments)]
fn contour_pass(
    sys: &InteriorSystem,
    k: usize,
    tau: f64,
    bdata: &BoundaryGeneratingData,
    t_n: f64,
    theta: f64,
    sigma: f64,
    n_points: usize,
) -> Result<Field> {
    let sample = SectorSample::upper_half(theta, sigma, tau, n_points, n_points / 2 + 2)?;
    let contributions: Vec<Result<Vec<Complex64>>> = sample
        .points
        .par_iter()
        .map(|p| {
            let zeta = (-tau * p.z).exp();
            let g = bdata.evaluate(zeta);
            let u = solution_map_m(sys, k, tau, p.z, &g)?;
            let dz = p.tangent * p.arc_weight;
            let factor = (t_n * p.z).exp() * dz;
            Ok(u.values.iter().map(|v| v * factor).collect())
        })
        .collect();
    let n_dofs = sys.space().num_dofs();
    let mut acc = vec![Complex64::new(0.0, 0.0); n_dofs];
    for c in contributions {
        let c = c?;
        for (a, v) in acc.iter_mut().zip(c) {
            *a += v;
        }
    }
    // u = (tau / 2 pi i) * (2 i Im(upper half)) = (tau / pi) Im(...)
    let scale = tau / std::f64::consts::PI;
    Ok(Field::new(
        sys.space().clone(),
        acc.iter().map(|v| scale * v.im).collect(),
    ))
}
