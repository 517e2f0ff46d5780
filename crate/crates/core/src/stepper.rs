//! Time discretizations of the Dirichlet heat problem: BDF-k (k = 1..6)
//! with uniform steps, a fine-substep semi-discrete reference, the discrete
//! harmonic extension, and the variable-step dG(0) scheme built on it.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{Field, FeSpace, InteriorSystem};
use crate::geom::Point2;

/// Coefficients of the BDF-k generating polynomial
/// `delta(zeta) = sum_{j=1..k} (1 - zeta)^j / j` and the A(theta)-stability
/// angle of the method.
#[derive(Debug, Clone)]
pub struct BdfTable {
    pub k: usize,
    /// `delta_0 .. delta_k`.
    pub delta: Vec<f64>,
    /// A(theta_k)-stability angle in degrees.
    pub theta_deg: f64,
}

/// Stability angles for BDF-1..6 in degrees.
pub const BDF_THETA_DEG: [f64; 6] = [90.0, 90.0, 86.03, 73.35, 51.84, 17.84];

/// BDF coefficients from the exact rational expansion of the generating
/// polynomial, converted to floating point at the end.
pub fn bdf_table(k: usize) -> Result<BdfTable> {
    if !(1..=6).contains(&k) {
        return Err(Error::invalid(format!("BDF order {k} outside 1..=6")));
    }
    // delta_i = (-1)^i sum_{j = max(i,1)}^{k} C(j, i) / j; accumulate over
    // the common denominator lcm(1..6) = 60 in integers.
    const L: i64 = 60;
    let binom = |n: i64, r: i64| -> i64 {
        let mut v: i64 = 1;
        for t in 0..r {
            v = v * (n - t) / (t + 1);
        }
        v
    };
    let mut delta = Vec::with_capacity(k + 1);
    for i in 0..=(k as i64) {
        let mut num: i64 = 0;
        for j in i.max(1)..=(k as i64) {
            num += (L / j) * binom(j, i);
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        delta.push(sign * num as f64 / L as f64);
    }
    Ok(BdfTable {
        k,
        delta,
        theta_deg: BDF_THETA_DEG[k - 1],
    })
}

/// A uniform or variable time grid starting at `t = 0`.
#[derive(Debug, Clone)]
pub enum TimeGrid {
    Uniform {
        tau: f64,
        n_steps: usize,
    },
    /// Variable steps with the recorded grid-regularity constants:
    /// `tau_min >= c * tau_max^beta` and adjacent ratios within
    /// `[1/kappa, kappa]`.
    Variable {
        taus: Vec<f64>,
        kappa: f64,
        c: f64,
        beta: f64,
    },
}

impl TimeGrid {
    pub fn uniform(tau: f64, n_steps: usize) -> Result<TimeGrid> {
        if !(tau > 0.0) || n_steps == 0 {
            return Err(Error::invalid("uniform grid needs tau > 0 and steps > 0"));
        }
        Ok(TimeGrid::Uniform { tau, n_steps })
    }

    pub fn variable(taus: Vec<f64>, kappa: f64, c: f64, beta: f64) -> Result<TimeGrid> {
        if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::invalid("variable grid needs positive steps"));
        }
        if kappa < 1.0 {
            return Err(Error::invalid("kappa must be >= 1"));
        }
        for w in taus.windows(2) {
            let r = w[0] / w[1];
            if r > kappa * (1.0 + 1e-12) || r < 1.0 / kappa * (1.0 - 1e-12) {
                return Err(Error::invalid(format!(
                    "adjacent step ratio {r} violates kappa = {kappa}"
                )));
            }
        }
        let tau_max = taus.iter().cloned().fold(0.0, f64::max);
        let tau_min = taus.iter().cloned().fold(f64::INFINITY, f64::min);
        let total: f64 = taus.iter().sum();
        if tau_max > total / 4.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "max step {tau_max} exceeds T/4 = {}",
                total / 4.0
            )));
        }
        if tau_min < c * tau_max.powf(beta) * (1.0 - 1e-12) {
            return Err(Error::invalid(format!(
                "tau_min {tau_min} below c tau^beta = {}",
                c * tau_max.powf(beta)
            )));
        }
        Ok(TimeGrid::Variable {
            taus,
            kappa,
            c,
            beta,
        })
    }

    /// A variable grid that ramps geometrically from `tau_max / ramp` up to
    /// `tau_max` (ratio `kappa` per step) and then stays uniform until the
    /// total time reaches `t_end`.
    pub fn geometric_ramp(t_end: f64, tau_max: f64, kappa: f64, ramp: f64) -> Result<TimeGrid> {
        if !(t_end > 0.0) || !(tau_max > 0.0) || kappa <= 1.0 || ramp < 1.0 {
            return Err(Error::invalid("bad geometric ramp parameters"));
        }
        let mut taus = Vec::new();
        let mut tau = tau_max / ramp;
        let mut t = 0.0;
        while t + tau < t_end && tau < tau_max {
            taus.push(tau);
            t += tau;
            tau = (tau * kappa).min(tau_max);
        }
        while t + tau_max < t_end - 1e-12 {
            taus.push(tau_max);
            t += tau_max;
        }
        let rest = t_end - t;
        if rest > 1e-12 {
            // keep the closing step inside the ratio band
            let last = *taus.last().unwrap_or(&rest);
            if rest >= last / kappa {
                taus.push(rest);
            } else {
                // merge with the previous step and split evenly
                let prev = taus.pop().unwrap();
                taus.push((prev + rest) / 2.0);
                taus.push((prev + rest) / 2.0);
            }
        }
        let tau_mx = taus.iter().cloned().fold(0.0, f64::max);
        let tau_mn = taus.iter().cloned().fold(f64::INFINITY, f64::min);
        TimeGrid::variable(taus, kappa, tau_mn / tau_mx.max(1e-300), 1.0)
    }

    pub fn n_steps(&self) -> usize {
        match self {
            TimeGrid::Uniform { n_steps, .. } => *n_steps,
            TimeGrid::Variable { taus, .. } => taus.len(),
        }
    }

    /// Step size of step `m` (1-based time level; `tau(m)` spans
    /// `t_{m-1} .. t_m`).
    pub fn tau(&self, m: usize) -> f64 {
        match self {
            TimeGrid::Uniform { tau, .. } => *tau,
            TimeGrid::Variable { taus, .. } => taus[m - 1],
        }
    }

    pub fn time(&self, n: usize) -> f64 {
        match self {
            TimeGrid::Uniform { tau, .. } => tau * n as f64,
            TimeGrid::Variable { taus, .. } => taus[..n].iter().sum(),
        }
    }

    pub fn total_time(&self) -> f64 {
        self.time(self.n_steps())
    }

    pub fn max_tau(&self) -> f64 {
        match self {
            TimeGrid::Uniform { tau, .. } => *tau,
            TimeGrid::Variable { taus, .. } => taus.iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// Dirichlet boundary data: either an evaluator `g(t, x)` or explicit
/// per-step boundary dof vectors.
#[derive(Clone)]
pub enum BoundaryData {
    Function(Arc<dyn Fn(f64, Point2) -> f64 + Send + Sync>),
    /// `values[n]` holds the boundary dof vector at `times[n]`; evaluation
    /// between samples is piecewise linear (the nodal reconstruction).
    Samples { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryData::Function(_) => write!(f, "BoundaryData::Function"),
            BoundaryData::Samples { times, .. } => {
                write!(f, "BoundaryData::Samples({} steps)", times.len())
            }
        }
    }
}

impl BoundaryData {
    pub fn constant(c: f64) -> BoundaryData {
        BoundaryData::Function(Arc::new(move |_, _| c))
    }

    pub fn function(f: impl Fn(f64, Point2) -> f64 + Send + Sync + 'static) -> BoundaryData {
        BoundaryData::Function(Arc::new(f))
    }

    pub fn zero() -> BoundaryData {
        BoundaryData::constant(0.0)
    }

    /// Boundary dof values at time `t` (nodal interpolation of `g(t, .)`
    /// for functions, linear-in-time interpolation for samples).
    pub fn at_time(&self, space: &FeSpace, t: f64) -> Result<Vec<f64>> {
        match self {
            BoundaryData::Function(f) => {
                let mut out = Vec::with_capacity(space.boundary_dofs().len());
                for &d in space.boundary_dofs() {
                    let v = f(t, space.dof_coords()[d]);
                    if !v.is_finite() {
                        return Err(Error::NonFinite(format!(
                            "boundary data not finite at t = {t}, dof {d}"
                        )));
                    }
                    out.push(v);
                }
                Ok(out)
            }
            BoundaryData::Samples { times, values } => {
                if values.is_empty() {
                    return Err(Error::invalid("empty boundary samples"));
                }
                let nb = space.boundary_dofs().len();
                if values[0].len() != nb {
                    return Err(Error::invalid(format!(
                        "boundary sample width {} does not match {} boundary dofs",
                        values[0].len(),
                        nb
                    )));
                }
                if t <= times[0] {
                    return Ok(values[0].clone());
                }
                if t >= *times.last().unwrap() {
                    return Ok(values.last().unwrap().clone());
                }
                let idx = times.partition_point(|&s| s <= t);
                let (t0, t1) = (times[idx - 1], times[idx]);
                let w = (t - t0) / (t1 - t0);
                Ok(values[idx - 1]
                    .iter()
                    .zip(&values[idx])
                    .map(|(a, b)| a + w * (b - a))
                    .collect())
            }
        }
    }
}

/// Time-indexed sequence of fields over one space, with its step grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    /// `fields[n]` is the solution at `t_n`, `n = 0..=N`.
    pub fields: Vec<Field>,
    pub scheme: String,
}

impl Trajectory {
    pub fn space(&self) -> &Arc<FeSpace> {
        self.fields[0].space()
    }

    /// Max sup-norm over steps `from..=to`.
    pub fn max_linf(&self, from: usize, to: usize) -> f64 {
        self.fields[from..=to]
            .iter()
            .map(|f| crate::fem::norm(f, crate::fem::NormKind::Linf, None))
            .fold(0.0, f64::max)
    }

    /// Export: one field snapshot per step plus `grid.csv`.
    pub fn export(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut csv = String::from("step,t,tau\n");
        for (n, field) in self.fields.iter().enumerate() {
            let tau = if n == 0 { 0.0 } else { self.grid.tau(n) };
            let _ = writeln!(csv, "{n},{:.16e},{:.16e}", self.grid.time(n), tau);
            std::fs::write(
                dir.join(format!("step_{n:05}.txt")),
                crate::fem::write_field_snapshot(field),
            )?;
        }
        std::fs::write(dir.join("grid.csv"), csv)?;
        Ok(())
    }
}

fn boundary_lift(space: &Arc<FeSpace>, boundary_values: &[f64]) -> Field {
    let mut lift = Field::zeros(space.clone());
    lift.set_boundary(boundary_values);
    lift
}

/// Fully discrete BDF-k scheme with Dirichlet data on a uniform grid.
///
/// Boundary rows of each step are set (not solved) to `g_h^n`; the interior
/// block system reuses one factorization across all steps.
pub fn bdf_solve(
    sys: &InteriorSystem,
    k: usize,
    grid: &TimeGrid,
    bdata: &BoundaryData,
    starting: &[Field],
) -> Result<Trajectory> {
    let table = bdf_table(k)?;
    let TimeGrid::Uniform { tau, n_steps } = *grid else {
        return Err(Error::invalid("bdf_solve requires a uniform grid"));
    };
    if starting.len() != k {
        return Err(Error::invalid(format!(
            "need {k} starting fields, got {}",
            starting.len()
        )));
    }
    if n_steps < k {
        return Err(Error::invalid("grid shorter than the BDF order"));
    }
    let space = sys.space().clone();
    let factor = sys.factor_real(table.delta[0] / tau, 1.0)?;
    let mut fields: Vec<Field> = starting.to_vec();
    let n_dofs = space.num_dofs();
    for n in k..=n_steps {
        let g_n = bdata.at_time(&space, grid.time(n))?;
        let u_bc = boundary_lift(&space, &g_n);
        // w = sum_{j=1..k} delta_j u^{n-j} + delta_0 u_bc
        let mut w = vec![0.0f64; n_dofs];
        for j in 1..=k {
            let uj = &fields[n - j].values;
            let dj = table.delta[j];
            for i in 0..n_dofs {
                w[i] += dj * uj[i];
            }
        }
        for i in 0..n_dofs {
            w[i] = (w[i] + table.delta[0] * u_bc.values[i]) / tau;
        }
        let mut rhs = sys.mass.matvec(&w);
        let a_ubc = sys.stiffness.matvec(&u_bc.values);
        for i in 0..n_dofs {
            rhs[i] = -(rhs[i] + a_ubc[i]);
        }
        let ui = factor.solve(&sys.gather_interior(&rhs));
        let mut u = Field::new(space.clone(), sys.scatter_interior(&ui));
        u.set_boundary(&g_n);
        fields.push(u);
    }
    Ok(Trajectory {
        grid: grid.clone(),
        fields,
        scheme: format!("bdf{k}"),
    })
}

/// Starting values for BDF-k: `u^0 = u0` (boundary rows forced to
/// `g_h^0`), then BDF-1 substeps of size `tau` for `u^1 .. u^{k-1}`.
pub fn starting_values(
    sys: &InteriorSystem,
    k: usize,
    tau: f64,
    bdata: &BoundaryData,
    u0: &Field,
) -> Result<Vec<Field>> {
    if !(1..=6).contains(&k) {
        return Err(Error::invalid(format!("BDF order {k} outside 1..=6")));
    }
    let space = sys.space().clone();
    let mut out = Vec::with_capacity(k);
    let mut first = u0.clone();
    first.set_boundary(&bdata.at_time(&space, 0.0)?);
    out.push(first);
    if k == 1 {
        return Ok(out);
    }
    let factor = sys.factor_real(1.0 / tau, 1.0)?;
    let n_dofs = space.num_dofs();
    for n in 1..k {
        let g_n = bdata.at_time(&space, tau * n as f64)?;
        let u_bc = boundary_lift(&space, &g_n);
        let prev = &out[n - 1];
        // (M/tau + A)_II u = (M (u_prev - u_bc))_I / tau - (A u_bc)_I
        let mut w = vec![0.0f64; n_dofs];
        for i in 0..n_dofs {
            w[i] = (prev.values[i] - u_bc.values[i]) / tau;
        }
        let mut rhs = sys.mass.matvec(&w);
        let a_ubc = sys.stiffness.matvec(&u_bc.values);
        for i in 0..n_dofs {
            rhs[i] -= a_ubc[i];
        }
        let ui = factor.solve(&sys.gather_interior(&rhs));
        let mut u = Field::new(space.clone(), sys.scatter_interior(&ui));
        u.set_boundary(&g_n);
        out.push(u);
    }
    Ok(out)
}

/// Semi-discrete reference: BDF-2 (BDF-1 first step) on a fine substep
/// grid, sampled back at the output grid's nodes.
pub fn semidiscrete_reference(
    sys: &InteriorSystem,
    bdata: &BoundaryData,
    u0: &Field,
    out_grid: &TimeGrid,
    substeps: usize,
) -> Result<Trajectory> {
    let TimeGrid::Uniform { tau, n_steps } = *out_grid else {
        return Err(Error::invalid(
            "semidiscrete_reference expects a uniform output grid",
        ));
    };
    if substeps == 0 {
        return Err(Error::invalid("substeps must be >= 1"));
    }
    let space = sys.space().clone();
    let tau_f = tau / substeps as f64;
    let mut u_prev2: Option<Field> = None;
    let mut u_prev = {
        let mut f = u0.clone();
        f.set_boundary(&bdata.at_time(&space, 0.0)?);
        f
    };
    let mut out = vec![u_prev.clone()];
    let n_dofs = space.num_dofs();
    let f_bdf1 = sys.factor_real(1.0 / tau_f, 1.0)?;
    let f_bdf2 = sys.factor_real(1.5 / tau_f, 1.0)?;
    let total_sub = n_steps * substeps;
    for m in 1..=total_sub {
        let t = tau_f * m as f64;
        let g = bdata.at_time(&space, t)?;
        let u_bc = boundary_lift(&space, &g);
        let u = if let Some(p2) = &u_prev2 {
            // BDF-2: (1.5/tau M + A) u = M (2 u^{m-1} - 0.5 u^{m-2}
            //        - 1.5 u_bc)/tau - A u_bc
            let mut w = vec![0.0f64; n_dofs];
            for i in 0..n_dofs {
                w[i] = (2.0 * u_prev.values[i] - 0.5 * p2.values[i] - 1.5 * u_bc.values[i]) / tau_f;
            }
            let mut rhs = sys.mass.matvec(&w);
            let a_ubc = sys.stiffness.matvec(&u_bc.values);
            for i in 0..n_dofs {
                rhs[i] -= a_ubc[i];
            }
            let ui = f_bdf2.solve(&sys.gather_interior(&rhs));
            let mut u = Field::new(space.clone(), sys.scatter_interior(&ui));
            u.set_boundary(&g);
            u
        } else {
            let mut w = vec![0.0f64; n_dofs];
            for i in 0..n_dofs {
                w[i] = (u_prev.values[i] - u_bc.values[i]) / tau_f;
            }
            let mut rhs = sys.mass.matvec(&w);
            let a_ubc = sys.stiffness.matvec(&u_bc.values);
            for i in 0..n_dofs {
                rhs[i] -= a_ubc[i];
            }
            let ui = f_bdf1.solve(&sys.gather_interior(&rhs));
            let mut u = Field::new(space.clone(), sys.scatter_interior(&ui));
            u.set_boundary(&g);
            u
        };
        u_prev2 = Some(std::mem::replace(&mut u_prev, u));
        if m % substeps == 0 {
            out.push(u_prev.clone());
        }
    }
    Ok(Trajectory {
        grid: out_grid.clone(),
        fields: out,
        scheme: "semidiscrete".into(),
    })
}

/// Discrete harmonic extension: prescribed boundary values, zero stiffness
/// residual against the zero-trace subspace.
pub fn discrete_harmonic_extension(sys: &InteriorSystem, boundary_values: &[f64]) -> Result<Field> {
    let space = sys.space().clone();
    let lift = boundary_lift(&space, boundary_values);
    let a_lift = sys.stiffness.matvec(&lift.values);
    let rhs: Vec<f64> = a_lift.iter().map(|v| -v).collect();
    let mut w = sys.solve_interior_real(0.0, 1.0, &rhs)?;
    for (&d, &v) in space.boundary_dofs().iter().zip(boundary_values) {
        w.values[d] = v;
    }
    Ok(w)
}

/// Variable-step dG(0) via the harmonic-extension splitting: `u = v + G`
/// where `G(t_m)` extends `g_h(t_m)` harmonically and `v` solves the
/// zero-boundary dG(0) recursion driven by the interval averages of
/// `-dG/dt`.
pub fn dg0_solve(
    sys: &InteriorSystem,
    grid: &TimeGrid,
    bdata: &BoundaryData,
    u0: &Field,
) -> Result<Trajectory> {
    let space = sys.space().clone();
    let n_steps = grid.n_steps();
    let n_dofs = space.num_dofs();
    let mut g_prev = discrete_harmonic_extension(sys, &bdata.at_time(&space, 0.0)?)?;
    // v_0 = interior part of u0 - G_0
    let mut v_prev = Field::zeros(space.clone());
    for &d in space.interior_dofs() {
        v_prev.values[d] = u0.values[d] - g_prev.values[d];
    }
    let mut first = u0.clone();
    first.set_boundary(&bdata.at_time(&space, 0.0)?);
    let mut fields = vec![first];
    for m in 1..=n_steps {
        let tau_m = grid.tau(m);
        let g_m = discrete_harmonic_extension(sys, &bdata.at_time(&space, grid.time(m))?)?;
        // (M + tau_m A)_II v_m = (M (v_{m-1} - (G_m - G_{m-1})))_I
        let mut w = vec![0.0f64; n_dofs];
        for i in 0..n_dofs {
            w[i] = v_prev.values[i] - (g_m.values[i] - g_prev.values[i]);
        }
        let rhs = sys.mass.matvec(&w);
        let factor = sys.factor_real(1.0, tau_m)?;
        let vi = factor.solve(&sys.gather_interior(&rhs));
        let v_m = Field::new(space.clone(), sys.scatter_interior(&vi));
        let mut u_m = g_m.clone();
        u_m.axpy(1.0, &v_m);
        fields.push(u_m);
        v_prev = v_m;
        g_prev = g_m;
    }
    Ok(Trajectory {
        grid: grid.clone(),
        fields,
        scheme: "dg0".into(),
    })
}

/// The three-way splitting of a BDF-k solution: `u1` sees only the boundary
/// data of the last two steps, `u2` the complement, and `u3` only the
/// starting values; their pointwise sum is the full solution.
pub fn split_solution(
    sys: &InteriorSystem,
    k: usize,
    grid: &TimeGrid,
    bdata: &BoundaryData,
    starting: &[Field],
) -> Result<(Trajectory, Trajectory, Trajectory)> {
    let TimeGrid::Uniform { n_steps, .. } = *grid else {
        return Err(Error::invalid("split_solution requires a uniform grid"));
    };
    let space = sys.space().clone();
    let nb = space.boundary_dofs().len();
    let times: Vec<f64> = (0..=n_steps).map(|n| grid.time(n)).collect();
    let mut last_two = vec![vec![0.0; nb]; n_steps + 1];
    let mut complement = vec![vec![0.0; nb]; n_steps + 1];
    for n in k..=n_steps {
        let g = bdata.at_time(&space, times[n])?;
        if n + 1 == n_steps || n == n_steps {
            last_two[n] = g;
        } else {
            complement[n] = g;
        }
    }
    let zeros: Vec<Field> = (0..k).map(|_| Field::zeros(space.clone())).collect();
    let u1 = bdf_solve(
        sys,
        k,
        grid,
        &BoundaryData::Samples {
            times: times.clone(),
            values: last_two,
        },
        &zeros,
    )?;
    let u2 = bdf_solve(
        sys,
        k,
        grid,
        &BoundaryData::Samples {
            times: times.clone(),
            values: complement,
        },
        &zeros,
    )?;
    let u3 = bdf_solve(sys, k, grid, &BoundaryData::zero(), starting)?;
    Ok((u1, u2, u3))
}
