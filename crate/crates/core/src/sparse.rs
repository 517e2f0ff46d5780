//! Sparse symmetric storage and a profile (skyline) LDL^T direct solver.
//!
//! The assembled operators are real symmetric; shifted systems `z M + A`
//! with complex `z` are complex symmetric (not Hermitian), so the solver is
//! an unpivoted LDL^T over a generic scalar, instantiated for `f64` and
//! `Complex64`. Rows are permuted by reverse Cuthill–McKee to keep the
//! profile small; fill-in of LDL^T stays inside the skyline envelope.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar abstraction for the factorization: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Symmetric sparse matrix in CSR form storing both triangles.
#[derive(Debug, Clone)]
pub struct SymCsr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SymCsr {
    /// Build from triplets; duplicate entries are summed. Only `(i, j)`
    /// with `i <= j` need be supplied, the lower triangle is mirrored.
    pub fn from_upper_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> SymCsr {
        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            debug_assert!(i <= j && j < n);
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in full {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SymCsr {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = s;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        0.0
    }

    /// Largest symmetry defect `|a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if j > i {
                    worst = worst.max((self.values[k] - self.get(j, i)).abs());
                }
            }
        }
        worst
    }

    /// Restrict to the index set `keep` (sorted); returns the submatrix.
    pub fn restrict(&self, keep: &[usize]) -> SymCsr {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut trips = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for k in self.row_ptr[old_i]..self.row_ptr[old_i + 1] {
                let j = map[self.col_idx[k]];
                if j != usize::MAX && new_i <= j {
                    trips.push((new_i, j, self.values[k]));
                }
            }
        }
        SymCsr::from_upper_triplets(keep.len(), &trips)
    }
}

/// Reverse Cuthill–McKee ordering of the adjacency pattern of `a`
/// (diagonal ignored). Returns `perm` with `perm[new] = old`.
pub fn rcm_order(a: &SymCsr) -> Vec<usize> {
    let n = a.n;
    let deg = |i: usize| a.row_ptr[i + 1] - a.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    loop {
        // Start from an unvisited vertex of minimal degree, then push it to
        // a pseudo-peripheral position with a couple of BFS sweeps.
        let mut start = usize::MAX;
        let mut best = usize::MAX;
        for i in 0..n {
            if !visited[i] && deg(i) < best {
                best = deg(i);
                start = i;
            }
        }
        if start == usize::MAX {
            break;
        }
        for _ in 0..2 {
            let far = bfs_farthest(a, start, &visited);
            if far == start {
                break;
            }
            start = far;
        }
        // Cuthill–McKee BFS from `start`, neighbours by increasing degree.
        let mut queue = std::collections::VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = (a.row_ptr[u]..a.row_ptr[u + 1])
                .map(|k| a.col_idx[k])
                .filter(|&v| v != u && !visited[v])
                .collect();
            nbrs.sort_by_key(|&v| (deg(v), v));
            nbrs.dedup();
            for v in nbrs {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order.reverse();
    order
}

fn bfs_farthest(a: &SymCsr, start: usize, skip: &[bool]) -> usize {
    let n = a.n;
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    let mut last = start;
    while let Some(u) = queue.pop_front() {
        last = u;
        for k in a.row_ptr[u]..a.row_ptr[u + 1] {
            let v = a.col_idx[k];
            if v != u && !skip[v] && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    last
}

/// Sparsity envelope of a permuted symmetric matrix, shared by all
/// factorizations with that pattern (different shifts reuse it).
#[derive(Debug, Clone)]
pub struct Envelope {
    /// `perm[new] = old`
    pub perm: Vec<usize>,
    /// `inv[old] = new`
    pub inv: Vec<usize>,
    /// First stored column of each (permuted) row, `first[i] <= i`.
    pub first: Vec<usize>,
    /// Start of row `i` in the packed value array; row `i` occupies
    /// `row_start[i] .. row_start[i] + (i - first[i] + 1)`.
    pub row_start: Vec<usize>,
    pub len: usize,
}

impl Envelope {
    /// Envelope of `a` under RCM; `a` supplies the pattern only.
    pub fn new(a: &SymCsr) -> Envelope {
        let perm = rcm_order(a);
        Envelope::with_perm(a, perm)
    }

    pub fn with_perm(a: &SymCsr, perm: Vec<usize>) -> Envelope {
        let n = a.n;
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old_i in 0..n {
            let i = inv[old_i];
            for k in a.row_ptr[old_i]..a.row_ptr[old_i + 1] {
                let j = inv[a.col_idx[k]];
                if j < i && j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut row_start = vec![0usize; n + 1];
        for i in 0..n {
            row_start[i + 1] = row_start[i] + (i - first[i] + 1);
        }
        let len = row_start[n];
        Envelope {
            perm,
            inv,
            first,
            row_start,
            len,
        }
    }

    fn n(&self) -> usize {
        self.perm.len()
    }
}

/// Packed skyline LDL^T factorization of `coeff_m * M + coeff_a * A`
/// (or of a single matrix).
pub struct SkylineFactor<T: Scalar> {
    env: std::sync::Arc<Envelope>,
    /// Unit-lower-triangular rows packed within the envelope (the diagonal
    /// slot of each row is unused after factorization).
    data: Vec<T>,
    diag: Vec<T>,
    /// min |D| / max |D|, a cheap conditioning proxy.
    pub pivot_ratio: f64,
}

/// Pack `coeff_m * m + coeff_a * a` into envelope storage.
fn pack_shifted<T: Scalar>(
    env: &Envelope,
    m: &SymCsr,
    a: &SymCsr,
    coeff_m: T,
    coeff_a: T,
) -> Vec<T> {
    let n = env.n();
    let mut data = vec![T::zero(); env.len];
    let mut add = |mat: &SymCsr, c: T| {
        for old_i in 0..n {
            let i = env.inv[old_i];
            for k in mat.row_ptr[old_i]..mat.row_ptr[old_i + 1] {
                let j = env.inv[mat.col_idx[k]];
                if j <= i {
                    let slot = env.row_start[i] + (j - env.first[i]);
                    data[slot] = data[slot] + c * T::from_real(mat.values[k]);
                }
            }
        }
    };
    add(m, coeff_m);
    add(a, coeff_a);
    data
}

impl<T: Scalar> SkylineFactor<T> {
    /// Factor `coeff_m * M + coeff_a * A` in place over the envelope.
    pub fn new(
        env: std::sync::Arc<Envelope>,
        m: &SymCsr,
        a: &SymCsr,
        coeff_m: T,
        coeff_a: T,
    ) -> Result<SkylineFactor<T>> {
        let mut data = pack_shifted(env.as_ref(), m, a, coeff_m, coeff_a);
        let n = env.n();
        let first = &env.first;
        let rs = &env.row_start;
        let mut diag = vec![T::zero(); n];
        let mut dmin = f64::INFINITY;
        let mut dmax = 0.0f64;
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                // L[i][j] = (K[i][j] - sum_k L[i][k] D[k] L[j][k]) / D[j]
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[rs[i] + (j - fi)];
                let ri = rs[i] - fi;
                let rj = rs[j] - fj;
                for k in lo..j {
                    s = s - data[ri + k] * diag[k] * data[rj + k];
                }
                data[rs[i] + (j - fi)] = s / diag[j];
            }
            let mut d = data[rs[i] + (i - fi)];
            let ri = rs[i] - fi;
            for k in fi..i {
                let lik = data[ri + k];
                d = d - lik * lik * diag[k];
            }
            let dm = d.modulus();
            if dm == 0.0 || !dm.is_finite() {
                return Err(Error::NearSingular(format!("zero pivot at row {i}")));
            }
            dmin = dmin.min(dm);
            dmax = dmax.max(dm);
            diag[i] = d;
        }
        let pivot_ratio = if n == 0 {
            1.0
        } else if dmax > 0.0 {
            dmin / dmax
        } else {
            0.0
        };
        if pivot_ratio < 1e-15 {
            return Err(Error::NearSingular(format!(
                "pivot ratio {pivot_ratio:.3e} below threshold"
            )));
        }
        Ok(SkylineFactor {
            env,
            data,
            diag,
            pivot_ratio,
        })
    }

    /// Solve in the original (unpermuted) ordering.
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let env = self.env.as_ref();
        let n = env.n();
        debug_assert_eq!(rhs.len(), n);
        let first = &env.first;
        let rs = &env.row_start;
        let mut x: Vec<T> = (0..n).map(|i| rhs[env.perm[i]]).collect();
        // Forward: L y = b (unit diagonal).
        for i in 0..n {
            let fi = first[i];
            let ri = rs[i] - fi;
            let mut s = x[i];
            for k in fi..i {
                s = s - self.data[ri + k] * x[k];
            }
            x[i] = s;
        }
        // Diagonal.
        for i in 0..n {
            x[i] = x[i] / self.diag[i];
        }
        // Backward: L^T x = y.
        for i in (0..n).rev() {
            let xi = x[i];
            let fi = first[i];
            let ri = rs[i] - fi;
            for k in fi..i {
                x[k] = x[k] - self.data[ri + k] * xi;
            }
        }
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            out[env.perm[i]] = x[i];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SymCsr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        SymCsr::from_upper_triplets(n, &t)
    }

    #[test]
    fn csr_matvec_and_symmetry() {
        let a = laplacian_1d(5);
        assert_eq!(a.nnz(), 5 + 8);
        assert_eq!(a.symmetry_defect(), 0.0);
        let x = vec![1.0; 5];
        let y = a.matvec_alloc(&x);
        assert_eq!(y, vec![1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn skyline_solves_real_system() {
        let n = 40;
        let a = laplacian_1d(n);
        let zero = SymCsr::from_upper_triplets(n, &[]);
        let env = std::sync::Arc::new(Envelope::new(&a));
        let f = SkylineFactor::<f64>::new(env, &a, &zero, 1.0, 0.0).unwrap();
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.matvec_alloc(&xs);
        let x = f.solve(&b);
        for i in 0..n {
            assert!((x[i] - xs[i]).abs() < 1e-10, "i={i}");
        }
    }

    #[test]
    fn skyline_solves_complex_shift() {
        let n = 30;
        let a = laplacian_1d(n);
        let mut mt = Vec::new();
        for i in 0..n {
            mt.push((i, i, 1.0));
        }
        let m = SymCsr::from_upper_triplets(n, &mt);
        let z = Complex64::new(-3.0, 2.0);
        let env = std::sync::Arc::new(Envelope::new(&a));
        let f = SkylineFactor::<Complex64>::new(env, &m, &a, z, Complex64::new(1.0, 0.0)).unwrap();
        let xs: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).cos(), 0.3 * i as f64))
            .collect();
        // b = (z M + A) xs
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut s = z * xs[i];
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                s += a.values[k] * xs[a.col_idx[k]];
            }
            b[i] = s;
        }
        let x = f.solve(&b);
        for i in 0..n {
            assert!((x[i] - xs[i]).norm() < 1e-9, "i={i}");
        }
    }

    #[test]
    fn restrict_submatrix() {
        let a = laplacian_1d(6);
        let sub = a.restrict(&[1, 2, 4]);
        assert_eq!(sub.n, 3);
        assert_eq!(sub.get(0, 0), 2.0);
        assert_eq!(sub.get(0, 1), -1.0);
        assert_eq!(sub.get(1, 2), 0.0); // 2 and 4 not adjacent
    }
}
