//! Windowed eigensolver for real symmetric tridiagonal matrices.
//!
//! Eigenvalues are located by Sturm-count bisection, eigenvectors by inverse
//! iteration with reorthogonalization inside clusters.

use crate::error::{FlowError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

/// Eigenvalue with its unit eigenvector.
#[derive(Debug, Clone)]
pub struct RealPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len(),
            "off-diagonal must have n - 1 entries"
        );
        SymTridiag { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Infinity norm, an upper bound on the spectral radius.
    pub fn norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    fn pivmin(&self) -> f64 {
        let max_off = self.off.iter().fold(1.0_f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * max_off
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// All eigenvalues in the half-open window `[lo, hi)`, ascending.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let c_lo = self.count_below(lo);
        let c_hi = self.count_below(hi);
        let mut out = Vec::with_capacity(c_hi.saturating_sub(c_lo));
        let scale = self.norm().max(1.0);
        self.bisect(lo, hi, c_lo, c_hi, scale, &mut out, 0);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn bisect(
        &self,
        a: f64,
        b: f64,
        ca: usize,
        cb: usize,
        scale: f64,
        out: &mut Vec<f64>,
        depth: usize,
    ) {
        if cb <= ca {
            return;
        }
        let tol = 4.0 * f64::EPSILON * scale;
        if b - a <= tol || depth > 200 {
            let mid = 0.5 * (a + b);
            out.extend(std::iter::repeat(mid).take(cb - ca));
            return;
        }
        let mid = 0.5 * (a + b);
        let cm = self.count_below(mid);
        self.bisect(a, mid, ca, cm, scale, out, depth + 1);
        self.bisect(mid, b, cm, cb, scale, out, depth + 1);
    }

    /// Eigenpairs with eigenvalue in `[lo, hi)`.
    pub fn eigenpairs_in(&self, lo: f64, hi: f64) -> Result<Vec<RealPair>> {
        if !(lo < hi) {
            return Err(FlowError::InvalidWindow { lo, hi });
        }
        let values = self.eigenvalues_in(lo, hi);
        let norm = self.norm().max(1.0);
        let cluster_gap = 1e-3 * norm;
        let mut pairs: Vec<RealPair> = Vec::with_capacity(values.len());
        let mut cluster_start = 0;
        for (idx, &value) in values.iter().enumerate() {
            if idx > 0 && value - values[idx - 1] > cluster_gap {
                cluster_start = idx;
            }
            let vector = self.inverse_iteration(value, idx, &pairs[cluster_start..idx], norm)?;
            pairs.push(RealPair { value, vector });
        }
        Ok(pairs)
    }

    fn inverse_iteration(
        &self,
        value: f64,
        seed: usize,
        cluster: &[RealPair],
        norm: f64,
    ) -> Result<Vec<f64>> {
        let n = self.dim();
        let lu = TridiagLu::factor(self, value, norm);
        let mut x = start_vector(n, seed);
        let mut y = vec![0.0; n];
        let mut resid = vec![0.0; n];
        let target = 1e-12 * (1.0 + value.abs()).max(norm * 1e-3);
        let mut last_res = f64::INFINITY;
        for iter in 0..12 {
            lu.solve(&x, &mut y);
            for p in cluster {
                let d = dot(&p.vector, &y);
                axpy(-d, &p.vector, &mut y);
            }
            let nrm = dot(&y, &y).sqrt();
            if !nrm.is_finite() || nrm == 0.0 {
                return Err(FlowError::Eigensolver(format!(
                    "inverse iteration breakdown at eigenvalue {value} (iteration {iter})"
                )));
            }
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / nrm;
            }
            self.matvec(&x, &mut resid);
            let res = resid
                .iter()
                .zip(&x)
                .map(|(r, xi)| (r - value * xi).powi(2))
                .sum::<f64>()
                .sqrt();
            last_res = res;
            if iter >= 1 && res <= target {
                return Ok(x);
            }
        }
        if last_res <= 1e-9 * (1.0 + value.abs()) {
            Ok(x)
        } else {
            Err(FlowError::Eigensolver(format!(
                "inverse iteration did not converge at eigenvalue {value}: residual {last_res:e} after 12 iterations"
            )))
        }
    }
}

fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    // deterministic pseudo-random start
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15 ^ (seed as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// LU factorization of `T - shift I` with partial pivoting.
struct TridiagLu {
    // U has three diagonals: u0 (main), u1, u2
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    // multipliers and row swaps
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiag, shift: f64, norm: f64) -> Self {
        let n = t.dim();
        let tiny = f64::EPSILON * norm;
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];
        // the active row i holds (d, c) at columns (i, i+1)
        let mut d = t.diag[0] - shift;
        let mut c = if n > 1 { t.off[0] } else { 0.0 };
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if d.abs() < tiny { tiny } else { d };
                break;
            }
            let sub = t.off[i];
            let next_d = t.diag[i + 1] - shift;
            let next_c = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if sub.abs() > d.abs() {
                // swap rows i and i+1
                swapped[i] = true;
                u0[i] = sub;
                u1[i] = next_d;
                u2[i] = next_c;
                let m = d / sub;
                l[i] = m;
                d = c - m * next_d;
                c = -m * next_c;
            } else {
                let piv = if d.abs() < tiny { tiny } else { d };
                u0[i] = piv;
                u1[i] = c;
                let m = sub / piv;
                l[i] = m;
                d = next_d - m * c;
                c = next_c;
            }
        }
        TridiagLu {
            u0,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64], out: &mut [f64]) {
        let n = rhs.len();
        out.copy_from_slice(rhs);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                out.swap(i, i + 1);
            }
            out[i + 1] -= self.l[i] * out[i];
        }
        for i in (0..n).rev() {
            let mut s = out[i];
            if i + 1 < n {
                s -= self.u1[i] * out[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * out[i + 2];
            }
            out[i] = s / self.u0[i];
        }
        // rescale to avoid overflow on nearly singular shifts
        let m = out.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if m > 1e150 {
            out.iter_mut().for_each(|v| *v /= m);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_eigs(t: &SymTridiag) -> Vec<f64> {
        let n = t.dim();
        let m = faer::Mat::<f64>::from_fn(n, n, |i, j| {
            if i == j {
                t.diag[i]
            } else if i + 1 == j {
                t.off[i]
            } else if j + 1 == i {
                t.off[j]
            } else {
                0.0
            }
        });
        let mut v: Vec<f64> = m
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .unwrap()
            .into_iter()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn diagonal_window() {
        let t = SymTridiag::new(vec![-3.0, -1.0, 0.5, 2.0, 7.0], vec![0.0; 4]);
        let pairs = t.eigenpairs_in(-2.0, 3.0).unwrap();
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        assert_eq!(vals.len(), 3);
        for (a, b) in vals.iter().zip([-1.0, 0.5, 2.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_dense_solver() {
        let n = 200;
        let diag: Vec<f64> = (0..n)
            .map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0)
            .collect();
        let off: Vec<f64> = (0..n - 1)
            .map(|i| 1.0 + ((i * 31) % 13) as f64 / 13.0)
            .collect();
        let t = SymTridiag::new(diag, off);
        let dense = dense_eigs(&t);
        let pairs = t.eigenpairs_in(-1.5, 1.5).unwrap();
        let expected: Vec<f64> = dense
            .into_iter()
            .filter(|v| *v >= -1.5 && *v < 1.5)
            .collect();
        assert_eq!(pairs.len(), expected.len());
        let mut tmp = vec![0.0; n];
        for (p, e) in pairs.iter().zip(&expected) {
            assert!((p.value - e).abs() < 1e-12, "{} vs {}", p.value, e);
            t.matvec(&p.vector, &mut tmp);
            let r: f64 = tmp
                .iter()
                .zip(&p.vector)
                .map(|(a, b)| (a - p.value * b).powi(2))
                .sum();
            assert!(r.sqrt() < 1e-10);
        }
        for i in 0..pairs.len() {
            for j in 0..i {
                assert!(dot(&pairs[i].vector, &pairs[j].vector).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn degenerate_blocks_stay_orthogonal() {
        // two decoupled identical blocks give exactly doubled eigenvalues
        let mut diag = vec![0.3, -0.2, 0.8, 0.1];
        diag.extend(diag.clone());
        let off = vec![1.0, 0.5, 0.7, 0.0, 1.0, 0.5, 0.7];
        let t = SymTridiag::new(diag, off);
        let pairs = t.eigenpairs_in(-5.0, 5.0).unwrap();
        assert_eq!(pairs.len(), 8);
        for i in 0..8 {
            for j in 0..i {
                assert!(dot(&pairs[i].vector, &pairs[j].vector).abs() < 1e-8);
            }
        }
    }
}
