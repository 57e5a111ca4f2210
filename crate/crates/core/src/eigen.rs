//! Generalized symmetric eigensolvers.
//!
//! Two shapes cover everything in this crate:
//!
//! * [`TridiagPencil`] — `K x = λ M x` with both matrices symmetric
//!   tridiagonal and `M` positive definite. The piecewise-linear radial
//!   finite elements produce exactly this. Solved by Sturm-sequence
//!   counting (inertia of the `LDLᵀ` factorization of `K - λM`) plus
//!   bisection, which stays O(n) per count even on strongly graded meshes,
//!   and inverse iteration for eigenvectors.
//! * [`generalized_dense_lowest`] — `A x = λ B x` with `A` symmetric and
//!   `B` dense symmetric positive definite, reduced by a Cholesky factor of
//!   `B` to a standard symmetric problem. Used by the Fourier Steklov solve
//!   where the boundary mass matrix is dense.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric tridiagonal pencil `(K, M)`, `M` positive definite.
#[derive(Clone, Debug)]
pub struct TridiagPencil {
    pub k_diag: Vec<f64>,
    pub k_off: Vec<f64>,
    pub m_diag: Vec<f64>,
    pub m_off: Vec<f64>,
}

impl TridiagPencil {
    pub fn new(k_diag: Vec<f64>, k_off: Vec<f64>, m_diag: Vec<f64>, m_off: Vec<f64>) -> Result<Self> {
        let n = k_diag.len();
        if n == 0 || k_off.len() != n - 1 || m_diag.len() != n || m_off.len() != n - 1 {
            return Err(Error::InvalidParameter(
                "tridiagonal pencil arrays have inconsistent lengths".into(),
            ));
        }
        if m_diag.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::DegenerateWeight(
                "mass matrix has a non-positive diagonal entry".into(),
            ));
        }
        Ok(TridiagPencil {
            k_diag,
            k_off,
            m_diag,
            m_off,
        })
    }

    pub fn len(&self) -> usize {
        self.k_diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_diag.is_empty()
    }

    /// Number of generalized eigenvalues strictly below `lambda`:
    /// the count of negative pivots in the `LDLᵀ` factorization of
    /// `K - λM` (Sylvester inertia; `M > 0` makes the pencil definite).
    pub fn count_below(&self, lambda: f64) -> usize {
        let n = self.len();
        let mut count = 0usize;
        let mut q = self.k_diag[0] - lambda * self.m_diag[0];
        // zero pivots count as negative (LAPACK dstebz convention), which
        // keeps the staircase exact when a whole diagonal hits zero at once
        if q == 0.0 {
            q = -f64::MIN_POSITIVE;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let b = self.k_off[i - 1] - lambda * self.m_off[i - 1];
            let mut next = (self.k_diag[i] - lambda * self.m_diag[i]) - b * (b / q);
            if next.is_nan() || next == 0.0 {
                next = -f64::MIN_POSITIVE;
            }
            if next < 0.0 {
                count += 1;
            }
            q = next;
        }
        count
    }

    /// The `count` lowest generalized eigenvalues, ascending, each located
    /// by bisection to relative width ~1e-14.
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>> {
        let n = self.len();
        if count == 0 {
            return Ok(Vec::new());
        }
        if count > n {
            return Err(Error::InvalidParameter(format!(
                "requested {count} eigenvalues from a pencil of size {n}"
            )));
        }
        // bracket all wanted eigenvalues by doubling
        let mut hi = 1.0;
        let mut guard = 0;
        while self.count_below(hi) < count {
            hi *= 4.0;
            guard += 1;
            if guard > 600 {
                return Err(Error::NumericBreakdown(
                    "failed to bracket eigenvalues from above".into(),
                ));
            }
        }
        let mut lo = -1.0;
        guard = 0;
        while self.count_below(lo) > 0 {
            lo *= 4.0;
            guard += 1;
            if guard > 600 {
                return Err(Error::NumericBreakdown(
                    "failed to bracket eigenvalues from below".into(),
                ));
            }
        }
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            // smallest λ with count_below(λ) > k
            let (mut l, mut u) = (lo, hi);
            // reuse previously found eigenvalues as a tighter floor
            if let Some(&prev) = out.last() {
                l = prev;
            }
            for _ in 0..200 {
                let mid = 0.5 * (l + u);
                if mid <= l || mid >= u {
                    break;
                }
                if self.count_below(mid) > k {
                    u = mid;
                } else {
                    l = mid;
                }
                if u - l <= 1e-14 * mid.abs().max(1e-30) {
                    break;
                }
            }
            out.push(0.5 * (l + u));
        }
        Ok(out)
    }

    /// Eigenvector for an eigenvalue approximation `lambda` by inverse
    /// iteration on `K - σM` with a small detuning shift, normalized to
    /// unit `M`-norm.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = lambda.abs().max(1.0);
        let sigma = lambda + 1e-11 * scale;
        let sub: Vec<f64> = (0..n - 1)
            .map(|i| self.k_off[i] - sigma * self.m_off[i])
            .collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| self.k_diag[i] - sigma * self.m_diag[i])
            .collect();
        let lu = TridiagLu::factor(&sub, &diag, &sub)?;

        let mut v = vec![0.0; n];
        for (i, x) in v.iter_mut().enumerate() {
            // deterministic, sign-alternating start with no special symmetry
            *x = 1.0 + 0.5 * ((i % 3) as f64 - 1.0);
        }
        self.m_normalize(&mut v);
        for _ in 0..4 {
            // rhs = M v
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                rhs[i] = self.m_diag[i] * v[i];
                if i > 0 {
                    rhs[i] += self.m_off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    rhs[i] += self.m_off[i] * v[i + 1];
                }
            }
            lu.solve(&mut rhs);
            if rhs.iter().any(|x| !x.is_finite()) {
                return Err(Error::NumericBreakdown(
                    "inverse iteration produced non-finite vector".into(),
                ));
            }
            v = rhs;
            self.m_normalize(&mut v);
        }
        Ok(v)
    }

    fn m_normalize(&self, v: &mut [f64]) {
        let n = v.len();
        let mut norm2 = 0.0;
        for i in 0..n {
            norm2 += self.m_diag[i] * v[i] * v[i];
            if i + 1 < n {
                norm2 += 2.0 * self.m_off[i] * v[i] * v[i + 1];
            }
        }
        let norm = norm2.abs().sqrt();
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
    }

    /// Rayleigh quotient `vᵀKv / vᵀMv` for diagnostics.
    pub fn rayleigh(&self, v: &[f64]) -> f64 {
        let n = self.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            num += self.k_diag[i] * v[i] * v[i];
            den += self.m_diag[i] * v[i] * v[i];
            if i + 1 < n {
                num += 2.0 * self.k_off[i] * v[i] * v[i + 1];
                den += 2.0 * self.m_off[i] * v[i] * v[i + 1];
            }
        }
        num / den
    }
}

/// LU factorization of a tridiagonal matrix with partial pivoting
/// (row swaps introduce one extra superdiagonal).
struct TridiagLu {
    n: usize,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper1: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut u1 = vec![0.0; n.saturating_sub(1)];
        u1.copy_from_slice(sup);
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            let a = sub[i];
            if d[i].abs() >= a.abs() {
                let piv = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
                let m = a / piv;
                l[i] = m;
                d[i + 1] -= m * u1[i];
                // u2 entry stays whatever fill-in previous swaps left (zero here)
            } else {
                // swap rows i and i+1
                swapped[i] = true;
                let piv = a;
                let m = d[i] / piv;
                l[i] = m;
                let old_u1 = u1[i];
                u1[i] = d[i + 1];
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] *= -m;
                }
                d[i] = piv;
                // row i+1 ← old row i − m·(new row i); its diagonal lands on
                // the old superdiagonal entry
                d[i + 1] = old_u1 - m * u1[i];
            }
        }
        if d.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericBreakdown("tridiagonal LU broke down".into()));
        }
        Ok(TridiagLu {
            n,
            lower: l,
            diag: d,
            upper1: u1,
            upper2: u2,
            swapped,
        })
    }

    /// Solves in place. The solution is only meaningful up to scale: when an
    /// entry threatens to overflow (inverse iteration against a nearly
    /// singular shift), the whole vector is rescaled and the pass continues.
    fn solve(&self, b: &mut [f64]) {
        const BIG: f64 = 1e200;
        let n = self.n;
        // forward pass with the recorded row exchanges
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.lower[i] * b[i];
            if b[i + 1].abs() > BIG {
                for x in b.iter_mut() {
                    *x /= BIG;
                }
            }
        }
        // back substitution against U (diag + two superdiagonals)
        for i in (0..n).rev() {
            let mut x = b[i];
            if i + 1 < n {
                x -= self.upper1[i] * b[i + 1];
            }
            if i + 2 < n {
                x -= self.upper2[i] * b[i + 2];
            }
            let piv = if self.diag[i] == 0.0 {
                f64::MIN_POSITIVE
            } else {
                self.diag[i]
            };
            b[i] = x / piv;
            if b[i].abs() > BIG {
                for y in b.iter_mut() {
                    *y /= BIG;
                }
            }
        }
    }
}

/// Lowest `count` eigenvalues of `A x = λ B x` with `A = diag(a)` positive
/// semidefinite and `B` dense symmetric positive definite.
///
/// `B = LLᵀ` (with one retry under a `1e-12·trace/n` diagonal jitter, for
/// near-degenerate mass matrices), then the standard symmetric problem
/// `L⁻¹ A L⁻ᵀ` is solved for eigenvalues only.
pub fn generalized_dense_lowest(
    a_diag: &[f64],
    b: &DMatrix<f64>,
    count: usize,
) -> Result<Vec<f64>> {
    let n = a_diag.len();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::InvalidParameter(
            "diagonal/mass size mismatch in generalized solve".into(),
        ));
    }
    if count > n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenvalues from a problem of size {n}"
        )));
    }
    let chol = match nalgebra::Cholesky::new(b.clone()) {
        Some(c) => c,
        None => {
            let jitter = 1e-12 * b.trace() / n as f64;
            let mut bj = b.clone();
            for i in 0..n {
                bj[(i, i)] += jitter;
            }
            nalgebra::Cholesky::new(bj).ok_or_else(|| {
                Error::InvalidDensity(
                    "boundary mass matrix is not positive definite (even after jitter)".into(),
                )
            })?
        }
    };
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ computed as (L⁻¹ (L⁻¹ A)ᵀ)ᵀ; A diagonal keeps it cheap.
    let mut work = DMatrix::zeros(n, n);
    for j in 0..n {
        work[(j, j)] = a_diag[j];
    }
    l.solve_lower_triangular_mut(&mut work); // L⁻¹ A
    work.transpose_mut(); // A L⁻ᵀ
    l.solve_lower_triangular_mut(&mut work); // L⁻¹ A L⁻ᵀ
    // symmetrize roundoff
    let c = (&work + work.transpose()) * 0.5;
    let mut eig: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    if eig.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericBreakdown(
            "symmetric eigensolver returned non-finite values".into(),
        ));
    }
    eig.sort_by(f64::total_cmp);
    eig.truncate(count);
    Ok(eig)
}
