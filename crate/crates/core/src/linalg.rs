//! Small dense kernels on row-major square matrices.
//!
//! Determinants are only ever produced in log form, as a sum of
//! `ln |pivot|` plus a sign, so no kernel here can overflow on large or
//! nearly singular inputs.

/// `ln |det|` and the sign of a determinant. A singular matrix has
/// `sign == 0` and `log_abs == -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogDet {
    pub const SINGULAR: LogDet = LogDet { log_abs: f64::NEG_INFINITY, sign: 0 };

    pub fn is_singular(&self) -> bool {
        self.sign == 0
    }
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// In-place Cholesky factorization `A = L L^T` of the symmetric matrix `a`.
///
/// Returns `sum ln L_ii` (half the log-determinant) when `a` is positive
/// definite, `None` otherwise. On success the lower triangle holds `L`; the
/// rest of `a` is overwritten.
pub fn cholesky_in_place(a: &mut [f64], n: usize) -> Option<f64> {
    debug_assert_eq!(a.len(), n * n);
    // Right-looking on the upper triangle, A = U^T U, so every update is a
    // contiguous row operation; L = U^T is written out at the end.
    let mut half_log_det = 0.0;
    for k in 0..n {
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let row_k = &mut head[k * n..];
        let d = row_k[k];
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let u = d.sqrt();
        half_log_det += u.ln();
        let inv = 1.0 / u;
        row_k[k] = u;
        for v in &mut row_k[k + 1..] {
            *v *= inv;
        }
        let row_k = &row_k[..];
        for (r, row_i) in tail.chunks_exact_mut(n).enumerate() {
            let i = k + 1 + r;
            let f = row_k[i];
            if f != 0.0 {
                axpy(-f, &row_k[i..], &mut row_i[i..]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
        }
    }
    Some(half_log_det)
}

/// Given a Cholesky factor `L` (lower triangle of `l`), write `(L L^T)^{-1}`
/// into `out` (full symmetric). `scratch` must hold `n * n` values.
pub fn cholesky_inverse(l: &[f64], n: usize, scratch: &mut [f64], out: &mut [f64]) {
    // scratch <- X = L^{-1}, built row by row: X_i = (e_i - sum_k L_ik X_k) / L_ii.
    let x = &mut scratch[..n * n];
    x.fill(0.0);
    for i in 0..n {
        let (done, rest) = x.split_at_mut(i * n);
        let row = &mut rest[..n];
        row[i] = 1.0;
        for k in 0..i {
            let lik = l[i * n + k];
            if lik != 0.0 {
                axpy(-lik, &done[k * n..k * n + k + 1], &mut row[..k + 1]);
            }
        }
        let inv = 1.0 / l[i * n + i];
        for v in &mut row[..=i] {
            *v *= inv;
        }
    }
    // out <- X^T X, accumulated over rows of X into the lower triangle.
    let out = &mut out[..n * n];
    out.fill(0.0);
    for k in 0..n {
        let xk = &x[k * n..k * n + k + 1];
        for i in 0..=k {
            let xi = xk[i];
            if xi != 0.0 {
                axpy(xi, &xk[..=i], &mut out[i * n..i * n + i + 1]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[j * n + i] = out[i * n + j];
        }
    }
}

/// In-place LU factorization with partial pivoting, `P A = L U`.
///
/// `perm[i]` records the original row now in position `i`. Returns the
/// log-determinant; if an exactly zero pivot column is met the factorization
/// stops and [`LogDet::SINGULAR`] is returned.
pub fn lu_in_place(a: &mut [f64], n: usize, perm: &mut [usize]) -> LogDet {
    debug_assert_eq!(a.len(), n * n);
    for (i, p) in perm.iter_mut().enumerate().take(n) {
        *p = i;
    }
    let mut log_abs = 0.0;
    let mut sign: i8 = 1;
    for c in 0..n {
        let mut piv = c;
        let mut best = a[c * n + c].abs();
        for r in c + 1..n {
            let v = a[r * n + c].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return LogDet::SINGULAR;
        }
        if piv != c {
            for j in 0..n {
                a.swap(c * n + j, piv * n + j);
            }
            perm.swap(c, piv);
            sign = -sign;
        }
        let pivot = a[c * n + c];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot.abs().ln();
        let (top, bottom) = a.split_at_mut((c + 1) * n);
        let prow = &top[c * n..c * n + n];
        for r in 0..n - c - 1 {
            let row = &mut bottom[r * n..r * n + n];
            let f = row[c] / pivot;
            row[c] = f;
            if f != 0.0 {
                axpy(-f, &prow[c + 1..], &mut row[c + 1..]);
            }
        }
    }
    LogDet { log_abs, sign }
}

/// Inverse from a packed LU factorization produced by [`lu_in_place`].
///
/// Solves `L U X = P` for all columns at once with whole-row updates.
pub fn lu_inverse(lu: &[f64], perm: &[usize], n: usize, out: &mut [f64]) {
    let out = &mut out[..n * n];
    out.fill(0.0);
    for (i, &p) in perm.iter().enumerate().take(n) {
        out[i * n + p] = 1.0;
    }
    for i in 1..n {
        let (done, rest) = out.split_at_mut(i * n);
        let row = &mut rest[..n];
        for k in 0..i {
            let f = lu[i * n + k];
            if f != 0.0 {
                axpy(-f, &done[k * n..k * n + n], row);
            }
        }
    }
    for i in (0..n).rev() {
        let (head, tail) = out.split_at_mut((i + 1) * n);
        let row = &mut head[i * n..];
        for k in i + 1..n {
            let f = lu[i * n + k];
            if f != 0.0 {
                axpy(-f, &tail[(k - i - 1) * n..(k - i) * n], row);
            }
        }
        let inv = 1.0 / lu[i * n + i];
        for v in row.iter_mut() {
            *v *= inv;
        }
    }
}

/// LU log-determinant of a copy of `a`.
pub fn log_det(a: &[f64], n: usize) -> LogDet {
    let mut m = a.to_vec();
    let mut perm = vec![0; n];
    lu_in_place(&mut m, n, &mut perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Laplace expansion along the first row, used as an independent oracle.
    fn det_expansion(a: &[f64], n: usize) -> f64 {
        if n == 1 {
            return a[0];
        }
        let mut total = 0.0;
        for c in 0..n {
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for r in 1..n {
                for cc in 0..n {
                    if cc != c {
                        minor.push(a[r * n + cc]);
                    }
                }
            }
            let s = if c % 2 == 0 { 1.0 } else { -1.0 };
            total += s * a[c] * det_expansion(&minor, n - 1);
        }
        total
    }

    fn pseudo_random_matrix(n: usize, seed: u64) -> Vec<f64> {
        let mut s = seed;
        (0..n * n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    #[test]
    fn lu_matches_expansion() {
        for n in 1..=7 {
            for seed in 0..5 {
                let a = pseudo_random_matrix(n, seed * 31 + n as u64);
                let d = det_expansion(&a, n);
                let ld = log_det(&a, n);
                assert_eq!(ld.sign as f64, d.signum(), "n={n}");
                assert_relative_eq!(ld.log_abs.exp(), d.abs(), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn lu_detects_exact_singularity() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert!(log_det(&a, 2).is_singular());
    }

    #[test]
    fn cholesky_spd_inverse() {
        let n = 6;
        let b = pseudo_random_matrix(n, 3);
        // A = B B^T + n I is SPD.
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|t| b[i * n + t] * b[j * n + t]).sum::<f64>() + if i == j { n as f64 } else { 0.0 };
            }
        }
        let mut l = a.clone();
        let half = cholesky_in_place(&mut l, n).unwrap();
        assert_relative_eq!(2.0 * half, log_det(&a, n).log_abs, max_relative = 1e-12);
        let mut scratch = vec![0.0; n * n];
        let mut inv = vec![0.0; n * n];
        cholesky_inverse(&l, n, &mut scratch, &mut inv);
        for i in 0..n {
            for j in 0..n {
                let e: f64 = (0..n).map(|k| a[i * n + k] * inv[k * n + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e - want).abs() < 1e-12, "({i},{j}) = {e}");
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(cholesky_in_place(&mut a, 2).is_none());
    }

    #[test]
    fn lu_inverse_general() {
        let n = 5;
        let a = pseudo_random_matrix(n, 11);
        let mut lu = a.clone();
        let mut perm = vec![0; n];
        assert!(!lu_in_place(&mut lu, n, &mut perm).is_singular());
        let mut inv = vec![0.0; n * n];
        lu_inverse(&lu, &perm, n, &mut inv);
        for i in 0..n {
            for j in 0..n {
                let e: f64 = (0..n).map(|k| a[i * n + k] * inv[k * n + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e - want).abs() < 1e-10);
            }
        }
    }
}
