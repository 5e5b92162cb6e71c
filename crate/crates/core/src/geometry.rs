//! The state manifold of a weighted graph.
//!
//! A parameter point `theta` is a vector of Gaussian variances. The bare
//! network carries the diagonal metric `g_ii = (1/theta_i)^2 / 2`. A graph
//! with adjacency `A` deforms the covariance to `psi = diag(theta) + A` and
//! the metric to `g~_uv = (psi^{-1}_uv)^2 / 2`, defined wherever `psi` is
//! non-degenerate. The metric need not be positive definite, so volumes use
//! `sqrt|det g~|`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::graph::AdjacencyMatrix;
use crate::linalg::{self, LogDet};

/// `|det psi|` at or below this value counts as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-12;

/// A point of the parameter space: strictly positive, finite variances.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint(Vec<f64>);

impl ParameterPoint {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        crate::graph::check_theta(&theta, theta.len())?;
        if theta.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(Self(theta))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `psi = diag(theta) + A` together with its log-determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedMatrix {
    n: usize,
    psi: Vec<f64>,
    log_det: LogDet,
    trace: f64,
}

impl DeformedMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn log_abs_det(&self) -> f64 {
        self.log_det.log_abs
    }

    pub fn sign_det(&self) -> i8 {
        self.log_det.sign
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }
}

/// A metric tensor at one point and `ln sqrt|det g|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricEvaluation {
    n: usize,
    g: Vec<f64>,
    log_sqrt_abs_det: f64,
    sign_det: i8,
}

impl MetricEvaluation {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major components `g_uv`.
    pub fn components(&self) -> &[f64] {
        &self.g
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.g[u * self.n + v]
    }

    /// Natural log of the volume density `sqrt|det g|`; `-inf` when the
    /// metric is singular.
    pub fn log_sqrt_abs_det(&self) -> f64 {
        self.log_sqrt_abs_det
    }

    /// Sign of `det g`. Negative values mark a pseudo-Riemannian point.
    pub fn sign_det(&self) -> i8 {
        self.sign_det
    }
}

pub fn psi_map(theta: &ParameterPoint, a: &AdjacencyMatrix) -> Result<DeformedMatrix> {
    let n = theta.dim();
    if a.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.n() });
    }
    let mut psi = a.as_slice().to_vec();
    for (i, &t) in theta.as_slice().iter().enumerate() {
        psi[i * n + i] += t;
    }
    let log_det = linalg::log_det(&psi, n);
    let trace = (0..n).map(|i| psi[i * n + i]).sum();
    Ok(DeformedMatrix { n, psi, log_det, trace })
}

/// Membership in the integration domain: `psi` is non-singular and
/// `|det psi| > tol`.
pub fn in_theta_tilde(d: &DeformedMatrix, tol: f64) -> bool {
    d.log_det.sign != 0 && d.log_det.log_abs > tol.ln()
}

/// `ln sqrt(g_ii)` of the bare metric for one coordinate.
#[inline]
pub(crate) fn bare_log_sqrt_term(theta: f64) -> f64 {
    -0.5 * LN_2 - theta.ln()
}

pub fn bare_metric(theta: &ParameterPoint) -> MetricEvaluation {
    let n = theta.dim();
    let mut g = vec![0.0; n * n];
    let mut log_sqrt = 0.0;
    for (i, &t) in theta.as_slice().iter().enumerate() {
        let inv = 1.0 / t;
        g[i * n + i] = 0.5 * inv * inv;
        log_sqrt += bare_log_sqrt_term(t);
    }
    MetricEvaluation { n, g, log_sqrt_abs_det: log_sqrt, sign_det: 1 }
}

/// The deformed metric at `theta`, using [`DEFAULT_DEGENERACY_TOL`].
pub fn deformed_metric(theta: &ParameterPoint, a: &AdjacencyMatrix) -> Result<MetricEvaluation> {
    deformed_metric_of(&psi_map(theta, a)?, DEFAULT_DEGENERACY_TOL)
}

/// The deformed metric of an already-formed `psi`.
pub fn deformed_metric_of(d: &DeformedMatrix, tol: f64) -> Result<MetricEvaluation> {
    if !in_theta_tilde(d, tol) {
        return Err(Error::Degenerate { log_abs_det: d.log_det.log_abs });
    }
    let n = d.n;
    let mut lu = d.psi.clone();
    let mut perm = vec![0; n];
    if linalg::lu_in_place(&mut lu, n, &mut perm).is_singular() {
        return Err(Error::Degenerate { log_abs_det: f64::NEG_INFINITY });
    }
    let mut inv = vec![0.0; n * n];
    linalg::lu_inverse(&lu, &perm, n, &mut inv);
    let mut g: Vec<f64> = inv.iter().map(|&v| 0.5 * v * v).collect();
    // Entrywise squares are symmetric only up to rounding of the inverse.
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (g[i * n + j] + g[j * n + i]);
            g[i * n + j] = m;
            g[j * n + i] = m;
        }
    }
    let ld = linalg::log_det(&g, n);
    Ok(MetricEvaluation { n, g, log_sqrt_abs_det: 0.5 * ld.log_abs, sign_det: ld.sign })
}

/// `ln ln(1 + e^x)`, stable over the whole real line.
pub(crate) fn log_softplus(x: f64) -> f64 {
    if x < -30.0 {
        // ln(1 + e^x) = e^x (1 - e^x/2 + ...)
        x + (-0.5 * x.exp()).ln_1p()
    } else if x > 30.0 {
        (x + (-x).exp().ln_1p()).ln()
    } else {
        x.exp().ln_1p().ln()
    }
}

/// `ln Upsilon` from a trace and a log-determinant; `-inf` for a singular
/// matrix.
pub(crate) fn log_upsilon_parts(trace: f64, log_det: LogDet, n: usize) -> f64 {
    if log_det.sign == 0 {
        return f64::NEG_INFINITY;
    }
    -trace + log_softplus(n as f64 * log_det.log_abs)
}

/// The regularizer `Upsilon(psi) = exp(-Tr psi) ln(1 + |det psi|^n)` in log
/// form. The determinant enters through its absolute value.
pub fn log_upsilon(d: &DeformedMatrix, n: usize) -> f64 {
    log_upsilon_parts(d.trace, d.log_det, n)
}

pub fn upsilon(d: &DeformedMatrix, n: usize) -> f64 {
    log_upsilon(d, n).exp()
}

/// Fisher information of the zero-mean Gaussian family with covariance
/// `diag(theta)` along the coordinate directions `dc`:
/// `g_uv = Tr(C^{-1} dC_u C^{-1} dC_v) / 2`.
pub fn fisher_metric_gaussian(theta: &ParameterPoint, dc: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = theta.dim();
    let mut c = vec![0.0; n * n];
    for (i, &t) in theta.as_slice().iter().enumerate() {
        c[i * n + i] = t;
    }
    fisher_metric_gaussian_cov(&c, n, dc)
}

/// As [`fisher_metric_gaussian`] for an arbitrary covariance matrix `c`.
pub fn fisher_metric_gaussian_cov(c: &[f64], n: usize, dc: &[Vec<f64>]) -> Result<Vec<f64>> {
    if c.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: c.len() });
    }
    if let Some(bad) = dc.iter().find(|d| d.len() != n * n) {
        return Err(Error::DimensionMismatch { expected: n * n, found: bad.len() });
    }
    let mut l = c.to_vec();
    linalg::cholesky_in_place(&mut l, n).ok_or(Error::NotPositiveDefinite)?;
    let mut inv = vec![0.0; n * n];
    let mut scratch = vec![0.0; n * n];
    linalg::cholesky_inverse(&l, n, &mut scratch, &mut inv);
    // M_u = C^{-1} dC_u
    let products: Vec<Vec<f64>> = dc.iter().map(|d| matmul(&inv, d, n)).collect();
    let p = dc.len();
    let mut g = vec![0.0; p * p];
    for u in 0..p {
        for v in 0..=u {
            // Tr(M_u M_v) = sum_ij (M_u)_ij (M_v)_ji
            let mut tr = 0.0;
            for i in 0..n {
                for j in 0..n {
                    tr += products[u][i * n + j] * products[v][j * n + i];
                }
            }
            g[u * p + v] = 0.5 * tr;
            g[v * p + u] = 0.5 * tr;
        }
    }
    Ok(g)
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    out[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    out
}

/// Unit direction in the `i`-th diagonal slot, the coordinate basis of the
/// bare family.
pub fn diagonal_direction(n: usize, i: usize) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    d[i * n + i] = 1.0;
    d
}

/// Result of evaluating one block of a block-diagonal `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BlockEval {
    pub log_det_psi: LogDet,
    pub trace: f64,
    /// `ln sqrt|det g~|` of the block, `-inf` if that determinant vanished.
    pub log_sqrt_det_g: f64,
}

/// Reusable buffers for evaluating `ln sqrt|det g~|` of a dense block.
///
/// Positive definite `psi` goes through Cholesky; its inverse is then
/// positive definite and so is the entrywise square (Schur product
/// theorem), so `g~` is factored by Cholesky too. Anything else falls back
/// to pivoted LU.
#[derive(Debug, Default)]
pub(crate) struct MetricKernel {
    work: Vec<f64>,
    inv: Vec<f64>,
    scratch: Vec<f64>,
    perm: Vec<usize>,
}

impl MetricKernel {
    pub fn new() -> Self {
        Self::default()
    }

    fn reserve(&mut self, c: usize) {
        let sq = c * c;
        if self.work.len() < sq {
            self.work.resize(sq, 0.0);
            self.inv.resize(sq, 0.0);
            self.scratch.resize(sq, 0.0);
            self.perm.resize(c, 0);
        }
    }

    /// Evaluate a `c x c` block given row-major in `psi`. `psi` is used as
    /// scratch and destroyed.
    pub fn eval_block(&mut self, psi: &mut [f64], c: usize) -> BlockEval {
        match c {
            1 => {
                let t = psi[0];
                let log_det_psi = if t == 0.0 {
                    LogDet::SINGULAR
                } else {
                    LogDet { log_abs: t.abs().ln(), sign: if t > 0.0 { 1 } else { -1 } }
                };
                BlockEval {
                    log_det_psi,
                    trace: t,
                    log_sqrt_det_g: if t > 0.0 { bare_log_sqrt_term(t) } else { -0.5 * LN_2 - t.abs().ln() },
                }
            }
            2 => eval_2x2(psi[0], psi[1], psi[3]),
            _ => self.eval_dense(psi, c),
        }
    }

    fn eval_dense(&mut self, psi: &mut [f64], c: usize) -> BlockEval {
        self.reserve(c);
        let sq = c * c;
        let trace = (0..c).map(|i| psi[i * c + i]).sum();
        let work = &mut self.work[..sq];
        work.copy_from_slice(&psi[..sq]);
        if let Some(half) = linalg::cholesky_in_place(work, c) {
            let log_det_psi = LogDet { log_abs: 2.0 * half, sign: 1 };
            linalg::cholesky_inverse(work, c, &mut self.scratch, &mut self.inv);
            let g = &mut self.work[..sq];
            for (gv, &v) in g.iter_mut().zip(&self.inv[..sq]) {
                *gv = 0.5 * v * v;
            }
            if let Some(half_g) = linalg::cholesky_in_place(g, c) {
                return BlockEval { log_det_psi, trace, log_sqrt_det_g: half_g };
            }
            // Rounding broke definiteness of g~; rebuild and use LU.
            for (gv, &v) in g.iter_mut().zip(&self.inv[..sq]) {
                *gv = 0.5 * v * v;
            }
            let ld = linalg::lu_in_place(g, c, &mut self.perm);
            return BlockEval { log_det_psi, trace, log_sqrt_det_g: 0.5 * ld.log_abs };
        }
        let log_det_psi = linalg::lu_in_place(psi, c, &mut self.perm);
        if log_det_psi.is_singular() {
            return BlockEval { log_det_psi, trace, log_sqrt_det_g: f64::INFINITY };
        }
        linalg::lu_inverse(psi, &self.perm, c, &mut self.inv);
        let g = &mut self.work[..sq];
        for (gv, &v) in g.iter_mut().zip(&self.inv[..sq]) {
            *gv = 0.5 * v * v;
        }
        let ld = linalg::lu_in_place(g, c, &mut self.perm);
        BlockEval { log_det_psi, trace, log_sqrt_det_g: 0.5 * ld.log_abs }
    }
}

/// Closed form for `psi = [[a, b], [b, d]]`:
/// `det g~ = (ad + b^2) / (4 (ad - b^2)^3)`.
fn eval_2x2(a: f64, b: f64, d: f64) -> BlockEval {
    let det = a * d - b * b;
    let trace = a + d;
    if det == 0.0 {
        return BlockEval { log_det_psi: LogDet::SINGULAR, trace, log_sqrt_det_g: f64::INFINITY };
    }
    let log_abs = det.abs().ln();
    let log_det_psi = LogDet { log_abs, sign: if det > 0.0 { 1 } else { -1 } };
    let plus = a * d + b * b;
    let log_sqrt_det_g = if plus == 0.0 {
        f64::NEG_INFINITY
    } else {
        0.5 * (plus.abs().ln() - 2.0 * LN_2 - 3.0 * log_abs)
    };
    BlockEval { log_det_psi, trace, log_sqrt_det_g }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn point(v: &[f64]) -> ParameterPoint {
        ParameterPoint::new(v.to_vec()).unwrap()
    }

    fn offdiag(n: usize, w: f64) -> AdjacencyMatrix {
        let mut data = vec![w; n * n];
        for i in 0..n {
            data[i * n + i] = 0.0;
        }
        AdjacencyMatrix::from_row_major(n, data).unwrap()
    }

    #[test]
    fn psi_two_by_two() {
        let d = psi_map(&point(&[1.0, 2.0]), &offdiag(2, 0.2)).unwrap();
        assert_eq!(d.psi(), &[1.0, 0.2, 0.2, 2.0]);
        assert_relative_eq!(d.log_abs_det(), 1.96f64.ln(), max_relative = 1e-14);
        assert_eq!(d.sign_det(), 1);
    }

    #[test]
    fn psi_of_zero_adjacency() {
        let theta = [0.3, 4.0, 1.7];
        let d = psi_map(&point(&theta), &AdjacencyMatrix::zeros(3)).unwrap();
        let want: f64 = theta.iter().map(|t| t.ln()).sum();
        assert_relative_eq!(d.log_abs_det(), want, max_relative = 1e-14);
    }

    #[test]
    fn psi_singular() {
        let d = psi_map(&point(&[1.0, 1.0]), &offdiag(2, 1.0)).unwrap();
        assert_eq!(d.sign_det(), 0);
        assert_eq!(d.log_abs_det(), f64::NEG_INFINITY);
        assert!(!in_theta_tilde(&d, 1e-12));
        assert!(matches!(deformed_metric_of(&d, 1e-12), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn psi_dimension_mismatch() {
        assert!(matches!(
            psi_map(&point(&[1.0, 1.0]), &AdjacencyMatrix::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn theta_tilde_membership() {
        let z = AdjacencyMatrix::zeros(2);
        assert!(in_theta_tilde(&psi_map(&point(&[1.0, 2.0]), &z).unwrap(), 1e-12));
        let tiny = psi_map(&point(&[1e-20, 1.0]), &z).unwrap();
        assert_relative_eq!(tiny.log_abs_det(), -20.0 * 10f64.ln(), max_relative = 1e-14);
        assert!(!in_theta_tilde(&tiny, 1e-12));
    }

    #[test]
    fn bare_metric_examples() {
        let g = bare_metric(&point(&[1.0, 1.0]));
        assert_eq!(g.components(), &[0.5, 0.0, 0.0, 0.5]);
        assert_relative_eq!(g.log_sqrt_abs_det(), -LN_2, max_relative = 1e-15);

        let g = bare_metric(&point(&[2.0]));
        assert_eq!(g.components(), &[0.125]);
        assert_relative_eq!(g.log_sqrt_abs_det(), (1.0 / (2.0 * 2f64.sqrt())).ln(), max_relative = 1e-15);

        let g = bare_metric(&point(&[1.0, 2.0, 4.0]));
        assert_relative_eq!(g.log_sqrt_abs_det(), -1.5 * LN_2 - 8f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn deformed_metric_two_by_two_oracle() {
        // psi^{-1} = [[2, -0.2], [-0.2, 1]] / 1.96
        let g = deformed_metric(&point(&[1.0, 2.0]), &offdiag(2, 0.2)).unwrap();
        let inv = [2.0 / 1.96, -0.2 / 1.96, 1.0 / 1.96];
        let want = [0.5 * inv[0] * inv[0], 0.5 * inv[1] * inv[1], 0.5 * inv[2] * inv[2]];
        assert_relative_eq!(g.get(0, 0), want[0], max_relative = 1e-13);
        assert_relative_eq!(g.get(0, 1), want[1], max_relative = 1e-13);
        assert_relative_eq!(g.get(1, 0), want[1], max_relative = 1e-13);
        assert_relative_eq!(g.get(1, 1), want[2], max_relative = 1e-13);
        assert_relative_eq!(g.get(0, 0), 0.520616, epsilon = 1e-6);
        assert_relative_eq!(g.get(0, 1), 0.005206, epsilon = 1e-6);
        assert_relative_eq!(g.get(1, 1), 0.130154, epsilon = 1e-6);
        let det = want[0] * want[2] - want[1] * want[1];
        assert_relative_eq!(g.log_sqrt_abs_det().exp(), det.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(g.log_sqrt_abs_det().exp(), 0.260257, epsilon = 1e-6);
    }

    #[test]
    fn deformed_equals_bare_at_zero_adjacency() {
        let theta = point(&[1.0, 1.0]);
        let g = deformed_metric(&theta, &AdjacencyMatrix::zeros(2)).unwrap();
        assert_eq!(g.components(), bare_metric(&theta).components());
    }

    #[test]
    fn upsilon_examples() {
        let id = psi_map(&point(&[1.0, 1.0]), &AdjacencyMatrix::zeros(2)).unwrap();
        assert_relative_eq!(upsilon(&id, 2), (-2f64).exp() * LN_2, max_relative = 1e-14);
        assert_relative_eq!(upsilon(&id, 2), 0.093808, epsilon = 1e-6);

        let singular = psi_map(&point(&[1.0, 1.0]), &offdiag(2, 1.0)).unwrap();
        assert_eq!(upsilon(&singular, 2), 0.0);

        let mut last = f64::INFINITY;
        for t in [1.0, 10.0, 100.0, 1000.0] {
            let d = psi_map(&point(&[t, t]), &AdjacencyMatrix::zeros(2)).unwrap();
            let u = upsilon(&d, 2);
            assert!(u < last && u.is_finite());
            last = u;
        }
        assert_eq!(last, 0.0);
    }

    #[test]
    fn log_upsilon_survives_huge_determinants() {
        let d = psi_map(&point(&[1e200, 1e200]), &AdjacencyMatrix::zeros(2)).unwrap();
        let lu = log_upsilon(&d, 2);
        assert!(lu.is_finite());
        assert_relative_eq!(lu, -2e200 + (2.0 * d.log_abs_det()).ln(), max_relative = 1e-12);
        // Tiny determinant: ln(1 + x) ~ x.
        let d = psi_map(&point(&[1e-100, 1e-100]), &AdjacencyMatrix::zeros(2)).unwrap();
        assert_relative_eq!(log_upsilon(&d, 2), 2.0 * d.log_abs_det() - 2e-100, max_relative = 1e-12);
    }

    #[test]
    fn log_softplus_is_continuous() {
        for x in [-30.0f64, 30.0] {
            let a = log_softplus(x - 1e-9);
            let b = log_softplus(x + 1e-9);
            assert!((a - b).abs() < 1e-7, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn fisher_examples() {
        let g = fisher_metric_gaussian(&point(&[1.0]), &[vec![1.0]]).unwrap();
        assert_relative_eq!(g[0], 0.5, max_relative = 1e-15);
        let dirs = [diagonal_direction(2, 0), diagonal_direction(2, 1)];
        let g = fisher_metric_gaussian(&point(&[2.0, 3.0]), &dirs).unwrap();
        assert_relative_eq!(g[0], 1.0 / 8.0, max_relative = 1e-15);
        assert_relative_eq!(g[3], 1.0 / 18.0, max_relative = 1e-15);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn fisher_rejects_indefinite_covariance() {
        let c = [1.0, 2.0, 2.0, 1.0];
        assert!(matches!(
            fisher_metric_gaussian_cov(&c, 2, &[diagonal_direction(2, 0)]),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn kernel_two_by_two_matches_dense_route() {
        let mut k = MetricKernel::new();
        for (a, b, d) in [(1.0, 0.2, 2.0), (0.1, 0.2, 0.3), (3.0, -1.0, 0.5), (0.1, 0.2, 0.1)] {
            let closed = eval_2x2(a, b, d);
            let mut m = [a, b, b, d];
            let e = psi_map(&point(&[a, d]), &offdiag(2, b)).unwrap();
            assert_eq!(closed.log_det_psi.sign, e.sign_det());
            assert_relative_eq!(closed.log_det_psi.log_abs, e.log_abs_det(), max_relative = 1e-12);
            let g = deformed_metric_of(&e, 1e-12).unwrap();
            assert_relative_eq!(closed.log_sqrt_det_g, g.log_sqrt_abs_det(), max_relative = 1e-10);
            let dense = k.eval_dense(&mut m, 2);
            assert_relative_eq!(dense.log_sqrt_det_g, g.log_sqrt_abs_det(), max_relative = 1e-10);
        }
    }
}
