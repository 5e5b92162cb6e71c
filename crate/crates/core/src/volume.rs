//! Monte Carlo volumes of the deformed manifold.
//!
//! The improper volume integral is regularized either by restricting it to
//! a hypercube and dropping sample points whose volume density exceeds a
//! cap (`Regularizer::Hypercube`), or by weighting the density with
//! `Upsilon(psi)` (`Regularizer::Upsilon`). All integrand arithmetic is in
//! log space and the sample mean is a log-sum-exp, so no intermediate value
//! can overflow.
//!
//! Samples are drawn in fixed-size blocks; block `b` draws from the stream
//! `key.child(b)`. Per-sample values are collected in block order and
//! reduced sequentially, so an estimate depends only on its inputs and key,
//! never on the thread count.

use std::f64::consts::{LN_10, LN_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, MetricKernel, DEFAULT_DEGENERACY_TOL};
use crate::graph::{AdjacencyMatrix, Graph, WeightModel};
use crate::linalg::LogDet;
use crate::rng::StreamKey;

/// Samples per stream block.
pub const BLOCK_SIZE: usize = 1024;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 100;

/// Default cap on `log10 sqrt|det g~|`.
pub const DEFAULT_LOG10_CAP: f64 = 308.0;

/// The hypercube `[theta_min, theta_max]^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterBox {
    theta_min: f64,
    theta_max: f64,
    n: usize,
}

impl ParameterBox {
    pub fn new(theta_min: f64, theta_max: f64, n: usize) -> Result<Self> {
        let ok = theta_min.is_finite() && theta_max.is_finite() && 0.0 < theta_min && theta_min < theta_max;
        if !ok {
            return Err(Error::InvalidBox { theta_min, theta_max });
        }
        if n == 0 {
            return Err(Error::InvalidArgument("box dimension must be positive".into()));
        }
        Ok(Self { theta_min, theta_max, n })
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn with_dim(&self, n: usize) -> Result<Self> {
        Self::new(self.theta_min, self.theta_max, n)
    }

    /// `ln` of the Lebesgue volume of the box.
    pub fn log_volume(&self) -> f64 {
        self.n as f64 * (self.theta_max - self.theta_min).ln()
    }

    fn fill<R: Rng + ?Sized>(&self, rng: &mut R, theta: &mut [f64]) {
        let width = self.theta_max - self.theta_min;
        for t in theta.iter_mut() {
            let u: f64 = rng.random();
            *t = (self.theta_min + width * u).min(self.theta_max);
        }
    }
}

/// Closed-form `ln` of the bare volume over the box:
/// `n ln ln(theta_max/theta_min) - (n/2) ln 2`.
pub fn baseline_log_volume(b: &ParameterBox) -> f64 {
    let n = b.n as f64;
    n * (b.theta_max / b.theta_min).ln().ln() - 0.5 * n * LN_2
}

/// How the improper volume integral is made finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularizer {
    /// Hypercube support plus the density cap.
    #[default]
    Hypercube,
    /// Hypercube support with the density weighted by `Upsilon(psi)`.
    Upsilon,
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hypercube => "hypercube",
            Self::Upsilon => "upsilon",
        })
    }
}

impl FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypercube" => Ok(Self::Hypercube),
            "upsilon" => Ok(Self::Upsilon),
            _ => Err(Error::InvalidArgument(format!("unknown regularizer `{s}`"))),
        }
    }
}

/// What the deformed volume is divided by in the normalized entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Monte Carlo estimate of the bare volume on the same sample points.
    #[default]
    SharedStream,
    /// [`baseline_log_volume`]. Only meaningful for the hypercube scheme.
    Analytic,
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SharedStream => "shared-stream",
            Self::Analytic => "analytic",
        })
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared-stream" => Ok(Self::SharedStream),
            "analytic" => Ok(Self::Analytic),
            _ => Err(Error::InvalidArgument(format!("unknown baseline `{s}`"))),
        }
    }
}

/// Estimator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub n_samples: usize,
    pub log10_cap: f64,
    pub degeneracy_tol: f64,
    pub regularizer: Regularizer,
    pub baseline: Baseline,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            log10_cap: DEFAULT_LOG10_CAP,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            regularizer: Regularizer::Hypercube,
            baseline: Baseline::SharedStream,
        }
    }
}

impl EstimatorOptions {
    pub fn with_samples(n_samples: usize) -> Self {
        Self { n_samples, ..Self::default() }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                self.n_samples
            )));
        }
        if self.log10_cap.is_nan() {
            return Err(Error::InvalidArgument("log10 cap is NaN".into()));
        }
        if !(self.degeneracy_tol > 0.0) {
            return Err(Error::InvalidArgument("degeneracy tolerance must be > 0".into()));
        }
        Ok(())
    }
}

/// A Monte Carlo volume estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    /// `ln` of the estimated integral.
    pub log_integral: f64,
    /// Delta-method standard error of `log_integral`.
    pub log_mean_stderr: f64,
    pub n_samples: usize,
    pub n_excluded_overflow: usize,
    pub n_excluded_degenerate: usize,
}

impl VolumeEstimate {
    pub fn excluded_fraction(&self) -> f64 {
        (self.n_excluded_overflow + self.n_excluded_degenerate) as f64 / self.n_samples as f64
    }

    pub fn retained(&self) -> usize {
        self.n_samples - self.n_excluded_overflow - self.n_excluded_degenerate
    }
}

/// One realization of the normalized entropy at edge count `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySample {
    pub k: usize,
    /// `(1/n) ln(V_deformed / V_bare)`.
    pub s_tilde: f64,
    /// Delta-method standard error of `s_tilde` for this realization.
    pub stderr: f64,
    pub numerator: VolumeEstimate,
    /// `ln` of the bare volume used as the denominator.
    pub log_baseline: f64,
}

/// Mean and standard error over realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyAggregate {
    pub mean: f64,
    /// Zero when the variance is undefined (a single sample).
    pub stderr: f64,
    pub count: usize,
    pub variance_defined: bool,
}

// One block of a block-diagonal psi: a connected component of the graph.
#[derive(Debug, Clone)]
struct Component {
    vertices: Vec<usize>,
    // Local (a, b, coefficient), a < b.
    edges: Vec<(usize, usize, f64)>,
}

/// The volume density of one weighted graph as a function of `theta`.
///
/// `psi` is block diagonal over connected components, and so are its
/// inverse and `g~`; determinants are products over blocks. Isolated
/// vertices reduce to the bare one-dimensional density.
#[derive(Debug, Clone)]
pub struct Integrand {
    n: usize,
    components: Vec<Component>,
    theta_coupled: bool,
}

impl Integrand {
    /// The bare (edgeless) network on `n` vertices.
    pub fn bare(n: usize) -> Self {
        Self::from_graph(&Graph::empty(n), &WeightModel::Constant { r: 1.0 }).expect("empty graph is valid")
    }

    pub fn from_graph(g: &Graph, w: &WeightModel) -> Result<Self> {
        w.check_dimension(g.n())?;
        let comps = g.components();
        let mut local = vec![0usize; g.n()];
        let mut owner = vec![0usize; g.n()];
        for (ci, c) in comps.iter().enumerate() {
            for (li, &v) in c.iter().enumerate() {
                local[v] = li;
                owner[v] = ci;
            }
        }
        let mut components: Vec<Component> =
            comps.into_iter().map(|vertices| Component { vertices, edges: Vec::new() }).collect();
        for &(i, j) in g.edges() {
            components[owner[i]].edges.push((local[i], local[j], w.coefficient(i, j)));
        }
        Ok(Self { n: g.n(), components, theta_coupled: w.depends_on_theta() })
    }

    /// Like [`Integrand::from_graph`], with per-edge overrides aligned with
    /// `g.edges()`. Under a constant model an override is the edge weight
    /// itself; under a theta-coupled model it replaces the coefficient `r_ij`.
    pub fn from_graph_with_overrides(g: &Graph, w: &WeightModel, overrides: &[Option<f64>]) -> Result<Self> {
        if overrides.len() != g.edge_count() {
            return Err(Error::DimensionMismatch { expected: g.edge_count(), found: overrides.len() });
        }
        let mut it = Self::from_graph(g, w)?;
        let mut lookup = std::collections::HashMap::new();
        for (&(i, j), o) in g.edges().iter().zip(overrides) {
            if let Some(v) = *o {
                if !v.is_finite() || (w.depends_on_theta() && v < 0.0) {
                    return Err(Error::InvalidWeightModel(format!("bad weight {v} on edge ({i}, {j})")));
                }
                lookup.insert((i, j), v);
            }
        }
        for c in &mut it.components {
            for e in &mut c.edges {
                let (a, b) = (c.vertices[e.0], c.vertices[e.1]);
                if let Some(&v) = lookup.get(&(a.min(b), a.max(b))) {
                    e.2 = v;
                }
            }
        }
        Ok(it)
    }

    pub fn from_adjacency(a: &AdjacencyMatrix) -> Result<Self> {
        let g = Graph::new(a.n(), a.support())?;
        let mut it = Self::from_graph(&g, &WeightModel::Constant { r: 1.0 })?;
        for c in &mut it.components {
            for e in &mut c.edges {
                e.2 = a.get(c.vertices[e.0], c.vertices[e.1]);
            }
        }
        Ok(it)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.components.iter().map(|c| c.edges.len()).sum()
    }

    pub fn largest_block(&self) -> usize {
        self.components.iter().map(|c| c.vertices.len()).max().unwrap_or(0)
    }

    fn evaluate(&self, theta: &[f64], kernel: &mut MetricKernel, block: &mut Vec<f64>) -> PointEval {
        let mut log_abs = 0.0;
        let mut sign: i8 = 1;
        let mut trace = 0.0;
        let mut log_sqrt_g = 0.0;
        for c in &self.components {
            if c.vertices.len() == 1 {
                let t = theta[c.vertices[0]];
                log_abs += t.ln();
                trace += t;
                log_sqrt_g += geometry::bare_log_sqrt_term(t);
                continue;
            }
            let m = c.vertices.len();
            block.clear();
            block.resize(m * m, 0.0);
            for (li, &v) in c.vertices.iter().enumerate() {
                block[li * m + li] = theta[v];
            }
            for &(a, b, r) in &c.edges {
                let w = if self.theta_coupled { r * theta[c.vertices[a]] * theta[c.vertices[b]] } else { r };
                block[a * m + b] = w;
                block[b * m + a] = w;
            }
            let e = kernel.eval_block(block, m);
            if e.log_det_psi.is_singular() {
                return PointEval { log_det: LogDet::SINGULAR, trace: f64::NAN, log_sqrt_g: f64::NAN };
            }
            log_abs += e.log_det_psi.log_abs;
            sign *= e.log_det_psi.sign;
            trace += e.trace;
            log_sqrt_g += e.log_sqrt_det_g;
        }
        PointEval { log_det: LogDet { log_abs, sign }, trace, log_sqrt_g }
    }
}

struct PointEval {
    log_det: LogDet,
    trace: f64,
    log_sqrt_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Value(f64),
    Overflow,
    Degenerate,
}

impl Outcome {
    fn log_value(self) -> f64 {
        match self {
            Self::Value(v) => v,
            _ => f64::NEG_INFINITY,
        }
    }
}

fn classify(e: &PointEval, n: usize, opts: &EstimatorOptions) -> Outcome {
    if e.log_det.sign == 0 || !(e.log_det.log_abs > opts.degeneracy_tol.ln()) {
        return Outcome::Degenerate;
    }
    match opts.regularizer {
        Regularizer::Hypercube => {
            if !(e.log_sqrt_g / LN_10 <= opts.log10_cap) {
                Outcome::Overflow
            } else {
                Outcome::Value(e.log_sqrt_g)
            }
        }
        Regularizer::Upsilon => {
            let v = geometry::log_upsilon_parts(e.trace, e.log_det, n) + e.log_sqrt_g;
            if v.is_nan() || v == f64::INFINITY {
                Outcome::Overflow
            } else {
                Outcome::Value(v)
            }
        }
    }
}

/// Evaluate several integrands on the same sample points.
fn sample_outcomes(
    integrands: &[&Integrand],
    b: &ParameterBox,
    opts: &EstimatorOptions,
    key: StreamKey,
) -> Vec<Vec<Outcome>> {
    let n = b.n;
    let n_blocks = opts.n_samples.div_ceil(BLOCK_SIZE);
    let run_block = |blk: usize| -> Vec<Vec<Outcome>> {
        let mut rng = key.child(blk as u64).rng();
        let count = BLOCK_SIZE.min(opts.n_samples - blk * BLOCK_SIZE);
        let mut theta = vec![0.0; n];
        let mut kernel = MetricKernel::new();
        let mut buf = Vec::new();
        let mut out: Vec<Vec<Outcome>> = integrands.iter().map(|_| Vec::with_capacity(count)).collect();
        for _ in 0..count {
            b.fill(&mut rng, &mut theta);
            for (slot, it) in out.iter_mut().zip(integrands) {
                let e = it.evaluate(&theta, &mut kernel, &mut buf);
                slot.push(classify(&e, n, opts));
            }
        }
        out
    };
    #[cfg(feature = "parallel")]
    let blocks: Vec<Vec<Vec<Outcome>>> = {
        use rayon::prelude::*;
        (0..n_blocks).into_par_iter().map(run_block).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<Vec<Vec<Outcome>>> = (0..n_blocks).map(run_block).collect();

    let mut merged: Vec<Vec<Outcome>> = integrands.iter().map(|_| Vec::with_capacity(opts.n_samples)).collect();
    for blk in blocks {
        for (m, part) in merged.iter_mut().zip(blk) {
            m.extend(part);
        }
    }
    merged
}

// Sums of exp(l - max) and exp(2(l - max)) over a sample of log values.
#[derive(Debug, Clone, Copy)]
struct LogMoments {
    count: usize,
    max: f64,
    s1: f64,
    s2: f64,
}

impl LogMoments {
    fn of(values: &[f64]) -> Self {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut s1, mut s2) = (0.0, 0.0);
        if max.is_finite() {
            for &l in values {
                let w = (l - max).exp();
                s1 += w;
                s2 += w * w;
            }
        }
        Self { count: values.len(), max, s1, s2 }
    }

    /// `ln` of the sample mean of `exp(l)`.
    fn log_mean(&self) -> f64 {
        if self.s1 == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.max + self.s1.ln() - (self.count as f64).ln()
    }

    fn scaled_mean(&self) -> f64 {
        self.s1 / self.count as f64
    }

    fn scaled_var(&self) -> f64 {
        let nf = self.count as f64;
        let m = self.scaled_mean();
        ((self.s2 / nf - m * m) * nf / (nf - 1.0)).max(0.0)
    }

    /// Standard error of `log_mean` by the delta method.
    fn log_stderr(&self) -> f64 {
        if self.s1 == 0.0 {
            return f64::INFINITY;
        }
        (self.scaled_var() / self.count as f64).sqrt() / self.scaled_mean()
    }
}

/// Standard error of `ln mean(a) - ln mean(b)` for paired samples.
fn log_ratio_stderr(la: &[f64], a: &LogMoments, lb: &[f64], b: &LogMoments) -> f64 {
    let nf = la.len() as f64;
    let (ma, mb) = (a.scaled_mean(), b.scaled_mean());
    let mut cross = 0.0;
    for (&x, &y) in la.iter().zip(lb) {
        if x.is_finite() && y.is_finite() {
            cross += (x - a.max).exp() * (y - b.max).exp();
        }
    }
    let cov = (cross / nf - ma * mb) * nf / (nf - 1.0);
    let var = a.scaled_var() / (ma * ma) + b.scaled_var() / (mb * mb) - 2.0 * cov / (ma * mb);
    (var.max(0.0) / nf).sqrt()
}

fn summarize(outcomes: &[Outcome], b: &ParameterBox) -> (VolumeEstimate, Vec<f64>, LogMoments) {
    let logs: Vec<f64> = outcomes.iter().map(|o| o.log_value()).collect();
    let mom = LogMoments::of(&logs);
    let n_excluded_overflow = outcomes.iter().filter(|o| matches!(o, Outcome::Overflow)).count();
    let n_excluded_degenerate = outcomes.iter().filter(|o| matches!(o, Outcome::Degenerate)).count();
    let est = VolumeEstimate {
        log_integral: b.log_volume() + mom.log_mean(),
        log_mean_stderr: mom.log_stderr(),
        n_samples: outcomes.len(),
        n_excluded_overflow,
        n_excluded_degenerate,
    };
    (est, logs, mom)
}

fn check_inputs(it: &Integrand, b: &ParameterBox, opts: &EstimatorOptions) -> Result<()> {
    opts.validate()?;
    if it.n != b.n {
        return Err(Error::DimensionMismatch { expected: b.n, found: it.n });
    }
    Ok(())
}

fn finish(est: VolumeEstimate) -> Result<VolumeEstimate> {
    if est.log_integral == f64::NEG_INFINITY && est.retained() == 0 {
        Err(Error::EstimationFailed(est))
    } else {
        Ok(est)
    }
}

/// Estimate `ln` of the regularized volume of `integrand` over `b`.
pub fn estimate_log_volume(
    integrand: &Integrand,
    b: &ParameterBox,
    opts: &EstimatorOptions,
    key: StreamKey,
) -> Result<VolumeEstimate> {
    check_inputs(integrand, b, opts)?;
    let outcomes = sample_outcomes(&[integrand], b, opts, key);
    finish(summarize(&outcomes[0], b).0)
}

/// Hypercube-regularized volume estimate for a fixed adjacency matrix.
pub fn mc_log_volume(
    a: &AdjacencyMatrix,
    b: &ParameterBox,
    n_samples: usize,
    log10_cap: f64,
    key: StreamKey,
) -> Result<VolumeEstimate> {
    let opts = EstimatorOptions { n_samples, log10_cap, ..EstimatorOptions::default() };
    estimate_log_volume(&Integrand::from_adjacency(a)?, b, &opts, key)
}

/// Hypercube-regularized volume estimate for a graph under a weight model,
/// materializing theta-dependent weights at every sample point.
pub fn mc_log_volume_graph(
    g: &Graph,
    w: &WeightModel,
    b: &ParameterBox,
    n_samples: usize,
    log10_cap: f64,
    key: StreamKey,
) -> Result<VolumeEstimate> {
    let opts = EstimatorOptions { n_samples, log10_cap, ..EstimatorOptions::default() };
    estimate_log_volume(&Integrand::from_graph(g, w)?, b, &opts, key)
}

/// `Upsilon`-regularized volume estimate for a fixed adjacency matrix.
pub fn upsilon_log_volume(
    a: &AdjacencyMatrix,
    b: &ParameterBox,
    n_samples: usize,
    key: StreamKey,
) -> Result<VolumeEstimate> {
    let opts = EstimatorOptions { n_samples, regularizer: Regularizer::Upsilon, ..EstimatorOptions::default() };
    estimate_log_volume(&Integrand::from_adjacency(a)?, b, &opts, key)
}

/// One realization of the normalized entropy `(1/n) ln(V(A) / V(0))`.
///
/// With [`Baseline::SharedStream`] the bare volume is estimated on the very
/// same sample points as the deformed one, so an edgeless graph yields
/// exactly zero.
pub fn normalized_entropy_sample(
    g: &Graph,
    w: &WeightModel,
    b: &ParameterBox,
    opts: &EstimatorOptions,
    key: StreamKey,
) -> Result<EntropySample> {
    normalized_entropy_of(&Integrand::from_graph(g, w)?, b, opts, key)
}

/// [`normalized_entropy_sample`] for a prepared integrand, for instance one
/// built from an explicit adjacency matrix.
pub fn normalized_entropy_of(
    deformed: &Integrand,
    b: &ParameterBox,
    opts: &EstimatorOptions,
    key: StreamKey,
) -> Result<EntropySample> {
    check_inputs(deformed, b, opts)?;
    let nf = b.n as f64;
    let k = deformed.edge_count();
    match opts.baseline {
        Baseline::SharedStream => {
            let bare = Integrand::bare(b.n);
            let outcomes = sample_outcomes(&[deformed, &bare], b, opts, key);
            let (num, la, ma) = summarize(&outcomes[0], b);
            let (den, lb, mb) = summarize(&outcomes[1], b);
            let num = finish(num)?;
            let den = finish(den)?;
            let stderr = log_ratio_stderr(&la, &ma, &lb, &mb) / nf;
            Ok(EntropySample {
                k,
                s_tilde: (num.log_integral - den.log_integral) / nf,
                stderr,
                numerator: num,
                log_baseline: den.log_integral,
            })
        }
        Baseline::Analytic => {
            let outcomes = sample_outcomes(&[deformed], b, opts, key);
            let num = finish(summarize(&outcomes[0], b).0)?;
            let base = baseline_log_volume(b);
            Ok(EntropySample {
                k,
                s_tilde: (num.log_integral - base) / nf,
                stderr: num.log_mean_stderr / nf,
                numerator: num,
                log_baseline: base,
            })
        }
    }
}

/// Mean and standard error of `s_tilde` over realizations at one `k`.
pub fn aggregate_entropy(samples: &[EntropySample]) -> Result<EntropyAggregate> {
    let first = samples.first().ok_or_else(|| Error::InvalidArgument("no samples to aggregate".into()))?;
    if samples.iter().any(|s| s.k != first.k) {
        return Err(Error::InvalidArgument("samples mix different edge counts".into()));
    }
    Ok(mean_stderr(samples.iter().map(|s| s.s_tilde)))
}

pub(crate) fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> EntropyAggregate {
    let count = values.clone().count();
    let mean = values.clone().sum::<f64>() / count as f64;
    if count < 2 {
        return EntropyAggregate { mean, stderr: 0.0, count, variance_defined: false };
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64;
    EntropyAggregate { mean, stderr: (var / count as f64).sqrt(), count, variance_defined: true }
}
