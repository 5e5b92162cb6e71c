use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::error::{Error, Result};
use crate::graph::{gibbs_entropy, largest_component_size, sample_gnk};
use crate::rng::{Purpose, StreamKey};
use crate::volume::{mean_stderr, normalized_entropy_sample};

/// Aggregated statistics at one edge count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub k: usize,
    pub k_over_n: f64,
    /// NaN when no realization succeeded.
    pub s_tilde_mean: f64,
    pub s_tilde_stderr: f64,
    /// Mean fraction of Monte Carlo samples excluded, over all realizations.
    pub excluded_fraction: f64,
    pub gibbs_entropy: f64,
    /// Mean of `largest component / n` over all realizations.
    pub giant_fraction: f64,
    /// Realizations whose volume estimate failed.
    pub failed: usize,
}

impl CurveRow {
    pub fn has_value(&self) -> bool {
        self.s_tilde_mean.is_finite()
    }
}

/// The normalized entropy as a function of `k / n`, sorted by `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub n: usize,
    pub rows: Vec<CurveRow>,
}

impl EntropyCurve {
    pub fn x(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.k_over_n).collect()
    }

    pub fn s_tilde(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.s_tilde_mean).collect()
    }
}

struct Realization {
    s_tilde: Option<f64>,
    excluded: f64,
    giant: f64,
}

fn realization(cfg: &SweepConfig, k: usize, r: usize) -> Result<Realization> {
    let key = StreamKey::root(cfg.master_seed).child(k as u64).child(r as u64);
    let g = sample_gnk(cfg.n, k, &mut key.purpose(Purpose::Graph).rng())?;
    let giant = largest_component_size(&g) as f64 / cfg.n as f64;
    let w = cfg.weight.model()?;
    let b = cfg.parameter_box()?;
    match normalized_entropy_sample(&g, &w, &b, &cfg.estimator_options(), key.purpose(Purpose::Volume)) {
        Ok(s) => Ok(Realization { s_tilde: Some(s.s_tilde), excluded: s.numerator.excluded_fraction(), giant }),
        Err(Error::EstimationFailed(est)) => {
            Ok(Realization { s_tilde: None, excluded: est.excluded_fraction(), giant })
        }
        Err(e) => Err(e),
    }
}

fn row(cfg: &SweepConfig, k: usize, reals: &[Realization]) -> Result<CurveRow> {
    let ok: Vec<f64> = reals.iter().filter_map(|r| r.s_tilde).collect();
    let (mean, stderr) = if ok.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let a = mean_stderr(ok.iter().copied());
        (a.mean, a.stderr)
    };
    let m = reals.len() as f64;
    Ok(CurveRow {
        k,
        k_over_n: k as f64 / cfg.n as f64,
        s_tilde_mean: mean,
        s_tilde_stderr: stderr,
        excluded_fraction: reals.iter().map(|r| r.excluded).sum::<f64>() / m,
        gibbs_entropy: gibbs_entropy(cfg.n, k)?,
        giant_fraction: reals.iter().map(|r| r.giant).sum::<f64>() / m,
        failed: reals.len() - ok.len(),
    })
}

/// Run a sweep. `threads = None` uses the ambient thread pool; the result
/// is identical for every thread count.
pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> Result<EntropyCurve> {
    run_sweep_observed(cfg, threads, |_, _| {})
}

/// Like [`run_sweep`], calling `progress(done, total)` as realizations finish.
pub fn run_sweep_observed<F>(cfg: &SweepConfig, threads: Option<usize>, progress: F) -> Result<EntropyCurve>
where
    F: Fn(usize, usize) + Sync,
{
    cfg.validate()?;
    let items: Vec<(usize, usize)> =
        cfg.k_values.iter().flat_map(|&k| (0..cfg.n_realizations).map(move |r| (k, r))).collect();
    let total = items.len();
    let done = AtomicUsize::new(0);
    let work = |&(k, r): &(usize, usize)| {
        let out = realization(cfg, k, r);
        progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
        out
    };

    let results: Vec<Result<Realization>> = execute(&items, threads, work)?;

    let mut rows = Vec::with_capacity(cfg.k_values.len());
    let mut it = results.into_iter();
    for &k in &cfg.k_values {
        let reals = it.by_ref().take(cfg.n_realizations).collect::<Result<Vec<_>>>()?;
        rows.push(row(cfg, k, &reals)?);
    }
    Ok(EntropyCurve { n: cfg.n, rows })
}

#[cfg(feature = "parallel")]
fn execute<T, F>(items: &[(usize, usize)], threads: Option<usize>, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&(usize, usize)) -> T + Sync,
{
    use rayon::prelude::*;
    let run = || items.par_iter().map(&work).collect();
    match threads {
        None => Ok(run()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<T, F>(items: &[(usize, usize)], _threads: Option<usize>, work: F) -> Result<Vec<T>>
where
    F: Fn(&(usize, usize)) -> T,
{
    Ok(items.iter().map(work).collect())
}
