use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_DEGENERACY_TOL;
use crate::graph::{pair_count, WeightModel};
use crate::volume::{Baseline, EstimatorOptions, ParameterBox, Regularizer, DEFAULT_LOG10_CAP};

pub const DEFAULT_THETA_MIN: f64 = 0.1;
pub const DEFAULT_THETA_MAX: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_REALIZATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    Constant,
    ThetaCoupled,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::ThetaCoupled => "theta-coupled",
        })
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Self::Constant),
            "theta-coupled" => Ok(Self::ThetaCoupled),
            _ => Err(Error::InvalidArgument(format!("unknown weight model `{s}`"))),
        }
    }
}

/// Serializable description of a [`WeightModel`] with a shared coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub r: f64,
}

impl WeightSpec {
    pub fn constant(r: f64) -> Self {
        Self { kind: WeightKind::Constant, r }
    }

    pub fn theta_coupled(r: f64) -> Self {
        Self { kind: WeightKind::ThetaCoupled, r }
    }

    pub fn model(&self) -> Result<WeightModel> {
        match self.kind {
            WeightKind::Constant => WeightModel::constant(self.r),
            WeightKind::ThetaCoupled => WeightModel::theta_coupled(self.r),
        }
    }
}

/// Everything that determines a sweep's output.
///
/// Thread count is deliberately absent: it never changes results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub k_values: Vec<usize>,
    pub weight: WeightSpec,
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_samples: usize,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub log10_cap: f64,
    pub degeneracy_tol: f64,
    pub regularizer: Regularizer,
    pub baseline: Baseline,
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    /// Defaults for everything except the vertex count and weights: the
    /// default k grid up to `3n`, desk-scale sample and realization counts.
    pub fn new(n: usize, weight: WeightSpec) -> Self {
        Self {
            n,
            k_values: default_k_grid(n, (3 * n).min(pair_count(n))),
            weight,
            theta_min: DEFAULT_THETA_MIN,
            theta_max: DEFAULT_THETA_MAX,
            n_samples: DEFAULT_SAMPLES,
            n_realizations: DEFAULT_REALIZATIONS,
            master_seed: 0,
            log10_cap: DEFAULT_LOG10_CAP,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            regularizer: Regularizer::Hypercube,
            baseline: Baseline::SharedStream,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("sweeps need n >= 2".into()));
        }
        let max = pair_count(self.n);
        if let Some(&k) = self.k_values.iter().find(|&&k| k > max) {
            return Err(Error::EdgeCountOutOfRange { k, max });
        }
        if !self.k_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("k values must be strictly increasing".into()));
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidArgument("need at least one realization".into()));
        }
        self.weight.model()?;
        self.parameter_box()?;
        self.estimator_options().validate()?;
        Ok(())
    }

    pub fn parameter_box(&self) -> Result<ParameterBox> {
        ParameterBox::new(self.theta_min, self.theta_max, self.n)
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            n_samples: self.n_samples,
            log10_cap: self.log10_cap,
            degeneracy_tol: self.degeneracy_tol,
            regularizer: self.regularizer,
            baseline: self.baseline,
        }
    }

    /// `key=value` pairs in a fixed order, used for the output header.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let ks: Vec<String> = self.k_values.iter().map(|k| k.to_string()).collect();
        vec![
            ("n", self.n.to_string()),
            ("k_values", ks.join(";")),
            ("weight_model", self.weight.kind.to_string()),
            ("r", format!("{:?}", self.weight.r)),
            ("theta_min", format!("{:?}", self.theta_min)),
            ("theta_max", format!("{:?}", self.theta_max)),
            ("n_samples", self.n_samples.to_string()),
            ("n_realizations", self.n_realizations.to_string()),
            ("master_seed", self.master_seed.to_string()),
            ("log10_cap", format!("{:?}", self.log10_cap)),
            ("degeneracy_tol", format!("{:?}", self.degeneracy_tol)),
            ("regularizer", self.regularizer.to_string()),
            ("baseline", self.baseline.to_string()),
            ("out", self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default()),
        ]
    }

    /// Rebuild a config from the pairs produced by [`SweepConfig::echo`].
    pub fn from_echo<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut cfg = SweepConfig::new(2, WeightSpec::constant(1.0));
        let mut seen = 0usize;
        for (key, value) in pairs {
            let bad = |what: &str| Error::InvalidArgument(format!("bad {what} `{value}`"));
            match key {
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "k_values" => {
                    cfg.k_values = if value.is_empty() {
                        Vec::new()
                    } else {
                        value.split(';').map(|s| s.parse().map_err(|_| bad("k value"))).collect::<Result<_>>()?
                    }
                }
                "weight_model" => cfg.weight.kind = value.parse()?,
                "r" => cfg.weight.r = value.parse().map_err(|_| bad("r"))?,
                "theta_min" => cfg.theta_min = value.parse().map_err(|_| bad("theta_min"))?,
                "theta_max" => cfg.theta_max = value.parse().map_err(|_| bad("theta_max"))?,
                "n_samples" => cfg.n_samples = value.parse().map_err(|_| bad("n_samples"))?,
                "n_realizations" => cfg.n_realizations = value.parse().map_err(|_| bad("n_realizations"))?,
                "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad("master_seed"))?,
                "log10_cap" => cfg.log10_cap = value.parse().map_err(|_| bad("log10_cap"))?,
                "degeneracy_tol" => cfg.degeneracy_tol = value.parse().map_err(|_| bad("degeneracy_tol"))?,
                "regularizer" => cfg.regularizer = value.parse()?,
                "baseline" => cfg.baseline = value.parse()?,
                "out" => cfg.out = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
                _ => continue,
            }
            seen += 1;
        }
        if seen < 14 {
            return Err(Error::InvalidArgument(format!("config echo incomplete: {seen} of 14 keys")));
        }
        Ok(cfg)
    }
}

/// Step 1 up to `min(3n, k_max)`, then geometric (ratio 1.25) up to and
/// including `k_max`.
pub fn default_k_grid(n: usize, k_max: usize) -> Vec<usize> {
    let dense_end = (3 * n).min(k_max);
    let mut ks: Vec<usize> = (0..=dense_end).collect();
    let mut k = dense_end;
    while k < k_max {
        k = ((k as f64 * 1.25).ceil() as usize).max(k + 1).min(k_max);
        ks.push(k);
    }
    ks
}

/// `0, step, 2 step, ...` up to `k_max`, with `k_max` always included.
pub fn stepped_k_grid(k_max: usize, step: usize) -> Vec<usize> {
    let step = step.max(1);
    let mut ks: Vec<usize> = (0..=k_max).step_by(step).collect();
    if ks.last() != Some(&k_max) {
        ks.push(k_max);
    }
    ks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = default_k_grid(10, 45);
        assert_eq!(&g[..31], &(0..=30).collect::<Vec<_>>()[..]);
        assert_eq!(*g.last().unwrap(), 45);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(default_k_grid(10, 12), (0..=12).collect::<Vec<_>>());
    }

    #[test]
    fn stepped_grid() {
        assert_eq!(stepped_k_grid(10, 3), vec![0, 3, 6, 9, 10]);
        assert_eq!(stepped_k_grid(9, 3), vec![0, 3, 6, 9]);
    }

    #[test]
    fn echo_round_trip() {
        let mut cfg = SweepConfig::new(25, WeightSpec::theta_coupled(0.2));
        cfg.master_seed = 77;
        cfg.out = Some("runs/a.csv".into());
        cfg.theta_min = 0.05;
        let echo = cfg.echo();
        let back = SweepConfig::from_echo(echo.iter().map(|(k, v)| (*k, v.as_str()))).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn validation() {
        let mut cfg = SweepConfig::new(5, WeightSpec::constant(0.2));
        assert!(cfg.validate().is_ok());
        cfg.k_values = vec![0, 11];
        assert!(matches!(cfg.validate(), Err(Error::EdgeCountOutOfRange { k: 11, max: 10 })));
        cfg.k_values = vec![3, 1];
        assert!(cfg.validate().is_err());
        cfg.k_values = vec![0];
        cfg.theta_max = 0.01;
        assert!(matches!(cfg.validate(), Err(Error::InvalidBox { .. })));
    }
}
