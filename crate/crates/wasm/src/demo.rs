//! Plain-Rust logic behind the browser bindings, testable natively.

use geoentropy::experiment::{knee_location, run_sweep, CurveRow, EntropyCurve, Knee, SweepConfig, WeightSpec};
use geoentropy::geometry::{deformed_metric, ParameterPoint};
use geoentropy::graph::{pair_count, sample_gnk, AdjacencyMatrix};
use geoentropy::rng::StreamKey;

/// A sweep computed one edge count at a time so a page can redraw between
/// steps. Each row is exactly what a full sweep with the same config gives.
pub struct SweepSession {
    cfg: SweepConfig,
    rows: Vec<CurveRow>,
}

impl SweepSession {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        k_max: usize,
        k_step: usize,
        r: f64,
        theta_coupled: bool,
        samples: usize,
        realizations: usize,
        seed: u64,
    ) -> Result<Self, String> {
        if k_step == 0 {
            return Err("k step must be positive".into());
        }
        let weight = if theta_coupled { WeightSpec::theta_coupled(r) } else { WeightSpec::constant(r) };
        let mut cfg = SweepConfig::new(n, weight);
        cfg.k_values = (0..=k_max.min(pair_count(n))).step_by(k_step).collect();
        cfg.n_samples = samples;
        cfg.n_realizations = realizations;
        cfg.master_seed = seed;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(Self { cfg, rows: Vec::new() })
    }

    pub fn total(&self) -> usize {
        self.cfg.k_values.len()
    }

    pub fn done(&self) -> bool {
        self.rows.len() == self.total()
    }

    /// Compute the next row; `Ok(false)` once the sweep is complete.
    pub fn step(&mut self) -> Result<bool, String> {
        let Some(&k) = self.cfg.k_values.get(self.rows.len()) else {
            return Ok(false);
        };
        let mut one = self.cfg.clone();
        one.k_values = vec![k];
        let c = run_sweep(&one, None).map_err(|e| e.to_string())?;
        self.rows.extend(c.rows);
        Ok(true)
    }

    pub fn curve(&self) -> EntropyCurve {
        EntropyCurve { n: self.cfg.n, rows: self.rows.clone() }
    }

    pub fn config(&self) -> &SweepConfig {
        &self.cfg
    }

    /// `(x_star, max_slope)`, `x_star` NaN when there is no knee or too
    /// few rows.
    pub fn knee(&self, window: usize) -> (f64, f64) {
        match knee_location(&self.curve(), window) {
            Ok(Knee::At { x_star, max_slope }) => (x_star, max_slope),
            Ok(Knee::None { max_slope }) => (f64::NAN, max_slope),
            Err(_) => (f64::NAN, f64::NAN),
        }
    }
}

/// A G(n, k) draw with its components.
pub struct GraphDraw {
    pub n: usize,
    /// Flattened `(i, j)` pairs.
    pub edges: Vec<u32>,
    /// Component index of every vertex; components are numbered by
    /// decreasing size.
    pub component_of: Vec<u32>,
    pub component_sizes: Vec<u32>,
}

pub fn draw_graph(n: usize, k: usize, seed: u64) -> Result<GraphDraw, String> {
    let g = sample_gnk(n, k, &mut StreamKey::root(seed).rng()).map_err(|e| e.to_string())?;
    let mut comps = g.components();
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let mut component_of = vec![0u32; n];
    for (ci, c) in comps.iter().enumerate() {
        for &v in c {
            component_of[v] = ci as u32;
        }
    }
    Ok(GraphDraw {
        n,
        edges: g.edges().iter().flat_map(|&(i, j)| [i as u32, j as u32]).collect(),
        component_of,
        component_sizes: comps.iter().map(|c| c.len() as u32).collect(),
    })
}

/// `log10 sqrt|det g~|` for the two-vertex graph with weight `w` on a
/// `res x res` grid, log-spaced over `[lo, hi]` on both axes. Row `i` is
/// `theta_2`, column `j` is `theta_1`; degenerate points are NaN.
pub fn metric_landscape(w: f64, lo: f64, hi: f64, res: usize) -> Result<Vec<f64>, String> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(format!("bad range [{lo}, {hi}]"));
    }
    if res < 2 {
        return Err("resolution must be at least 2".into());
    }
    let a = AdjacencyMatrix::from_row_major(2, vec![0.0, w, w, 0.0]).map_err(|e| e.to_string())?;
    let axis: Vec<f64> =
        (0..res).map(|i| lo * (hi / lo).powf(i as f64 / (res - 1) as f64)).collect();
    let mut out = Vec::with_capacity(res * res);
    for &t2 in &axis {
        for &t1 in &axis {
            let p = ParameterPoint::new(vec![t1, t2]).expect("grid is positive");
            out.push(match deformed_metric(&p, &a) {
                Ok(m) => m.log_sqrt_abs_det() / std::f64::consts::LN_10,
                Err(_) => f64::NAN,
            });
        }
    }
    Ok(out)
}
