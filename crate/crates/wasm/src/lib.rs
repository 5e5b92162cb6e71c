//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Three interactive pieces: an entropy sweep that fills in row by row, a
//! G(n, k) sample with its components, and the two-vertex metric landscape.

pub mod demo;

use wasm_bindgen::prelude::*;

/// Incremental entropy sweep over `k = 0, k_step, ..., k_max`.
#[wasm_bindgen]
pub struct Sweep(demo::SweepSession);

#[wasm_bindgen]
impl Sweep {
    #[wasm_bindgen(constructor)]
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
    ) -> Result<Sweep, JsError> {
        demo::SweepSession::new(n, k_max, k_step, r, theta_coupled, samples, realizations, seed)
            .map(Sweep)
            .map_err(|e| JsError::new(&e))
    }

    /// Compute one more row. Returns false when the sweep is finished.
    pub fn step(&mut self) -> Result<bool, JsError> {
        self.0.step().map_err(|e| JsError::new(&e))
    }

    pub fn total(&self) -> usize {
        self.0.total()
    }

    pub fn done(&self) -> bool {
        self.0.done()
    }

    pub fn x(&self) -> Vec<f64> {
        self.0.curve().x()
    }

    pub fn mean(&self) -> Vec<f64> {
        self.0.curve().s_tilde()
    }

    pub fn stderr(&self) -> Vec<f64> {
        self.0.curve().rows.iter().map(|r| r.s_tilde_stderr).collect()
    }

    pub fn giant(&self) -> Vec<f64> {
        self.0.curve().rows.iter().map(|r| r.giant_fraction).collect()
    }

    /// `[x_star, max_slope]`; `x_star` is NaN without a knee.
    pub fn knee(&self, window: usize) -> Vec<f64> {
        let (x, s) = self.0.knee(window);
        vec![x, s]
    }
}

#[wasm_bindgen]
pub struct GraphSample(demo::GraphDraw);

#[wasm_bindgen]
impl GraphSample {
    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn edges(&self) -> Vec<u32> {
        self.0.edges.clone()
    }

    pub fn component_of(&self) -> Vec<u32> {
        self.0.component_of.clone()
    }

    pub fn component_sizes(&self) -> Vec<u32> {
        self.0.component_sizes.clone()
    }
}

#[wasm_bindgen]
pub fn sample_graph(n: usize, k: usize, seed: u64) -> Result<GraphSample, JsError> {
    demo::draw_graph(n, k, seed).map(GraphSample).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn metric_landscape(w: f64, lo: f64, hi: f64, res: usize) -> Result<Vec<f64>, JsError> {
    demo::metric_landscape(w, lo, hi, res).map_err(|e| JsError::new(&e))
}
