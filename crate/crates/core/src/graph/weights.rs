use super::Graph;
use crate::error::{Error, Result};

/// Symmetric, zero-diagonal, finite `n x n` matrix of link weights, stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    data: Vec<f64>,
}

impl AdjacencyMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidAdjacency(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() {
                    return Err(Error::InvalidAdjacency(format!("entry ({i}, {j}) is not finite")));
                }
                if v != data[j * n + i] {
                    return Err(Error::InvalidAdjacency(format!("entry ({i}, {j}) breaks symmetry")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Pairs `(i, j)`, `i < j`, with a nonzero entry.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.data[i * n + j] != 0.0)
            .collect()
    }

    fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }
}

/// Link coefficients `r_ij` of the theta-coupled model.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    /// One value shared by every present edge.
    Uniform(f64),
    /// Full symmetric matrix; only entries on present edges are read.
    Matrix(AdjacencyMatrix),
}

/// How adjacency entries are produced from a graph.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightModel {
    /// Every present edge carries the same weight `r`.
    Constant { r: f64 },
    /// Edge `(i, j)` carries `r_ij * theta_i * theta_j`.
    ThetaCoupled(Coefficients),
}

impl WeightModel {
    pub fn constant(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidWeightModel(format!("constant weight must be finite and > 0, got {r}")));
        }
        Ok(Self::Constant { r })
    }

    pub fn theta_coupled(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidWeightModel(format!("coupling must be finite and >= 0, got {r}")));
        }
        Ok(Self::ThetaCoupled(Coefficients::Uniform(r)))
    }

    pub fn theta_coupled_matrix(m: AdjacencyMatrix) -> Result<Self> {
        if m.as_slice().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidWeightModel("coupling coefficients must be >= 0".into()));
        }
        Ok(Self::ThetaCoupled(Coefficients::Matrix(m)))
    }

    pub fn depends_on_theta(&self) -> bool {
        matches!(self, Self::ThetaCoupled(_))
    }

    /// The theta-independent factor of the weight on edge `(i, j)`.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Constant { r } => *r,
            Self::ThetaCoupled(Coefficients::Uniform(r)) => *r,
            Self::ThetaCoupled(Coefficients::Matrix(m)) => m.get(i, j),
        }
    }

    /// Weight on edge `(i, j)` at the parameter point `theta`.
    pub fn weight(&self, i: usize, j: usize, theta: &[f64]) -> f64 {
        match self {
            Self::Constant { r } => *r,
            Self::ThetaCoupled(_) => self.coefficient(i, j) * theta[i] * theta[j],
        }
    }

    pub(crate) fn check_dimension(&self, n: usize) -> Result<()> {
        if let Self::ThetaCoupled(Coefficients::Matrix(m)) = self {
            if m.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.n() });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_theta(theta: &[f64], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: theta.len() });
    }
    match theta.iter().position(|&t| !(t.is_finite() && t > 0.0)) {
        Some(index) => Err(Error::InvalidTheta { index, value: theta[index] }),
        None => Ok(()),
    }
}

/// Adjacency matrix of `g` under weight model `w` at parameter point `theta`.
///
/// Constant models ignore `theta` apart from validation, so callers may
/// cache the result.
pub fn materialize_adjacency(g: &Graph, w: &WeightModel, theta: &[f64]) -> Result<AdjacencyMatrix> {
    check_theta(theta, g.n())?;
    w.check_dimension(g.n())?;
    let mut a = AdjacencyMatrix::zeros(g.n());
    for &(i, j) in g.edges() {
        a.set_sym(i, j, w.weight(i, j, theta));
    }
    Ok(a)
}
