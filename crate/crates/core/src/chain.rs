//! Dressed linear chain graphs.
//!
//! A chain is a sequence of bonds `(b[i-1], b[i])` on the line, closed by
//! Dirichlet walls at `b[0] = 0` and `b[N]`. Bond `i` carries the scaled step
//! potential `U = lambda_i * E`, so its wavenumber is `beta_i * k` with
//! `beta_i = sqrt(1 - lambda_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated chain geometry plus the derived per-bond quantities.
///
/// Bonds are indexed `0..n_bonds()` in code; bond `i` spans
/// `vertices[i]..vertices[i + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    vertices: Vec<f64>,
    betas: Vec<f64>,
    bond_actions: Vec<f64>,
    total_action: f64,
}

/// Reflection and transmission amplitudes of an interior vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexCoefficients {
    pub r: f64,
    pub t: f64,
}

impl VertexCoefficients {
    /// Scattering data for a vertex joining media with factors `left` and `right`.
    pub fn between(left: f64, right: f64) -> Self {
        let sum = left + right;
        Self {
            r: (right - left) / sum,
            t: 2.0 * (left * right).sqrt() / sum,
        }
    }
}

impl ChainSpec {
    pub fn new(vertices: Vec<f64>, lambdas: &[f64]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if lambdas.len() != vertices.len() - 1 {
            return Err(Error::LambdaCount {
                expected: vertices.len() - 1,
                got: lambdas.len(),
            });
        }
        if vertices.iter().chain(lambdas).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if vertices[0] != 0.0 {
            return Err(Error::FirstVertexNotZero(vertices[0]));
        }
        for i in 1..vertices.len() {
            if vertices[i] <= vertices[i - 1] {
                return Err(Error::NonIncreasingVertices {
                    index: i,
                    prev_index: i - 1,
                    value: vertices[i],
                });
            }
        }
        for (index, &value) in lambdas.iter().enumerate() {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::LambdaOutOfRange { index, value });
            }
        }
        let betas = lambdas.iter().map(|l| (1.0 - l).sqrt()).collect();
        Self::from_betas(vertices, betas)
    }

    /// Builds a chain directly from wavenumber factors `beta_i` in `(0, 1]`.
    pub fn from_betas(vertices: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if betas.len() != vertices.len() - 1 {
            return Err(Error::LambdaCount {
                expected: vertices.len() - 1,
                got: betas.len(),
            });
        }
        for (index, &b) in betas.iter().enumerate() {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::LambdaOutOfRange {
                    index,
                    value: 1.0 - b * b,
                });
            }
        }
        let bond_actions: Vec<f64> = betas
            .iter()
            .zip(vertices.windows(2))
            .map(|(beta, w)| beta * (w[1] - w[0]))
            .collect();
        let total_action = bond_actions.iter().sum();
        Ok(Self {
            vertices,
            betas,
            bond_actions,
            total_action,
        })
    }

    pub fn n_bonds(&self) -> usize {
        self.betas.len()
    }

    pub fn vertices(&self) -> &[f64] {
        &self.vertices
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.betas.iter().map(|b| 1.0 - b * b).collect()
    }

    pub fn bond_actions(&self) -> &[f64] {
        &self.bond_actions
    }

    /// Total action length `S0`, the largest frequency of the determinant.
    pub fn total_action(&self) -> f64 {
        self.total_action
    }

    /// Position of the right wall, `b[N]`.
    pub fn length(&self) -> f64 {
        *self.vertices.last().unwrap()
    }

    /// Scattering data at interior vertex `i` (`1 <= i <= N - 1`), which joins
    /// bond `i - 1` and bond `i` in zero-based bond numbering.
    pub fn vertex_coefficients(&self, i: usize) -> Result<VertexCoefficients> {
        if i == 0 || i >= self.n_bonds() {
            return Err(Error::NotInterior {
                index: i,
                bonds: self.n_bonds(),
            });
        }
        Ok(VertexCoefficients::between(self.betas[i - 1], self.betas[i]))
    }

    /// All interior vertex coefficients, in vertex order.
    pub fn interior_coefficients(&self) -> Vec<VertexCoefficients> {
        self.betas
            .windows(2)
            .map(|w| VertexCoefficients::between(w[0], w[1]))
            .collect()
    }

    /// The same geometry with every `beta` pulled toward the mean by `factor`.
    pub fn compress_contrast(&self, factor: f64) -> Self {
        let mean = self.betas.iter().sum::<f64>() / self.betas.len() as f64;
        let betas = self
            .betas
            .iter()
            .map(|b| mean + (b - mean) * factor)
            .collect();
        Self::from_betas(self.vertices.clone(), betas)
            .expect("convex combination of valid betas stays in (0, 1]")
    }
}

/// On-disk chain description: `{"vertices": [...], "lambdas": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub vertices: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl ChainConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<ChainSpec> {
        ChainSpec::new(self.vertices.clone(), &self.lambdas)
    }
}

impl From<&ChainSpec> for ChainConfig {
    fn from(chain: &ChainSpec) -> Self {
        Self {
            vertices: chain.vertices.clone(),
            lambdas: chain.lambdas(),
        }
    }
}
