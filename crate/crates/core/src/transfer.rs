//! Numeric transfer matrices and the spectral determinant at real momentum.

use std::ops::Mul;

use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::error::Result;

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl ComplexMatrix2 {
    pub const IDENTITY: Self = Self {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m11: self.m11 * s,
            m12: self.m12 * s,
            m21: self.m21 * s,
            m22: self.m22 * s,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }
}

/// Frequencies (multipliers of `k`) of the four entries of the vertex matrix.
///
/// Shared with the symbolic expansion so both routes use identical phases.
pub(crate) fn vertex_phases(chain: &ChainSpec, vertex: usize) -> [f64; 4] {
    let b = chain.vertices()[vertex];
    let left = chain.betas()[vertex - 1];
    let right = chain.betas()[vertex];
    [
        (left - right) * b,
        -(right + left) * b,
        (right + left) * b,
        (right - left) * b,
    ]
}

fn stripped_vertex_matrix(chain: &ChainSpec, vertex: usize, r: f64, k: f64) -> ComplexMatrix2 {
    let [p11, p12, p21, p22] = vertex_phases(chain, vertex);
    let e = |w: f64| Complex64::from_polar(1.0, w * k);
    ComplexMatrix2 {
        m11: e(p11),
        m12: e(p12) * r,
        m21: e(p21) * r,
        m22: e(p22),
    }
}

/// Transfer matrix `T_i` across interior vertex `i`, carrying amplitudes
/// `(A_i, B_i)` on the bond left of the vertex to the bond on its right.
pub fn transfer_matrix(chain: &ChainSpec, vertex: usize, k: f64) -> Result<ComplexMatrix2> {
    let c = chain.vertex_coefficients(vertex)?;
    Ok(stripped_vertex_matrix(chain, vertex, c.r, k).scale(1.0 / c.t))
}

/// Ordered product `T_{N-1} ... T_1`; identity for a single bond.
pub fn total_transfer(chain: &ChainSpec, k: f64) -> ComplexMatrix2 {
    let coeffs = chain.interior_coefficients();
    let tau: f64 = coeffs.iter().map(|c| c.t).product();
    stripped_total_transfer(chain, k).scale(1.0 / tau)
}

/// `T_{N-1} ... T_1` with the common factor `prod 1/t_i` removed.
pub fn stripped_total_transfer(chain: &ChainSpec, k: f64) -> ComplexMatrix2 {
    chain
        .interior_coefficients()
        .iter()
        .enumerate()
        .fold(ComplexMatrix2::IDENTITY, |acc, (j, c)| {
            stripped_vertex_matrix(chain, j + 1, c.r, k) * acc
        })
}

/// The Dirichlet spectral determinant, normalized to `1 + e^{2i(S0 k - pi gamma0)} - ...`.
///
/// The raw determinant `e^{2 i beta_N b_N k}(t11 - t12) + t21 - t22` has its
/// lowest frequency `beta_N b_N - S0` carried by the all-diagonal product of
/// `-t22`, with coefficient `-1`; dividing that term out gives the normal form.
pub fn delta_numeric(chain: &ChainSpec, k: f64) -> Complex64 {
    let t = stripped_total_transfer(chain, k);
    let last = chain.betas()[chain.n_bonds() - 1] * chain.length();
    let raw = Complex64::from_polar(1.0, 2.0 * last * k) * (t.m11 - t.m12) + t.m21 - t.m22;
    -Complex64::from_polar(1.0, -(last - chain.total_action()) * k) * raw
}
