//! Symbolic expansion of the spectral determinant.
//!
//! The stripped vertex matrices are multiplied as exponential sums, giving the
//! determinant as `1 + e^{2i(S0 k - pi g0)} - sum a_j e^{2i(S_j k - pi g_j)}`.
//! Terms at `S_j` and `S0 - S_j` are conjugate partners; pairing them turns
//! the spectral equation into `cos(S0 k - pi g0) = Phi(k)` with a real,
//! bounded `Phi`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::expsum::{ExponentialSum, MergePolicy};
use crate::transfer::{vertex_phases, ComplexMatrix2};

const PAIRING_TOL: f64 = 1e-9;

/// 2x2 matrix of exponential sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicMatrix2 {
    pub m11: ExponentialSum,
    pub m12: ExponentialSum,
    pub m21: ExponentialSum,
    pub m22: ExponentialSum,
}

impl SymbolicMatrix2 {
    pub fn identity() -> Self {
        let one = ExponentialSum::constant(Complex64::new(1.0, 0.0));
        Self {
            m11: one.clone(),
            m12: ExponentialSum::zero(),
            m21: ExponentialSum::zero(),
            m22: one,
        }
    }

    pub fn eval(&self, k: f64) -> ComplexMatrix2 {
        ComplexMatrix2 {
            m11: self.m11.eval(k),
            m12: self.m12.eval(k),
            m21: self.m21.eval(k),
            m22: self.m22.eval(k),
        }
    }

    pub fn multiply(&self, rhs: &Self, policy: MergePolicy) -> Result<Self> {
        let dot = |a: &ExponentialSum, b: &ExponentialSum, c: &ExponentialSum, d: &ExponentialSum| {
            Ok::<_, Error>(a.multiply(b, policy)?.add(&c.multiply(d, policy)?, policy))
        };
        Ok(Self {
            m11: dot(&self.m11, &rhs.m11, &self.m12, &rhs.m21)?,
            m12: dot(&self.m11, &rhs.m12, &self.m12, &rhs.m22)?,
            m21: dot(&self.m21, &rhs.m11, &self.m22, &rhs.m21)?,
            m22: dot(&self.m21, &rhs.m12, &self.m22, &rhs.m22)?,
        })
    }
}

/// The product of stripped vertex matrices (no `1/t_i` factors) as exponential sums.
pub fn symbolic_stripped_transfer(chain: &ChainSpec) -> Result<SymbolicMatrix2> {
    let policy = MergePolicy::for_action(chain.total_action());
    let mut acc = SymbolicMatrix2::identity();
    for (j, c) in chain.interior_coefficients().iter().enumerate() {
        let [p11, p12, p21, p22] = vertex_phases(chain, j + 1);
        let one = Complex64::new(1.0, 0.0);
        let r = Complex64::new(c.r, 0.0);
        let vertex = SymbolicMatrix2 {
            m11: ExponentialSum::monomial(one, p11),
            m12: ExponentialSum::monomial(r, p12),
            m21: ExponentialSum::monomial(r, p21),
            m22: ExponentialSum::monomial(one, p22),
        };
        acc = vertex.multiply(&acc, policy)?;
    }
    Ok(acc)
}

/// The determinant as an exponential sum, normalized so its constant term is 1.
pub fn normalized_determinant(chain: &ChainSpec) -> Result<ExponentialSum> {
    let policy = MergePolicy::for_action(chain.total_action());
    let t = symbolic_stripped_transfer(chain)?;
    let last = chain.betas()[chain.n_bonds() - 1] * chain.length();
    let upper = t.m11.add(&t.m12.scale(Complex64::new(-1.0, 0.0)), policy).shift(2.0 * last);
    let lower = t.m21.add(&t.m22.scale(Complex64::new(-1.0, 0.0)), policy);
    let raw = upper.add(&lower, policy);
    let lowest = *raw
        .terms()
        .first()
        .ok_or_else(|| Error::Normalization("determinant vanished identically".into()))?;
    if (lowest.coefficient.norm() - 1.0).abs() > PAIRING_TOL {
        return Err(Error::Normalization(format!(
            "lowest-frequency coefficient has modulus {}",
            lowest.coefficient.norm()
        )));
    }
    let normalized = raw
        .shift(-lowest.frequency)
        .scale(lowest.coefficient.inv());
    // Pin the constant term to exactly 0 frequency and coefficient 1.
    let mut terms = normalized.terms().to_vec();
    terms[0].frequency = 0.0;
    terms[0].coefficient = Complex64::new(1.0, 0.0);
    Ok(ExponentialSum::from_terms(terms, policy))
}

/// One conjugate pair `(S_j, S0 - S_j)` of the determinant, or a single
/// self-conjugate term when `S_j = S0 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosinePair {
    /// `|a_j|`, the modulus shared by both partners.
    pub amplitude: f64,
    /// The smaller action `S_j <= S0 / 2` of the pair.
    pub action: f64,
    /// Phase `g_j` in `[0, 1)` of the lower partner.
    pub gamma: f64,
    pub self_paired: bool,
}

impl CosinePair {
    /// Amplitude of this pair's cosine in `Phi`.
    pub fn weight(&self) -> f64 {
        if self.self_paired {
            0.5 * self.amplitude
        } else {
            self.amplitude
        }
    }
}

/// The determinant in paired form together with its regularity margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralForm {
    pub s0: f64,
    pub gamma0: f64,
    pub pairs: Vec<CosinePair>,
    pub margin: f64,
}

/// A single unpaired exponential `a e^{2i(S k - pi g)}` of the determinant's sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnpairedTerm {
    pub amplitude: f64,
    pub action: f64,
    pub gamma: f64,
}

fn phase_in_units(z: Complex64) -> f64 {
    // gamma with z = e^{-2 pi i gamma}, reduced to [0, 1)
    let g = (-z.arg() / (2.0 * PI)).rem_euclid(1.0);
    if g >= 1.0 {
        0.0
    } else {
        g
    }
}

impl SpectralForm {
    /// Pairs the normalized determinant of `chain` into cosine form.
    pub fn from_chain(chain: &ChainSpec) -> Result<Self> {
        let det = normalized_determinant(chain)?;
        Self::from_determinant(&det, chain.total_action())
    }

    pub fn from_determinant(det: &ExponentialSum, s0: f64) -> Result<Self> {
        let tol = 1e-9 * s0;
        let terms = det.terms();
        let top = terms
            .last()
            .filter(|t| terms.len() >= 2 && (t.frequency - 2.0 * s0).abs() < tol)
            .ok_or_else(|| Error::Normalization("no term at frequency 2 S0".into()))?;
        if (top.coefficient.norm() - 1.0).abs() > PAIRING_TOL {
            return Err(Error::Normalization(format!(
                "top coefficient has modulus {}",
                top.coefficient.norm()
            )));
        }
        let top_phase = top.coefficient / top.coefficient.norm();
        let gamma0 = phase_in_units(top_phase);
        let half_rot = Complex64::from_polar(1.0, PI * gamma0);

        let middle = &terms[1..terms.len() - 1];
        let mut pairs = Vec::new();
        for term in middle {
            let w = term.frequency;
            if w <= tol || w >= 2.0 * s0 - tol {
                return Err(Error::Normalization(format!(
                    "frequency {w} lies outside (0, 2 S0)"
                )));
            }
            let amplitude = term.coefficient.norm();
            let gamma = phase_in_units(-term.coefficient / amplitude);
            if (w - s0).abs() < tol {
                // contributes the constant -c e^{i pi g0} / 2 to Phi
                let residue = 0.5 * (term.coefficient * half_rot).im.abs();
                if residue > PAIRING_TOL {
                    return Err(Error::PairingFailure {
                        frequency: w / 2.0,
                        residue,
                    });
                }
                pairs.push(CosinePair {
                    amplitude,
                    action: w / 2.0,
                    gamma,
                    self_paired: true,
                });
                continue;
            }
            let expected_partner = term.coefficient.conj() * top_phase;
            let partner = det.coefficient_at(2.0 * s0 - w, tol);
            let residue = 0.5 * (partner - expected_partner).norm();
            if residue > PAIRING_TOL {
                return Err(Error::PairingFailure {
                    frequency: w / 2.0,
                    residue,
                });
            }
            if w < s0 {
                pairs.push(CosinePair {
                    amplitude,
                    action: w / 2.0,
                    gamma,
                    self_paired: false,
                });
            }
        }
        let margin = 1.0 - pairs.iter().map(CosinePair::weight).sum::<f64>();
        Ok(Self {
            s0,
            gamma0,
            pairs,
            margin,
        })
    }

    /// The characteristic function `Phi(k)`.
    pub fn characteristic(&self, k: f64) -> f64 {
        self.pairs
            .iter()
            .map(|p| {
                p.weight()
                    * ((self.s0 - 2.0 * p.action) * k + 2.0 * PI * p.gamma - PI * self.gamma0).cos()
            })
            .sum()
    }

    /// Real spectral function `cos(S0 k - pi g0) - Phi(k)`.
    pub fn spectral_function(&self, k: f64) -> f64 {
        (self.s0 * k - PI * self.gamma0).cos() - self.characteristic(k)
    }

    /// The `2 N_Gamma` exponentials of the determinant's sum, both partners listed.
    pub fn unpaired_terms(&self) -> Vec<UnpairedTerm> {
        let mut out = Vec::with_capacity(2 * self.pairs.len());
        for p in &self.pairs {
            out.push(UnpairedTerm {
                amplitude: p.amplitude,
                action: p.action,
                gamma: p.gamma,
            });
            if !p.self_paired {
                out.push(UnpairedTerm {
                    amplitude: p.amplitude,
                    action: self.s0 - p.action,
                    gamma: self.gamma0 - p.gamma,
                });
            }
        }
        out
    }

    /// Evaluates the determinant from the unpaired exponentials.
    pub fn eval(&self, k: f64) -> Complex64 {
        let e = |s: f64, g: f64| Complex64::from_polar(1.0, 2.0 * (s * k - PI * g));
        let sum: Complex64 = self
            .unpaired_terms()
            .iter()
            .map(|t| e(t.action, t.gamma) * t.amplitude)
            .sum();
        Complex64::new(1.0, 0.0) + e(self.s0, self.gamma0) - sum
    }

    pub fn is_regular(&self) -> bool {
        self.margin > 0.0
    }
}

/// Expands the chain's determinant into paired cosine form.
pub fn expand_determinant(chain: &ChainSpec) -> Result<SpectralForm> {
    SpectralForm::from_chain(chain)
}

/// `1 - sum |a_j|` over the paired coefficients; positive certifies regularity.
pub fn regularity_margin(form: &SpectralForm) -> f64 {
    form.margin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{delta_numeric, stripped_total_transfer};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chain(rng: &mut ChaCha8Rng, bonds: usize) -> ChainSpec {
        let mut v = vec![0.0];
        for _ in 0..bonds {
            v.push(v.last().unwrap() + rng.random_range(0.3..2.0));
        }
        let lambdas: Vec<f64> = (0..bonds).map(|_| rng.random_range(0.0..0.9)).collect();
        ChainSpec::new(v, &lambdas).unwrap()
    }

    #[test]
    fn square_well_form() {
        let c = ChainSpec::new(vec![0.0, 2.0], &[0.0]).unwrap();
        let f = expand_determinant(&c).unwrap();
        assert!(f.pairs.is_empty());
        assert_eq!(f.s0, 2.0);
        assert_abs_diff_eq!(f.gamma0, 0.5, epsilon = 1e-15);
        assert_eq!(regularity_margin(&f), 1.0);
        for k in [0.1, 1.0, 4.4] {
            assert_abs_diff_eq!(f.spectral_function(k), (2.0 * k).sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn two_bond_form() {
        let c = ChainSpec::new(vec![0.0, 1.0, 2.0], &[0.0, 0.75]).unwrap();
        let f = expand_determinant(&c).unwrap();
        assert_eq!(f.pairs.len(), 1);
        let p = f.pairs[0];
        assert_abs_diff_eq!(p.amplitude, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!((2.0 * p.action - f.s0).abs(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.margin, 2.0 / 3.0, epsilon = 1e-12);
        for k in [0.2, 1.9, 13.0] {
            assert_abs_diff_eq!(f.characteristic(k), (0.5 * k).sin() / 3.0, epsilon = 1e-14);
            assert_abs_diff_eq!(
                f.spectral_function(k),
                (1.5 * k).sin() - (0.5 * k).sin() / 3.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn symbolic_matrix_matches_numeric() {
        let c = ChainSpec::new(vec![0.0, 1.0, 2.0], &[0.0, 0.75]).unwrap();
        let s = symbolic_stripped_transfer(&c).unwrap();
        assert!(s.eval(2.0).max_abs_diff(&stripped_total_transfer(&c, 2.0)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_chain(&mut rng, 5);
        let s = symbolic_stripped_transfer(&c).unwrap();
        for _ in 0..50 {
            let k = rng.random_range(0.0..40.0);
            assert!(s.eval(k).max_abs_diff(&stripped_total_transfer(&c, k)) < 1e-11);
        }
    }

    #[test]
    fn four_bond_form_matches_numeric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random_chain(&mut rng, 4);
        let f = expand_determinant(&c).unwrap();
        for _ in 0..1000 {
            let k = rng.random_range(0.0..50.0);
            assert!((f.eval(k) - delta_numeric(&c, k)).norm() < 1e-10);
        }
    }

    #[test]
    fn frequencies_inside_and_term_count_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for bonds in 1..=6 {
            let c = random_chain(&mut rng, bonds);
            let det = normalized_determinant(&c).unwrap();
            assert!(det.len() <= 2 * (1 << (bonds - 1)) + 2);
            let f = expand_determinant(&c).unwrap();
            for t in f.unpaired_terms() {
                assert!(t.action > 0.0 && t.action < f.s0);
            }
            // frequency multiset is symmetric under S -> S0 - S
            let mut a: Vec<f64> = f.unpaired_terms().iter().map(|t| t.action).collect();
            let mut b: Vec<f64> = a.iter().map(|s| f.s0 - s).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn characteristic_is_real_and_bounded_by_coefficients() {
        // The paired Phi must equal Re of the rotated determinant; its imaginary
        // part is the pairing residue.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for bonds in 2..=5 {
            let c = random_chain(&mut rng, bonds);
            let f = expand_determinant(&c).unwrap();
            let bound: f64 = f.pairs.iter().map(CosinePair::weight).sum();
            for _ in 0..300 {
                let k = rng.random_range(0.0..30.0);
                let rot = delta_numeric(&c, k)
                    * Complex64::from_polar(0.5, -(f.s0 * k - PI * f.gamma0));
                assert!(rot.im.abs() < 1e-10);
                assert!((rot.re - f.spectral_function(k)).abs() < 1e-10);
                assert!(f.characteristic(k).abs() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn margin_bounds_grid_maximum() {
        let c = ChainSpec::new(vec![0.0, 1.0, 2.0, 3.0], &[0.0, 0.99, 0.0]).unwrap();
        let f = expand_determinant(&c).unwrap();
        let mut max_phi = 0.0f64;
        let n = 200_000;
        // Phi is periodic here (commensurate bonds); one period in k is 2 pi / 0.1 at most.
        for i in 0..n {
            let k = 70.0 * i as f64 / n as f64;
            max_phi = max_phi.max(f.characteristic(k).abs());
        }
        assert!(f.margin <= 1.0 - max_phi + 1e-9);
        assert!(f.margin < 0.0);
    }

    #[test]
    fn contrast_scaling_is_linear_to_leading_order() {
        let c = ChainSpec::new(vec![0.0, 0.7, 1.9, 2.6], &[0.1, 0.5, 0.3]).unwrap();
        let sum = |eps: f64| {
            let f = expand_determinant(&c.compress_contrast(eps)).unwrap();
            1.0 - f.margin
        };
        let (a, b) = (sum(1e-3), sum(2e-3));
        assert!(a > 0.0);
        assert!((b / a - 2.0).abs() < 0.01, "ratio {}", b / a);
    }

    #[test]
    fn coefficients_are_r_polynomials_without_constant() {
        // Zero contrast: every coefficient vanishes, only the bare pair survives.
        let c = ChainSpec::new(vec![0.0, 0.5, 1.7, 2.0], &[0.4, 0.4, 0.4]).unwrap();
        let f = expand_determinant(&c).unwrap();
        assert!(f.pairs.is_empty());
        assert_eq!(f.margin, 1.0);
    }
}
