//! Finite exponential sums `sum_j c_j e^{i w_j k}`.

use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Hard ceiling on the number of terms a sum may hold.
pub const TERM_CAP: usize = 1 << 20;

/// A single term `coefficient * e^{i frequency k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: Complex64,
    pub frequency: f64,
}

/// Frequency merging and coefficient dropping rules applied after products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergePolicy {
    /// Frequencies closer than this are treated as identical.
    pub frequency_tol: f64,
    /// Terms with `|c|` below this are removed.
    pub drop_threshold: f64,
}

impl Default for MergePolicy {
    fn default() -> Self {
        Self {
            frequency_tol: 1e-9,
            drop_threshold: 1e-15,
        }
    }
}

impl MergePolicy {
    /// Tolerances scaled to a chain with total action `s0`.
    pub fn for_action(s0: f64) -> Self {
        Self {
            frequency_tol: 1e-9 * s0,
            ..Self::default()
        }
    }
}

/// Terms are kept sorted by frequency with no two frequencies closer than the
/// merge tolerance they were built with.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExponentialSum {
    terms: Vec<Term>,
}

impl ExponentialSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, 0.0)
    }

    pub fn monomial(coefficient: Complex64, frequency: f64) -> Self {
        Self {
            terms: vec![Term {
                coefficient,
                frequency,
            }],
        }
    }

    /// Builds a normalized sum from arbitrary terms.
    pub fn from_terms(terms: Vec<Term>, policy: MergePolicy) -> Self {
        let mut s = Self { terms };
        s.normalize(policy);
        s
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, k: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * Complex64::from_polar(1.0, t.frequency * k))
            .sum()
    }

    /// Coefficient at `frequency`, or zero when no term sits within `tol`.
    pub fn coefficient_at(&self, frequency: f64, tol: f64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| (t.frequency - frequency).abs() < tol)
            .map(|t| t.coefficient)
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coefficient: t.coefficient * c,
                    frequency: t.frequency,
                })
                .collect(),
        }
    }

    /// Multiplies by `e^{i shift k}`.
    pub fn shift(&self, shift: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coefficient: t.coefficient,
                    frequency: t.frequency + shift,
                })
                .collect(),
        }
    }

    /// Frequency-convolved product, merged and pruned under `policy`.
    pub fn multiply(&self, other: &Self, policy: MergePolicy) -> Result<Self> {
        if self.terms.len().saturating_mul(other.terms.len()) > TERM_CAP * 4 {
            return Err(Error::TermCapExceeded { cap: TERM_CAP });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    coefficient: a.coefficient * b.coefficient,
                    frequency: a.frequency + b.frequency,
                });
            }
        }
        let out = Self::from_terms(terms, policy);
        if out.terms.len() > TERM_CAP {
            return Err(Error::TermCapExceeded { cap: TERM_CAP });
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self, policy: MergePolicy) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms, policy)
    }

    fn normalize(&mut self, policy: MergePolicy) {
        self.terms
            .sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        // Clusters are chained: a term joins the open cluster when it is
        // within tolerance of the cluster's last member.
        let mut last_freq = f64::NEG_INFINITY;
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(m) if t.frequency - last_freq < policy.frequency_tol => {
                    m.coefficient += t.coefficient;
                }
                _ => merged.push(t),
            }
            last_freq = t.frequency;
        }
        merged.retain(|t| t.coefficient.norm() >= policy.drop_threshold);
        self.terms = merged;
    }
}

impl Add for &ExponentialSum {
    type Output = ExponentialSum;

    fn add(self, rhs: Self) -> ExponentialSum {
        ExponentialSum::add(self, rhs, MergePolicy::default())
    }
}

impl Neg for &ExponentialSum {
    type Output = ExponentialSum;

    fn neg(self) -> ExponentialSum {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &ExponentialSum {
    type Output = ExponentialSum;

    fn sub(self, rhs: Self) -> ExponentialSum {
        self + &(-rhs)
    }
}

/// Product of two sums under the default merge policy.
pub fn multiply_expsum(a: &ExponentialSum, b: &ExponentialSum) -> Result<ExponentialSum> {
    a.multiply(b, MergePolicy::default())
}
