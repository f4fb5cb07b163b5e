//! Trace formula: density of states and the periodic-orbit eigenvalue series.
//!
//! Orbits enter only through action classes. A class is a vector `m` of round
//! trips per bond with action `S(m) = 2 sum m_i s_i` and weight
//! `W(m) = sum A_p^nu / nu` over repetitions `nu` of primitive orbits `p`
//! with `nu m_p = m`. The weights are the Taylor coefficients of
//! `-log det(1 - U(y))`, where `y_i` marks a round trip on bond `i`, so they
//! can be summed to high order without listing orbits one by one.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::expansion::SpectralForm;
use crate::orbits::PeriodicOrbit;
use crate::spectrum::SeparatorGrid;

/// Most classes kept by a resummation.
pub const CLASS_CAP: usize = 1 << 22;
/// Most bonds accepted by the class polynomial.
pub const MAX_POLY_BONDS: usize = 24;
/// Repetitions summed per orbit in [`OrbitSum::from_orbits`].
pub const DEFAULT_REP_MAX: u32 = 64;

/// `det(1 - U(y))` as a multilinear polynomial in the round-trip markers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassPolynomial {
    pub n_bonds: usize,
    /// `(bond bitmask, coefficient)`, sorted by mask; the empty mask is 1.
    pub terms: Vec<(u32, f64)>,
}

impl ClassPolynomial {
    /// Simple cycles of the directed-bond graph are bond segments `i..=j`
    /// swept right and back left, so the determinant is a sum over sets of
    /// disjoint segments, each contributing minus its cycle amplitude.
    pub fn new(chain: &ChainSpec) -> Result<Self> {
        let n = chain.n_bonds();
        if n > MAX_POLY_BONDS {
            return Err(Error::InvalidParameter(format!(
                "class polynomial supports at most {MAX_POLY_BONDS} bonds, got {n}"
            )));
        }
        let coeff = chain.interior_coefficients();
        let segment = |i: usize, j: usize| {
            let left = if i == 0 { -1.0 } else { coeff[i - 1].r };
            let right = if j + 1 == n { -1.0 } else { -coeff[j].r };
            let through: f64 = (i + 1..=j).map(|v| coeff[v - 1].t * coeff[v - 1].t).product();
            left * right * through
        };
        // prefix[b]: polynomial over bonds 0..b
        let mut prefix: Vec<HashMap<u32, f64>> = vec![HashMap::from([(0u32, 1.0)])];
        for b in 0..n {
            let mut next = prefix[b].clone();
            for i in 0..=b {
                let w = -segment(i, b);
                let mask: u32 = ((1u64 << (b + 1)) - (1u64 << i)) as u32;
                for (&m, &c) in &prefix[i] {
                    *next.entry(m | mask).or_insert(0.0) += c * w;
                }
            }
            prefix.push(next);
        }
        let mut terms: Vec<(u32, f64)> = prefix[n].iter().map(|(&m, &c)| (m, c)).filter(|t| t.1 != 0.0).collect();
        terms.sort_by_key(|t| t.0);
        Ok(Self { n_bonds: n, terms })
    }

    /// Value at real round-trip markers `y`.
    pub fn eval_real(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(mask, c)| c * (0..self.n_bonds).filter(|b| mask >> b & 1 == 1).map(|b| y[b]).product::<f64>())
            .sum()
    }

    /// Value at `y_i = exp(2 i s_i k)`.
    pub fn eval_at(&self, chain: &ChainSpec, k: f64) -> num_complex::Complex64 {
        let s = chain.bond_actions();
        self.terms
            .iter()
            .map(|&(mask, c)| {
                let phase: f64 = (0..self.n_bonds).filter(|b| mask >> b & 1 == 1).map(|b| 2.0 * s[b]).sum();
                num_complex::Complex64::from_polar(c, phase * k)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionClass {
    pub round_trips: Vec<u32>,
    pub action: f64,
    pub weight: f64,
}

impl ActionClass {
    pub fn degree(&self) -> u32 {
        self.round_trips.iter().sum()
    }

    /// `W / S` times the bounded sine factors is the eigenvalue shift; the
    /// threshold test uses `|W| / degree`.
    pub fn strength(&self) -> f64 {
        self.weight.abs() / self.degree() as f64
    }

    /// Closed-form contribution to the `n`-th eigenvalue.
    pub fn series_term(&self, s0: f64, n: usize) -> f64 {
        let s = self.action;
        -2.0 / PI * self.weight / s * (PI * s / (2.0 * s0)).sin() * (PI * s * n as f64 / s0).sin()
    }

    pub fn density_term(&self, k: f64) -> f64 {
        self.action * self.weight * (self.action * k).cos() / PI
    }

    pub fn staircase_term(&self, k: f64) -> f64 {
        self.weight * (self.action * k).sin() / PI
    }
}

/// Where a set of classes came from and how it was cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Truncation {
    /// Full resummation, classes with `|W| / degree < amp_threshold` dropped.
    Resummed { amp_threshold: f64, max_degree: u32 },
    /// Explicit primitive orbits up to a code length, with repetitions.
    Enumerated {
        amp_threshold: f64,
        max_code_length: usize,
        rep_max: u32,
        repetition_tail: f64,
    },
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSum {
    pub s0: f64,
    pub classes: Vec<ActionClass>,
    pub truncation: Truncation,
}

fn class_action(chain: &ChainSpec, m: &[u32]) -> f64 {
    m.iter().zip(chain.bond_actions()).map(|(&c, s)| 2.0 * c as f64 * s).sum()
}

impl OrbitSum {
    /// No orbits: every series reduces to its smooth part.
    pub fn empty(chain: &ChainSpec) -> Self {
        Self {
            s0: chain.total_action(),
            classes: Vec::new(),
            truncation: Truncation::Empty,
        }
    }

    /// All classes with `|W| / degree >= amp_threshold`, from the expansion
    /// of `-log det(1 - U(y))`.
    pub fn resummed(chain: &ChainSpec, amp_threshold: f64) -> Result<Self> {
        Self::resummed_with_cap(chain, amp_threshold, CLASS_CAP)
    }

    pub fn resummed_with_cap(chain: &ChainSpec, amp_threshold: f64, cap: usize) -> Result<Self> {
        if !(amp_threshold > 0.0 && amp_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "amplitude threshold must lie in (0, 1), got {amp_threshold}"
            )));
        }
        Self::expand(chain, amp_threshold, u32::MAX, cap)
    }

    /// Every class with at most `max_degree` round trips, untruncated.
    pub fn exact_to_degree(chain: &ChainSpec, max_degree: u32) -> Result<Self> {
        Self::expand(chain, 0.0, max_degree, CLASS_CAP)
    }

    fn expand(chain: &ChainSpec, amp_threshold: f64, degree_cap: u32, cap: usize) -> Result<Self> {
        let poly = ClassPolynomial::new(chain)?;
        let n = poly.n_bonds;
        let to_vec = |mask: u32| -> Vec<u32> { (0..n).map(|b| mask >> b & 1).collect() };
        let p_terms: Vec<(Vec<u32>, u32, f64)> = poly
            .terms
            .iter()
            .filter(|t| t.0 != 0)
            .map(|&(mask, c)| (to_vec(mask), mask.count_ones(), c))
            .collect();
        let p_degree = p_terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let prune = amp_threshold * 1e-4;

        let mut layers: Vec<HashMap<Vec<u32>, f64>> = vec![HashMap::new()];
        let mut classes = Vec::new();
        let mut quiet = 0usize;
        let mut d = 0u32;
        while p_degree > 0 && d < degree_cap {
            d += 1;
            let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
            for (c, dc, pc) in &p_terms {
                if *dc > d {
                    continue;
                }
                if *dc == d {
                    *acc.entry(c.clone()).or_insert(0.0) -= d as f64 * pc;
                    continue;
                }
                let du = d - dc;
                for (u, wu) in &layers[du as usize] {
                    let m: Vec<u32> = u.iter().zip(c).map(|(a, b)| a + b).collect();
                    *acc.entry(m).or_insert(0.0) -= pc * du as f64 * wu;
                }
            }
            let mut layer = HashMap::with_capacity(acc.len());
            let mut loudest = 0.0f64;
            for (m, v) in acc {
                let w = v / d as f64;
                if w.abs() < prune {
                    continue;
                }
                let strength = w.abs() / d as f64;
                loudest = loudest.max(strength);
                if strength >= amp_threshold {
                    classes.push(ActionClass {
                        action: class_action(chain, &m),
                        round_trips: m.clone(),
                        weight: w,
                    });
                    if classes.len() > cap {
                        return Err(Error::ClassCapExceeded { cap });
                    }
                }
                layer.insert(m, w);
            }
            layers.push(layer);
            if loudest < amp_threshold {
                quiet += 1;
                if quiet >= 2 * p_degree {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        sort_classes(&mut classes);
        let max_degree = classes.iter().map(ActionClass::degree).max().unwrap_or(0);
        Ok(Self {
            s0: chain.total_action(),
            classes,
            truncation: Truncation::Resummed {
                amp_threshold,
                max_degree,
            },
        })
    }

    /// Classes built from an explicit list of primitive orbits and their
    /// first `rep_max` repetitions.
    pub fn from_orbits(chain: &ChainSpec, orbits: &[PeriodicOrbit], amp_threshold: f64, rep_max: u32) -> Result<Self> {
        if rep_max == 0 {
            return Err(Error::InvalidParameter("rep_max must be positive".into()));
        }
        let n = chain.n_bonds();
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
        let mut tail = 0.0f64;
        for o in orbits.iter().filter(|o| o.primitive) {
            let m = o.round_trips(n);
            let a = o.amplitude;
            for nu in 1..=rep_max {
                let w = a.powi(nu as i32) / nu as f64;
                if w == 0.0 {
                    break;
                }
                let key: Vec<u32> = m.iter().map(|c| c * nu).collect();
                *acc.entry(key).or_insert(0.0) += w;
            }
            let next = rep_max as f64 + 1.0;
            let q = a.abs();
            tail = tail.max(if q < 1.0 {
                q.powf(next) / (next * (1.0 - q))
            } else {
                f64::INFINITY
            });
        }
        let mut classes: Vec<ActionClass> = acc
            .into_iter()
            .map(|(m, w)| ActionClass {
                action: class_action(chain, &m),
                round_trips: m,
                weight: w,
            })
            .filter(|c| c.weight != 0.0 && c.strength() >= amp_threshold)
            .collect();
        sort_classes(&mut classes);
        Ok(Self {
            s0: chain.total_action(),
            classes,
            truncation: Truncation::Enumerated {
                amp_threshold,
                max_code_length: orbits.iter().map(PeriodicOrbit::len).max().unwrap_or(0),
                rep_max,
                repetition_tail: tail,
            },
        })
    }

    /// Classes up to `max_degree` round trips.
    pub fn up_to_degree(&self, max_degree: u32) -> Self {
        Self {
            s0: self.s0,
            classes: self.classes.iter().filter(|c| c.degree() <= max_degree).cloned().collect(),
            truncation: self.truncation,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn max_action(&self) -> f64 {
        self.classes.iter().map(|c| c.action).fold(0.0, f64::max)
    }

    /// Oscillating part of the staircase, `N(k) - Nbar(k)`.
    pub fn staircase_fluctuation(&self, k: f64) -> f64 {
        self.classes.iter().map(|c| c.staircase_term(k)).sum()
    }
}

fn sort_classes(classes: &mut [ActionClass]) {
    classes.sort_by(|a, b| a.action.total_cmp(&b.action).then_with(|| a.round_trips.cmp(&b.round_trips)));
}

/// `rho(k) = S0 / pi + (1 / pi) sum_m S(m) W(m) cos(S(m) k)`.
pub fn density_of_states(sum: &OrbitSum, k: f64) -> f64 {
    sum.s0 / PI + sum.classes.iter().map(|c| c.density_term(k)).sum::<f64>()
}

/// Density convolved with a normalized Gaussian of width `sigma`.
pub fn density_of_states_smoothed(sum: &OrbitSum, k: f64, sigma: f64) -> f64 {
    sum.s0 / PI
        + sum
            .classes
            .iter()
            .map(|c| c.density_term(k) * (-0.5 * (sigma * c.action).powi(2)).exp())
            .sum::<f64>()
}

pub fn density_grid(sum: &OrbitSum, ks: &[f64]) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ks.par_iter().map(|&k| density_of_states(sum, k)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ks.iter().map(|&k| density_of_states(sum, k)).collect()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of `g` over `[a, b]`.
pub fn integrate(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        total += rule.iter().map(|&(x, w)| w * g(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h;
    }
    total
}

/// Individual eigenvalues from a truncated class sum.
#[derive(Debug, Clone)]
pub struct EigenvalueSeries<'a> {
    sum: &'a OrbitSum,
    grid: SeparatorGrid,
}

impl<'a> EigenvalueSeries<'a> {
    /// Refuses chains whose spectral function is not certified regular.
    pub fn new(form: &SpectralForm, sum: &'a OrbitSum) -> Result<Self> {
        if !form.is_regular() {
            return Err(Error::NotRegular(form.margin));
        }
        Ok(Self {
            sum,
            grid: SeparatorGrid::new(form),
        })
    }

    /// `k_n = pi n / S0 - (2 / pi) sum W / S sin(pi S / 2 S0) sin(pi S n / S0)`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let s0 = self.sum.s0;
        PI * n as f64 / s0 + self.sum.classes.iter().map(|c| c.series_term(s0, n)).sum::<f64>()
    }

    pub fn eigenvalues(&self, lo: usize, hi: usize) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (lo..=hi).into_par_iter().map(|n| self.eigenvalue(n)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (lo..=hi).map(|n| self.eigenvalue(n)).collect()
        }
    }

    /// `integral of k rho(k)` over the `n`-th separator interval, by quadrature.
    pub fn eigenvalue_integral(&self, n: usize) -> f64 {
        let (a, b) = self.grid.interval(n);
        let rule = gauss_legendre(16);
        let panels = ((self.sum.max_action() * (b - a) / PI).ceil() as usize).max(1) + 1;
        integrate(|k| k * density_of_states(self.sum, k), a, b, panels, &rule)
    }

    pub fn separators(&self) -> SeparatorGrid {
        self.grid
    }
}

/// Single-eigenvalue convenience wrapper around [`EigenvalueSeries`].
pub fn eigenvalue_series(form: &SpectralForm, sum: &OrbitSum, n: usize) -> Result<f64> {
    Ok(EigenvalueSeries::new(form, sum)?.eigenvalue(n))
}
