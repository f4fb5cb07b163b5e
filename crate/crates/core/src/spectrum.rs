//! Weyl average, separators and bracketed root finding on the real axis.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::SpectralForm;

/// Largest interval index accepted by the root finder.
pub const MAX_INDEX: usize = 1_000_000;
/// Panels used to scan intervals that are not certified to hold one root.
pub const SCAN_PANELS: usize = 64;
const MAX_BISECTIONS: u32 = 200;
const MERGE_DISTANCE: f64 = 1e-9;

/// `N(0)` offset of the Weyl average: `gamma0 - 1`.
pub fn weyl_offset(form: &SpectralForm) -> f64 {
    form.gamma0 - 1.0
}

/// Average spectral staircase `S0 k / pi + Nbar(0)`.
pub fn weyl_average(form: &SpectralForm, k: f64) -> f64 {
    form.s0 * k / PI + weyl_offset(form)
}

/// Periodic points where the Weyl average crosses integer values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatorGrid {
    pub offset: f64,
    pub spacing: f64,
}

impl SeparatorGrid {
    pub fn new(form: &SpectralForm) -> Self {
        Self {
            offset: weyl_offset(form),
            spacing: PI / form.s0,
        }
    }

    /// `k_hat_n = pi (n - Nbar(0)) / S0`.
    pub fn at(&self, n: i64) -> f64 {
        self.spacing * (n as f64 - self.offset)
    }

    /// Interval `I_n = (k_hat_{n-1}, k_hat_n)`.
    pub fn interval(&self, n: usize) -> (f64, f64) {
        (self.at(n as i64 - 1), self.at(n as i64))
    }
}

pub fn separators(form: &SpectralForm, n: i64) -> f64 {
    SeparatorGrid::new(form).at(n)
}

pub fn spectral_function(form: &SpectralForm, k: f64) -> f64 {
    form.spectral_function(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootRecord {
    /// Index of the separator interval holding the root.
    pub n: usize,
    pub bracket: (f64, f64),
    pub root: f64,
    pub residual: f64,
    pub iterations: u32,
    /// 2 for a (numerically) double root, otherwise 1.
    pub multiplicity: u32,
}

/// Roots found in one separator interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalScan {
    pub n: usize,
    pub bracket: (f64, f64),
    pub roots: Vec<RootRecord>,
}

impl IntervalScan {
    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity as usize).sum()
    }
}

fn check_range(lo: usize, hi: usize) -> Result<()> {
    if lo == 0 || lo > hi || hi > MAX_INDEX {
        return Err(Error::BadIndexRange {
            lo,
            hi,
            max: MAX_INDEX,
        });
    }
    Ok(())
}

/// Bisects `f` on `[a, b]` (signs differ) down to adjacent floats.
fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64, u32)> {
    let mut fa = f(a);
    let mut fb = f(b);
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        iterations += 1;
        let fm = f(m);
        if fm == 0.0 {
            return Ok((m, 0.0, iterations));
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        // below the requested width, keep going only while it helps the residual
        if b - a <= tol && fa.abs().min(fb.abs()) < 1e-13 {
            break;
        }
    }
    if iterations >= MAX_BISECTIONS {
        return Err(Error::NoConvergence(MAX_BISECTIONS as usize));
    }
    Ok(if fa.abs() <= fb.abs() {
        (a, fa.abs(), iterations)
    } else {
        (b, fb.abs(), iterations)
    })
}

/// Golden-section minimum of `g` on `[a, b]`.
fn golden_min(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

fn scan_interval(form: &SpectralForm, grid: &SeparatorGrid, n: usize) -> Result<IntervalScan> {
    let f = |k: f64| form.spectral_function(k);
    let bracket = grid.interval(n);
    let tol = 1e-12 * grid.spacing;
    let (lo, hi) = bracket;
    let record = |root: f64, residual: f64, iterations: u32| RootRecord {
        n,
        bracket,
        root,
        residual,
        iterations,
        multiplicity: 1,
    };

    if form.is_regular() && (f(lo) < 0.0) != (f(hi) < 0.0) {
        let (root, residual, it) = bisect(&f, lo, hi, tol)?;
        return Ok(IntervalScan {
            n,
            bracket,
            roots: vec![record(root, residual, it)],
        });
    }

    let width = (hi - lo) / SCAN_PANELS as f64;
    let nodes: Vec<f64> = (0..=SCAN_PANELS).map(|i| lo + width * i as f64).collect();
    // values at rounding level are treated as exact zeros
    let noise = 1e-13 * (1.0 + form.pairs.iter().map(|p| p.weight()).sum::<f64>());
    let values: Vec<f64> = nodes
        .iter()
        .map(|&k| f(k))
        .map(|v| if v.abs() < noise { 0.0 } else { v })
        .collect();
    let mut roots: Vec<RootRecord> = Vec::new();
    for i in 0..SCAN_PANELS {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            if i > 0 {
                let mut r = record(a, f(a).abs(), 0);
                if (values[i - 1] < 0.0) == (fb < 0.0) {
                    r.multiplicity = 2;
                }
                roots.push(r);
            }
            continue;
        }
        if fb == 0.0 {
            continue;
        }
        if (fa < 0.0) != (fb < 0.0) {
            let (root, residual, it) = bisect(&f, a, b, tol)?;
            roots.push(record(root, residual, it));
            continue;
        }
        // Same sign at both ends: look for a dip through (or onto) zero.
        let sign = if fa < 0.0 { -1.0 } else { 1.0 };
        let (xm, gm) = golden_min(&|k: f64| sign * f(k), a, b);
        if gm < 0.0 {
            let (r1, res1, it1) = bisect(&f, a, xm, tol)?;
            let (r2, res2, it2) = bisect(&f, xm, b, tol)?;
            roots.push(record(r1, res1, it1));
            roots.push(record(r2, res2, it2));
        } else if gm.abs() < 1e-12 {
            let mut r = record(xm, gm.abs(), 80);
            r.multiplicity = 2;
            roots.push(r);
        }
    }
    // merge near-coincident roots into one double root
    let mut merged: Vec<RootRecord> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(m) if r.root - m.root < MERGE_DISTANCE => {
                m.multiplicity = m.multiplicity.max(r.multiplicity).max(2);
                if r.residual < m.residual {
                    m.root = r.root;
                    m.residual = r.residual;
                }
            }
            _ => merged.push(r),
        }
    }
    Ok(IntervalScan {
        n,
        bracket,
        roots: merged,
    })
}

/// Scans separator intervals `lo..=hi`, in index order.
pub fn scan_intervals(form: &SpectralForm, lo: usize, hi: usize) -> Result<Vec<IntervalScan>> {
    check_range(lo, hi)?;
    let grid = SeparatorGrid::new(form);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (lo..=hi)
            .into_par_iter()
            .map(|n| scan_interval(form, &grid, n))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (lo..=hi).map(|n| scan_interval(form, &grid, n)).collect()
    }
}

/// All roots in separator intervals `lo..=hi`, sorted by momentum.
pub fn find_roots(form: &SpectralForm, lo: usize, hi: usize) -> Result<Vec<RootRecord>> {
    Ok(scan_intervals(form, lo, hi)?
        .into_iter()
        .flat_map(|s| s.roots)
        .collect())
}

/// Spectral staircase: number of roots (with multiplicity) at or below `k`.
pub fn staircase(roots: &[RootRecord], k: f64) -> usize {
    roots
        .iter()
        .filter(|r| r.root <= k)
        .map(|r| r.multiplicity as usize)
        .sum()
}

/// Roots-per-interval statistics over a range of separator intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalClassification {
    pub lo: usize,
    pub hi: usize,
    pub margin: f64,
    /// Root count of each interval, starting at `lo`.
    pub counts: Vec<usize>,
    /// Number of intervals holding a given number of roots.
    pub histogram: BTreeMap<usize, usize>,
    pub total_roots: usize,
    /// Roots expected from the Weyl average over the range.
    pub weyl_count: usize,
}

impl IntervalClassification {
    pub fn all_single(&self) -> bool {
        self.counts.iter().all(|&c| c == 1)
    }
}

pub fn classify_intervals(form: &SpectralForm, lo: usize, hi: usize) -> Result<IntervalClassification> {
    let scans = scan_intervals(form, lo, hi)?;
    let counts: Vec<usize> = scans.iter().map(IntervalScan::count).collect();
    let mut histogram = BTreeMap::new();
    for &c in &counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    Ok(IntervalClassification {
        lo,
        hi,
        margin: form.margin,
        total_roots: counts.iter().sum(),
        counts,
        histogram,
        weyl_count: hi - lo + 1,
    })
}
