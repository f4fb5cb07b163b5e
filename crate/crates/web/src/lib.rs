//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes the chain config as JSON text and returns JSON text;
//! errors come back as a thrown string.

use chain_spectra::spectrum::SeparatorGrid;
use chain_spectra::{expand_determinant, find_roots, ChainConfig, ChainSpec, EigenvalueSeries, OrbitSum};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Most grid points a single call will sample.
pub const MAX_POINTS: usize = 20_000;
/// Most eigenvalues a single call will compute.
pub const MAX_N: usize = 2_000;

fn chain(config: &str) -> Result<ChainSpec, String> {
    ChainConfig::from_json(config)
        .and_then(|c| c.build())
        .map_err(|e| e.to_string())
}

fn grid(kmax: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(kmax > 0.0 && kmax.is_finite()) {
        return Err(format!("kmax must be positive, got {kmax}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    Ok((0..points).map(|i| kmax * i as f64 / (points - 1) as f64).collect())
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct SpectralPlot {
    pub s0: f64,
    pub margin: f64,
    pub k: Vec<f64>,
    pub f: Vec<f64>,
    pub separators: Vec<f64>,
    pub roots: Vec<f64>,
    pub counts: Vec<usize>,
}

/// `f(k) = cos(S0 k - pi gamma0) - Phi(k)` on `[0, kmax]` with its roots and
/// the separators in that range.
pub fn spectral_plot(config: &str, kmax: f64, points: usize) -> Result<SpectralPlot, String> {
    let c = chain(config)?;
    let ks = grid(kmax, points)?;
    let form = expand_determinant(&c).map_err(|e| e.to_string())?;
    let sep = SeparatorGrid::new(&form);
    let nmax = ((kmax / sep.spacing + sep.offset).floor() as usize).min(MAX_N);
    let separators: Vec<f64> = (0..=nmax as i64).map(|n| sep.at(n)).filter(|&k| k <= kmax).collect();
    let (roots, counts) = if nmax >= 1 {
        let scans = chain_spectra::spectrum::scan_intervals(&form, 1, nmax).map_err(|e| e.to_string())?;
        (
            scans.iter().flat_map(|s| s.roots.iter().map(|r| r.root)).collect(),
            scans.iter().map(|s| s.count()).collect(),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(SpectralPlot {
        s0: form.s0,
        margin: form.margin,
        f: ks.iter().map(|&k| form.spectral_function(k)).collect(),
        k: ks,
        separators,
        roots,
        counts,
    })
}

#[derive(Serialize)]
pub struct RegularityPlot {
    pub margin: f64,
    pub coefficient_sum: f64,
    pub max_abs_phi: f64,
    pub k: Vec<f64>,
    pub phi: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
}

/// `Phi(k)` against the band `|Phi| <= sum |a_i|`.
pub fn regularity_plot(config: &str, kmax: f64, points: usize) -> Result<RegularityPlot, String> {
    let c = chain(config)?;
    let ks = grid(kmax, points)?;
    let form = expand_determinant(&c).map_err(|e| e.to_string())?;
    let phi: Vec<f64> = ks.iter().map(|&k| form.characteristic(k)).collect();
    Ok(RegularityPlot {
        margin: form.margin,
        coefficient_sum: 1.0 - form.margin,
        max_abs_phi: phi.iter().fold(0.0, |m, p| m.max(p.abs())),
        pairs: form.pairs.iter().map(|p| (p.action, p.amplitude)).collect(),
        k: ks,
        phi,
    })
}

#[derive(Serialize)]
pub struct SeriesPlot {
    pub unit: f64,
    pub classes: usize,
    pub n: Vec<usize>,
    pub k_series: Vec<f64>,
    pub k_root: Vec<f64>,
    pub error: Vec<f64>,
}

/// Periodic-orbit eigenvalues against the root finder for `n = 1..=nmax`.
pub fn series_errors(config: &str, nmax: usize, amp_threshold: f64) -> Result<SeriesPlot, String> {
    let c = chain(config)?;
    if !(1..=MAX_N).contains(&nmax) {
        return Err(format!("nmax must lie in 1..={MAX_N}"));
    }
    if !(1e-7..1.0).contains(&amp_threshold) {
        return Err("amplitude threshold must lie in [1e-7, 1)".into());
    }
    let form = expand_determinant(&c).map_err(|e| e.to_string())?;
    let sum = OrbitSum::resummed(&c, amp_threshold).map_err(|e| e.to_string())?;
    let series = EigenvalueSeries::new(&form, &sum).map_err(|e| e.to_string())?;
    let roots = find_roots(&form, 1, nmax).map_err(|e| e.to_string())?;
    let k_series = series.eigenvalues(1, nmax);
    let k_root: Vec<f64> = roots.iter().map(|r| r.root).collect();
    Ok(SeriesPlot {
        unit: std::f64::consts::PI / form.s0,
        classes: sum.len(),
        n: (1..=nmax).collect(),
        error: k_series.iter().zip(&k_root).map(|(a, b)| (a - b).abs()).collect(),
        k_series,
        k_root,
    })
}

#[wasm_bindgen(js_name = spectralPlot)]
pub fn spectral_plot_js(config: &str, kmax: f64, points: usize) -> Result<String, JsValue> {
    spectral_plot(config, kmax, points).and_then(|p| to_json(&p)).map_err(Into::into)
}

#[wasm_bindgen(js_name = regularityPlot)]
pub fn regularity_plot_js(config: &str, kmax: f64, points: usize) -> Result<String, JsValue> {
    regularity_plot(config, kmax, points).and_then(|p| to_json(&p)).map_err(Into::into)
}

#[wasm_bindgen(js_name = seriesErrors)]
pub fn series_errors_js(config: &str, nmax: usize, amp_threshold: f64) -> Result<String, JsValue> {
    series_errors(config, nmax, amp_threshold).and_then(|p| to_json(&p)).map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BOND: &str = r#"{"vertices": [0, 1, 2], "lambdas": [0, 0.75]}"#;
    const LOW: &str = r#"{"vertices": [0, 1, 2], "lambdas": [0, 0.19]}"#;

    #[test]
    fn spectral_plot_interlaces() {
        let p = spectral_plot(TWO_BOND, 30.0, 500).unwrap();
        assert_eq!(p.k.len(), 500);
        assert!(p.counts.iter().all(|&c| c == 1));
        for (i, r) in p.roots.iter().enumerate() {
            assert!(p.separators[i] < *r && *r < p.separators[i + 1]);
        }
    }

    #[test]
    fn regularity_band_holds() {
        let p = regularity_plot(TWO_BOND, 40.0, 4000).unwrap();
        assert!((p.coefficient_sum - 1.0 / 3.0).abs() < 1e-12);
        assert!(p.max_abs_phi <= p.coefficient_sum + 1e-12);
        assert!(p.max_abs_phi > 0.33);
    }

    #[test]
    fn series_errors_are_small() {
        let p = series_errors(LOW, 30, 1e-6).unwrap();
        assert!(p.error.iter().all(|&e| e < 1e-3 * p.unit));
    }

    #[test]
    fn bad_requests_are_reported() {
        assert!(spectral_plot("{}", 10.0, 100).is_err());
        assert!(spectral_plot(TWO_BOND, -1.0, 100).is_err());
        assert!(regularity_plot(TWO_BOND, 10.0, 1).is_err());
        assert!(series_errors(r#"{"vertices": [0, 1, 2, 3], "lambdas": [0, 0.99, 0]}"#, 10, 1e-4).is_err());
        assert!(series_errors(LOW, 0, 1e-4).is_err());
    }
}
