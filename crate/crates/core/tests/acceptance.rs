//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chain_spectra::orbits::{adjacency, count_by_length};
use chain_spectra::spectrum::{weyl_average, SeparatorGrid};
use chain_spectra::trace::{gauss_legendre, integrate};
use chain_spectra::*;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn chain(v: &[f64], l: &[f64]) -> ChainSpec {
    ChainSpec::new(v.to_vec(), l).unwrap()
}

fn square_well() -> Outcome {
    let c = chain(&[0.0, PI], &[0.0]);
    let form = expand_determinant(&c).unwrap();
    let roots = find_roots(&form, 1, 1000).unwrap();
    let root_err = roots.iter().map(|r| (r.root - r.n as f64).abs()).fold(0.0, f64::max);
    let sum = OrbitSum::resummed(&c, 1e-8).unwrap();
    let series = EigenvalueSeries::new(&form, &sum).unwrap();
    let mut series_err = 0.0f64;
    let mut largest_term = 0.0f64;
    for n in 1..=1000 {
        series_err = series_err.max((series.eigenvalue(n) - n as f64).abs());
        for cl in &sum.classes {
            largest_term = largest_term.max(cl.series_term(form.s0, n).abs());
        }
    }
    outcome(
        roots.len() == 1000 && root_err < 1e-9 && series_err < 1e-9 && largest_term < 1e-12,
        format!("roots max err {root_err:.1e}, series max err {series_err:.1e}, largest orbit term {largest_term:.1e}"),
    )
}

fn two_bond_example() -> Outcome {
    let c = chain(&[0.0, 1.0, 2.0], &[0.0, 0.75]);
    let form = expand_determinant(&c).unwrap();
    let a = form.pairs.first().map_or(f64::NAN, |p| p.amplitude.abs());
    let roots = find_roots(&form, 1, 500).unwrap();
    let eq = |k: f64| (1.5 * k).sin() - (0.5 * k).sin() / 3.0;
    let residual = roots.iter().map(|r| eq(r.root).abs()).fold(0.0, f64::max);
    let cls = classify_intervals(&form, 1, 500).unwrap();
    outcome(
        form.pairs.len() == 1
            && (a - 1.0 / 3.0).abs() < 1e-12
            && (form.margin - 2.0 / 3.0).abs() < 1e-12
            && residual < 1e-12
            && cls.all_single(),
        format!(
            "pairs {}, |a1| = {a:.15}, margin = {:.15}, max residual {residual:.1e}, counts {:?}",
            form.pairs.len(),
            form.margin,
            cls.histogram
        ),
    )
}

fn symbolic_numeric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut worst_det) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let c = random_chain(&mut rng, 2 + i % 5, 0.95);
        let form = expand_determinant(&c).unwrap();
        for _ in 0..1000 {
            let k = rng.random_range(0.0..50.0);
            worst = worst.max((form.eval(k) - delta_numeric(&c, k)).norm());
            worst_det = worst_det.max((total_transfer(&c, k).det() - 1.0).norm());
        }
    }
    outcome(
        worst < 1e-10 && worst_det < 1e-12,
        format!("max |form - numeric| {worst:.1e}, max |det T - 1| {worst_det:.1e}"),
    )
}

fn orbit_counts() -> Outcome {
    let mut integer_match = true;
    let mut rates = Vec::new();
    let mut rate_ok = true;
    for c in [
        chain(&[0.0, 1.0, 2.0], &[0.0, 0.75]),
        chain(&[0.0, 1.0, 1.7, 3.0], &[0.0, 0.5, 0.2]),
    ] {
        let counts = count_by_length(&enumerate_orbits(&c, 16).unwrap(), 16);
        let oracle = primitive_counts_from_traces(&adjacency(&c), 16);
        integer_match &= (1..=16).all(|l| counts[l] as i128 == oracle[l]);
        let n = 16.0;
        let rate = (n * counts[16] as f64).ln() / n;
        let target = spectral_radius(&adjacency(&c)).ln();
        let rel = (rate - target).abs() / target;
        rate_ok &= rel < 0.05;
        rates.push(format!("{}-bond ln(16 N16)/16 = {rate:.4} vs ln rho = {target:.4} ({:.1}%)", c.n_bonds(), 100.0 * rel));
    }
    outcome(
        integer_match && rate_ok,
        format!("integer match {integer_match}; {}", rates.join("; ")),
    )
}

fn eigenvalue_series_vs_roots() -> Outcome {
    let c = chain(&[0.0, 1.0, 2.0], &[0.0, 0.19]);
    let form = expand_determinant(&c).unwrap();
    let unit = PI / form.s0;
    let roots = find_roots(&form, 1, 50).unwrap();
    let error_at = |thr: f64| {
        let sum = OrbitSum::resummed(&c, thr).unwrap();
        let s = EigenvalueSeries::new(&form, &sum).unwrap();
        roots.iter().map(|r| (s.eigenvalue(r.n) - r.root).abs()).fold(0.0, f64::max)
    };
    let coarse = error_at(1e-4);
    let fine = error_at(1e-8);

    let sum = OrbitSum::resummed(&c, 1e-4).unwrap();
    let s = EigenvalueSeries::new(&form, &sum).unwrap();
    let integral_gap = (1..=20).map(|n| (s.eigenvalue_integral(n) - s.eigenvalue(n)).abs()).fold(0.0, f64::max);
    let integral_ok = integral_gap < 1e-3 * unit;

    // per-term identity: quadrature of k rho_term minus the boundary term
    let grid = SeparatorGrid::new(&form);
    let rule = gauss_legendre(16);
    let mut term_gap = 0.0f64;
    for n in 1..=20 {
        let (a, b) = grid.interval(n);
        for cl in sum.classes.iter().filter(|cl| cl.degree() <= 8) {
            let panels = (cl.action * (b - a) / PI).ceil() as usize + 1;
            let q = integrate(|k| k * cl.density_term(k), a, b, panels, &rule);
            let boundary = b * cl.staircase_term(b) - a * cl.staircase_term(a);
            term_gap = term_gap.max((q - boundary - cl.series_term(form.s0, n)).abs());
        }
    }
    outcome(
        form.margin > 0.0 && fine < 1e-3 * unit && coarse >= 2.0 * fine && integral_ok && term_gap < 1e-12,
        format!(
            "margin {:.4}, max err/(pi/S0): {:.2e} at 1e-4, {:.2e} at 1e-8 (x{:.0}); integral gap {:.1e}; per-term gap {term_gap:.1e}",
            form.margin,
            coarse / unit,
            fine / unit,
            coarse / fine,
            integral_gap
        ),
    )
}

fn regularizability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut found = 0;
    let mut worst = 0;
    let mut ok = true;
    while found < 10 {
        let bonds = rng.random_range(3..=6);
        let c = random_chain(&mut rng, bonds, 0.99);
        if expand_determinant(&c).unwrap().margin > 0.0 {
            continue;
        }
        found += 1;
        let mut d = c;
        let mut halvings = 0;
        while expand_determinant(&d).unwrap().margin <= 0.0 && halvings <= 20 {
            d = d.compress_contrast(0.5);
            halvings += 1;
        }
        ok &= halvings <= 20;
        worst = worst.max(halvings);
    }
    outcome(ok, format!("10 irregular chains, most halvings needed {worst}"))
}

fn monte_carlo() -> Outcome {
    let c = chain(&[0.0, 1.0, 2.0], &[0.0, 0.75]);
    let a = simulate(&c, 250_000, 42).unwrap();
    let b = simulate(&c, 250_000, 42).unwrap();
    let v = &a.vertices[0];
    let p = 1.0 / 9.0;
    let sigma = (p * (1.0 - p) / v.encounters as f64).sqrt();
    let z = (v.frequency() - p) / sigma;
    outcome(
        v.encounters >= 100_000 && z.abs() < 3.0 && v.memoryless() && a == b,
        format!(
            "{} encounters, frequency {:.5} (z = {z:.2}), chi-square {:.2}, reproducible {}",
            v.encounters,
            v.frequency(),
            v.chi_square(),
            a == b
        ),
    )
}

fn piercing() -> Outcome {
    let mut chains = vec![
        chain(&[0.0, PI], &[0.0]),
        chain(&[0.0, 1.0, 2.0], &[0.0, 0.75]),
        chain(&[0.0, 1.0, 2.0], &[0.0, 0.19]),
        chain(&[0.0, 1.0, 2.3, 3.1], &[0.0, 0.19, 0.05]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    while chains.len() < 10 {
        let bonds = rng.random_range(2..=5);
        let c = random_chain(&mut rng, bonds, 0.6);
        if expand_determinant(&c).unwrap().margin > 0.0 {
            chains.push(c);
        }
    }
    let mut ok = true;
    let mut worst = 0.0f64;
    for c in &chains {
        let form = expand_determinant(c).unwrap();
        let grid = SeparatorGrid::new(&form);
        let nmax = 500;
        let roots = find_roots(&form, 1, nmax).unwrap();
        ok &= roots.len() == nmax;
        for r in &roots {
            let (lo, hi) = grid.interval(r.n);
            ok &= lo < r.root && r.root < hi && r.multiplicity == 1;
        }
        for _ in 0..10_000 {
            let k = rng.random_range(1e-6..grid.at(nmax as i64));
            let d = (staircase(&roots, k) as f64 - weyl_average(&form, k)).abs();
            worst = worst.max(d);
        }
    }
    ok &= worst < 1.0;
    outcome(ok, format!("{} regular chains, max |N - Nbar| {worst:.4}, interlacing {ok}", chains.len()))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 square-well limit", square_well, Some(Duration::from_secs(2))),
        ("2 two-bond example", two_bond_example, Some(Duration::from_secs(5))),
        ("3 symbolic-numeric equivalence", symbolic_numeric, Some(Duration::from_secs(10))),
        ("4 orbit counts and proliferation", orbit_counts, Some(Duration::from_secs(30))),
        ("5 eigenvalue series", eigenvalue_series_vs_roots, Some(Duration::from_secs(60))),
        ("6 regularizability", regularizability, None),
        ("7 Monte Carlo scattering", monte_carlo, Some(Duration::from_secs(5))),
        ("8 regular-regime piercing", piercing, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = budget.map_or(String::new(), |b| format!(" / {:.0?}", b));
        println!(
            "criterion {name}: {} [{:.2?}{budget}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
