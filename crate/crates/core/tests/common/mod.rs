#![allow(dead_code)]

use chain_spectra::ChainSpec;
use rand::Rng;

pub fn random_chain(rng: &mut impl Rng, bonds: usize, max_lambda: f64) -> ChainSpec {
    let mut vertices = vec![0.0];
    for _ in 0..bonds {
        let last = *vertices.last().unwrap();
        vertices.push(last + rng.random_range(0.3..1.5));
    }
    let lambdas: Vec<f64> = (0..bonds).map(|_| rng.random_range(0.0..max_lambda)).collect();
    ChainSpec::new(vertices, &lambdas).unwrap()
}

pub fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let mut c = vec![vec![0i128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

/// Primitive cycle counts per length from traces of adjacency powers.
pub fn primitive_counts_from_traces(adj: &[Vec<u64>], max_len: usize) -> Vec<i128> {
    let a: Vec<Vec<i128>> = adj.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut traces = vec![0i128; max_len + 1];
    let mut power = a.clone();
    for t in traces.iter_mut().skip(1) {
        *t = (0..a.len()).map(|i| power[i][i]).sum();
        power = mat_mul(&power, &a);
    }
    let mut counts = vec![0i128; max_len + 1];
    for l in 1..=max_len {
        let s: i128 = (1..=l)
            .filter(|d| l % d == 0)
            .map(|d| mobius(l / d) as i128 * traces[d])
            .sum();
        assert_eq!(s % l as i128, 0);
        counts[l] = s / l as i128;
    }
    counts
}

pub fn spectral_radius(adj: &[Vec<u64>]) -> f64 {
    let n = adj.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| adj[i][j] as f64);
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}
