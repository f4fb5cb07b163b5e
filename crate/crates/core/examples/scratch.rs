use chain_spectra::spectrum::SeparatorGrid;
use chain_spectra::trace::*;
use chain_spectra::*;
fn main() {
    for (v, l) in [(vec![0.0, 1.0, 2.3, 3.1], vec![0.0, 0.19, 0.05]), (vec![0.0, 1.0, 2.7], vec![0.0, 0.19])] {
        let c = ChainSpec::new(v, &l).unwrap();
        let form = expand_determinant(&c).unwrap();
        let grid = SeparatorGrid::new(&form);
        let full = OrbitSum::exact_to_degree(&c, 64).unwrap();
        for d in [2, 4, 8, 16, 32, 64] {
            let sum = full.up_to_degree(d);
            let mut tot: f64 = 0.0;
            for n in 1..=20 {
                let (a, b) = grid.interval(n);
                tot = tot.max((sum.staircase_fluctuation(b) - sum.staircase_fluctuation(a)).abs());
            }
            println!("deg {d} classes {} max|dev| {tot:e}", sum.len());
        }
    }
}
