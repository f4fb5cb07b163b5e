//! Classical stochastic scattering on the directed bonds of a chain.
//!
//! A walker hops from vertex to vertex. At an interior vertex it reflects
//! with probability `r^2` and transmits with `t^2`; walls always reflect.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::orbits::{transitions, DirectedBond, Direction, Event};

/// Longest return lag tracked by [`simulate`].
pub const MAX_RETURN_LAG: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexStats {
    /// 1-based interior vertex index.
    pub vertex: usize,
    pub encounters: u64,
    pub reflections: u64,
    /// `r^2`.
    pub expected: f64,
    /// `[previous event][current event]`, 0 = transmit, 1 = reflect. The
    /// previous event is the walker's last interior scattering anywhere.
    pub memory: [[u64; 2]; 2],
}

impl VertexStats {
    pub fn frequency(&self) -> f64 {
        if self.encounters == 0 {
            0.0
        } else {
            self.reflections as f64 / self.encounters as f64
        }
    }

    /// Binomial standard deviation of the frequency around `expected`.
    pub fn sigma(&self) -> f64 {
        (self.expected * (1.0 - self.expected) / self.encounters.max(1) as f64).sqrt()
    }

    /// Pearson statistic of the 2x2 memory table (one degree of freedom).
    pub fn chi_square(&self) -> f64 {
        let m = &self.memory;
        let total: u64 = m.iter().flatten().sum();
        if total == 0 {
            return 0.0;
        }
        let row = [m[0][0] + m[0][1], m[1][0] + m[1][1]];
        let col = [m[0][0] + m[1][0], m[0][1] + m[1][1]];
        let mut chi = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let e = row[i] as f64 * col[j] as f64 / total as f64;
                if e > 0.0 {
                    chi += (m[i][j] as f64 - e).powi(2) / e;
                }
            }
        }
        chi
    }

    /// Independence holds at 3 sigma: chi-square with one degree of freedom
    /// is the square of a standard normal.
    pub fn memoryless(&self) -> bool {
        self.chi_square() < 9.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationStats {
    pub steps: u64,
    pub seed: u64,
    pub trials: u64,
    pub vertices: Vec<VertexStats>,
    /// Hops spent on each directed bond, indexed by [`DirectedBond::index`].
    pub occupation: Vec<u64>,
    /// `returns[L - 1]`: times the walker was back on the same directed bond
    /// `L` hops later.
    pub returns: Vec<u64>,
}

impl SimulationStats {
    fn zeroed(chain: &ChainSpec, steps: u64, seed: u64, trials: u64) -> Self {
        let vertices = chain
            .interior_coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| VertexStats {
                vertex: i + 1,
                encounters: 0,
                reflections: 0,
                expected: c.r * c.r,
                memory: [[0; 2]; 2],
            })
            .collect();
        Self {
            steps,
            seed,
            trials,
            vertices,
            occupation: vec![0; 2 * chain.n_bonds()],
            returns: vec![0; MAX_RETURN_LAG],
        }
    }

    fn absorb(&mut self, other: &Self) {
        for (a, b) in self.vertices.iter_mut().zip(&other.vertices) {
            a.encounters += b.encounters;
            a.reflections += b.reflections;
            for i in 0..2 {
                for j in 0..2 {
                    a.memory[i][j] += b.memory[i][j];
                }
            }
        }
        for (a, b) in self.occupation.iter_mut().zip(&other.occupation) {
            *a += b;
        }
        for (a, b) in self.returns.iter_mut().zip(&other.returns) {
            *a += b;
        }
    }

    /// Occupation fractions per directed bond.
    pub fn occupation_fractions(&self) -> Vec<f64> {
        let total: u64 = self.occupation.iter().sum();
        self.occupation.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
    }
}

fn run(chain: &ChainSpec, steps: u64, mut rng: ChaCha8Rng, stats: &mut SimulationStats) {
    let mut state = DirectedBond::new(0, Direction::Right);
    let mut previous: Option<usize> = None;
    let mut history = [usize::MAX; MAX_RETURN_LAG];
    let tables: Vec<_> = (0..2 * chain.n_bonds())
        .map(|i| transitions(chain, DirectedBond::from_index(i)))
        .collect();
    for step in 0..steps {
        let idx = state.index();
        stats.occupation[idx] += 1;
        for (lag, &past) in history.iter().enumerate() {
            if past == idx && (lag as u64) < step {
                stats.returns[lag] += 1;
            }
        }
        history.rotate_right(1);
        history[0] = idx;

        let options = &tables[idx];
        let next = match options[0].event {
            Event::Wall => options[0],
            Event::Transmit { vertex } | Event::Reflect { vertex } => {
                let reflect_p = stats.vertices[vertex - 1].expected;
                let reflect = rng.random::<f64>() < reflect_p;
                let v = &mut stats.vertices[vertex - 1];
                v.encounters += 1;
                let current = usize::from(reflect);
                v.reflections += current as u64;
                if let Some(p) = previous {
                    v.memory[p][current] += 1;
                }
                previous = Some(current);
                if reflect {
                    options[1]
                } else {
                    options[0]
                }
            }
        };
        state = next.to;
    }
}

/// One walk of `steps` hops, starting on bond 1 moving right.
pub fn simulate(chain: &ChainSpec, steps: u64, seed: u64) -> Result<SimulationStats> {
    simulate_trials(chain, steps, seed, 1)
}

/// `trials` independent walks merged; trial `i` uses stream `i` of the seed.
pub fn simulate_trials(chain: &ChainSpec, steps: u64, seed: u64, trials: u64) -> Result<SimulationStats> {
    if steps == 0 || trials == 0 {
        return Err(Error::InvalidParameter("steps and trials must be positive".into()));
    }
    let one = |trial: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut s = SimulationStats::zeroed(chain, steps, seed, 1);
        run(chain, steps, rng, &mut s);
        s
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<SimulationStats> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<SimulationStats> = (0..trials).map(one).collect();

    let mut total = SimulationStats::zeroed(chain, steps, seed, trials);
    for p in &parts {
        total.absorb(p);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_contrast_never_reflects() {
        let c = ChainSpec::new(vec![0.0, 1.0, 2.5, 3.0], &[0.3, 0.3, 0.3]).unwrap();
        let s = simulate(&c, 20_000, 7).unwrap();
        for v in &s.vertices {
            assert!(v.encounters > 0);
            assert_eq!(v.reflections, 0);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let c = ChainSpec::new(vec![0.0, 1.0, 2.0], &[0.0, 0.75]).unwrap();
        let a = simulate_trials(&c, 5_000, 42, 4).unwrap();
        let b = simulate_trials(&c, 5_000, 42, 4).unwrap();
        assert_eq!(a, b);
        let d = simulate_trials(&c, 5_000, 43, 4).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn walls_and_counts_are_consistent() {
        let c = ChainSpec::new(vec![0.0, 1.0, 2.0], &[0.0, 0.75]).unwrap();
        let s = simulate(&c, 10_000, 1).unwrap();
        assert_eq!(s.occupation.iter().sum::<u64>(), 10_000);
        // every hop off bond 1 moving right or bond 2 moving left meets the middle vertex
        let middle = s.occupation[0] + s.occupation[3];
        assert_eq!(s.vertices[0].encounters, middle);
        // a lag-2 return needs a reflection or a wall bounce pair, never impossible
        assert!(s.returns[1] > 0);
        assert_eq!(s.returns[0], 0);
    }

    #[test]
    fn rejects_empty_runs() {
        let c = ChainSpec::new(vec![0.0, 1.0], &[0.0]).unwrap();
        assert!(simulate(&c, 0, 1).is_err());
        assert!(simulate_trials(&c, 10, 1, 0).is_err());
    }
}
