//! Primitive periodic orbits of a chain and their amplitudes.
//!
//! A classical path is a sequence of directed bonds. At an interior vertex it
//! either transmits (factor `t_i`) or reflects (factor `-r_i` when arriving
//! from the left, `+r_i` from the right); Dirichlet walls reflect with `-1`.
//! These are the entries of the flux-normalized vertex scattering matrix, so
//! `det(1 - U(k))` reproduces the spectral determinant.

use std::fmt;

use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};

/// Longest code length accepted by [`enumerate_orbits`].
pub const MAX_CODE_LENGTH: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    Right,
    Left,
}

/// Bond `bond` (zero-based) traversed in `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DirectedBond {
    pub bond: usize,
    pub direction: Direction,
}

impl DirectedBond {
    pub fn new(bond: usize, direction: Direction) -> Self {
        Self { bond, direction }
    }

    /// Dense index `2 * bond + (direction == Left)`.
    pub fn index(&self) -> usize {
        2 * self.bond + usize::from(self.direction == Direction::Left)
    }

    pub fn from_index(i: usize) -> Self {
        let direction = if i.is_multiple_of(2) {
            Direction::Right
        } else {
            Direction::Left
        };
        Self::new(i / 2, direction)
    }
}

impl fmt::Display for DirectedBond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Right => 'R',
            Direction::Left => 'L',
        };
        write!(f, "{}{}", self.bond + 1, d)
    }
}

/// What happens at the vertex ending a directed bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Event {
    /// Reflection off a Dirichlet wall.
    Wall,
    /// Reflection off interior vertex `vertex` (1-based).
    Reflect { vertex: usize },
    /// Transmission through interior vertex `vertex` (1-based).
    Transmit { vertex: usize },
}

/// One allowed continuation of a directed bond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub to: DirectedBond,
    pub amplitude: f64,
    pub event: Event,
}

/// The continuations of `from`: one at a wall, two at an interior vertex.
pub fn transitions(chain: &ChainSpec, from: DirectedBond) -> Vec<Transition> {
    let n = chain.n_bonds();
    let i = from.bond;
    match from.direction {
        Direction::Right if i + 1 == n => vec![Transition {
            to: DirectedBond::new(i, Direction::Left),
            amplitude: -1.0,
            event: Event::Wall,
        }],
        Direction::Right => {
            let c = chain.vertex_coefficients(i + 1).expect("interior vertex");
            vec![
                Transition {
                    to: DirectedBond::new(i + 1, Direction::Right),
                    amplitude: c.t,
                    event: Event::Transmit { vertex: i + 1 },
                },
                Transition {
                    to: DirectedBond::new(i, Direction::Left),
                    amplitude: -c.r,
                    event: Event::Reflect { vertex: i + 1 },
                },
            ]
        }
        Direction::Left if i == 0 => vec![Transition {
            to: DirectedBond::new(0, Direction::Right),
            amplitude: -1.0,
            event: Event::Wall,
        }],
        Direction::Left => {
            let c = chain.vertex_coefficients(i).expect("interior vertex");
            vec![
                Transition {
                    to: DirectedBond::new(i - 1, Direction::Left),
                    amplitude: c.t,
                    event: Event::Transmit { vertex: i },
                },
                Transition {
                    to: DirectedBond::new(i, Direction::Right),
                    amplitude: c.r,
                    event: Event::Reflect { vertex: i },
                },
            ]
        }
    }
}

/// 0/1 adjacency of the `2N` directed bonds, indexed by [`DirectedBond::index`].
pub fn adjacency(chain: &ChainSpec) -> Vec<Vec<u64>> {
    let m = 2 * chain.n_bonds();
    let mut a = vec![vec![0; m]; m];
    for (i, row) in a.iter_mut().enumerate() {
        for t in transitions(chain, DirectedBond::from_index(i)) {
            row[t.to.index()] = 1;
        }
    }
    a
}

/// Scattering probabilities `|amplitude|^2` between directed bonds.
pub fn transition_probabilities(chain: &ChainSpec) -> Vec<Vec<f64>> {
    let m = 2 * chain.n_bonds();
    let mut p = vec![vec![0.0; m]; m];
    for (i, row) in p.iter_mut().enumerate() {
        for t in transitions(chain, DirectedBond::from_index(i)) {
            row[t.to.index()] += t.amplitude * t.amplitude;
        }
    }
    p
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    /// Lexicographically minimal rotation of the directed-bond cycle.
    pub code: Vec<DirectedBond>,
    pub action: f64,
    pub amplitude: f64,
    pub primitive: bool,
}

impl PeriodicOrbit {
    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    /// Round trips over each bond: half the number of traversals.
    pub fn round_trips(&self, n_bonds: usize) -> Vec<u32> {
        let mut m = vec![0u32; n_bonds];
        for d in &self.code {
            m[d.bond] += 1;
        }
        m.iter().map(|c| c / 2).collect()
    }

    /// The `nu`-fold traversal of this orbit.
    pub fn repeat(&self, nu: usize) -> Self {
        Self {
            code: self.code.repeat(nu),
            action: self.action * nu as f64,
            amplitude: self.amplitude.powi(nu as i32),
            primitive: nu == 1 && self.primitive,
        }
    }

    pub fn code_string(&self) -> String {
        self.code
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// Product of vertex factors around the cyclic `code`.
pub fn orbit_amplitude(chain: &ChainSpec, code: &[DirectedBond]) -> Result<f64> {
    if code.is_empty() {
        return Err(Error::EmptyOrbit);
    }
    let mut amp = 1.0;
    for (pos, from) in code.iter().enumerate() {
        if from.bond >= chain.n_bonds() {
            return Err(Error::IllegalTransition(pos));
        }
        let to = code[(pos + 1) % code.len()];
        let t = transitions(chain, *from)
            .into_iter()
            .find(|t| t.to == to)
            .ok_or(Error::IllegalTransition(pos))?;
        amp *= t.amplitude;
    }
    Ok(amp)
}

fn orbit_action(chain: &ChainSpec, code: &[DirectedBond]) -> f64 {
    code.iter().map(|d| chain.bond_actions()[d.bond]).sum()
}

/// All primitive periodic orbits with code length `<= max_bonds`.
///
/// Codes are generated as constrained Lyndon words (Fredricksen-Kessler-Maiorana
/// prenecklace recursion restricted to legal transitions), so each orbit
/// appears once, in canonical rotation. Time-reversed partners are distinct.
pub fn enumerate_orbits(chain: &ChainSpec, max_bonds: usize) -> Result<Vec<PeriodicOrbit>> {
    if max_bonds > MAX_CODE_LENGTH {
        return Err(Error::OrbitCapExceeded {
            got: max_bonds,
            cap: MAX_CODE_LENGTH,
        });
    }
    let states = 2 * chain.n_bonds();
    let succ: Vec<Vec<usize>> = (0..states)
        .map(|i| {
            let mut s: Vec<usize> = transitions(chain, DirectedBond::from_index(i))
                .iter()
                .map(|t| t.to.index())
                .collect();
            s.sort_unstable();
            s
        })
        .collect();

    struct Walk<'a> {
        succ: &'a [Vec<usize>],
        max: usize,
        word: Vec<usize>,
        found: Vec<Vec<usize>>,
    }

    impl Walk<'_> {
        fn visit(&mut self, period: usize) {
            let t = self.word.len();
            let last = self.word[t - 1];
            if period == t && self.succ[last].contains(&self.word[0]) {
                self.found.push(self.word.clone());
            }
            if t == self.max {
                return;
            }
            let floor = self.word[t - period];
            for j in 0..self.succ[last].len() {
                let next = self.succ[last][j];
                if next < floor {
                    continue;
                }
                self.word.push(next);
                self.visit(if next == floor { period } else { t + 1 });
                self.word.pop();
            }
        }
    }

    let mut walk = Walk {
        succ: &succ,
        max: max_bonds,
        word: Vec::with_capacity(max_bonds),
        found: Vec::new(),
    };
    if max_bonds > 0 {
        for start in 0..states {
            walk.word.push(start);
            walk.visit(1);
            walk.word.pop();
        }
    }
    let mut orbits = walk
        .found
        .into_iter()
        .map(|w| {
            let code: Vec<DirectedBond> = w.into_iter().map(DirectedBond::from_index).collect();
            let amplitude = orbit_amplitude(chain, &code)?;
            Ok(PeriodicOrbit {
                action: orbit_action(chain, &code),
                amplitude,
                code,
                primitive: true,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    orbits.sort_by(|a, b| a.code.len().cmp(&b.code.len()).then(a.code.cmp(&b.code)));
    Ok(orbits)
}

/// Primitive orbit counts per code length, index = length.
pub fn count_by_length(orbits: &[PeriodicOrbit], max_len: usize) -> Vec<u64> {
    let mut counts = vec![0u64; max_len + 1];
    for o in orbits {
        if o.len() <= max_len {
            counts[o.len()] += 1;
        }
    }
    counts
}

/// Least-squares fit of `ln(n N_n) / n = tau + c / n` over the given lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub tau: f64,
    pub offset: f64,
}

pub fn fit_proliferation(counts: &[u64], lengths: impl IntoIterator<Item = usize>) -> GrowthFit {
    let pts: Vec<(f64, f64)> = lengths
        .into_iter()
        .filter(|&n| n < counts.len() && counts[n] > 0)
        .map(|n| {
            let nf = n as f64;
            (1.0 / nf, (nf * counts[n] as f64).ln() / nf)
        })
        .collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let offset = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    GrowthFit {
        tau: (sy - offset * sx) / m,
        offset,
    }
}
