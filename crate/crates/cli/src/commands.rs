use chain_spectra::spectrum::MAX_INDEX;
use chain_spectra::trace::{density_grid, density_of_states_smoothed};
use chain_spectra::{
    classify_intervals, enumerate_orbits, expand_determinant, find_roots, simulate_trials, ChainConfig,
    ChainSpec, DirectedBond, Direction, EigenvalueSeries, Error, OrbitSum,
};
use serde::Serialize;

pub enum Failure {
    /// Bad input: exit 1.
    Invalid(String),
    /// Valid input the computation declines: exit 2.
    Refused(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Refused(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Refused(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotRegular(_)
            | Error::NoConvergence(_)
            | Error::PairingFailure { .. }
            | Error::Normalization(_)
            | Error::TermCapExceeded { .. }
            | Error::ClassCapExceeded { .. } => Failure::Refused(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Output = Result<Vec<u8>, Failure>;

/// Shortest round-trip form, exponent notation for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn json(value: &impl Serialize) -> Output {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::Invalid(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &[&str]) -> Result<Self, Failure> {
        let mut t = Table(csv::Writer::from_writer(Vec::new()));
        t.row(header.iter().map(|s| s.to_string()))?;
        Ok(t)
    }

    fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<(), Failure> {
        self.0
            .write_record(fields)
            .map_err(|e| Failure::Invalid(e.to_string()))
    }

    fn finish(self) -> Output {
        self.0.into_inner().map_err(|e| Failure::Invalid(e.to_string()))
    }
}

pub fn range(lo: usize, hi: usize) -> Result<(usize, usize), Failure> {
    if lo == 0 || lo > hi || hi > MAX_INDEX {
        return Err(Failure::Invalid(format!(
            "index range {lo}..={hi} must satisfy 1 <= nmin <= nmax <= {MAX_INDEX}"
        )));
    }
    Ok((lo, hi))
}

pub fn check_threshold(t: f64) -> Result<(), Failure> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Failure::Invalid(format!("--amp-threshold must lie in (0, 1), got {t}")));
    }
    Ok(())
}

pub fn check_max_bonds(m: usize) -> Result<(), Failure> {
    let cap = chain_spectra::orbits::MAX_CODE_LENGTH;
    if m == 0 || m > cap {
        return Err(Failure::Invalid(format!("--max-bonds must lie in 1..={cap}, got {m}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct VertexReport {
    vertex: usize,
    r: f64,
    t: f64,
}

#[derive(Serialize)]
struct ChainReport {
    #[serde(flatten)]
    config: ChainConfig,
    betas: Vec<f64>,
    bond_actions: Vec<f64>,
    total_action: f64,
    interior: Vec<VertexReport>,
}

pub fn validate(chain: &ChainSpec) -> Output {
    json(&ChainReport {
        config: ChainConfig::from(chain),
        betas: chain.betas().to_vec(),
        bond_actions: chain.bond_actions().to_vec(),
        total_action: chain.total_action(),
        interior: chain
            .interior_coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| VertexReport {
                vertex: i + 1,
                r: c.r,
                t: c.t,
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct PairReport {
    amplitude: f64,
    action: f64,
    gamma: f64,
    self_paired: bool,
}

#[derive(Serialize)]
struct FormReport {
    s0: f64,
    gamma0: f64,
    margin: f64,
    pairs: Vec<PairReport>,
}

pub fn expand(chain: &ChainSpec) -> Output {
    let form = expand_determinant(chain)?;
    json(&FormReport {
        s0: form.s0,
        gamma0: form.gamma0,
        margin: form.margin,
        pairs: form
            .pairs
            .iter()
            .map(|p| PairReport {
                amplitude: p.amplitude,
                action: p.action,
                gamma: p.gamma,
                self_paired: p.self_paired,
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct RegularityReport {
    margin: f64,
    coefficient_sum: f64,
    verdict: &'static str,
}

pub fn regularity(chain: &ChainSpec) -> Output {
    let form = expand_determinant(chain)?;
    json(&RegularityReport {
        margin: form.margin,
        coefficient_sum: 1.0 - form.margin,
        verdict: if form.is_regular() {
            "regular-guaranteed"
        } else {
            "inconclusive"
        },
    })
}

pub fn roots(chain: &ChainSpec, lo: usize, hi: usize) -> Output {
    let form = expand_determinant(chain)?;
    let mut t = Table::new(&["n", "separator_lo", "separator_hi", "k_n", "residual"])?;
    for r in find_roots(&form, lo, hi)? {
        t.row([
            r.n.to_string(),
            num(r.bracket.0),
            num(r.bracket.1),
            num(r.root),
            num(r.residual),
        ])?;
    }
    t.finish()
}

#[derive(Serialize)]
struct IntervalReport {
    nmin: usize,
    nmax: usize,
    margin: f64,
    verdict: &'static str,
    histogram: Vec<HistogramBin>,
    total_roots: usize,
    weyl_count: usize,
    counts: Vec<usize>,
}

#[derive(Serialize)]
struct HistogramBin {
    roots: usize,
    intervals: usize,
}

pub fn intervals(chain: &ChainSpec, lo: usize, hi: usize) -> Output {
    let form = expand_determinant(chain)?;
    let cls = classify_intervals(&form, lo, hi)?;
    json(&IntervalReport {
        nmin: lo,
        nmax: hi,
        margin: cls.margin,
        verdict: if cls.all_single() { "one-root-per-interval" } else { "irregular" },
        histogram: cls
            .histogram
            .iter()
            .map(|(&roots, &intervals)| HistogramBin { roots, intervals })
            .collect(),
        total_roots: cls.total_roots,
        weyl_count: cls.weyl_count,
        counts: cls.counts,
    })
}

pub fn orbits(chain: &ChainSpec, max_bonds: usize) -> Output {
    let list = enumerate_orbits(chain, max_bonds)?;
    let mut t = Table::new(&["code", "length", "action", "amplitude", "primitive"])?;
    for o in &list {
        t.row([
            o.code_string(),
            o.len().to_string(),
            num(o.action),
            num(o.amplitude),
            o.primitive.to_string(),
        ])?;
    }
    t.finish()
}

pub fn eigen(chain: &ChainSpec, lo: usize, hi: usize, amp_threshold: f64) -> Output {
    let form = expand_determinant(chain)?;
    if !form.is_regular() {
        return Err(Error::NotRegular(form.margin).into());
    }
    let sum = OrbitSum::resummed(chain, amp_threshold)?;
    let series = EigenvalueSeries::new(&form, &sum)?;
    let roots = find_roots(&form, lo, hi)?;
    let values = series.eigenvalues(lo, hi);
    let mut t = Table::new(&["n", "k_series", "k_root", "abs_error"])?;
    for (r, k) in roots.iter().zip(values) {
        t.row([r.n.to_string(), num(k), num(r.root), num((k - r.root).abs())])?;
    }
    t.finish()
}

pub struct DosGrid {
    ks: Vec<f64>,
    sigma: Option<f64>,
}

impl DosGrid {
    pub fn new(kmin: f64, kmax: f64, points: usize, sigma: Option<f64>) -> Result<Self, Failure> {
        if !(kmin.is_finite() && kmax.is_finite() && kmin >= 0.0 && kmin < kmax) {
            return Err(Failure::Invalid(format!("need 0 <= kmin < kmax, got {kmin}..{kmax}")));
        }
        if points < 2 {
            return Err(Failure::Invalid("--points must be at least 2".into()));
        }
        if let Some(s) = sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Failure::Invalid(format!("--sigma must be positive, got {s}")));
            }
        }
        let step = (kmax - kmin) / (points - 1) as f64;
        Ok(Self {
            ks: (0..points).map(|i| kmin + step * i as f64).collect(),
            sigma,
        })
    }
}

pub fn dos(chain: &ChainSpec, grid: &DosGrid, amp_threshold: f64) -> Output {
    let sum = OrbitSum::resummed(chain, amp_threshold)?;
    let rho = density_grid(&sum, &grid.ks);
    let mut header = vec!["k", "density"];
    if grid.sigma.is_some() {
        header.push("density_smoothed");
    }
    let mut t = Table::new(&header)?;
    for (k, r) in grid.ks.iter().zip(rho) {
        let mut row = vec![num(*k), num(r)];
        if let Some(s) = grid.sigma {
            row.push(num(density_of_states_smoothed(&sum, *k, s)));
        }
        t.row(row)?;
    }
    t.finish()
}

#[derive(Serialize)]
struct VertexSimReport {
    vertex: usize,
    encounters: u64,
    reflections: u64,
    expected: f64,
    frequency: f64,
    sigma: f64,
    z_score: f64,
    memory: [[u64; 2]; 2],
    chi_square: f64,
    memoryless: bool,
}

#[derive(Serialize)]
struct OccupationReport {
    bond: usize,
    direction: &'static str,
    hops: u64,
    fraction: f64,
}

#[derive(Serialize)]
struct ReturnReport {
    lag: usize,
    count: u64,
}

#[derive(Serialize)]
struct SimulationReport {
    steps: u64,
    seed: u64,
    trials: u64,
    vertices: Vec<VertexSimReport>,
    occupation: Vec<OccupationReport>,
    returns: Vec<ReturnReport>,
}

pub fn simulate(chain: &ChainSpec, steps: u64, seed: u64, trials: u64) -> Output {
    let stats = simulate_trials(chain, steps, seed, trials)?;
    let fractions = stats.occupation_fractions();
    json(&SimulationReport {
        steps,
        seed,
        trials,
        vertices: stats
            .vertices
            .iter()
            .map(|v| VertexSimReport {
                vertex: v.vertex,
                encounters: v.encounters,
                reflections: v.reflections,
                expected: v.expected,
                frequency: v.frequency(),
                sigma: v.sigma(),
                z_score: if v.sigma() > 0.0 {
                    (v.frequency() - v.expected) / v.sigma()
                } else {
                    0.0
                },
                memory: v.memory,
                chi_square: v.chi_square(),
                memoryless: v.memoryless(),
            })
            .collect(),
        occupation: stats
            .occupation
            .iter()
            .enumerate()
            .map(|(i, &hops)| {
                let d = DirectedBond::from_index(i);
                OccupationReport {
                    bond: d.bond + 1,
                    direction: match d.direction {
                        Direction::Right => "right",
                        Direction::Left => "left",
                    },
                    hops,
                    fraction: fractions[i],
                }
            })
            .collect(),
        returns: stats
            .returns
            .iter()
            .enumerate()
            .map(|(i, &count)| ReturnReport { lag: i + 1, count })
            .collect(),
    })
}
