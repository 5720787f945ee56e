//! Seeded synthetic matrices, noise models and experiment sweeps.
//!
//! Every generator is a pure function of its inputs and a `u64` seed.
//! Internally each seed drives a ChaCha8 stream; composite generators
//! split one seed into independent streams with [`sub_seed`].

use std::fmt;
use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};
use rayon::prelude::*;

use crate::linalg::DenseMatrix;
use crate::metrics::rse;
use crate::tuning::{grid_search, Method, SolverDefaults, DEFAULT_BETA_GRID};
use crate::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for a numbered stream (splitmix64 finalizer).
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Result<DenseMatrix> {
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::from_row_major(rows, cols, data)
}

fn check_fraction(name: &str, fraction: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {fraction}")));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be finite and nonnegative, got {sigma}")));
    }
    Ok(())
}

fn positions(len: usize, fraction: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let count = ((fraction * len as f64).round() as usize).min(len);
    index::sample(rng, len, count).into_vec()
}

/// `A·B` with `A` (m×k) and `B` (k×n) i.i.d. standard normal.
pub fn gen_low_rank(m: usize, n: usize, k: usize, seed: u64) -> Result<DenseMatrix> {
    if k == 0 || k > m.min(n) {
        return Err(Error::BadRank { rank: k, m, n });
    }
    let mut rng = rng(seed);
    let a = gaussian(m, k, &mut rng)?;
    let b = gaussian(k, n, &mut rng)?;
    a.matmul(&b)
}

/// Zeroes exactly `round(fraction·m·n)` entries chosen without replacement.
pub fn sparsify(m: &DenseMatrix, zero_fraction: f64, seed: u64) -> Result<DenseMatrix> {
    check_fraction("zero fraction", zero_fraction)?;
    let mut out = m.clone();
    let data = out.as_mut_slice();
    for p in positions(data.len(), zero_fraction, &mut rng(seed)) {
        data[p] = 0.0;
    }
    Ok(out)
}

/// Adds i.i.d. `N(0, σ²)` noise to every entry.
pub fn add_awgn(m: &DenseMatrix, sigma: f64, seed: u64) -> Result<DenseMatrix> {
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(m.clone());
    }
    let mut rng = rng(seed);
    let mut out = m.clone();
    for v in out.as_mut_slice() {
        *v += sigma * rng.sample::<f64, _>(StandardNormal);
    }
    Ok(out)
}

/// Adds `Uniform[0, σ]` noise to `round(fraction·m·n)` distinct entries.
pub fn corrupt_uniform(m: &DenseMatrix, fraction: f64, sigma: f64, seed: u64) -> Result<DenseMatrix> {
    check_fraction("corruption fraction", fraction)?;
    check_sigma(sigma)?;
    let mut out = m.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let mut rng = rng(seed);
    let noise = Uniform::new_inclusive(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let picked = positions(out.len(), fraction, &mut rng);
    let data = out.as_mut_slice();
    for p in picked {
        data[p] += rng.sample(noise);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    /// Fraction of entries forced to zero.
    pub zero_fraction: f64,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub clean: DenseMatrix,
    pub noisy: DenseMatrix,
}

impl SyntheticSpec {
    /// 50×50, rank 10, 40% zeros, σ = 0.2.
    pub fn standard(seed: u64) -> Self {
        Self {
            m: 50,
            n: 50,
            rank: 10,
            zero_fraction: 0.4,
            sigma: 0.2,
            seed,
        }
    }

    /// Low-rank draw, then sparsification, then white noise.
    pub fn generate(&self) -> Result<Instance> {
        check_fraction("zero fraction", self.zero_fraction)?;
        check_sigma(self.sigma)?;
        let dense = gen_low_rank(self.m, self.n, self.rank, sub_seed(self.seed, 0))?;
        let clean = sparsify(&dense, self.zero_fraction, sub_seed(self.seed, 1))?;
        let noisy = add_awgn(&clean, self.sigma, sub_seed(self.seed, 2))?;
        Ok(Instance { clean, noisy })
    }
}

/// Weighted undirected graph with planted communities.
///
/// A share of the nodes is active; each active node joins one community and
/// carries an affinity `wᵢ ∈ [0.5, 1]`, each community a strength
/// `s ∈ [0.5, 2]`. Active nodes `i, j` in the same community get weight
/// `s·wᵢ·wⱼ`; all other pairs are zero. The adjacency is symmetric, sparse,
/// has entries in `[0, 2]` and rank at most the number of communities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSpec {
    pub nodes: usize,
    pub communities: usize,
    pub active_fraction: f64,
    pub seed: u64,
}

impl GraphSpec {
    pub fn adjacency(&self) -> Result<DenseMatrix> {
        if self.communities == 0 || self.communities > self.nodes {
            return Err(Error::BadRank {
                rank: self.communities,
                m: self.nodes,
                n: self.nodes,
            });
        }
        check_fraction("active fraction", self.active_fraction)?;
        let mut rng = rng(self.seed);
        let strength: Vec<f64> = (0..self.communities).map(|_| rng.random_range(0.5..=2.0)).collect();
        let active = positions(self.nodes, self.active_fraction, &mut rng);
        let mut member: Vec<Option<(usize, f64)>> = vec![None; self.nodes];
        for node in active {
            member[node] = Some((rng.random_range(0..self.communities), rng.random_range(0.5..=1.0)));
        }
        Ok(DenseMatrix::from_fn(self.nodes, self.nodes, |i, j| match (member[i], member[j]) {
            (Some((gi, wi)), Some((gj, wj))) if gi == gj => strength[gi] * (wi * wj),
            _ => 0.0,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Rank,
    /// Swept values are sparsity levels: the fraction of entries kept
    /// nonzero, so a level of 0.6 zeroes 40% of the matrix.
    Sparsity,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKind::Rank => "rank",
            SweepKind::Sparsity => "sparsity",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSetup {
    pub kind: SweepKind,
    pub values: Vec<f64>,
    /// Instance settings; the swept field is overridden per point.
    pub base: SyntheticSpec,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub beta0_grid: Vec<f64>,
    pub beta1_grid: Vec<f64>,
    pub c: f64,
    pub defaults: SolverDefaults,
}

impl SweepSetup {
    pub fn new(kind: SweepKind, values: Vec<f64>, base: SyntheticSpec, trials: usize) -> Self {
        Self {
            kind,
            values,
            base,
            trials,
            methods: vec![Method::Islr, Method::Slr],
            beta0_grid: DEFAULT_BETA_GRID.to_vec(),
            beta1_grid: DEFAULT_BETA_GRID.to_vec(),
            c: 0.5,
            defaults: SolverDefaults::default(),
        }
    }

    fn spec_at(&self, value: f64, trial: usize) -> Result<SyntheticSpec> {
        let mut spec = self.base;
        spec.seed = self.base.seed ^ trial as u64;
        match self.kind {
            SweepKind::Rank => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidArgument(format!("rank sweep value {value} is not a positive integer")));
                }
                spec.rank = value as usize;
            }
            SweepKind::Sparsity => {
                check_fraction("sparsity level", value)?;
                spec.zero_fraction = 1.0 - value;
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub method: Method,
    pub mean_rse: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std_rse: f64,
    /// Best-cell RSE of each trial, in trial order.
    pub trial_rse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub kind: SweepKind,
    /// Sweep values outermost, methods in setup order.
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn row(&self, sweep_value: f64, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.method == method)
    }

    /// Mean RSE per sweep value for one method.
    pub fn means(&self, method: Method) -> Vec<f64> {
        self.rows.iter().filter(|r| r.method == method).map(|r| r.mean_rse).collect()
    }

    /// `sweep_value,method,mean_rse,std_rse,trials` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "sweep_value,method,mean_rse,std_rse,trials")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{}",
                r.sweep_value,
                r.method,
                r.mean_rse,
                r.std_rse,
                r.trial_rse.len()
            )?;
        }
        Ok(())
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Grid-searched RSE of every method on every trial of every sweep point.
///
/// Trial `t` uses seed `base.seed ⊕ t`, so results do not depend on
/// scheduling.
pub fn run_sweep(setup: &SweepSetup) -> Result<SweepReport> {
    if setup.values.is_empty() || setup.methods.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value and one method".into()));
    }
    if setup.trials == 0 {
        return Err(Error::InvalidArgument("sweep needs at least one trial".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..setup.values.len())
        .flat_map(|v| (0..setup.trials).map(move |t| (v, t)))
        .collect();
    let scores = jobs
        .par_iter()
        .map(|&(v, t)| {
            let spec = setup.spec_at(setup.values[v], t)?;
            let inst = spec.generate()?;
            setup
                .methods
                .iter()
                .map(|&method| {
                    let report = grid_search(
                        &inst.noisy,
                        &inst.clean,
                        &setup.beta0_grid,
                        &setup.beta1_grid,
                        setup.c,
                        spec.sigma,
                        method,
                        &setup.defaults,
                    )?;
                    Ok(report.best_row().rse)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(setup.values.len() * setup.methods.len());
    for (v, &value) in setup.values.iter().enumerate() {
        for (k, &method) in setup.methods.iter().enumerate() {
            let trial_rse: Vec<f64> = (0..setup.trials).map(|t| scores[v * setup.trials + t][k]).collect();
            let (mean_rse, std_rse) = mean_std(&trial_rse);
            rows.push(SweepRow {
                sweep_value: value,
                method,
                mean_rse,
                std_rse,
                trial_rse,
            });
        }
    }
    Ok(SweepReport { kind: setup.kind, rows })
}

/// RSE of the unprocessed noisy input, for reference.
pub fn input_rse(inst: &Instance) -> Result<f64> {
    rse(&inst.noisy, &inst.clean)
}
