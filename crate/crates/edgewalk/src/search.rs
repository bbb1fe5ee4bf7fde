//! Search for marked states: three classical sampling/walking baselines
//! and the quantum loop that alternates a marked-state sign flip with a
//! reflection about the stationary edge state.
//!
//! All algorithms run with a fixed budget derived from the marked mass
//! `ε` and (where relevant) the chain gap `δ`, and report the cost of one
//! full-budget trial in abstract units: `S` per fresh stationary sample,
//! `U` per chain step (with four update charges per controlled walk call
//! in the estimation circuit), and `C` per marked-state check. Budgets are
//! always run to completion so the per-trial cost is a closed form; the
//! success flag records whether any check hit a marked state.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{ChainAnalysis, MarkovChain};
use crate::edge::EdgeState;
use crate::error::{Error, Result};
use crate::reflection::{
    exact_reflection, estimation_kernel, PhaseEstimationReflection, ReflectionConfig,
};
use crate::walk::{discriminant_spectrum, WalkOperator};

/// Abstract per-operation costs: stationary sample, chain step, check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostWeights {
    pub setup: f64,
    pub update: f64,
    pub check: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            setup: 1.0,
            update: 1.0,
            check: 1.0,
        }
    }
}

/// Accumulated cost of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CostCounter {
    pub setup_units: f64,
    pub update_units: f64,
    pub check_units: f64,
    /// Controlled walk calls (quantum runs only).
    pub walk_calls: u64,
}

impl CostCounter {
    pub fn total(&self) -> f64 {
        self.setup_units + self.update_units + self.check_units
    }
}

/// Observer for the oracle operations a search performs. Implementations
/// typically perform (and count) the literal input-table reads that each
/// operation stands for; the search loops only announce the events.
pub trait SearchOracle {
    /// A fresh stationary sample landed on `state`.
    fn classical_setup(&mut self, state: usize);
    /// One chain step moved `from → to`.
    fn classical_update(&mut self, from: usize, to: usize);
    /// One marked-state check of `state`.
    fn classical_check(&mut self, state: usize);
    /// Superposed preparation of the stationary state.
    fn coherent_setup(&mut self);
    /// One superposed update (register spread or controlled walk step).
    fn coherent_update(&mut self);
    /// One superposed marked-state sign flip.
    fn coherent_check(&mut self);
}

/// Oracle observer that ignores every event.
pub struct NoOracle;

impl SearchOracle for NoOracle {
    fn classical_setup(&mut self, _state: usize) {}
    fn classical_update(&mut self, _from: usize, _to: usize) {}
    fn classical_check(&mut self, _state: usize) {}
    fn coherent_setup(&mut self) {}
    fn coherent_update(&mut self) {}
    fn coherent_check(&mut self) {}
}

/// The three classical baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalAlgorithm {
    /// Fresh stationary sample before every check; `⌈3/ε⌉` rounds of
    /// cost `S + C`.
    Resample,
    /// One sample, then `⌈3/ε⌉` blocks of a check followed by `⌈3/δ⌉`
    /// chain steps; cost `S + t₂(C + t₁U)`.
    BlockWalk,
    /// One sample, then `⌈3/(εδ)⌉` rounds of a check followed by a single
    /// chain step; cost `S + t(C + U)`.
    StepWalk,
}

impl ClassicalAlgorithm {
    /// Interface name (`classical-1`, `classical-2`, `classical-3`).
    pub fn name(&self) -> &'static str {
        match self {
            ClassicalAlgorithm::Resample => "classical-1",
            ClassicalAlgorithm::BlockWalk => "classical-2",
            ClassicalAlgorithm::StepWalk => "classical-3",
        }
    }
}

/// Result of a batch of seeded classical trials.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalReport {
    pub algorithm: String,
    pub states: usize,
    pub marked_count: usize,
    /// Stationary mass on the marked set.
    pub epsilon: f64,
    pub delta: f64,
    /// Outer budget (checks performed per trial).
    pub rounds: u64,
    /// Chain steps between consecutive checks.
    pub inner_steps: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Cost of one full-budget trial (identical across trials).
    pub per_trial_cost: CostCounter,
    /// Marked state found by the first successful trial.
    pub first_found: Option<String>,
    /// Per-trial outcome, ordered by trial index: the first marked state
    /// the trial checked, or `None` if its whole budget missed.
    pub trial_found: Vec<Option<String>>,
}

fn marked_mass(analysis: &ChainAnalysis, marked: &[bool]) -> f64 {
    analysis
        .stationary
        .iter()
        .zip(marked)
        .filter(|(_, &m)| m)
        .map(|(p, _)| p)
        .sum()
}

fn validate_marked(chain: &MarkovChain, marked: &[bool]) -> Result<usize> {
    if marked.len() != chain.n() {
        return Err(Error::InvalidParameter(format!(
            "marked vector has {} entries for {} states",
            marked.len(),
            chain.n()
        )));
    }
    let count = marked.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(Error::InvalidParameter(
            "no state is marked; the search target is empty".into(),
        ));
    }
    Ok(count)
}

/// Translate a list of state labels into a marked mask.
pub fn marked_from_labels(chain: &MarkovChain, labels: &[String]) -> Result<Vec<bool>> {
    let mut marked = vec![false; chain.n()];
    for label in labels {
        match chain.index_of(label) {
            Some(i) => marked[i] = true,
            None => {
                return Err(Error::InvalidParameter(format!(
                    "unknown state label {label:?}"
                )))
            }
        }
    }
    Ok(marked)
}

fn sample_cdf<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Ceiling with an absolute guard against numerical noise: stationary
/// masses and gaps come from linear algebra, so a budget of exactly 48
/// can surface as 48 ± 1e-15 and must not ceil to 49.
fn budget(ratio: f64) -> u64 {
    (ratio - 1e-9).ceil() as u64
}

/// Run one classical baseline for a batch of independently seeded trials.
/// Trial `i` uses RNG stream `i` of the master seed, so batches are
/// reproducible and extendable.
pub fn classical_search(
    chain: &MarkovChain,
    analysis: &ChainAnalysis,
    marked: &[bool],
    weights: CostWeights,
    algorithm: ClassicalAlgorithm,
    trials: u64,
    seed: u64,
    oracle: &mut dyn SearchOracle,
) -> Result<ClassicalReport> {
    let marked_count = validate_marked(chain, marked)?;
    let epsilon = marked_mass(analysis, marked);
    let delta = analysis.delta;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }

    let (rounds, inner_steps) = match algorithm {
        ClassicalAlgorithm::Resample => (budget(3.0 / epsilon), 0),
        ClassicalAlgorithm::BlockWalk => {
            if !(delta > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "chain gap must be positive for walk-based search, got {delta}"
                )));
            }
            (budget(3.0 / epsilon), budget(3.0 / delta))
        }
        ClassicalAlgorithm::StepWalk => {
            if !(delta > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "chain gap must be positive for walk-based search, got {delta}"
                )));
            }
            (budget(3.0 / (epsilon * delta)), 1)
        }
    };

    let pi = &analysis.stationary;
    let mut successes = 0u64;
    let mut first_found: Option<String> = None;
    let mut trial_found: Vec<Option<String>> = Vec::with_capacity(trials as usize);
    let mut per_trial_cost = CostCounter::default();

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut cost = CostCounter::default();
        let mut hit: Option<usize> = None;

        match algorithm {
            ClassicalAlgorithm::Resample => {
                for _ in 0..rounds {
                    let x = sample_cdf(pi, &mut rng);
                    oracle.classical_setup(x);
                    cost.setup_units += weights.setup;
                    oracle.classical_check(x);
                    cost.check_units += weights.check;
                    if marked[x] && hit.is_none() {
                        hit = Some(x);
                    }
                }
            }
            ClassicalAlgorithm::BlockWalk | ClassicalAlgorithm::StepWalk => {
                let mut x = sample_cdf(pi, &mut rng);
                oracle.classical_setup(x);
                cost.setup_units += weights.setup;
                for _ in 0..rounds {
                    oracle.classical_check(x);
                    cost.check_units += weights.check;
                    if marked[x] && hit.is_none() {
                        hit = Some(x);
                    }
                    for _ in 0..inner_steps {
                        let row: Vec<f64> = (0..chain.n()).map(|y| chain.transition(x, y)).collect();
                        let y = sample_cdf(&row, &mut rng);
                        oracle.classical_update(x, y);
                        cost.update_units += weights.update;
                        x = y;
                    }
                }
            }
        }

        if trial == 0 {
            per_trial_cost = cost;
        } else if cost != per_trial_cost {
            return Err(Error::InvalidChain(
                "trial costs diverged under fixed budgets".into(),
            ));
        }
        if let Some(x) = hit {
            successes += 1;
            if first_found.is_none() {
                first_found = Some(chain.labels()[x].clone());
            }
        }
        trial_found.push(hit.map(|x| chain.labels()[x].clone()));
    }

    Ok(ClassicalReport {
        algorithm: algorithm.name().to_string(),
        states: chain.n(),
        marked_count,
        epsilon,
        delta,
        rounds,
        inner_steps,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        per_trial_cost,
        first_found,
        trial_found,
    })
}

/// Which reflection the quantum loop uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectorKind {
    /// The ideal reflection about the stationary edge state.
    Exact,
    /// The simulated estimation circuit with the given qubit budget.
    PhaseEstimation(ReflectionConfig),
}

/// The rotation angle `φ = arcsin √ε` of the ideal search dynamics.
pub fn rotation_phase(epsilon: f64) -> f64 {
    epsilon.sqrt().min(1.0).asin()
}

/// Iteration count maximizing the ideal success probability:
/// the nearest integer to `π/(4φ) − 1/2`.
pub fn optimal_iterations(epsilon: f64) -> u64 {
    let phi = rotation_phase(epsilon);
    ((std::f64::consts::PI / (4.0 * phi) - 0.5).round()).max(0.0) as u64
}

/// Ideal marked mass after `0..=iterations` rounds: `sin²((2i+1)φ)`.
pub fn ideal_success_trace(epsilon: f64, iterations: u64) -> Vec<f64> {
    let phi = rotation_phase(epsilon);
    (0..=iterations)
        .map(|i| ((2 * i + 1) as f64 * phi).sin().powi(2))
        .collect()
}

/// Result of one quantum search run plus a batch of measurement samples.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumReport {
    pub algorithm: String,
    pub states: usize,
    pub marked_count: usize,
    pub epsilon: f64,
    pub rotation_phase: f64,
    pub iterations: u64,
    /// `sin²((2i+1)φ)` for `i = 0..=iterations`.
    pub ideal_trace: Vec<f64>,
    /// Measured marked mass after each round.
    pub measured_trace: Vec<f64>,
    /// Full-register distance from the ideal trajectory after each round.
    pub trace_deviation: Vec<f64>,
    /// Per-application reflection residual `η` (0 for the exact reflector).
    pub per_round_error: f64,
    /// `2iη`: the accumulated error budget after round `i`.
    pub hybrid_bound: Vec<f64>,
    pub final_marked_mass: f64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub first_found: Option<String>,
    /// Measured source-register label per trial, ordered by trial index.
    pub trial_measured: Vec<String>,
    pub cost: CostCounter,
    /// Estimation qubit budget, when the simulated circuit was used.
    pub reflection: Option<ReflectionConfig>,
}

fn flip_marked(reg: &mut [Complex64], n: usize, marked: &[bool]) {
    let d = n * n;
    let slices = reg.len() / d;
    for a in 0..slices {
        for (x, &m) in marked.iter().enumerate() {
            if m {
                for v in reg[a * d + x * n..a * d + (x + 1) * n].iter_mut() {
                    *v = -*v;
                }
            }
        }
    }
}

fn register_marked_mass(reg: &[Complex64], n: usize, marked: &[bool]) -> f64 {
    let d = n * n;
    let slices = reg.len() / d;
    let mut mass = 0.0;
    for a in 0..slices {
        for (x, &m) in marked.iter().enumerate() {
            if m {
                mass += reg[a * d + x * n..a * d + (x + 1) * n]
                    .iter()
                    .map(|v| v.norm_sqr())
                    .sum::<f64>();
            }
        }
    }
    mass
}

fn register_first_marginal(reg: &[Complex64], n: usize) -> Vec<f64> {
    let d = n * n;
    let slices = reg.len() / d;
    let mut p = vec![0.0; n];
    for a in 0..slices {
        for x in 0..n {
            p[x] += reg[a * d + x * n..a * d + (x + 1) * n]
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>();
        }
    }
    p
}

/// Distance between the register and the all-zero-ancilla embedding of an
/// ideal edge state.
fn register_deviation(reg: &[Complex64], ideal: &EdgeState) -> f64 {
    let d = ideal.amps().len();
    let mut dev_sq: f64 = reg[d..].iter().map(|v| v.norm_sqr()).sum();
    for (r, a) in reg[..d].iter().zip(ideal.amps()) {
        dev_sq += (r - a).norm_sqr();
    }
    dev_sq.sqrt()
}

/// Run the quantum search loop: prepare the stationary edge state, then
/// alternate the marked flip with the chosen reflection for the requested
/// number of rounds (the ideal-optimal count when `iterations` is `None`),
/// then sample `trials` measurement outcomes of the source register.
#[allow(clippy::too_many_arguments)]
pub fn quantum_search(
    chain: &MarkovChain,
    analysis: &ChainAnalysis,
    marked: &[bool],
    weights: CostWeights,
    reflector: ReflectorKind,
    iterations: Option<u64>,
    trials: u64,
    seed: u64,
    oracle: &mut dyn SearchOracle,
) -> Result<QuantumReport> {
    let marked_count = validate_marked(chain, marked)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let n = chain.n();
    let epsilon = marked_mass(analysis, marked);
    let phi = rotation_phase(epsilon);
    let t = iterations.unwrap_or_else(|| optimal_iterations(epsilon));

    let op = WalkOperator::new(chain, analysis);
    let pi = op.stationary_state();

    // Ideal trajectory lives in the plane spanned by the normalized marked
    // and unmarked components of the stationary state.
    let mut marked_part = EdgeState::zeros(n);
    let mut unmarked_part = EdgeState::zeros(n);
    for x in 0..n {
        for y in 0..n {
            let target = if marked[x] {
                marked_part.amp_mut(x, y)
            } else {
                unmarked_part.amp_mut(x, y)
            };
            *target = pi.amp(x, y);
        }
    }
    if epsilon > 0.0 {
        marked_part.scale(Complex64::new(1.0 / epsilon.sqrt(), 0.0));
    }
    if epsilon < 1.0 {
        unmarked_part.scale(Complex64::new(1.0 / (1.0 - epsilon).sqrt(), 0.0));
    }
    let ideal_state = |i: u64| -> EdgeState {
        let angle = (2 * i + 1) as f64 * phi;
        let mut s = marked_part.clone();
        s.scale(Complex64::new(angle.sin(), 0.0));
        s.axpy(Complex64::new(angle.cos(), 0.0), &unmarked_part);
        s
    };

    let mut cost = CostCounter::default();
    cost.setup_units += weights.setup;
    cost.update_units += weights.update;
    oracle.coherent_setup();
    oracle.coherent_update();

    let refl = match reflector {
        ReflectorKind::Exact => None,
        ReflectorKind::PhaseEstimation(cfg) => {
            Some(PhaseEstimationReflection::new(&op, cfg)?)
        }
    };
    let per_round_error = match reflector {
        ReflectorKind::Exact => 0.0,
        ReflectorKind::PhaseEstimation(cfg) => {
            let disc = discriminant_spectrum(chain, analysis)?;
            let mut eta = 0.0f64;
            for &phase in &disc.predicted_phase_multiset() {
                if phase.abs() < 1e-12 {
                    continue;
                }
                eta = eta.max(2.0 * estimation_kernel(cfg.s, phase).powi(cfg.k as i32));
            }
            eta
        }
    };

    let mut reg = match &refl {
        Some(r) => r.prepare_register(&pi),
        None => pi.amps().to_vec(),
    };

    let mut measured_trace = Vec::with_capacity(t as usize + 1);
    let mut trace_deviation = Vec::with_capacity(t as usize + 1);
    let mut hybrid_bound = Vec::with_capacity(t as usize + 1);
    measured_trace.push(register_marked_mass(&reg, n, marked));
    trace_deviation.push(register_deviation(&reg, &ideal_state(0)));
    hybrid_bound.push(0.0);

    for i in 1..=t {
        oracle.coherent_check();
        cost.check_units += weights.check;
        flip_marked(&mut reg, n, marked);
        match &refl {
            Some(r) => {
                let calls = r.apply(&mut reg);
                cost.walk_calls += calls;
                cost.update_units += 4.0 * weights.update * calls as f64;
                for _ in 0..4 * calls {
                    oracle.coherent_update();
                }
            }
            None => {
                let mut state = EdgeState::from_amplitudes(n, reg.clone());
                exact_reflection(&pi, &mut state);
                reg.copy_from_slice(state.amps());
            }
        }
        measured_trace.push(register_marked_mass(&reg, n, marked));
        trace_deviation.push(register_deviation(&reg, &ideal_state(i)));
        hybrid_bound.push(2.0 * i as f64 * per_round_error);
    }

    let marginal = register_first_marginal(&reg, n);
    let total: f64 = marginal.iter().sum();
    let mut successes = 0u64;
    let mut first_found: Option<String> = None;
    let mut trial_measured: Vec<String> = Vec::with_capacity(trials as usize);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut x = n - 1;
        for (i, p) in marginal.iter().enumerate() {
            acc += p;
            if u < acc {
                x = i;
                break;
            }
        }
        if marked[x] {
            successes += 1;
            if first_found.is_none() {
                first_found = Some(chain.labels()[x].clone());
            }
        }
        trial_measured.push(chain.labels()[x].clone());
    }

    let algorithm = match reflector {
        ReflectorKind::Exact => "quantum-exact",
        ReflectorKind::PhaseEstimation(_) => "quantum-pe",
    };
    Ok(QuantumReport {
        algorithm: algorithm.to_string(),
        states: n,
        marked_count,
        epsilon,
        rotation_phase: phi,
        iterations: t,
        ideal_trace: ideal_success_trace(epsilon, t),
        final_marked_mass: *measured_trace.last().unwrap(),
        measured_trace,
        trace_deviation,
        per_round_error,
        hybrid_bound,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        first_found,
        trial_measured,
        cost,
        reflection: match reflector {
            ReflectorKind::Exact => None,
            ReflectorKind::PhaseEstimation(cfg) => Some(cfg),
        },
    })
}
