//! Approximate reflection about the stationary edge state, built from
//! phase estimation on the walk operator.
//!
//! The circuit attaches `k` banks of `s` qubits to the edge register. One
//! application runs phase estimation on every bank (Hadamards, controlled
//! walk powers, inverse Fourier transform per bank), flips the sign of
//! every register component whose banks are not all zero, and uncomputes
//! the estimation. The stationary state has walk phase 0, so estimation
//! leaves its banks exactly at zero and the reflection fixes it exactly;
//! an eigenvector with phase φ ≠ 0 survives with residual amplitude
//! `α(φ)^k` per the estimation kernel `α(φ) = 2^{-s} Σ_j e^{ijφ}`, which
//! makes the deviation from a perfect reflection `2|α(φ)|^k`.
//!
//! Everything here is simulated on a dense register of `2^{sk}·n²`
//! amplitudes with the ancilla index slow and each edge slice contiguous.

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{ChainAnalysis, MarkovChain};
use crate::edge::EdgeState;
use crate::error::{Error, Result};
use crate::walk::{discriminant_spectrum, walk_eigenbasis, WalkOperator};

/// Cap on the total simulated register length `2^{sk}·n²`.
pub const REGISTER_LEN_CAP: usize = 1 << 26;
/// Ancilla mass off the all-zero bank state above this counts as a leak.
pub const ANCILLA_LEAK_TOL: f64 = 1e-9;

/// Qubit budget of the reflection: `k` estimation banks of `s` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReflectionConfig {
    /// Qubits per estimation bank; resolution is `2π/2^s`.
    pub s: usize,
    /// Number of independent banks; the residual decays as `8^{-k}`
    /// once `s` resolves the phase gap.
    pub k: usize,
}

impl ReflectionConfig {
    /// Smallest bank width that brings the estimation kernel below 1/8 on
    /// every nonzero eigenphase: `s = ⌈log₂(2π/Δ)⌉ + 2`.
    pub fn recommended_s(phase_gap: f64) -> Result<usize> {
        if !(phase_gap > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phase gap must be positive, got {phase_gap}"
            )));
        }
        let s = (2.0 * std::f64::consts::PI / phase_gap).log2().ceil() as i64 + 2;
        Ok(s.max(1) as usize)
    }

    /// Config with the recommended bank width for a phase gap.
    pub fn for_phase_gap(phase_gap: f64, k: usize) -> Result<Self> {
        Ok(Self {
            s: Self::recommended_s(phase_gap)?,
            k,
        })
    }
}

/// The simulated reflection circuit for one walk operator.
#[derive(Debug)]
pub struct PhaseEstimationReflection<'a> {
    op: &'a WalkOperator,
    s: usize,
    k: usize,
    edge_dim: usize,
    slices: usize,
}

impl<'a> PhaseEstimationReflection<'a> {
    pub fn new(op: &'a WalkOperator, config: ReflectionConfig) -> Result<Self> {
        let ReflectionConfig { s, k } = config;
        if s == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!(
                "reflection needs s ≥ 1 and k ≥ 1, got s={s}, k={k}"
            )));
        }
        let edge_dim = op.n() * op.n();
        let bits = s * k;
        if bits >= usize::BITS as usize
            || (1usize << bits).saturating_mul(edge_dim) > REGISTER_LEN_CAP
        {
            let needed = if bits >= usize::BITS as usize {
                usize::MAX
            } else {
                (1usize << bits).saturating_mul(edge_dim)
            };
            return Err(Error::CapacityExceeded {
                what: "reflection register length",
                needed,
                cap: REGISTER_LEN_CAP,
            });
        }
        Ok(Self {
            op,
            s,
            k,
            edge_dim,
            slices: 1 << bits,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Edge-register dimension `n²`.
    pub fn edge_dim(&self) -> usize {
        self.edge_dim
    }

    /// Number of ancilla basis states `2^{sk}`.
    pub fn slice_count(&self) -> usize {
        self.slices
    }

    /// Controlled walk calls made by one application: `2k(2^s − 1)`.
    pub fn walk_calls_per_application(&self) -> u64 {
        2 * self.k as u64 * ((1u64 << self.s) - 1)
    }

    /// Register holding `|0…0⟩ ⊗ edge`.
    pub fn prepare_register(&self, edge: &EdgeState) -> Vec<Complex64> {
        assert_eq!(edge.amps().len(), self.edge_dim);
        let mut reg = vec![Complex64::new(0.0, 0.0); self.slices * self.edge_dim];
        reg[..self.edge_dim].copy_from_slice(edge.amps());
        reg
    }

    /// Apply the reflection to a full register in place. Returns the number
    /// of controlled walk calls performed (counted at circuit level, one
    /// per controlled application of the walk or its inverse).
    pub fn apply(&self, reg: &mut [Complex64]) -> u64 {
        assert_eq!(reg.len(), self.slices * self.edge_dim);
        let mut calls = self.apply_estimation(reg, false);
        self.flip_nonzero_banks(reg);
        calls += self.apply_estimation(reg, true);
        calls
    }

    /// The estimation unitary over all banks (`inverse = true` uncomputes).
    fn apply_estimation(&self, reg: &mut [Complex64], inverse: bool) -> u64 {
        let d = self.edge_dim;
        let mut calls = 0u64;
        let banks: Vec<usize> = if inverse {
            (0..self.k).rev().collect()
        } else {
            (0..self.k).collect()
        };
        for j in banks {
            let base = j * self.s;
            if !inverse {
                for t in 0..self.s {
                    hadamard_bit(reg, d, base + t);
                }
                for t in 0..self.s {
                    calls += self.controlled_walk_power(reg, base + t, 1u64 << t, false);
                }
                qft_bank(reg, d, base, self.s, true);
            } else {
                qft_bank(reg, d, base, self.s, false);
                for t in (0..self.s).rev() {
                    calls += self.controlled_walk_power(reg, base + t, 1u64 << t, true);
                }
                for t in 0..self.s {
                    hadamard_bit(reg, d, base + t);
                }
            }
        }
        calls
    }

    /// Apply the walk (or its inverse) `reps` times to every slice whose
    /// ancilla bit `g` is set. Counted as `reps` controlled walk calls.
    fn controlled_walk_power(
        &self,
        reg: &mut [Complex64],
        g: usize,
        reps: u64,
        inverse: bool,
    ) -> u64 {
        let d = self.edge_dim;
        let slices = self.slices;
        let mask = 1usize << g;
        for a in 0..slices {
            if a & mask != 0 {
                let slice = &mut reg[a * d..(a + 1) * d];
                // A slice that is exactly zero stays zero under a unitary;
                // early banks act on a mostly empty register.
                if slice.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
                    continue;
                }
                for _ in 0..reps {
                    if inverse {
                        self.op.apply_inverse_slice(slice);
                    } else {
                        self.op.apply_slice(slice);
                    }
                }
            }
        }
        reps
    }

    /// `2P₀ − I`: negate every slice except the all-zero ancilla state.
    fn flip_nonzero_banks(&self, reg: &mut [Complex64]) {
        let d = self.edge_dim;
        for a in reg[d..].iter_mut() {
            *a = -*a;
        }
    }

    /// Copy one ancilla slice out as an edge state.
    pub fn edge_slice(&self, reg: &[Complex64], ancilla: usize) -> EdgeState {
        let d = self.edge_dim;
        EdgeState::from_amplitudes(
            self.op.n(),
            reg[ancilla * d..(ancilla + 1) * d].to_vec(),
        )
    }

    /// Total probability mass on ancilla states other than all-zero.
    pub fn ancilla_leak(&self, reg: &[Complex64]) -> f64 {
        reg[self.edge_dim..].iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Hadamard on ancilla bit `g`, acting slice-wise on the edge register.
fn hadamard_bit(reg: &mut [Complex64], d: usize, g: usize) {
    let slices = reg.len() / d;
    let mask = 1usize << g;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for a0 in 0..slices {
        if a0 & mask != 0 {
            continue;
        }
        let a1 = a0 | mask;
        let (lo, hi) = reg.split_at_mut(a1 * d);
        let s0 = &mut lo[a0 * d..(a0 + 1) * d];
        let s1 = &mut hi[..d];
        for (x, y) in s0.iter_mut().zip(s1.iter_mut()) {
            let u = *x;
            let v = *y;
            *x = (u + v) * inv_sqrt2;
            *y = (u - v) * inv_sqrt2;
        }
    }
}

/// Phase `e^{iθ}` on slices where ancilla bits `g1` and `g2` are both set.
fn controlled_phase(reg: &mut [Complex64], d: usize, g1: usize, g2: usize, theta: f64) {
    let slices = reg.len() / d;
    let both = (1usize << g1) | (1usize << g2);
    let phase = Complex64::from_polar(1.0, theta);
    for a in 0..slices {
        if a & both == both {
            for v in reg[a * d..(a + 1) * d].iter_mut() {
                *v *= phase;
            }
        }
    }
}

/// Exchange ancilla bits `g1` and `g2` by swapping the paired slices.
fn swap_bits(reg: &mut [Complex64], d: usize, g1: usize, g2: usize) {
    let slices = reg.len() / d;
    let m1 = 1usize << g1.min(g2);
    let m2 = 1usize << g1.max(g2);
    for a in 0..slices {
        if a & m1 != 0 && a & m2 == 0 {
            let b = (a & !m1) | m2;
            let (lo, hi) = reg.split_at_mut(b * d);
            lo[a * d..(a + 1) * d].swap_with_slice(&mut hi[..d]);
        }
    }
}

/// Quantum Fourier transform on the `s` ancilla bits starting at `base`
/// (bit `base + t` carries weight `2^t` in the bank value). `inverse`
/// applies the adjoint. Standard circuit: per target bit from high to low,
/// a Hadamard followed by controlled phases from every lower bit, then a
/// bit reversal.
fn qft_bank(reg: &mut [Complex64], d: usize, base: usize, s: usize, inverse: bool) {
    #[derive(Clone, Copy)]
    enum Gate {
        H(usize),
        Cp(usize, usize, f64),
        Swap(usize, usize),
    }
    let mut gates = Vec::new();
    for i in (0..s).rev() {
        gates.push(Gate::H(i));
        for j in (0..i).rev() {
            let angle = std::f64::consts::PI / (1u64 << (i - j)) as f64;
            gates.push(Gate::Cp(j, i, angle));
        }
    }
    for i in 0..s / 2 {
        gates.push(Gate::Swap(i, s - 1 - i));
    }
    let apply = |reg: &mut [Complex64], gate: Gate, conj: bool| match gate {
        Gate::H(i) => hadamard_bit(reg, d, base + i),
        Gate::Cp(j, i, a) => {
            controlled_phase(reg, d, base + j, base + i, if conj { -a } else { a })
        }
        Gate::Swap(i, j) => swap_bits(reg, d, base + i, base + j),
    };
    if inverse {
        for &g in gates.iter().rev() {
            apply(reg, g, true);
        }
    } else {
        for &g in gates.iter() {
            apply(reg, g, false);
        }
    }
}

/// The estimation kernel magnitude `|α(φ)| = |2^{-s} Σ_{j<2^s} e^{ijφ}|`.
pub fn estimation_kernel(s: usize, phase: f64) -> f64 {
    let terms = 1u64 << s;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..terms {
        sum += Complex64::from_polar(1.0, phase * j as f64);
    }
    sum.norm() / terms as f64
}

/// Exact reflection about a fixed edge state: `ψ ← 2⟨π|ψ⟩·π − ψ`.
pub fn exact_reflection(pi: &EdgeState, state: &mut EdgeState) {
    let c = pi.inner(state) * 2.0;
    state.scale(Complex64::new(-1.0, 0.0));
    state.axpy(c, pi);
}

/// Measured quality of one reflection configuration on one chain.
#[derive(Debug, Clone, Serialize)]
pub struct ReflectionReport {
    pub s: usize,
    pub k: usize,
    /// Controlled walk calls per application, `2k(2^s − 1)`, as counted.
    pub controlled_walk_calls: u64,
    /// `2·max |α(φ)|^k` over the nonzero eigenphases (analytic residual).
    pub predicted_error: f64,
    /// Worst `‖(R + I)|0…0⟩⊗w‖` over walk eigenvectors `w ⊥ π`.
    pub worst_eigenvector_error: f64,
    /// Worst over random invariant-subspace states orthogonal to π.
    pub worst_random_error: f64,
    /// Max of the two measured errors.
    pub measured_error: f64,
    /// `‖R|0…0⟩⊗π − |0…0⟩⊗π‖`.
    pub stationary_deviation: f64,
    /// Ancilla mass off all-zero after reflecting the stationary state.
    pub ancilla_leak: f64,
    /// Whether the leak is within [`ANCILLA_LEAK_TOL`].
    pub ancilla_restored: bool,
    pub eigenvectors_tested: usize,
    pub random_states_tested: usize,
}

/// Run one reflection configuration against the walk eigenbasis and a
/// seeded batch of random invariant-subspace states, all orthogonal to the
/// stationary state, and measure how far the circuit is from the ideal
/// reflection on each.
pub fn reflection_error_suite(
    chain: &MarkovChain,
    analysis: &ChainAnalysis,
    config: ReflectionConfig,
    random_states: usize,
    seed: u64,
) -> Result<ReflectionReport> {
    use rand::{Rng, SeedableRng};

    let op = WalkOperator::new(chain, analysis);
    let disc = discriminant_spectrum(chain, analysis)?;
    let refl = PhaseEstimationReflection::new(&op, config)?;
    let eigen = walk_eigenbasis(&op, &disc);

    let mut counted = 0u64;
    let residual = |refl: &PhaseEstimationReflection,
                    state: &EdgeState,
                    counted: &mut u64| {
        let mut reg = refl.prepare_register(state);
        *counted = refl.apply(&mut reg);
        // ‖R|0̄⟩w + |0̄⟩w‖: add the input back onto slice zero.
        for (r, a) in reg.iter_mut().zip(state.amps()) {
            *r += a;
        }
        reg.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    };

    let mut worst_eigenvector_error = 0.0f64;
    let mut eigenvectors_tested = 0;
    for ev in &eigen {
        if ev.phase.abs() < 1e-12 {
            continue;
        }
        worst_eigenvector_error =
            worst_eigenvector_error.max(residual(&refl, &ev.state, &mut counted));
        eigenvectors_tested += 1;
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst_random_error = 0.0f64;
    for _ in 0..random_states {
        let mut state = EdgeState::zeros(chain.n());
        for ev in &eigen {
            if ev.phase.abs() < 1e-12 {
                continue;
            }
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            state.axpy(c, &ev.state);
        }
        if state.norm() < 1e-9 {
            continue;
        }
        state.normalize();
        worst_random_error = worst_random_error.max(residual(&refl, &state, &mut counted));
    }

    let pi = op.stationary_state();
    let mut reg = refl.prepare_register(&pi);
    let calls = refl.apply(&mut reg);
    let ancilla_leak = refl.ancilla_leak(&reg);
    let mut dev_sq = ancilla_leak;
    for (r, a) in reg[..refl.edge_dim()].iter().zip(pi.amps()) {
        dev_sq += (r - a).norm_sqr();
    }
    let stationary_deviation = dev_sq.sqrt();

    if counted != 0 && counted != calls {
        return Err(Error::InvalidChain(format!(
            "inconsistent controlled walk call counts: {counted} vs {calls}"
        )));
    }

    let mut predicted_error = 0.0f64;
    for &phase in &disc.predicted_phase_multiset() {
        if phase.abs() < 1e-12 {
            continue;
        }
        let a = estimation_kernel(config.s, phase);
        predicted_error = predicted_error.max(2.0 * a.powi(config.k as i32));
    }

    Ok(ReflectionReport {
        s: config.s,
        k: config.k,
        controlled_walk_calls: calls,
        predicted_error,
        worst_eigenvector_error,
        worst_random_error,
        measured_error: worst_eigenvector_error.max(worst_random_error),
        stationary_deviation,
        ancilla_leak,
        ancilla_restored: ancilla_leak <= ANCILLA_LEAK_TOL,
        eigenvectors_tested,
        random_states_tested: random_states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::complete_graph;
    use crate::chain::analyze;
    use nalgebra::DMatrix;

    fn kn(n: usize) -> (crate::chain::MarkovChain, crate::chain::ChainAnalysis) {
        let c = complete_graph(n).unwrap();
        let a = analyze(&c).unwrap();
        (c, a)
    }

    #[test]
    fn qft_matches_dense_transform() {
        // Apply the gate-level transform to each basis state of a pure
        // ancilla register (edge dimension 1) and compare against the
        // explicit Fourier matrix (1/√N)·ω^{xy}.
        for s in 1..=4 {
            let n = 1usize << s;
            let dense = DMatrix::from_fn(n, n, |y, x| {
                Complex64::from_polar(
                    1.0 / (n as f64).sqrt(),
                    2.0 * std::f64::consts::PI * (x as f64) * (y as f64) / n as f64,
                )
            });
            for x in 0..n {
                let mut reg = vec![Complex64::new(0.0, 0.0); n];
                reg[x] = Complex64::new(1.0, 0.0);
                qft_bank(&mut reg, 1, 0, s, false);
                for y in 0..n {
                    assert!(
                        (reg[y] - dense[(y, x)]).norm() < 1e-12,
                        "s={s} column {x} row {y}: {} vs {}",
                        reg[y],
                        dense[(y, x)]
                    );
                }
                // Inverse returns to the basis state.
                qft_bank(&mut reg, 1, 0, s, true);
                for (i, v) in reg.iter().enumerate() {
                    let expect = if i == x { 1.0 } else { 0.0 };
                    assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        // This exactness is what pins the stationary state: estimation of
        // phase 0 must return the banks to zero with no residue.
        let s = 3;
        let n = 1usize << s;
        let mut reg = vec![Complex64::new(0.0, 0.0); n];
        reg[0] = Complex64::new(1.0, 0.0);
        qft_bank(&mut reg, 1, 0, s, false);
        for v in &reg {
            assert!((v - Complex64::new(1.0 / (n as f64).sqrt(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn estimation_kernel_matches_closed_form() {
        for s in 1..=6 {
            for &phi in &[0.1, 0.5, 1.0, 2.0, 3.0] {
                let direct = estimation_kernel(s, phi);
                let m = (1u64 << s) as f64;
                let closed = ((m * phi / 2.0).sin() / (m * (phi / 2.0).sin())).abs();
                assert!((direct - closed).abs() < 1e-12);
            }
            assert!((estimation_kernel(s, 0.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_state_is_exactly_fixed() {
        let (c, a) = kn(3);
        let op = WalkOperator::new(&c, &a);
        let refl =
            PhaseEstimationReflection::new(&op, ReflectionConfig { s: 3, k: 2 }).unwrap();
        let pi = op.stationary_state();
        let mut reg = refl.prepare_register(&pi);
        refl.apply(&mut reg);
        assert!(refl.ancilla_leak(&reg) < 1e-20);
        let out = refl.edge_slice(&reg, 0);
        for (u, v) in out.amps().iter().zip(pi.amps()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn walk_call_count_is_exact() {
        let (c, a) = kn(3);
        let op = WalkOperator::new(&c, &a);
        for (s, k) in [(1, 1), (2, 3), (3, 2), (4, 1)] {
            let refl =
                PhaseEstimationReflection::new(&op, ReflectionConfig { s, k }).unwrap();
            let mut reg = refl.prepare_register(&op.stationary_state());
            let calls = refl.apply(&mut reg);
            assert_eq!(calls, 2 * k as u64 * ((1u64 << s) - 1));
            assert_eq!(calls, refl.walk_calls_per_application());
        }
    }

    #[test]
    fn eigenvector_residual_matches_kernel_formula() {
        // On an eigenvector with phase φ the deviation from the ideal
        // reflection must be 2|α(φ)|^k to numerical precision: this pins
        // the whole circuit (powers, Fourier ordering, flip, uncompute).
        let (c, a) = kn(4);
        let op = WalkOperator::new(&c, &a);
        let disc = discriminant_spectrum(&c, &a).unwrap();
        let eigen = walk_eigenbasis(&op, &disc);
        for (s, k) in [(2, 1), (3, 2), (2, 3)] {
            let refl =
                PhaseEstimationReflection::new(&op, ReflectionConfig { s, k }).unwrap();
            for ev in &eigen {
                if ev.phase.abs() < 1e-12 {
                    continue;
                }
                let mut reg = refl.prepare_register(&ev.state);
                refl.apply(&mut reg);
                for (r, amp) in reg.iter_mut().zip(ev.state.amps()) {
                    *r += amp;
                }
                let measured = reg.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let expect =
                    2.0 * estimation_kernel(s, ev.phase).powi(k as i32);
                assert!(
                    (measured - expect).abs() < 1e-9,
                    "s={s} k={k} phase={}: measured {measured}, kernel {expect}",
                    ev.phase
                );
            }
        }
    }

    #[test]
    fn error_suite_reports_consistent_numbers() {
        let (c, a) = kn(4);
        let report = reflection_error_suite(
            &c,
            &a,
            ReflectionConfig { s: 3, k: 2 },
            10,
            0xE1DE,
        )
        .unwrap();
        assert_eq!(report.controlled_walk_calls, 2 * 2 * 7);
        assert!(report.ancilla_restored);
        assert!(report.stationary_deviation < 1e-10);
        // Eigenvector error equals the analytic residual; random states
        // decompose over the eigenbasis with orthogonal junk, so they can
        // only do better.
        assert!((report.worst_eigenvector_error - report.predicted_error).abs() < 1e-9);
        assert!(report.worst_random_error <= report.worst_eigenvector_error + 1e-9);
        assert_eq!(report.eigenvectors_tested, 6);
    }

    #[test]
    fn error_shrinks_with_wider_banks_and_more_banks() {
        let (c, a) = kn(4);
        let mut last = f64::INFINITY;
        for s in 2..=5 {
            let r =
                reflection_error_suite(&c, &a, ReflectionConfig { s, k: 1 }, 5, 7).unwrap();
            assert!(
                r.measured_error <= last + 1e-9,
                "s={s}: {} after {}",
                r.measured_error,
                last
            );
            last = r.measured_error;
        }
        // Recommended width drives the error under the 4·2^{-k} budget.
        let gap = 2.0 * (1.0f64 / 3.0).acos();
        let s = ReflectionConfig::recommended_s(gap).unwrap();
        for k in 1..=3 {
            let r = reflection_error_suite(&c, &a, ReflectionConfig { s, k }, 5, 7).unwrap();
            assert!(
                r.measured_error <= 4.0 * 0.5f64.powi(k as i32),
                "k={k}: {}",
                r.measured_error
            );
        }
    }

    #[test]
    fn exact_reflection_fixes_pi_and_negates_complement() {
        use rand::SeedableRng;
        let (c, a) = kn(5);
        let op = WalkOperator::new(&c, &a);
        let pi = op.stationary_state();
        let mut s = pi.clone();
        exact_reflection(&pi, &mut s);
        for (u, v) in s.amps().iter().zip(pi.amps()) {
            assert!((u - v).norm() < 1e-12);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut any = EdgeState::random_normalized(5, &mut rng);
        let overlap = pi.inner(&any);
        any.axpy(-overlap, &pi); // now orthogonal to π
        let before = any.clone();
        exact_reflection(&pi, &mut any);
        for (u, v) in any.amps().iter().zip(before.amps()) {
            assert!((u + v).norm() < 1e-11);
        }
    }

    #[test]
    fn capacity_and_parameter_errors() {
        let (c, a) = kn(4);
        let op = WalkOperator::new(&c, &a);
        assert!(matches!(
            PhaseEstimationReflection::new(&op, ReflectionConfig { s: 0, k: 1 }),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            PhaseEstimationReflection::new(&op, ReflectionConfig { s: 8, k: 4 }),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn recommended_width_scales_with_gap() {
        // Δ = π → 2π/Δ = 2 → s = 1 + 2.
        assert_eq!(ReflectionConfig::recommended_s(std::f64::consts::PI).unwrap(), 3);
        // K₄ gap 2.4619: 2π/Δ ≈ 2.55 → ⌈log₂⌉ = 2 → s = 4.
        assert_eq!(ReflectionConfig::recommended_s(2.4619188346815495).unwrap(), 4);
        assert!(ReflectionConfig::recommended_s(0.0).is_err());
    }
}
