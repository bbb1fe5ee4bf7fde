//! Quantization of an ergodic chain into a unitary walk on its edge space.
//!
//! The walk is the product of two real reflections. With `p̂_x` the
//! entrywise square root of row `x` of `P` and `p̂*_y` that of row `y` of
//! the time reversal `P*`, the *outgoing span* is spanned by `|x⟩|p̂_x⟩`
//! and the *incoming span* by `|p̂*_y⟩|y⟩`; the walk reflects through the
//! outgoing span, then through the incoming span.
//!
//! The discriminant matrix `D[x,y] = √(P[x,y]·P*[y,x])` is the overlap
//! matrix of those two orthonormal families. Its singular values `cos θ`
//! fix the walk spectrum on the invariant subspace (the sum of the spans):
//! rotation pairs `e^{±2iθ}` for `cos θ` strictly inside (0,1), `+1` on the
//! intersection of the spans, `−1` on the two one-sided complements. Both
//! the prediction (SVD route) and the direct route (eigendecomposition of
//! the walk restricted to the invariant subspace) are exposed so they can
//! be compared as multisets.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{ChainAnalysis, MarkovChain};
use crate::edge::EdgeState;
use crate::error::{Error, Result};

/// Explicit dense walk matrices are only built up to this many chain states.
pub const DENSE_STATE_CAP: usize = 64;
/// Default cap on the edge dimension for direct eigenphase extraction.
pub const DEFAULT_DIRECT_CAP: usize = 8192;
/// Singular values this close to 1 count as exactly 1 (span intersection).
pub const SINGULAR_UNIT_TOL: f64 = 1e-9;
/// Singular values at or below this count as exactly 0.
pub const SINGULAR_ZERO_TOL: f64 = 1e-9;
/// Predicted and directly measured eigenphase multisets must agree to this.
pub const PHASE_MATCH_TOL: f64 = 1e-8;
/// Restriction eigenvalues within this of ±1 read as phases exactly 0/π.
/// `arccos` has an infinite derivative at ±1, so round-off of order 1e-15
/// in an exact ±1 eigenvalue would otherwise smear the phase by ~1e-8.
pub const PHASE_SNAP_TOL: f64 = 1e-12;
/// Span vectors with residual below this are linearly dependent and dropped.
pub const SPAN_DROP_TOL: f64 = 1e-8;

/// The quantized walk operator of an ergodic chain.
///
/// Always applies matrix-free (two blocked reflections, `O(n²)` per
/// application); an explicit edge-space matrix can be attached for
/// cross-checking small instances.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    n: usize,
    stationary: Vec<f64>,
    reversible: bool,
    /// `sqrt_p[x·n + y] = √P[x,y]`.
    sqrt_p: Vec<f64>,
    /// `sqrt_ps[y·n + x] = √P*[y,x]`.
    sqrt_ps: Vec<f64>,
    dense: Option<DMatrix<f64>>,
}

impl WalkOperator {
    /// Quantize an analyzed chain (matrix-free mode).
    pub fn new(chain: &MarkovChain, analysis: &ChainAnalysis) -> Self {
        let n = chain.n();
        let mut sqrt_p = vec![0.0; n * n];
        let mut sqrt_ps = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                sqrt_p[x * n + y] = chain.transition(x, y).sqrt();
                sqrt_ps[y * n + x] = analysis.time_reversal[(y, x)].sqrt();
            }
        }
        Self {
            n,
            stationary: analysis.stationary.clone(),
            reversible: analysis.reversible,
            sqrt_p,
            sqrt_ps,
            dense: None,
        }
    }

    /// Quantize and additionally build the explicit `n²×n²` walk matrix.
    ///
    /// The dense matrix is assembled from the two reflection matrices by a
    /// real matrix product, a deliberately independent construction from
    /// the blocked matrix-free path.
    pub fn with_dense(chain: &MarkovChain, analysis: &ChainAnalysis) -> Result<Self> {
        let n = chain.n();
        if n > DENSE_STATE_CAP {
            return Err(Error::CapacityExceeded {
                what: "dense walk matrix states",
                needed: n,
                cap: DENSE_STATE_CAP,
            });
        }
        let mut op = Self::new(chain, analysis);
        let d = n * n;
        let mut ra = DMatrix::from_diagonal_element(d, d, -1.0);
        for x in 0..n {
            for y in 0..n {
                for y2 in 0..n {
                    ra[(x * n + y, x * n + y2)] +=
                        2.0 * op.sqrt_p[x * n + y] * op.sqrt_p[x * n + y2];
                }
            }
        }
        let mut rb = DMatrix::from_diagonal_element(d, d, -1.0);
        for y in 0..n {
            for x in 0..n {
                for x2 in 0..n {
                    rb[(x * n + y, x2 * n + y)] +=
                        2.0 * op.sqrt_ps[y * n + x] * op.sqrt_ps[y * n + x2];
                }
            }
        }
        op.dense = Some(rb * ra);
        Ok(op)
    }

    /// Number of chain states.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stationary distribution of the underlying chain.
    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Whether the underlying chain is reversible.
    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    /// The explicit walk matrix, if this operator was built with one.
    pub fn dense_matrix(&self) -> Option<&DMatrix<f64>> {
        self.dense.as_ref()
    }

    /// `√P[x,y]`.
    pub fn sqrt_p(&self, x: usize, y: usize) -> f64 {
        self.sqrt_p[x * self.n + y]
    }

    /// `√P*[y,x]`.
    pub fn sqrt_ps(&self, y: usize, x: usize) -> f64 {
        self.sqrt_ps[y * self.n + x]
    }

    /// The stationary edge state: amplitude `√(π_x·P[x,y])` on edge (x, y).
    ///
    /// Algebraically identical whether assembled from outgoing rows
    /// weighted by `√π_x` or incoming rows weighted by `√π_y`; it lies in
    /// both spans and the walk fixes it.
    pub fn stationary_state(&self) -> EdgeState {
        let n = self.n;
        let mut s = EdgeState::zeros(n);
        for x in 0..n {
            let w = self.stationary[x].sqrt();
            for y in 0..n {
                *s.amp_mut(x, y) = Complex64::new(w * self.sqrt_p[x * n + y], 0.0);
            }
        }
        s
    }

    /// Reflect `amps` through the outgoing span, in place.
    ///
    /// Per source block `x`: `ψ_x ← 2⟨p̂_x, ψ_x⟩·p̂_x − ψ_x`.
    pub fn reflect_outgoing_slice(&self, amps: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(amps.len(), n * n);
        for x in 0..n {
            let row = &self.sqrt_p[x * n..(x + 1) * n];
            let block = &mut amps[x * n..(x + 1) * n];
            let mut c = Complex64::new(0.0, 0.0);
            for (a, &w) in block.iter().zip(row) {
                c += a * w;
            }
            c *= 2.0;
            for (a, &w) in block.iter_mut().zip(row) {
                *a = c * w - *a;
            }
        }
    }

    /// Reflect `amps` through the incoming span, in place.
    ///
    /// Per target column `y`: `ψ_·y ← 2⟨p̂*_y, ψ_·y⟩·p̂*_y − ψ_·y`.
    pub fn reflect_incoming_slice(&self, amps: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(amps.len(), n * n);
        for y in 0..n {
            let row = &self.sqrt_ps[y * n..(y + 1) * n];
            let mut c = Complex64::new(0.0, 0.0);
            for x in 0..n {
                c += amps[x * n + y] * row[x];
            }
            c *= 2.0;
            for x in 0..n {
                let a = &mut amps[x * n + y];
                *a = c * row[x] - *a;
            }
        }
    }

    /// One walk step on a raw slice: outgoing reflection, then incoming.
    /// Always matrix-free; this is the hot path for register simulation.
    pub fn apply_slice(&self, amps: &mut [Complex64]) {
        self.reflect_outgoing_slice(amps);
        self.reflect_incoming_slice(amps);
    }

    /// Inverse walk step on a raw slice (reflections are involutions).
    pub fn apply_inverse_slice(&self, amps: &mut [Complex64]) {
        self.reflect_incoming_slice(amps);
        self.reflect_outgoing_slice(amps);
    }

    /// One walk step on an edge state. Uses the explicit matrix when this
    /// operator carries one, otherwise the matrix-free path.
    pub fn apply(&self, state: &mut EdgeState) {
        match &self.dense {
            Some(w) => dense_apply(w, state),
            None => self.apply_slice(state.amps_mut()),
        }
    }

    /// Inverse walk step on an edge state.
    pub fn apply_inverse(&self, state: &mut EdgeState) {
        match &self.dense {
            // The walk is real orthogonal, so the inverse is the transpose.
            Some(w) => dense_apply(&w.transpose(), state),
            None => self.apply_inverse_slice(state.amps_mut()),
        }
    }

    /// Embed a real coefficient vector into the outgoing span:
    /// `Σ_x c_x |x⟩|p̂_x⟩`.
    pub fn embed_outgoing(&self, coeffs: &[f64]) -> EdgeState {
        let n = self.n;
        assert_eq!(coeffs.len(), n);
        let mut s = EdgeState::zeros(n);
        for x in 0..n {
            for y in 0..n {
                *s.amp_mut(x, y) = Complex64::new(coeffs[x] * self.sqrt_p[x * n + y], 0.0);
            }
        }
        s
    }

    /// Embed a real coefficient vector into the incoming span:
    /// `Σ_y c_y |p̂*_y⟩|y⟩`.
    pub fn embed_incoming(&self, coeffs: &[f64]) -> EdgeState {
        let n = self.n;
        assert_eq!(coeffs.len(), n);
        let mut s = EdgeState::zeros(n);
        for y in 0..n {
            for x in 0..n {
                *s.amp_mut(x, y) = Complex64::new(coeffs[y] * self.sqrt_ps[y * n + x], 0.0);
            }
        }
        s
    }
}

fn dense_apply(w: &DMatrix<f64>, state: &mut EdgeState) {
    let d = w.nrows();
    let amps = state.amps_mut();
    debug_assert_eq!(amps.len(), d);
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    // Column-major traversal: out += column_j · amps[j].
    for j in 0..d {
        let a = amps[j];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let col = w.column(j);
        for i in 0..d {
            out[i] += col[i] * a;
        }
    }
    amps.copy_from_slice(&out);
}

/// The discriminant matrix `D[x,y] = √(P[x,y]·P*[y,x])`.
///
/// Equals `diag(√π)·P·diag(√π)⁻¹` entrywise, so it is similar to `P`; for
/// reversible chains it is symmetric and its singular values are the
/// eigenvalue magnitudes of `P`.
pub fn discriminant(chain: &MarkovChain, analysis: &ChainAnalysis) -> DMatrix<f64> {
    let n = chain.n();
    DMatrix::from_fn(n, n, |x, y| {
        (chain.transition(x, y) * analysis.time_reversal[(y, x)]).sqrt()
    })
}

/// Sorted singular triples of the discriminant, with the classification
/// counts and the walk phase gap they induce.
#[derive(Debug, Clone)]
pub struct DiscriminantSpectrum {
    /// Singular values, descending, clamped into [0, 1].
    pub singular_values: Vec<f64>,
    /// Left singular vectors as matrix columns, same order.
    pub left: DMatrix<f64>,
    /// Right singular vectors as matrix columns, same order.
    pub right: DMatrix<f64>,
    /// How many singular values sit within [`SINGULAR_UNIT_TOL`] of 1.
    pub unit_count: usize,
    /// How many singular values sit at or below [`SINGULAR_ZERO_TOL`].
    pub zero_count: usize,
    /// `Δ = 2·arccos(largest singular value strictly inside (0,1))`,
    /// or π when no singular value is interior.
    pub phase_gap: f64,
}

impl DiscriminantSpectrum {
    /// The walk eigenphase multiset on the invariant subspace predicted by
    /// the singular values: `|phase|` values sorted ascending, with `2θ`
    /// twice per interior `cos θ` (a rotation pair), 0 once per unit
    /// singular value, and π twice per zero singular value.
    pub fn predicted_phase_multiset(&self) -> Vec<f64> {
        let mut phases = Vec::new();
        for &s in &self.singular_values {
            if s >= 1.0 - SINGULAR_UNIT_TOL {
                phases.push(0.0);
            } else if s <= SINGULAR_ZERO_TOL {
                phases.push(std::f64::consts::PI);
                phases.push(std::f64::consts::PI);
            } else {
                let two_theta = 2.0 * s.acos();
                phases.push(two_theta);
                phases.push(two_theta);
            }
        }
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        phases
    }
}

/// Compute the discriminant spectrum of an analyzed chain.
pub fn discriminant_spectrum(
    chain: &MarkovChain,
    analysis: &ChainAnalysis,
) -> Result<DiscriminantSpectrum> {
    let n = chain.n();
    let d = discriminant(chain, analysis);
    let svd = d
        .try_svd(true, true, f64::EPSILON, crate::chain::EIGEN_MAX_ITER)
        .ok_or_else(|| {
            Error::InvalidChain("discriminant singular value iteration did not converge".into())
        })?;
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..n).collect();
    let sv = &svd.singular_values;
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());

    let mut singular_values = Vec::with_capacity(n);
    let mut left = DMatrix::zeros(n, n);
    let mut right = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let s = sv[i];
        if s > 1.0 + 1e-9 {
            return Err(Error::InvalidChain(format!(
                "discriminant singular value {} exceeds 1",
                s
            )));
        }
        singular_values.push(s.clamp(0.0, 1.0));
        left.set_column(k, &u.column(i));
        right.set_column(k, &v_t.row(i).transpose());
    }

    let unit_count = singular_values
        .iter()
        .filter(|&&s| s >= 1.0 - SINGULAR_UNIT_TOL)
        .count();
    let zero_count = singular_values
        .iter()
        .filter(|&&s| s <= SINGULAR_ZERO_TOL)
        .count();
    let phase_gap = singular_values
        .iter()
        .find(|&&s| s < 1.0 - SINGULAR_UNIT_TOL && s > SINGULAR_ZERO_TOL)
        .map(|&s| 2.0 * s.acos())
        .unwrap_or(std::f64::consts::PI);

    Ok(DiscriminantSpectrum {
        singular_values,
        left,
        right,
        unit_count,
        zero_count,
        phase_gap,
    })
}

/// One walk eigenvector with its eigenphase (eigenvalue `e^{i·phase}`).
#[derive(Debug, Clone)]
pub struct WalkEigenvector {
    pub phase: f64,
    pub state: EdgeState,
}

/// Explicit orthonormal eigenbasis of the walk on its invariant subspace,
/// assembled from the singular triples.
///
/// For an interior singular triple `(u, cos θ, v)` the plane spanned by the
/// embedded vectors `a = Σu_x|x⟩|p̂_x⟩`, `b = Σv_y|p̂*_y⟩|y⟩` carries the
/// rotation pair `(a − e^{±iθ}b)/(√2·sin θ)` with phases `±2θ`. Unit
/// singular values give fixed vectors (`a = b`), zero singular values give
/// one `−1` eigenvector from each side.
pub fn walk_eigenbasis(
    op: &WalkOperator,
    disc: &DiscriminantSpectrum,
) -> Vec<WalkEigenvector> {
    let n = op.n();
    let mut out = Vec::new();
    for k in 0..n {
        let s = disc.singular_values[k];
        let u: Vec<f64> = disc.left.column(k).iter().copied().collect();
        let v: Vec<f64> = disc.right.column(k).iter().copied().collect();
        if s >= 1.0 - SINGULAR_UNIT_TOL {
            out.push(WalkEigenvector {
                phase: 0.0,
                state: op.embed_outgoing(&u),
            });
        } else if s <= SINGULAR_ZERO_TOL {
            out.push(WalkEigenvector {
                phase: std::f64::consts::PI,
                state: op.embed_outgoing(&u),
            });
            out.push(WalkEigenvector {
                phase: std::f64::consts::PI,
                state: op.embed_incoming(&v),
            });
        } else {
            let theta = s.acos();
            let a = op.embed_outgoing(&u);
            let b = op.embed_incoming(&v);
            let scale = 1.0 / (std::f64::consts::SQRT_2 * theta.sin());
            for sign in [1.0, -1.0] {
                let mut w = a.clone();
                w.axpy(-Complex64::from_polar(1.0, sign * theta), &b);
                w.scale(Complex64::new(scale, 0.0));
                out.push(WalkEigenvector {
                    phase: sign * 2.0 * theta,
                    state: w,
                });
            }
        }
    }
    out
}

/// Orthonormal real basis of the walk's invariant subspace (sum of the two
/// spans), by Gram-Schmidt with re-orthogonalization over the 2n spanning
/// vectors. The `n` outgoing vectors are orthonormal already and enter
/// as-is; incoming vectors inside the accumulated span are dropped.
pub fn invariant_span_basis(op: &WalkOperator) -> Vec<EdgeState> {
    let n = op.n();
    let mut basis: Vec<EdgeState> = Vec::with_capacity(2 * n);
    let mut unit = vec![0.0; n];
    for x in 0..n {
        unit[x] = 1.0;
        basis.push(op.embed_outgoing(&unit));
        unit[x] = 0.0;
    }
    for y in 0..n {
        unit[y] = 1.0;
        let mut w = op.embed_incoming(&unit);
        unit[y] = 0.0;
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&w);
                w.axpy(-c, b);
            }
        }
        if w.norm() > SPAN_DROP_TOL {
            w.normalize();
            basis.push(w);
        }
    }
    basis
}

/// The walk restricted to the invariant subspace, as a real matrix in the
/// given orthonormal basis.
pub fn restrict_walk(op: &WalkOperator, basis: &[EdgeState]) -> DMatrix<f64> {
    let m = basis.len();
    let mut w_cols: Vec<EdgeState> = Vec::with_capacity(m);
    for b in basis {
        let mut wb = b.clone();
        op.apply_slice(wb.amps_mut());
        w_cols.push(wb);
    }
    DMatrix::from_fn(m, m, |i, j| basis[i].inner(&w_cols[j]).re)
}

/// Eigenphase magnitudes of the restricted walk, sorted ascending.
///
/// This is the direct route: no singular values involved, just the actual
/// operator in an explicit basis. The restriction of the walk to its
/// invariant subspace in an orthonormal basis is a real orthogonal matrix;
/// after verifying that, the phase magnitudes are read from the symmetric
/// part `(M + Mᵀ)/2`, whose eigenvalues are exactly `cos` of the phases
/// (a rotation pair `e^{±iφ}` contributes `cos φ` twice, fixed vectors
/// contribute ±1). That keeps the computation inside the symmetric
/// solver, which is robust to the heavy eigenvalue multiplicities these
/// operators have.
pub fn walk_eigenphases_direct(op: &WalkOperator, basis: &[EdgeState]) -> Result<Vec<f64>> {
    let m = restrict_walk(op, basis);
    let dim = m.nrows();
    let gram = m.transpose() * &m;
    let mut gram_dev = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let expect = if i == j { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((gram[(i, j)] - expect).abs());
        }
    }
    if gram_dev > 1e-8 {
        return Err(Error::InvalidChain(format!(
            "restricted walk is not orthogonal (deviation {gram_dev:e}); \
             the invariant basis is inconsistent"
        )));
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, crate::chain::EIGEN_MAX_ITER)
        .ok_or_else(|| {
            Error::InvalidChain("restricted walk eigenvalue iteration did not converge".into())
        })?;
    let mut phases: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|v| {
            if *v >= 1.0 - PHASE_SNAP_TOL {
                0.0
            } else if *v <= -1.0 + PHASE_SNAP_TOL {
                std::f64::consts::PI
            } else {
                v.clamp(-1.0, 1.0).acos()
            }
        })
        .collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(phases)
}

/// How [`walk_spectrum`] treats the direct eigenphase computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectMode {
    /// Compute when the edge dimension fits the cap, skip otherwise.
    Auto,
    /// Error with `CapacityExceeded` when the edge dimension is over cap.
    Require,
    /// Never compute.
    Skip,
}

/// Options for [`walk_spectrum`].
#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    pub direct: DirectMode,
    /// Cap on the edge dimension `n²` for the direct computation.
    pub direct_cap: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            direct: DirectMode::Auto,
            direct_cap: DEFAULT_DIRECT_CAP,
        }
    }
}

/// Full spectral report for one chain: gap data, singular values, the
/// predicted eigenphase multiset, and (within capacity) the directly
/// measured multiset with its deviation and the fixed-vector fidelity.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub states: usize,
    /// Chain eigenvalue gap `δ` (`1 − |λ₂|`).
    pub delta: f64,
    /// Signed gap `1 − λ₂`, when the chain spectrum is certified real.
    pub signed_gap: Option<f64>,
    pub reversible: bool,
    pub singular_values: Vec<f64>,
    pub unit_singular_count: usize,
    pub zero_singular_count: usize,
    /// Walk phase gap `Δ`.
    pub phase_gap: f64,
    /// `2√δ`; for reversible chains the phase gap must not fall below it.
    pub gap_lower_bound: f64,
    /// `Δ − 2√δ`.
    pub gap_margin: f64,
    pub predicted_phases: Vec<f64>,
    pub measured_phases: Option<Vec<f64>>,
    /// Max elementwise gap between the sorted multisets.
    pub max_phase_deviation: Option<f64>,
    /// Overlap of the measured unit-phase eigenvector with the stationary
    /// edge state; `None` when the unit eigenspace is not one-dimensional.
    pub stationary_fidelity: Option<f64>,
}

/// Compute the spectral report of an analyzed chain.
pub fn walk_spectrum(
    chain: &MarkovChain,
    analysis: &ChainAnalysis,
    opts: SpectrumOptions,
) -> Result<SpectrumReport> {
    let n = chain.n();
    let disc = discriminant_spectrum(chain, analysis)?;
    let predicted = disc.predicted_phase_multiset();
    let op = WalkOperator::new(chain, analysis);

    let over_cap = n * n > opts.direct_cap;
    let run_direct = match opts.direct {
        DirectMode::Skip => false,
        DirectMode::Auto => !over_cap,
        DirectMode::Require => {
            if over_cap {
                return Err(Error::CapacityExceeded {
                    what: "direct eigenphase edge dimension",
                    needed: n * n,
                    cap: opts.direct_cap,
                });
            }
            true
        }
    };

    let mut measured_phases = None;
    let mut max_phase_deviation = None;
    let mut stationary_fidelity = None;
    if run_direct {
        let basis = invariant_span_basis(&op);
        if basis.len() != predicted.len() {
            return Err(Error::InvalidChain(format!(
                "invariant subspace dimension {} does not match the {} \
                 predicted eigenphases",
                basis.len(),
                predicted.len()
            )));
        }
        let measured = walk_eigenphases_direct(&op, &basis)?;
        let dev = predicted
            .iter()
            .zip(&measured)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if disc.unit_count == 1 {
            stationary_fidelity = unit_fixed_vector_fidelity(&op, &basis)?;
        }
        measured_phases = Some(measured);
        max_phase_deviation = Some(dev);
    }

    let delta = analysis.delta;
    let bound = 2.0 * delta.sqrt();
    Ok(SpectrumReport {
        states: n,
        delta,
        signed_gap: analysis.signed_gap,
        reversible: analysis.reversible,
        singular_values: disc.singular_values.clone(),
        unit_singular_count: disc.unit_count,
        zero_singular_count: disc.zero_count,
        phase_gap: disc.phase_gap,
        gap_lower_bound: bound,
        gap_margin: disc.phase_gap - bound,
        predicted_phases: predicted,
        measured_phases,
        max_phase_deviation,
        stationary_fidelity,
    })
}

/// Fidelity of the restricted walk's unit eigenvector against the
/// stationary state, via the null space of `M − I`. Returns `None` when
/// the unit eigenspace is not cleanly one-dimensional.
fn unit_fixed_vector_fidelity(
    op: &WalkOperator,
    basis: &[EdgeState],
) -> Result<Option<f64>> {
    let m = restrict_walk(op, basis);
    let dim = m.nrows();
    let shifted = m - DMatrix::identity(dim, dim);
    let svd = shifted
        .try_svd(false, true, f64::EPSILON, crate::chain::EIGEN_MAX_ITER)
        .ok_or_else(|| {
            Error::InvalidChain("fixed-vector singular value iteration did not converge".into())
        })?;
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap()
    });
    let smallest = svd.singular_values[idx[0]];
    let second = svd.singular_values[idx[1]];
    if smallest > 1e-7 || second < 1e-6 {
        return Ok(None);
    }
    let coeffs = v_t.row(idx[0]);
    let mut v = EdgeState::zeros(op.n());
    for (i, b) in basis.iter().enumerate() {
        v.axpy(Complex64::new(coeffs[i], 0.0), b);
    }
    v.normalize();
    let fid = op.stationary_state().inner(&v).norm();
    Ok(Some(fid))
}
