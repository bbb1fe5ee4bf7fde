//! Finite Markov chains: representation, validation, and spectral analysis.
//!
//! A chain is a row-stochastic matrix `P` over a finite ordered state set.
//! [`analyze`] certifies ergodicity (irreducible + aperiodic), extracts the
//! stationary distribution by a dense direct solve, reports the eigenvalue
//! gap, and builds the time-reversed chain `P*`; everything downstream
//! (quantization, search guarantees) consumes these certified quantities.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonio;

/// Row sums may deviate from 1 by at most this much.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Residual allowed in the stationary equation `π·P = π`.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Entrywise tolerance for detailed balance / `P* = P` comparison.
pub const REVERSIBLE_TOL: f64 = 1e-10;
/// The top eigenvalue of a stochastic matrix must be 1 within this.
pub const UNIT_EIGENVALUE_TOL: f64 = 1e-9;
/// Iteration budget for eigenvalue/Schur/SVD routines. The unbounded
/// library variants can spin forever on spectra with high multiplicity
/// (a complete-graph chain is enough to trigger it), so every iterative
/// decomposition in this crate runs with a finite budget and reports
/// non-convergence as an error instead of hanging.
pub const EIGEN_MAX_ITER: usize = 100_000;

/// A finite Markov chain: ordered state labels plus a row-stochastic matrix.
///
/// Row `x` of `P` is the outgoing distribution of state `x`. Labels are
/// opaque display strings; all numeric work is positional.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    labels: Vec<String>,
    p: DMatrix<f64>,
}

impl MarkovChain {
    /// Validate and wrap a transition matrix.
    ///
    /// Rejects non-square data, label/matrix size mismatch, fewer than two
    /// states, negative entries, and rows that do not sum to 1 within
    /// [`ROW_SUM_TOL`].
    pub fn new(labels: Vec<String>, p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() != p.ncols() {
            return Err(Error::InvalidChain(format!(
                "transition matrix must be square, got {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        if labels.len() != p.nrows() {
            return Err(Error::InvalidChain(format!(
                "{} labels for {} states",
                labels.len(),
                p.nrows()
            )));
        }
        if p.nrows() < 2 {
            return Err(Error::InvalidChain("need at least two states".into()));
        }
        for x in 0..p.nrows() {
            let mut sum = 0.0;
            for y in 0..p.ncols() {
                let v = p[(x, y)];
                if v < 0.0 || !v.is_finite() {
                    return Err(Error::InvalidChain(format!(
                        "entry P[{},{}] = {} is not a probability",
                        x, y, v
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChain(format!(
                    "row {} sums to {} (off by {:e})",
                    x,
                    sum,
                    sum - 1.0
                )));
            }
        }
        Ok(Self { labels, p })
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// State labels in index order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Position of a label, if present.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The transition matrix.
    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Single transition probability `P[x,y]`.
    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.p[(x, y)]
    }

    /// Serialize to the canonical `{"states": [...], "P": [[...]]}` JSON.
    ///
    /// Floats carry 17 significant digits, so parse → emit is a byte-level
    /// fixed point and emit → parse reconstructs the exact matrix.
    pub fn to_json_string(&self) -> Result<String> {
        let rows: Vec<Vec<f64>> = (0..self.n())
            .map(|x| (0..self.n()).map(|y| self.p[(x, y)]).collect())
            .collect();
        jsonio::to_json_string(&ChainJson {
            states: self.labels.clone(),
            p: rows,
        })
    }

    /// Parse and validate a chain from its canonical JSON form.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ChainJson = serde_json::from_str(s)?;
        let n = raw.states.len();
        if raw.p.len() != n || raw.p.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidChain(
                "matrix shape does not match state count".into(),
            ));
        }
        let flat: Vec<f64> = raw.p.iter().flatten().copied().collect();
        MarkovChain::new(raw.states, DMatrix::from_row_slice(n, n, &flat))
    }
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    states: Vec<String>,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
}

/// Certified spectral facts about an ergodic chain.
#[derive(Debug, Clone)]
pub struct ChainAnalysis {
    /// Stationary distribution π, strictly positive, summing to 1.
    pub stationary: Vec<f64>,
    /// Eigenvalue gap `1 − |λ₂|` over the second-largest magnitude; in (0,1].
    pub delta: f64,
    /// Signed gap `1 − λ₂` over the second-largest eigenvalue itself.
    /// Present only when the spectrum is certified real (symmetric or
    /// reversible chains); exceeds 1 when λ₂ is negative.
    pub signed_gap: Option<f64>,
    /// Whether `P* = P` within [`REVERSIBLE_TOL`].
    pub reversible: bool,
    /// Always true on success; analysis rejects non-ergodic chains.
    pub ergodic: bool,
    /// Time-reversed chain, `P*[y,x] = π_x P[x,y] / π_y`.
    pub time_reversal: DMatrix<f64>,
}

/// Analyze an ergodic chain.
///
/// Certifies irreducibility by two-sided reachability over the support
/// digraph and aperiodicity by the gcd of closed-walk length differences;
/// reducible or periodic chains are rejected with [`Error::NotErgodic`].
/// The stationary vector comes from a dense direct solve of the fixed-point
/// system with a sum-to-one normalization row (no power iteration), checked
/// against `π·P = π` within [`STATIONARY_TOL`].
pub fn analyze(chain: &MarkovChain) -> Result<ChainAnalysis> {
    let n = chain.n();
    let p = chain.p();

    if !strongly_connected(p) {
        return Err(Error::NotErgodic("support digraph is reducible".into()));
    }
    let period = support_period(p);
    if period != 1 {
        return Err(Error::NotErgodic(format!("chain has period {}", period)));
    }

    let stationary = stationary_distribution(p)?;

    let mut time_reversal = DMatrix::zeros(n, n);
    for y in 0..n {
        for x in 0..n {
            time_reversal[(y, x)] = stationary[x] * p[(x, y)] / stationary[y];
        }
    }
    let reversible = (0..n).all(|x| {
        (0..n).all(|y| (time_reversal[(x, y)] - p[(x, y)]).abs() <= REVERSIBLE_TOL)
    });

    let (mut mags, signed) = eigenvalue_spectrum(p, &stationary, reversible)?;
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if (mags[0] - 1.0).abs() > UNIT_EIGENVALUE_TOL {
        return Err(Error::InvalidChain(format!(
            "top eigenvalue magnitude {} is not 1",
            mags[0]
        )));
    }
    let delta = 1.0 - mags[1];
    let signed_gap = signed.map(|mut ev| {
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        1.0 - ev[1]
    });

    Ok(ChainAnalysis {
        stationary,
        delta,
        signed_gap,
        reversible,
        ergodic: true,
        time_reversal,
    })
}

/// Eigenvalue magnitudes of `P` (plus the signed eigenvalues whenever the
/// spectrum is certified real), routed through the most robust
/// decomposition available: the symmetric tridiagonal solver for a
/// symmetric matrix, the same solver on the symmetric similarity
/// transform `diag(√π)·P·diag(1/√π)` for a reversible chain (it shares
/// the spectrum of `P`), and a bounded real Schur iteration otherwise.
fn eigenvalue_spectrum(
    p: &DMatrix<f64>,
    stationary: &[f64],
    reversible: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = p.nrows();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((p[(i, j)] - p[(j, i)]).abs());
        }
    }
    let symmetric_form = if asym <= 1e-13 {
        Some(p.clone())
    } else if reversible {
        Some(DMatrix::from_fn(n, n, |x, y| {
            stationary[x].sqrt() * p[(x, y)] / stationary[y].sqrt()
        }))
    } else {
        None
    };
    match symmetric_form {
        // Only the lower triangle is read, so residual asymmetry from the
        // similarity transform (bounded by the reversibility tolerance)
        // is ignored rather than amplified.
        Some(m) => {
            let eig = m
                .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER)
                .ok_or_else(|| {
                    Error::InvalidChain(
                        "symmetric eigenvalue iteration did not converge".into(),
                    )
                })?;
            let signed: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            Ok((signed.iter().map(|v| v.abs()).collect(), Some(signed)))
        }
        None => {
            let schur = p
                .clone()
                .try_schur(f64::EPSILON, EIGEN_MAX_ITER)
                .ok_or_else(|| {
                    Error::InvalidChain("eigenvalue iteration did not converge".into())
                })?;
            let mags = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
            Ok((mags, None))
        }
    }
}

/// Solve `πᵀ(P − I) = 0, Σπ = 1` by replacing one equation with the
/// normalization row. Valid because the fixed vector of an irreducible
/// chain is simple, so the bordered system is nonsingular.
fn stationary_distribution(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    let mut a = p.transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = nalgebra::DVector::zeros(n);
    b[n - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidChain("stationary solve is singular".into()))?;
    let sum: f64 = sol.iter().sum();
    let pi: Vec<f64> = sol.iter().map(|v| v / sum).collect();

    if pi.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidChain(
            "stationary distribution has a non-positive entry".into(),
        ));
    }
    for y in 0..n {
        let lhs: f64 = (0..n).map(|x| pi[x] * p[(x, y)]).sum();
        if (lhs - pi[y]).abs() > STATIONARY_TOL {
            return Err(Error::InvalidChain(format!(
                "stationary residual {:e} at state {}",
                lhs - pi[y],
                y
            )));
        }
    }
    Ok(pi)
}

fn support_neighbors(p: &DMatrix<f64>, transpose: bool) -> Vec<Vec<usize>> {
    let n = p.nrows();
    let mut adj = vec![Vec::new(); n];
    for x in 0..n {
        for y in 0..n {
            if p[(x, y)] > 0.0 {
                if transpose {
                    adj[y].push(x);
                } else {
                    adj[x].push(y);
                }
            }
        }
    }
    adj
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|b| b)
}

fn strongly_connected(p: &DMatrix<f64>) -> bool {
    reaches_all(&support_neighbors(p, false)) && reaches_all(&support_neighbors(p, true))
}

/// Period of a strongly connected support digraph: the gcd of
/// `level[u] + 1 − level[v]` over all support edges `u → v`, where levels
/// are BFS distances from an arbitrary root.
fn support_period(p: &DMatrix<f64>) -> u64 {
    let adj = support_neighbors(p, false);
    let n = adj.len();
    let mut level = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    level[0] = 0;
    queue.push_back(0usize);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: u64 = 0;
    for u in 0..n {
        for &v in &adj[u] {
            let diff = level[u] as i64 + 1 - level[v] as i64;
            g = gcd(g, diff.unsigned_abs());
        }
    }
    g.max(1)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
