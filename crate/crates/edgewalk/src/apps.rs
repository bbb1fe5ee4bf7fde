//! Application-level search problems and their query-cost models.
//!
//! Two concrete problem builders wire the generic search loops of
//! [`crate::search`] to a *counted* input table, so the abstract cost units
//! reported by a search can be checked against literal table reads:
//!
//! * collision finding over a value table, walked on the r-subset chain
//!   built by [`crate::builders::johnson`], and
//! * unordered search over a 0/1 table, walked on the complete graph.
//!
//! Alongside the executable problems, a closed-form cost model covers six
//! walk applications (all constants set to one): collision finding,
//! matrix-product verification, associativity testing, triangle finding,
//! group-commutativity testing, and unordered search.  [`optimize_r`]
//! minimizes the per-problem cost over the integer subset size and
//! [`fitted_exponent`] fits the growth exponent of the optimized cost.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::builders;
use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::search::SearchOracle;

/// A value table addressed by 0-based element index, with counted reads.
///
/// [`query`](OracleInstance::query) is one classical read;
/// [`coherent`](OracleInstance::coherent) charges a batch of superposed
/// reads performed by one data-dependent unitary.  The
/// [`snapshot`](OracleInstance::snapshot) accessor bypasses the counter and
/// exists for bookkeeping the modeled algorithm never performs (problem
/// construction, verification of reported answers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleInstance {
    values: Vec<u64>,
    queries: u64,
}

impl OracleInstance {
    pub fn new(values: Vec<u64>) -> Self {
        Self { values, queries: 0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Read one cell and count one query.
    pub fn query(&mut self, element: usize) -> u64 {
        self.queries += 1;
        self.values[element]
    }

    /// Charge `batch` superposed reads without returning data.
    pub fn coherent(&mut self, batch: u64) {
        self.queries += batch;
    }

    /// Total queries charged so far.
    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Uncounted view of the full table (bookkeeping only).
    pub fn snapshot(&self) -> &[u64] {
        &self.values
    }

    /// Zero the query counter, keeping the table.
    pub fn reset(&mut self) {
        self.queries = 0;
    }
}

/// Scan the table in index order until the first collision and return its
/// 0-based pair, counting one query per cell visited (all `n` on a
/// collision-free table).
pub fn brute_force_collision(instance: &mut OracleInstance) -> Option<(usize, usize)> {
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for i in 0..instance.len() {
        let v = instance.query(i);
        if let Some(&j) = seen.get(&v) {
            return Some((j, i));
        }
        seen.insert(v, i);
    }
    None
}

/// The applications covered by the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppKind {
    /// Find two equal values in a table of `n` (walk on r-subsets; setup
    /// reads the subset, a move reads one new element, checks are free).
    ElementDistinctness,
    /// Verify a product of `n × n` matrices via random column sketches
    /// kept for an r-subset of indices.
    MatrixProductVerification,
    /// Find a violating triple of a purported associative operation table,
    /// keeping an `r × r` sub-table.
    AssociativityTesting,
    /// Find an edge of a triangle in a dense graph, keeping the adjacency
    /// sub-matrix of an r-subset of vertices.
    TriangleFinding,
    /// Find a non-commuting pair of group generators, walking on products
    /// of random subsets.
    GroupCommutativity,
    /// Find a marked cell of a 0/1 table (no subset parameter; amplitude
    /// search on the complete graph).
    UnorderedSearch,
}

impl AppKind {
    pub const ALL: [AppKind; 6] = [
        AppKind::ElementDistinctness,
        AppKind::MatrixProductVerification,
        AppKind::AssociativityTesting,
        AppKind::TriangleFinding,
        AppKind::GroupCommutativity,
        AppKind::UnorderedSearch,
    ];

    /// Interface name used by files and the command line.
    pub fn name(&self) -> &'static str {
        match self {
            AppKind::ElementDistinctness => "element-distinctness",
            AppKind::MatrixProductVerification => "matrix-product-verification",
            AppKind::AssociativityTesting => "associativity-testing",
            AppKind::TriangleFinding => "triangle-finding",
            AppKind::GroupCommutativity => "group-commutativity",
            AppKind::UnorderedSearch => "unordered-search",
        }
    }

    /// Short command-line alias.
    pub fn alias(&self) -> &'static str {
        match self {
            AppKind::ElementDistinctness => "ed",
            AppKind::MatrixProductVerification => "mpv",
            AppKind::AssociativityTesting => "assoc",
            AppKind::TriangleFinding => "triangle",
            AppKind::GroupCommutativity => "gc",
            AppKind::UnorderedSearch => "us",
        }
    }

    /// Accepts either the full name or the short alias.
    pub fn parse(name: &str) -> Result<AppKind> {
        AppKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name || k.alias() == name)
            .ok_or_else(|| {
                let known: Vec<String> = AppKind::ALL
                    .iter()
                    .map(|k| format!("{} ({})", k.name(), k.alias()))
                    .collect();
                Error::InvalidParameter(format!(
                    "unknown application kind {name:?}; expected one of {}",
                    known.join(", ")
                ))
            })
    }

    /// Smallest subset size the cost formula is meaningful for.
    pub fn min_subset(&self) -> u64 {
        match self {
            AppKind::GroupCommutativity => 2,
            _ => 1,
        }
    }
}

/// Leading-order cost of walk search with subset size `r` on input size
/// `n`, all constants set to one.
///
/// Every subset-based entry has the shape `S + (n/r)(√r · U + C)`: one
/// setup, then `n/r` check rounds (the marked fraction grows like `(r/n)²`)
/// of `√r` update steps each (the subset walk relaxes in about `r` steps).
/// Per application the operation costs are:
///
/// | kind                        | `S`      | `U`     | `C`           |
/// |-----------------------------|----------|---------|---------------|
/// | element distinctness        | `r`      | `1`     | `0`           |
/// | matrix product verification | `rn`     | `n`     | `0`           |
/// | associativity testing       | `r²`     | `r`     | `√(rn)`       |
/// | triangle finding            | `r²`     | `r`     | `√n · r^{2/3}`|
/// | group commutativity         | `r`      | `ln r`  | `1`           |
/// | unordered search            | —        | —       | `1`           |
///
/// Group commutativity walks on pairs of product sets, which relax in
/// about `r ln r` steps, so its middle factor is `√(r ln r)` instead of
/// `√r`; it needs `r ≥ 2`.  Unordered search has no subset parameter and
/// costs `√n` checks (see [`unordered_search_cost`] for `k` marked cells).
pub fn walk_cost(kind: AppKind, n: f64, r: f64) -> f64 {
    match kind {
        AppKind::ElementDistinctness => r + (n / r) * r.sqrt(),
        AppKind::MatrixProductVerification => r * n + (n / r) * (r.sqrt() * n),
        AppKind::AssociativityTesting => r * r + (n / r) * (r.sqrt() * r + (r * n).sqrt()),
        AppKind::TriangleFinding => {
            r * r + (n / r) * (r.sqrt() * r + n.sqrt() * r.cbrt().powi(2))
        }
        AppKind::GroupCommutativity => {
            let l = r.ln();
            r + (n / r) * ((r * l).sqrt() * l + 1.0)
        }
        AppKind::UnorderedSearch => n.sqrt(),
    }
}

/// Check cost of unordered search with `k` marked cells out of `n`.
pub fn unordered_search_cost(n: f64, k: f64) -> f64 {
    (n / k).sqrt()
}

/// Integer subset size minimizing [`walk_cost`] at fixed `n`.
#[derive(Debug, Clone, Serialize)]
pub struct CostOptimum {
    pub kind: String,
    pub n: u64,
    pub r_star: u64,
    pub cost_star: f64,
}

const GRID_POINTS: usize = 256;

/// Minimize [`walk_cost`] over integer `r` in `[r_min, n/2]`: a 256-point
/// logarithmic grid locates the basin, then every integer within ±20% of
/// the grid winner is scanned.  Ties break toward the smaller size.
pub fn optimize_r(kind: AppKind, n: u64) -> Result<CostOptimum> {
    if kind == AppKind::UnorderedSearch {
        return Ok(CostOptimum {
            kind: kind.name().to_string(),
            n,
            r_star: 1,
            cost_star: (n as f64).sqrt(),
        });
    }
    let r_min = kind.min_subset();
    let r_max = n / 2;
    if r_max < r_min {
        return Err(Error::InvalidParameter(format!(
            "input size {n} leaves no valid subset size for {} (needs r in [{r_min}, n/2])",
            kind.name()
        )));
    }

    let nf = n as f64;
    let mut candidates: Vec<u64> = (0..=GRID_POINTS)
        .map(|i| {
            let t = i as f64 / GRID_POINTS as f64;
            let lr = (r_min as f64).ln() + t * ((r_max as f64).ln() - (r_min as f64).ln());
            (lr.exp().round() as u64).clamp(r_min, r_max)
        })
        .collect();
    candidates.sort_unstable();
    candidates.dedup();

    let mut best_r = candidates[0];
    let mut best_cost = walk_cost(kind, nf, best_r as f64);
    for &r in &candidates[1..] {
        let c = walk_cost(kind, nf, r as f64);
        if c < best_cost {
            best_cost = c;
            best_r = r;
        }
    }

    let lo = ((best_r as f64 * 0.8).floor() as u64).max(r_min);
    let hi = ((best_r as f64 * 1.2).ceil() as u64).min(r_max);
    for r in lo..=hi {
        let c = walk_cost(kind, nf, r as f64);
        if c < best_cost || (c == best_cost && r < best_r) {
            best_cost = c;
            best_r = r;
        }
    }

    Ok(CostOptimum {
        kind: kind.name().to_string(),
        n,
        r_star: best_r,
        cost_star: best_cost,
    })
}

/// Growth exponent of the optimized cost, fitted over two decades.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub kind: String,
    pub n: u64,
    /// Least-squares slope of `ln cost*` against `ln n` at `n/100`,
    /// `n/10`, and `n`.
    pub exponent: f64,
    pub samples: Vec<CostOptimum>,
}

/// Fit the growth exponent of the optimized cost from the three sizes
/// `n/100`, `n/10`, `n` (so `n` must be at least 400).
pub fn fitted_exponent(kind: AppKind, n: u64) -> Result<ExponentFit> {
    if n < 400 {
        return Err(Error::InvalidParameter(format!(
            "exponent fit spans n/100 to n and needs n >= 400, got {n}"
        )));
    }
    let sizes = [n / 100, n / 10, n];
    let mut samples = Vec::with_capacity(3);
    for &m in &sizes {
        samples.push(optimize_r(kind, m)?);
    }
    let xs: Vec<f64> = sizes.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.cost_star.ln()).collect();
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let den: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    Ok(ExponentFit {
        kind: kind.name().to_string(),
        n,
        exponent: num / den,
        samples,
    })
}

/// On-disk description of a concrete problem input: the application kind,
/// the table length, and the value table itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppInstance {
    pub kind: String,
    pub n: usize,
    pub table: Vec<u64>,
}

impl AppInstance {
    pub fn new(kind: AppKind, table: Vec<u64>) -> Self {
        Self {
            kind: kind.name().to_string(),
            n: table.len(),
            table,
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        crate::jsonio::to_json_string(self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let inst: AppInstance = serde_json::from_str(s)?;
        AppKind::parse(&inst.kind)?;
        if inst.table.len() != inst.n {
            return Err(Error::InvalidParameter(format!(
                "instance declares n = {} but its table has {} entries",
                inst.n,
                inst.table.len()
            )));
        }
        Ok(inst)
    }
}

/// Table `[1, 2, …, n]` with an optional planted collision: the 1-based
/// pair `(a, b)` makes the value at `b` equal the value at `a`.
pub fn element_distinctness_table(n: usize, collision: Option<(usize, usize)>) -> Result<Vec<u64>> {
    let mut values: Vec<u64> = (1..=n as u64).collect();
    if let Some((a, b)) = collision {
        if a == 0 || b == 0 || a > n || b > n || a == b {
            return Err(Error::InvalidParameter(format!(
                "collision pair must name two distinct 1-based elements of 1..={n}, got ({a}, {b})"
            )));
        }
        values[b - 1] = values[a - 1];
    }
    Ok(values)
}

/// Collision finding over a value table, walked on the r-subset chain: a
/// subset is marked exactly when it contains both ends of some colliding
/// pair.
#[derive(Debug, Clone)]
pub struct ElementDistinctnessProblem {
    pub chain: MarkovChain,
    pub n: usize,
    pub r: usize,
    /// All 0-based element pairs with equal values, lexicographic.
    pub collision_pairs: Vec<(usize, usize)>,
    pub marked: Vec<bool>,
    pub marked_count: usize,
    /// Stationary (uniform) mass of the marked subsets.
    pub epsilon: f64,
    values: Vec<u64>,
    subsets: Vec<Vec<usize>>,
}

impl ElementDistinctnessProblem {
    /// Fresh counting oracle over this problem's table.
    pub fn oracle(&self) -> SubsetQueryOracle {
        SubsetQueryOracle {
            instance: OracleInstance::new(self.values.clone()),
            subsets: self.subsets.clone(),
            subset_size: self.r as u64,
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Build the collision-finding problem for a table of `n` values walked
/// with subsets of size `r` (`2 ≤ r ≤ n/2`; a colliding pair must fit in
/// one subset).  The marked set and the collision list are derived from an
/// uncounted view of the table — they are the experiment's ground truth,
/// not something the modeled searcher reads.
pub fn element_distinctness_problem(
    n: usize,
    r: usize,
    values: &[u64],
) -> Result<ElementDistinctnessProblem> {
    if values.len() != n {
        return Err(Error::InvalidParameter(format!(
            "table has {} entries for declared size {n}",
            values.len()
        )));
    }
    if r < 2 {
        return Err(Error::InvalidParameter(format!(
            "subset size must be at least 2 to witness a collision, got {r}"
        )));
    }
    let chain = builders::johnson(n, r)?;
    let subsets: Vec<Vec<usize>> = builders::johnson_vertices(n, r)
        .iter()
        .map(|v| v.iter().map(|&e| e as usize - 1).collect())
        .collect();

    let mut collision_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if values[i] == values[j] {
                collision_pairs.push((i, j));
            }
        }
    }

    let marked: Vec<bool> = subsets
        .iter()
        .map(|s| {
            collision_pairs
                .iter()
                .any(|&(a, b)| s.binary_search(&a).is_ok() && s.binary_search(&b).is_ok())
        })
        .collect();
    let marked_count = marked.iter().filter(|&&m| m).count();
    let epsilon = marked_count as f64 / subsets.len() as f64;

    Ok(ElementDistinctnessProblem {
        chain,
        n,
        r,
        collision_pairs,
        marked,
        marked_count,
        epsilon,
        values: values.to_vec(),
        subsets,
    })
}

/// Counted table access for subset-walk search: a setup reads the whole
/// subset, a move reads the elements gained, a check reads nothing (any
/// collision is already visible in the data kept for the subset).  The
/// coherent variants charge the same counts per application.
#[derive(Debug, Clone)]
pub struct SubsetQueryOracle {
    instance: OracleInstance,
    subsets: Vec<Vec<usize>>,
    subset_size: u64,
}

impl SubsetQueryOracle {
    pub fn queries(&self) -> u64 {
        self.instance.queries()
    }

    pub fn instance(&self) -> &OracleInstance {
        &self.instance
    }
}

impl SearchOracle for SubsetQueryOracle {
    fn classical_setup(&mut self, state: usize) {
        for i in 0..self.subsets[state].len() {
            let e = self.subsets[state][i];
            self.instance.query(e);
        }
    }

    fn classical_update(&mut self, from: usize, to: usize) {
        for i in 0..self.subsets[to].len() {
            let e = self.subsets[to][i];
            if self.subsets[from].binary_search(&e).is_err() {
                self.instance.query(e);
            }
        }
    }

    fn classical_check(&mut self, _state: usize) {}

    fn coherent_setup(&mut self) {
        self.instance.coherent(self.subset_size);
    }

    fn coherent_update(&mut self) {
        self.instance.coherent(1);
    }

    fn coherent_check(&mut self) {}
}

/// Unordered search over a 0/1 table, walked on the complete graph: a cell
/// is marked exactly when its value is nonzero.
#[derive(Debug, Clone)]
pub struct UnorderedSearchProblem {
    pub chain: MarkovChain,
    pub n: usize,
    pub marked: Vec<bool>,
    pub marked_count: usize,
    /// Stationary (uniform) mass of the marked cells.
    pub epsilon: f64,
    values: Vec<u64>,
}

impl UnorderedSearchProblem {
    /// Fresh counting oracle over this problem's table.
    pub fn oracle(&self) -> PointQueryOracle {
        PointQueryOracle {
            instance: OracleInstance::new(self.values.clone()),
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Build the unordered-search problem from an explicit 0/1 table
/// (`n = table length ≥ 3` for the complete-graph walk).
pub fn unordered_search_from_table(values: &[u64]) -> Result<UnorderedSearchProblem> {
    let n = values.len();
    let chain = builders::complete_graph(n)?;
    let marked: Vec<bool> = values.iter().map(|&v| v != 0).collect();
    let marked_count = marked.iter().filter(|&&m| m).count();
    Ok(UnorderedSearchProblem {
        chain,
        n,
        epsilon: marked_count as f64 / n as f64,
        marked,
        marked_count,
        values: values.to_vec(),
    })
}

/// Build the unordered-search problem with the given 1-based cells marked.
pub fn unordered_search_problem(
    n: usize,
    marked_elements: &[usize],
) -> Result<UnorderedSearchProblem> {
    let mut values = vec![0u64; n];
    for &e in marked_elements {
        if e == 0 || e > n {
            return Err(Error::InvalidParameter(format!(
                "marked cell must lie in 1..={n}, got {e}"
            )));
        }
        values[e - 1] = 1;
    }
    unordered_search_from_table(&values)
}

/// Counted table access for unordered search: only checks read the table
/// (one cell classically, one superposed batch coherently); sampling a
/// cell index and moving to another are free.
#[derive(Debug, Clone)]
pub struct PointQueryOracle {
    instance: OracleInstance,
}

impl PointQueryOracle {
    pub fn queries(&self) -> u64 {
        self.instance.queries()
    }

    pub fn instance(&self) -> &OracleInstance {
        &self.instance
    }
}

impl SearchOracle for PointQueryOracle {
    fn classical_setup(&mut self, _state: usize) {}

    fn classical_update(&mut self, _from: usize, _to: usize) {}

    fn classical_check(&mut self, state: usize) {
        self.instance.query(state);
    }

    fn coherent_setup(&mut self) {}

    fn coherent_update(&mut self) {}

    fn coherent_check(&mut self) {
        self.instance.coherent(1);
    }
}

/// Does a dash-joined subset label (e.g. `"1-3-5"`) contain every one of
/// the given 1-based elements?
pub fn label_contains_elements(label: &str, elements: &[usize]) -> bool {
    let parts: Vec<usize> = label.split('-').filter_map(|p| p.parse().ok()).collect();
    elements.iter().all(|e| parts.contains(e))
}
