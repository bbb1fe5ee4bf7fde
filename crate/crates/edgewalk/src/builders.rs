//! Builders for the standard chain families used throughout the toolkit.
//!
//! All three families are symmetric (hence reversible with uniform
//! stationary distribution) and are constructed exactly: probabilities are
//! counted rationals evaluated once in f64, never sampled.

use itertools::Itertools;
use nalgebra::DMatrix;
use std::collections::HashMap;

use crate::chain::MarkovChain;
use crate::error::{Error, Result};

/// Default ceiling on the number of states a builder will enumerate.
pub const DEFAULT_STATE_CAP: usize = 4096;

/// Walk on the complete graph `K_n`: from each state, jump uniformly to one
/// of the other `n − 1` states.
pub fn complete_graph(n: usize) -> Result<MarkovChain> {
    complete_graph_with_cap(n, DEFAULT_STATE_CAP)
}

/// [`complete_graph`] with an explicit state cap.
pub fn complete_graph_with_cap(n: usize, cap: usize) -> Result<MarkovChain> {
    if n < 3 {
        return Err(Error::DegenerateChain(format!(
            "complete graph needs n >= 3 (n = {} is periodic or trivial)",
            n
        )));
    }
    check_cap("complete graph states", n, cap)?;
    let q = 1.0 / (n as f64 - 1.0);
    let p = DMatrix::from_fn(n, n, |x, y| if x == y { 0.0 } else { q });
    let labels = (1..=n).map(|v| v.to_string()).collect();
    MarkovChain::new(labels, p)
}

/// The r-subsets of `{1..n}` in lexicographic order; vertex set of the
/// set walk built by [`johnson`].
pub fn johnson_vertices(n: usize, r: usize) -> Vec<Vec<u32>> {
    (1..=n as u32).combinations(r).collect()
}

/// Set walk `J(n, r)`: states are r-subsets of `{1..n}`, one step swaps a
/// member for a non-member chosen uniformly, so each state has exactly
/// `r(n − r)` neighbors.
pub fn johnson(n: usize, r: usize) -> Result<MarkovChain> {
    johnson_with_cap(n, r, DEFAULT_STATE_CAP)
}

/// [`johnson`] with an explicit state cap.
pub fn johnson_with_cap(n: usize, r: usize, cap: usize) -> Result<MarkovChain> {
    if r == 0 || 2 * r > n {
        return Err(Error::DegenerateChain(format!(
            "set walk needs 0 < r <= n/2, got n = {}, r = {}",
            n, r
        )));
    }
    check_cap("set walk states", binomial(n, r, cap), cap)?;
    let vertices = johnson_vertices(n, r);
    let m = vertices.len();
    let index: HashMap<&[u32], usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();

    let q = 1.0 / (r as f64 * (n - r) as f64);
    let mut p = DMatrix::zeros(m, m);
    for (i, v) in vertices.iter().enumerate() {
        for out_pos in 0..r {
            for add in 1..=n as u32 {
                if v.binary_search(&add).is_ok() {
                    continue;
                }
                let mut w = v.clone();
                w.remove(out_pos);
                let ins = w.binary_search(&add).unwrap_err();
                w.insert(ins, add);
                p[(i, index[w.as_slice()])] += q;
            }
        }
    }
    let labels = vertices.iter().map(|v| join_dash(v)).collect();
    MarkovChain::new(labels, p)
}

/// The r-tuples of distinct elements of `{1..n}` in lexicographic order;
/// state set of [`exchange_walk`].
pub fn exchange_tuples(n: usize, r: usize) -> Vec<Vec<u32>> {
    (1..=n as u32).permutations(r).collect()
}

/// Lazy exchange walk on r-tuples of distinct elements of `{1..n}`.
///
/// With probability 1/2 stay put; otherwise draw position `i` in the tuple
/// and element `j` of `{1..n}` uniformly. If `j` already sits at some
/// position `m`, exchange positions `i` and `m` (a no-op when `m = i`);
/// otherwise overwrite position `i` with `j`. Every `(i, j)` draw carries
/// probability `1/(2rn)` and is enumerated exactly.
pub fn exchange_walk(n: usize, r: usize) -> Result<MarkovChain> {
    exchange_walk_with_cap(n, r, DEFAULT_STATE_CAP)
}

/// [`exchange_walk`] with an explicit state cap.
pub fn exchange_walk_with_cap(n: usize, r: usize, cap: usize) -> Result<MarkovChain> {
    if r == 0 || r >= n {
        return Err(Error::DegenerateChain(format!(
            "exchange walk needs 0 < r < n, got n = {}, r = {}",
            n, r
        )));
    }
    check_cap("exchange walk states", falling_factorial(n, r, cap), cap)?;
    let tuples = exchange_tuples(n, r);
    let m = tuples.len();
    let index: HashMap<&[u32], usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();

    let draw = 1.0 / (2.0 * r as f64 * n as f64);
    let mut p = DMatrix::zeros(m, m);
    for (s, t) in tuples.iter().enumerate() {
        p[(s, s)] += 0.5;
        for i in 0..r {
            for j in 1..=n as u32 {
                let mut u = t.clone();
                if let Some(mpos) = u.iter().position(|&e| e == j) {
                    u.swap(i, mpos);
                } else {
                    u[i] = j;
                }
                p[(s, index[u.as_slice()])] += draw;
            }
        }
    }
    let labels = tuples.iter().map(|t| join_dash(t)).collect();
    MarkovChain::new(labels, p)
}

fn join_dash(v: &[u32]) -> String {
    v.iter().map(|e| e.to_string()).join("-")
}

fn check_cap(what: &'static str, needed: usize, cap: usize) -> Result<()> {
    if needed > cap {
        return Err(Error::CapacityExceeded { what, needed, cap });
    }
    Ok(())
}

/// `C(n, r)`, saturating just past `cap` so oversized requests fail cleanly.
fn binomial(n: usize, r: usize, cap: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > (cap as u128 + 1) * 2 {
            return usize::MAX;
        }
    }
    acc.min(usize::MAX as u128) as usize
}

/// `n · (n−1) ⋯ (n−r+1)`, saturating just past `cap`.
fn falling_factorial(n: usize, r: usize, cap: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 0..r {
        acc *= (n - i) as u128;
        if acc > (cap as u128 + 1) * 2 {
            return usize::MAX;
        }
    }
    acc.min(usize::MAX as u128) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::analyze;

    /// Independent spectral oracle for the symmetric builders: eigenvalues
    /// of the (symmetric) transition matrix via the dedicated symmetric
    /// solver, sorted descending by value.
    fn symmetric_eigenvalues(c: &MarkovChain) -> Vec<f64> {
        let se = c
            .p()
            .clone()
            .try_symmetric_eigen(f64::EPSILON, crate::chain::EIGEN_MAX_ITER)
            .expect("symmetric eigenvalue iteration converges");
        let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    fn delta_from_magnitudes(ev: &[f64]) -> f64 {
        let mut mags: Vec<f64> = ev.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        1.0 - mags[1]
    }

    #[test]
    fn complete_graph_rows_and_gap() {
        let c = complete_graph(4).unwrap();
        for x in 0..4 {
            assert_eq!(c.transition(x, x), 0.0);
            for y in 0..4 {
                if x != y {
                    assert!((c.transition(x, y) - 1.0 / 3.0).abs() < 1e-15);
                }
            }
        }
        let a = analyze(&c).unwrap();
        assert!((a.delta - 2.0 / 3.0).abs() < 1e-12);
        assert!(a.reversible);
    }

    #[test]
    fn complete_graph_gap_family() {
        // K_n spectrum is {1, −1/(n−1)×(n−1)}, so δ = 1 − 1/(n−1).
        for n in 3..=16 {
            let a = analyze(&complete_graph(n).unwrap()).unwrap();
            let expect = 1.0 - 1.0 / (n as f64 - 1.0);
            assert!(
                (a.delta - expect).abs() < 1e-12,
                "K_{}: delta {} vs {}",
                n,
                a.delta,
                expect
            );
            // All non-unit eigenvalues are negative, so the signed gap
            // exceeds 1.
            let signed = 1.0 + 1.0 / (n as f64 - 1.0);
            assert!((a.signed_gap.unwrap() - signed).abs() < 1e-12);
            for x in 0..n {
                assert!((a.stationary[x] - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complete_graph_too_small() {
        assert!(matches!(
            complete_graph(2).unwrap_err(),
            Error::DegenerateChain(_)
        ));
    }

    #[test]
    fn johnson_5_2_structure() {
        let c = johnson(5, 2).unwrap();
        assert_eq!(c.n(), 10);
        for x in 0..10 {
            let nz: Vec<f64> = (0..10)
                .map(|y| c.transition(x, y))
                .filter(|&v| v > 0.0)
                .collect();
            assert_eq!(nz.len(), 6, "J(5,2) degree is r(n-r) = 6");
            for v in nz {
                assert!((v - 1.0 / 6.0).abs() < 1e-15);
            }
        }
        let a = analyze(&c).unwrap();
        assert!(a.reversible);
        for x in 0..10 {
            assert!((a.stationary[x] - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn johnson_4_2_spectrum_oracle() {
        // J(4,2) is the octahedron: adjacency eigenvalues 4, 0 (×3), −2 (×2),
        // so the walk has eigenvalues {1, 0×3, −1/2×2}. Second-largest
        // magnitude is 1/2; the second-largest signed eigenvalue is 0.
        let c = johnson(4, 2).unwrap();
        assert_eq!(c.n(), 6);
        let ev = symmetric_eigenvalues(&c);
        let expected = [1.0, 0.0, 0.0, 0.0, -0.5, -0.5];
        for (got, want) in ev.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{:?}", ev);
        }
        let a = analyze(&c).unwrap();
        assert!((a.delta - 0.5).abs() < 1e-12);
        let signed_gap = 1.0 - ev[1];
        assert!((signed_gap - 1.0).abs() < 1e-12, "signed gap is 1, got {signed_gap}");
    }

    #[test]
    fn johnson_gap_closed_form_family() {
        // For J(n,r) the signed spectrum is λ_i = ((r−i)(n−r−i) − i)/(r(n−r)),
        // i = 0..r, decreasing in i. Hence 1 − λ₁ = n/(r(n−r)) exactly, while
        // the magnitude gap is min(n/(r(n−r)), 1 − 1/(n−r)) because the most
        // negative eigenvalue is −1/(n−r).
        for n in 3..=10usize {
            for r in 1..=n / 2 {
                let c = johnson(n, r).unwrap();
                let ev = symmetric_eigenvalues(&c);
                let signed_gap = 1.0 - ev[1];
                let closed = n as f64 / (r as f64 * (n - r) as f64);
                assert!(
                    (signed_gap - closed).abs() < 1e-9,
                    "J({n},{r}): signed gap {signed_gap} vs closed form {closed}"
                );
                let a = analyze(&c).unwrap();
                let magnitude_closed = closed.min(1.0 - 1.0 / (n - r) as f64);
                assert!(
                    (a.delta - magnitude_closed).abs() < 1e-9,
                    "J({n},{r}): delta {} vs {}",
                    a.delta,
                    magnitude_closed
                );
                assert!((a.delta - delta_from_magnitudes(&ev)).abs() < 1e-12);
                assert!(
                    (a.signed_gap.unwrap() - closed).abs() < 1e-9,
                    "J({n},{r}): reported signed gap {} vs n/(r(n-r)) = {closed}",
                    a.signed_gap.unwrap()
                );
            }
        }
    }

    #[test]
    fn johnson_r_1_is_complete_graph() {
        let j = johnson(4, 1).unwrap();
        let k = complete_graph(4).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(j.transition(x, y), k.transition(x, y));
            }
        }
    }

    #[test]
    fn johnson_bad_r_rejected() {
        assert!(matches!(
            johnson(5, 3).unwrap_err(),
            Error::DegenerateChain(_)
        ));
        assert!(matches!(
            johnson(5, 0).unwrap_err(),
            Error::DegenerateChain(_)
        ));
    }

    #[test]
    fn johnson_cap_enforced() {
        // C(20,10) = 184756 > 4096.
        assert!(matches!(
            johnson(20, 10).unwrap_err(),
            Error::CapacityExceeded { .. }
        ));
    }

    #[test]
    fn exchange_3_1_rows() {
        // r = 1: stay with 1/2 + 1/(2n) = 2/3, replace to each other
        // element with 1/(2n) = 1/6.
        let c = exchange_walk(3, 1).unwrap();
        assert_eq!(c.n(), 3);
        for x in 0..3 {
            for y in 0..3 {
                let expect = if x == y { 2.0 / 3.0 } else { 1.0 / 6.0 };
                assert!((c.transition(x, y) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exchange_3_2_spectrum_oracle() {
        // The 6 ordered pairs form a hexagon under replacements with the
        // swap joining antipodes: P = (2/3)I + (1/12)C₆ + (1/6)A. Circulant
        // eigenvalues give {1, 3/4×2, 7/12×2, 1/3}, so δ = 1/4 exactly.
        let c = exchange_walk(3, 2).unwrap();
        assert_eq!(c.n(), 6);
        let ev = symmetric_eigenvalues(&c);
        let expected = [
            1.0,
            0.75,
            0.75,
            7.0 / 12.0,
            7.0 / 12.0,
            1.0 / 3.0,
        ];
        for (got, want) in ev.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{:?}", ev);
        }
        let a = analyze(&c).unwrap();
        assert!((a.delta - 0.25).abs() < 1e-12);
        // Gap scale c in δ = c/(r ln r) for this instance.
        let fitted = a.delta * 2.0 * (2.0f64).ln();
        assert!(fitted > 0.2 && fitted < 1.0, "fitted constant {}", fitted);
    }

    #[test]
    fn exchange_4_2_uniform_and_symmetric() {
        let c = exchange_walk(4, 2).unwrap();
        assert_eq!(c.n(), 12);
        for x in 0..12 {
            for y in 0..12 {
                assert!(
                    (c.transition(x, y) - c.transition(y, x)).abs() < 1e-15,
                    "exchange walk must be symmetric"
                );
            }
        }
        let a = analyze(&c).unwrap();
        assert!(a.reversible);
        for x in 0..12 {
            assert!((a.stationary[x] - 1.0 / 12.0).abs() < 1e-12);
        }
        assert!(a.delta > 0.0);
    }

    #[test]
    fn exchange_cap_enforced() {
        // 8·7·6·5·4 = 6720 > 4096.
        assert!(matches!(
            exchange_walk(8, 5).unwrap_err(),
            Error::CapacityExceeded { .. }
        ));
    }

    #[test]
    fn builder_rows_sum_to_one_across_grid() {
        let mut chains: Vec<MarkovChain> = Vec::new();
        for n in 3..=8 {
            chains.push(complete_graph(n).unwrap());
        }
        for n in 3..=8usize {
            for r in 1..=n / 2 {
                chains.push(johnson(n, r).unwrap());
            }
        }
        for (n, r) in [(3, 1), (3, 2), (4, 1), (4, 2), (5, 2)] {
            chains.push(exchange_walk(n, r).unwrap());
        }
        for c in &chains {
            for x in 0..c.n() {
                let s: f64 = (0..c.n()).map(|y| c.transition(x, y)).sum();
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn labels_are_unique_and_ordered() {
        let c = johnson(5, 2).unwrap();
        assert_eq!(c.labels()[0], "1-2");
        assert_eq!(c.labels()[9], "4-5");
        let e = exchange_walk(3, 2).unwrap();
        assert_eq!(e.labels()[0], "1-2");
        assert_eq!(e.labels()[5], "3-2");
        for c in [&c, &e] {
            let mut set = std::collections::HashSet::new();
            for l in c.labels() {
                assert!(set.insert(l.clone()), "duplicate label {}", l);
            }
        }
    }
}
