//! Complex state vectors on the directed-edge space of a chain.
//!
//! A chain over `n` states induces the edge space `C^(n·n)`; basis vector
//! `(x, y)` is stored at flat index `x·n + y`, so the first register is the
//! slow index and each source block `x` is contiguous.

use num_complex::Complex64;
use rand::Rng;

/// Unit-norm checks allow this much slack.
pub const NORM_TOL: f64 = 1e-10;

/// A complex amplitude vector over the directed edges of an `n`-state chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeState {
    n: usize,
    amps: Vec<Complex64>,
}

impl EdgeState {
    /// The zero vector on the edge space of an `n`-state chain.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            amps: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Wrap a raw amplitude vector; panics if the length is not `n²`.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), n * n, "edge state needs n² amplitudes");
        Self { n, amps }
    }

    /// Number of chain states (the edge dimension is `n²`).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Amplitude on edge `(x, y)`.
    pub fn amp(&self, x: usize, y: usize) -> Complex64 {
        self.amps[x * self.n + y]
    }

    /// Mutable amplitude on edge `(x, y)`.
    pub fn amp_mut(&mut self, x: usize, y: usize) -> &mut Complex64 {
        &mut self.amps[x * self.n + y]
    }

    /// Flat amplitude slice, `x`-major.
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Mutable flat amplitude slice.
    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Scale to unit norm; panics on the zero vector.
    pub fn normalize(&mut self) {
        let nrm = self.norm();
        assert!(nrm > 0.0, "cannot normalize the zero vector");
        for a in &mut self.amps {
            *a /= nrm;
        }
    }

    /// Hermitian inner product `⟨self, other⟩` (conjugate-linear in self).
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `self ← self + c·other`.
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    /// Scale all amplitudes by `c`.
    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// Total probability mass on edges whose first register is marked.
    pub fn marked_mass(&self, marked: &[bool]) -> f64 {
        assert_eq!(marked.len(), self.n);
        let mut total = 0.0;
        for x in 0..self.n {
            if marked[x] {
                for y in 0..self.n {
                    total += self.amps[x * self.n + y].norm_sqr();
                }
            }
        }
        total
    }

    /// Measurement distribution of the first register.
    pub fn first_register_marginal(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.n];
        for x in 0..self.n {
            for y in 0..self.n {
                p[x] += self.amps[x * self.n + y].norm_sqr();
            }
        }
        p
    }

    /// A seeded random unit vector with complex entries.
    pub fn random_normalized<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut s = Self {
            n,
            amps: (0..n * n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        };
        s.normalize();
        s
    }
}
