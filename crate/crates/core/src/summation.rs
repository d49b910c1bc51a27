//! Compensated and reproducible summation.
//!
//! Every geometric sum in the crate goes through [`chunked_sum`]: terms are
//! grouped into fixed-size chunks, each chunk is accumulated with Neumaier
//! compensation in index order, and the chunk partials are combined by a
//! fixed pairwise tree. The shape of the computation depends only on the
//! number of terms, so the sequential and the rayon-parallel paths produce
//! bit-identical results for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

/// Number of terms per leaf of the reduction tree.
pub const CHUNK_LEN: usize = 1024;

/// Neumaier accumulator for `f64`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Neumaier accumulator for complex values (real and imaginary parts
/// compensated independently).
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Compensated sum of a slice in index order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Deterministic chunked sum of `term(0) + ... + term(len - 1)`.
///
/// With `parallel` set, chunks are evaluated on the rayon pool; the result
/// is bit-identical to the sequential evaluation.
pub fn chunked_sum<F>(len: usize, parallel: bool, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    if len == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let n_chunks = len.div_ceil(CHUNK_LEN);
    let leaf = |c: usize| {
        let start = c * CHUNK_LEN;
        let end = (start + CHUNK_LEN).min(len);
        let mut acc = ComplexNeumaier::new();
        for i in start..end {
            acc.add(term(i));
        }
        acc
    };
    let partials: Vec<ComplexNeumaier> = if parallel && n_chunks > 1 {
        (0..n_chunks).into_par_iter().map(leaf).collect()
    } else {
        (0..n_chunks).map(leaf).collect()
    };
    tree_reduce(partials).total()
}

fn tree_reduce(mut level: Vec<ComplexNeumaier>) -> ComplexNeumaier {
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => a.merged(b),
                [a] => *a,
                _ => unreachable!(),
            })
            .collect();
    }
    level.pop().unwrap_or_default()
}

impl Neumaier {
    fn merged(&self, other: &Neumaier) -> Neumaier {
        let mut acc = *self;
        acc.add(other.sum);
        acc.comp += other.comp;
        acc
    }
}

impl ComplexNeumaier {
    fn merged(&self, other: &ComplexNeumaier) -> ComplexNeumaier {
        ComplexNeumaier {
            re: self.re.merged(&other.re),
            im: self.im.merged(&other.im),
        }
    }
}
