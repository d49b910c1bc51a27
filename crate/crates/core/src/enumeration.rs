//! Word-ball enumeration of a finitely generated subgroup of PSL₂(ℂ) and
//! construction of its length/holonomy spectrum.
//!
//! Conjugacy between elements of equal complex length is decided by a
//! search over the enumerated ball. Pairs for which no conjugator is found
//! are counted as distinct classes and reported in
//! [`SpectrumBuild::undecided_pairs`]; the search cannot prove
//! non-conjugacy.

use crate::algebra::{
    canonicalize, canonicalize_unit, circle_distance, classify, complex_length, reduce_angle,
    CanonicalElement, ComplexLength, ElementClass, Mat2, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::spectrum::{GeodesicClass, SpectrumTable};
use rayon::prelude::*;
use std::collections::HashMap;

/// Default cap on the number of distinct elements in a ball.
pub const DEFAULT_BALL_CAP: usize = 10_000_000;

/// Default tolerance for grouping elements by complex length.
pub const DEFAULT_BUCKET_TOL: f64 = 1e-7;

/// A finite generating set.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    generators: Vec<CanonicalElement>,
    pub name: String,
    pub source: String,
}

impl GroupPresentation {
    /// Each matrix must have determinant 1 within 1e−9.
    pub fn new(name: impl Into<String>, source: impl Into<String>, matrices: &[Mat2]) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::DomainError("a presentation needs at least one generator".into()));
        }
        let generators = matrices
            .iter()
            .enumerate()
            .map(|(i, m)| {
                canonicalize_unit(*m, DEFAULT_TOL).map(|g| g.with_word(vec![i as i32 + 1]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            generators,
            name: name.into(),
            source: source.into(),
        })
    }

    pub fn generators(&self) -> &[CanonicalElement] {
        &self.generators
    }
}

/// Options for [`ball_enumerate`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    pub max_word_len: usize,
    /// Matrix comparison tolerance, relative to max(1, ‖m‖∞).
    pub tol: f64,
    pub cap: usize,
    /// Report one representative per pair {m, m⁻¹}.
    pub identify_inverses: bool,
    pub parallel: bool,
}

impl EnumerationOptions {
    pub fn new(max_word_len: usize) -> Self {
        Self {
            max_word_len,
            tol: DEFAULT_TOL,
            cap: DEFAULT_BALL_CAP,
            identify_inverses: true,
            parallel: false,
        }
    }
}

/// Result of a ball enumeration.
#[derive(Clone, Debug)]
pub struct Ball {
    /// Non-identity elements in breadth-first order, each with a shortest word.
    pub elements: Vec<CanonicalElement>,
    /// Distinct elements of PSL₂(ℂ) in the ball, identity included, before
    /// any inverse identification.
    pub ball_size: usize,
    pub max_word_len: usize,
}

/// Hash cell for a matrix modulo sign: log of the norm plus the quadratic
/// entries a², b², c² scaled by the squared norm. Perturbing the entries by
/// ε·max(1, ‖m‖) moves every scaled feature by at most 4ε.
fn features(m: &Mat2) -> [f64; 7] {
    let n = m.max_abs().max(1.0);
    let n2 = n * n;
    let a2 = m.a * m.a / n2;
    let b2 = m.b * m.b / n2;
    let c2 = m.c * m.c / n2;
    [n.ln(), a2.re, a2.im, b2.re, b2.im, c2.re, c2.im]
}

const CELL: f64 = 1e-6;
const EDGE: f64 = 0.02;

struct DedupIndex {
    cells: HashMap<[i64; 7], Vec<usize>>,
    matrices: Vec<Mat2>,
    tol: f64,
}

impl DedupIndex {
    fn new(tol: f64) -> Self {
        Self {
            cells: HashMap::new(),
            matrices: Vec::new(),
            tol,
        }
    }

    fn home(m: &Mat2) -> [i64; 7] {
        let f = features(m);
        let mut k = [0i64; 7];
        for (ki, fi) in k.iter_mut().zip(f) {
            *ki = (fi / CELL).floor() as i64;
        }
        k
    }

    /// All cells within reach of the tolerance around `m`.
    fn nearby(m: &Mat2) -> Vec<[i64; 7]> {
        let f = features(m);
        let mut out = vec![[0i64; 7]];
        for (i, fi) in f.iter().enumerate() {
            let q = fi / CELL;
            let base = q.floor();
            let frac = q - base;
            let mut options = vec![base as i64];
            if frac < EDGE {
                options.push(base as i64 - 1);
            }
            if frac > 1.0 - EDGE {
                options.push(base as i64 + 1);
            }
            let mut next = Vec::with_capacity(out.len() * options.len());
            for key in &out {
                for &o in &options {
                    let mut k = *key;
                    k[i] = o;
                    next.push(k);
                }
            }
            out = next;
        }
        out
    }

    fn find(&self, m: &Mat2) -> Option<usize> {
        let scale = m.max_abs().max(1.0);
        for key in Self::nearby(m) {
            if let Some(ids) = self.cells.get(&key) {
                for &id in ids {
                    if self.matrices[id].projective_distance(m) <= self.tol * scale {
                        return Some(id);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, m: Mat2) -> usize {
        let id = self.matrices.len();
        self.cells.entry(Self::home(&m)).or_default().push(id);
        self.matrices.push(m);
        id
    }
}

/// Breadth-first enumeration of all products of at most `max_word_len`
/// generators and inverses, deduplicated modulo sign.
pub fn ball_enumerate(p: &GroupPresentation, opts: &EnumerationOptions) -> Result<Ball> {
    if opts.max_word_len == 0 {
        return Err(Error::DomainError("max_word_len must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::DomainError("tolerance must be positive".into()));
    }
    let mut letters: Vec<(i32, Mat2)> = Vec::new();
    for (i, g) in p.generators().iter().enumerate() {
        letters.push((i as i32 + 1, *g.matrix()));
        letters.push((-(i as i32 + 1), g.matrix().adjugate()));
    }

    let mut index = DedupIndex::new(opts.tol);
    let mut all: Vec<CanonicalElement> = Vec::new();
    let identity = canonicalize(Mat2::identity(), opts.tol)?.with_word(Vec::new());
    index.insert(*identity.matrix());
    all.push(identity);
    let mut frontier: Vec<usize> = vec![0];

    for _ in 0..opts.max_word_len {
        let expand = |&id: &usize| -> Vec<Result<CanonicalElement>> {
            let base = &all[id];
            let word = base.word().unwrap_or(&[]);
            let last = word.last().copied();
            letters
                .iter()
                .filter(|(code, _)| last != Some(-code))
                .map(|(code, mat)| {
                    let mut w = word.to_vec();
                    w.push(*code);
                    canonicalize(*base.matrix() * *mat, opts.tol).map(|e| e.with_word(w))
                })
                .collect()
        };
        let candidates: Vec<Result<CanonicalElement>> = if opts.parallel {
            frontier.par_iter().flat_map_iter(expand).collect()
        } else {
            frontier.iter().flat_map(expand).collect()
        };
        let mut next = Vec::new();
        for cand in candidates {
            let cand = cand?;
            if index.find(cand.matrix()).is_none() {
                let id = index.insert(*cand.matrix());
                all.push(cand);
                next.push(id);
                if all.len() > opts.cap {
                    return Err(Error::ExplosionLimit(opts.cap));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let ball_size = all.len();
    let mut elements = Vec::with_capacity(ball_size);
    for (id, e) in all.iter().enumerate().skip(1) {
        if opts.identify_inverses {
            if let Some(inv) = index.find(&e.matrix().adjugate()) {
                if inv < id {
                    continue;
                }
            }
        }
        elements.push(e.clone());
    }
    Ok(Ball {
        elements,
        ball_size,
        max_word_len: opts.max_word_len,
    })
}

/// Options for [`build_spectrum`].
#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Matrix tolerance for classification and conjugacy tests.
    pub tol: f64,
    /// Complex-length tolerance for grouping.
    pub bucket_tol: f64,
    /// Treat m and m⁻¹ as the same class (matches `identify_inverses`).
    pub identify_inverses: bool,
    /// User assertion that the ball covers every class with length ≤ y.
    pub assert_complete: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            bucket_tol: DEFAULT_BUCKET_TOL,
            identify_inverses: true,
            assert_complete: false,
        }
    }
}

/// A spectrum with the bookkeeping of how it was obtained.
#[derive(Clone, Debug)]
pub struct SpectrumBuild {
    pub table: SpectrumTable,
    /// Same-bucket pairs with no conjugator found in the ball.
    pub undecided_pairs: usize,
    /// Elements classified elliptic or parabolic and dropped.
    pub rejected: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn root(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn join(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn close(a: &ComplexLength, b: &ComplexLength, tol: f64) -> bool {
    (a.length - b.length).abs() <= tol && circle_distance(a.holonomy, b.holonomy) <= tol
}

/// Groups hyperbolic/loxodromic elements with length ≤ y into conjugacy
/// classes and marks primitivity.
pub fn build_spectrum(elements: &[CanonicalElement], y: f64, opts: &SpectrumOptions) -> Result<SpectrumBuild> {
    if !(y > 0.0) {
        return Err(Error::DomainError(format!("y must be positive, got {y}")));
    }
    let mut rejected = 0usize;
    let mut items: Vec<(ComplexLength, Mat2)> = Vec::new();
    for e in elements {
        match classify(e.matrix(), opts.tol)? {
            ElementClass::Hyperbolic | ElementClass::Loxodromic => {
                let cl = complex_length(e.matrix(), opts.tol)?;
                if cl.length <= y {
                    items.push((cl, *e.matrix()));
                }
            }
            ElementClass::Identity => {}
            _ => rejected += 1,
        }
    }
    items.sort_by(|a, b| {
        a.0.length
            .total_cmp(&b.0.length)
            .then(a.0.holonomy.total_cmp(&b.0.holonomy))
    });

    // Buckets of equal complex length.
    let n = items.len();
    let mut buckets = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if items[j].0.length - items[i].0.length > opts.bucket_tol {
                break;
            }
            if close(&items[i].0, &items[j].0, opts.bucket_tol) {
                buckets.join(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let r = buckets.root(i);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }

    // Conjugators: identity and every element with its inverse.
    let mut conjugators: Vec<Mat2> = vec![Mat2::identity()];
    for e in elements {
        conjugators.push(*e.matrix());
        conjugators.push(e.matrix().adjugate());
    }

    let mut undecided_pairs = 0usize;
    // (complex length, multiplicity) per bucket, bucket order follows `groups`.
    let mut classes: Vec<(ComplexLength, u64)> = Vec::new();
    for members in &groups {
        let k = members.len();
        let mut uf = UnionFind::new(k);
        for a in 0..k {
            for b in a + 1..k {
                if uf.root(a) == uf.root(b) {
                    continue;
                }
                let ma = &items[members[a]].1;
                let mb = &items[members[b]].1;
                if conjugate_in_ball(ma, mb, &conjugators, opts) {
                    uf.join(a, b);
                } else {
                    undecided_pairs += 1;
                }
            }
        }
        let components = (0..k).filter(|&i| uf.root(i) == i).count() as u64;
        classes.push((items[members[0]].0, components));
    }

    // Primitivity, in increasing length.
    let mut records: Vec<GeodesicClass> = Vec::with_capacity(classes.len());
    for (cl, mult) in &classes {
        let mut record = GeodesicClass {
            length: cl.length,
            holonomy: cl.holonomy,
            multiplicity: *mult,
            primitive: true,
            root_length: cl.length,
            power_index: 1,
        };
        'search: for k in 2u32.. {
            let kf = f64::from(k);
            let target = cl.length / kf;
            if target < records.first().map_or(f64::INFINITY, |r| r.length) - opts.bucket_tol {
                break;
            }
            for root in records.iter().filter(|r| r.primitive) {
                let power = ComplexLength::new(kf * root.length, kf * root.holonomy);
                if close(&power, cl, opts.bucket_tol * kf) {
                    record.power_index = k;
                    record.primitive = false;
                    record.root_length = root.length;
                    record.length = power.length;
                    record.holonomy = reduce_angle(power.holonomy);
                    break 'search;
                }
            }
        }
        records.push(record);
    }

    let complete = opts.assert_complete || elements.is_empty();
    let table = SpectrumTable::new(records, y, complete, None)?;
    Ok(SpectrumBuild {
        table,
        undecided_pairs,
        rejected,
    })
}

fn conjugate_in_ball(a: &Mat2, b: &Mat2, conjugators: &[Mat2], opts: &SpectrumOptions) -> bool {
    let targets: Vec<Mat2> = if opts.identify_inverses {
        vec![*b, b.adjugate()]
    } else {
        vec![*b]
    };
    conjugators.iter().any(|h| {
        let c = *h * *a * h.adjugate();
        let scale = c.max_abs().max(1.0);
        targets
            .iter()
            .any(|t| c.projective_distance(t) <= opts.tol * scale.max(t.max_abs()) * 10.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn schottky() -> GroupPresentation {
        let a = Mat2::from_complex_length(3.0, 0.4);
        let u = Complex64::new(0.7, 0.2);
        let v = Complex64::new(0.4, -0.3);
        let one = Complex64::new(1.0, 0.0);
        let conj = Mat2::new(one, u, v, one + u * v);
        let b = conj * Mat2::from_complex_length(3.4, -1.1) * conj.adjugate();
        GroupPresentation::new("schottky", "inline", &[a, b]).unwrap()
    }

    #[test]
    fn cyclic_ball() {
        let g = Mat2::from_complex_length(1.0, PI / 2.0);
        let p = GroupPresentation::new("cyclic", "inline", &[g]).unwrap();
        let ball = ball_enumerate(&p, &EnumerationOptions::new(3)).unwrap();
        assert_eq!(ball.ball_size, 7);
        assert_eq!(ball.elements.len(), 3);
        let words: Vec<_> = ball.elements.iter().map(|e| e.word().unwrap().to_vec()).collect();
        assert_eq!(words, vec![vec![1], vec![1, 1], vec![1, 1, 1]]);
    }

    #[test]
    fn free_ball_size() {
        let p = schottky();
        let ball = ball_enumerate(&p, &EnumerationOptions::new(3)).unwrap();
        assert_eq!(ball.ball_size, 53);
        assert_eq!(ball.elements.len(), 26);
        let mut opts = EnumerationOptions::new(3);
        opts.identify_inverses = false;
        assert_eq!(ball_enumerate(&p, &opts).unwrap().elements.len(), 52);
    }

    #[test]
    fn duplicated_generator() {
        let p = schottky();
        let gens: Vec<Mat2> = p.generators().iter().map(|g| *g.matrix()).collect();
        let dup = GroupPresentation::new("dup", "inline", &[gens[0], gens[1], gens[0]]).unwrap();
        let a = ball_enumerate(&p, &EnumerationOptions::new(3)).unwrap();
        let b = ball_enumerate(&dup, &EnumerationOptions::new(3)).unwrap();
        assert_eq!(a.ball_size, b.ball_size);
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = schottky();
        let mut opts = EnumerationOptions::new(4);
        let a = ball_enumerate(&p, &opts).unwrap();
        opts.parallel = true;
        let b = ball_enumerate(&p, &opts).unwrap();
        assert_eq!(a.elements, b.elements);
    }

    #[test]
    fn explosion_cap() {
        let mut opts = EnumerationOptions::new(4);
        opts.cap = 100;
        assert!(matches!(ball_enumerate(&schottky(), &opts), Err(Error::ExplosionLimit(100))));
    }

    #[test]
    fn cyclic_spectrum() {
        let g = Mat2::from_complex_length(1.0, PI / 2.0);
        let p = GroupPresentation::new("cyclic", "inline", &[g]).unwrap();
        let ball = ball_enumerate(&p, &EnumerationOptions::new(3)).unwrap();
        let built = build_spectrum(&ball.elements, 3.5, &SpectrumOptions::default()).unwrap();
        let c = built.table.classes();
        assert_eq!(c.len(), 3);
        assert!(c[0].primitive);
        assert_eq!((c[1].power_index, c[2].power_index), (2, 3));
        assert!((c[1].holonomy - PI).abs() < 1e-9);
        assert!((c[2].holonomy + PI / 2.0).abs() < 1e-9);
        assert!((c[2].length - 3.0).abs() < 1e-9);
        assert!(!built.table.complete());
        assert_eq!(built.undecided_pairs, 0);
    }

    #[test]
    fn empty_and_short_spectra() {
        let t = build_spectrum(&[], 2.0, &SpectrumOptions::default()).unwrap().table;
        assert!(t.is_empty() && t.complete());
        assert_eq!(t.horizon(), 2.0);
        let g = Mat2::from_complex_length(1.0, PI / 2.0);
        let e = canonicalize(g, 1e-9).unwrap();
        assert!(build_spectrum(&[e], 0.5, &SpectrumOptions::default()).unwrap().table.is_empty());
    }

    #[test]
    fn conjugates_merge_into_one_class() {
        let p = schottky();
        let ball = ball_enumerate(&p, &EnumerationOptions::new(3)).unwrap();
        let built = build_spectrum(&ball.elements, 20.0, &SpectrumOptions::default()).unwrap();
        // ab and ba are conjugate; their class must have multiplicity 1.
        let a = *p.generators()[0].matrix();
        let b = *p.generators()[1].matrix();
        let cl = complex_length(&(a * b), 1e-9).unwrap();
        let rec = built
            .table
            .classes()
            .iter()
            .find(|c| (c.length - cl.length).abs() < 1e-7)
            .unwrap();
        assert_eq!(rec.multiplicity, 1, "{rec:?} {}", built.undecided_pairs);
        assert_eq!(built.rejected, 0);
    }

    #[test]
    fn elliptic_elements_rejected() {
        let rot = Mat2::diagonal(Complex64::from_polar(1.0, 0.3));
        let e = canonicalize(rot, 1e-9).unwrap();
        let built = build_spectrum(&[e], 3.0, &SpectrumOptions::default()).unwrap();
        assert_eq!(built.rejected, 1);
        assert!(built.table.is_empty());
    }
}
