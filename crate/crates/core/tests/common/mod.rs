//! Independent reference implementations and random inputs shared by the
//! integration tests. Nothing here calls into the numerical routines under
//! test: eigenvalues come from a cyclic Jacobi sweep on the real symmetric
//! embedding, exponentials from that eigendecomposition, and words from
//! plain enumeration.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hapkit_core::fourier::MatrixFamily;
use hapkit_core::genfun::GeneratingFunctional;
use hapkit_core::irreps::{IrrepTable, Label, Table};
use hapkit_core::linalg::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense real matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Real {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Real {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }
}

/// `[[A, −B], [B, A]]` for `H = A + iB`; Hermitian `H` gives a real
/// symmetric matrix whose spectrum is that of `H`, each value twice.
pub fn embed(h: &CMatrix) -> Real {
    let n = h.nrows();
    let mut m = Real::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            m.set(i, j, z.re);
            m.set(i + n, j + n, z.re);
            m.set(i, j + n, -z.im);
            m.set(i + n, j, z.im);
        }
    }
    m
}

/// Inverse of [`embed`] on matrices of the embedded form.
pub fn unembed(m: &Real) -> CMatrix {
    let n = m.n / 2;
    CMatrix::from_fn(n, n, |i, j| C64::new(m.at(i, j), m.at(i + n, j)))
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix:
/// eigenvalues (unsorted) and eigenvectors as columns.
pub fn jacobi(sym: &Real) -> (Vec<f64>, Real) {
    let n = sym.n;
    let mut a = sym.clone();
    let mut v = Real::zeros(n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    let scale: f64 = a.a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.at(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.at(p, k);
                    let aqk = a.at(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.at(k, p);
                    let vkq = v.at(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| a.at(i, i)).collect(), v)
}

pub fn real_min_eigenvalue(sym: &Real) -> f64 {
    jacobi(sym).0.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut vals = jacobi(&embed(h)).0;
    vals.sort_by(f64::total_cmp);
    // each eigenvalue of H appears twice in the embedding
    vals.into_iter().step_by(2).collect()
}

pub fn hermitian_min_eigenvalue(h: &CMatrix) -> f64 {
    hermitian_eigenvalues(h)[0]
}

/// `f(H)` for Hermitian `H`, through the embedding.
pub fn hermitian_apply(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let m = embed(h);
    let (vals, v) = jacobi(&m);
    let n = m.n;
    let mut out = Real::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let s = (0..n).map(|k| v.at(i, k) * f(vals[k]) * v.at(j, k)).sum();
            out.set(i, j, s);
        }
    }
    unembed(&out)
}

/// Spectral norm as the square root of the top eigenvalue of `A*A`.
pub fn oracle_norm(a: &CMatrix) -> f64 {
    let g = a.adjoint() * a;
    hermitian_eigenvalues(&g).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x.re - y.re).hypot(x.im - y.im)).fold(0.0, f64::max)
}

/// Kronecker product written out index by index.
pub fn naive_kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = (a.nrows(), b.nrows());
    CMatrix::from_fn(p * q, p * q, |i, j| a[(i / q, j / q)] * b[(i % q, j % q)])
}

pub fn random_matrix(r: &mut impl Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

/// Hermitian with spectral norm at most `bound`.
pub fn random_hermitian(r: &mut impl Rng, n: usize, bound: f64) -> CMatrix {
    let b = random_matrix(r, n);
    let h = (&b + b.adjoint()) * C64::new(0.5, 0.0);
    let norm = oracle_norm(&h).max(1e-12);
    h * C64::new(bound * r.gen_range(0.1..1.0) / norm, 0.0)
}

/// Hermitian positive semidefinite with spectral norm at most `bound`.
pub fn random_psd(r: &mut impl Rng, n: usize, bound: f64) -> CMatrix {
    let b = random_matrix(r, n);
    let h = b.adjoint() * &b;
    let norm = oracle_norm(&h).max(1e-12);
    h * C64::new(bound * r.gen_range(0.1..1.0) / norm, 0.0)
}

/// A table `1, a0, a1, …` with random dimensions in `1..=max_dim`.
pub fn random_table(r: &mut impl Rng, labels: usize, max_dim: usize) -> Table {
    let dims: Vec<(String, usize)> = (0..labels).map(|i| (format!("a{i:02}"), r.gen_range(1..=max_dim))).collect();
    let refs: Vec<(&str, usize)> = dims.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    IrrepTable::from_dims(&refs).unwrap().into()
}

pub fn random_generator(r: &mut impl Rng, table: &Table, bound: f64, psd: bool) -> GeneratingFunctional {
    GeneratingFunctional::from_fn(table.clone(), |_, n| {
        if psd {
            random_psd(r, n, bound)
        } else {
            random_hermitian(r, n, bound)
        }
    })
    .unwrap()
}

/// Normalized family with arbitrary (not necessarily contractive) blocks.
pub fn random_normalized(r: &mut impl Rng, table: &Table) -> MatrixFamily {
    MatrixFamily::from_fn(table.clone(), true, |l, n| {
        if l.is_trivial() {
            CMatrix::identity(1, 1)
        } else {
            random_matrix(r, n)
        }
    })
    .unwrap()
}

/// Contractive normalized family: blocks scaled to norm at most one.
pub fn random_contractive(r: &mut impl Rng, table: &Table) -> MatrixFamily {
    MatrixFamily::from_fn(table.clone(), true, |l, n| {
        if l.is_trivial() {
            CMatrix::identity(1, 1)
        } else {
            let m = random_matrix(r, n);
            let s = r.gen_range(0.0..1.0) / oracle_norm(&m).max(1e-12);
            m * C64::new(s, 0.0)
        }
    })
    .unwrap()
}

/// Every alternating sequence over `p` first-factor and `q` second-factor
/// letters, of each length up to `max_len`, by filtering all sequences.
pub fn brute_force_words(p: usize, q: usize, max_len: usize) -> Vec<Vec<(u8, usize)>> {
    let alphabet: Vec<(u8, usize)> = (0..p).map(|i| (1, i)).chain((0..q).map(|j| (2, j))).collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<(u8, usize)>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &letter in &alphabet {
                let mut v = w.clone();
                v.push(letter);
                next.push(v);
            }
        }
        out.extend(next.iter().filter(|w| w.windows(2).all(|x| x[0].0 != x[1].0)).cloned());
        layer = next;
    }
    out
}

/// Closed form: `Σ_{l ≤ L} (p^⌈l/2⌉ q^⌊l/2⌋ + q^⌈l/2⌉ p^⌊l/2⌋)` plus the
/// empty word.
pub fn word_count_formula(p: u64, q: u64, max_len: u32) -> u64 {
    1 + (1..=max_len).map(|l| p.pow(l.div_ceil(2)) * q.pow(l / 2) + q.pow(l.div_ceil(2)) * p.pow(l / 2)).sum::<u64>()
}

/// Labels with blocks in both families.
pub fn common_labels(a: &MatrixFamily, b: &MatrixFamily) -> Vec<Label> {
    a.blocks().keys().filter(|l| b.block(**l).is_some()).copied().collect()
}

pub fn block_map(f: &MatrixFamily) -> BTreeMap<Label, CMatrix> {
    f.blocks().clone()
}
