//! Classical discrete groups `Z_{m_1} * … * Z_{m_k}` (with `Z_0 = Z`) and
//! their duals.
//!
//! Every group element is a one-dimensional corepresentation of the dual,
//! so a ball in the Cayley graph is a truncated irrep table with all
//! dimensions 1. Word length w.r.t. the standard generators drives both the
//! table depths and the Gram-matrix positivity check `e^{-t·|g⁻¹h|}`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::irreps::{IrrepTable, TableEntry};

/// Orders of the cyclic free factors; 0 means infinite order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    orders: Vec<u32>,
}

impl GroupSpec {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroupSpec("at least one generator is required".into()));
        }
        if let Some(&m) = orders.iter().find(|&&m| m == 1) {
            return Err(Error::InvalidGroupSpec(format!("order {m} is not allowed")));
        }
        Ok(Self { orders })
    }

    /// The free group on `n` generators.
    pub fn free(n: usize) -> Result<Self> {
        Self::new(alloc::vec![0; n])
    }

    /// Parses `"Z"`, `"Z3"`, `"F2"`, `"Z3*Z4"`, `"F2*Z2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGroupSpec(format!("unsupported group `{s}`"));
        let mut orders = Vec::new();
        for part in s.split('*').map(str::trim) {
            if part == "Z" {
                orders.push(0);
            } else if let Some(n) = part.strip_prefix('F') {
                let n: usize = n.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                orders.extend(core::iter::repeat(0).take(n));
            } else if let Some(m) = part.strip_prefix('Z') {
                let m: u32 = m.parse().map_err(|_| bad())?;
                if m < 2 {
                    return Err(bad());
                }
                orders.push(m);
            } else {
                return Err(bad());
            }
        }
        Self::new(orders)
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn generators(&self) -> usize {
        self.orders.len()
    }

    fn normalize(&self, generator: usize, exponent: i64) -> i64 {
        match self.orders[generator] {
            0 => exponent,
            m => exponent.rem_euclid(i64::from(m)),
        }
    }

    fn letter_length(&self, generator: usize, exponent: i64) -> u64 {
        match self.orders[generator] {
            0 => exponent.unsigned_abs(),
            m => {
                let e = exponent.rem_euclid(i64::from(m)) as u64;
                e.min(u64::from(m) - e)
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &m) in self.orders.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if m == 0 {
                f.write_str("Z")?;
            } else {
                write!(f, "Z{m}")?;
            }
        }
        Ok(())
    }
}

/// Reduced word `g_{i_1}^{e_1} ⋯ g_{i_r}^{e_r}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    spec: Arc<GroupSpec>,
    letters: Vec<(usize, i64)>,
}

impl GroupElement {
    pub fn identity(spec: Arc<GroupSpec>) -> Self {
        Self { spec, letters: Vec::new() }
    }

    /// Validates that `letters` is reduced for `spec`.
    pub fn new(spec: Arc<GroupSpec>, letters: Vec<(usize, i64)>) -> Result<Self> {
        for (k, &(g, e)) in letters.iter().enumerate() {
            if g >= spec.generators() {
                return Err(Error::InvalidElement);
            }
            let ok = match spec.orders[g] {
                0 => e != 0,
                m => (1..i64::from(m)).contains(&e),
            };
            if !ok || (k > 0 && letters[k - 1].0 == g) {
                return Err(Error::InvalidElement);
            }
        }
        Ok(Self { spec, letters })
    }

    /// `g_i^e`, reduced.
    pub fn generator_power(spec: Arc<GroupSpec>, generator: usize, exponent: i64) -> Result<Self> {
        if generator >= spec.generators() {
            return Err(Error::InvalidElement);
        }
        let e = spec.normalize(generator, exponent);
        let letters = if e == 0 { Vec::new() } else { alloc::vec![(generator, e)] };
        Ok(Self { spec, letters })
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.spec != other.spec {
            return Err(Error::GroupMismatch);
        }
        let mut letters = self.letters.clone();
        for &(g, e) in &other.letters {
            push_reduced(&self.spec, &mut letters, g, e);
        }
        Ok(GroupElement { spec: self.spec.clone(), letters })
    }

    pub fn inverse(&self) -> GroupElement {
        let letters = self.letters.iter().rev().map(|&(g, e)| (g, self.spec.normalize(g, -e))).collect();
        GroupElement { spec: self.spec.clone(), letters }
    }

    /// Word length w.r.t. `{g_i^{±1}}`: `|e|` per infinite-order letter,
    /// `min(e, m − e)` per order-`m` letter.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|&(g, e)| self.spec.letter_length(g, e)).sum()
    }

    /// Canonical encoding, e.g. `"a^2b^-1"`; `"e"` for the identity.
    pub fn encode(&self) -> String {
        if self.letters.is_empty() {
            return String::from("e");
        }
        let mut s = String::new();
        for &(g, e) in &self.letters {
            s.push_str(&generator_name(g));
            if e != 1 {
                s.push_str(&format!("^{e}"));
            }
        }
        s
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn generator_name(g: usize) -> String {
    if g < 26 {
        String::from(char::from(b'a' + g as u8))
    } else {
        format!("x{g}_")
    }
}

fn push_reduced(spec: &GroupSpec, letters: &mut Vec<(usize, i64)>, g: usize, e: i64) {
    match letters.last_mut() {
        Some(last) if last.0 == g => {
            let merged = spec.normalize(g, last.1 + e);
            if merged == 0 {
                letters.pop();
            } else {
                last.1 = merged;
            }
        }
        _ => {
            let e = spec.normalize(g, e);
            if e != 0 {
                letters.push((g, e));
            }
        }
    }
}

/// All elements of length ≤ `radius`, ordered by (length, encoding).
pub fn ball(spec: &Arc<GroupSpec>, radius: u64) -> Vec<GroupElement> {
    let steps: Vec<(usize, i64)> = (0..spec.generators())
        .flat_map(|g| if spec.orders[g] == 2 { alloc::vec![(g, 1)] } else { alloc::vec![(g, 1), (g, -1)] })
        .collect();
    let mut seen: BTreeSet<Vec<(usize, i64)>> = BTreeSet::new();
    let identity = GroupElement::identity(spec.clone());
    seen.insert(identity.letters.clone());
    let mut all = alloc::vec![identity];
    let mut frontier = all.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for &(gen, e) in &steps {
                let mut letters = g.letters.clone();
                push_reduced(spec, &mut letters, gen, e);
                if seen.insert(letters.clone()) {
                    next.push(GroupElement { spec: spec.clone(), letters });
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    let mut keyed: Vec<(u64, String, GroupElement)> = all.into_iter().map(|g| (g.length(), g.encode(), g)).collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.into_iter().map(|(_, _, g)| g).collect()
}

/// The dual's truncated irrep table: one 1-dimensional label per element
/// of the ball, with depth = word length and the identity as trivial label.
pub fn dual_irrep_table(spec: &Arc<GroupSpec>, radius: u64) -> IrrepTable {
    let entries = ball(spec, radius).into_iter().map(|g| TableEntry {
        id: g.encode(),
        dim: 1,
        trivial: g.is_identity(),
        depth: Some(g.length() as usize),
    });
    IrrepTable::new(entries).expect("ball elements have distinct encodings")
}

/// `G_{ij} = e^{-t·|g_i⁻¹ g_j|}` over the ball, in ball order.
pub fn gram_matrix(spec: &Arc<GroupSpec>, t: f64, radius: u64) -> DMatrix<f64> {
    let elements = ball(spec, radius);
    let inverses: Vec<GroupElement> = elements.iter().map(GroupElement::inverse).collect();
    let n = elements.len();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        gram[(i, i)] = 1.0;
        for j in (i + 1)..n {
            let d = inverses[i].multiply(&elements[j]).expect("same group").length();
            let v = libm::exp(-t * d as f64);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    gram
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchoenbergReport {
    pub pass: bool,
    pub min_eigenvalue: f64,
    pub size: usize,
    pub t: f64,
    pub radius: u64,
    pub tol: f64,
}

/// Default eigenvalue tolerance `1e-8 · n` for an `n × n` Gram matrix.
pub fn default_schoenberg_tol(size: usize) -> f64 {
    1e-8 * size.max(1) as f64
}

/// Checks positive semidefiniteness of `e^{-t·length}` on the ball.
pub fn schoenberg_check(spec: &Arc<GroupSpec>, t: f64, radius: u64, tol: f64) -> Result<SchoenbergReport> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let gram = gram_matrix(spec, t, radius);
    let size = gram.nrows();
    let min_eigenvalue = symmetric_min_eigenvalue(gram);
    Ok(SchoenbergReport { pass: min_eigenvalue >= -tol, min_eigenvalue, size, t, radius, tol })
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn symmetric_min_eigenvalue(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
