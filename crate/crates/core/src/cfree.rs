//! Conditionally free products over a free-product word table.
//!
//! At an alternating word `α_1 ⋯ α_l` the product of two state families is
//! the Kronecker product of the letter blocks, and the product of two
//! generating functionals is their Kronecker sum. Kronecker factors follow
//! the letters left to right, with row-major index flattening.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourier::{check_hap_sequence, convolve, MatrixFamily};
use crate::genfun::{semigroup_at, GeneratingFunctional};
use crate::irreps::{Factor, FreeProductTable, Label, Table};
use crate::linalg::{self, CMatrix};
use crate::report::{tighter, Verdict, Witness};

fn check_factor(table: &Table, wp: &FreeProductTable, which: Factor) -> Result<()> {
    match table {
        Table::Irreps(t) if Arc::ptr_eq(t, wp.factor(which)) || **t == **wp.factor(which) => Ok(()),
        _ => Err(Error::TableMismatch),
    }
}

fn letter_blocks<'a>(
    wp: &FreeProductTable,
    word: Label,
    lookup: impl Fn(Factor, Label) -> Option<&'a CMatrix>,
) -> Result<Vec<&'a CMatrix>> {
    wp.entry(word)
        .letters
        .iter()
        .map(|&(f, l)| lookup(f, l).ok_or_else(|| Error::MissingBlock(format!("{}:{}", f.index(), wp.factor(f).id(l)))))
        .collect()
}

/// `φ_1 ⋄ φ_2` on the word table: `[1]` at the empty word, `⊗_j φ_{i(j)}^{α_j}`
/// at `α_1 ⋯ α_l`.
pub fn cfree_state(phi1: &MatrixFamily, phi2: &MatrixFamily, wp: &Arc<FreeProductTable>) -> Result<MatrixFamily> {
    check_factor(phi1.table(), wp, Factor::First)?;
    check_factor(phi2.table(), wp, Factor::Second)?;
    if !phi1.is_normalized() || !phi2.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let pick = |f: Factor| if f == Factor::First { phi1 } else { phi2 };
    let mut blocks = BTreeMap::new();
    blocks.insert(Label::TRIVIAL, linalg::identity(1));
    for w in (1..wp.len()).map(Label) {
        let letters = letter_blocks(wp, w, |f, l| pick(f).block(l))?;
        let block = letters[1..].iter().fold(letters[0].clone(), |acc, b| linalg::kron(&acc, b));
        blocks.insert(w, block);
    }
    MatrixFamily::new(Table::Words(wp.clone()), blocks, true)
}

/// Generator of `(φ_t ⋄ ω_t)`: at `α_1 ⋯ α_l` the Kronecker sum
/// `Σ_j I ⊗ … ⊗ L_{i(j)}^{α_j} ⊗ … ⊗ I`.
pub fn cfree_generator(
    l1: &GeneratingFunctional,
    l2: &GeneratingFunctional,
    wp: &Arc<FreeProductTable>,
) -> Result<GeneratingFunctional> {
    check_factor(l1.table(), wp, Factor::First)?;
    check_factor(l2.table(), wp, Factor::Second)?;
    let pick = |f: Factor| if f == Factor::First { l1 } else { l2 };
    let mut blocks = BTreeMap::new();
    for w in (1..wp.len()).map(Label) {
        let letters = letter_blocks(wp, w, |f, l| pick(f).block(l))?;
        blocks.insert(w, linalg::kron_sum(&letters));
    }
    GeneratingFunctional::new(Table::Words(wp.clone()), blocks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diam3Report {
    pub pass: bool,
    /// Largest entrywise deviation over all words.
    pub residual: f64,
    pub worst: Option<Label>,
}

/// `(φ_1 ⋄ φ_2) ⋆ (ω_1 ⋄ ω_2) = (φ_1 ⋆ ω_1) ⋄ (φ_2 ⋆ ω_2)`, blockwise.
///
/// This is the mixed-product rule `(A ⊗ B)(C ⊗ D) = AC ⊗ BD`; anything
/// beyond rounding points at a bug.
pub fn check_diam3(
    phi1: &MatrixFamily,
    phi2: &MatrixFamily,
    omega1: &MatrixFamily,
    omega2: &MatrixFamily,
    wp: &Arc<FreeProductTable>,
    tol: f64,
) -> Result<Diam3Report> {
    let lhs = convolve(&cfree_state(phi1, phi2, wp)?, &cfree_state(omega1, omega2, wp)?)?;
    let rhs = cfree_state(&convolve(phi1, omega1)?, &convolve(phi2, omega2)?, wp)?;
    let mut residual = 0.0;
    let mut worst = None;
    for (&w, a) in lhs.blocks() {
        let b = rhs.block(w).ok_or_else(|| Error::MissingBlock(lhs.table().key(w)))?;
        let r = linalg::max_abs_diff(a, b);
        if r > residual {
            residual = r;
            worst = Some(w);
        }
    }
    Ok(Diam3Report { pass: residual <= tol, residual, worst })
}

/// `ψ_k = exp_⋆(-(ε − h)/k)`: `[1]` at the trivial label, `e^{-1/k}·I`
/// elsewhere.
pub fn damping_family(table: &Table, k: u32) -> MatrixFamily {
    semigroup_at(&GeneratingFunctional::unit_shift(table), 1.0 / f64::from(k)).expect("t > 0")
}

/// `μ_k = ω_k ⋆ ψ_k`. Every input block must be a contraction up to `tol`;
/// the output then satisfies `‖μ_k^α‖ ≤ e^{-1/k}` at nontrivial labels.
pub fn damp_sequence(omegas: &[MatrixFamily], k_values: &[u32], tol: f64) -> Result<Vec<MatrixFamily>> {
    if omegas.len() != k_values.len() || k_values.contains(&0) {
        return Err(Error::InvalidArgument("k_values must be positive and match the sequence".into()));
    }
    omegas
        .iter()
        .zip(k_values)
        .map(|(omega, &k)| {
            if !omega.is_normalized() {
                return Err(Error::NotNormalized);
            }
            for (&l, b) in omega.blocks() {
                let norm = linalg::spectral_norm(b);
                if norm > 1.0 + tol {
                    return Err(Error::NotContractive { label: omega.table().key(l), norm });
                }
            }
            convolve(omega, &damping_family(omega.table(), k))
        })
        .collect()
}

/// Verdicts of [`freeprod_hap_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    /// (a) `‖μ_k^w‖ ≤ e^{-l/k} + tol` for every word `w` of length `l`.
    pub word_bound: Verdict,
    /// (b) blockwise convergence to the identity along the sequence.
    pub convergence: Verdict,
    /// (c) truncated `c_0` decay on the word table for each `k`.
    pub decay: Verdict,
}

impl PipelineReport {
    pub fn pass(&self) -> bool {
        self.word_bound.pass && self.convergence.pass && self.decay.pass
    }

    pub fn verdicts(&self) -> [&Verdict; 3] {
        [&self.word_bound, &self.convergence, &self.decay]
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// `μ_k = φ¹_k ⋄ φ²_k` on the word table, one per `k`.
    pub families: Vec<MatrixFamily>,
    pub report: PipelineReport,
}

/// Builds `μ_k = seq1[k] ⋄ seq2[k]` and checks the three conditions that
/// make the free product inherit the blockwise Haagerup criterion.
///
/// The inputs are expected to be damped already (see [`damp_sequence`]);
/// undamped inputs show up as word-bound violations.
pub fn freeprod_hap_pipeline(
    seq1: &[MatrixFamily],
    seq2: &[MatrixFamily],
    k_values: &[u32],
    wp: &Arc<FreeProductTable>,
    eps_decay: f64,
    conv_tols: &[f64],
    tol: f64,
) -> Result<PipelineOutput> {
    if seq1.len() != k_values.len() || seq2.len() != k_values.len() || k_values.contains(&0) {
        return Err(Error::InvalidArgument("sequences and k_values must align; k ≥ 1".into()));
    }
    let families = seq1.iter().zip(seq2).map(|(a, b)| cfree_state(a, b, wp)).collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    let mut tightest = None;
    for (idx, (mu, &k)) in families.iter().zip(k_values).enumerate() {
        for (&w, b) in mu.blocks().iter().filter(|(w, _)| !w.is_trivial()) {
            let length = wp.entry(w).word.len() as f64;
            let bound = linalg::exp_real(-length / f64::from(k)) + tol;
            let witness = Witness::new(mu.table().key(w), Some(idx), linalg::spectral_norm(b), bound);
            if witness.value > bound {
                violations.push(witness);
            } else {
                tightest = tighter(tightest, witness);
            }
        }
    }
    let word_bound = Verdict::from_checks(
        "word bound (‖μ_k^w‖ ≤ e^{-l/k} + tol)",
        violations,
        tightest,
        format!("max word length {}, tol {:e}", wp.max_word_length(), tol),
    );
    let hap = check_hap_sequence(&families, eps_decay, conv_tols, None)?;
    Ok(PipelineOutput {
        families,
        report: PipelineReport { word_bound, convergence: hap.convergence, decay: hap.decay },
    })
}
