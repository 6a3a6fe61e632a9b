//! Fourier-side families `(Fμ)^α` and their convolution algebra.
//!
//! A functional on the compact side is recorded by one `n_α × n_α` matrix
//! per label. Convolution becomes blockwise matrix multiplication, the
//! counit is the identity at every label and the Haar state is `[1]` at the
//! trivial label and zero elsewhere.
//!
//! Labels without a block are *unspecified*, never implicitly zero.
//! Binary operations work on the intersection of supports and report what
//! was dropped.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::irreps::{Label, Table};
use crate::linalg::{self, CMatrix};
use crate::report::{tighter, Verdict, Witness};

/// Default absolute tolerance on norms.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFamily {
    table: Table,
    blocks: BTreeMap<Label, CMatrix>,
    normalized: bool,
}

impl MatrixFamily {
    /// Validates block shapes, and the trivial block `[1]` when
    /// `normalized` is set.
    pub fn new(table: Table, blocks: BTreeMap<Label, CMatrix>, normalized: bool) -> Result<Self> {
        check_shapes(&table, &blocks)?;
        if normalized {
            match blocks.get(&Label::TRIVIAL) {
                Some(b) if b[(0, 0)] == linalg::C64::new(1.0, 0.0) => {}
                _ => return Err(Error::NotNormalized),
            }
        }
        Ok(Self { table, blocks, normalized })
    }

    /// Family with a block at every label of the table.
    pub fn from_fn(table: Table, normalized: bool, mut block: impl FnMut(Label, usize) -> CMatrix) -> Result<Self> {
        let blocks = table.labels().map(|l| (l, block(l, table.dim(l)))).collect();
        Self::new(table, blocks, normalized)
    }

    /// Family whose block at `α` is `f(α) · I`.
    pub fn scalar_profile(table: Table, f: impl Fn(Label) -> f64) -> Result<Self> {
        let normalized = f(Label::TRIVIAL) == 1.0;
        Self::from_fn(table, normalized, |l, n| linalg::scalar(n, f(l)))
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn block(&self, label: Label) -> Option<&CMatrix> {
        self.blocks.get(&label)
    }

    pub fn blocks(&self) -> &BTreeMap<Label, CMatrix> {
        &self.blocks
    }

    pub fn support(&self) -> impl Iterator<Item = Label> + '_ {
        self.blocks.keys().copied()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn map_blocks(&self, normalized: bool, f: impl Fn(Label, &CMatrix) -> CMatrix) -> Result<Self> {
        let blocks = self.blocks.iter().map(|(&l, b)| (l, f(l, b))).collect();
        Self::new(self.table.clone(), blocks, normalized)
    }

    fn require_block(&self, label: Label) -> Result<&CMatrix> {
        self.blocks.get(&label).ok_or_else(|| Error::MissingBlock(self.table.key(label)))
    }
}

pub(crate) fn check_shapes(table: &Table, blocks: &BTreeMap<Label, CMatrix>) -> Result<()> {
    for (&label, b) in blocks {
        if label.0 >= table.len() {
            return Err(Error::UnknownLabel(format!("#{}", label.0)));
        }
        let n = table.dim(label);
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::BlockShape { label: table.key(label), rows: b.nrows(), cols: b.ncols(), expected: n });
        }
    }
    Ok(())
}

/// Identity block at every label.
pub fn counit_family(table: &Table) -> MatrixFamily {
    MatrixFamily::from_fn(table.clone(), true, |_, n| linalg::identity(n)).expect("valid shapes")
}

/// `[1]` at the trivial label, zero blocks elsewhere.
pub fn haar_family(table: &Table) -> MatrixFamily {
    MatrixFamily::from_fn(
        table.clone(),
        true,
        |l, n| {
            if l.is_trivial() {
                linalg::identity(1)
            } else {
                linalg::zeros(n)
            }
        },
    )
    .expect("valid shapes")
}

/// Labels present in exactly one of the two supports.
pub fn support_mismatch(f: &MatrixFamily, g: &MatrixFamily) -> Vec<Label> {
    let mut out: Vec<Label> = f
        .support()
        .filter(|l| !g.blocks.contains_key(l))
        .chain(g.support().filter(|l| !f.blocks.contains_key(l)))
        .collect();
    out.sort();
    out
}

/// Convolution `F ⋆ G`: blockwise product `F^α G^α` on the common support.
pub fn convolve(f: &MatrixFamily, g: &MatrixFamily) -> Result<MatrixFamily> {
    convolve_reporting(f, g).map(|(family, _)| family)
}

/// [`convolve`], also returning the labels dropped from either operand.
pub fn convolve_reporting(f: &MatrixFamily, g: &MatrixFamily) -> Result<(MatrixFamily, Vec<Label>)> {
    if f.table != g.table {
        return Err(Error::TableMismatch);
    }
    let blocks = f.blocks.iter().filter_map(|(l, a)| g.blocks.get(l).map(|b| (*l, a * b))).collect();
    let family = MatrixFamily::new(f.table.clone(), blocks, f.normalized && g.normalized)?;
    Ok((family, support_mismatch(f, g)))
}

/// Spectral norm of the block at `label`.
pub fn block_norm(f: &MatrixFamily, label: Label) -> Result<f64> {
    f.require_block(label).map(linalg::spectral_norm)
}

/// Outcome of the truncated `c_0` test.
#[derive(Debug, Clone, PartialEq)]
pub struct C0Report {
    pub eps: f64,
    /// Supported labels with block norm `> eps`, with their norms.
    pub exceptional: Vec<(Label, f64)>,
    /// Depth of the outermost nontrivial shell of the table.
    pub boundary_depth: usize,
    /// Outermost-shell labels that are exceptional.
    pub boundary_exceptional: Vec<(Label, f64)>,
    /// Outermost-shell labels without a block.
    pub boundary_unsupported: Vec<Label>,
    /// No outermost-shell label is exceptional or unspecified, i.e. the
    /// exceptional set sits strictly inside the truncation.
    pub tail_clean: bool,
}

/// Collects the labels whose block norm exceeds `eps`.
///
/// Within a finite truncation every exceptional set is finite; what can be
/// checked is that it stays away from the truncation boundary, which is
/// what `tail_clean` records. The boundary is the set of nontrivial labels
/// of maximal depth (radius or word length).
pub fn check_c0(f: &MatrixFamily, eps: f64) -> C0Report {
    let table = f.table();
    let boundary_depth = table.nontrivial().map(|l| table.depth(l)).max().unwrap_or(0);
    let on_boundary = |l: Label| !l.is_trivial() && table.depth(l) == boundary_depth;
    let mut exceptional = Vec::new();
    let mut boundary_exceptional = Vec::new();
    for (&l, b) in &f.blocks {
        let n = linalg::spectral_norm(b);
        if n > eps {
            exceptional.push((l, n));
            if on_boundary(l) {
                boundary_exceptional.push((l, n));
            }
        }
    }
    let boundary_unsupported: Vec<Label> =
        table.nontrivial().filter(|&l| on_boundary(l) && !f.blocks.contains_key(&l)).collect();
    let tail_clean = boundary_exceptional.is_empty() && boundary_unsupported.is_empty();
    C0Report { eps, exceptional, boundary_depth, boundary_exceptional, boundary_unsupported, tail_clean }
}

/// Optional third condition: `‖F_k^α‖ ≤ e^{-1/k} + tol` at nontrivial labels.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictBound {
    /// The `k` attached to each family of the sequence.
    pub k_values: Vec<u32>,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HapReport {
    /// Truncated `c_0` decay of every family.
    pub decay: Verdict,
    /// Blockwise convergence to the identity.
    pub convergence: Verdict,
    pub strict: Option<Verdict>,
}

impl HapReport {
    pub fn pass(&self) -> bool {
        self.decay.pass && self.convergence.pass && self.strict.as_ref().map_or(true, |v| v.pass)
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        [Some(&self.decay), Some(&self.convergence), self.strict.as_ref()].into_iter().flatten()
    }
}

/// Certifies a finite run of the blockwise Haagerup criterion:
///
/// * (a) every family decays: [`check_c0`] at `eps_decay` is tail-clean;
/// * (b) `‖F_k^α − I‖ ≤ conv_tols[k]` at every supported label, with
///   `conv_tols` non-increasing;
/// * (c) if `strict` is given, `‖F_k^α‖ ≤ e^{-1/k} + tol` at nontrivial labels.
pub fn check_hap_sequence(
    seq: &[MatrixFamily],
    eps_decay: f64,
    conv_tols: &[f64],
    strict: Option<&StrictBound>,
) -> Result<HapReport> {
    if seq.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    if conv_tols.len() != seq.len() {
        return Err(Error::InvalidArgument(format!(
            "{} convergence tolerances for {} families",
            conv_tols.len(),
            seq.len()
        )));
    }
    if let Some(s) = strict {
        if s.k_values.len() != seq.len() || s.k_values.contains(&0) {
            return Err(Error::InvalidArgument("k_values must be positive and match the sequence".into()));
        }
    }
    let table = seq[0].table();
    if seq.iter().any(|f| f.table() != table) {
        return Err(Error::TableMismatch);
    }
    let key = |l: Label| table.key(l);

    let mut violations = Vec::new();
    let mut tightest = None;
    for (k, f) in seq.iter().enumerate() {
        let report = check_c0(f, eps_decay);
        for &(l, n) in &report.boundary_exceptional {
            violations.push(Witness::new(key(l), Some(k), n, eps_decay));
        }
        for &l in &report.boundary_unsupported {
            violations.push(Witness::new(key(l), Some(k), f64::NAN, eps_decay));
        }
        for l in table.nontrivial().filter(|&l| table.depth(l) == report.boundary_depth) {
            if let Some(b) = f.block(l) {
                tightest = tighter(tightest, Witness::new(key(l), Some(k), linalg::spectral_norm(b), eps_decay));
            }
        }
    }
    let decay = Verdict::from_checks(
        "c0 decay (outermost shell ≤ eps_decay)",
        violations,
        tightest,
        format!("truncation radius {}", table.radius()),
    );

    let mut violations = Vec::new();
    let mut tightest = None;
    for (k, w) in conv_tols.windows(2).enumerate() {
        if w[1] > w[0] {
            violations.push(Witness::new("conv_tols", Some(k + 1), w[1], w[0]));
        }
    }
    for (k, f) in seq.iter().enumerate() {
        for (&l, b) in f.blocks() {
            let d = linalg::spectral_norm(&(b - linalg::identity(b.nrows())));
            let w = Witness::new(key(l), Some(k), d, conv_tols[k]);
            if d > conv_tols[k] {
                violations.push(w);
            } else {
                tightest = tighter(tightest, w);
            }
        }
    }
    let convergence =
        Verdict::from_checks("pointwise convergence (‖F_k − I‖ ≤ conv_tols[k])", violations, tightest, "");

    let strict = strict.map(|s| {
        let mut violations = Vec::new();
        let mut tightest = None;
        for (idx, f) in seq.iter().enumerate() {
            let bound = linalg::exp_real(-1.0 / f64::from(s.k_values[idx])) + s.tol;
            for (&l, b) in f.blocks().iter().filter(|(l, _)| !l.is_trivial()) {
                let w = Witness::new(key(l), Some(idx), linalg::spectral_norm(b), bound);
                if w.value > bound {
                    violations.push(w);
                } else {
                    tightest = tighter(tightest, w);
                }
            }
        }
        Verdict::from_checks("strict bound (‖F_k‖ ≤ e^{-1/k} + tol)", violations, tightest, format!("tol {:e}", s.tol))
    });

    Ok(HapReport { decay, convergence, strict })
}

/// Necessary conditions for a family to come from a state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCandidate {
    pub candidate: bool,
    /// `|F^1 − 1|`, or `None` without a trivial block.
    pub trivial_residual: Option<f64>,
    /// Largest block norm and where it occurs.
    pub max_norm: Option<(Label, f64)>,
    pub diagnostics: Vec<String>,
}

/// Checks `F^1 = [1]` and `‖F^α‖ ≤ 1` up to `tol`.
///
/// These conditions are necessary but not sufficient: there is no blockwise
/// characterization of state families, so a `true` here is not a proof of
/// positivity.
pub fn is_state_candidate(f: &MatrixFamily, tol: f64) -> StateCandidate {
    let mut diagnostics =
        alloc::vec![String::from("necessary conditions only: trivial block [1] and contractive blocks")];
    let trivial_residual = f.block(Label::TRIVIAL).map(|b| linalg::cabs(b[(0, 0)] - linalg::C64::new(1.0, 0.0)));
    let mut ok = true;
    match trivial_residual {
        None => {
            ok = false;
            diagnostics.push(String::from("trivial block is unspecified"));
        }
        Some(r) if r > tol => {
            ok = false;
            diagnostics.push(format!("trivial block differs from [1] by {r:e}"));
        }
        _ => {}
    }
    let mut max_norm: Option<(Label, f64)> = None;
    for (&l, b) in f.blocks() {
        let n = linalg::spectral_norm(b);
        if max_norm.map_or(true, |(_, m)| n > m) {
            max_norm = Some((l, n));
        }
        if n > 1.0 + tol {
            ok = false;
            diagnostics.push(format!("block `{}` has norm {n} > 1", f.table().key(l)));
        }
    }
    StateCandidate { candidate: ok, trivial_residual, max_norm, diagnostics }
}
