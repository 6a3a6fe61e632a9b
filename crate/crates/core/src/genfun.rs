//! Generating functionals `L = (L^α)` and the convolution semigroups they
//! generate, `(μ_t)^α = e^{-t L^α}`.
//!
//! Properness is only ever certified relative to a truncation: a report
//! says "proper at level M up to radius R", never more.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourier::{check_shapes, MatrixFamily, DEFAULT_TOL};
use crate::irreps::{Label, Table};
use crate::linalg::{self, CMatrix};

/// Family of blocks `L^α = (L(u^α_{ij}))_{ij}` with zero trivial block.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunctional {
    table: Table,
    blocks: BTreeMap<Label, CMatrix>,
}

impl GeneratingFunctional {
    /// Validates shapes; inserts the zero trivial block if absent and
    /// rejects a nonzero one.
    pub fn new(table: Table, mut blocks: BTreeMap<Label, CMatrix>) -> Result<Self> {
        check_shapes(&table, &blocks)?;
        match blocks.get(&Label::TRIVIAL) {
            Some(b) if b[(0, 0)] != linalg::C64::new(0.0, 0.0) => return Err(Error::TrivialBlock { expected: "[0]" }),
            Some(_) => {}
            None => {
                blocks.insert(Label::TRIVIAL, linalg::zeros(1));
            }
        }
        Ok(Self { table, blocks })
    }

    /// Block at every nontrivial label from `f(label, dim)`.
    pub fn from_fn(table: Table, mut f: impl FnMut(Label, usize) -> CMatrix) -> Result<Self> {
        let blocks = table.nontrivial().map(|l| (l, f(l, table.dim(l)))).collect();
        Self::new(table, blocks)
    }

    /// Zero at every label.
    pub fn zero(table: &Table) -> Self {
        Self::from_fn(table.clone(), |_, n| linalg::zeros(n)).expect("valid shapes")
    }

    /// `ε − h`: identity at every nontrivial label.
    pub fn unit_shift(table: &Table) -> Self {
        Self::from_fn(table.clone(), |_, n| linalg::identity(n)).expect("valid shapes")
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
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub symmetric: bool,
    /// Largest `‖L^α − (L^α)*‖` and where it occurs.
    pub max_residual: f64,
    pub worst: Option<Label>,
}

/// `‖L^α − (L^α)*‖ ≤ tol` at every label.
pub fn check_symmetric(l: &GeneratingFunctional, tol: f64) -> SymmetryReport {
    let mut max_residual = 0.0;
    let mut worst = None;
    for (&label, b) in &l.blocks {
        let r = linalg::hermitian_residual(b);
        if r > max_residual {
            max_residual = r;
            worst = Some(label);
        }
    }
    SymmetryReport { symmetric: max_residual <= tol, max_residual, worst }
}

fn require_symmetric(l: &GeneratingFunctional, tol: f64) -> Result<()> {
    let s = check_symmetric(l, tol);
    match s.worst {
        Some(label) if !s.symmetric => Err(Error::NotSymmetric { label: l.table.key(label), residual: s.max_residual }),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub positive: bool,
    /// Smallest eigenvalue over all blocks and where it occurs.
    pub worst_eigenvalue: f64,
    pub worst: Option<Label>,
}

/// Every `L^α` has smallest eigenvalue `≥ −tol`. Fails with an error on
/// non-Hermitian input.
pub fn check_positive_blocks(l: &GeneratingFunctional, tol: f64) -> Result<PositivityReport> {
    require_symmetric(l, tol.max(DEFAULT_TOL))?;
    let mut worst_eigenvalue = f64::INFINITY;
    let mut worst = None;
    for (&label, b) in &l.blocks {
        let m = linalg::min_eigenvalue(b);
        if m < worst_eigenvalue {
            worst_eigenvalue = m;
            worst = Some(label);
        }
    }
    if worst.is_none() {
        worst_eigenvalue = 0.0;
    }
    Ok(PositivityReport { positive: worst_eigenvalue >= -tol, worst_eigenvalue, worst })
}

/// Properness at one level, relative to the table's truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProperReport {
    pub level: f64,
    /// Labels with `λ_min(L^α) < level`, with that eigenvalue.
    pub exceptional: Vec<(Label, f64)>,
    /// Supported labels outside the exceptional set exist.
    pub proper_within_truncation: bool,
    /// No exceptional label lies in the outermost shell.
    pub boundary_clear: bool,
    pub radius: usize,
}

pub(crate) fn proper_report(table: &Table, level: f64, eigen_mins: impl Iterator<Item = (Label, f64)>) -> ProperReport {
    let boundary = table.nontrivial().map(|l| table.depth(l)).max().unwrap_or(0);
    let mut supported = 0usize;
    let mut exceptional = Vec::new();
    for (label, m) in eigen_mins {
        supported += 1;
        if m < level {
            exceptional.push((label, m));
        }
    }
    let boundary_clear = !exceptional.iter().any(|&(l, _)| !l.is_trivial() && table.depth(l) == boundary);
    ProperReport {
        level,
        proper_within_truncation: exceptional.len() < supported,
        exceptional,
        boundary_clear,
        radius: table.radius(),
    }
}

/// Labels where `L^α ≥ M·I` fails. Requires Hermitian blocks.
pub fn check_proper(l: &GeneratingFunctional, level: f64) -> Result<ProperReport> {
    require_symmetric(l, DEFAULT_TOL)?;
    Ok(proper_report(&l.table, level, l.blocks.iter().map(|(&label, b)| (label, linalg::min_eigenvalue(b)))))
}

/// `μ_t` with blocks `e^{-t L^α}` and trivial block `[1]`.
pub fn semigroup_at(l: &GeneratingFunctional, t: f64) -> Result<MatrixFamily> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
    }
    let scale = linalg::C64::new(-t, 0.0);
    let blocks = l
        .blocks
        .iter()
        .map(|(&label, b)| {
            let block = if label.is_trivial() { linalg::identity(1) } else { linalg::expm(&(b * scale)) };
            (label, block)
        })
        .collect();
    MatrixFamily::new(l.table.clone(), blocks, true)
}

/// `L + (ε − h)`: adds the identity to every nontrivial block.
pub fn shift_unit(l: &GeneratingFunctional) -> GeneratingFunctional {
    let blocks = l
        .blocks
        .iter()
        .map(|(&label, b)| {
            let shifted = if label.is_trivial() { b.clone() } else { b + linalg::identity(b.nrows()) };
            (label, shifted)
        })
        .collect();
    GeneratingFunctional { table: l.table.clone(), blocks }
}

/// Weights `(β_n)` and accuracies `(ε_n)` for [`build_from_states`].
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `β_n = 2ⁿ`, `ε_n = 8⁻ⁿ` for `n = 1..=terms`; the unsupplied tail is
    /// `Σ_{n>terms} 4⁻ⁿ = 4^{-terms}/3`.
    Default { terms: usize },
    /// Caller-supplied terms plus a bound on `Σ β_n ε_n` over the terms not
    /// supplied.
    Explicit { betas: Vec<f64>, eps: Vec<f64>, tail_bound: f64 },
}

impl Schedule {
    pub fn terms(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Schedule::Default { terms } => {
                (1..=*terms).map(|n| (libm::pow(2.0, n as f64), libm::pow(8.0, -(n as f64)))).unzip()
            }
            Schedule::Explicit { betas, eps, .. } => (betas.clone(), eps.clone()),
        }
    }

    pub fn tail_bound(&self) -> f64 {
        match self {
            Schedule::Default { terms } => libm::pow(4.0, -(*terms as f64)) / 3.0,
            Schedule::Explicit { tail_bound, .. } => *tail_bound,
        }
    }

    fn validate(&self) -> Result<()> {
        let (betas, eps) = self.terms();
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if betas.len() != eps.len() {
            return bad("betas and eps differ in length");
        }
        if betas.iter().chain(&eps).any(|&x| !(x > 0.0) || !x.is_finite()) {
            return bad("betas and eps must be positive");
        }
        if betas.windows(2).any(|w| w[1] <= w[0]) {
            return bad("betas must be strictly increasing");
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps must be strictly decreasing");
        }
        if !(self.tail_bound() >= 0.0) {
            return bad("tail bound must be nonnegative");
        }
        Ok(())
    }
}

/// Certificate accompanying [`build_from_states`].
#[derive(Debug, Clone, PartialEq)]
pub struct BuildReport {
    /// `Σ β_n ε_n` over the terms beyond the supplied range.
    pub tail_bound: f64,
    /// Per label, the first index `N(α)` (1-based) from which
    /// `‖I − (Fμ_n)^α‖ ≤ ε_n` holds for every supplied `n ≥ N(α)`;
    /// `None` when it fails at the last supplied term.
    pub first_certified: Vec<(Label, Option<usize>)>,
    /// `F_n = {α : ‖I − (Fμ_n)^α‖ ≤ ε_n}` for each supplied `n`.
    pub certified_sets: Vec<Vec<Label>>,
}

impl BuildReport {
    /// Labels whose series cannot be certified from the supplied terms.
    pub fn uncertified(&self) -> impl Iterator<Item = Label> + '_ {
        self.first_certified.iter().filter(|(_, n)| n.is_none()).map(|&(l, _)| l)
    }
}

/// `L^α = Σ_n β_n (I − (Fμ_n)^α)` over the supplied states.
///
/// The result lives on the labels where every state has a block.
pub fn build_from_states(states: &[MatrixFamily], schedule: &Schedule) -> Result<(GeneratingFunctional, BuildReport)> {
    schedule.validate()?;
    let (betas, eps) = schedule.terms();
    if states.len() != betas.len() || states.is_empty() {
        return Err(Error::InvalidArgument(format!("{} states for {} schedule terms", states.len(), betas.len())));
    }
    let table = states[0].table().clone();
    for s in states {
        if s.table() != &table {
            return Err(Error::TableMismatch);
        }
        if !s.is_normalized() {
            return Err(Error::NotNormalized);
        }
    }
    let support: Vec<Label> = states[0].support().filter(|l| states.iter().all(|s| s.block(*l).is_some())).collect();

    let mut blocks = BTreeMap::new();
    let mut first_certified = Vec::with_capacity(support.len());
    let mut certified_sets = alloc::vec![Vec::new(); states.len()];
    for &label in &support {
        let n = table.dim(label);
        let mut sum = linalg::zeros(n);
        let mut first = None;
        for (k, state) in states.iter().enumerate() {
            let gap = linalg::identity(n) - state.block(label).expect("in support");
            if linalg::spectral_norm(&gap) <= eps[k] {
                certified_sets[k].push(label);
                first.get_or_insert(k + 1);
            } else {
                first = None;
            }
            sum += gap * linalg::C64::new(betas[k], 0.0);
        }
        first_certified.push((label, first));
        if !label.is_trivial() {
            blocks.insert(label, sum);
        }
    }
    let l = GeneratingFunctional::new(table, blocks)?;
    let report = BuildReport { tail_bound: schedule.tail_bound(), first_certified, certified_sets };
    Ok((l, report))
}

/// Per-label error estimate from [`generator_from_semigroup`].
pub type ErrorEstimates = Vec<(Label, f64)>;

/// Estimates `L = lim_{t→0⁺} (ε − μ_t)/t` from samples of the semigroup.
///
/// The difference quotients `(I − μ_t^α)/t` at the given `t` values are
/// extrapolated to `t = 0` by polynomial (Richardson) extrapolation. The
/// error estimate per label is the distance between the extrapolated block
/// and the quotient at the smallest `t`.
pub fn generator_from_semigroup(
    table: &Table,
    sampler: impl Fn(f64) -> MatrixFamily,
    t_small: &[f64],
) -> Result<(GeneratingFunctional, ErrorEstimates)> {
    if t_small.len() < 2 || t_small.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive t values".into()));
    }
    for (i, a) in t_small.iter().enumerate() {
        if t_small[..i].contains(a) {
            return Err(Error::InvalidArgument("t values must be distinct".into()));
        }
    }
    let samples: Vec<MatrixFamily> = t_small.iter().map(|&t| sampler(t)).collect();
    if samples.iter().any(|s| s.table() != table) {
        return Err(Error::TableMismatch);
    }
    // Lagrange weights for evaluating the interpolant at 0
    let weights: Vec<f64> = t_small
        .iter()
        .enumerate()
        .map(|(i, &ti)| t_small.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &tj)| tj / (tj - ti)).product())
        .collect();
    let smallest = (0..t_small.len()).min_by(|&a, &b| t_small[a].total_cmp(&t_small[b])).expect("nonempty");

    let mut blocks = BTreeMap::new();
    let mut errors = Vec::new();
    for label in table.nontrivial() {
        if samples.iter().any(|s| s.block(label).is_none()) {
            continue;
        }
        let n = table.dim(label);
        let quotients: Vec<CMatrix> = samples
            .iter()
            .zip(t_small)
            .map(|(s, &t)| (linalg::identity(n) - s.block(label).expect("checked")) * linalg::C64::new(1.0 / t, 0.0))
            .collect();
        let mut estimate = linalg::zeros(n);
        for (q, &w) in quotients.iter().zip(&weights) {
            estimate += q * linalg::C64::new(w, 0.0);
        }
        errors.push((label, linalg::spectral_norm(&(&estimate - &quotients[smallest]))));
        blocks.insert(label, estimate);
    }
    Ok((GeneratingFunctional::new(table.clone(), blocks)?, errors))
}
