//! Block-level cocycle data `c^α`.
//!
//! Only the Gram data `(c^α)* c^α = L^α + (L^α)*` is constrained at block
//! level, so each `c^α` is stored as the principal positive semidefinite
//! square root of that matrix: square, unique, and exactly reproducible.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fourier::check_shapes;
use crate::genfun::{proper_report, GeneratingFunctional, ProperReport};
use crate::irreps::{Label, Table};
use crate::linalg::{self, CMatrix};

/// Default clamp tolerance for negative eigenvalues before square roots.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-10;

/// Cocycle blocks at nontrivial labels; `c` vanishes on the unit, so the
/// trivial label never carries a block.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleMatrices {
    table: Table,
    blocks: BTreeMap<Label, CMatrix>,
}

impl CocycleMatrices {
    pub fn new(table: Table, blocks: BTreeMap<Label, CMatrix>) -> Result<Self> {
        if blocks.contains_key(&Label::TRIVIAL) {
            return Err(Error::TrivialBlock { expected: "absent" });
        }
        check_shapes(&table, &blocks)?;
        Ok(Self { table, blocks })
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
}

/// An eigenvalue in `[-tol, 0)` that was replaced by 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampEvent {
    pub label: Label,
    pub eigenvalue: f64,
}

/// `c^α = (L^α + (L^α)*)^{1/2}`, the principal PSD root; equals
/// `(2L^α)^{1/2}` for symmetric `L`.
pub fn factor_from_generator(l: &GeneratingFunctional, tol: f64) -> Result<(CocycleMatrices, Vec<ClampEvent>)> {
    let mut blocks = BTreeMap::new();
    let mut clamps = Vec::new();
    for (&label, b) in l.blocks().iter().filter(|(l, _)| !l.is_trivial()) {
        let real_part = b + b.adjoint();
        let root = linalg::psd_sqrt(&real_part, tol)
            .map_err(|eigenvalue| Error::NegativeEigenvalue { label: l.table().key(label), eigenvalue })?;
        if root.clamped < 0.0 {
            clamps.push(ClampEvent { label, eigenvalue: root.clamped });
        }
        blocks.insert(label, root.root);
    }
    Ok((CocycleMatrices { table: l.table().clone(), blocks }, clamps))
}

/// `L^α = (c^α)* c^α / 2`, made exactly Hermitian.
pub fn gram_from_cocycle(c: &CocycleMatrices) -> GeneratingFunctional {
    let blocks = c
        .blocks
        .iter()
        .map(|(&label, b)| (label, linalg::hermitian_part(&(b.adjoint() * b * linalg::C64::new(0.5, 0.0)))))
        .collect();
    GeneratingFunctional::new(c.table.clone(), blocks).expect("shapes inherited from cocycle")
}

/// Labels where `(c^α)* c^α ≥ M·I` fails. The trivial label counts as a
/// zero block.
pub fn check_proper_cocycle(c: &CocycleMatrices, level: f64) -> ProperReport {
    let mins = core::iter::once((Label::TRIVIAL, 0.0))
        .chain(c.blocks.iter().map(|(&label, b)| (label, linalg::min_eigenvalue(&(b.adjoint() * b)))));
    proper_report(&c.table, level, mins)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedReport {
    /// `max_α ‖c^α‖` over the truncation (0 when empty).
    pub sup_norm: f64,
    pub worst: Option<Label>,
    pub radius: usize,
}

pub fn check_bounded(c: &CocycleMatrices) -> BoundedReport {
    let mut sup_norm = 0.0;
    let mut worst = None;
    for (&label, b) in &c.blocks {
        let n = linalg::spectral_norm(b);
        if n > sup_norm {
            sup_norm = n;
            worst = Some(label);
        }
    }
    BoundedReport { sup_norm, worst, radius: c.table.radius() }
}
