//! JSON file formats for tables, matrix families, generating functionals
//! and cocycles.
//!
//! A table reference is one of
//!
//! * an inline table: `{"entries": [{"id": "a", "dim": 2, "trivial": false}]}`
//!   (an optional `"depth"` per entry places it in a radius shell);
//! * a classical dual: `{"group": "F2", "radius": 3}`;
//! * a free product: `{"free_product": {"factor1": ref, "factor2": ref, "max_word_length": 3}}`;
//! * a string, read as a path relative to the referencing file.
//!
//! Blocks are keyed by label id (word encoding for word tables) and stored
//! row by row as `[re, im]` pairs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hapkit_core::classical::{dual_irrep_table, GroupSpec};
use hapkit_core::cocycle::CocycleMatrices;
use hapkit_core::fourier::MatrixFamily;
use hapkit_core::genfun::GeneratingFunctional;
use hapkit_core::irreps::{FreeProductTable, IrrepTable, Label, Table, TableEntry};
use hapkit_core::linalg::{CMatrix, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub id: String,
    pub dim: usize,
    #[serde(default)]
    pub trivial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

/// Resolved table reference: no paths, enough to rebuild the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableSpec {
    Inline { entries: Vec<EntryJson> },
    Group { group: String, radius: u64 },
    FreeProduct { free_product: FreeProductSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeProductSpec {
    pub factor1: Box<TableSpec>,
    pub factor2: Box<TableSpec>,
    pub max_word_length: usize,
}

/// A built table together with the reference it came from.
#[derive(Debug, Clone)]
pub struct LoadedTable {
    pub table: Table,
    pub spec: TableSpec,
}

impl TableSpec {
    pub fn build(&self) -> CliResult<Table> {
        Ok(match self {
            TableSpec::Inline { entries } => {
                Table::Irreps(Arc::new(IrrepTable::new(entries.iter().map(|e| TableEntry {
                    id: e.id.clone(),
                    dim: e.dim,
                    trivial: e.trivial,
                    depth: e.depth,
                }))?))
            }
            TableSpec::Group { group, radius } => {
                let spec = Arc::new(GroupSpec::parse(group)?);
                Table::Irreps(Arc::new(dual_irrep_table(&spec, *radius)))
            }
            TableSpec::FreeProduct { free_product: fp } => {
                let factor = |s: &TableSpec| -> CliResult<Arc<IrrepTable>> {
                    match s.build()? {
                        Table::Irreps(t) => Ok(t),
                        Table::Words(_) => Err(CliError::schema("free product factors must be irrep tables")),
                    }
                };
                Table::Words(Arc::new(FreeProductTable::new(
                    factor(&fp.factor1)?,
                    factor(&fp.factor2)?,
                    fp.max_word_length,
                )))
            }
        })
    }

    /// Inline form of an irrep table.
    pub fn inline(table: &IrrepTable) -> Self {
        TableSpec::Inline {
            entries: table
                .entries()
                .iter()
                .map(|e| EntryJson {
                    id: e.label.id.clone(),
                    dim: e.dim,
                    trivial: e.label.is_trivial,
                    depth: Some(e.depth),
                })
                .collect(),
        }
    }
}

/// Replaces path strings by the JSON they point to, recursively.
fn resolve_refs(value: &Value, base: &Path, depth: usize) -> CliResult<Value> {
    if depth > 16 {
        return Err(CliError::schema("table references nest too deeply"));
    }
    match value {
        Value::String(p) => {
            let path = base.join(p);
            let inner = read_json(&path)?;
            let inner_base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            resolve_refs(&inner, &inner_base, depth + 1)
        }
        Value::Object(map) if map.contains_key("free_product") => {
            let mut out = map.clone();
            if let Some(Value::Object(fp)) = map.get("free_product") {
                let mut fp = fp.clone();
                for key in ["factor1", "factor2"] {
                    if let Some(v) = fp.get(key) {
                        let resolved = resolve_refs(v, base, depth + 1)?;
                        fp.insert(key.to_string(), resolved);
                    }
                }
                out.insert("free_product".into(), Value::Object(fp));
            }
            Ok(Value::Object(out))
        }
        other => Ok(other.clone()),
    }
}

pub fn load_table(value: &Value, base: &Path) -> CliResult<LoadedTable> {
    let resolved = resolve_refs(value, base, 0)?;
    let spec: TableSpec =
        serde_json::from_value(resolved).map_err(|e| CliError::schema(format!("invalid table reference: {e}")))?;
    let table = spec.build()?;
    Ok(LoadedTable { table, spec })
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.to_path_buf(), source: e })
}

pub fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// `[[[re, im], ...], ...]`
pub type BlockJson = Vec<Vec<[f64; 2]>>;

pub fn block_to_json(m: &CMatrix) -> BlockJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn block_from_json(rows: &BlockJson, key: &str) -> CliResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::schema(format!("block `{key}` is not square")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Value>,
    pub blocks: BTreeMap<String, BlockJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
}

/// Blocks in canonical table order, keyed by label.
fn blocks_from_json(table: &Table, blocks: &BTreeMap<String, BlockJson>) -> CliResult<BTreeMap<Label, CMatrix>> {
    blocks
        .iter()
        .map(|(key, rows)| {
            let label =
                table.find(key).ok_or_else(|| CliError::schema(format!("label `{key}` is not in the table")))?;
            Ok((label, block_from_json(rows, key)?))
        })
        .collect()
}

fn blocks_to_json<'a>(
    table: &Table,
    blocks: impl Iterator<Item = (&'a Label, &'a CMatrix)>,
) -> BTreeMap<String, BlockJson> {
    blocks.map(|(&l, b)| (table.key(l), block_to_json(b))).collect()
}

fn check_kind(json: &FamilyJson, expected: &str) -> CliResult<()> {
    match json.kind.as_deref() {
        None => Ok(()),
        Some(k) if k == expected => Ok(()),
        Some(k) => Err(CliError::schema(format!("expected kind `{expected}`, found `{k}`"))),
    }
}

/// Parses a family whose table is given in the object or, failing that,
/// by `fallback`. Without an explicit `normalized` flag the family counts
/// as normalized when its trivial block is exactly `[1]`.
pub fn family_from_value(
    value: &Value,
    base: &Path,
    fallback: Option<&LoadedTable>,
) -> CliResult<(MatrixFamily, LoadedTable)> {
    let json: FamilyJson =
        serde_json::from_value(value.clone()).map_err(|e| CliError::schema(format!("invalid family: {e}")))?;
    check_kind(&json, "family")?;
    let loaded = match (&json.table, fallback) {
        (Some(t), _) => load_table(t, base)?,
        (None, Some(f)) => f.clone(),
        (None, None) => return Err(CliError::schema("family has no table")),
    };
    let blocks = blocks_from_json(&loaded.table, &json.blocks)?;
    let normalized =
        json.normalized.unwrap_or_else(|| blocks.get(&Label::TRIVIAL).is_some_and(|b| b[(0, 0)] == C64::new(1.0, 0.0)));
    Ok((MatrixFamily::new(loaded.table.clone(), blocks, normalized)?, loaded))
}

pub fn family_to_value(f: &MatrixFamily, spec: &TableSpec) -> Value {
    let json = FamilyJson {
        kind: Some("family".into()),
        table: Some(serde_json::to_value(spec).expect("serializable")),
        blocks: blocks_to_json(f.table(), f.blocks().iter()),
        normalized: Some(f.is_normalized()),
    };
    serde_json::to_value(json).expect("serializable")
}

pub fn generator_from_value(value: &Value, base: &Path) -> CliResult<(GeneratingFunctional, LoadedTable)> {
    let json: FamilyJson =
        serde_json::from_value(value.clone()).map_err(|e| CliError::schema(format!("invalid generator: {e}")))?;
    check_kind(&json, "generator")?;
    let table = json.table.as_ref().ok_or_else(|| CliError::schema("generator has no table"))?;
    let loaded = load_table(table, base)?;
    let blocks = blocks_from_json(&loaded.table, &json.blocks)?;
    Ok((GeneratingFunctional::new(loaded.table.clone(), blocks)?, loaded))
}

pub fn generator_to_value(l: &GeneratingFunctional, spec: &TableSpec) -> Value {
    let json = FamilyJson {
        kind: Some("generator".into()),
        table: Some(serde_json::to_value(spec).expect("serializable")),
        blocks: blocks_to_json(l.table(), l.blocks().iter()),
        normalized: None,
    };
    serde_json::to_value(json).expect("serializable")
}

pub fn cocycle_from_value(value: &Value, base: &Path) -> CliResult<(CocycleMatrices, LoadedTable)> {
    let json: FamilyJson =
        serde_json::from_value(value.clone()).map_err(|e| CliError::schema(format!("invalid cocycle: {e}")))?;
    check_kind(&json, "cocycle")?;
    let table = json.table.as_ref().ok_or_else(|| CliError::schema("cocycle has no table"))?;
    let loaded = load_table(table, base)?;
    let blocks = blocks_from_json(&loaded.table, &json.blocks)?;
    Ok((CocycleMatrices::new(loaded.table.clone(), blocks)?, loaded))
}

pub fn cocycle_to_value(c: &CocycleMatrices, spec: &TableSpec) -> Value {
    let json = FamilyJson {
        kind: Some("cocycle".into()),
        table: Some(serde_json::to_value(spec).expect("serializable")),
        blocks: blocks_to_json(c.table(), c.blocks().iter()),
        normalized: None,
    };
    serde_json::to_value(json).expect("serializable")
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
