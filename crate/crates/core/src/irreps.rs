//! Irreducible-corepresentation tables and free-product fusion words.
//!
//! A table is a finite truncation of `Irr`: an ordered list of labels with
//! their dimensions. The trivial label always sits at position 0. Irreps of
//! a dual free product are alternating words in the nontrivial labels of
//! the two factors, with dimensions multiplying along the word.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Position of a label in its table's canonical order. `Label(0)` is the
/// trivial label of every table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub usize);

impl Label {
    pub const TRIVIAL: Label = Label(0);

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrepLabel {
    pub id: String,
    pub is_trivial: bool,
}

/// One row of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrepEntry {
    pub label: IrrepLabel,
    pub dim: usize,
    /// Distance from the trivial label in whatever length the table was
    /// truncated by. Tables without geometry put every nontrivial label at
    /// depth 1.
    pub depth: usize,
}

/// Construction input for [`IrrepTable::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub id: String,
    pub dim: usize,
    pub trivial: bool,
    pub depth: Option<usize>,
}

impl TableEntry {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        Self { id: id.into(), dim, trivial: false, depth: None }
    }

    pub fn trivial(id: impl Into<String>) -> Self {
        Self { id: id.into(), dim: 1, trivial: true, depth: Some(0) }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = Some(depth);
        self
    }
}

/// Id used for the trivial label when none is supplied.
pub const DEFAULT_TRIVIAL_ID: &str = "1";

/// Finite truncation of `Irr` with dimensions, in canonical order: trivial
/// label first, the rest sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrepTable {
    entries: Vec<IrrepEntry>,
}

impl IrrepTable {
    /// Validates and canonicalizes a list of entries.
    ///
    /// If no entry is flagged trivial, an entry with id `"1"` and dimension 1
    /// is taken to be the trivial label; failing that, one is inserted.
    pub fn new(input: impl IntoIterator<Item = TableEntry>) -> Result<Self> {
        let mut input: Vec<TableEntry> = input.into_iter().collect();
        let mut seen = BTreeMap::new();
        let mut trivial: Option<usize> = None;
        for (i, e) in input.iter().enumerate() {
            if seen.insert(e.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            if e.dim == 0 {
                return Err(Error::ZeroDimension(e.id.clone()));
            }
            if e.trivial {
                if let Some(t) = trivial {
                    return Err(Error::MultipleTrivial(input[t].id.clone(), e.id.clone()));
                }
                trivial = Some(i);
            }
        }
        let trivial = match trivial {
            Some(t) => t,
            None => match seen.get(DEFAULT_TRIVIAL_ID) {
                Some(&t) => t,
                None => {
                    input.push(TableEntry::trivial(DEFAULT_TRIVIAL_ID));
                    input.len() - 1
                }
            },
        };
        let t = input.swap_remove(trivial);
        if t.dim != 1 {
            return Err(Error::TrivialDimension(t.id, t.dim));
        }
        input.sort_by(|a, b| a.id.cmp(&b.id));
        let mut entries = Vec::with_capacity(input.len() + 1);
        entries.push(IrrepEntry { label: IrrepLabel { id: t.id, is_trivial: true }, dim: 1, depth: 0 });
        entries.extend(input.into_iter().map(|e| IrrepEntry {
            label: IrrepLabel { id: e.id, is_trivial: false },
            dim: e.dim,
            depth: e.depth.unwrap_or(1),
        }));
        Ok(Self { entries })
    }

    /// Shorthand for `(id, dim)` pairs with `"1"` as the trivial label.
    pub fn from_dims(dims: &[(&str, usize)]) -> Result<Self> {
        Self::new(dims.iter().map(|&(id, dim)| TableEntry::new(id, dim)))
    }

    /// Table holding only the trivial label.
    pub fn trivial_only() -> Self {
        Self {
            entries: vec![IrrepEntry {
                label: IrrepLabel { id: DEFAULT_TRIVIAL_ID.to_string(), is_trivial: true },
                dim: 1,
                depth: 0,
            }],
        }
    }

    pub fn entries(&self) -> &[IrrepEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self, label: Label) -> usize {
        self.entries[label.0].dim
    }

    pub fn id(&self, label: Label) -> &str {
        &self.entries[label.0].label.id
    }

    pub fn depth(&self, label: Label) -> usize {
        self.entries[label.0].depth
    }

    pub fn find(&self, id: &str) -> Option<Label> {
        if self.entries[0].label.id == id {
            return Some(Label::TRIVIAL);
        }
        self.entries[1..].binary_search_by(|e| e.label.id.as_str().cmp(id)).ok().map(|i| Label(i + 1))
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.entries.len()).map(Label)
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = Label> {
        (1..self.entries.len()).map(Label)
    }
}

/// Which factor of a free product a letter comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    First,
    Second,
}

impl Factor {
    /// 1 or 2.
    pub fn index(self) -> u8 {
        match self {
            Factor::First => 1,
            Factor::Second => 2,
        }
    }

    pub fn other(self) -> Factor {
        match self {
            Factor::First => Factor::Second,
            Factor::Second => Factor::First,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub factor: Factor,
    pub id: String,
}

/// Alternating word over the nontrivial labels of two factor tables. The
/// empty word is the trivial irrep of the free product.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a word, checking that adjacent letters alternate factors.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0].factor == w[1].factor) {
            return Err(Error::InvalidArgument(format!(
                "word `{}` does not alternate factors",
                Word { letters }.encode()
            )));
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `"i1:id1|i2:id2|..."`, empty for the trivial word.
    pub fn encode(&self) -> String {
        let mut s = String::new();
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                s.push('|');
            }
            s.push_str(&format!("{}:{}", l.factor.index(), l.id));
        }
        s
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let letters = s
            .split('|')
            .map(|part| {
                let (f, id) =
                    part.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("bad letter `{part}`")))?;
                let factor = match f {
                    "1" => Factor::First,
                    "2" => Factor::Second,
                    _ => return Err(Error::InvalidArgument(format!("bad factor in `{part}`"))),
                };
                Ok(Letter { factor, id: id.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            f.write_str("∅")
        } else {
            f.write_str(&self.encode())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEntry {
    pub word: Word,
    /// Positions of the letters in their factor tables.
    pub letters: Vec<(Factor, Label)>,
    pub dim: usize,
}

/// All alternating words up to a length bound over two factor tables.
///
/// Words are ordered by length, then by the factor of the first letter,
/// then by the letters' positions in their factor tables (which is id
/// order). Only the factors and the bound define the table; the words are
/// always recomputed.
#[derive(Debug, Clone)]
pub struct FreeProductTable {
    factor1: Arc<IrrepTable>,
    factor2: Arc<IrrepTable>,
    max_word_length: usize,
    words: Vec<WordEntry>,
    index: BTreeMap<String, usize>,
}

impl PartialEq for FreeProductTable {
    fn eq(&self, other: &Self) -> bool {
        self.max_word_length == other.max_word_length && self.factor1 == other.factor1 && self.factor2 == other.factor2
    }
}

impl FreeProductTable {
    pub fn new(factor1: Arc<IrrepTable>, factor2: Arc<IrrepTable>, max_word_length: usize) -> Self {
        let mut words = vec![WordEntry { word: Word::empty(), letters: Vec::new(), dim: 1 }];
        for length in 1..=max_word_length {
            for start in [Factor::First, Factor::Second] {
                enumerate_pattern(&factor1, &factor2, start, length, &mut words);
            }
        }
        let index = words.iter().enumerate().map(|(i, w)| (w.word.encode(), i)).collect();
        Self { factor1, factor2, max_word_length, words, index }
    }

    pub fn factor(&self, which: Factor) -> &Arc<IrrepTable> {
        match which {
            Factor::First => &self.factor1,
            Factor::Second => &self.factor2,
        }
    }

    pub fn max_word_length(&self) -> usize {
        self.max_word_length
    }

    pub fn words(&self) -> &[WordEntry] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn entry(&self, label: Label) -> &WordEntry {
        &self.words[label.0]
    }

    pub fn find(&self, encoding: &str) -> Option<Label> {
        self.index.get(encoding).copied().map(Label)
    }
}

/// Convenience wrapper matching the operation name used throughout the docs.
pub fn free_product_table(t1: Arc<IrrepTable>, t2: Arc<IrrepTable>, max_word_length: usize) -> FreeProductTable {
    FreeProductTable::new(t1, t2, max_word_length)
}

fn enumerate_pattern(t1: &IrrepTable, t2: &IrrepTable, start: Factor, length: usize, out: &mut Vec<WordEntry>) {
    let factors: Vec<Factor> = (0..length).map(|k| if k % 2 == 0 { start } else { start.other() }).collect();
    let table = |f: Factor| if f == Factor::First { t1 } else { t2 };
    let counts: Vec<usize> = factors.iter().map(|&f| table(f).len() - 1).collect();
    if counts.iter().any(|&c| c == 0) {
        return;
    }
    // odometer over nontrivial positions, last letter fastest
    let mut digits = vec![0usize; length];
    loop {
        let letters: Vec<(Factor, Label)> = factors.iter().zip(&digits).map(|(&f, &d)| (f, Label(d + 1))).collect();
        let word = Word {
            letters: letters.iter().map(|&(f, l)| Letter { factor: f, id: table(f).id(l).to_string() }).collect(),
        };
        let dim = letters.iter().map(|&(f, l)| table(f).dim(l)).product();
        out.push(WordEntry { word, letters, dim });

        let mut pos = length;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < counts[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Shared handle to the label set a family is indexed by.
#[derive(Debug, Clone)]
pub enum Table {
    Irreps(Arc<IrrepTable>),
    Words(Arc<FreeProductTable>),
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Table::Irreps(a), Table::Irreps(b)) => Arc::ptr_eq(a, b) || a == b,
            (Table::Words(a), Table::Words(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }
}

impl From<IrrepTable> for Table {
    fn from(t: IrrepTable) -> Self {
        Table::Irreps(Arc::new(t))
    }
}

impl From<FreeProductTable> for Table {
    fn from(t: FreeProductTable) -> Self {
        Table::Words(Arc::new(t))
    }
}

impl From<Arc<IrrepTable>> for Table {
    fn from(t: Arc<IrrepTable>) -> Self {
        Table::Irreps(t)
    }
}

impl From<Arc<FreeProductTable>> for Table {
    fn from(t: Arc<FreeProductTable>) -> Self {
        Table::Words(t)
    }
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Irreps(t) => t.len(),
            Table::Words(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self, label: Label) -> usize {
        match self {
            Table::Irreps(t) => t.dim(label),
            Table::Words(t) => t.entry(label).dim,
        }
    }

    /// Label id, or the canonical word encoding for word tables.
    pub fn key(&self, label: Label) -> String {
        match self {
            Table::Irreps(t) => t.id(label).to_string(),
            Table::Words(t) => t.entry(label).word.encode(),
        }
    }

    /// Radius shell of a label: its depth, or its word length.
    pub fn depth(&self, label: Label) -> usize {
        match self {
            Table::Irreps(t) => t.depth(label),
            Table::Words(t) => t.entry(label).word.len(),
        }
    }

    /// Largest depth in the table: the truncation radius (or word length).
    pub fn radius(&self) -> usize {
        self.labels().map(|l| self.depth(l)).max().unwrap_or(0)
    }

    pub fn find(&self, key: &str) -> Option<Label> {
        match self {
            Table::Irreps(t) => t.find(key),
            Table::Words(t) => t.find(key),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.len()).map(Label)
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = Label> {
        (1..self.len()).map(Label)
    }

    pub fn as_words(&self) -> Option<&Arc<FreeProductTable>> {
        match self {
            Table::Words(t) => Some(t),
            Table::Irreps(_) => None,
        }
    }
}
