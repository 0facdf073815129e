//! Finite-window integer functions and sliding-block codes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{SftMatrix, Symbol};
use crate::sft::{admissible_words, BiPoint, SftError, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("window [{lo}, {hi}] is empty")]
    BadWindow { lo: i64, hi: i64 },
    #[error("no table entry for block {0}")]
    MissingBlock(Word),
    #[error("block {block} has length {len}, window needs {expected}")]
    BlockLength { block: Word, len: usize, expected: usize },
    #[error("code sends block {block} to symbol {symbol} outside the target alphabet")]
    BadImageSymbol { block: Word, symbol: Symbol },
    #[error("image of block {block} is not admissible in the target")]
    InadmissibleImage { block: Word },
    #[error("cannot parse block {0:?}")]
    Parse(String),
    #[error(transparent)]
    Point(#[from] SftError),
}

fn parse_block(s: &str) -> Result<Vec<Symbol>, WindowError> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Symbol>().map_err(|_| WindowError::Parse(s.to_string())))
        .collect()
}

fn block_key(b: &[Symbol]) -> String {
    Word(b.to_vec()).to_string()
}

/// `c(x) = table[x_lo .. x_hi]` (window inclusive), or a constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub enum WindowFunction {
    Constant(i64),
    Table { lo: i64, hi: i64, table: BTreeMap<Vec<Symbol>, i64> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WindowRepr {
    Bare(i64),
    Constant { constant: i64 },
    Table { window: (i64, i64), table: BTreeMap<String, i64> },
}

impl TryFrom<WindowRepr> for WindowFunction {
    type Error = WindowError;

    fn try_from(r: WindowRepr) -> Result<Self, WindowError> {
        match r {
            WindowRepr::Bare(constant) | WindowRepr::Constant { constant } => Ok(WindowFunction::Constant(constant)),
            WindowRepr::Table { window: (lo, hi), table } => {
                let table = table
                    .into_iter()
                    .map(|(k, v)| Ok((parse_block(&k)?, v)))
                    .collect::<Result<_, WindowError>>()?;
                WindowFunction::table(lo, hi, table)
            }
        }
    }
}

impl From<WindowFunction> for WindowRepr {
    fn from(w: WindowFunction) -> Self {
        match w {
            WindowFunction::Constant(constant) => WindowRepr::Constant { constant },
            WindowFunction::Table { lo, hi, table } => WindowRepr::Table {
                window: (lo, hi),
                table: table.iter().map(|(k, v)| (block_key(k), *v)).collect(),
            },
        }
    }
}

impl WindowFunction {
    pub fn constant(v: i64) -> Self {
        WindowFunction::Constant(v)
    }

    pub fn table(lo: i64, hi: i64, table: BTreeMap<Vec<Symbol>, i64>) -> Result<Self, WindowError> {
        if hi < lo {
            return Err(WindowError::BadWindow { lo, hi });
        }
        let expected = (hi - lo + 1) as usize;
        if let Some(k) = table.keys().find(|k| k.len() != expected) {
            return Err(WindowError::BlockLength { block: Word(k.clone()), len: k.len(), expected });
        }
        Ok(WindowFunction::Table { lo, hi, table })
    }

    /// A function of `x_0` alone.
    pub fn from_symbol_values(values: &[(Symbol, i64)]) -> Self {
        WindowFunction::Table {
            lo: 0,
            hi: 0,
            table: values.iter().map(|&(s, v)| (vec![s], v)).collect(),
        }
    }

    /// Inclusive window `[lo, hi]`.
    pub fn window(&self) -> (i64, i64) {
        match self {
            WindowFunction::Constant(_) => (0, 0),
            WindowFunction::Table { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn width(&self) -> usize {
        let (lo, hi) = self.window();
        (hi - lo + 1) as usize
    }

    /// Value on the block `x_lo .. x_hi`.
    pub fn value_on_block(&self, block: &[Symbol]) -> Result<i64, WindowError> {
        match self {
            WindowFunction::Constant(v) => Ok(*v),
            WindowFunction::Table { table, .. } => {
                table.get(block).copied().ok_or_else(|| WindowError::MissingBlock(Word(block.to_vec())))
            }
        }
    }

    pub fn eval(&self, x: &BiPoint) -> Result<i64, WindowError> {
        let (lo, hi) = self.window();
        self.value_on_block(&x.window(lo, hi + 1))
    }

    /// Every value the function takes on admissible blocks of `a`.
    pub fn values_on(&self, a: &SftMatrix) -> Result<Vec<i64>, WindowError> {
        match self {
            WindowFunction::Constant(v) => Ok(vec![*v]),
            WindowFunction::Table { .. } => admissible_words(a, self.width())
                .iter()
                .map(|b| self.value_on_block(b.symbols()))
                .collect(),
        }
    }

    /// Totality on admissible blocks of `a`.
    pub fn check_total(&self, a: &SftMatrix) -> Result<(), WindowError> {
        self.values_on(a).map(|_| ())
    }

    /// `x -> -c(x)`.
    pub fn negated(&self) -> Self {
        match self {
            WindowFunction::Constant(v) => WindowFunction::Constant(-v),
            WindowFunction::Table { lo, hi, table } => WindowFunction::Table {
                lo: *lo,
                hi: *hi,
                table: table.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            },
        }
    }
}

/// A map `h(x)_i = table[x_{i+lo} .. x_{i+hi}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeRepr", into = "CodeRepr")]
pub enum SlidingBlockCode {
    Identity,
    Table { lo: i64, hi: i64, table: BTreeMap<Vec<Symbol>, Symbol> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CodeRepr {
    Named(String),
    Table { window: (i64, i64), table: BTreeMap<String, Symbol> },
}

impl TryFrom<CodeRepr> for SlidingBlockCode {
    type Error = WindowError;

    fn try_from(r: CodeRepr) -> Result<Self, WindowError> {
        match r {
            CodeRepr::Named(s) if s == "identity" => Ok(SlidingBlockCode::Identity),
            CodeRepr::Named(s) => Err(WindowError::Parse(s)),
            CodeRepr::Table { window: (lo, hi), table } => {
                let table = table
                    .into_iter()
                    .map(|(k, v)| Ok((parse_block(&k)?, v)))
                    .collect::<Result<_, WindowError>>()?;
                SlidingBlockCode::table(lo, hi, table)
            }
        }
    }
}

impl From<SlidingBlockCode> for CodeRepr {
    fn from(c: SlidingBlockCode) -> Self {
        match c {
            SlidingBlockCode::Identity => CodeRepr::Named("identity".into()),
            SlidingBlockCode::Table { lo, hi, table } => CodeRepr::Table {
                window: (lo, hi),
                table: table.iter().map(|(k, v)| (block_key(k), *v)).collect(),
            },
        }
    }
}

impl SlidingBlockCode {
    pub fn table(lo: i64, hi: i64, table: BTreeMap<Vec<Symbol>, Symbol>) -> Result<Self, WindowError> {
        if hi < lo {
            return Err(WindowError::BadWindow { lo, hi });
        }
        let expected = (hi - lo + 1) as usize;
        if let Some(k) = table.keys().find(|k| k.len() != expected) {
            return Err(WindowError::BlockLength { block: Word(k.clone()), len: k.len(), expected });
        }
        Ok(SlidingBlockCode::Table { lo, hi, table })
    }

    /// A 1-block code given by a symbol relabelling.
    pub fn relabel(pairs: &[(Symbol, Symbol)]) -> Self {
        SlidingBlockCode::Table { lo: 0, hi: 0, table: pairs.iter().map(|&(a, b)| (vec![a], b)).collect() }
    }

    pub fn window(&self) -> (i64, i64) {
        match self {
            SlidingBlockCode::Identity => (0, 0),
            SlidingBlockCode::Table { lo, hi, .. } => (*lo, *hi),
        }
    }

    fn image_of_block(&self, block: &[Symbol]) -> Result<Symbol, WindowError> {
        match self {
            SlidingBlockCode::Identity => Ok(block[0]),
            SlidingBlockCode::Table { table, .. } => {
                table.get(block).copied().ok_or_else(|| WindowError::MissingBlock(Word(block.to_vec())))
            }
        }
    }

    /// Image point; every needed block must be in the table.
    pub fn apply(&self, x: &BiPoint) -> Result<BiPoint, WindowError> {
        let (lo, hi) = match self {
            SlidingBlockCode::Identity => return Ok(x.clone()),
            SlidingBlockCode::Table { lo, hi, .. } => (*lo, *hi),
        };
        let start = x.core_start() - hi;
        let end = x.core_end() - lo;
        let l = x.left_period().len();
        let r = x.right_period().len();
        // read every block up front so lookups can fail cleanly
        let mut img = BTreeMap::new();
        for i in start - l as i64..end + r as i64 {
            img.insert(i, self.image_of_block(&x.window(i + lo, i + hi + 1))?);
        }
        Ok(BiPoint::from_fn(start, end, l, r, |i| img[&i]))
    }

    /// Checks that the code is defined on all admissible blocks of `source`
    /// and that images of admissible sequences are admissible for `target`.
    pub fn validate(&self, source: &SftMatrix, target: &SftMatrix) -> Result<(), WindowError> {
        let (lo, hi) = self.window();
        let w = (hi - lo + 1) as usize;
        for block in admissible_words(source, w + 1) {
            let s = block.symbols();
            let a = self.image_of_block(&s[..w])?;
            let b = self.image_of_block(&s[1..])?;
            for (sym, blk) in [(a, &s[..w]), (b, &s[1..])] {
                if sym == 0 || sym as usize > target.n() {
                    return Err(WindowError::BadImageSymbol { block: Word(blk.to_vec()), symbol: sym });
                }
            }
            if !target.allows(a, b) {
                return Err(WindowError::InadmissibleImage { block });
            }
        }
        Ok(())
    }
}
