//! Words, eventually periodic points, shift, bracket, metric and the
//! stable/unstable relations.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{MatrixError, SftMatrix, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SftError {
    #[error("periodic tail must be nonempty")]
    EmptyPeriod,
    #[error("symbol {0} is outside the alphabet")]
    InvalidSymbol(Symbol),
    #[error("transition {from} -> {to} at position {position} is not allowed")]
    NotAdmissible { position: i64, from: Symbol, to: Symbol },
    #[error("bracket undefined: x_0 = {x0} but y_0 = {y0}")]
    BracketUndefined { x0: Symbol, y0: Symbol },
    #[error("lambda0 must lie strictly between 0 and 1, got {0}")]
    BadLambda(String),
    #[error("operation needs a 0/1 matrix; use the edge-shift presentation")]
    NotZeroOne,
    #[error("cannot parse point: {0}")]
    Parse(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A finite word over the alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Symbols in range and every consecutive transition allowed.
    pub fn is_admissible(&self, a: &SftMatrix) -> bool {
        let n = a.n() as Symbol;
        self.0.iter().all(|&s| s >= 1 && s <= n) && self.0.windows(2).all(|w| a.allows(w[0], w[1]))
    }

    /// Admissible including the wrap-around transition from last to first.
    pub fn is_cyclically_admissible(&self, a: &SftMatrix) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.is_admissible(a) && a.allows(l, f),
            _ => false,
        }
    }

    /// Shortest `u` with `self = u^k`.
    pub fn primitive_root(&self) -> Word {
        let n = self.len();
        for d in 1..=n {
            if n % d == 0 && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return Word(self.0[..d].to_vec());
            }
        }
        self.clone()
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_empty() && self.primitive_root().len() == self.len()
    }

    /// Lexicographically least rotation and the index where it starts.
    pub fn least_rotation(&self) -> (Word, usize) {
        let n = self.len();
        let rot = |k: usize| (0..n).map(move |i| self.0[(k + i) % n]);
        let mut best = 0;
        for k in 1..n {
            if rot(k).cmp(rot(best)) == Ordering::Less {
                best = k;
            }
        }
        (Word(rot(best).collect()), best)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An eventually periodic bi-infinite sequence
/// `... left left left core right right right ...` with the core occupying
/// positions `offset .. offset + |core|`. Always kept in canonical form, so
/// structural equality is equality of sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiPoint {
    left: Word,
    core: Word,
    right: Word,
    offset: i64,
}

impl BiPoint {
    /// Checked constructor: tails nonempty, symbols valid, sequence admissible.
    pub fn new(
        a: &SftMatrix,
        left: Word,
        core: Word,
        right: Word,
        offset: i64,
    ) -> Result<Self, SftError> {
        let p = Self::from_parts(left, core, right, offset)?;
        p.check_admissible(a)?;
        Ok(p)
    }

    /// Canonicalizes without checking admissibility.
    pub fn from_parts(left: Word, core: Word, right: Word, offset: i64) -> Result<Self, SftError> {
        if left.is_empty() || right.is_empty() {
            return Err(SftError::EmptyPeriod);
        }
        if let Some(&s) = left.0.iter().chain(&core.0).chain(&right.0).find(|&&s| s == 0) {
            return Err(SftError::InvalidSymbol(s));
        }
        Ok(BiPoint { left, core, right, offset }.canonicalize())
    }

    /// The purely periodic point `... w w w ...` with a copy of `w` starting at
    /// position `offset`.
    pub fn periodic(word: &Word, offset: i64) -> Result<Self, SftError> {
        Self::from_parts(word.clone(), Word::empty(), word.clone(), offset)
    }

    /// Sequence whose positions `< lo` come from `left_src`, `lo .. lo + |mid|`
    /// from `mid`, and `>= lo + |mid|` from `right_src`. Requires `lo` to lie in
    /// the left periodic zone of `left_src` and `lo + |mid|` in the right
    /// periodic zone of `right_src`.
    pub(crate) fn splice(left_src: &BiPoint, lo: i64, mid: Vec<Symbol>, right_src: &BiPoint) -> Self {
        let hi = lo + mid.len() as i64;
        debug_assert!(lo <= left_src.core_start() && hi >= right_src.core_end());
        let ll = left_src.left.len() as i64;
        let rl = right_src.right.len() as i64;
        let left = Word((lo - ll..lo).map(|i| left_src.at(i)).collect());
        let right = Word((hi..hi + rl).map(|i| right_src.at(i)).collect());
        BiPoint { left, core: Word(mid), right, offset: lo }.canonicalize()
    }

    /// Builds the point whose coordinates are `f(i)`, given that `f` is
    /// `left_len`-periodic on `(-inf, lo)` and `right_len`-periodic on
    /// `[hi, inf)`.
    pub(crate) fn from_fn(
        lo: i64,
        hi: i64,
        left_len: usize,
        right_len: usize,
        f: impl Fn(i64) -> Symbol,
    ) -> Self {
        let left = Word((lo - left_len as i64..lo).map(&f).collect());
        let core = Word((lo..hi).map(&f).collect());
        let right = Word((hi..hi + right_len as i64).map(&f).collect());
        BiPoint { left, core, right, offset: lo }.canonicalize()
    }

    pub fn left_period(&self) -> &Word {
        &self.left
    }

    pub fn core(&self) -> &Word {
        &self.core
    }

    pub fn right_period(&self) -> &Word {
        &self.right
    }

    pub fn core_offset(&self) -> i64 {
        self.offset
    }

    pub fn core_start(&self) -> i64 {
        self.offset
    }

    pub fn core_end(&self) -> i64 {
        self.offset + self.core.len() as i64
    }

    /// Coordinate `x_i`.
    pub fn at(&self, i: i64) -> Symbol {
        let c = self.offset;
        let e = self.core_end();
        if i < c {
            let l = self.left.len() as i64;
            self.left.0[(i - c).rem_euclid(l) as usize]
        } else if i < e {
            self.core.0[(i - c) as usize]
        } else {
            let r = self.right.len() as i64;
            self.right.0[((i - e) % r) as usize]
        }
    }

    /// Coordinates `x_lo .. x_{hi-1}`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..hi).map(|i| self.at(i)).collect()
    }

    pub fn is_purely_periodic(&self) -> bool {
        self.core.is_empty() && self.left == self.right
    }

    /// Least period for purely periodic points.
    pub fn least_period(&self) -> Option<usize> {
        self.is_purely_periodic().then(|| self.right.len())
    }

    pub fn check_admissible(&self, a: &SftMatrix) -> Result<(), SftError> {
        let n = a.n() as Symbol;
        if let Some(&s) =
            self.left.0.iter().chain(&self.core.0).chain(&self.right.0).find(|&&s| s > n)
        {
            return Err(SftError::InvalidSymbol(s));
        }
        let lo = self.core_start() - self.left.len() as i64 - 1;
        let hi = self.core_end() + self.right.len() as i64;
        for i in lo..=hi {
            let (from, to) = (self.at(i), self.at(i + 1));
            if !a.allows(from, to) {
                return Err(SftError::NotAdmissible { position: i, from, to });
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self, a: &SftMatrix) -> bool {
        self.check_admissible(a).is_ok()
    }

    fn canonicalize(mut self) -> Self {
        self.left = self.left.primitive_root();
        self.right = self.right.primitive_root();
        let l = self.left.len() as i64;
        let r = self.right.len() as i64;
        let c = self.offset;
        let e = self.core_end();

        // least start of right periodicity
        let floor = c - l - r;
        let mut rs = e;
        while rs > floor && self.at(rs - 1) == self.at(rs - 1 + r) {
            rs -= 1;
        }
        if rs <= floor {
            // the overlap forces a single primitive period everywhere
            let w = Word(self.window(0, r));
            let (rot, k) = w.least_rotation();
            return BiPoint { left: rot.clone(), core: Word::empty(), right: rot, offset: k as i64 };
        }
        // largest end of left periodicity
        let mut ls = c - 1;
        while self.at(ls + 1) == self.at(ls + 1 - l) {
            ls += 1;
        }
        let (start, end) = if ls < rs { (ls + 1, rs) } else { (rs, rs) };
        let left = Word(self.window(start - l, start));
        let core = Word(self.window(start, end));
        let right = Word(self.window(end, end + r));
        BiPoint { left, core, right, offset: start }
    }

    /// `σ^k`: the point `y` with `y_i = x_{i+k}`.
    pub fn shift(&self, k: i64) -> BiPoint {
        let mut p = self.clone();
        p.offset -= k;
        if p.is_purely_periodic() {
            p.canonicalize()
        } else {
            p
        }
    }

    /// `[x, y]`: `x_i` for `i <= 0`, `y_i` for `i >= 0`.
    pub fn bracket(&self, y: &BiPoint) -> Result<BiPoint, SftError> {
        let (x0, y0) = (self.at(0), y.at(0));
        if x0 != y0 {
            return Err(SftError::BracketUndefined { x0, y0 });
        }
        let lo = self.core_start().min(0);
        let hi = y.core_end().max(1);
        let mid = (lo..hi).map(|i| if i <= 0 { self.at(i) } else { y.at(i) }).collect();
        Ok(BiPoint::splice(self, lo, mid, y))
    }

    /// Largest `k` with `x_i = y_i` for all `|i| <= k`; `None` if the points are
    /// equal, `Some(-1)` if `x_0 != y_0`.
    pub fn agreement_radius(&self, y: &BiPoint) -> Option<i64> {
        if self == y {
            return None;
        }
        if self.at(0) != y.at(0) {
            return Some(-1);
        }
        let mut n = 1;
        while self.at(n) == y.at(n) && self.at(-n) == y.at(-n) {
            n += 1;
        }
        Some(n - 1)
    }

    /// Least `n >= 0` with `x_i = y_i` for all `i >= n`.
    pub fn right_tail_match(&self, y: &BiPoint) -> Option<u64> {
        let e = self.core_end().max(y.core_end());
        let period = (self.right.len() as i64).lcm(&(y.right.len() as i64));
        if (e..e + period).any(|i| self.at(i) != y.at(i)) {
            return None;
        }
        let last_diff = (0..e).rev().find(|&i| self.at(i) != y.at(i));
        Some(last_diff.map_or(0, |i| (i + 1) as u64))
    }

    /// Least `n >= 0` with `x_i = y_i` for all `i <= -n`.
    pub fn left_tail_match(&self, y: &BiPoint) -> Option<u64> {
        let s = self.core_start().min(y.core_start());
        let period = (self.left.len() as i64).lcm(&(y.left.len() as i64));
        if (s - period..s).any(|i| self.at(i) != y.at(i)) {
            return None;
        }
        let first_diff = (s..=0).find(|&i| self.at(i) != y.at(i));
        Some(first_diff.map_or(0, |i| (1 - i) as u64))
    }

    /// Both tail depths when the points are asymptotic in both directions.
    pub fn asymptotic_pair(&self, y: &BiPoint) -> Option<(u64, u64)> {
        Some((self.right_tail_match(y)?, self.left_tail_match(y)?))
    }
}

impl fmt::Display for BiPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let period = |w: &Word| {
            if w.len() == 1 {
                w.to_string()
            } else {
                format!("({w})")
            }
        };
        write!(
            f,
            "{}^inf.({}).{}^inf@{}",
            period(&self.left),
            self.core,
            period(&self.right),
            self.offset
        )
    }
}

fn parse_symbols(s: &str) -> Result<Vec<Symbol>, SftError> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Symbol>().map_err(|e| SftError::Parse(format!("{t:?}: {e}"))))
        .collect()
}

fn strip_group(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s)
}

/// Parses `left^inf.core.right^inf@offset`, e.g. `1^inf.(2 1).1^inf@0`.
/// Multi-symbol periods and cores are parenthesized; `@offset` defaults to 0.
impl FromStr for BiPoint {
    type Err = SftError;

    fn from_str(text: &str) -> Result<Self, SftError> {
        let bad = || SftError::Parse(text.to_string());
        let (body, offset) = match text.rsplit_once('@') {
            Some((b, o)) => (b, o.trim().parse::<i64>().map_err(|_| bad())?),
            None => (text, 0),
        };
        let (left, rest) = body.split_once("^inf").ok_or_else(bad)?;
        let rest = rest.trim_start().strip_prefix('.').ok_or_else(bad)?;
        let rest = rest.trim_end().strip_suffix("^inf").ok_or_else(bad)?.trim();
        let (core, right) = if rest.starts_with('(') {
            let close = rest.find(')').ok_or_else(bad)?;
            let after = rest[close + 1..].trim_start().strip_prefix('.').ok_or_else(bad)?;
            (&rest[..=close], after)
        } else {
            rest.split_once('.').ok_or_else(bad)?
        };
        BiPoint::from_parts(
            Word(parse_symbols(strip_group(left))?),
            Word(parse_symbols(strip_group(core))?),
            Word(parse_symbols(strip_group(right))?),
            offset,
        )
    }
}

/// A matrix with the metric constants `epsilon0 = 1` and `lambda0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpace {
    matrix: SftMatrix,
    lambda0: BigRational,
}

impl SftSpace {
    pub fn new(matrix: SftMatrix, lambda0: BigRational) -> Result<Self, SftError> {
        if lambda0 <= BigRational::zero() || lambda0 >= BigRational::one() {
            return Err(SftError::BadLambda(lambda0.to_string()));
        }
        Ok(SftSpace { matrix, lambda0 })
    }

    /// `lambda0 = 1/2`.
    pub fn with_default_lambda(matrix: SftMatrix) -> Self {
        SftSpace { matrix, lambda0: BigRational::new(1.into(), 2.into()) }
    }

    pub fn matrix(&self) -> &SftMatrix {
        &self.matrix
    }

    pub fn lambda0(&self) -> &BigRational {
        &self.lambda0
    }

    pub fn epsilon0(&self) -> BigRational {
        BigRational::one()
    }

    /// 0 if equal, 1 if `x_0 != y_0`, else `lambda0^(k+1)` for the agreement
    /// radius `k`.
    pub fn metric(&self, x: &BiPoint, y: &BiPoint) -> BigRational {
        metric(x, y, &self.lambda0)
    }
}

pub fn metric(x: &BiPoint, y: &BiPoint, lambda0: &BigRational) -> BigRational {
    match x.agreement_radius(y) {
        None => BigRational::zero(),
        Some(-1) => BigRational::one(),
        Some(k) => num_traits::pow(lambda0.clone(), (k + 1) as usize),
    }
}

/// A periodic orbit: its Lyndon representative placed at offset 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orbit {
    pub representative: BiPoint,
    pub length: usize,
}

impl Orbit {
    pub fn word(&self) -> &Word {
        self.representative.right_period()
    }

    /// All points of the orbit.
    pub fn points(&self) -> Vec<BiPoint> {
        (0..self.length as i64).map(|k| self.representative.shift(k)).collect()
    }
}

/// `|Per_n| = tr(A^n)`.
pub fn periodic_count(a: &SftMatrix, n: u64) -> BigInt {
    a.to_int().pow(n).trace()
}

fn require_zero_one(a: &SftMatrix) -> Result<(), SftError> {
    if a.is_zero_one() {
        Ok(())
    } else {
        Err(SftError::NotZeroOne)
    }
}

/// All periodic orbits of least period `<= max_len`, ordered by length then
/// representative.
pub fn periodic_orbits(a: &SftMatrix, max_len: usize) -> Result<Vec<Orbit>, SftError> {
    require_zero_one(a)?;
    let n = a.n() as Symbol;
    let mut out = Vec::new();
    let mut buf: Vec<Symbol> = Vec::with_capacity(max_len);

    // Fredricksen–Kessler–Maiorana generation of prenecklaces, pruned by
    // admissibility; a prefix with p == len is a Lyndon word.
    fn gen(
        a: &SftMatrix,
        n: Symbol,
        max_len: usize,
        p: usize,
        buf: &mut Vec<Symbol>,
        out: &mut Vec<Orbit>,
    ) {
        let t = buf.len();
        if t > 0 && p == t && a.allows(buf[t - 1], buf[0]) {
            let w = Word(buf.clone());
            out.push(Orbit { representative: BiPoint::periodic(&w, 0).unwrap(), length: t });
        }
        if t == max_len {
            return;
        }
        let lo = if t == 0 { 1 } else { buf[t - p] };
        for j in lo..=n {
            if t > 0 && !a.allows(buf[t - 1], j) {
                continue;
            }
            buf.push(j);
            let np = if t == 0 || j != buf[t - p] { t + 1 } else { p };
            gen(a, n, max_len, np, buf, out);
            buf.pop();
        }
    }

    gen(a, n, max_len, 0, &mut buf, &mut out);
    out.sort_by(|x, y| x.length.cmp(&y.length).then_with(|| x.representative.cmp(&y.representative)));
    Ok(out)
}

/// All admissible words of length `len`, in lexicographic order.
pub fn admissible_words(a: &SftMatrix, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<Symbol>| {
                a.symbols()
                    .filter(|&s| w.last().is_none_or(|&p| a.allows(p, s)))
                    .map(|s| {
                        let mut v = w.clone();
                        v.push(s);
                        v
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out.into_iter().map(Word).collect()
}

/// Every periodic point of period `n` (not necessarily least), as the word
/// `x_0 .. x_{n-1}`.
pub fn periodic_words(a: &SftMatrix, n: usize) -> Result<Vec<Word>, SftError> {
    require_zero_one(a)?;
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(n);
    fn rec(a: &SftMatrix, n: usize, buf: &mut Vec<Symbol>, out: &mut Vec<Word>) {
        if buf.len() == n {
            if a.allows(buf[n - 1], buf[0]) {
                out.push(Word(buf.clone()));
            }
            return;
        }
        for s in a.symbols() {
            if buf.last().is_none_or(|&p| a.allows(p, s)) {
                buf.push(s);
                rec(a, n, buf, out);
                buf.pop();
            }
        }
    }
    if n > 0 {
        rec(a, n, &mut buf, &mut out);
    }
    Ok(out)
}
