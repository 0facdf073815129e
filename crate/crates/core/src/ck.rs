//! Symbolic Cuntz–Krieger calculus: the algebraic span of `S_μ S_ν*` in
//! `O_A`, the tensor algebra `O_{A^t} ⊗ O_A` with `E_A` and `U_A`, gauge
//! gradings, traces, and cylinder data for generators.
//!
//! Elements are kept *leveled*: inside each degree class every monomial is
//! expanded with `S_μ S_ν* = Σ_j S_{μj} S_{νj}*` until all `ν` share one
//! length (at least 1). At fixed lengths the nonzero monomials are linearly
//! independent, so equality is coefficientwise after leveling to a common
//! length.
//!
//! `T` monomials are stored by their subscripts as written: the word
//! `ξ̄ = (ξ_k, .., ξ_1)` of `T_ξ̄ = T_{ξ_k} .. T_{ξ_1}`, admissible for `A^t`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{SftMatrix, Symbol};
use crate::perron::PerronData;
use crate::sft::{BiPoint, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CkError {
    #[error("elements are over different matrices")]
    MatrixMismatch,
    #[error("the symbolic calculus needs a 0/1 matrix")]
    NotZeroOne,
    #[error("word {0} is not admissible")]
    InadmissibleWord(Word),
    #[error("matrix is not a full shift")]
    NotFullShift,
    #[error("element is not fixed by the diagonal gauge action")]
    NotGaugeFixed,
    #[error("term does not satisfy A(ξ_k, μ_1) = A(η_l, ν_1) = 1")]
    CompressionCriterionFails,
    #[error("cannot parse term: {0}")]
    Parse(String),
}

/// The monomial `S_μ S_ν*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CkTerm {
    pub mu: Word,
    pub nu: Word,
}

impl CkTerm {
    pub fn new(mu: Word, nu: Word) -> Self {
        CkTerm { mu, nu }
    }

    pub fn unit() -> Self {
        CkTerm { mu: Word::empty(), nu: Word::empty() }
    }

    /// `|μ| - |ν|`.
    pub fn degree(&self) -> i64 {
        self.mu.len() as i64 - self.nu.len() as i64
    }

    pub fn adjoint(&self) -> CkTerm {
        CkTerm { mu: self.nu.clone(), nu: self.mu.clone() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.mu == self.nu
    }
}

/// `w j` admissible (the empty word is followed by anything).
fn extends(m: &SftMatrix, w: &Word, j: Symbol) -> bool {
    w.last().is_none_or(|l| m.allows(l, j))
}

fn push(w: &Word, tail: &[Symbol]) -> Word {
    let mut v = w.0.clone();
    v.extend_from_slice(tail);
    Word(v)
}

fn term_nonzero(m: &SftMatrix, t: &CkTerm) -> bool {
    t.mu.is_admissible(m)
        && t.nu.is_admissible(m)
        && m.symbols().any(|j| extends(m, &t.mu, j) && extends(m, &t.nu, j))
}

/// One leveling step: `S_μ S_ν* = Σ_j S_{μj} S_{νj}*`.
fn expand_once(m: &SftMatrix, t: &CkTerm) -> Vec<CkTerm> {
    m.symbols()
        .filter(|&j| extends(m, &t.mu, j) && extends(m, &t.nu, j))
        .map(|j| CkTerm { mu: push(&t.mu, &[j]), nu: push(&t.nu, &[j]) })
        .collect()
}

/// All monomials obtained by expanding `t` until `|ν| = target`.
fn expand_to(m: &SftMatrix, t: &CkTerm, target: usize) -> Vec<CkTerm> {
    let mut cur = vec![t.clone()];
    while cur.first().is_some_and(|c| c.nu.len() < target) {
        cur = cur.iter().flat_map(|c| expand_once(m, c)).collect();
    }
    cur
}

/// `(S_μ S_ν*)(S_α S_β*)` as a sum of monomials with coefficient 1.
fn mul_terms(m: &SftMatrix, a: &CkTerm, b: &CkTerm) -> Vec<CkTerm> {
    let (mu, nu) = (&a.mu, &a.nu);
    let (al, be) = (&b.mu, &b.nu);
    match al.len().cmp(&nu.len()) {
        std::cmp::Ordering::Greater => {
            if !al.starts_with(nu) {
                return Vec::new();
            }
            let rest = &al.0[nu.len()..];
            if !extends(m, mu, rest[0]) {
                return Vec::new();
            }
            vec![CkTerm { mu: push(mu, rest), nu: be.clone() }]
        }
        std::cmp::Ordering::Less => {
            if !nu.starts_with(al) {
                return Vec::new();
            }
            let rest = &nu.0[al.len()..];
            if !extends(m, be, rest[0]) {
                return Vec::new();
            }
            vec![CkTerm { mu: mu.clone(), nu: push(be, rest) }]
        }
        std::cmp::Ordering::Equal => {
            if al != nu {
                return Vec::new();
            }
            m.symbols()
                .filter(|&j| extends(m, nu, j) && extends(m, mu, j) && extends(m, be, j))
                .map(|j| CkTerm { mu: push(mu, &[j]), nu: push(be, &[j]) })
                .collect()
        }
    }
}

fn level_target(max_nu: usize, degree: i64) -> usize {
    max_nu.max(1).max((1 - degree).max(0) as usize)
}

fn add_coeff<K: Ord>(map: &mut BTreeMap<K, BigRational>, k: K, c: &BigRational) {
    let e = map.entry(k).or_insert_with(BigRational::zero);
    *e += c;
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Linear combination of monomials `S_μ S_ν*` in `O_A`.
#[derive(Clone, Debug)]
pub struct CkElement {
    matrix: SftMatrix,
    terms: BTreeMap<CkTerm, BigRational>,
}

impl CkElement {
    fn from_raw(matrix: SftMatrix, raw: BTreeMap<CkTerm, BigRational>) -> Self {
        Self::level(matrix, raw, &BTreeMap::new())
    }

    /// Levels each degree class to at least the lengths in `floor`.
    fn level(
        matrix: SftMatrix,
        raw: BTreeMap<CkTerm, BigRational>,
        floor: &BTreeMap<i64, usize>,
    ) -> Self {
        let mut targets: BTreeMap<i64, usize> = floor.clone();
        for t in raw.keys() {
            let e = targets.entry(t.degree()).or_insert(0);
            *e = (*e).max(t.nu.len());
        }
        let mut terms = BTreeMap::new();
        for (t, c) in raw {
            if c.is_zero() || !t.mu.is_admissible(&matrix) || !t.nu.is_admissible(&matrix) {
                continue;
            }
            let target = level_target(targets[&t.degree()], t.degree());
            for e in expand_to(&matrix, &t, target) {
                add_coeff(&mut terms, e, &c);
            }
        }
        terms.retain(|t, c| !c.is_zero() && term_nonzero(&matrix, t));
        CkElement { matrix, terms }
    }

    pub fn zero(a: &SftMatrix) -> Result<Self, CkError> {
        if !a.is_zero_one() {
            return Err(CkError::NotZeroOne);
        }
        Ok(CkElement { matrix: a.clone(), terms: BTreeMap::new() })
    }

    pub fn unit(a: &SftMatrix) -> Result<Self, CkError> {
        Self::monomial(a, Word::empty(), Word::empty())
    }

    /// `S_μ S_ν*`; words must be admissible.
    pub fn monomial(a: &SftMatrix, mu: Word, nu: Word) -> Result<Self, CkError> {
        if !a.is_zero_one() {
            return Err(CkError::NotZeroOne);
        }
        for w in [&mu, &nu] {
            if !w.is_admissible(a) {
                return Err(CkError::InadmissibleWord(w.clone()));
            }
        }
        let raw = BTreeMap::from([(CkTerm { mu, nu }, BigRational::one())]);
        Ok(Self::from_raw(a.clone(), raw))
    }

    /// `S_i`.
    pub fn s(a: &SftMatrix, i: Symbol) -> Result<Self, CkError> {
        Self::monomial(a, Word(vec![i]), Word::empty())
    }

    pub fn matrix(&self) -> &SftMatrix {
        &self.matrix
    }

    pub fn terms(&self) -> &BTreeMap<CkTerm, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let raw = self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect();
        Self::from_raw(self.matrix.clone(), raw)
    }

    pub fn try_add(&self, other: &CkElement) -> Result<Self, CkError> {
        if self.matrix != other.matrix {
            return Err(CkError::MatrixMismatch);
        }
        let mut raw = self.terms.clone();
        for (t, c) in &other.terms {
            add_coeff(&mut raw, t.clone(), c);
        }
        Ok(Self::from_raw(self.matrix.clone(), raw))
    }

    pub fn try_sub(&self, other: &CkElement) -> Result<Self, CkError> {
        self.try_add(&other.scale(&q(-1)))
    }

    pub fn try_mul(&self, other: &CkElement) -> Result<Self, CkError> {
        if self.matrix != other.matrix {
            return Err(CkError::MatrixMismatch);
        }
        let mut raw = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca * cb;
                for t in mul_terms(&self.matrix, a, b) {
                    add_coeff(&mut raw, t, &c);
                }
            }
        }
        Ok(Self::from_raw(self.matrix.clone(), raw))
    }

    pub fn adjoint(&self) -> Self {
        let raw = self.terms.iter().map(|(t, c)| (t.adjoint(), c.clone())).collect();
        Self::from_raw(self.matrix.clone(), raw)
    }
}

impl PartialEq for CkElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.try_sub(other).is_ok_and(|d| d.is_zero())
    }
}

impl fmt::Display for CkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(t, c)| format!("{} * {}", c, factor_string('S', t)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `T_ξ̄ T_η̄* ⊗ S_μ S_ν*`; `left` holds `(ξ̄, η̄)` as `T` subscripts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TensorTerm {
    pub left: CkTerm,
    pub right: CkTerm,
}

/// `(|ξ| - |η|, |μ| - |ν|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub left_deg: i64,
    pub right_deg: i64,
}

impl TensorTerm {
    pub fn new(xi_bar: Word, eta_bar: Word, mu: Word, nu: Word) -> Self {
        TensorTerm { left: CkTerm::new(xi_bar, eta_bar), right: CkTerm::new(mu, nu) }
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree { left_deg: self.left.degree(), right_deg: self.right.degree() }
    }

    /// Invariant under the diagonal gauge action: `k + m = l + n`.
    pub fn is_fixed_by_diagonal(&self) -> bool {
        let b = self.bidegree();
        b.left_deg + b.right_deg == 0
    }

    pub fn adjoint(&self) -> TensorTerm {
        TensorTerm { left: self.left.adjoint(), right: self.right.adjoint() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.left.is_diagonal() && self.right.is_diagonal()
    }

    /// `A(ξ_k, μ_1) = A(η_l, ν_1) = 1`, with `ξ_k`, `η_l` the first `T`
    /// subscripts. Empty words impose no condition.
    pub fn satisfies_compression_criterion(&self, a: &SftMatrix) -> bool {
        let ok = |t: &Word, s: &Word| match (t.first(), s.first()) {
            (Some(x), Some(y)) => a.allows(x, y),
            _ => true,
        };
        ok(&self.left.mu, &self.right.mu) && ok(&self.left.nu, &self.right.nu)
    }
}

fn factor_string(letter: char, t: &CkTerm) -> String {
    match (t.mu.is_empty(), t.nu.is_empty()) {
        (true, true) => "1".into(),
        (false, true) => format!("{letter}[{}]", t.mu),
        (true, false) => format!("{letter}[{}]*", t.nu),
        (false, false) => format!("{letter}[{}]{letter}[{}]*", t.mu, t.nu),
    }
}

impl fmt::Display for TensorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", factor_string('T', &self.left), factor_string('S', &self.right))
    }
}

fn parse_factor(s: &str, letter: char) -> Result<CkTerm, CkError> {
    let s = s.trim();
    let bad = || CkError::Parse(s.to_string());
    if s == "1" {
        return Ok(CkTerm::unit());
    }
    let mut mu = None;
    let mut nu = None;
    let mut rest = s;
    while !rest.is_empty() {
        rest = rest.strip_prefix(letter).ok_or_else(bad)?.trim_start();
        rest = rest.strip_prefix('[').ok_or_else(bad)?;
        let close = rest.find(']').ok_or_else(bad)?;
        let syms = rest[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Symbol>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        rest = rest[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix('*') {
            if nu.is_some() {
                return Err(bad());
            }
            nu = Some(Word(syms));
            rest = r.trim_start();
        } else {
            if mu.is_some() || nu.is_some() {
                return Err(bad());
            }
            mu = Some(Word(syms));
        }
    }
    Ok(CkTerm { mu: mu.unwrap_or_default(), nu: nu.unwrap_or_default() })
}

impl std::str::FromStr for TensorTerm {
    type Err = CkError;

    /// `T[2 1]T[1]* x S[1 2]S[2]*`; a factor may be `1`, `T[w]`, or `T[w]*`.
    fn from_str(s: &str) -> Result<Self, CkError> {
        let (l, r) = s.split_once(" x ").ok_or_else(|| CkError::Parse(s.to_string()))?;
        Ok(TensorTerm { left: parse_factor(l, 'T')?, right: parse_factor(r, 'S')? })
    }
}

/// Linear combination of tensor monomials in `O_{A^t} ⊗ O_A`.
#[derive(Clone, Debug)]
pub struct TensorElement {
    a: SftMatrix,
    at: SftMatrix,
    terms: BTreeMap<TensorTerm, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: String,
    term: String,
}

impl Serialize for TensorElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(t, c)| TermRepr { coeff: c.to_string(), term: t.to_string() })
            .collect();
        v.serialize(s)
    }
}

impl TensorElement {
    fn from_raw(a: &SftMatrix, at: &SftMatrix, raw: BTreeMap<TensorTerm, BigRational>) -> Self {
        let mut targets: BTreeMap<Bidegree, (usize, usize)> = BTreeMap::new();
        for t in raw.keys() {
            let e = targets.entry(t.bidegree()).or_insert((0, 0));
            e.0 = e.0.max(t.left.nu.len());
            e.1 = e.1.max(t.right.nu.len());
        }
        let mut terms = BTreeMap::new();
        for (t, c) in raw {
            if c.is_zero()
                || !t.left.mu.is_admissible(at)
                || !t.left.nu.is_admissible(at)
                || !t.right.mu.is_admissible(a)
                || !t.right.nu.is_admissible(a)
            {
                continue;
            }
            let b = t.bidegree();
            let (lt, rt) = targets[&b];
            let lefts = expand_to(at, &t.left, level_target(lt, b.left_deg));
            let rights = expand_to(a, &t.right, level_target(rt, b.right_deg));
            for l in &lefts {
                for r in &rights {
                    add_coeff(&mut terms, TensorTerm { left: l.clone(), right: r.clone() }, &c);
                }
            }
        }
        terms.retain(|t, c| !c.is_zero() && term_nonzero(at, &t.left) && term_nonzero(a, &t.right));
        TensorElement { a: a.clone(), at: at.clone(), terms }
    }

    fn check(a: &SftMatrix) -> Result<SftMatrix, CkError> {
        if !a.is_zero_one() {
            return Err(CkError::NotZeroOne);
        }
        Ok(a.transpose())
    }

    pub fn zero(a: &SftMatrix) -> Result<Self, CkError> {
        let at = Self::check(a)?;
        Ok(TensorElement { a: a.clone(), at, terms: BTreeMap::new() })
    }

    /// Sum of terms with coefficients; words must be admissible.
    pub fn from_terms(
        a: &SftMatrix,
        terms: impl IntoIterator<Item = (TensorTerm, BigRational)>,
    ) -> Result<Self, CkError> {
        let at = Self::check(a)?;
        let mut raw = BTreeMap::new();
        for (t, c) in terms {
            for (w, m) in [(&t.left.mu, &at), (&t.left.nu, &at), (&t.right.mu, a), (&t.right.nu, a)] {
                if !w.is_admissible(m) {
                    return Err(CkError::InadmissibleWord(w.clone()));
                }
            }
            add_coeff(&mut raw, t, &c);
        }
        Ok(Self::from_raw(a, &at, raw))
    }

    pub fn monomial(a: &SftMatrix, t: TensorTerm) -> Result<Self, CkError> {
        Self::from_terms(a, [(t, BigRational::one())])
    }

    /// Sum of monomials given as literals.
    pub fn parse(a: &SftMatrix, s: &str) -> Result<Self, CkError> {
        let mut terms = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (c, body) = match part.split_once(" * ") {
                Some((c, b)) => (c.trim().parse::<BigRational>().map_err(|_| CkError::Parse(part.into()))?, b),
                None => (BigRational::one(), part),
            };
            terms.push((body.parse::<TensorTerm>()?, c));
        }
        Self::from_terms(a, terms)
    }

    pub fn unit(a: &SftMatrix) -> Result<Self, CkError> {
        Self::monomial(a, TensorTerm { left: CkTerm::unit(), right: CkTerm::unit() })
    }

    pub fn matrix(&self) -> &SftMatrix {
        &self.a
    }

    pub fn terms(&self) -> &BTreeMap<TensorTerm, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let raw = self.terms.iter().map(|(t, v)| (t.clone(), v * c)).collect();
        Self::from_raw(&self.a, &self.at, raw)
    }

    pub fn try_add(&self, other: &TensorElement) -> Result<Self, CkError> {
        if self.a != other.a {
            return Err(CkError::MatrixMismatch);
        }
        let mut raw = self.terms.clone();
        for (t, c) in &other.terms {
            add_coeff(&mut raw, t.clone(), c);
        }
        Ok(Self::from_raw(&self.a, &self.at, raw))
    }

    pub fn try_mul(&self, other: &TensorElement) -> Result<Self, CkError> {
        if self.a != other.a {
            return Err(CkError::MatrixMismatch);
        }
        let mut raw = BTreeMap::new();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                let lefts = mul_terms(&self.at, &x.left, &y.left);
                if lefts.is_empty() {
                    continue;
                }
                let rights = mul_terms(&self.a, &x.right, &y.right);
                let c = cx * cy;
                for l in &lefts {
                    for r in &rights {
                        add_coeff(&mut raw, TensorTerm { left: l.clone(), right: r.clone() }, &c);
                    }
                }
            }
        }
        Ok(Self::from_raw(&self.a, &self.at, raw))
    }

    pub fn adjoint(&self) -> Self {
        let raw = self.terms.iter().map(|(t, c)| (t.adjoint(), c.clone())).collect();
        Self::from_raw(&self.a, &self.at, raw)
    }

    /// Every term fixed by the diagonal gauge action.
    pub fn is_fixed(&self) -> bool {
        self.terms.keys().all(TensorTerm::is_fixed_by_diagonal)
    }

    /// Projection onto the terms with `k + m = l + n`.
    pub fn diagonal_expectation(&self) -> Self {
        let raw = self
            .terms
            .iter()
            .filter(|(t, _)| t.is_fixed_by_diagonal())
            .map(|(t, c)| (t.clone(), c.clone()))
            .collect();
        Self::from_raw(&self.a, &self.at, raw)
    }

    /// Distinct bidegrees present.
    pub fn bidegrees(&self) -> Vec<Bidegree> {
        let mut v: Vec<Bidegree> = self.terms.keys().map(TensorTerm::bidegree).collect();
        v.sort();
        v.dedup();
        v
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a
            && self.try_add(&other.scale(&q(-1))).is_ok_and(|d| d.is_zero())
    }
}

macro_rules! tensor_ops {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&TensorElement> for &TensorElement {
            type Output = TensorElement;

            fn $f(self, rhs: &TensorElement) -> TensorElement {
                let g: fn(&TensorElement, &TensorElement) -> TensorElement = $body;
                g(self, rhs)
            }
        }
    };
}

tensor_ops!(Add, add, |a, b| a.try_add(b).expect("matrix mismatch in tensor sum"));
tensor_ops!(Sub, sub, |a, b| a.try_add(&b.scale(&q(-1))).expect("matrix mismatch in tensor difference"));
tensor_ops!(Mul, mul, |a, b| a.try_mul(b).expect("matrix mismatch in tensor product"));

impl Neg for &TensorElement {
    type Output = TensorElement;

    fn neg(self) -> TensorElement {
        self.scale(&q(-1))
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(t, c)| format!("{c} * {t}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn w(s: &[Symbol]) -> Word {
    Word(s.to_vec())
}

/// `E_A = Σ_j T_j T_j* ⊗ S_j* S_j`.
pub fn projection_ea(a: &SftMatrix) -> Result<TensorElement, CkError> {
    let mut out = TensorElement::zero(a)?;
    for j in a.symbols() {
        let l = TensorElement::monomial(a, TensorTerm::new(w(&[j]), w(&[j]), Word::empty(), w(&[j])))?;
        let r = TensorElement::monomial(a, TensorTerm::new(Word::empty(), Word::empty(), w(&[j]), Word::empty()))?;
        out = &out + &(&l * &r);
    }
    Ok(out)
}

/// `E_{A^t} = Σ_j T_j* T_j ⊗ S_j S_j*`.
pub fn projection_eat(a: &SftMatrix) -> Result<TensorElement, CkError> {
    let mut out = TensorElement::zero(a)?;
    for j in a.symbols() {
        let l = TensorElement::monomial(a, TensorTerm::new(Word::empty(), w(&[j]), w(&[j]), w(&[j])))?;
        let r = TensorElement::monomial(a, TensorTerm::new(w(&[j]), Word::empty(), Word::empty(), Word::empty()))?;
        out = &out + &(&l * &r);
    }
    Ok(out)
}

/// `E_A x E_A`.
pub fn compress(x: &TensorElement) -> Result<TensorElement, CkError> {
    let e = projection_ea(&x.a)?;
    Ok(&(&e * x) * &e)
}

/// `U_i = T_i* ⊗ S_i`.
pub fn unitary_ui(a: &SftMatrix, i: Symbol) -> Result<TensorElement, CkError> {
    TensorElement::monomial(a, TensorTerm::new(Word::empty(), w(&[i]), w(&[i]), Word::empty()))
}

/// `U_A = Σ_i U_i`.
pub fn unitary_ua(a: &SftMatrix) -> Result<TensorElement, CkError> {
    let mut out = TensorElement::zero(a)?;
    for i in a.symbols() {
        out = &out + &unitary_ui(a, i)?;
    }
    Ok(out)
}

/// `α_A(x) = U_A x U_A*`.
pub fn alpha_a(x: &TensorElement) -> Result<TensorElement, CkError> {
    let u = unitary_ua(&x.a)?;
    Ok(&(&u * x) * &u.adjoint())
}

/// `α_A^{-1}(x) = U_A* x U_A`.
pub fn alpha_a_inverse(x: &TensorElement) -> Result<TensorElement, CkError> {
    let u = unitary_ua(&x.a)?;
    Ok(&(&u.adjoint() * x) * &u)
}

/// `τ(T_ξ̄T_η̄* ⊗ S_μS_ν*) = N^{-(k+m)}` on diagonal monomials, 0 otherwise.
pub fn trace_full_shift(x: &TensorElement) -> Result<BigRational, CkError> {
    let n = match x.a.full_shift_size() {
        Some(n) if x.a.n() as u64 == n => n,
        _ => return Err(CkError::NotFullShift),
    };
    if !x.is_fixed() {
        return Err(CkError::NotGaugeFixed);
    }
    let mut total = BigRational::zero();
    for (t, c) in &x.terms {
        if t.is_diagonal() {
            let e = t.left.mu.len() + t.right.mu.len();
            total += c / BigRational::from_integer(num_traits::pow(BigInt::from(n), e));
        }
    }
    Ok(total)
}

/// The two-sided cylinder word `ξ μ` of a diagonal term: the `T` subscripts
/// reversed, then `μ`.
fn cylinder_word(t: &CkTerm, s: &CkTerm) -> Word {
    push(&t.mu.reversed(), s.mu.symbols())
}

/// Trace from the Parry measure: a diagonal monomial with cylinder word
/// `i_0 .. i_r` has value `u_{i_0} v_{i_r} λ^{-r} / <u, v>`.
pub fn trace_parry(x: &TensorElement, perron: &PerronData) -> Result<f64, CkError> {
    if !x.is_fixed() {
        return Err(CkError::NotGaugeFixed);
    }
    let uv: f64 = perron.u.iter().zip(&perron.v).map(|(a, b)| a * b).sum();
    let mut total = 0.0;
    for (t, c) in &x.terms {
        if !t.is_diagonal() {
            continue;
        }
        let word = cylinder_word(&t.left, &t.right);
        if word.is_empty() || !word.is_admissible(&x.a) {
            continue;
        }
        let i0 = word.first().unwrap() as usize - 1;
        let ir = word.last().unwrap() as usize - 1;
        let r = word.len() as i32 - 1;
        let mass = perron.u[i0] * perron.v[ir] * perron.lambda.powi(-r) / uv;
        total += c.to_f64().unwrap_or(f64::NAN) * mass;
    }
    Ok(total)
}

/// The clopen set `U_{ξμ,ην}` with the exponents `p = m - n`, `q = l - k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidCylinder {
    /// `ξ μ`, occupying positions `1 - k ..= m`.
    pub source: Word,
    pub source_start: i64,
    /// `η ν`, occupying positions `1 - l ..= n`.
    pub target: Word,
    pub target_start: i64,
    pub p: i64,
    pub q: i64,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub n: usize,
}

impl GroupoidCylinder {
    /// `(x, p, q, y)` lies in the set: `x` in the source cylinder, `y` in the
    /// target cylinder, `x_{m+i} = y_{n+i}` for `i >= 1` and
    /// `x_{-k-j} = y_{-l-j}` for `j >= 0`.
    pub fn contains(&self, g: &crate::groupoid::SUElement) -> bool {
        let (x, y) = (g.x(), g.y());
        let in_cyl = |p: &BiPoint, w: &Word, start: i64| p.window(start, start + w.len() as i64) == w.0;
        g.exponents() == (self.p, self.q)
            && in_cyl(x, &self.source, self.source_start)
            && in_cyl(y, &self.target, self.target_start)
            && x.shift(self.m as i64 + 1).right_tail_match(&y.shift(self.n as i64 + 1)) == Some(0)
            && x.shift(-(self.k as i64)).left_tail_match(&y.shift(-(self.l as i64))) == Some(0)
    }
}

/// Cylinder data of a monomial of the compressed corner.
pub fn phi_generator_map(t: &TensorTerm, a: &SftMatrix) -> Result<GroupoidCylinder, CkError> {
    if !t.satisfies_compression_criterion(a) {
        return Err(CkError::CompressionCriterionFails);
    }
    let (k, l, m, n) = (t.left.mu.len(), t.left.nu.len(), t.right.mu.len(), t.right.nu.len());
    Ok(GroupoidCylinder {
        source: cylinder_word(&t.left, &t.right),
        source_start: 1 - k as i64,
        target: push(&t.left.nu.reversed(), t.right.nu.symbols()),
        target_start: 1 - l as i64,
        p: m as i64 - n as i64,
        q: l as i64 - k as i64,
        k,
        l,
        m,
        n,
    })
}

/// Parameters of [`ck_verify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkVerifyConfig {
    /// Longest word in the monomials tested against the compression criterion
    /// (nonzero monomials only).
    pub max_word_len: usize,
    /// Bound on `|ξ| + |μ|` for the diagonal generators moved by `α_A`.
    pub shift_len: usize,
    /// Monomials tested when the full enumeration is larger: an evenly
    /// strided subset of it.
    pub monomial_cap: usize,
}

impl Default for CkVerifyConfig {
    fn default() -> Self {
        CkVerifyConfig { max_word_len: 3, shift_len: 4, monomial_cap: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkCheck {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CkCheck {
    fn new(name: &str) -> Self {
        CkCheck { name: name.into(), passed: true, cases: 0, exhaustive: true, counterexample: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(what());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkVerifyReport {
    pub passed: bool,
    pub checks: Vec<CkCheck>,
}

fn words_up_to(a: &SftMatrix, max_len: usize) -> Vec<Word> {
    (1..=max_len).flat_map(|l| crate::sft::admissible_words(a, l)).collect()
}

/// Runs the identities of the symbolic calculus on `A`: the Cuntz–Krieger
/// relations, `E_A = E_{A^t}`, `U_A U_A* = U_A* U_A = E_A`, the compression
/// criterion on monomials, and the action of `α_A` on diagonal generators.
pub fn ck_verify(a: &SftMatrix, config: &CkVerifyConfig) -> Result<CkVerifyReport, CkError> {
    let at = TensorElement::check(a)?;
    let mut checks = Vec::new();

    let mut rel = CkCheck::new("cuntz-krieger relations");
    let one = CkElement::unit(a)?;
    let mut sum = CkElement::zero(a)?;
    for i in a.symbols() {
        let si = CkElement::s(a, i)?;
        sum = sum.try_add(&si.try_mul(&si.adjoint())?)?;
        let mut rhs = CkElement::zero(a)?;
        for j in a.symbols().filter(|&j| a.allows(i, j)) {
            let sj = CkElement::s(a, j)?;
            rhs = rhs.try_add(&sj.try_mul(&sj.adjoint())?)?;
        }
        rel.record(si.adjoint().try_mul(&si)? == rhs, || format!("S_{i}* S_{i}"));
    }
    rel.record(sum == one, || "sum of S_j S_j*".into());
    checks.push(rel);

    let e = projection_ea(a)?;
    let mut proj = CkCheck::new("E_A = E_At");
    proj.record(e == projection_eat(a)?, || "E_A != E_At".into());
    proj.record(&e * &e == e && e.adjoint() == e, || "E_A is not a projection".into());
    checks.push(proj);

    let u = unitary_ua(a)?;
    let mut uni = CkCheck::new("U U* = U* U = E_A");
    uni.record(&u * &u.adjoint() == e, || "U U* != E_A".into());
    uni.record(&u.adjoint() * &u == e, || "U* U != E_A".into());
    checks.push(uni);

    let mut crit = CkCheck::new("compression criterion");
    let sw = words_up_to(a, config.max_word_len);
    let tw = words_up_to(&at, config.max_word_len);
    let (ns, nt) = (sw.len() as u128, tw.len() as u128);
    let total = nt * nt * ns * ns;
    let take = total.min(config.monomial_cap as u128);
    crit.exhaustive = take == total;
    for i in 0..take {
        let mut idx = i * total / take;
        let mu = &sw[(idx % ns) as usize];
        idx /= ns;
        let nu = &sw[(idx % ns) as usize];
        idx /= ns;
        let xi = &tw[(idx % nt) as usize];
        idx /= nt;
        let eta = &tw[(idx % nt) as usize];
        let t = TensorTerm::new(xi.clone(), eta.clone(), mu.clone(), nu.clone());
        let x = TensorElement::monomial(a, t.clone())?;
        if x.is_zero() {
            // zero monomials are fixed whatever their words
            continue;
        }
        let fixed = (&(&e * &x) * &e) == x;
        crit.record(fixed == t.satisfies_compression_criterion(a), || t.to_string());
    }
    checks.push(crit);

    let mut shift = CkCheck::new("shift action on diagonal generators");
    for total_len in 2..=config.shift_len {
        for k in 1..total_len {
            for xi in crate::sft::admissible_words(&at, k) {
                for mu in crate::sft::admissible_words(a, total_len - k) {
                    let t = TensorTerm::new(xi.clone(), xi.clone(), mu.clone(), mu.clone());
                    if !t.satisfies_compression_criterion(a) {
                        continue;
                    }
                    let x = TensorElement::monomial(a, t.clone())?;
                    let xk = xi.first().expect("nonempty");
                    let rest = Word(xi.symbols()[1..].to_vec());
                    let moved = Word(std::iter::once(xk).chain(mu.symbols().iter().copied()).collect());
                    let target =
                        TensorElement::monomial(a, TensorTerm::new(rest.clone(), rest, moved.clone(), moved))?;
                    let lhs = &(&u * &x) * &u.adjoint();
                    let ok = lhs == &(&e * &target) * &e && &(&u.adjoint() * &lhs) * &u == x;
                    shift.record(ok, || t.to_string());
                }
            }
        }
    }
    checks.push(shift);

    Ok(CkVerifyReport { passed: checks.iter().all(|c| c.passed), checks })
}
