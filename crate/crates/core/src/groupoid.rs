//! Elements of the groupoids `G^a ⋊ Z` and `G^{s,u} ⋊ Z^2` with recomputed
//! depth witnesses, and essential-freeness certificates.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{SftMatrix, Symbol};
use crate::sft::{periodic_orbits, BiPoint, SftError, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupoidError {
    #[error("({x}, {n}, {z}) is not in the groupoid: shifted point is not asymptotic")]
    NotAsymptotic { x: String, n: i64, z: String },
    #[error("({x}, {p}, {q}, {y}) is not in the groupoid")]
    NotInSU { x: String, p: i64, q: i64, y: String },
    #[error("elements are not composable")]
    NotComposable,
    #[error("shift exponent must be nonzero")]
    ZeroShift,
    #[error("cylinder word {0} is not admissible")]
    InadmissibleWord(Word),
    #[error(transparent)]
    Point(#[from] SftError),
}

/// Which generator drives the shift: `σ` or `σ^{-1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Inverse,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Inverse => -1,
        }
    }

    /// `φ^k(x)` for `φ = σ` or `σ^{-1}`.
    pub fn shift(self, x: &BiPoint, k: i64) -> BiPoint {
        x.shift(self.sign() * k)
    }
}

/// `(x, n, z)` with `(φ^n x, z)` asymptotic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AElement {
    x: BiPoint,
    n: i64,
    z: BiPoint,
    witness: (u64, u64),
    direction: Direction,
}

impl AElement {
    pub fn new(x: BiPoint, n: i64, z: BiPoint) -> Result<Self, GroupoidError> {
        Self::new_in(Direction::Forward, x, n, z)
    }

    pub fn new_in(direction: Direction, x: BiPoint, n: i64, z: BiPoint) -> Result<Self, GroupoidError> {
        let witness = direction.shift(&x, n).asymptotic_pair(&z).ok_or_else(|| {
            GroupoidError::NotAsymptotic { x: x.to_string(), n, z: z.to_string() }
        })?;
        Ok(AElement { x, n, z, witness, direction })
    }

    pub fn unit(x: BiPoint) -> Self {
        Self::unit_in(Direction::Forward, x)
    }

    pub fn unit_in(direction: Direction, x: BiPoint) -> Self {
        AElement { z: x.clone(), x, n: 0, witness: (0, 0), direction }
    }

    pub fn x(&self) -> &BiPoint {
        &self.x
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn z(&self) -> &BiPoint {
        &self.z
    }

    /// `(stable depth, unstable depth)` of `(φ^n x, z)`.
    pub fn witness(&self) -> (u64, u64) {
        self.witness
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn is_unit(&self) -> bool {
        self.n == 0 && self.x == self.z
    }

    /// `(x, n, z)(z, m, w) = (x, n + m, w)`.
    pub fn compose(&self, other: &AElement) -> Result<AElement, GroupoidError> {
        if self.z != other.x || self.direction != other.direction {
            return Err(GroupoidError::NotComposable);
        }
        AElement::new_in(self.direction, self.x.clone(), self.n + other.n, other.z.clone())
    }

    /// `(x, n, z)^{-1} = (z, -n, x)`.
    pub fn inverse(&self) -> AElement {
        AElement::new_in(self.direction, self.z.clone(), -self.n, self.x.clone())
            .expect("inverse of a groupoid element is in the groupoid")
    }
}

impl fmt::Display for AElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.n, self.z)
    }
}

/// `(x, p, q, y)` with `(σ^p x, y)` stably and `(σ^q x, y)` unstably
/// equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SUElement {
    x: BiPoint,
    p: i64,
    q: i64,
    y: BiPoint,
    s_depth: u64,
    u_depth: u64,
}

impl SUElement {
    pub fn new(x: BiPoint, p: i64, q: i64, y: BiPoint) -> Result<Self, GroupoidError> {
        let s = x.shift(p).right_tail_match(&y);
        let u = x.shift(q).left_tail_match(&y);
        match (s, u) {
            (Some(s_depth), Some(u_depth)) => Ok(SUElement { x, p, q, y, s_depth, u_depth }),
            _ => Err(GroupoidError::NotInSU { x: x.to_string(), p, q, y: y.to_string() }),
        }
    }

    pub fn unit(x: BiPoint) -> Self {
        SUElement { y: x.clone(), x, p: 0, q: 0, s_depth: 0, u_depth: 0 }
    }

    pub fn x(&self) -> &BiPoint {
        &self.x
    }

    pub fn y(&self) -> &BiPoint {
        &self.y
    }

    pub fn exponents(&self) -> (i64, i64) {
        (self.p, self.q)
    }

    pub fn depths(&self) -> (u64, u64) {
        (self.s_depth, self.u_depth)
    }

    pub fn compose(&self, other: &SUElement) -> Result<SUElement, GroupoidError> {
        if self.y != other.x {
            return Err(GroupoidError::NotComposable);
        }
        SUElement::new(self.x.clone(), self.p + other.p, self.q + other.q, other.y.clone())
    }

    pub fn inverse(&self) -> SUElement {
        SUElement::new(self.y.clone(), -self.p, -self.q, self.x.clone())
            .expect("inverse of a groupoid element is in the groupoid")
    }

    /// `(x, p, p, y) -> (x, p, y)`; `None` off the diagonal.
    pub fn diagonal_part(&self) -> Option<AElement> {
        (self.p == self.q).then(|| {
            AElement::new(self.x.clone(), self.p, self.y.clone())
                .expect("diagonal elements are asymptotic")
        })
    }
}

impl fmt::Display for SUElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.p, self.q, self.y)
    }
}

/// Shortest admissible path strictly between `from` and `to`: the symbols
/// `c` with `from c_1 .. c_r to` admissible.
fn connector(a: &SftMatrix, from: Symbol, to: Symbol) -> Option<Vec<Symbol>> {
    if a.allows(from, to) {
        return Some(Vec::new());
    }
    let mut prev: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for s in a.symbols().filter(|&s| a.allows(from, s)) {
        prev.insert(s, 0);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if a.allows(u, to) {
            let mut path = vec![u];
            let mut cur = u;
            while let Some(&p) = prev.get(&cur) {
                if p == 0 {
                    break;
                }
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for s in a.symbols().filter(|&s| a.allows(u, s)) {
            prev.entry(s).or_insert_with(|| {
                queue.push_back(s);
                u
            });
        }
    }
    None
}

/// Searches for a point of the cylinder `x_0 .. x_{|w|-1} = w` that is not
/// `n`-asymptotically periodic, i.e. `(σ^n x, x)` not asymptotic. Candidates
/// have periodic tails drawn from orbits of length `<= search_depth`.
/// `Ok(None)` means no certificate was found, not that none exists.
pub fn essential_freeness_evidence(
    a: &SftMatrix,
    n: i64,
    word: &Word,
    search_depth: usize,
) -> Result<Option<BiPoint>, GroupoidError> {
    if n == 0 {
        return Err(GroupoidError::ZeroShift);
    }
    if word.is_empty() || !word.is_admissible(a) {
        return Err(GroupoidError::InadmissibleWord(word.clone()));
    }
    let orbits = periodic_orbits(a, search_depth)?;
    let (first, last) = (word.first().unwrap(), word.last().unwrap());
    for left in &orbits {
        let lw = left.word();
        let Some(c1) = connector(a, lw.last().unwrap(), first) else { continue };
        for right in &orbits {
            let rw = right.word();
            let Some(c2) = connector(a, last, rw.first().unwrap()) else { continue };
            let mut core = c1.clone();
            core.extend_from_slice(word.symbols());
            core.extend_from_slice(&c2);
            let offset = -(c1.len() as i64);
            let x = BiPoint::new(a, lw.clone(), Word(core), rw.clone(), offset)?;
            if x.shift(n).asymptotic_pair(&x).is_none() {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}
