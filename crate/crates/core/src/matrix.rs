//! Transition matrices and their standing-assumption checks.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::IntMatrix;

/// Alphabet symbols are `1..=n`.
pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    Negative { row: usize, col: usize, value: i64 },
    #[error("entry {value} at ({row}, {col}) is not 0 or 1")]
    NotZeroOne { row: usize, col: usize, value: i64 },
    #[error("{kind} {index} is identically zero")]
    ZeroRowOrCol { kind: &'static str, index: usize },
    #[error("matrix is a permutation matrix")]
    Permutation,
    #[error("matrix is reducible")]
    Reducible,
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

/// Which entries are acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// 0/1 entries, usable directly as a vertex shift.
    ZeroOne,
    /// Arbitrary nonnegative integers (edge-shift presentation).
    Nonnegative,
}

/// A square nonnegative integer matrix that is irreducible, has no zero rows
/// or columns and is not a permutation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct SftMatrix {
    n: usize,
    entries: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl TryFrom<MatrixRepr> for SftMatrix {
    type Error = MatrixError;

    fn try_from(r: MatrixRepr) -> Result<Self, MatrixError> {
        if r.rows.len() != r.n {
            return Err(MatrixError::Parse(format!(
                "declared n = {} but {} rows given",
                r.n,
                r.rows.len()
            )));
        }
        SftMatrix::new(&r.rows, Mode::Nonnegative)
    }
}

impl From<SftMatrix> for MatrixRepr {
    fn from(m: SftMatrix) -> Self {
        MatrixRepr { n: m.n, rows: m.rows_i64() }
    }
}

impl SftMatrix {
    /// Validates `rows` against the standing assumptions.
    pub fn new(rows: &[Vec<i64>], mode: Mode) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NonSquare { row: i, len: row.len(), expected: n });
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0 {
                    return Err(MatrixError::Negative { row: i, col: j, value: v });
                }
                if mode == Mode::ZeroOne && v > 1 {
                    return Err(MatrixError::NotZeroOne { row: i, col: j, value: v });
                }
                entries.push(v as u64);
            }
        }
        let m = SftMatrix { n, entries };
        for i in 0..n {
            if (0..n).all(|j| m.entry(i, j) == 0) {
                return Err(MatrixError::ZeroRowOrCol { kind: "row", index: i });
            }
            if (0..n).all(|j| m.entry(j, i) == 0) {
                return Err(MatrixError::ZeroRowOrCol { kind: "column", index: i });
            }
        }
        if m.is_permutation() {
            return Err(MatrixError::Permutation);
        }
        if !m.is_irreducible() {
            return Err(MatrixError::Reducible);
        }
        Ok(m)
    }

    /// Shorthand for 0/1 matrices given as `u8` rows.
    pub fn zero_one(rows: &[&[u8]]) -> Result<Self, MatrixError> {
        let rows: Vec<Vec<i64>> =
            rows.iter().map(|r| r.iter().map(|&v| i64::from(v)).collect()).collect();
        Self::new(&rows, Mode::ZeroOne)
    }

    /// The full shift on `n` symbols (all-ones `n x n`).
    pub fn full_shift(n: usize) -> Result<Self, MatrixError> {
        Self::new(&vec![vec![1; n]; n], Mode::ZeroOne)
    }

    /// Parses JSON (`{"n":..,"rows":..}` or a bare array of rows) or plain
    /// text with rows separated by newlines or `;`.
    pub fn parse(text: &str, mode: Mode) -> Result<Self, MatrixError> {
        let t = text.trim();
        if t.is_empty() {
            return Err(MatrixError::Empty);
        }
        let rows: Vec<Vec<i64>> = if t.starts_with('{') {
            let repr: MatrixRepr =
                serde_json::from_str(t).map_err(|e| MatrixError::Parse(e.to_string()))?;
            if repr.rows.len() != repr.n {
                return Err(MatrixError::Parse(format!(
                    "declared n = {} but {} rows given",
                    repr.n,
                    repr.rows.len()
                )));
            }
            repr.rows
        } else if t.starts_with('[') {
            serde_json::from_str(t).map_err(|e| MatrixError::Parse(e.to_string()))?
        } else {
            t.split(['\n', ';'])
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| {
                    l.split(|c: char| c.is_whitespace() || c == ',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse::<i64>().map_err(|e| MatrixError::Parse(format!("{s:?}: {e}"))))
                        .collect()
                })
                .collect::<Result<_, _>>()?
        };
        Self::new(&rows, mode)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry by 0-based indices.
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    /// Entry by symbols (1-based).
    pub fn a(&self, i: Symbol, j: Symbol) -> u64 {
        self.entry(i as usize - 1, j as usize - 1)
    }

    /// `A(i, j) = 1` for symbols `i, j`.
    pub fn allows(&self, i: Symbol, j: Symbol) -> bool {
        self.a(i, j) != 0
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        1..=self.n as Symbol
    }

    pub fn rows_i64(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entry(i, j) as i64).collect()).collect()
    }

    pub fn is_zero_one(&self) -> bool {
        self.entries.iter().all(|&v| v <= 1)
    }

    pub fn transpose(&self) -> SftMatrix {
        let mut entries = vec![0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                entries[j * self.n + i] = self.entry(i, j);
            }
        }
        SftMatrix { n: self.n, entries }
    }

    pub fn to_int(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| BigInt::from(self.entry(i, j))).collect())
            .collect();
        IntMatrix::from_rows(&rows)
    }

    /// `Some(N)` when the matrix presents the full `N`-shift: all-ones
    /// `N x N`, or the `1 x 1` matrix `[N]`.
    pub fn full_shift_size(&self) -> Option<u64> {
        if self.n == 1 {
            return Some(self.entries[0]);
        }
        if self.entries.iter().all(|&v| v == 1) {
            return Some(self.n as u64);
        }
        None
    }

    fn is_permutation(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).map(|j| self.entry(i, j)).sum::<u64>() == 1
                && (0..self.n).map(|j| self.entry(j, i)).sum::<u64>() == 1
        })
    }

    fn reachable_from(&self, start: usize, transpose: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..self.n {
                let e = if transpose { self.entry(v, u) } else { self.entry(u, v) };
                if e != 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn is_irreducible(&self) -> bool {
        self.reachable_from(0, false).iter().all(|&b| b)
            && self.reachable_from(0, true).iter().all(|&b| b)
    }

    /// Gcd of cycle lengths of the underlying graph.
    pub fn period(&self) -> u64 {
        let mut level = vec![None::<i64>; self.n];
        level[0] = Some(0);
        let mut queue = VecDeque::from([0usize]);
        let mut g: i64 = 0;
        while let Some(u) = queue.pop_front() {
            let lu = level[u].unwrap();
            for v in 0..self.n {
                if self.entry(u, v) == 0 {
                    continue;
                }
                match level[v] {
                    None => {
                        level[v] = Some(lu + 1);
                        queue.push_back(v);
                    }
                    Some(lv) => g = num_integer::gcd(g, lu + 1 - lv),
                }
            }
        }
        g.unsigned_abs()
    }

    /// Irreducible with period 1.
    pub fn is_primitive(&self) -> bool {
        self.period() == 1
    }

    /// 0/1 presentation of the same shift: symbols are the edges of the
    /// multigraph, edge `e` may follow edge `f` iff `f` ends where `e` starts.
    /// Returns the edge-shift matrix and each edge's `(from, to)` vertex pair
    /// (0-based). A 0/1 input is returned unchanged with the identity labelling
    /// on vertices.
    pub fn edge_shift(&self) -> (SftMatrix, Vec<(usize, usize)>) {
        if self.is_zero_one() {
            return (self.clone(), (0..self.n).map(|i| (i, i)).collect());
        }
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                for _ in 0..self.entry(i, j) {
                    edges.push((i, j));
                }
            }
        }
        let e = edges.len();
        let mut entries = vec![0; e * e];
        for (a, &(_, to)) in edges.iter().enumerate() {
            for (b, &(from, _)) in edges.iter().enumerate() {
                if to == from {
                    entries[a * e + b] = 1;
                }
            }
        }
        (SftMatrix { n: e, entries }, edges)
    }
}

impl fmt::Display for SftMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows_i64()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "{}", rows.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_standing_assumption_violations() {
        let cases: Vec<(Vec<Vec<i64>>, MatrixError)> = vec![
            (vec![], MatrixError::Empty),
            (vec![vec![1, 1], vec![1]], MatrixError::NonSquare { row: 1, len: 1, expected: 2 }),
            (vec![vec![1, -1], vec![1, 1]], MatrixError::Negative { row: 0, col: 1, value: -1 }),
            (vec![vec![1, 1], vec![0, 0]], MatrixError::ZeroRowOrCol { kind: "row", index: 1 }),
            (vec![vec![1, 0], vec![1, 0]], MatrixError::ZeroRowOrCol { kind: "column", index: 1 }),
            (vec![vec![0, 1], vec![1, 0]], MatrixError::Permutation),
            (vec![vec![1, 1], vec![0, 1]], MatrixError::Reducible),
            (vec![vec![1]], MatrixError::Permutation),
        ];
        for (rows, err) in cases {
            assert_eq!(SftMatrix::new(&rows, Mode::Nonnegative), Err(err), "{rows:?}");
        }
        assert!(matches!(
            SftMatrix::new(&[vec![2, 1], vec![1, 1]], Mode::ZeroOne),
            Err(MatrixError::NotZeroOne { .. })
        ));
    }

    #[test]
    fn parses_all_input_forms() {
        let expect = SftMatrix::zero_one(&[&[1, 1], &[1, 0]]).unwrap();
        for text in ["[[1,1],[1,0]]", "{\"n\":2,\"rows\":[[1,1],[1,0]]}", "1 1\n1 0\n", "1 1; 1 0"] {
            assert_eq!(SftMatrix::parse(text, Mode::ZeroOne).unwrap(), expect, "{text}");
        }
        assert!(SftMatrix::parse("{\"n\":3,\"rows\":[[1,1],[1,0]]}", Mode::ZeroOne).is_err());
    }

    #[test]
    fn full_shift_detection() {
        assert_eq!(SftMatrix::full_shift(3).unwrap().full_shift_size(), Some(3));
        let one = SftMatrix::new(&[vec![5]], Mode::Nonnegative).unwrap();
        assert_eq!(one.full_shift_size(), Some(5));
        let gm = SftMatrix::zero_one(&[&[1, 1], &[1, 0]]).unwrap();
        assert_eq!(gm.full_shift_size(), None);
    }

    #[test]
    fn edge_shift_of_multigraph() {
        let m = SftMatrix::new(&[vec![19, 5], vec![4, 1]], Mode::Nonnegative).unwrap();
        let (e, labels) = m.edge_shift();
        assert_eq!(e.n(), 29);
        assert_eq!(labels.len(), 29);
        assert!(e.is_zero_one());
        // row sums of the edge shift equal the out-degree of the edge's target
        for (a, &(_, to)) in labels.iter().enumerate() {
            let out: u64 = (0..2).map(|j| m.entry(to, j)).sum();
            assert_eq!((0..29).map(|b| e.entry(a, b)).sum::<u64>(), out);
        }
    }

    #[test]
    fn period_and_primitivity() {
        let cyc = SftMatrix::zero_one(&[&[0, 1, 1], &[1, 0, 0], &[1, 0, 0]]).unwrap();
        assert_eq!(cyc.period(), 2);
        assert!(!cyc.is_primitive());
        assert!(SftMatrix::zero_one(&[&[1, 1], &[1, 0]]).unwrap().is_primitive());
    }

    #[test]
    fn serde_round_trip() {
        let m = SftMatrix::zero_one(&[&[1, 1], &[1, 0]]).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, "{\"n\":2,\"rows\":[[1,1],[1,0]]}");
        assert_eq!(serde_json::from_str::<SftMatrix>(&js).unwrap(), m);
    }
}
