//! Bowen–Franks groups, the inductive limit `H(A)` with its maps `ι` and `α`,
//! and K-groups of the asymptotic Ruelle algebra.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::IntMatrix;
use crate::matrix::SftMatrix;
use crate::snf::{cokernel, kernel_basis, FinGenAbGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KError {
    #[error("stage matrix is {rows}x{cols}, expected {n}x{n}")]
    ShapeMismatch { rows: usize, cols: usize, n: usize },
    #[error("stage index must be positive")]
    BadStage,
    #[error("full shift needs N >= 2, got {0}")]
    NotFullShift(u64),
    #[error("max_stage must be at least 2, got {0}")]
    StageTooSmall(usize),
}

/// `coker(I - A^t)`.
pub fn bowen_franks(a: &SftMatrix) -> FinGenAbGroup {
    let m = a.to_int();
    cokernel(&IntMatrix::identity(a.n()).sub(&m.transpose()))
}

/// `[T, k]` in `H(A) = lim (M_N(Z), ι)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HAStageElement {
    pub t: IntMatrix,
    pub k: u32,
}

impl HAStageElement {
    pub fn new(t: IntMatrix, k: u32, n: usize) -> Result<Self, KError> {
        if k == 0 {
            return Err(KError::BadStage);
        }
        if t.rows() != n || t.cols() != n {
            return Err(KError::ShapeMismatch { rows: t.rows(), cols: t.cols(), n });
        }
        Ok(HAStageElement { t, k })
    }

    fn check(&self, n: usize) -> Result<(), KError> {
        if self.t.rows() != n || self.t.cols() != n {
            return Err(KError::ShapeMismatch { rows: self.t.rows(), cols: self.t.cols(), n });
        }
        Ok(())
    }
}

/// `ι_k([T, k]) = [A T A, k + 1]`.
pub fn ha_iota(e: &HAStageElement, a: &SftMatrix) -> Result<HAStageElement, KError> {
    e.check(a.n())?;
    let m = a.to_int();
    Ok(HAStageElement { t: m.mul(&e.t).mul(&m), k: e.k + 1 })
}

/// `α_k([T, k]) = [A^2 T, k + 1]`.
pub fn ha_alpha(e: &HAStageElement, a: &SftMatrix) -> Result<HAStageElement, KError> {
    e.check(a.n())?;
    let m = a.to_int();
    Ok(HAStageElement { t: m.mul(&m).mul(&e.t), k: e.k + 1 })
}

/// `ξ([T, k]) = s(T) / N^(2k - 2)` for the full `N`-shift, `s` the entry sum.
pub fn xi_full_shift(e: &HAStageElement, n: u64) -> Result<BigRational, KError> {
    if n < 2 {
        return Err(KError::NotFullShift(n));
    }
    e.check(n as usize)?;
    let den = num_traits::pow(BigInt::from(n), 2 * (e.k as usize - 1));
    Ok(BigRational::new(e.t.entry_sum(), den))
}

/// The subgroup `Z[1/(p_1 .. p_r)]` of the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalizedSubgroup {
    primes: Vec<u64>,
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl LocalizedSubgroup {
    pub fn new(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        LocalizedSubgroup { primes }
    }

    /// `Z[1/n]`.
    pub fn of(n: u64) -> Self {
        LocalizedSubgroup { primes: prime_factors(n) }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Membership of a rational number.
    pub fn contains(&self, q: &BigRational) -> bool {
        let mut d = q.denom().clone();
        for &p in &self.primes {
            let bp = BigInt::from(p);
            while d.is_multiple_of(&bp) {
                d /= &bp;
            }
        }
        d.is_one()
    }
}

impl fmt::Display for LocalizedSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primes.is_empty() {
            return write!(f, "Z");
        }
        let prod: Vec<String> = self.primes.iter().map(ToString::to_string).collect();
        write!(f, "Z[1/{}]", prod.join("*"))
    }
}

pub fn localized_equal(a: &LocalizedSubgroup, b: &LocalizedSubgroup) -> bool {
    a.primes == b.primes
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuelleKGroups {
    pub k0: LocalizedSubgroup,
    pub k1: LocalizedSubgroup,
}

/// `K_0 = K_1 = Z[1/N]` for the full `N`-shift.
pub fn ruelle_k_groups_full_shift(n: u64) -> Result<RuelleKGroups, KError> {
    if n < 2 {
        return Err(KError::NotFullShift(n));
    }
    Ok(RuelleKGroups { k0: LocalizedSubgroup::of(n), k1: LocalizedSubgroup::of(n) })
}

/// Trace values of `K_0` for the full `N`-shift: `Z[1/N]`.
pub fn trace_value_group_full_shift(n: u64) -> Result<LocalizedSubgroup, KError> {
    ruelle_k_groups_full_shift(n).map(|g| g.k0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagewiseGroup {
    pub stage_groups: Vec<FinGenAbGroup>,
    pub stabilized: bool,
}

/// Matrix of `T -> L T R` acting on row-major `vec(T)`.
fn bilinear_operator(l: &IntMatrix, r: &IntMatrix) -> IntMatrix {
    let n = l.rows();
    let mut op = IntMatrix::zeros(n * n, n * n);
    for p in 0..n {
        for q in 0..n {
            // column for E_pq: (L E_pq R)_ij = L_ip R_qj
            for i in 0..n {
                if l[(i, p)].is_zero() {
                    continue;
                }
                for j in 0..n {
                    op[(i * n + j, p * n + q)] = &l[(i, p)] * &r[(q, j)];
                }
            }
        }
    }
    op
}

/// Stage groups of `coker(id - α)` on `H(A)`.
///
/// Stage 1 is `M_N(Z)` modulo the eventual kernel of `ι`; stages `K >= 2`
/// additionally divide by the image of `id - α`, which at stage `k + 1` is
/// `{A T A - A^2 T}`. Because `ι` commutes with `T -> A T A - A^2 T`, these
/// quotients are the successive stages of the limit; `stabilized` records
/// whether the last two agree.
pub fn ruelle_k0_stagewise(a: &SftMatrix, max_stage: usize) -> Result<StagewiseGroup, KError> {
    if max_stage < 2 {
        return Err(KError::StageTooSmall(max_stage));
    }
    let n = a.n();
    let m = a.to_int();
    // ker ι^j stabilizes once A^j has stable rank, which happens by j = n
    let mn = m.pow(n as u64);
    let iota_n = bilinear_operator(&mn, &mn);
    let ker = kernel_basis(&iota_n);
    let ker_mat = IntMatrix::from_columns(n * n, &ker);
    let q = bilinear_operator(&m, &m).sub(&bilinear_operator(&m.mul(&m), &IntMatrix::identity(n)));
    let first = cokernel(&ker_mat);
    let rest = cokernel(&q.hstack(&ker_mat));
    let mut stage_groups = vec![first];
    stage_groups.extend(std::iter::repeat_n(rest, max_stage - 1));
    let k = stage_groups.len();
    let stabilized = stage_groups[k - 1] == stage_groups[k - 2];
    Ok(StagewiseGroup { stage_groups, stabilized })
}
