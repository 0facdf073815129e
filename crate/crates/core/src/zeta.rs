//! Dynamical zeta functions as exact power series and rational functions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{SftMatrix, Symbol};
use crate::sft::{admissible_words, periodic_words, SftError, Word};
use crate::window::{WindowError, WindowFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("orbit lengths complete only through {complete_through}, need {order}")]
    CutoffTooSmall { complete_through: usize, order: usize },
    #[error("periodic point {word} of period {period} has zero weight")]
    ZeroWeightPeriodicPoint { word: Word, period: usize },
    #[error("weight takes both signs or zero; use the explicit period cutoff")]
    WeightNotSignDefinite,
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Point(#[from] SftError),
}

/// Truncated power series `c_0 + c_1 t + .. + c_order t^order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least the constant term");
        PowerSeries { coeffs }
    }

    pub fn from_integers<T: Into<BigInt> + Clone>(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().cloned().map(|c| BigRational::from_integer(c.into())).collect())
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![BigRational::zero(); order + 1];
        c[0] = BigRational::one();
        PowerSeries { coeffs: c }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    /// `exp(L)` for `L` with zero constant term.
    pub fn exp_of(log: &[BigRational]) -> PowerSeries {
        let order = log.len() - 1;
        let mut f = vec![BigRational::zero(); order + 1];
        f[0] = BigRational::one();
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for k in 1..=n {
                if !log[k].is_zero() {
                    acc += &log[k] * BigRational::from_integer(k.into()) * &f[n - k];
                }
            }
            f[n] = acc / BigRational::from_integer(n.into());
        }
        PowerSeries { coeffs: f }
    }

    /// Coefficients of `t * d/dt log(self)`; requires `c_0 = 1`.
    pub fn log_derivative(&self) -> Vec<BigRational> {
        assert!(self.coeffs[0].is_one());
        let order = self.order();
        // g = t f'/f  =>  g_n = n f_n - sum_{k<n} g_k f_{n-k}
        let mut g = vec![BigRational::zero(); order + 1];
        for n in 1..=order {
            let mut v = &self.coeffs[n] * BigRational::from_integer(n.into());
            for k in 1..n {
                v -= &g[k] * &self.coeffs[n - k];
            }
            g[n] = v;
        }
        g
    }

    /// Index of the first differing coefficient.
    pub fn first_difference(&self, other: &PowerSeries) -> Option<usize> {
        let n = self.order().max(other.order());
        let zero = BigRational::zero();
        (0..=n).find(|&i| self.coeffs.get(i).unwrap_or(&zero) != other.coeffs.get(i).unwrap_or(&zero))
    }

    /// Integer coefficients, when all are integral.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `num(t) / den(t)` with integer coefficients, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: Vec<BigInt>,
    pub den: Vec<BigInt>,
}

impl RationalFunction {
    /// Taylor coefficients through `t^order`; needs `den(0) = 1`.
    pub fn expand(&self, order: usize) -> PowerSeries {
        assert!(self.den[0].is_one());
        let mut f: Vec<BigInt> = vec![BigInt::zero(); order + 1];
        for n in 0..=order {
            let mut v = self.num.get(n).cloned().unwrap_or_default();
            for j in 1..self.den.len().min(n + 1) {
                v -= &self.den[j] * &f[n - j];
            }
            f[n] = v;
        }
        PowerSeries::from_integers(&f)
    }
}

fn poly_to_string(p: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (i, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        let body = match (i, mag.is_one()) {
            (0, _) => mag.to_string(),
            (1, true) => "t".into(),
            (1, false) => format!("{mag}t"),
            (_, true) => format!("t^{i}"),
            (_, false) => format!("{mag}t^{i}"),
        };
        parts.push((sign, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (sign, body)) in parts.into_iter().enumerate() {
        match (k, sign) {
            (0, "-") => s.push('-'),
            (0, _) => {}
            (_, sg) => s.push_str(&format!(" {sg} ")),
        }
        s.push_str(&body);
    }
    s
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", poly_to_string(&self.num), poly_to_string(&self.den))
    }
}

/// `1 / det(I - tA)`.
pub fn zeta_rational(a: &SftMatrix) -> RationalFunction {
    let cp = a.to_int().char_poly();
    // det(I - tA) = t^n chi(1/t): reverse the characteristic polynomial
    let mut den: Vec<BigInt> = cp.into_iter().rev().collect();
    while den.len() > 1 && den.last().is_some_and(Zero::is_zero) {
        den.pop();
    }
    RationalFunction { num: vec![BigInt::one()], den }
}

/// `exp(sum_{n=1}^{order} tr(A^n) t^n / n)` truncated at `t^order`.
pub fn zeta_series(a: &SftMatrix, order: usize) -> PowerSeries {
    let m = a.to_int();
    let mut log = vec![BigRational::zero(); order + 1];
    let mut p = m.clone();
    for (n, slot) in log.iter_mut().enumerate().skip(1) {
        *slot = BigRational::new(p.trace(), BigInt::from(n));
        if n < order {
            p = p.mul(&m);
        }
    }
    PowerSeries::exp_of(&log)
}

/// `prod (1 - t^l)^{-1}` over the given orbit lengths, truncated at `t^order`.
/// `complete_through` is the largest length up to which the multiset is known
/// to contain every orbit.
pub fn orbit_product_series(
    lengths: &[usize],
    complete_through: usize,
    order: usize,
) -> Result<PowerSeries, ZetaError> {
    if complete_through < order {
        return Err(ZetaError::CutoffTooSmall { complete_through, order });
    }
    let mut f = vec![BigInt::zero(); order + 1];
    f[0] = BigInt::one();
    for &l in lengths {
        assert!(l > 0, "orbit lengths are positive");
        for n in l..=order {
            let v = f[n - l].clone();
            f[n] += v;
        }
    }
    Ok(PowerSeries::from_integers(&f))
}

/// Truncated polynomial in `t`.
type Poly = Vec<BigInt>;

/// `exp(sum_n (1/n) sum_{x in Per_n} t^{|c^n(x)|})` truncated at `t^order`,
/// where `c^n(x) = c(x) + c(σx) + .. + c(σ^{n-1}x)`.
///
/// Exact when `c` is sign-definite (every value `>= 1`, or every value
/// `<= -1`): then `|c^n| >= n` and only periods up to `order` contribute.
/// Mixed-sign weights are rejected; see [`weighted_zeta_series_with_cutoff`].
pub fn weighted_zeta_series(
    a: &SftMatrix,
    c: &WindowFunction,
    order: usize,
) -> Result<PowerSeries, ZetaError> {
    if matches!(c, WindowFunction::Table { .. }) && !a.is_zero_one() {
        return Err(SftError::NotZeroOne.into());
    }
    let values = c.values_on(a)?;
    let definite = values.iter().all(|&v| v >= 1) || values.iter().all(|&v| v <= -1);
    if !definite {
        return Err(ZetaError::WeightNotSignDefinite);
    }
    if let WindowFunction::Constant(k) = c {
        return Ok(scaled_zeta(a, k.unsigned_abs() as usize, order));
    }
    // weighted transfer matrix on the window-block presentation
    let blocks = admissible_words(a, c.width());
    let index: BTreeMap<&[Symbol], usize> =
        blocks.iter().enumerate().map(|(i, b)| (b.symbols(), i)).collect();
    let nb = blocks.len();
    let mut m: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nb];
    for (i, b) in blocks.iter().enumerate() {
        let w = c.value_on_block(b.symbols())?.unsigned_abs() as usize;
        let s = b.symbols();
        for sym in a.symbols() {
            if a.allows(*s.last().unwrap(), sym) {
                let mut next = s[1..].to_vec();
                next.push(sym);
                m[i].push((index[next.as_slice()], w));
            }
        }
    }
    let mut log = vec![BigRational::zero(); order + 1];
    // power[i][j] = entry (i, j) of M(t)^n as a truncated polynomial
    let mut power: Vec<Vec<Poly>> = (0..nb)
        .map(|i| {
            let mut row = vec![vec![BigInt::zero(); order + 1]; nb];
            row[i][0] = BigInt::one();
            row
        })
        .collect();
    for n in 1..=order {
        let mut next: Vec<Vec<Poly>> = vec![vec![vec![BigInt::zero(); order + 1]; nb]; nb];
        for (i, row) in power.iter().enumerate() {
            for (k, pk) in row.iter().enumerate() {
                if pk.iter().all(Zero::is_zero) {
                    continue;
                }
                for &(j, w) in &m[k] {
                    if w > order {
                        continue;
                    }
                    for d in 0..=order - w {
                        if !pk[d].is_zero() {
                            next[i][j][d + w] += &pk[d];
                        }
                    }
                }
            }
        }
        power = next;
        let mut tr = vec![BigInt::zero(); order + 1];
        for (i, row) in power.iter().enumerate() {
            for d in 0..=order {
                tr[d] += &row[i][d];
            }
        }
        for d in 0..=order {
            if !tr[d].is_zero() {
                log[d] += BigRational::new(tr[d].clone(), BigInt::from(n));
            }
        }
    }
    Ok(PowerSeries::exp_of(&log))
}

/// `ζ(t^k)` truncated at `t^order`.
fn scaled_zeta(a: &SftMatrix, k: usize, order: usize) -> PowerSeries {
    let base = zeta_series(a, order / k);
    let mut c = vec![BigRational::zero(); order + 1];
    for (i, v) in base.coeffs().iter().enumerate() {
        c[i * k] = v.clone();
    }
    PowerSeries::new(c)
}

/// Weighted zeta series using only periodic points of period `<= max_period`,
/// enumerated explicitly. Accepts mixed-sign weights; fails if any enumerated
/// periodic point has weight zero. The result is exact only when every periodic
/// point with `|c^n(x)| <= order` has period at most `max_period`.
pub fn weighted_zeta_series_with_cutoff(
    a: &SftMatrix,
    c: &WindowFunction,
    order: usize,
    max_period: usize,
) -> Result<PowerSeries, ZetaError> {
    let (lo, hi) = c.window();
    let mut log = vec![BigRational::zero(); order + 1];
    for n in 1..=max_period {
        for w in periodic_words(a, n)? {
            let s = w.symbols();
            let mut total: i64 = 0;
            for i in 0..n as i64 {
                let block: Vec<Symbol> =
                    (i + lo..=i + hi).map(|j| s[j.rem_euclid(n as i64) as usize]).collect();
                total += c.value_on_block(&block)?;
            }
            if total == 0 {
                return Err(ZetaError::ZeroWeightPeriodicPoint { word: w.clone(), period: n });
            }
            let q = total.unsigned_abs() as usize;
            if q <= order {
                log[q] += BigRational::new(BigInt::one(), BigInt::from(n));
            }
        }
    }
    Ok(PowerSeries::exp_of(&log))
}
