//! Perron eigenvalue and eigenvectors of irreducible nonnegative matrices.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::eval_poly;
use crate::matrix::SftMatrix;

pub const PERRON_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub lambda: f64,
    /// Left eigenvector `u A = lambda u`, entries summing to 1.
    pub u: Vec<f64>,
    /// Right eigenvector `A v = lambda v`, entries summing to 1.
    pub v: Vec<f64>,
    /// `det(tI - A)`, low degree first.
    pub char_poly: Vec<BigInt>,
    pub lambda_is_integer: bool,
    /// Residual `|chi(lambda)| / |chi'(lambda)|` after refinement.
    pub residual: f64,
}

fn f64_of(b: &BigInt) -> f64 {
    b.to_f64().unwrap_or(f64::INFINITY)
}

fn eval_f64(coeffs: &[BigInt], x: f64) -> (f64, f64) {
    // value and derivative by Horner
    let mut p = 0.0;
    let mut dp = 0.0;
    for c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + f64_of(c);
    }
    (p, dp)
}

/// Normalized eigenvector of `A + I` (same Perron vector, primitive even when
/// `A` is only irreducible).
fn power_iterate(a: &SftMatrix, transpose: bool) -> Vec<f64> {
    let n = a.n();
    let entry = |i: usize, j: usize| {
        let e = if transpose { a.entry(j, i) } else { a.entry(i, j) };
        e as f64 + if i == j { 1.0 } else { 0.0 }
    };
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..200_000 {
        let mut y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| entry(i, j) * x[j]).sum()).collect();
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        let delta = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        x = y;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

pub fn perron_data(a: &SftMatrix) -> PerronData {
    let n = a.n();
    let char_poly = a.to_int().char_poly();
    let v = power_iterate(a, false);
    let u = power_iterate(a, true);
    // Rayleigh-type quotient from the right vector, then Newton on chi
    let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a.entry(i, j) as f64 * v[j]).sum()).collect();
    let mut lambda = av.iter().sum::<f64>() / v.iter().sum::<f64>();
    for _ in 0..50 {
        let (p, dp) = eval_f64(&char_poly, lambda);
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        lambda -= step;
        if step.abs() < 1e-15 * lambda.abs().max(1.0) {
            break;
        }
    }
    let (p, dp) = eval_f64(&char_poly, lambda);
    let residual = if dp == 0.0 { p.abs() } else { (p / dp).abs() };
    let r = lambda.round();
    let lambda_is_integer = (lambda - r).abs() < 1e-6
        && r.is_finite()
        && eval_poly(&char_poly, &BigInt::from(r as i64)).is_zero();
    if lambda_is_integer {
        lambda = r;
    }
    PerronData { lambda, u, v, char_poly, lambda_is_integer, residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_is_integral() {
        for n in 2..=5 {
            let p = perron_data(&SftMatrix::full_shift(n).unwrap());
            assert_eq!(p.lambda, n as f64);
            assert!(p.lambda_is_integer);
            for x in p.u.iter().chain(&p.v) {
                assert!((x - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn golden_mean() {
        let b = SftMatrix::zero_one(&[&[1, 1], &[1, 0]]).unwrap();
        let p = perron_data(&b);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.lambda - phi).abs() < PERRON_TOL);
        assert!(!p.lambda_is_integer);
        assert_eq!(p.char_poly, [-1, -1, 1].map(BigInt::from).to_vec());
        assert!(p.residual < PERRON_TOL);
        // A v = lambda v
        assert!((p.v[0] + p.v[1] - phi * p.v[0]).abs() < 1e-10);
    }

    #[test]
    fn imprimitive_matrix_converges() {
        let a = SftMatrix::zero_one(&[&[0, 1, 1], &[1, 0, 0], &[1, 0, 0]]).unwrap();
        let p = perron_data(&a);
        assert!((p.lambda - 2f64.sqrt()).abs() < PERRON_TOL);
    }
}
