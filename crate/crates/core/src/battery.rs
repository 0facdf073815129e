//! Invariant battery for pairs of matrices and a conservative distinguisher.
//!
//! Only invariants of the asymptotic Ruelle algebra (its K-groups and the
//! values of its trace) may separate two shifts. Zeta functions and
//! Bowen–Franks groups are reported as evidence but never decide.

use serde::{Deserialize, Serialize};

use crate::ktheory::{bowen_franks, prime_factors};
use crate::matrix::SftMatrix;
use crate::perron::perron_data;
use crate::zeta::{zeta_rational, zeta_series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// Reserved: zeta functions are not invariants without a witness.
    ZetaMismatchNotApplicable,
    /// Full shifts whose sizes have different prime divisors.
    TracePrimes,
    /// Trace values rational on one side and not on the other.
    PerronIntegrality,
    /// Reserved: the Bowen–Franks group of `O_A` is not certified invariant here.
    BowenFranks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Distinguished { reason: Reason },
    Inconclusive,
}

/// Per-matrix values computed by the battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEvidence {
    pub matrix: SftMatrix,
    pub full_shift_size: Option<u64>,
    /// Prime divisors of `N` for a full `N`-shift.
    pub trace_primes: Option<Vec<u64>>,
    pub perron_value: f64,
    pub perron_is_integer: bool,
    pub primitive: bool,
    /// `det(tI - A)`, low degree first.
    pub char_poly: Vec<String>,
    pub bowen_franks: String,
    pub zeta: String,
    pub zeta_series: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub outcome: Outcome,
    pub evidence: [MatrixEvidence; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistinguishConfig {
    pub zeta_order: usize,
}

impl Default for DistinguishConfig {
    fn default() -> Self {
        DistinguishConfig { zeta_order: 12 }
    }
}

pub fn evidence(a: &SftMatrix, config: &DistinguishConfig) -> MatrixEvidence {
    let p = perron_data(a);
    let full = a.full_shift_size();
    MatrixEvidence {
        matrix: a.clone(),
        full_shift_size: full,
        trace_primes: full.map(prime_factors),
        perron_value: p.lambda,
        perron_is_integer: p.lambda_is_integer,
        primitive: a.is_primitive(),
        char_poly: p.char_poly.iter().map(ToString::to_string).collect(),
        bowen_franks: bowen_franks(a).to_string(),
        zeta: zeta_rational(a).to_string(),
        zeta_series: zeta_series(a, config.zeta_order).coeffs().iter().map(ToString::to_string).collect(),
    }
}

/// Decides from evidence alone, so a verdict can be replayed from its JSON.
pub fn decide(x: &MatrixEvidence, y: &MatrixEvidence) -> Outcome {
    if let (Some(p), Some(q)) = (&x.trace_primes, &y.trace_primes) {
        return if p == q {
            Outcome::Inconclusive
        } else {
            Outcome::Distinguished { reason: Reason::TracePrimes }
        };
    }
    if x.primitive && y.primitive && x.perron_is_integer != y.perron_is_integer {
        return Outcome::Distinguished { reason: Reason::PerronIntegrality };
    }
    Outcome::Inconclusive
}

pub fn distinguish(a: &SftMatrix, b: &SftMatrix, config: &DistinguishConfig) -> Verdict {
    let (x, y) = std::thread::scope(|s| {
        let hx = s.spawn(|| evidence(a, config));
        let ey = evidence(b, config);
        (hx.join().expect("evidence thread panicked"), ey)
    });
    Verdict { outcome: decide(&x, &y), evidence: [x, y] }
}
