//! Exact symbolic dynamics for two-sided topological Markov shifts: points and
//! the asymptotic groupoids, zeta functions, a symbolic Cuntz–Krieger tensor
//! calculus, K-theory of the asymptotic Ruelle algebra, and a checker for
//! asymptotic continuous orbit equivalence.
pub mod acoe;
pub mod battery;
pub mod ck;
pub mod groupoid;
pub mod ktheory;
pub mod linalg;
pub mod matrix;
pub mod perron;
pub mod sft;
pub mod snf;
pub mod window;
pub mod zeta;

pub use groupoid::{AElement, Direction, SUElement};
pub use matrix::{MatrixError, Mode, SftMatrix, Symbol};
pub use sft::{BiPoint, Orbit, SftError, SftSpace, Word};
