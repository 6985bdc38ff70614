//! Matrix products over semirings — (max,min), existence dominance, distance
//! most-significant bits, sparse Boolean — where the quantum search
//! subroutines are classically simulated and every operation is charged to a
//! model-cost ledger.
//!
//! The crate is organized bottom-up:
//! - [`matrix`]: extended-integer and bit-packed Boolean matrices;
//! - [`qsim`]: simulated quantum enumeration/extremum with exact charges;
//! - [`exponents`]: rectangular matrix multiplication exponent calculus and
//!   parameter selection;
//! - [`dominance`]: the generalized existence dominance product, the core
//!   subroutine everything else reduces to;
//! - [`maxmin`]: leftslice, the (max,min) product and all-pairs bottleneck
//!   paths;
//! - [`distmsb`]: most-significant bits of the distance product;
//! - [`boolsparse`]: output-insensitive sparse Boolean multiplication.

pub mod boolsparse;
pub mod distmsb;
pub mod dominance;
pub mod exponents;
pub mod matrix;
pub mod maxmin;
pub mod qsim;

pub use matrix::{BlockGrid, BoolMatrix, ExtInt, ExtMatrix};
pub use qsim::{ledger_report, CostLedger, LedgerReport, PhaseCost};

/// Which engine executes searchable subproblems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Simulated quantum search with square-root model charges.
    QuantumSim,
    /// The same algorithm with linear scans charged classically.
    Classical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("arithmetic overflow or undefined extended sum")]
    Overflow,
    #[error("blocks in a grid must share dimensions")]
    NonuniformBlocks,
    #[error("parameter out of range: {0}")]
    ParamRange(String),
    #[error("bisection bracket does not change sign: {0}")]
    NoBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
