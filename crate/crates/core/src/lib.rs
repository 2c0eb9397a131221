//! Root extraction in finite Abelian groups.
//!
//! Groups are given explicitly as products of cyclic prime-power factors, so
//! a basis and discrete logarithms come for free: an element is its
//! coordinate vector. Given `K` and multipliers `m_1..m_N`, the library
//! decides whether a basis `P_1..P_N` with `K = Σ m_i P_i` exists, builds one
//! when it does, and returns a typed certificate when it does not.
//!
//! ```
//! use rootex_core::{extract, ExtractionProblem, OpCounter, verify_solution};
//!
//! let prob = ExtractionProblem::from_u64s(&[(2, 1), (2, 3), (2, 4)], &[0, 2, 8], &[0, 6, 4])?;
//! let mut ops = OpCounter::new();
//! let outcome = extract(&prob, &mut ops)?;
//! assert!(verify_solution(&prob, outcome.solution().unwrap()));
//! # Ok::<(), rootex_core::Error>(())
//! ```

pub mod arith;
mod error;
pub mod extraction;
pub mod gen;
pub mod group;
pub mod ops;
pub mod oracle;

pub use error::{Error, Result};
pub use extraction::{
    check_existence, decide, decide_existence, extract, extract_detailed, extract_p_group, reduce,
    verify_basis, verify_solution, BasisCandidate, BlockReport, ExtractionOutcome,
    ExtractionProblem, ExtractionReport, NoSolution, NoSolutionReason, Reduction, ReductionState,
    TraceStep,
};
pub use group::{
    sylow_split, Element, GroupStructure, Multipliers, PrimePower, SylowBlock, Valuation,
};
pub use ops::OpCounter;
pub use oracle::{brute_force_extract, closure_size, enumerate_elements, EnumerationBudget};
