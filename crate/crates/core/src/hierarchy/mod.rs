//! Tracial moment relaxations bounding the witness over the quantum set,
//! the pure-state quantum set and (with commuting operators) the classical
//! set, for a given bound on the guessing probability.

mod certify;
mod filter;
mod problem;
mod solve;
mod word;

pub use certify::{certify_info, CertifyOptions, Evaluation, InfoBracket, InfoCertificate};
pub use filter::{level_basis, symbols, Filter};
pub use problem::{build_moment_problem, HierarchyConfig, MomentBlock, MomentProblem};
pub use solve::{
    classical_bound, solve_randomness_bound, solve_upper_bound, upper_bound, HierarchyResult, RandomnessResult,
    DEFAULT_PIN_TOL,
};
pub use word::{canonicalize, trace_class, Mode, Poly, Sym, Word};
