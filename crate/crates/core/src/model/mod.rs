mod behavior;
mod info;
mod polytope;
mod prior;
mod scenario;
mod witness;

pub use behavior::{behavior_from_csv, Behavior, BehaviorRecord, Entry, ExactBehavior, DEFAULT_TOL};
pub use info::{bits_to_guess_exact, guess_to_info, info_to_guess, InfoBound};
pub(crate) use polytope::next_assignment;
pub use polytope::{check_polytope_g, min_polytope_g, Violation};
pub use prior::Prior;
pub use scenario::Scenario;
pub use witness::{CorrelatorForm, Witness, WitnessRecord};
