//! The classically driven flow on `A_θ` and its heat semigroup.

mod path;
mod semigroup;

pub use path::{path_rng, sample_path, BrownianPath};
pub use semigroup::{
    flow_apply, heat_semigroup_exact, is_symmetric_generator, vacuum_expectation_mc, CoefficientStats, McReport,
    SemigroupSpec,
};
