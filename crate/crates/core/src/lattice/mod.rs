//! Meets of projections: the squaring iteration, the closed form for two
//! translates of the trapezoid projection, and the meet along a path.

mod fiber;
mod interval;
mod meet;

pub use interval::IntervalSet;
pub use meet::{
    f0_one_set, f1_zero_set, intersect_translates, is_dominated, meet_along_path, meet_closed_form,
    meet_iterative, meet_pair_iterative, ClosedMeet, MeetReport, PathMeet, MAX_FIBER_SITES,
};
