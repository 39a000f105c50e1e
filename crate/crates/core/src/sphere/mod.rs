//! Ramification of rational maps on punctured spheres.

mod allocation;
mod bounds;
mod mobius;
mod ramification;
mod report;
mod suite;

pub use allocation::{case_of, classify_allocation, point_label, AllocationCase, AllocationPattern};
pub use bounds::{check_bounds, fiber_branching_floor, s_bound, BoundCheck, BoundReport};
pub use mobius::{canonical_phi, cross_ratio, mobius_apply, same_point, MoebiusMap};
pub use ramification::{fiber, multiplicity_at, ramification_profile, BranchPoint, RamificationProfile};
pub(crate) use report::ser_ratio;
pub use report::{
    tr_report, FiberPoint, OmittedValue, PuncturedSphere, RamifiedValue, TotallyRamifiedReport, VALUE_TOL,
};
pub use suite::{bound_suite, sample_map, SuiteReport, SuiteSample};
