//! Exact computations for degenerations of polarized Hodge structures:
//! monodromy weight filtrations, nilpotent-orbit tests, cone fans and their
//! refinements, weight-lowering reductions, and toric blow-up plans.

pub mod cones;
pub mod exact;
pub mod fan;
pub mod fixtures;
pub mod hodge;
pub mod logmod;
pub mod reduce;
pub mod sample;
