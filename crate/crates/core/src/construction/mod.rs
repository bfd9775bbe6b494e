//! Defining sequences of Cantor sets: systems, per-level profiles and
//! materialized refinement levels.

mod profile;
mod refine;
mod system;

pub use profile::{LevelProfile, Profiles};
pub use refine::{split_bridge, Bridge, Gap, Location, RefinementLevel, DEFAULT_BRIDGE_CAP};
pub use system::{example2_system, fluctuating_family, CantorSystem, SequenceSpec};
