//! Test support shared by the workspace: the fixture corpus, a Python 3
//! runner for generated programs, an event-replay oracle and seeded random
//! generators for models, programs and syntax trees.

pub mod fixtures;
pub mod fuzz;
pub mod gen;
pub mod python;
pub mod replay;

pub use fixtures::{fixtures_dir, Fixture, RunSpec};
