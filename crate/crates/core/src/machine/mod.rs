//! Machine model: programs, configurations, and the transfinite run engine.

pub mod engine;
pub mod program;
pub mod tape;

pub use engine::{RunOptions, RunOutcome, RunReport, Runner};
pub use program::{Move, Program, ProgramError};
pub use tape::{SymbolicTape, TapeError, TapeTriple};
