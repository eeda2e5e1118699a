//! Generalized quadrangles with an ovoid, designs with a non-triangular local
//! resolution system, and the maps between them.

pub mod canon;
pub mod correspondence;
pub mod field;
pub mod geometry;
pub mod search;
pub mod sprott;
pub mod structures;
