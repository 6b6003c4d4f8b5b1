//! Recursive four-colouring of plane near-triangulations from colour lists,
//! with a brute-force oracle, small-instance generators and an exhaustive
//! harness.

pub mod engine;
pub mod enumerate;
pub mod graph;
pub mod lists;
pub mod oracle;
