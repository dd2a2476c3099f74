//! Exact normal-fan computations for finitely generated credal sets.

pub mod chains2mono;
pub mod cones;
pub mod credal;
pub mod exactla;
pub mod fanwalk;
pub mod io;
pub mod polytope;
pub mod pri;
pub mod sample;
pub mod simplex;
