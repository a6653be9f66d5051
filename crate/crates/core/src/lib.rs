//! STATIS multi-table analysis for interval-valued data.
//!
//! Tables of intervals `[lo, hi]` go through the usual STATIS steps
//! (interstructure, compromise, intrastructure) in Moore interval
//! arithmetic, with a centers PCA wherever a real eigendecomposition is
//! needed. [`pipeline::run`] is the entry point; [`classic::run_classic`] is
//! the real-valued counterpart and gives the same answers on degenerate
//! input.
//!
//! The `parallel` feature (on by default) runs the row-independent loops on
//! rayon. [`exec::Exec`] picks the strategy at run time; both give
//! bitwise identical results.

pub mod classic;
pub mod cli;
pub mod cpca;
pub mod eigen;
pub mod exec;
pub mod interval;
pub mod io;
pub mod matrix;
pub mod pipeline;
pub mod plot;
