//! Experiment runner around `randskel`: CUR accuracy, sketch and pivoting
//! timings, canonical-angle bounds and the budget balance study.

pub mod config;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod output;
