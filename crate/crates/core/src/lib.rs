pub mod angles;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod operator;
pub mod parallel;
pub mod rangefinder;
pub mod rng;
pub mod sketch;
pub mod skeleton;
pub mod testmat;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use operator::LinearOperator;
