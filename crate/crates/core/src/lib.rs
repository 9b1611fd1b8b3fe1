//! Optimization problems with or-constraints: models, stationarity analysis,
//! smooth reformulations, relaxation homotopies and benchmarks.

pub mod analysis;
pub mod bench;
pub mod error;
pub mod homotopy;
pub mod linalg;
pub mod model;
pub mod ncp;
pub mod nlp;
pub mod profile;
pub mod reformulate;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Problem = model::MpocProblem<f64>;
pub type Function = model::SmoothFn<f64>;
pub type Run = homotopy::RunResult<f64>;
pub type Config = homotopy::HomotopyConfig<f64>;
pub type Certificate = analysis::StationarityCertificate<f64>;
