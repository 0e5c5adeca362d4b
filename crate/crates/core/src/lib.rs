//! Fuzzy dynamic assessment of Go games.

pub mod analysis;
pub mod assessment;
pub mod fml;
pub mod go;
pub mod pipeline;
pub mod summarizer;
mod scalar;

pub use scalar::Scalar;

pub type FuzzySystem = fml::FuzzySystem<f64>;
pub type FuzzyVariable = fml::FuzzyVariable<f64>;
pub type FuzzyRule = fml::FuzzyRule<f64>;
pub type InferenceResult = fml::InferenceResult<f64>;
