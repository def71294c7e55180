//! Structure learning for sparse Gaussian graphical models by active
//! marginalization: sample small groups of variables at a time, find each
//! vertex's neighborhood with a doubling search, and stop sampling a vertex
//! once it and its neighbors are resolved.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` case.

pub mod combinatorics;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod scalar;

pub use engine::{
    mb_passive, run_meta, AdPaCT, Algorithm, Ampl, Candidate, EngineConfig, NeighborhoodRule, RecoveredGraph,
    RunStatus, StageContext, TruthRule,
};
pub use error::{Error, Result};
pub use graph::{degree_stats, hamming_distance, DegreeStats, Graph};
pub use linalg::Matrix;
pub use model::GaussianModel;
pub use sampler::{sufficient_budget, SampleBatch, SamplingLedger, SamplingOracle, TraceRow};
pub use scalar::Scalar;

pub type MatrixF64 = linalg::Matrix<f64>;
pub type MatrixF32 = linalg::Matrix<f32>;
pub type GaussianModelF64 = model::GaussianModel<f64>;
pub type GaussianModelF32 = model::GaussianModel<f32>;
pub type EmpiricalCovF64 = estimators::EmpiricalCov<f64>;
pub type SampleBatchF64 = sampler::SampleBatch<f64>;
pub type AdPaCTF64 = engine::AdPaCT<f64>;
pub type AmplF64 = engine::Ampl<f64>;
