//! Preferential-attachment hypergraphs with vertex deactivation: simulation,
//! limiting theory and empirical analysis.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cardinality;
pub mod histogram;
pub mod params;
pub mod process;
pub mod sampler;
pub mod theory;

pub use cardinality::{CardinalityError, CardinalityLaw, EmpiricalLaw};
pub use histogram::{ClassCounts, DegreeHistogram};
pub use params::{ParamError, Probabilities};
pub use process::{ModelParams, ProcessError, RunTrace, TraceRow};
pub use sampler::{DegreeIndex, SamplerError, VertexId};
pub use theory::{CutoffParams, TheoryError, TheoryParams};
