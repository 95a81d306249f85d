//! Creature energetics toolkit.
//!
//! Forward pipeline: morphometric series, logistic growth fit, mass, metabolic
//! budget, ecological footprint. Backward pipeline: daily energy ledger of
//! flight, fire and other expenditure against food intake, with a
//! feasibility verdict in two computation modes.

pub mod dataset;
pub mod ecology;
pub mod energetics;
pub mod feasibility;
pub mod growth;
pub mod mesh;
pub mod mode;
pub mod pipeline;
pub mod quantities;
