//! Benchmark model generation: reaction-network CTMCs with population caps,
//! the workstation cluster, seeded fixtures and matrix ingestion.

pub mod catalog;
pub mod cluster;
pub mod explore;
pub mod fixtures;
pub mod reaction;

pub use catalog::{
    builtin, builtin_with_limit, ingest, MatrixKind, Model, ModelDescriptor, ModelMatrix,
};
pub use explore::{ExploredChain, StateSpace, DEFAULT_STATE_LIMIT};
pub use fixtures::{lumpable_test_chain, random_distribution, random_stochastic, LumpableChain};
pub use reaction::{
    build_generator, enumerate_state_space, enumerate_state_space_with_limit, Reaction,
    ReactionNetwork, SparseReaction,
};
