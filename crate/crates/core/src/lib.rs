//! Niching particle swarm optimizers for multimodal minimization.
//!
//! The crate provides the classic global-best PSO, the electrostatic EPSO,
//! the fitness-Euclidean-distance-ratio FERPSO and LSEPSO (EPSO preceded by
//! an n-nearest-neighbor local search on the personal bests), five 2-D
//! multimodal benchmarks with oracle-built catalogs of their minima, and the
//! peak-counting metrics used to compare them.
//!
//! ```
//! use lsepso::{BenchmarkId, RngStream, SwarmConfig, optimizers::run_with};
//!
//! let problem = BenchmarkId::F1SixHumpCamel.problem();
//! let config = SwarmConfig { population: 30, iterations: 10, ..SwarmConfig::default() };
//! let swarm = run_with(&config, &problem, &mut RngStream::new(1), |_, _| {}).unwrap();
//! assert_eq!(swarm.len(), 30);
//! ```

pub mod benchmarks;
pub mod catalog;
pub mod error;
pub mod harness;
pub mod local_search;
pub mod metrics;
pub mod optimizers;
pub mod swarm;

pub use benchmarks::BenchmarkId;
pub use catalog::{build_catalog, default_catalog, OptimaCatalog, OptimumKind};
pub use error::{Error, Result};
pub use harness::{run_experiment, ExperimentSpec};
pub use local_search::{LocalSearchConfig, LsVariant};
pub use metrics::{ExperimentResult, MatchCriteria};
pub use swarm::{Algorithm, Bounds, Particle, Problem, RngStream, Swarm, SwarmConfig, UniformSource};
