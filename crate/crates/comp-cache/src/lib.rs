//! Cluster-centric cache-enabled small-cell network analysis.
//!
//! Small base stations (SBSs) drawn from a Poisson point process are grouped
//! into hexagonal clusters and cooperate to serve a cluster-center user. Each
//! SBS splits its cache between the most popular content (MPC, replicated at
//! every SBS and delivered by coherent joint transmission) and disjoint
//! partitions of less popular content (LCD, delivered by parallel streams).
//! The crate provides:
//!
//! - Zipf popularity and the combined MPC/LCD placement model with exact and
//!   continuous-approximation hit/miss probabilities ([`popularity`]);
//! - stochastic-geometry kernels: cluster-size pmf, in-cluster distance
//!   distributions, and the Laplace transform of out-of-cluster PPP
//!   interference ([`field`]);
//! - successful-content-delivery probability (SCDP) estimators for joint
//!   transmission (JT), parallel transmission with SIC spectrum sharing
//!   (PT-SS), and orthogonal sub-bands (PT-OS) ([`scdp`]);
//! - a ground-truth physical-layer Monte Carlo simulator with exact SIR and
//!   SIC chains ([`sim`]);
//! - cache-split optimizers for the cache service probability and the energy
//!   efficiency objectives ([`optimizer`]);
//! - experiment orchestration with CSV/JSON emission behind the `comp-cache`
//!   CLI ([`config`], [`experiment`]).
//!
//! All estimators are deterministic given a seed: Monte Carlo work is split
//! into fixed-size blocks keyed by counter-based RNG streams, so results are
//! bit-identical under any degree of parallelism.
//!
//! # Example
//!
//! ```
//! use comp_cache::popularity::cache_hit_prob;
//! use comp_cache::scdp::scdp_jt;
//! use comp_cache::{CachePlan, ClusterGeometry, McConfig, PathlossModel, SirTargets, ZipfPopularity};
//!
//! // 40% of each SBS cache replicated as MPC in a 3-SBS cluster
//! let pop = ZipfPopularity::new(100_000, 0.5)?;
//! let plan = CachePlan::new(0.4, 5000, 3)?;
//! let hit = cache_hit_prob(&pop, &plan);
//! assert!(hit > 0.3 && hit < 0.5);
//!
//! // delivery probability of joint transmission at a 10 Mbit/s target
//! let geom = ClusterGeometry::new(100.0, 1e-4)?;
//! let model = PathlossModel::new(4.0)?;
//! let targets = SirTargets::new(1e7, 1e7, 3, 0.95)?;
//! let jt = scdp_jt(&geom, &model, 3, targets.theta1(), McConfig::new(5_000, 7)?)?;
//! assert!(jt.value > 0.5 && jt.std_error < 0.01);
//! # Ok::<(), comp_cache::Error>(())
//! ```

// negated comparisons at domain boundaries (`!(x > 0.0)`) also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod field;
pub mod gof;
pub mod mc;
pub mod optimizer;
pub mod popularity;
pub mod quad;
pub mod scdp;
pub mod sim;

pub use config::SystemConfig;
pub use error::{Error, Result};
pub use field::{ClusterGeometry, PathlossModel};
pub use optimizer::{OptimizationResult, PowerModel};
pub use popularity::{CachePlan, ZipfPopularity};
pub use scdp::{McConfig, Method, ScdpEstimate, Scheme, SirTargets};
pub use sim::{ClusterMode, NetworkRealization, SimProtocol};
