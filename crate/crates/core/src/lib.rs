//! Deterministic simulator and scheduling library for energy-efficient
//! mmWave backhaul of densely deployed small cells.
//!
//! The library models directional mmWave links between fixed base stations
//! that share a TDMA superframe of M channel-time-allocation (CTA) slots.
//! Spatial reuse is organized in three steps:
//!
//! 1. [`contention::build_graph`] turns pairwise interference and the
//!    half-duplex constraint into a contention graph over flows.
//! 2. [`scheduler::schedule`] partitions the flows into pairings (groups of
//!    concurrent transmissions) by iterated minimum-degree greedy
//!    maximum-independent-set extraction.
//! 3. [`power::run_power_control`] splits the superframe across pairings
//!    and lowers each flow's transmit power to the minimum that still meets
//!    its serial-TDMA throughput.
//!
//! [`baselines`] provides the serial-TDMA and fixed-maximum-power (CTFP)
//! comparison schemes, [`metrics`] evaluates schedules and the analytic
//! energy-reduction conditions, [`oracle`] solves tiny instances exactly by
//! exhaustive search, and [`experiment`] drives seeded multi-trial
//! comparisons with CSV output.
//!
//! ```
//! use backhaul_sim::baselines::tdma_schedule;
//! use backhaul_sim::contention::build_graph;
//! use backhaul_sim::experiment::{generate_scenario, ExperimentConfig};
//! use backhaul_sim::metrics::{evaluate, ratios, Scheme};
//! use backhaul_sim::power::run_power_control;
//! use backhaul_sim::scheduler::schedule;
//!
//! let cfg = ExperimentConfig::default();
//! let point = cfg.resolve(None)?;
//! let scenario = generate_scenario(&point, cfg.base_seed, 0)?;
//!
//! let graph = build_graph(&scenario, &point.params)?;
//! let proposed = run_power_control(schedule(&graph), &scenario, &point.params)?;
//! let tdma = tdma_schedule(&scenario, &point.params)?;
//!
//! let a = evaluate(&proposed, &scenario, Scheme::Proposed)?;
//! let b = evaluate(&tdma, &scenario, Scheme::Tdma)?;
//! assert!(ratios(&a, &b).energy_ratio < 1.0);
//! # Ok::<(), backhaul_sim::Error>(())
//! ```

pub mod baselines;
pub mod contention;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod params;
pub mod power;
pub mod scheduler;
pub mod units;

pub use error::{Error, Result};
pub use model::{Flow, Node, Point, Scenario};
pub use params::{AntennaPattern, SystemParams};
