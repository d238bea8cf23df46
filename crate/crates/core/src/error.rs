//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Antenna offset angle outside the valid [0, 180] degree range.
    #[error("offset angle {angle_deg} deg outside [0, 180]")]
    AngleOutOfRange { angle_deg: f64 },

    /// Two nodes that must be distinct occupy the same position.
    #[error("degenerate geometry: nodes {a} and {b} coincide")]
    DegenerateGeometry { a: u32, b: u32 },

    /// A link distance or other length that must be positive is not.
    #[error("distance must be positive, got {distance_m} m")]
    NonPositiveDistance { distance_m: f64 },

    /// A single flow needs more CTAs than the whole superframe provides.
    #[error(
        "flow {flow} needs {needed} CTAs under serial TDMA but the superframe has only {available}"
    )]
    InfeasibleDemand {
        flow: usize,
        needed: u32,
        available: u32,
    },

    /// The flow set as a whole cannot be served by serial TDMA.
    #[error("serial TDMA infeasible: {required} CTAs required, {available} available")]
    InfeasibleScenario { required: u64, available: u32 },

    /// A flow's rate without power control is zero; it can never meet its demand.
    #[error("flow {flow} is starved: zero rate at maximum power under pairing interference")]
    StarvedFlow { flow: usize },

    /// Proportional CTA apportionment floored a pairing to zero slots.
    #[error("degenerate pairing {pairing}: apportionment assigned zero CTAs")]
    DegeneratePairing { pairing: usize },

    /// Scenario generation kept drawing TDMA-infeasible instances.
    #[error("scenario generation failed after {attempts} attempts: {detail}")]
    ScenarioGeneration { attempts: u32, detail: String },

    /// Parameter or scenario validation failure.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Exhaustive solver guard: instance larger than the supported search space.
    #[error("oracle instance too large: {detail}")]
    OracleGuard { detail: String },

    /// Exhaustive solver found no feasible configuration.
    #[error("no feasible configuration: {detail}")]
    NoFeasibleConfiguration { detail: String },

    /// Experiment configuration file problem.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
