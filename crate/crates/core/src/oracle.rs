//! Exhaustive reference solver for tiny instances, plus an independent
//! feasibility checker.
//!
//! The solver enumerates every set-partition of the flows into pairings
//! (canonically ordered by smallest member), discards partitions that break
//! contention-graph independence, and for each remaining partition tries
//! every CTA split of at most M slots with at least one slot per pairing.
//! Powers follow the same per-flow rule as the power-control algorithm
//! (co-pairing interferers assumed at maximum power, clamped at Pt);
//! throughput feasibility is judged at the actual powers. The minimum-energy
//! feasible configuration wins, ties broken by the partition/CTA encoding.

use std::fmt;

use crate::contention::{build_graph, ContentionGraph};
use crate::error::{Error, Result};
use crate::model::{interference_power, shannon_rate, signal_channel, Scenario};
use crate::params::SystemParams;
use crate::power::{FlowAssignment, Schedule};
use crate::scheduler::Pairing;

/// Search-space guard for [`solve_exact`].
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_flows: usize,
    pub max_ctas: u32,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_flows: 5,
            max_ctas: 24,
        }
    }
}

/// Outcome of the exhaustive search.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    pub energy_j: f64,
    pub schedule: Schedule,
    /// Number of (partition, CTA split) candidates enumerated.
    pub candidates: u64,
}

/// All set-partitions of `{0, .., n-1}` as restricted growth strings, with
/// blocks ordered by their smallest member.
pub fn enumerate_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().copied().max().unwrap() + 1;
        let mut partition = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            partition[b].push(i);
        }
        out.push(partition);

        // next restricted growth string
        let mut i = n as isize - 1;
        loop {
            if i <= 0 {
                return out;
            }
            let max_prefix = rgs[..i as usize].iter().copied().max().unwrap();
            if rgs[i as usize] <= max_prefix {
                break;
            }
            i -= 1;
        }
        rgs[i as usize] += 1;
        for r in rgs[i as usize + 1..].iter_mut() {
            *r = 0;
        }
    }
}

fn partition_independent(partition: &[Vec<usize>], graph: &ContentionGraph) -> bool {
    partition.iter().all(|block| {
        block
            .iter()
            .enumerate()
            .all(|(a, &i)| block[a + 1..].iter().all(|&j| !graph.has_edge(i, j)))
    })
}

/// Per-(block, theta) evaluation: powers by the usual sizing rule, energy,
/// and throughput feasibility at the actual powers.
struct BlockTable {
    /// Indexed by theta - 1; `None` when some member cannot meet its demand.
    entries: Vec<Option<(f64, Vec<f64>)>>,
}

fn block_table(
    block: &[usize],
    scenario: &Scenario,
    params: &SystemParams,
    max_ctas: u32,
) -> Result<BlockTable> {
    let m = params.cta_count as f64;
    let noise = params.noise_power_w();
    let channels: Vec<f64> = block
        .iter()
        .map(|&i| signal_channel(i, scenario, params))
        .collect::<Result<_>>()?;
    let mut assumed_interference = vec![0.0; block.len()];
    let mut cross = vec![vec![0.0; block.len()]; block.len()];
    for (bi, &i) in block.iter().enumerate() {
        for (bj, &j) in block.iter().enumerate() {
            if bi != bj {
                // per-watt interference channel from j's sender into i's receiver
                let per_watt = interference_power(j, i, scenario, params, 1.0)?;
                cross[bi][bj] = per_watt;
                assumed_interference[bi] += per_watt * params.max_power_w;
            }
        }
    }

    let mut entries = Vec::with_capacity(max_ctas as usize);
    for theta in 1..=max_ctas {
        let mut powers = Vec::with_capacity(block.len());
        for (bi, &i) in block.iter().enumerate() {
            let assumed_rate = scenario.flows[i].demand_bps * m / theta as f64;
            let snr_needed =
                2f64.powf(assumed_rate / (params.efficiency * params.bandwidth_hz)) - 1.0;
            let p = snr_needed * (noise + assumed_interference[bi]) / channels[bi];
            powers.push(p.min(params.max_power_w));
        }
        let mut feasible = true;
        let mut energy = 0.0;
        for (bi, &i) in block.iter().enumerate() {
            let actual_interference: f64 = (0..block.len())
                .filter(|&bj| bj != bi)
                .map(|bj| cross[bi][bj] * powers[bj])
                .sum();
            let rate = shannon_rate(channels[bi] * powers[bi], actual_interference, params);
            if rate * theta as f64 / m < scenario.flows[i].demand_bps * (1.0 - 1e-9) {
                feasible = false;
                break;
            }
            energy += powers[bi] * theta as f64 * params.cta_duration_s;
        }
        entries.push(if feasible {
            Some((energy, powers))
        } else {
            None
        });
    }
    Ok(BlockTable { entries })
}

struct SearchState {
    best_energy: f64,
    best_encoding: Vec<u32>,
    best_thetas: Vec<u32>,
    best_partition: usize,
    candidates: u64,
}

#[allow(clippy::too_many_arguments)]
fn search_thetas(
    tables: &[BlockTable],
    k: usize,
    used: u32,
    max_ctas: u32,
    energy_so_far: Option<f64>,
    thetas: &mut Vec<u32>,
    partition_idx: usize,
    state: &mut SearchState,
) {
    if k == tables.len() {
        state.candidates += 1;
        if let Some(e) = energy_so_far {
            // total order: energy, then canonical partition order, then the
            // CTA split itself
            let better = e < state.best_energy
                || (e == state.best_energy
                    && (partition_idx, &thetas[..])
                        < (state.best_partition, &state.best_encoding[..]));
            if better {
                state.best_energy = e;
                state.best_encoding = thetas.clone();
                state.best_thetas = thetas.clone();
                state.best_partition = partition_idx;
            }
        }
        return;
    }
    let blocks_after = (tables.len() - k - 1) as u32;
    let max_here = max_ctas - used - blocks_after;
    for theta in 1..=max_here {
        let entry = &tables[k].entries[theta as usize - 1];
        let next_energy = match (energy_so_far, entry) {
            (Some(e), Some((de, _))) => Some(e + de),
            _ => None,
        };
        thetas.push(theta);
        search_thetas(
            tables,
            k + 1,
            used + theta,
            max_ctas,
            next_energy,
            thetas,
            partition_idx,
            state,
        );
        thetas.pop();
    }
}

/// Exhaustively solve a tiny instance for its minimum-energy schedule.
///
/// Fails with a guard error on instances beyond `limits`, and with an
/// infeasibility report naming the binding constraint of each candidate
/// partition when nothing satisfies every demand.
pub fn solve_exact(
    scenario: &Scenario,
    params: &SystemParams,
    limits: OracleLimits,
) -> Result<ExactSolution> {
    let n = scenario.flows.len();
    if n > limits.max_flows {
        return Err(Error::OracleGuard {
            detail: format!("{n} flows exceed the limit of {}", limits.max_flows),
        });
    }
    if params.cta_count > limits.max_ctas {
        return Err(Error::OracleGuard {
            detail: format!(
                "{} CTAs exceed the limit of {}",
                params.cta_count, limits.max_ctas
            ),
        });
    }

    let graph = build_graph(scenario, params)?;
    let partitions = enumerate_partitions(n);

    let mut state = SearchState {
        best_energy: f64::INFINITY,
        best_encoding: Vec::new(),
        best_thetas: Vec::new(),
        best_partition: usize::MAX,
        candidates: 0,
    };
    let mut rejections: Vec<String> = Vec::new();

    for (pi, partition) in partitions.iter().enumerate() {
        if !partition_independent(partition, &graph) {
            rejections.push(format!(
                "partition {partition:?}: contention edge inside a pairing"
            ));
            continue;
        }
        if (partition.len() as u32) > params.cta_count {
            rejections.push(format!("partition {partition:?}: more pairings than CTAs"));
            continue;
        }
        let tables: Vec<BlockTable> = partition
            .iter()
            .map(|block| block_table(block, scenario, params, params.cta_count))
            .collect::<Result<_>>()?;
        let before = state.best_energy;
        let mut thetas = Vec::new();
        search_thetas(
            &tables,
            0,
            0,
            params.cta_count,
            Some(0.0),
            &mut thetas,
            pi,
            &mut state,
        );
        if state.best_energy == before && state.best_partition != pi && before.is_infinite() {
            rejections.push(format!(
                "partition {partition:?}: no CTA split meets every demand"
            ));
        }
    }

    if state.best_partition == usize::MAX {
        return Err(Error::NoFeasibleConfiguration {
            detail: rejections.join("; "),
        });
    }

    // rebuild the winning schedule
    let partition = &partitions[state.best_partition];
    let mut pairings = Vec::with_capacity(partition.len());
    let mut assignments: Vec<Option<FlowAssignment>> = vec![None; n];
    for (k, block) in partition.iter().enumerate() {
        let theta = state.best_thetas[k];
        let table = block_table(block, scenario, params, params.cta_count)?;
        let (_, powers) = table.entries[theta as usize - 1]
            .as_ref()
            .expect("winning entry is feasible")
            .clone();
        pairings.push(Pairing {
            flows: block.clone(),
            theta,
        });
        for (bi, &i) in block.iter().enumerate() {
            let no_control = crate::power::rate_no_control(i, block, scenario, params)?;
            assignments[i] = Some(FlowAssignment {
                flow: i,
                pairing: k,
                power_w: powers[bi],
                shortfall: false,
                rate_no_control_bps: no_control,
                assumed_rate_bps: scenario.flows[i].demand_bps * params.cta_count as f64
                    / theta as f64,
            });
        }
    }
    let assignments = assignments.into_iter().map(|a| a.unwrap()).collect();

    Ok(ExactSolution {
        energy_j: state.best_energy,
        schedule: Schedule {
            pairings,
            assignments,
            params: params.clone(),
        },
        candidates: state.candidates,
    })
}

/// One violated constraint found by [`check_feasible`].
#[derive(Debug, Clone)]
pub enum Violation {
    /// A flow appears in no pairing or in more than one.
    OnePairingPerFlow { flow: usize, appearances: usize },
    /// Assigned CTAs exceed the superframe.
    CtaBudget { assigned: u64, available: u32 },
    /// Two flows sharing a pairing contend in the graph.
    Independence { i: usize, j: usize, pairing: usize },
    /// Achieved throughput at actual powers below the demand.
    Throughput {
        flow: usize,
        achieved_bps: f64,
        demand_bps: f64,
    },
    /// A flow was flagged short by power control.
    ShortfallFlag { flow: usize },
    /// Transmit power above the maximum.
    PowerCeiling {
        flow: usize,
        power_w: f64,
        max_w: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OnePairingPerFlow { flow, appearances } => {
                write!(f, "flow {flow} appears in {appearances} pairings")
            }
            Violation::CtaBudget {
                assigned,
                available,
            } => {
                write!(f, "{assigned} CTAs assigned but only {available} available")
            }
            Violation::Independence { i, j, pairing } => {
                write!(f, "flows {i} and {j} contend inside pairing {pairing}")
            }
            Violation::Throughput {
                flow,
                achieved_bps,
                demand_bps,
            } => {
                write!(
                    f,
                    "flow {flow} achieves {achieved_bps:.3e} < demand {demand_bps:.3e} bit/s"
                )
            }
            Violation::ShortfallFlag { flow } => {
                write!(f, "flow {flow} carries a shortfall flag")
            }
            Violation::PowerCeiling {
                flow,
                power_w,
                max_w,
            } => {
                write!(
                    f,
                    "flow {flow} transmits {power_w:.3e} W > Pt {max_w:.3e} W"
                )
            }
        }
    }
}

/// Result of independently re-verifying a schedule against the constraint
/// system.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-verify a complete schedule from scratch: one pairing per flow, CTA
/// budget, pairing independence, per-flow throughput at the actual powers,
/// and the power ceiling. Shortfall-flagged flows fail the throughput
/// constraint explicitly.
pub fn check_feasible(
    schedule: &Schedule,
    scenario: &Scenario,
    graph: &ContentionGraph,
) -> Result<FeasibilityReport> {
    let params = &schedule.params;
    let n = scenario.flows.len();
    let mut violations = Vec::new();

    let mut appearances = vec![0usize; n];
    for pairing in &schedule.pairings {
        for &i in &pairing.flows {
            appearances[i] += 1;
        }
    }
    for (flow, &count) in appearances.iter().enumerate() {
        if count != 1 {
            violations.push(Violation::OnePairingPerFlow {
                flow,
                appearances: count,
            });
        }
    }

    let assigned = schedule.total_ctas();
    if assigned > params.cta_count as u64 {
        violations.push(Violation::CtaBudget {
            assigned,
            available: params.cta_count,
        });
    }

    for (k, pairing) in schedule.pairings.iter().enumerate() {
        for (a, &i) in pairing.flows.iter().enumerate() {
            for &j in &pairing.flows[a + 1..] {
                if graph.has_edge(i, j) {
                    violations.push(Violation::Independence { i, j, pairing: k });
                }
            }
        }
    }

    for pairing in &schedule.pairings {
        for &i in &pairing.flows {
            let a = &schedule.assignments[i];
            if a.power_w > params.max_power_w * (1.0 + 1e-12) {
                violations.push(Violation::PowerCeiling {
                    flow: i,
                    power_w: a.power_w,
                    max_w: params.max_power_w,
                });
            }
            if a.shortfall {
                violations.push(Violation::ShortfallFlag { flow: i });
                continue;
            }
            let mut interference = 0.0;
            for &j in &pairing.flows {
                if j != i {
                    let pj = schedule.assignments[j].power_w;
                    if pj > 0.0 {
                        interference += interference_power(j, i, scenario, params, pj)?;
                    }
                }
            }
            let rate = shannon_rate(
                signal_channel(i, scenario, params)? * a.power_w,
                interference,
                params,
            );
            let achieved = rate * pairing.theta as f64 / params.cta_count as f64;
            let demand = scenario.flows[i].demand_bps;
            if achieved < demand * (1.0 - 1e-9) {
                violations.push(Violation::Throughput {
                    flow: i,
                    achieved_bps: achieved,
                    demand_bps: demand,
                });
            }
        }
    }

    Ok(FeasibilityReport { violations })
}
