//! Comparison schemes: serial TDMA and concurrent transmission at fixed
//! maximum power (CTFP).

use crate::contention::ContentionGraph;
use crate::error::{Error, Result};
use crate::model::{tdma_ctas, tdma_rate, Scenario};
use crate::params::SystemParams;
use crate::power::{run_power_control, FlowAssignment, Schedule};
use crate::scheduler::{schedule, Pairing};

/// Serial TDMA: one singleton pairing per flow, each holding exactly the
/// flow's CTA demand at maximum power. Leftover CTAs stay idle.
pub fn tdma_schedule(scenario: &Scenario, params: &SystemParams) -> Result<Schedule> {
    let n = scenario.flows.len();
    if n as u64 > params.cta_count as u64 {
        return Err(Error::InfeasibleScenario {
            required: n as u64,
            available: params.cta_count,
        });
    }
    let mut deltas = Vec::with_capacity(n);
    for flow in 0..n {
        deltas.push(tdma_ctas(flow, scenario, params)?);
    }
    let required: u64 = deltas.iter().map(|&d| d as u64).sum();
    if required > params.cta_count as u64 {
        return Err(Error::InfeasibleScenario {
            required,
            available: params.cta_count,
        });
    }

    let mut pairings = Vec::with_capacity(n);
    let mut assignments = Vec::with_capacity(n);
    for (flow, &delta) in deltas.iter().enumerate() {
        let rate = tdma_rate(flow, scenario, params)?;
        pairings.push(Pairing {
            flows: vec![flow],
            theta: delta,
        });
        assignments.push(FlowAssignment {
            flow,
            pairing: flow,
            power_w: params.max_power_w,
            shortfall: false,
            rate_no_control_bps: rate,
            assumed_rate_bps: rate,
        });
    }
    Ok(Schedule {
        pairings,
        assignments,
        params: params.clone(),
    })
}

/// CTFP derived from an already power-controlled schedule: identical
/// pairings and CTA counts, every power pinned back to Pt.
///
/// A flow is marked short exactly when the donor schedule marked it short:
/// the donor clamps precisely when the flow's demand exceeds what its
/// pairing sustains at maximum power, which is also when CTFP misses it.
pub fn ctfp_from(proposed: &Schedule) -> Schedule {
    let mut out = proposed.clone();
    for a in &mut out.assignments {
        a.power_w = out.params.max_power_w;
        a.assumed_rate_bps = a.rate_no_control_bps;
    }
    out
}

/// CTFP from scratch: run the scheduler and power control, then pin powers.
pub fn ctfp_schedule(
    scenario: &Scenario,
    params: &SystemParams,
    graph: &ContentionGraph,
) -> Result<Schedule> {
    let proposed = run_power_control(schedule(graph), scenario, params)?;
    Ok(ctfp_from(&proposed))
}
