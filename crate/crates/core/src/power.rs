//! Power control: assigns each pairing its share of the superframe and each
//! flow the lowest transmit power that still meets its serial-TDMA
//! throughput.
//!
//! Two passes. The first computes, per pairing, the real-valued CTA
//! requirement of its most demanding member at maximum power. The second
//! splits the M CTAs proportionally across pairings (floor everywhere, the
//! final pairing takes the remainder) and inverts the Shannon rate for each
//! flow's power, assuming co-pairing interferers stay at maximum power.

use crate::error::{Error, Result};
use crate::model::{interference_power, shannon_rate, signal_channel, Scenario};
use crate::params::SystemParams;
use crate::scheduler::Pairing;

/// Per-flow outcome of power control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowAssignment {
    /// Flow index.
    pub flow: usize,
    /// Index of the pairing this flow transmits in.
    pub pairing: usize,
    /// Assigned transmit power in watts (clamped to Pt).
    pub power_w: f64,
    /// True when the unclamped power requirement exceeded Pt, so the
    /// throughput target is not guaranteed.
    pub shortfall: bool,
    /// Rate without power control: own power Pt, co-pairing interference
    /// at Pt. Diagnostic.
    pub rate_no_control_bps: f64,
    /// Assumed (lowest sufficient) rate the power was sized for. Diagnostic.
    pub assumed_rate_bps: f64,
}

/// A complete schedule: pairings with their CTA counts plus per-flow powers,
/// along with the parameter snapshot it was computed under.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub pairings: Vec<Pairing>,
    /// Indexed by flow.
    pub assignments: Vec<FlowAssignment>,
    pub params: SystemParams,
}

impl Schedule {
    /// CTA count of the pairing that carries `flow`.
    pub fn theta_of(&self, flow: usize) -> u32 {
        self.pairings[self.assignments[flow].pairing].theta
    }

    /// Total CTAs assigned across pairings.
    pub fn total_ctas(&self) -> u64 {
        self.pairings.iter().map(|p| p.theta as u64).sum()
    }

    /// Number of flows whose power was clamped.
    pub fn shortfall_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.shortfall).count()
    }
}

/// Sum of interference powers at `flow`'s receiver from its co-pairing
/// members, everyone transmitting at maximum power.
fn pairing_interference_at_max(
    flow: usize,
    members: &[usize],
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<f64> {
    let mut total = 0.0;
    for &j in members {
        if j != flow {
            total += interference_power(j, flow, scenario, params, params.max_power_w)?;
        }
    }
    Ok(total)
}

/// Rate of `flow` inside a pairing when nobody reduces power.
pub fn rate_no_control(
    flow: usize,
    members: &[usize],
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<f64> {
    let signal = signal_channel(flow, scenario, params)? * params.max_power_w;
    let interference = pairing_interference_at_max(flow, members, scenario, params)?;
    Ok(shannon_rate(signal, interference, params))
}

/// Real-valued CTA requirement of `flow` in its pairing: the slots needed at
/// the no-control rate to carry the flow's demand for a whole superframe.
pub fn ctas_needed(
    flow: usize,
    members: &[usize],
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<f64> {
    let rate = rate_no_control(flow, members, scenario, params)?;
    if rate <= 0.0 {
        return Err(Error::StarvedFlow { flow });
    }
    Ok(scenario.flows[flow].demand_bps * params.cta_count as f64 / rate)
}

/// Split M CTAs across pairings proportionally to their requirements:
/// floor for every pairing except the last, which takes the remainder.
pub fn apportion_ctas(requirements: &[f64], cta_count: u32) -> Result<Vec<u32>> {
    assert!(!requirements.is_empty(), "no pairings to apportion");
    let total: f64 = requirements.iter().sum();
    let m = cta_count as f64;
    let mut thetas = Vec::with_capacity(requirements.len());
    let mut assigned: u64 = 0;
    for (k, &t) in requirements.iter().enumerate() {
        let theta = if k + 1 == requirements.len() {
            cta_count as u64 - assigned
        } else {
            let th = (t / total * m).floor() as u64;
            assigned += th;
            th
        };
        if theta == 0 {
            return Err(Error::DegeneratePairing { pairing: k });
        }
        thetas.push(theta as u32);
    }
    Ok(thetas)
}

/// Transmit power for `flow` given its pairing and CTA count: size the rate
/// to `q * M / theta` against co-pairing interference at maximum power,
/// clamping at Pt.
///
/// Returns `(power_w, shortfall, assumed_rate_bps)`.
pub fn flow_power(
    flow: usize,
    members: &[usize],
    theta: u32,
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<(f64, bool, f64)> {
    assert!(theta >= 1, "pairing must own at least one CTA");
    let assumed_rate = scenario.flows[flow].demand_bps * params.cta_count as f64 / theta as f64;
    let interference = pairing_interference_at_max(flow, members, scenario, params)?;
    let channel = signal_channel(flow, scenario, params)?;
    let snr_needed = 2f64.powf(assumed_rate / (params.efficiency * params.bandwidth_hz)) - 1.0;
    let power = snr_needed * (params.noise_power_w() + interference) / channel;
    if power > params.max_power_w {
        Ok((params.max_power_w, true, assumed_rate))
    } else {
        Ok((power, false, assumed_rate))
    }
}

/// Run both passes over scheduler output and produce the filled schedule.
pub fn run_power_control(
    pairings: Vec<Pairing>,
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<Schedule> {
    assert!(!pairings.is_empty(), "scheduler produced no pairings");

    // pass 1: per-pairing requirement = max member requirement
    let mut requirements = Vec::with_capacity(pairings.len());
    let mut no_control = vec![0.0; scenario.flows.len()];
    for pairing in &pairings {
        let mut t_max = 0.0f64;
        for &i in &pairing.flows {
            no_control[i] = rate_no_control(i, &pairing.flows, scenario, params)?;
            let t = ctas_needed(i, &pairing.flows, scenario, params)?;
            t_max = t_max.max(t);
        }
        requirements.push(t_max);
    }

    // pass 2: CTA split, then per-flow powers
    let thetas = apportion_ctas(&requirements, params.cta_count)?;
    let mut pairings = pairings;
    for (p, &theta) in pairings.iter_mut().zip(&thetas) {
        p.theta = theta;
    }

    let mut assignments = vec![None; scenario.flows.len()];
    for (k, pairing) in pairings.iter().enumerate() {
        for &i in &pairing.flows {
            let (power_w, shortfall, assumed) =
                flow_power(i, &pairing.flows, pairing.theta, scenario, params)?;
            assignments[i] = Some(FlowAssignment {
                flow: i,
                pairing: k,
                power_w,
                shortfall,
                rate_no_control_bps: no_control[i],
                assumed_rate_bps: assumed,
            });
        }
    }
    let assignments = assignments
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            a.ok_or_else(|| Error::InvalidInput(format!("flow {i} missing from pairings")))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Schedule {
        pairings,
        assignments,
        params: params.clone(),
    })
}
