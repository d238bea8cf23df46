//! Physical-layer model: geometry, antenna gains, received power, Shannon
//! rates, and the serial-TDMA CTA demand of each flow.
//!
//! Every function here is pure and operates on immutable inputs.

use crate::error::{Error, Result};
use crate::params::{AntennaPattern, SystemParams};
use crate::units::db_to_linear;

/// A point in the 2-D deployment plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A base station in the backhaul network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: u32,
    pub pos: Point,
}

/// A backhaul traffic flow from one node to another with a throughput demand.
///
/// Flows are identified by their index within the owning [`Scenario`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub sender: u32,
    pub receiver: u32,
    /// Requested throughput q in bits per second.
    pub demand_bps: f64,
}

/// One problem instance: node placement plus the flow set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub nodes: Vec<Node>,
    pub flows: Vec<Flow>,
    /// Seed that produced this scenario (0 for hand-built fixtures).
    pub seed: u64,
}

impl Scenario {
    pub fn new(nodes: Vec<Node>, flows: Vec<Flow>, seed: u64) -> Result<Self> {
        let s = Self { nodes, flows, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.flows.is_empty() {
            return Err(Error::InvalidInput("scenario has no flows".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id as usize != i {
                return Err(Error::InvalidInput(format!(
                    "node ids must equal their index: node {} at position {i}",
                    n.id
                )));
            }
        }
        for (i, f) in self.flows.iter().enumerate() {
            if f.sender == f.receiver {
                return Err(Error::InvalidInput(format!(
                    "flow {i} has sender == receiver"
                )));
            }
            if f.sender as usize >= self.nodes.len() || f.receiver as usize >= self.nodes.len() {
                return Err(Error::InvalidInput(format!(
                    "flow {i} references a missing node"
                )));
            }
            if !f.demand_bps.is_finite() || f.demand_bps <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "flow {i} demand must be positive"
                )));
            }
        }
        Ok(())
    }

    pub fn position(&self, node: u32) -> Point {
        self.nodes[node as usize].pos
    }

    /// Sender-to-receiver link length of a flow, meters.
    pub fn link_length(&self, flow: usize) -> f64 {
        let f = &self.flows[flow];
        self.position(f.sender).distance(&self.position(f.receiver))
    }
}

/// Angle at `at` between the directions toward `a` and toward `b`,
/// in degrees within [0, 180].
///
/// Errors when either direction is undefined because the points coincide.
pub fn offset_angle_deg(at: Point, a: Point, b: Point, at_id: u32, other_id: u32) -> Result<f64> {
    let v1 = (a.x - at.x, a.y - at.y);
    let v2 = (b.x - at.x, b.y - at.y);
    let n1 = v1.0.hypot(v1.1);
    let n2 = v2.0.hypot(v2.1);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::DegenerateGeometry {
            a: at_id,
            b: other_id,
        });
    }
    let cos = ((v1.0 * v2.0 + v1.1 * v2.1) / (n1 * n2)).clamp(-1.0, 1.0);
    Ok(cos.acos().to_degrees())
}

/// Directional gain in dB at `offset_deg` degrees off boresight.
///
/// Gaussian main lobe `G0 - 3.01 (2 theta / bw)^2` out to half the main lobe
/// width, constant side lobe beyond it.
pub fn antenna_gain_db(offset_deg: f64, pattern: &AntennaPattern) -> Result<f64> {
    if !(0.0..=180.0).contains(&offset_deg) {
        return Err(Error::AngleOutOfRange {
            angle_deg: offset_deg,
        });
    }
    if offset_deg <= pattern.main_lobe_deg / 2.0 {
        let x = 2.0 * offset_deg / pattern.beamwidth_deg;
        Ok(pattern.peak_gain_db - 3.01 * x * x)
    } else {
        Ok(pattern.side_lobe_db)
    }
}

/// Directional gain as a linear ratio at `offset_deg` degrees off boresight.
pub fn antenna_gain(offset_deg: f64, pattern: &AntennaPattern) -> Result<f64> {
    Ok(db_to_linear(antenna_gain_db(offset_deg, pattern)?))
}

/// Linear gains on the interference path from `tx_flow` to `rx_flow`:
/// the transmit gain of `tx_flow`'s sender toward `rx_flow`'s receiver and
/// the receive gain of `rx_flow`'s receiver toward `tx_flow`'s sender.
///
/// Each antenna is boresighted at its own flow's peer, so
/// `gain_between(i, i)` is the peak gain on both ends.
pub fn gain_between(
    tx_flow: usize,
    rx_flow: usize,
    scenario: &Scenario,
    pattern: &AntennaPattern,
) -> Result<(f64, f64)> {
    let peak = db_to_linear(pattern.peak_gain_db);
    if tx_flow == rx_flow {
        return Ok((peak, peak));
    }
    let tx = &scenario.flows[tx_flow];
    let rx = &scenario.flows[rx_flow];

    let s_tx = scenario.position(tx.sender);
    let r_tx = scenario.position(tx.receiver);
    let s_rx = scenario.position(rx.sender);
    let r_rx = scenario.position(rx.receiver);

    let tx_offset = offset_angle_deg(s_tx, r_tx, r_rx, tx.sender, rx.receiver)?;
    let rx_offset = offset_angle_deg(r_rx, s_rx, s_tx, rx.receiver, tx.sender)?;
    Ok((
        antenna_gain(tx_offset, pattern)?,
        antenna_gain(rx_offset, pattern)?,
    ))
}

/// Received power over a direct path: `k0 * gt * gr * d^-n * tx_power`.
pub fn received_power(
    tx_power_w: f64,
    gt: f64,
    gr: f64,
    distance_m: f64,
    params: &SystemParams,
) -> Result<f64> {
    if !distance_m.is_finite() || distance_m <= 0.0 {
        return Err(Error::NonPositiveDistance { distance_m });
    }
    Ok(params.k0() * gt * gr * distance_m.powf(-params.pathloss_exp) * tx_power_w)
}

/// Signal-path channel gain of a flow (received watts per transmitted watt):
/// `k0 * G0^2 * l^-n` with both antennas on boresight.
pub fn signal_channel(flow: usize, scenario: &Scenario, params: &SystemParams) -> Result<f64> {
    let l = scenario.link_length(flow);
    if !l.is_finite() || l <= 0.0 {
        let f = &scenario.flows[flow];
        return Err(Error::DegenerateGeometry {
            a: f.sender,
            b: f.receiver,
        });
    }
    let peak = db_to_linear(params.antenna().peak_gain_db);
    Ok(params.k0() * peak * peak * l.powf(-params.pathloss_exp))
}

/// Interference power received by `rx_flow` from `tx_flow` transmitting at
/// `tx_power_w`, scaled by the multi-user interference factor.
pub fn interference_power(
    tx_flow: usize,
    rx_flow: usize,
    scenario: &Scenario,
    params: &SystemParams,
    tx_power_w: f64,
) -> Result<f64> {
    let tx = &scenario.flows[tx_flow];
    let rx = &scenario.flows[rx_flow];
    let l = scenario
        .position(tx.sender)
        .distance(&scenario.position(rx.receiver));
    if l == 0.0 {
        return Err(Error::DegenerateGeometry {
            a: tx.sender,
            b: rx.receiver,
        });
    }
    let (gt, gr) = gain_between(tx_flow, rx_flow, scenario, &params.antenna())?;
    Ok(params.mui_factor * params.k0() * gt * gr * l.powf(-params.pathloss_exp) * tx_power_w)
}

/// Shannon rate in bits per second: `eta * W * log2(1 + S / (N0 W + I))`.
pub fn shannon_rate(signal_w: f64, interference_w: f64, params: &SystemParams) -> f64 {
    params.efficiency
        * params.bandwidth_hz
        * (1.0 + signal_w / (params.noise_power_w() + interference_w)).log2()
}

/// Interference-free rate of a flow at maximum power.
pub fn tdma_rate(flow: usize, scenario: &Scenario, params: &SystemParams) -> Result<f64> {
    let chan = signal_channel(flow, scenario, params)?;
    Ok(shannon_rate(chan * params.max_power_w, 0.0, params))
}

/// Ceiling with a hair of relative slack so that requirements sitting on an
/// integer boundary up to floating-point noise do not get rounded up a slot.
pub(crate) fn ceil_with_slack(x: f64) -> f64 {
    (x * (1.0 - 1e-12)).ceil()
}

/// CTAs a flow needs under serial TDMA to meet its demand:
/// the smallest integer delta with `R * delta / M >= q`.
pub fn tdma_ctas(flow: usize, scenario: &Scenario, params: &SystemParams) -> Result<u32> {
    let rate = tdma_rate(flow, scenario, params)?;
    if rate <= 0.0 {
        return Err(Error::StarvedFlow { flow });
    }
    let needed = scenario.flows[flow].demand_bps * params.cta_count as f64 / rate;
    let delta = ceil_with_slack(needed).max(1.0);
    if delta > params.cta_count as f64 {
        return Err(Error::InfeasibleDemand {
            flow,
            needed: delta as u32,
            available: params.cta_count,
        });
    }
    Ok(delta as u32)
}
