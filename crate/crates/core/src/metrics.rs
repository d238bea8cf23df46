//! Schedule evaluation (energy, throughput, efficiency) and the analytic
//! quantities that bound when concurrency saves energy: the per-flow energy
//! ratio bound, the CTA-count condition, and the interference-threshold
//! bound.

use crate::error::Result;
use crate::model::{interference_power, shannon_rate, signal_channel, tdma_ctas, Scenario};
use crate::params::SystemParams;
use crate::power::Schedule;

/// Which scheme produced a schedule; used for report labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Proposed,
    Tdma,
    Ctfp,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Tdma => "tdma",
            Scheme::Ctfp => "ctfp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Some(Scheme::Proposed),
            "tdma" => Some(Scheme::Tdma),
            "ctfp" => Some(Scheme::Ctfp),
            _ => None,
        }
    }
}

/// Per-flow evaluation results.
#[derive(Debug, Clone, Copy)]
pub struct PerFlowMetrics {
    pub flow: usize,
    /// Achieved throughput at the actual transmit powers, bit/s.
    pub throughput_bps: f64,
    pub power_w: f64,
    pub ctas: u32,
    pub shortfall: bool,
}

/// Evaluation of one scheme on one scenario.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub scheme: Scheme,
    pub total_energy_j: f64,
    pub network_throughput_bps: f64,
    /// Throughput divided by energy consumed per superframe, bit/s/J.
    pub energy_efficiency: f64,
    pub per_flow: Vec<PerFlowMetrics>,
}

/// Scheme-vs-baseline ratios.
#[derive(Debug, Clone, Copy)]
pub struct RatioReport {
    pub energy_ratio: f64,
    pub throughput_ratio: f64,
    pub baseline: Scheme,
}

/// Evaluate a complete schedule.
///
/// Energy charges each flow its assigned power for its pairing's CTAs.
/// Throughput recomputes every flow's rate with the actual controlled
/// powers of all co-pairing flows in the interference sum, so it reflects
/// what the receivers really see rather than the sizing assumption.
pub fn evaluate(schedule: &Schedule, scenario: &Scenario, scheme: Scheme) -> Result<MetricsReport> {
    let params = &schedule.params;
    let m = params.cta_count as f64;

    let mut per_flow: Vec<Option<PerFlowMetrics>> = vec![None; scenario.flows.len()];
    let mut total_energy = 0.0;
    let mut total_throughput = 0.0;

    for pairing in &schedule.pairings {
        let theta = pairing.theta;
        for &i in &pairing.flows {
            let a = &schedule.assignments[i];
            let mut interference = 0.0;
            for &j in &pairing.flows {
                if j != i {
                    let pj = schedule.assignments[j].power_w;
                    if pj > 0.0 {
                        interference += interference_power(j, i, scenario, params, pj)?;
                    }
                }
            }
            let signal = signal_channel(i, scenario, params)? * a.power_w;
            let rate = shannon_rate(signal, interference, params);
            let throughput = rate * theta as f64 / m;
            let energy = a.power_w * theta as f64 * params.cta_duration_s;
            total_energy += energy;
            total_throughput += throughput;
            per_flow[i] = Some(PerFlowMetrics {
                flow: i,
                throughput_bps: throughput,
                power_w: a.power_w,
                ctas: theta,
                shortfall: a.shortfall,
            });
        }
    }

    let per_flow: Vec<PerFlowMetrics> = per_flow.into_iter().flatten().collect();
    // bits per superframe over superframe duration, divided by joules per
    // superframe: bit/s/J
    let efficiency = if total_energy > 0.0 {
        total_throughput / total_energy
    } else {
        0.0
    };

    Ok(MetricsReport {
        scheme,
        total_energy_j: total_energy,
        network_throughput_bps: total_throughput,
        energy_efficiency: efficiency,
        per_flow,
    })
}

/// Ratios of a scheme report against a baseline report on the same scenario.
pub fn ratios(report: &MetricsReport, baseline: &MetricsReport) -> RatioReport {
    RatioReport {
        energy_ratio: report.total_energy_j / baseline.total_energy_j,
        throughput_ratio: report.network_throughput_bps / baseline.network_throughput_bps,
        baseline: baseline.scheme,
    }
}

/// Upper bound on the energy ratio of a flow given its pairing size and CTA
/// count, assuming every co-pairing interferer was admitted by the
/// threshold rule: the realized ratio stays below
/// `(2^(qM / (eta W theta)) - 1) * theta * (N0 W + (|V|-1) sigma Pt) / (Pr(i,i) * delta)`.
pub fn energy_ratio_bound(
    flow: usize,
    pairing_size: usize,
    theta: u32,
    scenario: &Scenario,
    params: &SystemParams,
) -> Result<f64> {
    assert!(theta >= 1);
    let q = scenario.flows[flow].demand_bps;
    let m = params.cta_count as f64;
    let delta = tdma_ctas(flow, scenario, params)? as f64;
    let pr_ii = signal_channel(flow, scenario, params)? * params.max_power_w;
    let x = 2f64.powf(q * m / (params.efficiency * params.bandwidth_hz * theta as f64)) - 1.0;
    let interference_cap =
        (pairing_size.saturating_sub(1)) as f64 * params.sigma * params.max_power_w;
    Ok(x * theta as f64 * (params.noise_power_w() + interference_cap) / (pr_ii * delta))
}

/// Largest integer CTA count for which handing a flow more airtime is
/// guaranteed to keep lowering its energy: strictly below
/// `q * M * ln 2 / (eta W)`.
pub fn theta_condition(demand_bps: f64, params: &SystemParams) -> u64 {
    let x = demand_bps * params.cta_count as f64 * std::f64::consts::LN_2
        / (params.efficiency * params.bandwidth_hz);
    let floor = x.floor();
    if floor == x {
        floor as u64 - 1
    } else {
        floor as u64
    }
}

/// Per-flow ceiling on the interference threshold below which concurrency
/// still reduces that flow's energy; returns the minimum over all flows in
/// multi-flow pairings, or +inf when every pairing is a singleton.
///
/// Negative values are returned as-is: they mark flows that cannot profit
/// from concurrency at any threshold.
pub fn sigma_bound(scenario: &Scenario, schedule: &Schedule) -> Result<f64> {
    let params = &schedule.params;
    let m = params.cta_count as f64;
    let mut bound = f64::INFINITY;
    for pairing in &schedule.pairings {
        let size = pairing.flows.len();
        if size < 2 {
            continue;
        }
        let co = (size - 1) as f64;
        for &i in &pairing.flows {
            let q = scenario.flows[i].demand_bps;
            let delta = tdma_ctas(i, scenario, params)? as f64;
            let pr_ii = signal_channel(i, scenario, params)? * params.max_power_w;
            let x = 2f64
                .powf(q * m / (params.efficiency * params.bandwidth_hz * pairing.theta as f64))
                - 1.0;
            let alpha = pr_ii * delta / (x * pairing.theta as f64 * params.max_power_w * co)
                - params.noise_power_w() / (params.max_power_w * co);
            bound = bound.min(alpha);
        }
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::tdma_schedule;
    use crate::model::{tdma_rate, Flow, Node, Point};
    use crate::power::{run_power_control, Schedule};
    use crate::scheduler::Pairing;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() <= tol
    }

    fn two_flow_scenario() -> (Scenario, SystemParams) {
        let scenario = Scenario::new(
            vec![
                Node {
                    id: 0,
                    pos: Point::new(0.0, 0.0),
                },
                Node {
                    id: 1,
                    pos: Point::new(20.0, 0.0),
                },
                Node {
                    id: 2,
                    pos: Point::new(5.0, 40.0),
                },
                Node {
                    id: 3,
                    pos: Point::new(28.0, 55.0),
                },
            ],
            vec![
                Flow {
                    sender: 0,
                    receiver: 1,
                    demand_bps: 2.0e9,
                },
                Flow {
                    sender: 2,
                    receiver: 3,
                    demand_bps: 2.5e9,
                },
            ],
            0,
        )
        .unwrap();
        (scenario, SystemParams::defaults())
    }

    #[test]
    fn tdma_evaluation_matches_closed_form() {
        let (mut s, p) = two_flow_scenario();
        for i in 0..2 {
            let r = tdma_rate(i, &s, &p).unwrap();
            s.flows[i].demand_bps = r * 0.1;
        }
        let sched = tdma_schedule(&s, &p).unwrap();
        let report = evaluate(&sched, &s, Scheme::Tdma).unwrap();

        let mut energy = 0.0;
        let mut tput = 0.0;
        for i in 0..2 {
            let delta = sched.pairings[i].theta as f64;
            energy += p.max_power_w * delta * p.cta_duration_s;
            tput += tdma_rate(i, &s, &p).unwrap() * delta / p.cta_count as f64;
        }
        assert!(close(report.total_energy_j, energy, 1e-12));
        assert!(close(report.network_throughput_bps, tput, 1e-12));
        assert!(close(report.energy_efficiency, tput / energy, 1e-12));
    }

    #[test]
    fn zero_power_flow_contributes_nothing() {
        let (s, p) = two_flow_scenario();
        let pairings = vec![
            Pairing {
                flows: vec![0],
                theta: 2500,
            },
            Pairing {
                flows: vec![1],
                theta: 2500,
            },
        ];
        let mut sched = run_power_control(pairings, &s, &p).unwrap();
        sched.assignments[0].power_w = 0.0;
        let report = evaluate(&sched, &s, Scheme::Proposed).unwrap();
        let f0 = &report.per_flow[0];
        assert_eq!(f0.throughput_bps, 0.0);
        let only_f1 = sched.assignments[1].power_w * sched.theta_of(1) as f64 * p.cta_duration_s;
        assert!(close(report.total_energy_j, only_f1, 1e-12));
    }

    #[test]
    fn evaluation_invariant_under_pairing_order() {
        let (s, p) = two_flow_scenario();
        let a =
            run_power_control(vec![Pairing::new(vec![0]), Pairing::new(vec![1])], &s, &p).unwrap();
        let mut b = a.clone();
        b.pairings.reverse();
        for asg in &mut b.assignments {
            asg.pairing = 1 - asg.pairing;
        }
        let ra = evaluate(&a, &s, Scheme::Proposed).unwrap();
        let rb = evaluate(&b, &s, Scheme::Proposed).unwrap();
        assert!(close(ra.total_energy_j, rb.total_energy_j, 1e-12));
        assert!(close(
            ra.network_throughput_bps,
            rb.network_throughput_bps,
            1e-12
        ));
    }

    #[test]
    fn achieved_rate_with_actual_powers_beats_assumed_rate() {
        // paired flows: actual interference is below the sizing assumption
        // because the peer also reduced power
        let (s, p) = two_flow_scenario();
        let sched = run_power_control(vec![Pairing::new(vec![0, 1])], &s, &p).unwrap();
        let report = evaluate(&sched, &s, Scheme::Proposed).unwrap();
        for (a, f) in sched.assignments.iter().zip(&report.per_flow) {
            assert!(!a.shortfall);
            let assumed_throughput =
                a.assumed_rate_bps * sched.theta_of(a.flow) as f64 / p.cta_count as f64;
            assert!(
                f.throughput_bps >= assumed_throughput * (1.0 - 1e-9),
                "flow {} achieved {} < assumed {}",
                a.flow,
                f.throughput_bps,
                assumed_throughput
            );
        }
    }

    #[test]
    fn energy_ratio_bound_reference_values() {
        let (s, p) = two_flow_scenario();
        let b0 = energy_ratio_bound(0, 2, 5000, &s, &p).unwrap();
        let b1 = energy_ratio_bound(1, 2, 5000, &s, &p).unwrap();
        assert!(close(b0, 0.0053633228626687275, 1e-9), "got {b0}");
        assert!(close(b1, 0.01146888720310551, 1e-9), "got {b1}");
    }

    #[test]
    fn energy_ratio_bound_singleton_drops_interference_term() {
        let (s, mut p) = two_flow_scenario();
        p.sigma = 123.0; // arbitrary: must not matter for singletons
        let with_sigma = energy_ratio_bound(0, 1, 2500, &s, &p).unwrap();
        p.sigma = 0.0;
        let without = energy_ratio_bound(0, 1, 2500, &s, &p).unwrap();
        assert_eq!(with_sigma, without);
    }

    #[test]
    fn energy_ratio_bound_decreases_with_theta_in_condition_region() {
        let (s, p) = two_flow_scenario();
        let cap = theta_condition(s.flows[0].demand_bps, &p);
        assert!(cap > 5000, "test premise: whole superframe inside region");
        let lo = energy_ratio_bound(0, 2, 2000, &s, &p).unwrap();
        let hi = energy_ratio_bound(0, 2, 4000, &s, &p).unwrap();
        assert!(hi < lo);
    }

    #[test]
    fn theta_condition_reference_value() {
        let mut p = SystemParams::defaults();
        p.efficiency = 0.5;
        p.cta_count = 5000;
        assert_eq!(theta_condition(2e9, &p), 6418);
    }

    #[test]
    fn theta_condition_linear_in_demand() {
        let mut p = SystemParams::defaults();
        p.efficiency = 0.5;
        let one = theta_condition(2e9, &p);
        let two = theta_condition(4e9, &p);
        assert!((two as i64 - 2 * one as i64).abs() <= 1);
    }

    #[test]
    fn theta_condition_strict_at_integer_boundary() {
        // pick demand so the bound lands exactly on an integer
        let mut p = SystemParams::defaults();
        p.efficiency = 0.5;
        let x = 6418.0;
        let demand =
            x * p.efficiency * p.bandwidth_hz / (p.cta_count as f64 * std::f64::consts::LN_2);
        let exact =
            demand * p.cta_count as f64 * std::f64::consts::LN_2 / (p.efficiency * p.bandwidth_hz);
        if exact == x {
            assert_eq!(theta_condition(demand, &p), 6417);
        } else {
            // floating point did not land exactly; the floor still applies
            assert_eq!(theta_condition(demand, &p), exact.floor() as u64);
        }
    }

    #[test]
    fn sigma_bound_singletons_is_unbounded() {
        let (s, p) = two_flow_scenario();
        let sched =
            run_power_control(vec![Pairing::new(vec![0]), Pairing::new(vec![1])], &s, &p).unwrap();
        assert_eq!(sigma_bound(&s, &sched).unwrap(), f64::INFINITY);
    }

    #[test]
    fn sigma_bound_reference_value_two_flow_pairing() {
        let (s, p) = two_flow_scenario();
        let mut sched = run_power_control(vec![Pairing::new(vec![0, 1])], &s, &p).unwrap();
        sched.pairings[0].theta = 5000;
        let bound = sigma_bound(&s, &sched).unwrap();
        // min of the two per-flow ceilings
        assert!(close(bound, 8.719982917394575e-9, 1e-9), "got {bound}");
    }

    #[test]
    fn sigma_bound_decreases_with_demand() {
        let (mut s, p) = two_flow_scenario();
        let sched = run_power_control(vec![Pairing::new(vec![0, 1])], &s, &p).unwrap();
        let base = sigma_bound(&s, &sched).unwrap();
        s.flows[0].demand_bps *= 1.5;
        s.flows[1].demand_bps *= 1.5;
        let sched2 = Schedule {
            pairings: sched.pairings.clone(),
            assignments: sched.assignments.clone(),
            params: sched.params.clone(),
        };
        let tighter = sigma_bound(&s, &sched2).unwrap();
        assert!(tighter < base);
    }
}
