//! Shared fixtures and instance generators for the integration tests.
#![allow(dead_code)] // not every test target uses every helper

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use backhaul_sim::model::{tdma_rate, Flow, Node, Point, Scenario};
use backhaul_sim::params::SystemParams;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if b == 0.0 {
        a.abs() <= tol
    } else {
        ((a - b) / b).abs() <= tol
    }
}

/// Golden five-node regression scenario: 6 flows over a 20-CTA superframe
/// in a 10 x 10 m square with negligible cross-link interference.
///
/// Demands are tuned so that serial TDMA allocates (3, 4, 4, 3, 2, 4) slots
/// and the reference grouping gets (6, 7, 7) after power control, cutting
/// total energy by about 48.6% against TDMA.
pub struct GoldenFixture {
    pub scenario: Scenario,
    pub params: SystemParams,
    /// The reference concurrent grouping evaluated by the regression.
    pub pairings: [[usize; 2]; 3],
    pub expected_deltas: [u32; 6],
    pub expected_thetas: [u32; 3],
    pub expected_tdma_energy_j: f64,
    pub expected_scheme_energy_j: f64,
}

pub fn golden_fixture() -> GoldenFixture {
    let params = SystemParams::new(
        2.16e9, -134.0, 2.0, -42.4, 0.0, 18e-6, 20, 30.0, 1e-10, 0.5, 60e9,
    )
    .unwrap();
    let nodes = vec![
        Node {
            id: 0,
            pos: Point::new(0.0, 0.0),
        }, // A
        Node {
            id: 1,
            pos: Point::new(5.0, 0.0),
        }, // B
        Node {
            id: 2,
            pos: Point::new(0.0, 5.0),
        }, // C
        Node {
            id: 3,
            pos: Point::new(5.0, 5.0),
        }, // D
        Node {
            id: 4,
            pos: Point::new(9.0, 2.0),
        }, // E
    ];
    let demands = [
        453240059.74184895,
        532947794.38610524,
        669900129.9849663,
        453240059.74184895,
        296950383.96879756,
        413166519.8189945,
    ];
    let endpoints = [(0, 1), (2, 3), (1, 4), (2, 0), (3, 4), (2, 1)];
    let flows = endpoints
        .iter()
        .zip(demands)
        .map(|(&(s, r), q)| Flow {
            sender: s,
            receiver: r,
            demand_bps: q,
        })
        .collect();
    let scenario = Scenario::new(nodes, flows, 0).unwrap();
    GoldenFixture {
        scenario,
        params,
        pairings: [[0, 1], [2, 3], [4, 5]],
        expected_deltas: [3, 4, 4, 3, 2, 4],
        expected_thetas: [6, 7, 7],
        expected_tdma_energy_j: 2.0715837744137642e-11,
        expected_scheme_energy_j: 1.0642972838446853e-11,
    }
}

/// A random desk-scale instance guaranteed serial-TDMA feasible: demands are
/// drawn as target slot counts within the superframe budget and converted to
/// bit rates through each flow's own interference-free rate.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    max_flows: usize,
    cta_counts: &[u32],
    area_side: f64,
) -> (Scenario, SystemParams) {
    let mut params = SystemParams::defaults();
    params.cta_count = cta_counts[rng.gen_range(0..cta_counts.len())];
    params.sigma = [1e-11, 1e-10, 1e-9][rng.gen_range(0..3)];

    let n_flows = rng.gen_range(2..=max_flows);
    let n_nodes = rng.gen_range((n_flows.min(4))..=10).max(3) as u32;

    loop {
        let nodes: Vec<Node> = (0..n_nodes)
            .map(|id| Node {
                id,
                pos: Point::new(rng.gen::<f64>() * area_side, rng.gen::<f64>() * area_side),
            })
            .collect();
        let mut flows: Vec<Flow> = Vec::new();
        let mut seen = Vec::new();
        let mut guard = 0;
        while flows.len() < n_flows && guard < 1000 {
            guard += 1;
            let s = rng.gen_range(0..n_nodes);
            let r = rng.gen_range(0..n_nodes);
            if s == r || seen.contains(&(s, r)) {
                continue;
            }
            // duplicate positions would make links degenerate
            if nodes[s as usize].pos == nodes[r as usize].pos {
                continue;
            }
            seen.push((s, r));
            flows.push(Flow {
                sender: s,
                receiver: r,
                demand_bps: 1.0,
            });
        }
        if flows.len() < n_flows {
            continue;
        }
        let mut scenario = Scenario::new(nodes, flows, 0).unwrap();
        // target slot counts: at least 1, comfortably inside the budget
        let budget = 0.8 * params.cta_count as f64 / n_flows as f64;
        let mut ok = true;
        for i in 0..n_flows {
            let target = 1.0 + (budget - 1.0).max(0.1) * rng.gen::<f64>();
            match tdma_rate(i, &scenario, &params) {
                Ok(rate) => {
                    scenario.flows[i].demand_bps = target * rate / params.cta_count as f64;
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return (scenario, params);
        }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
