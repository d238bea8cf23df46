//! Experiment orchestration: seeded scenario generation, scheme comparison
//! over many trials, parameter sweeps, and deterministic CSV output.
//!
//! Reproducibility contract: scenarios are drawn from ChaCha8 keyed by the
//! base seed, with one stream per (trial, purpose) — purpose 0 draws node
//! positions, 1 draws flow endpoints, 2 draws demands. Re-running the same
//! configuration reproduces the same CSV bytes.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{ctfp_from, tdma_schedule};
use crate::contention::build_graph;
use crate::error::{Error, Result};
use crate::metrics::{evaluate, ratios, MetricsReport, Scheme};
use crate::model::{tdma_ctas, Flow, Node, Point, Scenario};
use crate::params::SystemParams;
use crate::power::{run_power_control, Schedule};
use crate::scheduler::schedule as mis_schedule;
use crate::units::dbm_to_watts;

/// Streams reserved per trial; purposes index into this block.
const PURPOSE_STREAMS: u64 = 4;
const PURPOSE_POSITIONS: u64 = 0;
const PURPOSE_ENDPOINTS: u64 = 1;
const PURPOSE_DEMANDS: u64 = 2;

/// How many times scenario generation may redraw an infeasible instance.
const MAX_GENERATION_ATTEMPTS: u32 = 100;

/// Traffic pattern selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficMode {
    /// Ten flows; demands drawn from the load level's interval.
    A { load_level: u8 },
    /// Six to ten flows; demands drawn from 2.5 to 3.5 Gbit/s.
    B { flow_count: usize },
}

impl TrafficMode {
    /// Demand interval in bit/s and the number of flows.
    pub fn demand_range_and_flows(&self) -> Result<((f64, f64), usize)> {
        match *self {
            TrafficMode::A { load_level } => {
                let range = match load_level {
                    1 => (0.5e9, 1.5e9),
                    2 => (1.0e9, 2.0e9),
                    3 => (1.5e9, 2.5e9),
                    4 => (2.0e9, 3.0e9),
                    5 => (2.5e9, 3.5e9),
                    other => {
                        return Err(Error::Config(format!(
                            "traffic load level must be 1..=5, got {other}"
                        )))
                    }
                };
                Ok((range, 10))
            }
            TrafficMode::B { flow_count } => {
                if !(6..=10).contains(&flow_count) {
                    return Err(Error::Config(format!(
                        "traffic B flow count must be 6..=10, got {flow_count}"
                    )));
                }
                Ok(((2.5e9, 3.5e9), flow_count))
            }
        }
    }
}

/// Variable swept across experiment points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// Interference threshold sigma (dimensionless).
    Sigma,
    /// Traffic A load level (1..=5).
    Load,
    /// Deployment square side in meters.
    Area,
    /// Maximum transmit power in dBm.
    Power,
}

impl SweepVar {
    pub fn label(&self) -> &'static str {
        match self {
            SweepVar::Sigma => "sigma",
            SweepVar::Load => "load",
            SweepVar::Area => "area",
            SweepVar::Power => "power",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigma" => Some(SweepVar::Sigma),
            "load" => Some(SweepVar::Load),
            "area" | "area_side" => Some(SweepVar::Area),
            "power" | "pt" => Some(SweepVar::Power),
            _ => None,
        }
    }
}

/// Full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    pub area_side_m: f64,
    pub node_count: u32,
    pub traffic: TrafficMode,
    pub schemes: Vec<Scheme>,
    pub sweep: Option<(SweepVar, Vec<f64>)>,
    pub trials: u32,
    pub base_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::defaults(),
            area_side_m: 100.0,
            node_count: 10,
            traffic: TrafficMode::A { load_level: 5 },
            schemes: vec![Scheme::Proposed, Scheme::Tdma, Scheme::Ctfp],
            sweep: None,
            trials: 50,
            base_seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.node_count < 2 {
            return Err(Error::Config("node_count must be >= 2".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme required".into()));
        }
        if !self.area_side_m.is_finite() || self.area_side_m <= 0.0 {
            return Err(Error::Config("area_side_m must be positive".into()));
        }
        let (_, flow_count) = self.traffic.demand_range_and_flows()?;
        let n = self.node_count as usize;
        if flow_count > n * (n - 1) {
            return Err(Error::Config(format!(
                "{flow_count} flows need more distinct ordered node pairs than {n} nodes offer"
            )));
        }
        if let Some((var, values)) = &self.sweep {
            if values.is_empty() {
                return Err(Error::Config("sweep_values must be non-empty".into()));
            }
            if *var == SweepVar::Load {
                for &v in values {
                    if v.fract() != 0.0 || !(1.0..=5.0).contains(&v) {
                        return Err(Error::Config(format!("bad load sweep value {v}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// The effective single-point setup at a sweep value (or the base setup
    /// when no sweep is active).
    pub fn resolve(&self, sweep_value: Option<f64>) -> Result<ResolvedPoint> {
        let mut params = self.params.clone();
        let mut area = self.area_side_m;
        let mut traffic = self.traffic;
        if let (Some((var, _)), Some(value)) = (&self.sweep, sweep_value) {
            match var {
                SweepVar::Sigma => params.sigma = value,
                SweepVar::Load => {
                    traffic = TrafficMode::A {
                        load_level: value as u8,
                    }
                }
                SweepVar::Area => area = value,
                SweepVar::Power => params.max_power_w = dbm_to_watts(value),
            }
        }
        let (demand_range, flow_count) = traffic.demand_range_and_flows()?;
        Ok(ResolvedPoint {
            params,
            area_side_m: area,
            node_count: self.node_count,
            flow_count,
            demand_range,
        })
    }
}

/// One sweep point's fully resolved setup.
#[derive(Debug, Clone)]
pub struct ResolvedPoint {
    pub params: SystemParams,
    pub area_side_m: f64,
    pub node_count: u32,
    pub flow_count: usize,
    pub demand_range: (f64, f64),
}

fn stream_rng(base_seed: u64, trial: u32, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial as u64 * PURPOSE_STREAMS + purpose);
    rng
}

/// Draw one scenario for a trial: node positions i.i.d. uniform in the
/// square, flows as distinct uniformly random ordered node pairs without
/// duplicate pairs, demands uniform in the traffic interval. Instances that
/// serial TDMA cannot carry are redrawn (all three draws) up to 100 times.
pub fn generate_scenario(point: &ResolvedPoint, base_seed: u64, trial: u32) -> Result<Scenario> {
    let n = point.node_count;
    if (point.flow_count as u64) > point.params.cta_count as u64 {
        return Err(Error::InfeasibleScenario {
            required: point.flow_count as u64,
            available: point.params.cta_count,
        });
    }
    if point.flow_count > (n as usize) * (n as usize - 1) {
        return Err(Error::InvalidInput(format!(
            "{} flows need more distinct ordered pairs than {n} nodes offer",
            point.flow_count
        )));
    }
    let mut pos_rng = stream_rng(base_seed, trial, PURPOSE_POSITIONS);
    let mut end_rng = stream_rng(base_seed, trial, PURPOSE_ENDPOINTS);
    let mut dem_rng = stream_rng(base_seed, trial, PURPOSE_DEMANDS);

    let mut last_detail = String::new();
    for _attempt in 0..MAX_GENERATION_ATTEMPTS {
        let nodes: Vec<Node> = (0..n)
            .map(|id| Node {
                id,
                pos: Point::new(
                    pos_rng.gen::<f64>() * point.area_side_m,
                    pos_rng.gen::<f64>() * point.area_side_m,
                ),
            })
            .collect();

        let mut flows: Vec<Flow> = Vec::with_capacity(point.flow_count);
        let mut seen: Vec<(u32, u32)> = Vec::new();
        while flows.len() < point.flow_count {
            let s = end_rng.gen_range(0..n);
            let r = end_rng.gen_range(0..n);
            if s == r || seen.contains(&(s, r)) {
                continue;
            }
            seen.push((s, r));
            let (lo, hi) = point.demand_range;
            let q = lo + (hi - lo) * dem_rng.gen::<f64>();
            flows.push(Flow {
                sender: s,
                receiver: r,
                demand_bps: q,
            });
        }

        let scenario = Scenario::new(nodes, flows, base_seed ^ (trial as u64) << 32)?;
        match tdma_budget(&scenario, &point.params) {
            Ok(required) if required <= point.params.cta_count as u64 => return Ok(scenario),
            Ok(required) => {
                last_detail = format!("TDMA needs {required} of {} CTAs", point.params.cta_count);
            }
            Err(e) => last_detail = e.to_string(),
        }
    }
    Err(Error::ScenarioGeneration {
        attempts: MAX_GENERATION_ATTEMPTS,
        detail: last_detail,
    })
}

fn tdma_budget(scenario: &Scenario, params: &SystemParams) -> Result<u64> {
    let mut total = 0u64;
    for flow in 0..scenario.flows.len() {
        total += tdma_ctas(flow, scenario, params)? as u64;
    }
    Ok(total)
}

/// FNV-1a over the scenario's canonical byte encoding.
pub fn scenario_hash(scenario: &Scenario) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&(scenario.nodes.len() as u64).to_le_bytes());
    for node in &scenario.nodes {
        eat(&node.pos.x.to_bits().to_le_bytes());
        eat(&node.pos.y.to_bits().to_le_bytes());
    }
    eat(&(scenario.flows.len() as u64).to_le_bytes());
    for f in &scenario.flows {
        eat(&f.sender.to_le_bytes());
        eat(&f.receiver.to_le_bytes());
        eat(&f.demand_bps.to_bits().to_le_bytes());
    }
    h
}

/// One CSV data row.
#[derive(Debug, Clone)]
pub struct Row {
    pub sweep_var: String,
    pub sweep_value: String,
    pub trial: String,
    pub scheme: Scheme,
    pub scenario_hash: String,
    pub energy_j: f64,
    pub throughput_bps: f64,
    pub efficiency: f64,
    pub energy_ratio_vs_tdma: f64,
    pub throughput_ratio_vs_tdma: f64,
    pub shortfall_count: f64,
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub rows: Vec<Row>,
    /// (context, error) for trials that failed; they are absent from rows.
    pub failures: Vec<(String, String)>,
}

pub const CSV_HEADER: &str = "sweep_var,sweep_value,trial,scheme,scenario_hash,energy_J,throughput_bps,efficiency_bps_per_J,energy_ratio_vs_tdma,throughput_ratio_vs_tdma,shortfall_count";

impl ExperimentRun {
    /// Render the deterministic CSV body.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:e},{:e},{:e},{:e},{:e},{}",
                r.sweep_var,
                r.sweep_value,
                r.trial,
                r.scheme.label(),
                r.scenario_hash,
                r.energy_j,
                r.throughput_bps,
                r.efficiency,
                r.energy_ratio_vs_tdma,
                r.throughput_ratio_vs_tdma,
                r.shortfall_count,
            );
        }
        out
    }
}

/// Reports produced by the schemes evaluated on one scenario.
pub struct TrialOutcome {
    pub scenario: Scenario,
    pub reports: Vec<(Scheme, MetricsReport)>,
    pub tdma: MetricsReport,
    pub proposed_schedule: Option<Schedule>,
}

/// Evaluate every requested scheme on one freshly drawn scenario.
pub fn run_trial(
    point: &ResolvedPoint,
    schemes: &[Scheme],
    base_seed: u64,
    trial: u32,
) -> Result<TrialOutcome> {
    let scenario = generate_scenario(point, base_seed, trial)?;
    let params = &point.params;

    // TDMA is always evaluated: the ratio columns are defined against it.
    let tdma_sched = tdma_schedule(&scenario, params)?;
    let tdma_report = evaluate(&tdma_sched, &scenario, Scheme::Tdma)?;

    let needs_concurrency = schemes
        .iter()
        .any(|s| matches!(s, Scheme::Proposed | Scheme::Ctfp));
    let proposed_schedule = if needs_concurrency {
        let graph = build_graph(&scenario, params)?;
        Some(run_power_control(mis_schedule(&graph), &scenario, params)?)
    } else {
        None
    };

    let mut reports = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let report = match scheme {
            Scheme::Tdma => tdma_report.clone(),
            Scheme::Proposed => evaluate(
                proposed_schedule.as_ref().expect("built above"),
                &scenario,
                Scheme::Proposed,
            )?,
            Scheme::Ctfp => {
                let ctfp = ctfp_from(proposed_schedule.as_ref().expect("built above"));
                evaluate(&ctfp, &scenario, Scheme::Ctfp)?
            }
        };
        reports.push((scheme, report));
    }

    Ok(TrialOutcome {
        scenario,
        reports,
        tdma: tdma_report,
        proposed_schedule,
    })
}

/// Run the whole experiment: every sweep point, every trial, every scheme.
/// Failed trials are recorded and skipped; sweep points are independent.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    config.validate()?;
    let sweep_points: Vec<(String, Option<f64>)> = match &config.sweep {
        None => vec![("none".to_string(), None)],
        Some((var, values)) => values
            .iter()
            .map(|&v| (var.label().to_string(), Some(v)))
            .collect(),
    };

    let mut rows = Vec::new();
    let mut failures = Vec::new();

    for (var_label, sweep_value) in sweep_points {
        let point = config.resolve(sweep_value)?;
        let value_label = match sweep_value {
            Some(v) => format!("{v:e}"),
            None => "-".to_string(),
        };

        // per-scheme accumulators for the mean rows
        let mut sums: Vec<(f64, f64, f64, f64, f64, f64)> =
            vec![(0.0, 0.0, 0.0, 0.0, 0.0, 0.0); config.schemes.len()];
        let mut successes = 0u32;

        for trial in 0..config.trials {
            let outcome = match run_trial(&point, &config.schemes, config.base_seed, trial) {
                Ok(o) => o,
                Err(e) => {
                    failures.push((
                        format!("sweep {var_label}={value_label} trial {trial}"),
                        e.to_string(),
                    ));
                    continue;
                }
            };
            successes += 1;
            let hash = format!("{:016x}", scenario_hash(&outcome.scenario));
            for (idx, (scheme, report)) in outcome.reports.iter().enumerate() {
                let ratio = ratios(report, &outcome.tdma);
                let shortfalls = report.per_flow.iter().filter(|f| f.shortfall).count() as f64;
                rows.push(Row {
                    sweep_var: var_label.clone(),
                    sweep_value: value_label.clone(),
                    trial: trial.to_string(),
                    scheme: *scheme,
                    scenario_hash: hash.clone(),
                    energy_j: report.total_energy_j,
                    throughput_bps: report.network_throughput_bps,
                    efficiency: report.energy_efficiency,
                    energy_ratio_vs_tdma: ratio.energy_ratio,
                    throughput_ratio_vs_tdma: ratio.throughput_ratio,
                    shortfall_count: shortfalls,
                });
                let s = &mut sums[idx];
                s.0 += report.total_energy_j;
                s.1 += report.network_throughput_bps;
                s.2 += report.energy_efficiency;
                s.3 += ratio.energy_ratio;
                s.4 += ratio.throughput_ratio;
                s.5 += shortfalls;
            }
        }

        if successes > 0 {
            let n = successes as f64;
            for (idx, &scheme) in config.schemes.iter().enumerate() {
                let s = sums[idx];
                rows.push(Row {
                    sweep_var: var_label.clone(),
                    sweep_value: value_label.clone(),
                    trial: "mean".to_string(),
                    scheme,
                    scenario_hash: "-".to_string(),
                    energy_j: s.0 / n,
                    throughput_bps: s.1 / n,
                    efficiency: s.2 / n,
                    energy_ratio_vs_tdma: s.3 / n,
                    throughput_ratio_vs_tdma: s.4 / n,
                    shortfall_count: s.5 / n,
                });
            }
        }
    }

    Ok(ExperimentRun { rows, failures })
}

/// Structured text dump of a schedule (pairings, CTA counts, powers).
pub fn dump_schedule(schedule: &Schedule, label: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schedule {{");
    let _ = writeln!(out, "  label: \"{label}\",");
    let _ = writeln!(out, "  pairings: [");
    for (k, p) in schedule.pairings.iter().enumerate() {
        let _ = writeln!(
            out,
            "    {{ index: {}, theta: {}, flows: {:?} }},",
            k + 1,
            p.theta,
            p.flows
        );
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "  powers: [");
    for a in &schedule.assignments {
        let _ = writeln!(
            out,
            "    {{ flow: {}, power_w: {:e}, shortfall: {} }},",
            a.flow, a.power_w, a.shortfall
        );
    }
    let _ = writeln!(out, "  ],");
    let _ = writeln!(out, "}}");
    out
}

/// Parse a flat key = value configuration file over the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    // raw radio inputs so dB values convert exactly once
    let mut bandwidth_mhz = 2160.0;
    let mut noise_dbm_per_mhz = -134.0;
    let mut pathloss_exp = 2.0;
    let mut max_power_dbm = 40.0;
    let mut mui_factor = 0.01;
    let mut cta_duration_us = 18.0;
    let mut cta_count = 5000u32;
    let mut beamwidth_deg = 30.0;
    let mut sigma = 1e-10;
    let mut efficiency = 0.6;
    let mut carrier_ghz = 60.0;
    let mut traffic_mode = 'A';
    let mut traffic_load = 5u8;
    let mut flow_count = 10usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("line {}: bad {what}: {value}", lineno + 1));
        let parse_f64 = |what: &str| value.parse::<f64>().map_err(|_| bad(what));
        match key {
            "bandwidth_mhz" => bandwidth_mhz = parse_f64(key)?,
            "noise_dbm_per_mhz" => noise_dbm_per_mhz = parse_f64(key)?,
            "pathloss_exponent" => pathloss_exp = parse_f64(key)?,
            "max_power_dbm" => max_power_dbm = parse_f64(key)?,
            "mui_factor" => mui_factor = parse_f64(key)?,
            "cta_duration_us" => cta_duration_us = parse_f64(key)?,
            "cta_count" => cta_count = value.parse().map_err(|_| bad(key))?,
            "beamwidth_deg" => beamwidth_deg = parse_f64(key)?,
            "sigma" => sigma = parse_f64(key)?,
            "efficiency" => efficiency = parse_f64(key)?,
            "carrier_ghz" => carrier_ghz = parse_f64(key)?,
            "area_side_m" => cfg.area_side_m = parse_f64(key)?,
            "node_count" => cfg.node_count = value.parse().map_err(|_| bad(key))?,
            "traffic_mode" => {
                traffic_mode = match value.to_ascii_uppercase().as_str() {
                    "A" => 'A',
                    "B" => 'B',
                    _ => return Err(bad(key)),
                }
            }
            "traffic_load" => traffic_load = value.parse().map_err(|_| bad(key))?,
            "flow_count" => flow_count = value.parse().map_err(|_| bad(key))?,
            "trials" => cfg.trials = value.parse().map_err(|_| bad(key))?,
            "base_seed" => cfg.base_seed = value.parse().map_err(|_| bad(key))?,
            "schemes" => {
                cfg.schemes = value
                    .split(',')
                    .map(|s| Scheme::parse(s).ok_or_else(|| bad("scheme")))
                    .collect::<Result<Vec<_>>>()?;
            }
            "sweep" => {
                if value.eq_ignore_ascii_case("none") {
                    cfg.sweep = None;
                } else {
                    let var = SweepVar::parse(value).ok_or_else(|| bad(key))?;
                    let values = cfg.sweep.take().map(|(_, v)| v).unwrap_or_default();
                    cfg.sweep = Some((var, values));
                }
            }
            "sweep_values" => {
                let values = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad(key)))
                    .collect::<Result<Vec<f64>>>()?;
                let var = cfg.sweep.take().map(|(v, _)| v).unwrap_or(SweepVar::Sigma);
                cfg.sweep = Some((var, values));
            }
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }

    cfg.params = SystemParams::new(
        bandwidth_mhz * 1e6,
        noise_dbm_per_mhz,
        pathloss_exp,
        max_power_dbm,
        mui_factor,
        cta_duration_us * 1e-6,
        cta_count,
        beamwidth_deg,
        sigma,
        efficiency,
        carrier_ghz * 1e9,
    )?;
    cfg.traffic = match traffic_mode {
        'A' => TrafficMode::A {
            load_level: traffic_load,
        },
        _ => TrafficMode::B { flow_count },
    };
    cfg.validate()?;
    Ok(cfg)
}
