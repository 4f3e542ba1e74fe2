//! Machine-readable single-run report.

use serde::Serialize;

use crate::chip::DurationTable;
use crate::circuit::Circuit;
use crate::router::{RoutedResult, RouterConfig, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateCounts {
    pub single: usize,
    pub cx: usize,
    pub swap: usize,
}

impl GateCounts {
    pub fn of(c: &Circuit) -> Self {
        let mut counts = GateCounts { single: 0, cx: 0, swap: 0 };
        for g in c.gates() {
            match (g.kind.is_two(), g.label.as_str()) {
                (false, _) => counts.single += 1,
                (true, "swap") => counts.swap += 1,
                (true, _) => counts.cx += 1,
            }
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputInfo {
    /// Circuit file path or `random:q,g,p,seed`.
    pub source: String,
    pub width: usize,
    pub gates: usize,
    pub gate_counts: GateCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub lookahead: usize,
    pub swap_factor: f64,
    /// Physical qubit of each logical qubit at the start.
    pub initial_layout: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultsInfo {
    pub makespan_us: f64,
    pub swap_count: usize,
    pub subcircuit_count: usize,
    pub per_qubit_us: Vec<f64>,
    /// Entry `p` is the logical qubit on physical qubit `p` after routing.
    pub final_mapping: Vec<usize>,
}

/// Wall-clock fields; excluded from determinism guarantees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingInfo {
    pub route_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingReport {
    pub input: InputInfo,
    pub chip: String,
    pub strategy: String,
    pub config: ConfigEcho,
    pub results: ResultsInfo,
    pub timing: TimingInfo,
}

impl RoutingReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        source: &str,
        input: &Circuit,
        chip: &str,
        strategy: Strategy,
        cfg: &RouterConfig,
        dur: &DurationTable,
        routed: &RoutedResult,
        route_ms: f64,
    ) -> Self {
        RoutingReport {
            input: InputInfo {
                source: source.to_string(),
                width: input.width(),
                gates: input.len(),
                gate_counts: GateCounts::of(input),
            },
            chip: chip.to_string(),
            strategy: strategy.name().to_string(),
            config: ConfigEcho {
                lookahead: cfg.lookahead,
                swap_factor: cfg.swap_factor.unwrap_or(dur.swap_factor()),
                initial_layout: routed.initial_layout.log2phys().to_vec(),
            },
            results: ResultsInfo {
                makespan_us: routed.makespan_us,
                swap_count: routed.swap_count,
                subcircuit_count: routed.subcircuit_count,
                per_qubit_us: routed.per_qubit_us.clone(),
                final_mapping: routed.final_layout.phys2log().to_vec(),
            },
            timing: TimingInfo { route_ms },
        }
    }
}
