//! Parameter sweeps over random gate sequences, written as CSV.
//!
//! CSV schema v1, one row per (axis value, seed, strategy):
//!
//! ```text
//! axis,value,seed,strategy,makespan_us,swap_count,subcircuits,route_ms
//! ```
//!
//! Rows come out ordered by axis value, then seed, then strategy, whatever
//! the execution mode. `route_ms` is wall-clock and the only
//! non-deterministic column.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::batch::{self, Execution};
use crate::chip::{ChipError, ChipSpec, CouplingGraph, DurationTable};
use crate::router::{route_with, RouteError, RouterConfig, Strategy};
use crate::workloads::{gen_random, RandomSpec, WorkloadError};

pub const CSV_HEADER: &str = "axis,value,seed,strategy,makespan_us,swap_count,subcircuits,route_ms";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("value `{value}`: {source}")]
    Chip { value: String, source: ChipError },
    #[error("value `{value}`: {source}")]
    Workload { value: String, source: WorkloadError },
    #[error("value `{value}`, seed {seed}, {strategy}: {source}")]
    Route { value: String, seed: u64, strategy: &'static str, source: RouteError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    PCx,
    Gates,
    Qubits,
    Topology,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PCx => "p_cx",
            Axis::Gates => "gates",
            Axis::Qubits => "qubits",
            Axis::Topology => "topology",
        }
    }
}

impl FromStr for Axis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p_cx" => Ok(Axis::PCx),
            "gates" => Ok(Axis::Gates),
            "qubits" => Ok(Axis::Qubits),
            "topology" => Ok(Axis::Topology),
            _ => Err(SweepError::Invalid(format!(
                "unknown axis `{s}` (expected p_cx, gates, qubits, topology)"
            ))),
        }
    }
}

/// Chip family sized to the circuit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Linear,
    Ladder,
    Square,
}

impl FromStr for Family {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Family::Linear),
            "ladder" => Ok(Family::Ladder),
            "square" => Ok(Family::Square),
            _ => Err(SweepError::Invalid(format!("unknown topology family `{s}`"))),
        }
    }
}

impl Family {
    /// Square chips use the most nearly square factorisation `r x c`, `r <= c`.
    pub fn chip(self, qubits: usize) -> Result<ChipSpec, SweepError> {
        match self {
            Family::Linear => Ok(ChipSpec::Linear(qubits)),
            Family::Ladder => Ok(ChipSpec::Ladder(qubits)),
            Family::Square => {
                let rows = (2..=qubits)
                    .take_while(|r| r * r <= qubits)
                    .filter(|r| qubits.is_multiple_of(*r))
                    .last()
                    .ok_or_else(|| SweepError::Invalid(format!("{qubits} qubits cannot form a square grid")))?;
                Ok(ChipSpec::Square(rows, qubits / rows))
            }
        }
    }
}

/// Parses `start:end:step` (inclusive) or a comma-separated list.
pub fn parse_values(axis: Axis, text: &str) -> Result<Vec<String>, SweepError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 1 {
        let vals: Vec<String> = text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if vals.is_empty() {
            return Err(SweepError::Invalid("empty value list".into()));
        }
        return Ok(vals);
    }
    if axis == Axis::Topology || parts.len() != 3 {
        return Err(SweepError::Invalid(format!("invalid range `{text}` (expected start:end:step)")));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| SweepError::Invalid(format!("invalid number `{s}` in range")))
    };
    let (start, end, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if step <= 0.0 || end < start {
        return Err(SweepError::Invalid(format!("empty or unbounded range `{text}`")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let v = ((start + i as f64 * step) * 1e9).round() / 1e9;
            v.to_string()
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<String>,
    pub qubits: usize,
    pub gates: usize,
    pub p_cx: f64,
    /// Chip family for every axis but `topology`.
    pub family: Family,
    pub seeds: Vec<u64>,
    pub strategies: Vec<Strategy>,
    pub router: RouterConfig,
}

impl SweepConfig {
    /// Defaults: 16 qubits, 950 gates, p_cx 0.5 on a linear chip.
    pub fn new(axis: Axis, values: Vec<String>) -> Self {
        SweepConfig {
            axis,
            values,
            qubits: 16,
            gates: 950,
            p_cx: 0.5,
            family: Family::Linear,
            seeds: vec![0],
            strategies: vec![Strategy::Bqa, Strategy::Greedy],
            router: RouterConfig::default(),
        }
    }
}

/// One resolved axis value.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub qubits: usize,
    pub gates: usize,
    pub p_cx: f64,
    pub chip: ChipSpec,
}

impl SweepConfig {
    pub fn points(&self) -> Result<Vec<SweepPoint>, SweepError> {
        if self.seeds.is_empty() || self.strategies.is_empty() {
            return Err(SweepError::Invalid("need at least one seed and one strategy".into()));
        }
        self.values
            .iter()
            .map(|v| {
                let bad = || SweepError::Invalid(format!("invalid {} value `{v}`", self.axis.name()));
                let mut p = SweepPoint {
                    value: v.clone(),
                    qubits: self.qubits,
                    gates: self.gates,
                    p_cx: self.p_cx,
                    chip: self.family.chip(self.qubits)?,
                };
                match self.axis {
                    Axis::PCx => p.p_cx = v.parse().map_err(|_| bad())?,
                    Axis::Gates => p.gates = v.parse().map_err(|_| bad())?,
                    Axis::Qubits => {
                        p.qubits = v.parse().map_err(|_| bad())?;
                        p.chip = self.family.chip(p.qubits)?;
                    }
                    Axis::Topology => {
                        p.chip = match v.parse::<Family>() {
                            Ok(f) => f.chip(self.qubits)?,
                            Err(_) => v.parse().map_err(|e| SweepError::Chip { value: v.clone(), source: e })?,
                        };
                    }
                }
                Ok(p)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub seed: u64,
    pub strategy: String,
    pub makespan_us: f64,
    pub swap_count: usize,
    pub subcircuits: usize,
    pub route_ms: f64,
}

struct Job<'a> {
    point: &'a SweepPoint,
    chip: &'a (CouplingGraph, DurationTable),
    seed: u64,
    strategy: Strategy,
}

pub fn run_sweep(cfg: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>, SweepError> {
    let points = cfg.points()?;
    let chips = points
        .iter()
        .map(|p| p.chip.load().map_err(|e| SweepError::Chip { value: p.value.clone(), source: e }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::with_capacity(points.len() * cfg.seeds.len() * cfg.strategies.len());
    for (point, chip) in points.iter().zip(&chips) {
        for &seed in &cfg.seeds {
            for &strategy in &cfg.strategies {
                jobs.push(Job { point, chip, seed, strategy });
            }
        }
    }
    batch::try_map(&jobs, exec, |job| {
        let p = job.point;
        let spec = RandomSpec { qubits: p.qubits, gates: p.gates, p_cx: p.p_cx, seed: job.seed };
        let circuit = gen_random(&spec).map_err(|e| SweepError::Workload { value: p.value.clone(), source: e })?;
        let started = Instant::now();
        let routed = route_with(job.strategy, &circuit, &job.chip.0, &job.chip.1, &cfg.router).map_err(|e| {
            SweepError::Route { value: p.value.clone(), seed: job.seed, strategy: job.strategy.name(), source: e }
        })?;
        Ok(SweepRow {
            axis: cfg.axis.name().to_string(),
            value: p.value.clone(),
            seed: job.seed,
            strategy: job.strategy.name().to_string(),
            makespan_us: routed.makespan_us,
            swap_count: routed.swap_count,
            subcircuits: routed.subcircuit_count,
            route_ms: started.elapsed().as_secs_f64() * 1e3,
        })
    })
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_values() {
        let v = parse_values(Axis::PCx, "0.1:0.9:0.1").unwrap();
        assert_eq!(v, ["0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9"]);
        assert_eq!(parse_values(Axis::Gates, "200:1000:200").unwrap(), ["200", "400", "600", "800", "1000"]);
        assert_eq!(parse_values(Axis::Topology, "linear, ladder,square").unwrap(), ["linear", "ladder", "square"]);
        assert!(parse_values(Axis::PCx, "0.9:0.1:0.1").is_err());
        assert!(parse_values(Axis::PCx, "0.1:0.9").is_err());
        assert!(parse_values(Axis::Topology, "1:2:1").is_err());
    }

    #[test]
    fn square_family_factorises() {
        assert_eq!(Family::Square.chip(16).unwrap(), ChipSpec::Square(4, 4));
        assert_eq!(Family::Square.chip(12).unwrap(), ChipSpec::Square(3, 4));
        assert!(Family::Square.chip(7).is_err());
    }

    #[test]
    fn csv_header_matches_schema() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), CSV_HEADER);
        let row = SweepRow {
            axis: "p_cx".into(),
            value: "0.5".into(),
            seed: 1,
            strategy: "bqa".into(),
            makespan_us: 1.25,
            swap_count: 3,
            subcircuits: 2,
            route_ms: 0.5,
        };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("p_cx,0.5,1,bqa,1.25,3,2,0.5"));
    }

    #[test]
    fn small_sweep_rows_are_ordered() {
        let mut cfg = SweepConfig::new(Axis::PCx, vec!["0.2".into(), "0.8".into()]);
        cfg.qubits = 6;
        cfg.gates = 60;
        cfg.seeds = vec![3, 4];
        let rows = run_sweep(&cfg, Execution::Parallel).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        let keys: Vec<_> = rows.iter().map(|r| (r.value.as_str(), r.seed, r.strategy.as_str())).collect();
        assert_eq!(keys[..4], [("0.2", 3, "bqa"), ("0.2", 3, "greedy"), ("0.2", 4, "bqa"), ("0.2", 4, "greedy")]);
        let seq = run_sweep(&cfg, Execution::Sequential).unwrap();
        let strip = |rs: &[SweepRow]| rs.iter().map(|r| (r.value.clone(), r.seed, r.makespan_us, r.swap_count)).collect::<Vec<_>>();
        assert_eq!(strip(&rows), strip(&seq));
    }

    #[test]
    fn invalid_sweeps() {
        assert!("depth".parse::<Axis>().is_err());
        let cfg = SweepConfig::new(Axis::PCx, vec!["abc".into()]);
        assert!(matches!(run_sweep(&cfg, Execution::Sequential), Err(SweepError::Invalid(_))));
        let cfg = SweepConfig::new(Axis::PCx, vec!["1.5".into()]);
        assert!(matches!(run_sweep(&cfg, Execution::Sequential), Err(SweepError::Workload { .. })));
        let mut cfg = SweepConfig::new(Axis::Qubits, vec!["7".into()]);
        cfg.family = Family::Ladder;
        assert!(matches!(run_sweep(&cfg, Execution::Sequential), Err(SweepError::Chip { .. })));
    }
}
