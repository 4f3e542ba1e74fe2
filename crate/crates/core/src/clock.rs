//! Per-qubit time accumulation and the makespan simulator built on it.
//!
//! A single-qubit gate advances its qubit's clock by the gate time. A
//! two-qubit gate starts when both operands are free, so both clocks become
//! `max(t_i, t_j) + duration`.

use serde::Serialize;
use thiserror::Error;

use crate::chip::{CouplingGraph, DurationTable};
use crate::circuit::{Circuit, GateKind};
use crate::layout::Layout;

/// Absolute tolerance for comparing accumulated times, in microseconds.
pub const TIME_TOL_US: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ClockError {
    #[error("qubit {q} out of range for {n} clocks")]
    OutOfRange { q: usize, n: usize },
    #[error("two-qubit accumulation on a single qubit {0}")]
    SameQubit(usize),
    #[error("gate {gate} acts on uncoupled physical qubits ({a}, {b})")]
    Uncoupled { gate: usize, a: usize, b: usize },
    #[error("layout covers {layout} qubits but the chip has {chip}")]
    LayoutMismatch { layout: usize, chip: usize },
    #[error("circuit width {width} exceeds chip size {chip}")]
    TooWide { width: usize, chip: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitClocks {
    t: Vec<f64>,
}

impl QubitClocks {
    pub fn new(n: usize) -> Self {
        QubitClocks { t: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    #[inline]
    pub fn get(&self, q: usize) -> f64 {
        self.t[q]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }

    pub fn makespan(&self) -> f64 {
        self.t.iter().copied().fold(0.0, f64::max)
    }

    /// Adds `single_us(q)` to qubit `q`.
    pub fn apply_single(&mut self, q: usize, dur: &DurationTable) -> Result<(), ClockError> {
        self.check(q)?;
        self.t[q] += dur.single_us(q);
        Ok(())
    }

    /// Synchronises `i` and `j` to the later of the two, then adds `dur_us`.
    pub fn apply_two(&mut self, i: usize, j: usize, dur_us: f64) -> Result<(), ClockError> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(ClockError::SameQubit(i));
        }
        let t = self.t[i].max(self.t[j]) + dur_us;
        self.t[i] = t;
        self.t[j] = t;
        Ok(())
    }

    fn check(&self, q: usize) -> Result<(), ClockError> {
        if q < self.t.len() {
            Ok(())
        } else {
            Err(ClockError::OutOfRange { q, n: self.t.len() })
        }
    }
}

/// Duration of a two-qubit gate on physical edge `(a, b)`: `swap` labels take
/// the SWAP time, everything else the CNOT time. `None` off-edge.
#[inline]
pub fn two_qubit_duration(label: &str, a: usize, b: usize, dur: &DurationTable) -> Option<f64> {
    if label == "swap" {
        dur.swap_us(a, b)
    } else {
        dur.cnot_us(a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub makespan_us: f64,
    pub per_qubit_us: Vec<f64>,
}

/// Folds the clock rules over `c` in program order after mapping logical
/// qubits to physical ones through `layout`.
pub fn simulate(
    c: &Circuit,
    chip: &CouplingGraph,
    dur: &DurationTable,
    layout: &Layout,
) -> Result<ScheduleReport, ClockError> {
    let n = chip.num_qubits();
    if layout.len() != n {
        return Err(ClockError::LayoutMismatch { layout: layout.len(), chip: n });
    }
    if c.width() > n {
        return Err(ClockError::TooWide { width: c.width(), chip: n });
    }
    let mut clocks = QubitClocks::new(n);
    for g in c.gates() {
        match g.kind {
            GateKind::Single(q) => clocks.apply_single(layout.phys(q), dur)?,
            GateKind::Two { control, target } => {
                let (a, b) = (layout.phys(control), layout.phys(target));
                let d = two_qubit_duration(&g.label, a, b, dur).ok_or(ClockError::Uncoupled { gate: g.id, a, b })?;
                clocks.apply_two(a, b, d)?;
            }
        }
    }
    Ok(ScheduleReport {
        makespan_us: clocks.makespan(),
        per_qubit_us: clocks.t,
    })
}
