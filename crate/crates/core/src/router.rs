//! Busy-qubits-avoid SWAP insertion.
//!
//! Gates are consumed in topological order. A two-qubit gate whose operands
//! are not coupled under the current layout blocks; the router then inserts
//! one SWAP at a time, each chosen among the first and last hops of all
//! shortest paths between the operands, until the operands are adjacent.
//! Candidates are scored by
//!
//! ```text
//! cost = max_i t_i / mean_i t_i  +  (1/n) * sum_k (dist(c_k, t_k) - 1)
//! ```
//!
//! where `t_i` is qubit `i`'s clock once the candidate SWAP is accounted for
//! and the mean runs over every physical qubit, so idle qubits pull the mean
//! down. The sum runs over the next `n` two-qubit gates under the layout the
//! candidate would produce. The first term is low when the SWAP lands on
//! qubits that were idle; the second is low when the SWAP does not pull
//! apart upcoming interactions.
//!
//! [`TimeOrigin::Subcircuit`] measures `t_i` from the start of the current
//! subcircuit (the stretch since the previous blocking gate was resolved)
//! instead, and [`FrontScope::Touched`] restricts the ratio to qubits used in
//! that subcircuit. Both are available for experiments; the defaults route
//! noticeably better on random workloads.

use std::collections::VecDeque;

use thiserror::Error;

use crate::chip::{shortest_first_last_steps, ChipError, CouplingGraph, DurationTable};
use crate::circuit::{build_dag, topo_positions, Circuit, CircuitError, Gate, GateKind, Origin};
use crate::clock::{two_qubit_duration, ClockError, QubitClocks};
use crate::layout::{Layout, LayoutError};

/// Relative tolerance under which two candidate costs count as a tie.
const COST_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum RouteError {
    #[error("circuit needs {width} qubits but the chip has {chip}")]
    TooWide { width: usize, chip: usize },
    #[error("initial layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("gate {gate}: no progress after {swaps} swaps (candidate generation bug)")]
    NonTermination { gate: usize, swaps: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Chip(#[from] ChipError),
    #[error(transparent)]
    Clock(#[from] ClockError),
}

impl RouteError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            RouteError::NonTermination { .. } | RouteError::Clock(_) | RouteError::Circuit(CircuitError::Cycle)
        ) || matches!(self, RouteError::Chip(ChipError::TooClose { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Bqa,
    Greedy,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Bqa => "bqa",
            Strategy::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bqa" => Ok(Strategy::Bqa),
            "greedy" => Ok(Strategy::Greedy),
            other => Err(format!("unknown strategy `{other}` (expected bqa or greedy)")),
        }
    }
}

/// Which qubits enter the busy-to-average ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrontScope {
    /// Every physical qubit; idle qubits count with zero time.
    #[default]
    AllQubits,
    /// Only qubits touched in the current subcircuit (plus the candidate's).
    Touched,
}

/// Reference point for per-qubit times in the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeOrigin {
    /// Time elapsed since the current subcircuit started.
    Subcircuit,
    /// Absolute clock values.
    #[default]
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum InitialLayout {
    #[default]
    Identity,
    /// `placement[logical] = physical`; unnamed physical qubits are filled in order.
    Explicit(Vec<usize>),
}

impl InitialLayout {
    pub fn build(&self, n: usize) -> Result<Layout, LayoutError> {
        match self {
            InitialLayout::Identity => Ok(Layout::identity(n)),
            InitialLayout::Explicit(p) => Layout::from_placement(p, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouterConfig {
    /// Number of upcoming two-qubit gates scored by the backend term; 0 disables it.
    pub lookahead: usize,
    /// Overrides the chip's SWAP/CNOT duration ratio when set.
    pub swap_factor: Option<f64>,
    pub initial_layout: InitialLayout,
    pub front_scope: FrontScope,
    pub time_origin: TimeOrigin,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            lookahead: 20,
            swap_factor: None,
            initial_layout: InitialLayout::Identity,
            front_scope: FrontScope::AllQubits,
            time_origin: TimeOrigin::Absolute,
        }
    }
}

/// Outcome of checking one gate against the current layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discrimination {
    Executable,
    NeedsRouting,
}

pub fn discriminate(gate: &Gate, layout: &Layout, chip: &CouplingGraph) -> Discrimination {
    match gate.kind {
        GateKind::Single(_) => Discrimination::Executable,
        GateKind::Two { control, target } => {
            if chip.is_edge(layout.phys(control), layout.phys(target)) {
                Discrimination::Executable
            } else {
                Discrimination::NeedsRouting
            }
        }
    }
}

/// Tracks the current subcircuit: its ordinal, the physical qubits touched
/// since it began, and every qubit's clock at that moment.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcircuitTracker {
    index: usize,
    active: Vec<bool>,
    start_clock: Vec<f64>,
}

impl SubcircuitTracker {
    pub fn new(n: usize) -> Self {
        SubcircuitTracker {
            index: 0,
            active: vec![false; n],
            start_clock: vec![0.0; n],
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.active[q]
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(q, _)| q)
    }

    pub fn start_clock(&self, q: usize) -> f64 {
        self.start_clock[q]
    }

    pub fn touch(&mut self, q: usize) {
        self.active[q] = true;
    }

    /// Starts the next subcircuit at the given clocks.
    pub fn close(&mut self, clocks: &QubitClocks) {
        self.index += 1;
        self.active.fill(false);
        self.start_clock.copy_from_slice(clocks.as_slice());
    }
}

/// `max / mean` of the given times; 1.0 when empty or all zero.
pub fn balance_ratio(times: impl IntoIterator<Item = f64>) -> f64 {
    let (mut max, mut sum, mut count) = (0.0f64, 0.0f64, 0usize);
    for t in times {
        max = max.max(t);
        sum += t;
        count += 1;
    }
    if count == 0 || sum <= 0.0 {
        1.0
    } else {
        max * count as f64 / sum
    }
}

/// Busy-to-average ratio of the current subcircuit.
pub fn front_cost(clocks: &QubitClocks, tracker: &SubcircuitTracker, scope: FrontScope, origin: TimeOrigin) -> f64 {
    let time = |q: usize| match origin {
        TimeOrigin::Subcircuit => clocks.get(q) - tracker.start_clock(q),
        TimeOrigin::Absolute => clocks.get(q),
    };
    match scope {
        FrontScope::AllQubits => balance_ratio((0..clocks.len()).map(time)),
        FrontScope::Touched => balance_ratio(tracker.active().map(time)),
    }
}

/// Mean number of SWAPs the first `lookahead` gates of `future_cnots`
/// (logical pairs) would still need under `layout`. 0 for an empty window.
pub fn backend_cost(layout: &Layout, chip: &CouplingGraph, future_cnots: &[(usize, usize)], lookahead: usize) -> f64 {
    let window = &future_cnots[..lookahead.min(future_cnots.len())];
    if window.is_empty() {
        return 0.0;
    }
    let swaps: u64 = window
        .iter()
        .map(|&(c, t)| u64::from(chip.dist(layout.phys(c), layout.phys(t)).saturating_sub(1)))
        .sum();
    swaps as f64 / window.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub front: f64,
    pub backend: f64,
    pub total: f64,
}

/// Mutable routing state: layout, clocks, subcircuit tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct RouterState {
    pub layout: Layout,
    pub clocks: QubitClocks,
    pub tracker: SubcircuitTracker,
}

impl RouterState {
    pub fn new(layout: Layout) -> Self {
        let n = layout.len();
        RouterState {
            layout,
            clocks: QubitClocks::new(n),
            tracker: SubcircuitTracker::new(n),
        }
    }
}

/// Scores a SWAP on `edge` without touching `state`.
pub fn score_candidate(
    edge: (usize, usize),
    state: &RouterState,
    chip: &CouplingGraph,
    dur: &DurationTable,
    future_cnots: &[(usize, usize)],
    cfg: &RouterConfig,
) -> Result<CostBreakdown, RouteError> {
    let (a, b) = edge;
    let swap = dur.swap_us(a, b).ok_or(ChipError::NotAnEdge { a, b })?;
    let mut clocks = state.clocks.clone();
    clocks.apply_two(a, b, swap)?;
    let mut tracker = state.tracker.clone();
    tracker.touch(a);
    tracker.touch(b);
    let mut layout = state.layout.clone();
    layout.swap_physical(a, b);

    let front = front_cost(&clocks, &tracker, cfg.front_scope, cfg.time_origin);
    let backend = backend_cost(&layout, chip, future_cnots, cfg.lookahead);
    Ok(CostBreakdown { front, backend, total: front + backend })
}

/// One resolved blocking gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingRecord {
    pub gate: usize,
    /// Operand distance when the gate became pending.
    pub distance: u32,
    pub swaps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutedResult {
    /// Physical circuit over every chip qubit, with inserted `swap` gates.
    pub circuit: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub swap_count: usize,
    pub makespan_us: f64,
    pub subcircuit_count: usize,
    pub per_qubit_us: Vec<f64>,
    pub blocking: Vec<BlockingRecord>,
}

impl RoutedResult {
    /// Inserted SWAP edges in emission order.
    pub fn swap_sequence(&self) -> Vec<(usize, usize)> {
        self.circuit
            .gates()
            .iter()
            .filter(|g| g.origin == Origin::InsertedSwap)
            .filter_map(|g| match g.kind {
                GateKind::Two { control, target } => Some((control, target)),
                GateKind::Single(_) => None,
            })
            .collect()
    }
}

pub fn route(c: &Circuit, chip: &CouplingGraph, dur: &DurationTable, cfg: &RouterConfig) -> Result<RoutedResult, RouteError> {
    route_with(Strategy::Bqa, c, chip, dur, cfg)
}

/// Same loop as [`route`], but always moves the control qubit along the
/// smallest distance-decreasing edge, ignoring costs.
pub fn route_greedy_baseline(
    c: &Circuit,
    chip: &CouplingGraph,
    dur: &DurationTable,
    cfg: &RouterConfig,
) -> Result<RoutedResult, RouteError> {
    route_with(Strategy::Greedy, c, chip, dur, cfg)
}

pub fn route_with(
    strategy: Strategy,
    c: &Circuit,
    chip: &CouplingGraph,
    dur: &DurationTable,
    cfg: &RouterConfig,
) -> Result<RoutedResult, RouteError> {
    let n = chip.num_qubits();
    if c.width() > n {
        return Err(RouteError::TooWide { width: c.width(), chip: n });
    }
    let dur = match cfg.swap_factor {
        Some(f) => dur.clone().with_swap_factor(f)?,
        None => dur.clone(),
    };
    let initial_layout = cfg.initial_layout.build(n)?;
    let order = topo_positions(&build_dag(c))?;
    let gates = c.gates();
    let future: Vec<(usize, usize)> = order
        .iter()
        .filter_map(|&p| match gates[p].kind {
            GateKind::Two { control, target } => Some((control, target)),
            GateKind::Single(_) => None,
        })
        .collect();

    let mut state = RouterState::new(initial_layout.clone());
    let mut out = Circuit::empty(n);
    let mut blocking = Vec::new();
    let mut seen_two = 0usize;
    let guard = n * n;

    for &pos in &order {
        let g = &gates[pos];
        match g.kind {
            GateKind::Single(q) => {
                let p = state.layout.phys(q);
                state.clocks.apply_single(p, &dur)?;
                state.tracker.touch(p);
                out.push(GateKind::Single(p), &g.label)?;
            }
            GateKind::Two { control, target } => {
                seen_two += 1;
                let upcoming = &future[seen_two..];
                if discriminate(g, &state.layout, chip) == Discrimination::NeedsRouting {
                    let distance = chip.dist(state.layout.phys(control), state.layout.phys(target));
                    let mut swaps = 0;
                    loop {
                        let (pc, pt) = (state.layout.phys(control), state.layout.phys(target));
                        if chip.is_edge(pc, pt) {
                            break;
                        }
                        if swaps >= guard {
                            return Err(RouteError::NonTermination { gate: g.id, swaps });
                        }
                        let (a, b) = match strategy {
                            Strategy::Bqa => pick_min_cost(pc, pt, &state, chip, &dur, upcoming, cfg)?,
                            Strategy::Greedy => pick_first_step(pc, pt, chip),
                        };
                        let t = dur.swap_us(a, b).ok_or(ChipError::NotAnEdge { a, b })?;
                        state.clocks.apply_two(a, b, t)?;
                        state.layout.swap_physical(a, b);
                        state.tracker.touch(a);
                        state.tracker.touch(b);
                        out.push_with_origin(GateKind::Two { control: a, target: b }, "swap", Origin::InsertedSwap)?;
                        swaps += 1;
                    }
                    blocking.push(BlockingRecord { gate: g.id, distance, swaps });
                    state.tracker.close(&state.clocks);
                }
                let (pc, pt) = (state.layout.phys(control), state.layout.phys(target));
                let t = two_qubit_duration(&g.label, pc, pt, &dur).ok_or(ClockError::Uncoupled { gate: g.id, a: pc, b: pt })?;
                state.clocks.apply_two(pc, pt, t)?;
                state.tracker.touch(pc);
                state.tracker.touch(pt);
                out.push(GateKind::Two { control: pc, target: pt }, &g.label)?;
            }
        }
    }

    let swap_count = blocking.iter().map(|b| b.swaps).sum();
    let subcircuit_count = if c.is_empty() { 0 } else { state.tracker.index() + 1 };
    Ok(RoutedResult {
        circuit: out,
        initial_layout,
        final_layout: state.layout,
        swap_count,
        makespan_us: state.clocks.makespan(),
        subcircuit_count,
        per_qubit_us: state.clocks.as_slice().to_vec(),
        blocking,
    })
}

fn pick_min_cost(
    pc: usize,
    pt: usize,
    state: &RouterState,
    chip: &CouplingGraph,
    dur: &DurationTable,
    upcoming: &[(usize, usize)],
    cfg: &RouterConfig,
) -> Result<(usize, usize), RouteError> {
    let mut best: Option<((usize, usize), f64)> = None;
    // candidates arrive sorted, so keeping the first of a tie picks the smallest edge
    for edge in shortest_first_last_steps(chip, pc, pt)? {
        let cost = score_candidate(edge, state, chip, dur, upcoming, cfg)?.total;
        match best {
            Some((_, b)) if cost >= b - COST_REL_TOL * b.abs().max(1.0) => {}
            _ => best = Some((edge, cost)),
        }
    }
    Ok(best.expect("a pair at distance >= 2 has at least one shortest-path step").0)
}

fn pick_first_step(pc: usize, pt: usize, chip: &CouplingGraph) -> (usize, usize) {
    let d = chip.dist(pc, pt);
    chip.neighbors(pc)
        .iter()
        .filter(|&&x| chip.dist(x, pt) + 1 == d)
        .map(|&x| (pc.min(x), pc.max(x)))
        .min()
        .expect("a connected pair at distance >= 2 has a first step")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Violation {
    #[error("routed circuit has width {routed}, chip has {chip} qubits")]
    WidthMismatch { routed: usize, chip: usize },
    #[error("original circuit is wider ({original}) than the chip ({chip})")]
    TooWide { original: usize, chip: usize },
    #[error("initial layout covers {layout} qubits, chip has {chip}")]
    LayoutMismatch { layout: usize, chip: usize },
    #[error("routed gate {index} acts on uncoupled physical qubits ({a}, {b})")]
    OffEdge { index: usize, a: usize, b: usize },
    #[error("routed gate {index} (`{found}`) does not match the next original gate on its qubits{}", expected.as_ref().map(|e| format!(" (expected `{e}`)")).unwrap_or_default())]
    Mismatch { index: usize, found: String, expected: Option<String> },
    #[error("original gate {gate} (`{text}`) never appears in the routed circuit")]
    Missing { gate: usize, text: String },
}

fn describe(g: &Gate) -> String {
    match g.kind {
        GateKind::Single(q) => format!("{} {}", g.label, q),
        GateKind::Two { control, target } => format!("{} {} {}", g.label, control, target),
    }
}

/// Replays a routed circuit against the original. `swap` gates in `routed`
/// move logical qubits unless they are the next original gate on both
/// operands, in which case they count as that gate. Every other gate must be
/// the next unconsumed original gate on each of its logical qubits. Returns
/// the final layout (whose `phys2log` is the mapping table).
pub fn verify_routed(
    original: &Circuit,
    routed: &Circuit,
    initial_layout: &Layout,
    chip: &CouplingGraph,
) -> Result<Layout, Violation> {
    let n = chip.num_qubits();
    if routed.width() != n {
        return Err(Violation::WidthMismatch { routed: routed.width(), chip: n });
    }
    if original.width() > n {
        return Err(Violation::TooWide { original: original.width(), chip: n });
    }
    if initial_layout.len() != n {
        return Err(Violation::LayoutMismatch { layout: initial_layout.len(), chip: n });
    }
    let width = original.width();
    let mut pending: Vec<VecDeque<usize>> = vec![VecDeque::new(); width];
    for (pos, g) in original.gates().iter().enumerate() {
        for q in g.kind.qubits() {
            pending[q].push_back(pos);
        }
    }
    let mut layout = initial_layout.clone();
    let front = |pending: &[VecDeque<usize>], l: usize| -> Option<usize> {
        pending.get(l).and_then(|d| d.front().copied())
    };

    for (index, g) in routed.gates().iter().enumerate() {
        let mismatch = |expected: Option<usize>| Violation::Mismatch {
            index,
            found: describe(g),
            expected: expected.map(|p| describe(&original.gates()[p])),
        };
        match g.kind {
            GateKind::Single(p) => {
                let l = layout.logical(p);
                let Some(pos) = front(&pending, l) else {
                    return Err(mismatch(None));
                };
                let want = &original.gates()[pos];
                if want.label != g.label || want.kind != GateKind::Single(l) {
                    return Err(mismatch(Some(pos)));
                }
                pending[l].pop_front();
            }
            GateKind::Two { control: a, target: b } => {
                if !chip.is_edge(a, b) {
                    return Err(Violation::OffEdge { index, a, b });
                }
                let (la, lb) = (layout.logical(a), layout.logical(b));
                let fa = front(&pending, la);
                let matched = match fa {
                    Some(pos) if fa == front(&pending, lb) => {
                        let want = &original.gates()[pos];
                        want.label == g.label && want.kind == (GateKind::Two { control: la, target: lb })
                    }
                    _ => false,
                };
                if matched {
                    pending[la].pop_front();
                    pending[lb].pop_front();
                } else if g.label == "swap" {
                    layout.swap_physical(a, b);
                } else {
                    return Err(mismatch(fa));
                }
            }
        }
    }
    if let Some(pos) = pending.iter().filter_map(|d| d.front().copied()).min() {
        return Err(Violation::Missing { gate: original.gates()[pos].id, text: describe(&original.gates()[pos]) });
    }
    Ok(layout)
}
