//! Physical chip model: coupling graph, gate durations, built-in topologies,
//! and the shortest-path queries used by the router.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Single-qubit gate time used by built-in chips and as the chip-file default.
pub const DEFAULT_SINGLE_US: f64 = 0.1;
/// SWAP cost as a multiple of the CNOT time on the same edge (3-CNOT decomposition).
pub const DEFAULT_SWAP_FACTOR: f64 = 3.0;
/// Measured CNOT times of a 10-qubit linear chip, edge (i, i+1) at index i.
pub const CALIBRATED_CNOT_US: [f64; 9] = [0.540, 0.739, 0.675, 0.512, 0.540, 0.540, 0.64, 0.65, 0.248];

#[derive(Debug, Error, PartialEq)]
pub enum ChipError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("coupling graph is disconnected (qubit {0} unreachable from qubit 0)")]
    Disconnected(usize),
    #[error("edge ({0}, {1}) references a qubit outside the chip")]
    UnknownQubit(usize, usize),
    #[error("self-loop on qubit {0}")]
    SelfLoop(usize),
    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("edge ({0}, {1}) has no CNOT time and no default_cnot_us is set")]
    MissingCnot(usize, usize),
    #[error("({a}, {b}) is not a chip edge")]
    NotAnEdge { a: usize, b: usize },
    #[error("qubits {a} and {b} are at distance {dist}; routing candidates need distance >= 2")]
    TooClose { a: usize, b: usize, dist: u32 },
}

fn norm(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected connected coupling graph with precomputed hop distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    dist: Vec<u32>,
}

impl CouplingGraph {
    /// Builds the graph, normalising and deduplicating edges. Fails on
    /// self-loops, out-of-range qubits, or a disconnected graph.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ChipError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(ChipError::UnknownQubit(a, b));
            }
            if a == b {
                return Err(ChipError::SelfLoop(a));
            }
            set.insert(norm(a, b));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let dist = all_pairs_bfs(n, &adjacency);
        if let Some(q) = (0..n).find(|&q| dist[q] == u32::MAX) {
            return Err(ChipError::Disconnected(q));
        }
        Ok(CouplingGraph { n, edges, adjacency, dist })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Sorted `(min, max)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n + b]
    }

    #[inline]
    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.dist(a, b) == 1
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

fn all_pairs_bfs(n: usize, adjacency: &[Vec<usize>]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for src in 0..n {
        let row = &mut dist[src * n..(src + 1) * n];
        row[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = row[u] + 1;
            for &v in &adjacency[u] {
                if row[v] == u32::MAX {
                    row[v] = d;
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

pub fn make_linear(n: usize) -> Result<CouplingGraph, ChipError> {
    if n < 2 {
        return Err(ChipError::Topology(format!("linear chip needs at least 2 qubits, got {n}")));
    }
    CouplingGraph::new(n, (0..n - 1).map(|i| (i, i + 1)))
}

/// A line folded in half: qubit `i` is also coupled to `n - 1 - i`.
pub fn make_ladder(n: usize) -> Result<CouplingGraph, ChipError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(ChipError::Topology(format!("ladder chip needs an even qubit count >= 4, got {n}")));
    }
    let rungs = (0..n / 2).map(|i| (i, n - 1 - i));
    CouplingGraph::new(n, (0..n - 1).map(|i| (i, i + 1)).chain(rungs))
}

/// Grid with qubit `(r, c)` at index `r * cols + c`.
pub fn make_square(rows: usize, cols: usize) -> Result<CouplingGraph, ChipError> {
    if rows < 2 || cols < 2 {
        return Err(ChipError::Topology(format!("square chip needs rows, cols >= 2, got {rows}x{cols}")));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let q = r * cols + c;
            if c + 1 < cols {
                edges.push((q, q + 1));
            }
            if r + 1 < rows {
                edges.push((q, q + cols));
            }
        }
    }
    CouplingGraph::new(rows * cols, edges)
}

/// Gate durations in microseconds. CNOT times are symmetric per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationTable {
    n: usize,
    single_us: Vec<f64>,
    // dense n*n; 0.0 off-edge
    cnot_us: Vec<f64>,
    swap_factor: f64,
}

impl DurationTable {
    /// Every single-qubit time and every edge CNOT time must be positive,
    /// and `cnot` must cover exactly the edges of `graph`.
    pub fn new(
        graph: &CouplingGraph,
        single_us: Vec<f64>,
        cnot: impl IntoIterator<Item = ((usize, usize), f64)>,
        swap_factor: f64,
    ) -> Result<Self, ChipError> {
        let n = graph.num_qubits();
        if single_us.len() != n {
            return Err(ChipError::Topology(format!(
                "expected {n} single-qubit durations, got {}",
                single_us.len()
            )));
        }
        for &t in single_us.iter().chain(std::iter::once(&swap_factor)) {
            check_positive(t)?;
        }
        let mut cnot_us = vec![0.0; n * n];
        for ((a, b), t) in cnot {
            if a >= n || b >= n {
                return Err(ChipError::UnknownQubit(a, b));
            }
            if !graph.is_edge(a, b) {
                return Err(ChipError::NotAnEdge { a, b });
            }
            check_positive(t)?;
            cnot_us[a * n + b] = t;
            cnot_us[b * n + a] = t;
        }
        if let Some(&(a, b)) = graph.edges().iter().find(|&&(a, b)| cnot_us[a * n + b] == 0.0) {
            return Err(ChipError::MissingCnot(a, b));
        }
        Ok(DurationTable { n, single_us, cnot_us, swap_factor })
    }

    pub fn uniform(graph: &CouplingGraph, single_us: f64, cnot_us: f64, swap_factor: f64) -> Result<Self, ChipError> {
        Self::new(
            graph,
            vec![single_us; graph.num_qubits()],
            graph.edges().iter().map(|&e| (e, cnot_us)),
            swap_factor,
        )
    }

    /// Default calibration for built-in chips: 0.1 us single-qubit gates and
    /// the measured linear-chip CNOT times assigned to the sorted edge list,
    /// cycling when the chip has more than nine edges.
    pub fn calibrated_profile(graph: &CouplingGraph) -> Self {
        Self::new(
            graph,
            vec![DEFAULT_SINGLE_US; graph.num_qubits()],
            graph
                .edges()
                .iter()
                .enumerate()
                .map(|(k, &e)| (e, CALIBRATED_CNOT_US[k % CALIBRATED_CNOT_US.len()])),
            DEFAULT_SWAP_FACTOR,
        )
        .expect("built-in profile covers every edge with positive times")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn single_us(&self, q: usize) -> f64 {
        self.single_us[q]
    }

    /// `None` when `(a, b)` is not an edge.
    #[inline]
    pub fn cnot_us(&self, a: usize, b: usize) -> Option<f64> {
        let t = *self.cnot_us.get(a * self.n + b)?;
        (t > 0.0).then_some(t)
    }

    #[inline]
    pub fn swap_us(&self, a: usize, b: usize) -> Option<f64> {
        self.cnot_us(a, b).map(|t| self.swap_factor * t)
    }

    pub fn swap_factor(&self) -> f64 {
        self.swap_factor
    }

    pub fn with_swap_factor(mut self, swap_factor: f64) -> Result<Self, ChipError> {
        check_positive(swap_factor)?;
        self.swap_factor = swap_factor;
        Ok(self)
    }

    /// Multiplies every gate duration by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, ChipError> {
        check_positive(factor)?;
        Ok(DurationTable {
            n: self.n,
            single_us: self.single_us.iter().map(|t| t * factor).collect(),
            cnot_us: self.cnot_us.iter().map(|t| t * factor).collect(),
            swap_factor: self.swap_factor,
        })
    }
}

fn check_positive(t: f64) -> Result<(), ChipError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(ChipError::NonPositiveDuration(t))
    }
}

/// First and last hops of every shortest path between physical qubits `a`
/// and `b`: edges `(a, x)` with `dist(x, b) = d - 1` and `(y, b)` with
/// `dist(a, y) = d - 1`. Sorted by `(min, max)`, deduplicated.
pub fn shortest_first_last_steps(g: &CouplingGraph, a: usize, b: usize) -> Result<Vec<(usize, usize)>, ChipError> {
    let d = g.dist(a, b);
    if d <= 1 {
        return Err(ChipError::TooClose { a, b, dist: d });
    }
    let mut out: Vec<(usize, usize)> = g
        .neighbors(a)
        .iter()
        .filter(|&&x| g.dist(x, b) == d - 1)
        .map(|&x| norm(a, x))
        .chain(
            g.neighbors(b)
                .iter()
                .filter(|&&y| g.dist(a, y) == d - 1)
                .map(|&y| norm(y, b)),
        )
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A chip addressable from the command line: `linear:N`, `ladder:N`,
/// `square:RxC`, or a path to a chip file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChipSpec {
    Linear(usize),
    Ladder(usize),
    Square(usize, usize),
    File(String),
}

impl ChipSpec {
    /// Graph and durations. Built-in chips use [`DurationTable::calibrated_profile`].
    pub fn load(&self) -> Result<(CouplingGraph, DurationTable), ChipError> {
        let graph = match *self {
            ChipSpec::Linear(n) => make_linear(n)?,
            ChipSpec::Ladder(n) => make_ladder(n)?,
            ChipSpec::Square(r, c) => make_square(r, c)?,
            ChipSpec::File(ref path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ChipError::Topology(format!("cannot read chip file {path}: {e}")))?;
                return load_chip(&text);
            }
        };
        let durations = DurationTable::calibrated_profile(&graph);
        Ok((graph, durations))
    }
}

impl FromStr for ChipSpec {
    type Err = ChipError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ChipError::Topology(format!("cannot parse chip spec `{s}`"));
        match s.split_once(':') {
            Some(("linear", n)) => Ok(ChipSpec::Linear(n.parse().map_err(|_| bad())?)),
            Some(("ladder", n)) => Ok(ChipSpec::Ladder(n.parse().map_err(|_| bad())?)),
            Some(("square", rc)) => {
                let (r, c) = rc.split_once('x').ok_or_else(bad)?;
                Ok(ChipSpec::Square(r.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?))
            }
            _ => Ok(ChipSpec::File(s.to_string())),
        }
    }
}

impl fmt::Display for ChipSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChipSpec::Linear(n) => write!(f, "linear:{n}"),
            ChipSpec::Ladder(n) => write!(f, "ladder:{n}"),
            ChipSpec::Square(r, c) => write!(f, "square:{r}x{c}"),
            ChipSpec::File(p) => f.write_str(p),
        }
    }
}

/// Parses the chip file format:
///
/// ```text
/// qubits 10
/// default_single_us 0.1
/// default_cnot_us 0.5
/// swap_factor 3
/// edge 0 1 0.540
/// edge 1 2            # uses default_cnot_us
/// single 3 0.12
/// ```
///
/// `default_single_us` falls back to 0.1 and `swap_factor` to 3 when absent.
pub fn load_chip(text: &str) -> Result<(CouplingGraph, DurationTable), ChipError> {
    let mut n: Option<usize> = None;
    let mut default_single = None;
    let mut default_cnot = None;
    let mut swap_factor = None;
    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    let mut singles: Vec<(usize, f64, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let syntax = |msg: String| ChipError::Syntax { line, msg };
        let int = |t: &str| t.parse::<usize>().map_err(|_| syntax(format!("expected an integer, found `{t}`")));
        let float = |t: &str| t.parse::<f64>().map_err(|_| syntax(format!("expected a number, found `{t}`")));
        match toks.as_slice() {
            ["qubits", v] => n = Some(int(v)?),
            ["default_single_us", v] => default_single = Some(float(v)?),
            ["default_cnot_us", v] => default_cnot = Some(float(v)?),
            ["swap_factor", v] => swap_factor = Some(float(v)?),
            ["edge", a, b] => edges.push((int(a)?, int(b)?, None)),
            ["edge", a, b, t] => edges.push((int(a)?, int(b)?, Some(float(t)?))),
            ["single", q, t] => singles.push((int(q)?, float(t)?, line)),
            _ => return Err(syntax(format!("unrecognised directive `{}`", body.trim()))),
        }
    }

    let n = n.ok_or(ChipError::Syntax { line: 1, msg: "missing `qubits <N>`".into() })?;
    let graph = CouplingGraph::new(n, edges.iter().map(|&(a, b, _)| (a, b)))?;
    let default_single = default_single.unwrap_or(DEFAULT_SINGLE_US);
    check_positive(default_single)?;
    if let Some(t) = default_cnot {
        check_positive(t)?;
    }
    let mut single_us = vec![default_single; n];
    for (q, t, line) in singles {
        if q >= n {
            return Err(ChipError::Syntax { line, msg: format!("qubit {q} outside chip of {n} qubits") });
        }
        single_us[q] = t;
    }
    let mut cnot = Vec::with_capacity(edges.len());
    for (a, b, t) in edges {
        let t = t.or(default_cnot).ok_or(ChipError::MissingCnot(a, b))?;
        cnot.push(((a, b), t));
    }
    let durations = DurationTable::new(&graph, single_us, cnot, swap_factor.unwrap_or(DEFAULT_SWAP_FACTOR))?;
    Ok((graph, durations))
}
