//! Logical circuits, the line-oriented circuit file format, and the gate
//! dependency DAG the router consumes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("gate {gate}: qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { gate: usize, qubit: usize, width: usize },
    #[error("gate {gate}: control and target are both qubit {qubit}")]
    SameQubit { gate: usize, qubit: usize },
    #[error("duplicate gate id {0}")]
    DuplicateId(usize),
    #[error("dependency graph contains a cycle")]
    Cycle,
}

/// Whether a gate came from the input program or was inserted by routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Original,
    InsertedSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Single(usize),
    Two { control: usize, target: usize },
}

impl GateKind {
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            GateKind::Single(q) => (q, None),
            GateKind::Two { control, target } => (control, Some(target)),
        };
        std::iter::once(a).chain(b)
    }

    pub fn is_two(&self) -> bool {
        matches!(self, GateKind::Two { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: usize,
    pub kind: GateKind,
    pub label: String,
    pub origin: Origin,
}

impl Gate {
    pub fn single(id: usize, label: impl Into<String>, q: usize) -> Self {
        Gate {
            id,
            kind: GateKind::Single(q),
            label: label.into(),
            origin: Origin::Original,
        }
    }

    pub fn two(id: usize, label: impl Into<String>, control: usize, target: usize) -> Self {
        Gate {
            id,
            kind: GateKind::Two { control, target },
            label: label.into(),
            origin: Origin::Original,
        }
    }

    pub fn cx(id: usize, control: usize, target: usize) -> Self {
        Self::two(id, "cx", control, target)
    }

    pub fn is_swap(&self) -> bool {
        self.kind.is_two() && self.label == "swap"
    }

    /// Same label and operands, ignoring id and origin.
    pub fn same_operation(&self, other: &Gate) -> bool {
        self.kind == other.kind && self.label == other.label
    }
}

/// A validated gate list over `width` qubits in program order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut seen = std::collections::HashSet::with_capacity(gates.len());
        for g in &gates {
            if !seen.insert(g.id) {
                return Err(CircuitError::DuplicateId(g.id));
            }
            for q in g.kind.qubits() {
                if q >= width {
                    return Err(CircuitError::QubitOutOfRange { gate: g.id, qubit: q, width });
                }
            }
            if let GateKind::Two { control, target } = g.kind {
                if control == target {
                    return Err(CircuitError::SameQubit { gate: g.id, qubit: control });
                }
            }
        }
        Ok(Circuit { width, gates })
    }

    /// An empty circuit to be filled with [`Circuit::push`].
    pub fn empty(width: usize) -> Self {
        Circuit { width, gates: Vec::new() }
    }

    /// Appends an original gate with the next sequential id.
    pub fn push(&mut self, kind: GateKind, label: &str) -> Result<usize, CircuitError> {
        self.push_with_origin(kind, label, Origin::Original)
    }

    pub fn push_with_origin(&mut self, kind: GateKind, label: &str, origin: Origin) -> Result<usize, CircuitError> {
        let id = self.gates.last().map_or(0, |g| g.id + 1);
        let gate = Gate {
            id,
            kind,
            label: label.to_string(),
            origin,
        };
        for q in kind.qubits() {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange { gate: id, qubit: q, width: self.width });
            }
        }
        if let GateKind::Two { control, target } = kind {
            if control == target {
                return Err(CircuitError::SameQubit { gate: id, qubit: control });
            }
        }
        self.gates.push(gate);
        Ok(id)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_two()).count()
    }

    /// Gate sequence with ids dropped, for comparisons "up to ids".
    pub fn operations(&self) -> Vec<(GateKind, &str)> {
        self.gates.iter().map(|g| (g.kind, g.label.as_str())).collect()
    }

    pub fn to_text(&self) -> String {
        emit_circuit(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_circuit(self))
    }
}

impl std::str::FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_circuit(s)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize, CircuitError> {
    tok.parse().map_err(|_| CircuitError::Syntax {
        line,
        msg: format!("expected a qubit index, found `{tok}`"),
    })
}

/// Parses the circuit file format: a `qubits <N>` header followed by one gate
/// per line. Gate ids are assigned sequentially in file order.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut width = None;
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let Some(w) = width else {
            match toks.as_slice() {
                ["qubits", n] => {
                    width = Some(n.parse::<usize>().map_err(|_| CircuitError::Syntax {
                        line: line_no,
                        msg: format!("invalid qubit count `{n}`"),
                    })?);
                    continue;
                }
                _ => {
                    return Err(CircuitError::Syntax {
                        line: line_no,
                        msg: "expected `qubits <N>` header".into(),
                    })
                }
            }
        };
        let id = gates.len();
        let gate = match toks.as_slice() {
            ["qubits", ..] => {
                return Err(CircuitError::Syntax {
                    line: line_no,
                    msg: "duplicate `qubits` header".into(),
                })
            }
            [label, q] => Gate::single(id, *label, parse_index(q, line_no)?),
            [label, a, b] => {
                if *label != "cx" && *label != "swap" {
                    return Err(CircuitError::Syntax {
                        line: line_no,
                        msg: format!("unsupported two-qubit gate `{label}` (expected cx or swap)"),
                    });
                }
                Gate::two(id, *label, parse_index(a, line_no)?, parse_index(b, line_no)?)
            }
            _ => {
                return Err(CircuitError::Syntax {
                    line: line_no,
                    msg: format!("cannot parse gate line `{}`", raw.trim()),
                })
            }
        };
        for q in gate.kind.qubits() {
            if q >= w {
                return Err(CircuitError::QubitOutOfRange { gate: id, qubit: q, width: w });
            }
        }
        if let GateKind::Two { control, target } = gate.kind {
            if control == target {
                return Err(CircuitError::SameQubit { gate: id, qubit: control });
            }
        }
        gates.push(gate);
    }
    let width = width.ok_or(CircuitError::Syntax {
        line: 1,
        msg: "missing `qubits <N>` header".into(),
    })?;
    Circuit::new(width, gates)
}

pub fn emit_circuit(c: &Circuit) -> String {
    use std::fmt::Write;
    let mut out = format!("qubits {}\n", c.width);
    for g in &c.gates {
        match g.kind {
            GateKind::Single(q) => writeln!(out, "{} {}", g.label, q),
            GateKind::Two { control, target } => {
                writeln!(out, "{} {} {}", g.label, control, target)
            }
        }
        .expect("writing to a String cannot fail");
    }
    out
}

/// Dependency DAG over the gates of a circuit. Nodes are gate positions in
/// program order; `ids` maps positions back to gate ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateDag {
    ids: Vec<usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl GateDag {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succs[node]
    }

    /// Edges as (pred id, succ id), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self
            .succs
            .iter()
            .enumerate()
            .flat_map(|(a, ss)| ss.iter().map(move |&b| (a, b)))
            .map(|(a, b)| (self.ids[a], self.ids[b]))
            .collect();
        out.sort_unstable();
        out
    }

    /// Ids of gates with no predecessor, ascending.
    pub fn frontier(&self) -> Vec<usize> {
        let mut f: Vec<_> = (0..self.len())
            .filter(|&n| self.preds[n].is_empty())
            .map(|n| self.ids[n])
            .collect();
        f.sort_unstable();
        f
    }

    /// Builds a DAG directly from node ids and (pred position, succ position)
    /// edges. Intended for tests that need malformed graphs.
    pub fn from_edges(ids: Vec<usize>, edges: &[(usize, usize)]) -> Self {
        let n = ids.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in edges {
            if !succs[a].contains(&b) {
                succs[a].push(b);
                preds[b].push(a);
            }
        }
        GateDag { ids, preds, succs }
    }
}

/// One edge per shared qubit from the most recent earlier gate on that qubit.
pub fn build_dag(c: &Circuit) -> GateDag {
    let n = c.gates.len();
    let mut last_on: Vec<Option<usize>> = vec![None; c.width];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (pos, g) in c.gates.iter().enumerate() {
        for q in g.kind.qubits() {
            if let Some(p) = last_on[q] {
                // cx a b after cx a b shares two qubits but needs one edge
                if !preds[pos].contains(&p) {
                    preds[pos].push(p);
                    succs[p].push(pos);
                }
            }
            last_on[q] = Some(pos);
        }
    }
    GateDag {
        ids: c.gates.iter().map(|g| g.id).collect(),
        preds,
        succs,
    }
}

/// Kahn's algorithm with the ready set ordered by gate id.
pub fn topo_order(d: &GateDag) -> Result<Vec<usize>, CircuitError> {
    topo_positions(d).map(|order| order.into_iter().map(|p| d.ids[p]).collect())
}

/// Like [`topo_order`] but yields node positions instead of gate ids.
pub fn topo_positions(d: &GateDag) -> Result<Vec<usize>, CircuitError> {
    let n = d.len();
    let mut indeg: Vec<usize> = d.preds.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..n)
        .filter(|&p| indeg[p] == 0)
        .map(|p| Reverse((d.ids[p], p)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, p))) = ready.pop() {
        order.push(p);
        for &s in &d.succs[p] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(Reverse((d.ids[s], s)));
            }
        }
    }
    if order.len() != n {
        return Err(CircuitError::Cycle);
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(width: usize, gates: Vec<Gate>) -> Circuit {
        Circuit::new(width, gates).unwrap()
    }

    #[test]
    fn parse_single_cx() {
        let c = parse_circuit("qubits 2\ncx 0 1").unwrap();
        assert_eq!(c.width(), 2);
        assert_eq!(c.gates(), &[Gate::cx(0, 0, 1)]);
    }

    #[test]
    fn parse_two_singles_in_order() {
        let c = parse_circuit("qubits 1\nu 0\nu 0").unwrap();
        assert_eq!(c.operations(), vec![(GateKind::Single(0), "u"), (GateKind::Single(0), "u")]);
        assert_eq!(c.gates()[0].id, 0);
        assert_eq!(c.gates()[1].id, 1);
    }

    #[test]
    fn parse_rejects_same_qubit() {
        assert_eq!(
            parse_circuit("qubits 2\ncx 0 0"),
            Err(CircuitError::SameQubit { gate: 0, qubit: 0 })
        );
    }

    #[test]
    fn parse_errors_report_lines() {
        let err = parse_circuit("qubits 2\n# note\n\nh 0\nfoo 0 1\n").unwrap_err();
        assert_eq!(err, CircuitError::Syntax { line: 5, msg: "unsupported two-qubit gate `foo` (expected cx or swap)".into() });
        assert!(matches!(parse_circuit("cx 0 1"), Err(CircuitError::Syntax { line: 1, .. })));
        assert!(matches!(parse_circuit("qubits 2\nh x"), Err(CircuitError::Syntax { line: 2, .. })));
        assert!(matches!(parse_circuit("qubits 2\ncx 0 1 2"), Err(CircuitError::Syntax { line: 2, .. })));
        assert!(matches!(parse_circuit(""), Err(CircuitError::Syntax { .. })));
        assert_eq!(
            parse_circuit("qubits 2\ncx 0 2"),
            Err(CircuitError::QubitOutOfRange { gate: 0, qubit: 2, width: 2 })
        );
    }

    #[test]
    fn parse_accepts_comments_and_unknown_singles() {
        let c = parse_circuit("# header comment\nqubits 3 # three\n\nrz 2 # param ignored\nswap 0 1\n").unwrap();
        assert_eq!(c.operations(), vec![
            (GateKind::Single(2), "rz"),
            (GateKind::Two { control: 0, target: 1 }, "swap"),
        ]);
    }

    #[test]
    fn emit_examples() {
        assert_eq!(emit_circuit(&circ(2, vec![Gate::cx(0, 0, 1)])), "qubits 2\ncx 0 1\n");
        assert_eq!(emit_circuit(&Circuit::empty(3)), "qubits 3\n");
    }

    #[test]
    fn dag_single_shared_qubit() {
        let d = build_dag(&circ(2, vec![Gate::single(0, "u", 0), Gate::cx(1, 0, 1)]));
        assert_eq!(d.edges(), vec![(0, 1)]);
        assert_eq!(d.frontier(), vec![0]);
    }

    #[test]
    fn dag_disjoint_gates() {
        let d = build_dag(&circ(4, vec![Gate::cx(0, 0, 1), Gate::cx(1, 2, 3)]));
        assert!(d.edges().is_empty());
        assert_eq!(d.frontier(), vec![0, 1]);
    }

    #[test]
    fn dag_chain_on_qubit() {
        let d = build_dag(&circ(3, vec![Gate::cx(0, 0, 1), Gate::single(1, "u", 1), Gate::cx(2, 1, 2)]));
        assert_eq!(d.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn dag_repeated_pair_has_one_edge() {
        let d = build_dag(&circ(2, vec![Gate::cx(0, 0, 1), Gate::cx(1, 1, 0)]));
        assert_eq!(d.edges(), vec![(0, 1)]);
    }

    #[test]
    fn topo_examples() {
        let chain = build_dag(&circ(1, vec![
            Gate::single(0, "u", 0),
            Gate::single(1, "u", 0),
            Gate::single(2, "u", 0),
        ]));
        assert_eq!(topo_order(&chain).unwrap(), vec![0, 1, 2]);
        let indep = build_dag(&circ(2, vec![Gate::single(0, "u", 0), Gate::single(1, "u", 1)]));
        assert_eq!(topo_order(&indep).unwrap(), vec![0, 1]);
    }

    #[test]
    fn topo_breaks_ties_by_id_not_position() {
        let c = circ(2, vec![Gate::single(7, "u", 0), Gate::single(3, "u", 1)]);
        assert_eq!(topo_order(&build_dag(&c)).unwrap(), vec![3, 7]);
    }

    #[test]
    fn topo_detects_cycle() {
        let d = GateDag::from_edges(vec![0, 1, 2], &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(topo_order(&d), Err(CircuitError::Cycle));
    }

    #[test]
    fn circuit_new_rejects_duplicates() {
        assert_eq!(
            Circuit::new(2, vec![Gate::single(0, "u", 0), Gate::single(0, "u", 1)]),
            Err(CircuitError::DuplicateId(0))
        );
    }
}
