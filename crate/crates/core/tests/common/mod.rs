//! Test-only oracles, written independently of the library code they check.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use bqa_core::chip::{CouplingGraph, DurationTable};
use bqa_core::circuit::{Circuit, GateKind};
use bqa_core::workloads::WorkloadRng;

fn gate_duration(label: &str, kind: GateKind, dur: &DurationTable) -> f64 {
    match kind {
        GateKind::Single(q) => dur.single_us(q),
        GateKind::Two { control, target } => {
            let cnot = dur.cnot_us(control, target).expect("oracle input must be routed");
            if label == "swap" {
                dur.swap_factor() * cnot
            } else {
                cnot
            }
        }
    }
}

/// Discrete-event simulation of a physical circuit: each qubit executes its
/// gates in program order, a gate starts at the event time when all of its
/// qubits are free and it heads every one of their queues. Returns per-qubit
/// finish times.
pub fn event_driven_schedule(c: &Circuit, dur: &DurationTable) -> Vec<f64> {
    let n = c.width();
    let gates = c.gates();
    let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); n];
    for (i, g) in gates.iter().enumerate() {
        for q in g.kind.qubits() {
            queues[q].push_back(i);
        }
    }
    let mut busy = vec![false; n];
    let mut finish = vec![0.0f64; n];
    // finish times are non-negative, so their bit patterns order like the values
    let mut events: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    let mut started = vec![false; gates.len()];

    let try_start = |g: usize,
                     now: f64,
                     busy: &mut [bool],
                     queues: &[VecDeque<usize>],
                     started: &mut [bool],
                     events: &mut BinaryHeap<Reverse<(u64, usize)>>| {
        if started[g] {
            return;
        }
        let qs: Vec<usize> = gates[g].kind.qubits().collect();
        if qs.iter().all(|&q| !busy[q] && queues[q].front() == Some(&g)) {
            started[g] = true;
            for &q in &qs {
                busy[q] = true;
            }
            let end = now + gate_duration(&gates[g].label, gates[g].kind, dur);
            events.push(Reverse((end.to_bits(), g)));
        }
    };

    for q in 0..n {
        if let Some(&g) = queues[q].front() {
            try_start(g, 0.0, &mut busy, &queues, &mut started, &mut events);
        }
    }
    while let Some(Reverse((bits, g))) = events.pop() {
        let now = f64::from_bits(bits);
        let qs: Vec<usize> = gates[g].kind.qubits().collect();
        for &q in &qs {
            busy[q] = false;
            finish[q] = now;
            queues[q].pop_front();
        }
        for &q in &qs {
            if let Some(&next) = queues[q].front() {
                try_start(next, now, &mut busy, &queues, &mut started, &mut events);
            }
        }
    }
    assert!(queues.iter().all(VecDeque::is_empty), "event simulation deadlocked");
    finish
}

/// Clock fold over an arbitrary gate order (positions into `c`).
pub fn fold_in_order(c: &Circuit, order: &[usize], dur: &DurationTable) -> Vec<f64> {
    let mut t = vec![0.0f64; c.width()];
    for &i in order {
        let g = &c.gates()[i];
        let d = gate_duration(&g.label, g.kind, dur);
        match g.kind {
            GateKind::Single(q) => t[q] += d,
            GateKind::Two { control, target } => {
                let v = t[control].max(t[target]) + d;
                t[control] = v;
                t[target] = v;
            }
        }
    }
    t
}

/// Uniformly random choice among ready gates at every step, using
/// per-qubit program order as the only dependency.
pub fn random_topological_order(c: &Circuit, rng: &mut WorkloadRng) -> Vec<usize> {
    let n = c.width();
    let mut queues: Vec<VecDeque<usize>> = vec![VecDeque::new(); n];
    for (i, g) in c.gates().iter().enumerate() {
        for q in g.kind.qubits() {
            queues[q].push_back(i);
        }
    }
    let is_ready = |g: usize, queues: &[VecDeque<usize>]| c.gates()[g].kind.qubits().all(|q| queues[q].front() == Some(&g));
    let mut order = Vec::with_capacity(c.len());
    while order.len() < c.len() {
        let mut ready: Vec<usize> = queues.iter().filter_map(|d| d.front().copied()).filter(|&g| is_ready(g, &queues)).collect();
        ready.sort_unstable();
        ready.dedup();
        let g = ready[rng.below(ready.len())];
        for q in c.gates()[g].kind.qubits() {
            queues[q].pop_front();
        }
        order.push(g);
    }
    order
}

pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u32>> {
    const INF: u32 = u32::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every path of exactly `len` edges from `a` to `b`, by plain DFS.
pub fn paths_of_length(g: &CouplingGraph, a: usize, b: usize, len: usize) -> Vec<Vec<usize>> {
    fn dfs(g: &CouplingGraph, path: &mut Vec<usize>, b: usize, len: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if path.len() == len + 1 {
            if last == b {
                out.push(path.clone());
            }
            return;
        }
        for &x in g.neighbors(last) {
            if !path.contains(&x) {
                path.push(x);
                dfs(g, path, b, len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    dfs(g, &mut vec![a], b, len, &mut out);
    out
}

/// Random connected graph: a random spanning tree plus extra random edges.
pub fn random_connected_graph(n: usize, extra: usize, rng: &mut WorkloadRng) -> CouplingGraph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.below(v), v));
    }
    for _ in 0..extra {
        let a = rng.below(n);
        let b = rng.below(n);
        if a != b {
            edges.push((a, b));
        }
    }
    CouplingGraph::new(n, edges).expect("spanning tree keeps the graph connected")
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite makespans"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
