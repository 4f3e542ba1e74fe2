//! Seeded random gate sequences and structural benchmark circuits.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Draws are mapped to values
//! without going through a distribution library so that streams can be
//! reproduced by any implementation of the generator:
//!
//! * probability test: `(x >> 11) * 2^-53 < p`
//! * index in `0..n`: `(x as u128 * n as u128) >> 64`

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::circuit::{Circuit, GateKind};

#[derive(Debug, Error, PartialEq)]
pub enum WorkloadError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("two-qubit gates need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("unknown benchmark `{0}` (expected and, or, grover, qv)")]
    UnknownBenchmark(String),
    #[error("{name} needs {need} qubits, got {got}")]
    BadWidth { name: &'static str, need: &'static str, got: usize },
}

/// Portable sampling on top of xoshiro256++.
#[derive(Debug, Clone)]
pub struct WorkloadRng(Xoshiro256PlusPlus);

impl WorkloadRng {
    pub fn new(seed: u64) -> Self {
        WorkloadRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }

    /// Fisher-Yates, drawing `below(i + 1)` for `i` from the top down.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub qubits: usize,
    pub gates: usize,
    pub p_cx: f64,
    pub seed: u64,
}

impl RandomSpec {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        if !(0.0..=1.0).contains(&self.p_cx) {
            return Err(WorkloadError::Probability(self.p_cx));
        }
        if self.qubits == 0 || (self.p_cx > 0.0 && self.qubits < 2) {
            return Err(WorkloadError::TooFewQubits(self.qubits));
        }
        Ok(())
    }
}

impl fmt::Display for RandomSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.qubits, self.gates, self.p_cx, self.seed)
    }
}

/// `q,g,p,seed` as on the command line.
impl FromStr for RandomSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [q, g, p, seed] = parts.as_slice() else {
            return Err(format!("expected `qubits,gates,p_cx,seed`, got `{s}`"));
        };
        let bad = |what: &str, v: &str| format!("invalid {what} `{v}` in random spec");
        Ok(RandomSpec {
            qubits: q.parse().map_err(|_| bad("qubit count", q))?,
            gates: g.parse().map_err(|_| bad("gate count", g))?,
            p_cx: p.parse().map_err(|_| bad("probability", p))?,
            seed: seed.parse().map_err(|_| bad("seed", seed))?,
        })
    }
}

/// Each gate is independently a `cx` on a uniform ordered pair of distinct
/// qubits with probability `p_cx`, otherwise a `u` on a uniform qubit.
pub fn gen_random(spec: &RandomSpec) -> Result<Circuit, WorkloadError> {
    spec.validate()?;
    let mut rng = WorkloadRng::new(spec.seed);
    let mut c = Circuit::empty(spec.qubits);
    for _ in 0..spec.gates {
        let kind = if rng.unit() < spec.p_cx {
            let control = rng.below(spec.qubits);
            let mut target = rng.below(spec.qubits - 1);
            if target >= control {
                target += 1;
            }
            GateKind::Two { control, target }
        } else {
            GateKind::Single(rng.below(spec.qubits))
        };
        c.push(kind, if kind.is_two() { "cx" } else { "u" }).expect("generated indices are in range");
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    And,
    Or,
    Grover,
    Qv,
}

impl FromStr for Benchmark {
    type Err = WorkloadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(Benchmark::And),
            "or" => Ok(Benchmark::Or),
            "grover" => Ok(Benchmark::Grover),
            "qv" => Ok(Benchmark::Qv),
            _ => Err(WorkloadError::UnknownBenchmark(s.to_string())),
        }
    }
}

/// Structural stand-ins for the benchmark families. They reproduce the CNOT
/// placement pattern that matters for routing, not the algorithms' function.
///
/// * `and`: a Toffoli V-chain computing into the last qubit and uncomputing
///   the intermediate targets, each Toffoli in the 6-CNOT decomposition.
/// * `or`: the `and` chain wrapped in X gates (De Morgan).
/// * `grover`: `floor(pi/4 * sqrt(2^n))` rounds of oracle + diffusion.
/// * `qv`: `n` layers, each a random perfect matching with a 3-`cx`, 4-`u`
///   block per pair. Only `qv` consumes the seed.
pub fn gen_benchmark(bench: Benchmark, qubits: usize, seed: u64) -> Result<Circuit, WorkloadError> {
    match bench {
        Benchmark::And => and_chain(qubits, false),
        Benchmark::Or => and_chain(qubits, true),
        Benchmark::Grover => grover_circuit(qubits, grover_rounds(qubits)),
        Benchmark::Qv => quantum_volume(qubits, seed),
    }
}

fn toffoli(c: &mut Circuit, a: usize, b: usize, t: usize) {
    let ops: [(&str, GateKind); 15] = [
        ("h", GateKind::Single(t)),
        ("cx", GateKind::Two { control: b, target: t }),
        ("tdg", GateKind::Single(t)),
        ("cx", GateKind::Two { control: a, target: t }),
        ("t", GateKind::Single(t)),
        ("cx", GateKind::Two { control: b, target: t }),
        ("tdg", GateKind::Single(t)),
        ("cx", GateKind::Two { control: a, target: t }),
        ("t", GateKind::Single(b)),
        ("t", GateKind::Single(t)),
        ("h", GateKind::Single(t)),
        ("cx", GateKind::Two { control: a, target: b }),
        ("t", GateKind::Single(a)),
        ("tdg", GateKind::Single(b)),
        ("cx", GateKind::Two { control: a, target: b }),
    ];
    for (label, kind) in ops {
        c.push(kind, label).expect("toffoli operands are distinct and in range");
    }
}

fn and_chain(qubits: usize, negate: bool) -> Result<Circuit, WorkloadError> {
    let name = if negate { "or" } else { "and" };
    if qubits < 3 {
        return Err(WorkloadError::BadWidth { name, need: "at least 3", got: qubits });
    }
    let mut c = Circuit::empty(qubits);
    let x_layer = |c: &mut Circuit| {
        for q in 0..qubits {
            c.push(GateKind::Single(q), "x").expect("in range");
        }
    };
    if negate {
        x_layer(&mut c);
    }
    // compute: (0,1)->2, (2,3)->4 ... then uncompute every step but the last
    let steps: Vec<(usize, usize, usize)> = (0..qubits - 2).map(|i| (i, i + 1, i + 2)).collect();
    for &(a, b, t) in &steps {
        toffoli(&mut c, a, b, t);
    }
    for &(a, b, t) in steps.iter().rev().skip(1) {
        toffoli(&mut c, a, b, t);
    }
    if negate {
        x_layer(&mut c);
    }
    Ok(c)
}

pub fn grover_rounds(qubits: usize) -> usize {
    ((PI / 4.0) * 2f64.powf(qubits as f64 / 2.0)).floor().max(1.0) as usize
}

/// Each round: an oracle (CNOT ladder down and back up around a phase gate)
/// and a diffusion (H and X layers around the same ladder).
pub fn grover_circuit(qubits: usize, rounds: usize) -> Result<Circuit, WorkloadError> {
    if qubits < 2 {
        return Err(WorkloadError::BadWidth { name: "grover", need: "at least 2", got: qubits });
    }
    let mut c = Circuit::empty(qubits);
    let layer = |c: &mut Circuit, label: &str| {
        for q in 0..qubits {
            c.push(GateKind::Single(q), label).expect("in range");
        }
    };
    let ladder = |c: &mut Circuit, label: &str| {
        for i in 0..qubits - 1 {
            c.push(GateKind::Two { control: i, target: i + 1 }, "cx").expect("in range");
        }
        c.push(GateKind::Single(qubits - 1), label).expect("in range");
        for i in (0..qubits - 1).rev() {
            c.push(GateKind::Two { control: i, target: i + 1 }, "cx").expect("in range");
        }
    };
    layer(&mut c, "h");
    for _ in 0..rounds {
        ladder(&mut c, "z");
        layer(&mut c, "h");
        layer(&mut c, "x");
        ladder(&mut c, "z");
        layer(&mut c, "x");
        layer(&mut c, "h");
    }
    Ok(c)
}

fn quantum_volume(qubits: usize, seed: u64) -> Result<Circuit, WorkloadError> {
    if qubits < 2 || !qubits.is_multiple_of(2) {
        return Err(WorkloadError::BadWidth { name: "qv", need: "an even number of", got: qubits });
    }
    let mut rng = WorkloadRng::new(seed);
    let mut c = Circuit::empty(qubits);
    let mut perm: Vec<usize> = (0..qubits).collect();
    for _ in 0..qubits {
        rng.shuffle(&mut perm);
        for pair in perm.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            for (label, kind) in [
                ("u", GateKind::Single(a)),
                ("u", GateKind::Single(b)),
                ("cx", GateKind::Two { control: a, target: b }),
                ("cx", GateKind::Two { control: b, target: a }),
                ("cx", GateKind::Two { control: a, target: b }),
                ("u", GateKind::Single(a)),
                ("u", GateKind::Single(b)),
            ] {
                c.push(kind, label).expect("in range");
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(c: &Circuit) -> (usize, usize) {
        let two = c.two_qubit_count();
        (two, c.len() - two)
    }

    #[test]
    fn random_spec_shape() {
        let c = gen_random(&RandomSpec { qubits: 16, gates: 950, p_cx: 0.5, seed: 3 }).unwrap();
        assert_eq!(c.width(), 16);
        assert_eq!(c.len(), 950);
    }

    #[test]
    fn random_degenerate_probabilities() {
        let c = gen_random(&RandomSpec { qubits: 5, gates: 300, p_cx: 0.0, seed: 1 }).unwrap();
        assert_eq!(counts(&c), (0, 300));
        let c = gen_random(&RandomSpec { qubits: 5, gates: 10_000, p_cx: 1.0, seed: 1 }).unwrap();
        assert_eq!(counts(&c), (10_000, 0));
        // p_cx = 0 allows a single qubit
        assert!(gen_random(&RandomSpec { qubits: 1, gates: 4, p_cx: 0.0, seed: 1 }).is_ok());
    }

    #[test]
    fn random_fraction_within_binomial_bounds() {
        // sd = sqrt(0.3 * 0.7 / 10000) ~= 0.0046; 0.03 is > 6 sd
        for seed in 0..5 {
            let c = gen_random(&RandomSpec { qubits: 8, gates: 10_000, p_cx: 0.3, seed }).unwrap();
            let frac = c.two_qubit_count() as f64 / 10_000.0;
            assert!((frac - 0.3).abs() <= 0.03, "seed {seed}: {frac}");
        }
    }

    #[test]
    fn random_pairs_cover_all_ordered_pairs() {
        let c = gen_random(&RandomSpec { qubits: 4, gates: 2000, p_cx: 1.0, seed: 9 }).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for g in c.gates() {
            if let GateKind::Two { control, target } = g.kind {
                seen.insert((control, target));
            }
        }
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn random_spec_errors() {
        assert_eq!(
            gen_random(&RandomSpec { qubits: 4, gates: 1, p_cx: 1.5, seed: 0 }),
            Err(WorkloadError::Probability(1.5))
        );
        assert_eq!(
            gen_random(&RandomSpec { qubits: 1, gates: 1, p_cx: 0.5, seed: 0 }),
            Err(WorkloadError::TooFewQubits(1))
        );
    }

    #[test]
    fn random_is_deterministic_in_seed() {
        let spec = RandomSpec { qubits: 16, gates: 500, p_cx: 0.7, seed: 42 };
        assert_eq!(gen_random(&spec).unwrap(), gen_random(&spec).unwrap());
        let other = RandomSpec { seed: 43, ..spec };
        assert_ne!(gen_random(&spec).unwrap(), gen_random(&other).unwrap());
    }

    #[test]
    fn rng_stream_is_pinned() {
        // xoshiro256++ seeded by SplitMix64(0); guards against silent generator changes
        let mut rng = WorkloadRng::new(0);
        let first = rng.next_u64();
        let mut again = WorkloadRng::new(0);
        assert_eq!(first, again.next_u64());
        assert_eq!(first, 0x53175d61490b23df);
    }

    #[test]
    fn parse_random_spec() {
        assert_eq!(
            "16,950,0.9,7".parse::<RandomSpec>().unwrap(),
            RandomSpec { qubits: 16, gates: 950, p_cx: 0.9, seed: 7 }
        );
        assert!("16,950,0.9".parse::<RandomSpec>().is_err());
    }

    #[test]
    fn qv_counts() {
        let c = gen_benchmark(Benchmark::Qv, 4, 11).unwrap();
        assert_eq!(counts(&c), (24, 32));
        assert!(gen_benchmark(Benchmark::Qv, 5, 11).is_err());
    }

    #[test]
    fn grover_one_round_touches_adjacent_pairs() {
        let c = grover_circuit(4, 1).unwrap();
        for i in 0..3 {
            assert!(c.gates().iter().any(|g| g.kind == GateKind::Two { control: i, target: i + 1 }));
        }
        assert_eq!(grover_rounds(4), 3);
    }

    #[test]
    fn benchmarks_deterministic_and_monotone() {
        for b in [Benchmark::And, Benchmark::Or, Benchmark::Grover, Benchmark::Qv] {
            let mut prev = 0;
            for n in [4, 6, 8, 10] {
                let c = gen_benchmark(b, n, 5).unwrap();
                assert_eq!(c, gen_benchmark(b, n, 5).unwrap());
                assert!(c.len() >= prev, "{b:?} shrinks at {n}");
                prev = c.len();
            }
        }
        assert_eq!("GROVER".parse::<Benchmark>(), Ok(Benchmark::Grover));
        assert!("shor".parse::<Benchmark>().is_err());
    }

    #[test]
    fn and_or_chains() {
        let and = gen_benchmark(Benchmark::And, 4, 0).unwrap();
        // 2 compute + 1 uncompute Toffolis
        assert_eq!(counts(&and), (18, 27));
        let or = gen_benchmark(Benchmark::Or, 4, 0).unwrap();
        assert_eq!(counts(&or), (18, 27 + 8));
    }
}
