//! SWAP insertion for coupling-constrained quantum chips.
//!
//! The router walks a circuit's gates in dependency order and, whenever a
//! two-qubit gate lands on uncoupled physical qubits, inserts SWAPs one at a
//! time. Each SWAP is chosen to hide its latency on qubits that are idle in
//! the current stretch of the circuit while keeping upcoming two-qubit gates
//! close together. Execution time is modelled with per-qubit clocks.
//!
//! ```
//! use bqa_core::{chip, circuit, router};
//!
//! let chip = chip::make_linear(4).unwrap();
//! let durations = chip::DurationTable::uniform(&chip, 0.1, 0.5, 3.0).unwrap();
//! let c = circuit::parse_circuit("qubits 4\ncx 1 3\ncx 0 1\n").unwrap();
//! let routed = router::route(&c, &chip, &durations, &router::RouterConfig::default()).unwrap();
//! assert_eq!(routed.swap_count, 1);
//! ```

pub mod batch;
pub mod chip;
pub mod circuit;
pub mod clock;
pub mod layout;
pub mod report;
pub mod router;
pub mod sweep;
pub mod workloads;

pub use batch::Execution;
pub use chip::{ChipSpec, CouplingGraph, DurationTable};
pub use circuit::{Circuit, Gate, GateKind};
pub use clock::{simulate, QubitClocks, ScheduleReport};
pub use layout::Layout;
pub use router::{route, route_greedy_baseline, route_with, verify_routed, RoutedResult, RouterConfig, Strategy};
