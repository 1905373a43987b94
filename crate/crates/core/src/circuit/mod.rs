//! Linear AC analysis of two-port netlists: element stamps, nodal solve,
//! frequency sweeps and response comparison.

mod ac;
mod netlist;
mod response;

pub use ac::{ac_solve, linspace, sweep, SMatrix, LINE_GUARD, LINE_NUDGE, MIN_FREQUENCY};
pub use netlist::{Element, ElementKind, Netlist, NetlistBuilder, NodeId, Port, GROUND};
pub use response::{db, EquivalenceReport, FrequencyResponse, SweepFlag};
