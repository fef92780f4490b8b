//! Simulation and verification toolkit for generalized Q2R automata
//! networks: reversible two-state dynamics on even-degree graphs, with
//! topology generators, period analysis, an algebraic fast-forward, a
//! circuit-to-network compiler, and a parallel-simulator construction.

pub mod accept;
pub mod circuits;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod gf2;
pub mod net;
pub mod ps;
pub mod schedule;
pub mod sim;
pub mod textio;
pub mod topology;

pub use config::{Configuration, Spin};
pub use error::{Q2rError, Result};
pub use net::{BlockClass, Network, ValidationReport, Violation};
pub use schedule::UpdateSchedule;
pub use textio::{parse_bundle, parse_network, write_bundle, write_network, Bundle, PredQuery};
