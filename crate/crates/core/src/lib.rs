//! Commutativity of second-order linear time-varying systems.
//!
//! * [`expr`]: coefficient expressions with second-order forward
//!   differentiation.
//! * [`system`]: systems `a2 y'' + a1 y' + a0 y = x` on a closed domain.
//! * [`commutativity`]: the constancy test and commutative-pair synthesis.
//! * [`catalog`]: thirty named equations with their conditions and
//!   conjugates, and a cross-checker for them.
//! * [`sim`]: fixed-step RK4 simulation of systems and cascades.
//! * [`channel`]: the transmitter/receiver demonstration.
//! * [`io`]: system files and trajectory CSV.

pub mod catalog;
pub mod channel;
pub mod commutativity;
pub mod expr;
pub mod io;
pub mod sim;
pub mod system;

pub use commutativity::{check_commutativity, feedback_pair, synthesize_pair, PairConstants, Verdict};
pub use expr::{parse_expr, Expr, Jet2, Params};
pub use sim::{integrate, simulate_chain, InputSignal, Trajectory};
pub use system::{Domain, InitialConditions, LtvSystem};
