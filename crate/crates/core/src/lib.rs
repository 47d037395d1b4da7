//! Stabilizer Bell inequalities for graph states.
//!
//! Pauli algebra, graph states and local complementation, graph and
//! Mermin-Klyshko Bell operators, exact local-hidden-variable bounds,
//! depolarizing noise and analysis of stabilizer measurement data.

pub mod analysis;
pub mod bell;
pub mod error;
pub mod graph;
pub mod lhv;
pub mod noise;
pub mod pauli;
pub mod stabilizer;
pub mod state;

pub use error::{Error, Result};
