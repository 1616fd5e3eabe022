//! Entanglement numerics for multipartite qubit and qudit states, and an
//! engine that evaluates α-power monogamy relations (with residual
//! correlation terms) for concurrence and entanglement of formation.

pub mod catalog;
pub mod convex_roof;
pub mod engine;
pub mod figures;
pub mod linalg;
pub mod listing;
pub mod measures;
pub mod rng;
pub mod state;
