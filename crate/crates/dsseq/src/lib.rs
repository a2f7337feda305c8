//! Davenport–Schinzel sequences, blocked sequences, and the extremal
//! constructions and bounds built on top of them.

pub mod ackermann;
pub mod bounds;
pub mod constructions;
pub mod decompositions;
pub mod error;
pub mod formations;
pub mod oracles;
pub mod sequence;
pub mod tower;

pub use error::{Error, Result};
pub use sequence::{BlockedSequence, Symbol};
pub use tower::{Magnitude, TowerNumber};
