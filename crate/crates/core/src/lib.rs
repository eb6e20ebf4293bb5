pub mod contextuality;
pub mod css;
pub mod dense;
pub mod error;
pub mod gf2;
pub mod injection;
pub mod pauli;
pub mod rng;
pub mod sim;
pub mod states;
pub mod wigner;

pub use error::{Error, Result};
