pub mod cli;
pub mod dunkl_calculus;
pub mod error;
pub mod jump_lift;
pub mod linalg;
pub mod radial_sde;
pub mod rng;
pub mod root_systems;
pub mod stat_verify;
pub mod trajectory;

pub use error::{Error, Result};
