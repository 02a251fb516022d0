//! IRS-aided electromagnetic stealth: array and channel models, the radar
//! received-power objective, reflection optimizers, target-side sensing and
//! a seeded experiment harness.

pub mod arrays;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod optimizers;
pub mod power_model;
pub mod scenario;

pub use error::{Error, Result};
