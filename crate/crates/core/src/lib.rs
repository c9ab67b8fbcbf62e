//! Exact sparse state-vector simulation of pre- and post-selected shutters
//! in front of a multi-slit screen.
//!
//! * [`state`]: labeled sparse complex states and their linear algebra
//! * [`model`]: shutter, photon and dual-register builders plus the
//!   controlled-reflection interaction
//! * [`analysis`]: scenario pipelines and transmission bookkeeping
//! * [`oracle`]: an independent dense reference implementation
//! * [`report`] and [`cli`]: configuration, JSON/text reports and the batch runner

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod oracle;
pub mod report;
pub mod state;

pub use error::{Error, Result};
pub use state::{Mode, SparseState, SubsystemId};
