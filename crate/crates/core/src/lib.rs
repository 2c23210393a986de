//! QoS-aware service composition guided by user preferences.
//!
//! A [`qos::ProblemInstance`] describes a workflow of abstract tasks, the
//! candidate services able to perform each task and the constraints the
//! composition must meet. The [`fuzzy`] module turns a user's importance
//! grades into a confidence-weighted rule base that ranks a composition's
//! aggregated QoS; the [`ga`] module searches the assignment space for the
//! best-ranked composition under a dynamic constraint penalty.
//! [`workload`] produces seeded synthetic instances and [`experiment`]
//! scripts the convergence, scale and baseline studies.

pub mod error;
pub mod experiment;
pub mod format;
pub mod fuzzy;
pub mod ga;
pub mod qos;
pub mod rng;
pub mod workload;

pub use error::{Error, Result};
