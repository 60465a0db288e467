//! Two-spin Heisenberg working substance in a quantum Otto cycle: closed-form
//! cycle thermodynamics, exact two-point-measurement statistics, the
//! thermodynamic uncertainty bound and parameter scans.
//!
//! ```
//! use idle_otto::cycle::{observables, EngineParams};
//!
//! let p = EngineParams::new(2.0, 3.0, 4.0, 1.0, 5.0).unwrap();
//! let o = observables(&p);
//! assert!(o.mean_w < 0.0 && o.is_engine());
//! ```

#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod cycle;
pub mod error;
pub mod output;
pub mod scan;
pub mod spectrum;
pub mod tpm;
pub mod tur;

pub use cycle::{CycleObservables, EngineParams, RegimeLabel};
pub use error::{Error, Result};
