//! Eigenvalue branches, spectral flow and quantized interface conductivity of
//! magnetic Dirac operators with domain walls in the field `B`, the mass `m`
//! and the electric potential `V`.

pub mod branches;
pub mod bulk;
pub mod cli;
pub mod error;
pub mod fiber;
pub mod flow;
pub mod oracle2d;
pub mod profiles;

pub use error::{FlowError, Result};
