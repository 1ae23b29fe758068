//! Bit-exact emulation of parameterized floating-point formats, interval
//! abstract interpretation of floating-point neural networks, and exact
//! synthesis of networks whose interval semantics computes the direct image
//! map of a rounded target function.
//!
//! Everything semantics-bearing is computed with exact integer and rational
//! arithmetic; host hardware floats never appear in any value path.

pub mod activation;
pub mod conditions;
pub mod dyadic;
pub mod error;
pub mod format;
pub mod fp;
pub mod interval;
pub mod network;
pub mod oracle;
pub mod par;
pub mod program;
pub mod robust;
pub mod synth;
pub mod tables;
pub mod turing;

pub use error::Error;
pub use format::Format;
pub use fp::Fp;
pub use interval::{AbsBox, Interval};

pub type Result<T> = std::result::Result<T, Error>;
