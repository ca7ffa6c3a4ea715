pub mod analysis;
pub mod assembly;
pub mod error;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod operators;
pub mod pointsets;
pub mod spectral;
pub mod sphcore;

pub use error::{Result, SpdoError};
