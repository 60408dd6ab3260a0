pub mod error;
pub mod ivpp;
pub mod par;
pub mod mapkit;
pub mod numeric;
pub mod sctrace;
pub mod sigma;
pub mod symcore;

pub use error::{Error, Result};
